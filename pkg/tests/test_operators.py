import numpy as np
import pytest
from hypothesis import given, strategies as st

from parentham.demos import ghz, rho_c_space
from parentham.operators import (
    ShapeError,
    Subspace,
    SystemShape,
    eigh,
    ket,
    kron,
    log_on_support,
    partial_trace,
    random_density,
    random_hermitian,
    random_state,
    range_of,
    subspace_contains,
    subspace_equal,
    subspace_intersect,
    tensor_embed,
    thermal_state,
    von_neumann_entropy,
)
from parentham.patterns import pauli_string

X, Y, Z = (pauli_string(c) for c in "XYZ")
I2 = np.eye(2)


def test_shape_basics():
    s = SystemShape((2, 3, 2))
    assert s.n == 3 and s.D == 12
    with pytest.raises(ShapeError):
        SystemShape((2, 1))
    with pytest.raises(ShapeError):
        SystemShape(())
    with pytest.raises(ShapeError):
        SystemShape.qubits(13)  # beyond the default cap


def test_tensor_embed_examples(q2, q3):
    assert np.allclose(tensor_embed(Z, [0], q2), np.diag([1, 1, -1, -1]))
    assert np.allclose(tensor_embed(np.eye(4), [0, 2], q3), np.eye(8))
    # J (X1 X2 + X2 X3) + B (Z1 + Z2 + Z3) with J = B = 1
    h = tensor_embed(np.kron(X, X), [0, 1], q3) + tensor_embed(np.kron(X, X), [1, 2], q3)
    h = h + sum(tensor_embed(Z, [i], q3) for i in range(3))
    assert abs(np.trace(h)) < 1e-12
    assert np.allclose(h, kron(X, X, I2) + kron(I2, X, X) + kron(Z, I2, I2) + kron(I2, Z, I2)
                       + kron(I2, I2, Z))


def test_tensor_embed_order(q3):
    op = np.kron(X, Z)
    assert np.allclose(tensor_embed(op, [2, 0], q3), kron(Z, I2, X))


def test_tensor_embed_errors(q2):
    with pytest.raises(ShapeError):
        tensor_embed(np.eye(4), [0], q2)
    with pytest.raises(ShapeError):
        tensor_embed(Z, [2], q2)


def test_partial_trace_examples(q2, q3):
    rho = np.kron(np.diag([1, 0]), np.diag([0, 1])).astype(complex)
    assert np.allclose(partial_trace(rho, [1], q2), np.diag([0, 1]))
    g = np.outer(ghz(), ghz().conj())
    expect = 0.5 * (np.outer(ket("00"), ket("00")) + np.outer(ket("11"), ket("11")))
    assert np.allclose(partial_trace(g, [0, 1], q3), expect)
    assert np.allclose(partial_trace(rho_c_space().mixed_state(), [0, 1], q3), expect)
    bell = (ket("00") + ket("11")) / np.sqrt(2)
    assert np.allclose(partial_trace(np.outer(bell, bell.conj()), [0], q2), I2 / 2)
    with pytest.raises(ShapeError):
        partial_trace(rho, [], q2)


@given(st.integers(0, 10 ** 6), st.sampled_from([(2, 2), (2, 3), (2, 2, 2), (3, 2, 2)]))
def test_partial_trace_trace_and_positivity(seed, dims):
    rng = np.random.default_rng(seed)
    shape = SystemShape(dims)
    rho = random_density(shape.D, rng)
    for keep in ([0], [shape.n - 1], list(range(shape.n - 1))):
        red = partial_trace(rho, keep, shape)
        assert abs(np.trace(red) - 1) < 1e-12
        assert np.linalg.eigvalsh(red)[0] > -1e-12


@given(st.integers(0, 10 ** 6))
def test_tensor_embed_linear(seed):
    rng = np.random.default_rng(seed)
    shape = SystemShape.qubits(3)
    A, B = random_hermitian(4, rng), random_hermitian(4, rng)
    S = [2, 0]
    assert np.allclose(tensor_embed(A, S, shape) + tensor_embed(B, S, shape),
                       tensor_embed(A + B, S, shape))


def test_eigh_examples():
    w, _ = eigh(Z)
    assert np.allclose(w, [-1, 1])
    H1 = pauli_string("IX") + 0.5 * (np.eye(4) + pauli_string("ZI"))
    w, _ = eigh(H1)
    assert np.allclose(w, [-1, 0, 1, 2])
    P = np.outer(ket("01"), ket("01"))
    assert set(np.round(eigh(P)[0], 12)) <= {0.0, 1.0}
    with pytest.raises(ValueError):
        eigh(np.array([[0, 1], [0, 0]]))


@pytest.mark.parametrize("D", [2, 5, 16, 64])
def test_eigh_residual(D, rng):
    h = random_hermitian(D, rng)
    w, v = eigh(h)
    assert np.all(np.diff(w) >= 0)
    assert np.max(np.abs(h - (v * w) @ v.conj().T)) <= 1e-10 * np.max(np.abs(h))


def test_entropy_examples():
    assert von_neumann_entropy(np.outer(ghz(), ghz().conj())) == pytest.approx(0, abs=1e-12)
    assert von_neumann_entropy(np.eye(8) / 8) == pytest.approx(np.log(8))
    assert von_neumann_entropy(rho_c_space().mixed_state()) == pytest.approx(np.log(2))


def test_log_on_support_examples(q2, rng):
    assert np.allclose(log_on_support(np.eye(4) / 4), -np.log(4) * np.eye(4))
    V = Subspace.span(np.stack([ket("00"), ket("11")], 1), q2)
    L = log_on_support(V.mixed_state())
    assert np.allclose(L, -np.log(2) * V.projector)
    h = random_hermitian(4, rng)
    rho = thermal_state(h)
    logZ = np.log(np.sum(np.exp(-np.linalg.eigvalsh(h))))
    assert np.max(np.abs(log_on_support(rho) - (-h - logZ * np.eye(4)))) < 1e-8
    with pytest.raises(ValueError):
        log_on_support(np.zeros((2, 2)))


@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_exp_log_roundtrip(seed, rank):
    rng = np.random.default_rng(seed)
    rho = random_density(4, rng, rank=rank)
    w, v = np.linalg.eigh(rho)
    supp = v[:, w > 1e-14]
    L = supp.conj().T @ log_on_support(rho) @ supp
    lw, lv = np.linalg.eigh(L)
    back = supp @ ((lv * np.exp(lw)) @ lv.conj().T) @ supp.conj().T
    assert np.max(np.abs(back - rho)) < 1e-8


def test_subspace_basics(q2):
    with pytest.raises(ValueError):
        Subspace(q2, np.ones((4, 2)))
    s = Subspace.span([ket("00"), ket("00") + ket("01")], q2)
    assert s.dim == 2
    assert np.allclose(s.mixed_state().trace(), 1)
    assert s.complement().dim == 2


def test_subspace_intersect_examples(q2):
    a = Subspace(q2, ket("00"))
    assert subspace_equal(subspace_intersect(a, a), a)
    assert subspace_intersect(a, Subspace(q2, ket("11"))) is None


def test_subspace_contains_examples(q2):
    a = Subspace(q2, ket("01"))
    full = Subspace.full(q2)
    assert subspace_contains(a, a) and subspace_equal(a, a)
    assert subspace_contains(full, a) and not subspace_equal(full, a)
    assert not subspace_contains(a, full)


def test_intersection_of_lifted_ranges_contains_product_partner(q3):
    # an entangled Acin-form state: the lifted {1,2} and {2,3} ranges meet in 2 dims
    from parentham.constructors import AcinForm

    a = AcinForm.normalized(0.6, 0.3, 0.4, 0.5, 0.35)
    rho = np.outer(a.state(), a.state().conj())
    r12 = range_of(tensor_embed(partial_trace(rho, [0, 1], q3), [0, 1], q3), q3)
    r23 = range_of(tensor_embed(partial_trace(rho, [1, 2], q3), [1, 2], q3), q3)
    W = subspace_intersect(r12, r23)
    assert W.dim == 2
    l2, l3, l4 = a.lambda2, a.lambda3, a.lambda4
    partner = kron(np.array([0, 1]), np.array([l2, l4]), np.array([l3, l4]))
    assert subspace_contains(W, Subspace(q3, partner / np.linalg.norm(partner)), 1e-8)


@given(st.integers(0, 10 ** 6), st.integers(1, 5), st.integers(1, 5))
def test_intersection_properties(seed, ra, rb):
    rng = np.random.default_rng(seed)
    shape = SystemShape.qubits(3)
    common = np.stack([random_state(8, rng) for _ in range(2)], 1)
    A = Subspace.span(np.concatenate([common, np.stack([random_state(8, rng) for _ in range(ra)], 1)], 1), shape)
    B = Subspace.span(np.concatenate([common, np.stack([random_state(8, rng) for _ in range(rb)], 1)], 1), shape)
    ab, ba = subspace_intersect(A, B), subspace_intersect(B, A)
    assert subspace_equal(ab, ba)
    assert subspace_contains(A, ab) and subspace_contains(B, ab)
    assert subspace_contains(ab, Subspace.span(common, shape))
    assert subspace_equal(subspace_intersect(ab, ab), ab)


def test_range_inclusion_single_site_maxent(q2, rng):
    from parentham.maxent import maxent_solve
    from parentham.patterns import Pattern, rdm_vector

    rho = random_density(4, rng)
    sol = maxent_solve(rdm_vector(rho, Pattern.parse("1;2", q2)))
    assert subspace_contains(range_of(sol.state, q2), range_of(rho, q2), 1e-6)
