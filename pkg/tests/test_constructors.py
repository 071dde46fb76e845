import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parentham.constructors import (
    AcinForm,
    ConstructionError,
    NotKCorrelated,
    PerturbationBound,
    WTypeSpec,
    XXZParams,
    acin_decompose,
    annihilators,
    excitation_splitting,
    ff_hamiltonian,
    find_splitting_term,
    haar_state,
    intersection_parent,
    perturb_combine,
    perturbation_bound,
    snap_to_kernel,
    subsystem_compose,
    subsystem_space,
    thermal_parent,
    three_qubit_parent,
    three_qubit_parent_of_state,
    verify_ground_space,
    w_chain_parent,
    xxz_w_hamiltonian,
    xxz_w_parent,
)
from parentham.correlated import leakage
from parentham.demos import (
    PSI1_COMPOSED,
    PSI1_FF,
    PSI1_SUBPATTERNS,
    Q3,
    Q4,
    TRIANGLE,
    ghz,
    psi1,
    rho_c_space,
    w_state,
)
from parentham.operators import Subspace, SystemShape, ket, subspace_contains, subspace_equal
from parentham.patterns import LocalHamiltonian, Pattern, from_pauli, pauli_string

CHAIN = "1,2;2,3"


def test_verify_ground_space_sum_z(q3):
    h = sum(pauli_string(s) for s in ("ZII", "IZI", "IIZ"))
    rep = verify_ground_space(h, Subspace(q3, ket("111")))
    assert rep.passed and rep.ground_energy == pytest.approx(-3) and rep.gap == pytest.approx(2)
    bad = verify_ground_space(h, Subspace(q3, ket("000")))
    assert not bad.passed and "FAIL" in bad.summary()


@pytest.mark.parametrize("which", ["w3", "psi1", "ghz"])
def test_ff_invariants(which):
    V, K = {"w3": (Subspace(Q3, w_state(3)), Pattern.chain(3)),
            "psi1": (Subspace(Q4, psi1()), Pattern.parse(PSI1_FF, Q4)),
            "ghz": (Subspace(Q3, ghz()), Pattern.parse(CHAIN, Q3))}[which]
    h, W = ff_hamiltonian(V, K)
    H = h.assemble()
    assert np.linalg.eigvalsh(H)[0] >= -1e-12
    assert np.max(np.abs(H @ V.basis)) <= 1e-12
    assert subspace_contains(W, V)
    # W is exactly the kernel
    assert np.max(np.abs(H @ W.basis)) <= 1e-10
    for _, P in h.terms:
        assert np.allclose(P @ P, P)


def test_ff_psi1_is_exact():
    V = Subspace(Q4, psi1())
    h, W = ff_hamiltonian(V, Pattern.parse(PSI1_FF, Q4))
    assert W.dim == 1 and verify_ground_space(h, V).passed


def test_perturbation_threshold_w3():
    V = Subspace(Q3, w_state(3))
    K = Pattern.chain(3)
    h0, W = ff_hamiltonian(V, K)
    hu = excitation_splitting(K)
    b, W2 = perturbation_bound(h0, hu, V)
    assert W.dim == 2 and subspace_equal(W, W2)
    assert b.t_star == pytest.approx(1.1 * b.omega * (b.mu + b.omega) / (b.lambda_min_pos_W * b.mu))
    for f in (1.0, 2.0):
        assert verify_ground_space(h0.scaled(f * b.t_star) + hu, V).passed
    assert not verify_ground_space(h0.scaled(0.01 * b.t_star) + hu, V).passed


def test_perturb_combine_w3():
    V = Subspace(Q3, w_state(3))
    K = Pattern.chain(3)
    h0, _ = ff_hamiltonian(V, K)
    res = perturb_combine(h0, excitation_splitting(K), V)
    assert res.report.passed and res.route == "perturb" and res.t == res.bound.t_star


def test_zero_splitting_rejected():
    V = Subspace(Q3, w_state(3))
    K = Pattern.chain(3)
    h0, _ = ff_hamiltonian(V, K)
    with pytest.raises(ConstructionError, match="vanishes"):
        perturb_combine(h0, LocalHamiltonian(K, []), V)
    with pytest.raises(ValueError):
        PerturbationBound(0.0, 1.0, 1.0, 1.0)


def test_splitting_must_annihilate_v():
    V = Subspace(Q3, w_state(3))
    K = Pattern.chain(3)
    h0, _ = ff_hamiltonian(V, K)
    bad = from_pauli(Q3, K, [("ZII", 1.0)])
    with pytest.raises(ConstructionError, match="annihilate"):
        perturb_combine(h0, bad, V)


def test_find_splitting_term(q3):
    V = Subspace(q3, w_state(3))
    K = Pattern.chain(3)
    _, W = ff_hamiltonian(V, K)
    hu = find_splitting_term(V, W, K)
    assert np.max(np.abs(hu.assemble() @ V.basis)) < 1e-10
    with pytest.raises(ConstructionError):
        find_splitting_term(V, V, K)


def test_annihilators_are_annihilators(q3):
    V = rho_c_space()
    K = Pattern.parse(CHAIN, q3)
    N, _ = annihilators(V, K)
    assert N.shape[1] > 0
    rng = np.random.default_rng(0)
    h = LocalHamiltonian(K, [((0, 1), np.diag(rng.normal(size=4))), ((1, 2), np.eye(4))])
    s = snap_to_kernel(h, V)
    assert np.max(np.abs(s.assemble() @ V.basis)) < 1e-10


def test_intersection_parent(q3):
    K = Pattern.parse(CHAIN, q3)
    # ground spaces span{000,111} and span{000,001}, energy 0
    h1 = LocalHamiltonian(K, [((0, 1), (np.eye(4) - np.kron(pauli_string("Z"), pauli_string("Z"))) / 2),
                              ((1, 2), (np.eye(4) - np.kron(pauli_string("Z"), pauli_string("Z"))) / 2)])
    h2 = LocalHamiltonian(K, [((0, 1), (2 * np.eye(4) - np.kron(pauli_string("Z"), np.eye(2))
                                        - np.kron(np.eye(2), pauli_string("Z"))) / 2)])
    V1 = rho_c_space()
    V2 = Subspace.span(np.stack([ket("000"), ket("001")], 1), q3)
    res = intersection_parent(h1, h2, V1, V2)
    assert res.report.passed and res.report.ground_dim == 1
    assert verify_ground_space(res.hamiltonian, Subspace(q3, ket("000"))).passed
    with pytest.raises(ConstructionError):
        intersection_parent(h1, h2, V1, Subspace(q3, ket("010")))


def test_thermal_parent_rho_c_and_ghz(q3):
    K = Pattern.parse(CHAIN, q3)
    res = thermal_parent(rho_c_space(), K)
    assert res.report.passed and res.route == "thermal"
    with pytest.raises(NotKCorrelated):
        thermal_parent(Subspace(q3, ghz()), K)


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6))
def test_acin_decompose_round_trip(seed):
    psi = haar_state(8, np.random.default_rng(seed))
    a, (U1, U2, U3) = acin_decompose(psi)
    out = np.kron(np.kron(U1, U2), U3) @ psi
    assert np.allclose(out, a.state(), atol=1e-10)
    assert a.lambda0 >= 0 and a.lambda4 >= 0


def test_acin_form_validation():
    with pytest.raises(ValueError):
        AcinForm(0.5, 0.5, 0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        AcinForm.normalized(1, 0, -1, 0, 1)


def test_three_qubit_random_states(rng):
    K = Pattern.parse(CHAIN, Q3)
    for _ in range(10):
        psi = haar_state(8, rng)
        res = three_qubit_parent_of_state(psi)
        assert res.report.passed and res.report.overlap >= 1 - 1e-8
        assert str(res.hamiltonian.pattern) == str(K)


@pytest.mark.parametrize("lam", [(1, 0, 0, 0, 1), (0.3, 0, 0, 0, 0.7), (2, 0, 0, 0, 1)])
def test_three_qubit_ghz_type_rejected(lam):
    with pytest.raises(NotKCorrelated):
        three_qubit_parent(AcinForm.normalized(*lam))


def test_three_qubit_product_state_is_frustration_free():
    res = three_qubit_parent(AcinForm.normalized(1, 0, 0, 0, 0))
    assert res.route == "ff" and res.report.passed


def test_three_qubit_degenerate_branch():
    # l1 l4 = l2 l3 but not GHZ-type: |0>|00> + |1>|x>|y> with x, y not |0>
    x, y = np.array([0.6, 0.8]), np.array([0.8, 0.6])
    t = np.kron(x, y)
    res = three_qubit_parent(AcinForm.normalized(1.0, t[0], t[1], t[2], t[3]))
    assert res.report.passed


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_w_chain_equal(n):
    res = w_chain_parent(WTypeSpec.equal(n))
    assert res.report.passed and res.report.gap > 0
    assert all(len(s) <= 2 and (len(s) == 1 or s[1] - s[0] == 1) for s, _ in res.hamiltonian.terms)


def test_w_type_unequal_amplitudes():
    res = w_chain_parent(WTypeSpec.normalized([1, -2, 0.5j, 1]))
    assert res.report.passed


def test_w_type_spec_validation():
    with pytest.raises(ValueError):
        WTypeSpec.normalized([1, 0, 1])
    with pytest.raises(ValueError):
        WTypeSpec.normalized([1, 1])
    psi = WTypeSpec.equal(3).state()
    assert np.allclose(psi, w_state(3)) and abs(psi[4]) > 0  # |100>


@pytest.mark.parametrize("n", [3, 4, 5])
def test_xxz_w_parent(n):
    res = xxz_w_parent(n)
    assert res.report.passed
    H = res.hamiltonian.assemble()
    N = sum(pauli_string("I" * i + "Z" + "I" * (n - 1 - i)) for i in range(n))
    assert np.allclose(H @ N, N @ H)


def test_xxz_epsilon_zero_degenerate():
    h = xxz_w_hamiltonian(3, XXZParams(epsilon=0.0))
    rep = verify_ground_space(h, Subspace(Q3, w_state(3)))
    assert rep.ground_dim == 2 and not rep.passed
    with pytest.raises(ValueError):
        XXZParams(epsilon=-1)
    with pytest.raises(ValueError):
        XXZParams(p_alpha=0)


def test_subsystem_compose_psi1():
    V = Subspace(Q4, psi1())
    res = subsystem_compose(V, Pattern.parse(PSI1_FF, Q4), [Pattern.parse(s, Q4) for s in PSI1_SUBPATTERNS])
    assert res.report.passed and str(res.hamiltonian.pattern) == PSI1_COMPOSED
    assert all(len(s) <= 2 for s, _ in res.hamiltonian.terms)


def test_subsystem_space_123_correlated():
    V123 = subsystem_space(Subspace(Q4, psi1()), (0, 1, 2))
    assert V123.dim == 2
    assert leakage(V123, Pattern.parse(TRIANGLE, Q3)).status == "correlated"


def test_subsystem_compose_needs_ff_ground_space():
    V = Subspace(Q3, ghz())
    with pytest.raises(ConstructionError):
        subsystem_compose(V, Pattern.parse(CHAIN, Q3),
                          [Pattern.parse("1;2", Q3), Pattern.parse("2;3", Q3)])


def test_constructed_ground_spaces_are_correlated():
    # every ground space of a K-local Hamiltonian is K-correlated
    res = w_chain_parent(WTypeSpec.equal(4))
    gs = Subspace(SystemShape.qubits(4), np.linalg.eigh(res.hamiltonian.assemble())[1][:, 0])
    assert leakage(gs, res.hamiltonian.pattern).status == "correlated"
