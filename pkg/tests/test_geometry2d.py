import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parentham.geometry2d import (
    catalog_csv,
    exposed_probe,
    nonexposed_catalog,
    sample_body,
    support_face,
    two_disk_observables,
)
from parentham.operators import random_hermitian
from parentham.patterns import pauli_string as P

H1, H2 = two_disk_observables()


def test_top_edge_is_a_segment():
    # inward normal -pi/2 minimizes -y, i.e. the top of the body
    f = support_face(H1, H2, -np.pi / 2)
    assert f.dimension == 1 and f.multiplicity == 2
    ends = sorted(map(tuple, np.round(f.endpoints, 9)))
    assert np.allclose(ends, [(0, 1), (1, 1)])


def test_left_point_face():
    f = support_face(H1, H2, 0.0)
    assert f.dimension == 0
    assert np.allclose(f.endpoints, [[-1, 0], [-1, 0]])
    assert f.gap == pytest.approx(1.0)


def test_commuting_corner():
    f = support_face(P("ZI"), P("IZ"), np.pi / 4)
    assert f.dimension == 0 and np.allclose(f.endpoints[0], [-1, -1])
    g = support_face(P("ZI"), P("IZ"), np.pi)
    assert g.dimension == 1


@pytest.mark.parametrize("ops,area,n", [
    ((H1, H2), np.pi + 2, 3600),
    ((P("X"), P("Y")), np.pi, 3600),
    ((P("ZI"), P("IZ")), 4.0, 64),
])
def test_areas(ops, area, n):
    assert sample_body(*ops, n).area() == pytest.approx(area, abs=1e-3)


def test_too_few_directions():
    with pytest.raises(ValueError):
        sample_body(H1, H2, 7)


def test_mismatched_observables():
    with pytest.raises(ValueError):
        support_face(P("X"), P("IX"), 0.0)


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6), st.floats(0, 2 * np.pi))
def test_support_pairing(seed, theta):
    rng = np.random.default_rng(seed)
    A, B = random_hermitian(4, rng), random_hermitian(4, rng)
    f = support_face(A, B, theta)
    n = np.array([np.cos(theta), np.sin(theta)])
    for e, v in zip(f.endpoints, f.states.T):
        assert n @ e == pytest.approx(f.value, abs=1e-10)
        assert np.vdot(v, A @ v).real == pytest.approx(e[0], abs=1e-12)
    # no sampled body point lies below the supporting line
    body = sample_body(A, B, 64)
    assert np.min(body.xy() @ n) >= f.value - 1e-10


def test_degeneracy_detection():
    body = sample_body(H1, H2, 360)
    segs = body.segments()
    thetas = sorted(round(t, 9) for t, _ in segs)
    assert thetas == pytest.approx([np.pi / 2, 3 * np.pi / 2])


def test_probe_points():
    r = exposed_probe(H1, H2, (-1.0, 0.0), n_directions=20000)
    assert r.is_extreme and r.is_exposed
    r = exposed_probe(H1, H2, (0.0, 1.0), n_directions=20000)
    assert r.is_extreme and not r.is_exposed
    psi = r.achieving_state
    assert np.vdot(psi, H1 @ psi).real == pytest.approx(0, abs=1e-9)
    assert np.vdot(psi, H2 @ psi).real == pytest.approx(1, abs=1e-9)
    r = exposed_probe(H1, H2, (0.5, 1.0), n_directions=20000)
    assert not r.is_extreme
    r = exposed_probe(H1, H2, (0.5, 0.0), n_directions=20000)
    assert not r.is_extreme and r.message == "interior point"


def test_probe_outside_raises():
    with pytest.raises(ValueError, match="outside"):
        exposed_probe(H1, H2, (3.0, 0.0), n_directions=2000)


def test_catalog_and_csv():
    cat = nonexposed_catalog(H1, H2, n_directions=20000)
    pts = sorted((round(e.x, 6) + 0.0, round(e.y, 6) + 0.0) for e in cat)
    assert pts == [(0.0, -1.0), (0.0, 1.0), (1.0, -1.0), (1.0, 1.0)]
    text = catalog_csv(cat).splitlines()
    assert text[0] == "theta,x,y,face_dim,exposed" and len(text) == 5
    body = sample_body(H1, H2, 16).to_csv().splitlines()
    assert body[0] == "theta,x,y,face_dim"
    assert len(body) == 1 + 16 + 2  # two segment faces contribute two rows each
