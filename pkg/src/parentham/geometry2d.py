"""Planar shadows of the state body under two observables.

The image of all states under ``rho -> (Tr rho O1, Tr rho O2)`` is a
compact convex set.  Its support in direction ``theta`` is the lowest
eigenvalue of ``A(theta) = cos(theta) O1 + sin(theta) O2``, attained exactly
by states supported on the ground eigenspace; that contact set is the
exposed face, a point or a segment.

Convention: faces minimize ``cos(theta) x + sin(theta) y``, so ``theta``
is the inward normal of the supporting line.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from .operators import check_hermitian
from .patterns import pauli_string

FACE_TOL = 1e-6
PROBE_DIRECTIONS = 100_000


@dataclass
class Face:
    theta: float
    value: float  # lambda_min(A(theta))
    endpoints: np.ndarray  # (2, 2); equal rows for a point face
    states: np.ndarray  # (D, 2) ground vectors mapping to the endpoints
    dimension: int  # 0 or 1
    gap: float  # spectral gap above the degenerate ground cluster
    multiplicity: int

    def distance(self, point) -> float:
        """Euclidean distance from ``point`` to the face segment."""
        a, b = self.endpoints
        p = np.asarray(point, dtype=float)
        d = b - a
        L = d @ d
        s = 0.0 if L == 0 else float(np.clip((p - a) @ d / L, 0.0, 1.0))
        return float(np.linalg.norm(a + s * d - p))


def _check_pair(O1, O2):
    O1 = check_hermitian(np.asarray(O1, dtype=complex), 1e-10)
    O2 = check_hermitian(np.asarray(O2, dtype=complex), 1e-10)
    if O1.shape != O2.shape:
        raise ValueError("observables have different shapes")
    return O1, O2


def _expect(O, v) -> float:
    return float(np.real(np.vdot(v, O @ v)))


def support_face(O1, O2, theta: float, tol: float = FACE_TOL) -> Face:
    """Exposed face in direction ``theta``: endpoints and affine dimension.

    Eigenvalues within ``tol`` of the minimum form the ground cluster.  The
    face is the image of states on that cluster; its extremes along the
    supporting line come from the tangent observable compressed to it.
    """
    O1, O2 = _check_pair(O1, O2)
    c, s = np.cos(theta), np.sin(theta)
    w, v = np.linalg.eigh(c * O1 + s * O2)
    return _face_from_eig(O1, O2, theta, w, v, tol)


def _face_from_eig(O1, O2, theta, w, v, tol) -> Face:
    c, s = np.cos(theta), np.sin(theta)
    m = int(np.sum(w <= w[0] + tol))
    G = v[:, :m]
    gap = float(w[m] - w[0]) if m < len(w) else float("inf")
    if m == 1:
        vecs = np.stack([G[:, 0], G[:, 0]], axis=1)
    else:
        T = G.conj().T @ (-s * O1 + c * O2) @ G
        tw, tv = np.linalg.eigh(0.5 * (T + T.conj().T))
        vecs = G @ tv[:, [0, -1]]
    pts = np.array([[_expect(O1, vecs[:, k]), _expect(O2, vecs[:, k])] for k in (0, 1)])
    dim = int(np.linalg.norm(pts[1] - pts[0]) > tol)
    return Face(float(theta), float(w[0]), pts, vecs, dim, gap, m)


def _sweep(O1, O2, thetas: np.ndarray, tol: float, chunk: int = 8192):
    """Faces for many directions; batched eigh, exact handling of clusters."""
    D = O1.shape[0]
    chunk = max(1, min(chunk, (2 ** 24) // (D * D)))
    values = np.empty(len(thetas))
    ends = np.empty((len(thetas), 2, 2))
    dims = np.zeros(len(thetas), dtype=int)
    special: dict[int, Face] = {}
    for start in range(0, len(thetas), chunk):
        th = thetas[start:start + chunk]
        A = np.cos(th)[:, None, None] * O1 + np.sin(th)[:, None, None] * O2
        w, v = np.linalg.eigh(A)
        values[start:start + len(th)] = w[:, 0]
        g = v[:, :, 0]
        x = np.einsum("ni,ij,nj->n", g.conj(), O1, g).real
        y = np.einsum("ni,ij,nj->n", g.conj(), O2, g).real
        ends[start:start + len(th), 0, 0] = ends[start:start + len(th), 1, 0] = x
        ends[start:start + len(th), 0, 1] = ends[start:start + len(th), 1, 1] = y
        degenerate = np.nonzero(w[:, 1] - w[:, 0] <= tol)[0] if D > 1 else []
        for k in degenerate:
            f = _face_from_eig(O1, O2, th[k], w[k], v[k], tol)
            i = start + int(k)
            ends[i] = f.endpoints
            dims[i] = f.dimension
            special[i] = f
    return values, ends, dims, special


@dataclass
class BodySample2D:
    observables: tuple[np.ndarray, np.ndarray] = field(repr=False)
    directions: np.ndarray
    values: np.ndarray  # support values lambda_min(A(theta))
    endpoints: np.ndarray  # (N, 2, 2)
    face_dims: np.ndarray

    @property
    def points(self) -> list[tuple[float, float, int]]:
        out = []
        for e, d in zip(self.endpoints, self.face_dims):
            out.append((float(e[0, 0]), float(e[0, 1]), int(d)))
            if d:
                out.append((float(e[1, 0]), float(e[1, 1]), int(d)))
        return out

    def xy(self) -> np.ndarray:
        return np.array([(x, y) for x, y, _ in self.points])

    def hull(self) -> ConvexHull:
        return ConvexHull(_dedupe(self.xy()))

    def area(self) -> float:
        return float(self.hull().volume)

    def segments(self) -> list[tuple[float, np.ndarray]]:
        """(theta, endpoints) for every sampled face of dimension one."""
        return [(float(t), e) for t, e, d in zip(self.directions, self.endpoints, self.face_dims) if d]

    def to_csv(self) -> str:
        """Hull polyline in counter-clockwise order: theta, x, y, face_dim."""
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["theta", "x", "y", "face_dim"])
        for t, e, d in zip(self.directions, self.endpoints, self.face_dims):
            for k in range(1 + int(d)):
                w.writerow([f"{t:.12g}", f"{e[k, 0]:.12g}", f"{e[k, 1]:.12g}", int(d)])
        return buf.getvalue()


def _dedupe(pts: np.ndarray, decimals: int = 12) -> np.ndarray:
    return np.unique(np.round(pts, decimals), axis=0)


def sample_body(O1, O2, n_directions: int = 3600, tol: float = FACE_TOL) -> BodySample2D:
    """Faces for ``n_directions`` uniformly spaced inward normals."""
    if n_directions < 8:
        raise ValueError("need at least 8 directions")
    O1, O2 = _check_pair(O1, O2)
    thetas = 2 * np.pi * np.arange(n_directions) / n_directions
    values, ends, dims, _ = _sweep(O1, O2, thetas, tol)
    return BodySample2D((O1, O2), thetas, values, ends, dims)


# ---------------------------------------------------------------------------
# exposedness

@dataclass
class ProbeResult:
    target: tuple[float, float]
    is_extreme: bool
    is_exposed: bool
    achieving_state: np.ndarray | None = field(default=None, repr=False)
    theta: float | None = None  # exposing direction, or the direction of the best contact
    slack: float = 0.0  # min over theta of  n.target - support
    message: str = ""


def _refine(f, theta0: float, step: float, rounds: int = 40, width: int = 41) -> tuple[float, float]:
    """Zoom on a local minimum of a scalar function of the angle."""
    best_t, best_v = theta0, f(theta0)
    for _ in range(rounds):
        ts = best_t + step * np.linspace(-2, 2, width)
        vals = [f(t) for t in ts]
        k = int(np.argmin(vals))
        if vals[k] <= best_v:
            best_t, best_v = float(ts[k]), float(vals[k])
        step *= 4.0 / (width - 1)
        if step < 1e-15:
            break
    return best_t, best_v


def exposed_probe(O1, O2, target, tol: float = FACE_TOL, n_directions: int = PROBE_DIRECTIONS,
                  outside_tol: float = 1e-3) -> ProbeResult:
    """Is ``target`` an extreme point of the shadow, and is it exposed?

    A boundary point is exposed when some direction's face is the single
    point ``target`` (within ``tol``) with a spectral gap of at least
    ``tol``.  It is extreme when every face containing it has it as an
    endpoint.  Both are decided on a ``n_directions`` grid plus local
    refinement around the best contacts, i.e. at precision ``tol``.
    """
    O1, O2 = _check_pair(O1, O2)
    p = np.asarray(target, dtype=float)
    thetas = 2 * np.pi * np.arange(n_directions) / n_directions
    values, ends, dims, special = _sweep(O1, O2, thetas, tol)
    slack = np.cos(thetas) * p[0] + np.sin(thetas) * p[1] - values
    if slack.min() < -outside_tol:
        raise ValueError(f"target {tuple(p)} lies outside the body (by {-slack.min():.3e})")
    step = 2 * np.pi / n_directions

    def slack_at(t):
        return np.cos(t) * p[0] + np.sin(t) * p[1] - np.linalg.eigvalsh(
            np.cos(t) * O1 + np.sin(t) * O2)[0]

    k0 = int(np.argmin(slack))
    t_best, s_best = _refine(slack_at, thetas[k0], step)
    s_best = min(s_best, float(slack[k0]))
    res = ProbeResult((float(p[0]), float(p[1])), False, False, slack=float(s_best))
    if s_best > tol:
        res.message = "interior point"
        return res

    # candidate contact directions: grid faces near the target, refined
    def dist_at(t):
        return support_face(O1, O2, t, tol).distance(p)

    seg_d = np.array([_segment_distance(e, p) for e in ends])
    cands = {float(thetas[k]) for k in np.argsort(seg_d)[:8]}
    cands |= {float(thetas[i]) for i, face in special.items() if face.distance(p) <= 10 * tol}
    faces = []
    for t in sorted(cands):
        t_ref, _ = _refine(dist_at, t, step)
        faces.extend([support_face(O1, O2, t, tol), support_face(O1, O2, t_ref, tol)])
    touching = [f for f in faces if f.distance(p) <= tol]
    if not touching:
        res.message = "boundary point not reached by any sampled face"
        return res
    interior_of_segment = [f for f in touching if f.dimension and
                           min(np.linalg.norm(f.endpoints - p, axis=1)) > tol]
    res.is_extreme = not interior_of_segment
    exposing = [f for f in touching if f.dimension == 0 and f.gap >= tol]
    if exposing:
        f = exposing[0]
        res.is_exposed = res.is_extreme
        res.theta = f.theta
        res.achieving_state = f.states[:, 0]
    else:
        f = touching[0]
        k = int(np.argmin(np.linalg.norm(f.endpoints - p, axis=1)))
        res.theta = f.theta
        res.achieving_state = f.states[:, k]
    if not res.is_extreme:
        res.message = "inside a boundary segment"
    elif res.is_exposed:
        res.message = f"exposed by theta = {res.theta:.12g}"
    else:
        res.message = (f"extreme but not exposed at precision {tol:g}: every face containing it "
                       "is a segment")
    return res


def _segment_distance(e: np.ndarray, p: np.ndarray) -> float:
    a, b = e
    d = b - a
    L = d @ d
    s = 0.0 if L == 0 else float(np.clip((p - a) @ d / L, 0.0, 1.0))
    return float(np.linalg.norm(a + s * d - p))


@dataclass
class CatalogEntry:
    theta: float
    x: float
    y: float
    face_dim: int
    exposed: bool
    state: np.ndarray | None = field(default=None, repr=False)


def nonexposed_catalog(O1, O2, n_directions: int = PROBE_DIRECTIONS,
                       tol: float = FACE_TOL) -> list[CatalogEntry]:
    """Extreme points that no supporting line isolates.

    In the plane an extreme point that is not exposed is an endpoint of a
    boundary segment, so candidates are the endpoints of sampled segment
    faces; each is then probed.
    """
    O1, O2 = _check_pair(O1, O2)
    thetas = 2 * np.pi * np.arange(n_directions) / n_directions
    _, ends, dims, _ = _sweep(O1, O2, thetas, tol)
    seen: list[tuple[float, np.ndarray]] = []
    for k in np.nonzero(dims)[0]:
        for pt in ends[k]:
            if all(np.linalg.norm(pt - q) > tol for _, q in seen):
                seen.append((float(thetas[k]), pt))
    out = []
    for t, pt in seen:
        r = exposed_probe(O1, O2, pt, tol, n_directions)
        if r.is_extreme and not r.is_exposed:
            out.append(CatalogEntry(t, float(pt[0]), float(pt[1]), 1, False, r.achieving_state))
    return out


def catalog_csv(entries: list[CatalogEntry]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["theta", "x", "y", "face_dim", "exposed"])
    for e in entries:
        w.writerow([f"{e.theta:.12g}", f"{e.x:.12g}", f"{e.y:.12g}", e.face_dim, int(e.exposed)])
    return buf.getvalue()


def two_disk_observables() -> tuple[np.ndarray, np.ndarray]:
    """H1 = X_2 + (I + Z_1)/2 and H2 = Y_2 on two qubits."""
    H1 = pauli_string("IX") + 0.5 * (np.eye(4) + pauli_string("ZI"))
    return H1, pauli_string("IY")
