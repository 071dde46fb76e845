"""Dense Hermitian linear algebra on tensor-product spaces.

Particles are numbered from 0 internally. Particle 0 is the leftmost
Kronecker factor (most significant digit of a basis index), so that
``|100>`` means particle 0 is excited.  Operators and states are plain
complex ``numpy`` arrays; :class:`SystemShape` and :class:`Subspace` carry
the bookkeeping.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
DENSITY_TOL = 1e-10
RANK_CUTOFF = 1e-10
LOG_CUTOFF = 1e-14
MAX_DIMENSION = 4096


class ShapeError(ValueError):
    """Operator or subset does not fit the system shape."""


@dataclass(frozen=True)
class SystemShape:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if len(dims) < 1:
            raise ShapeError("a system needs at least one particle")
        if any(d < 2 for d in dims):
            raise ShapeError(f"local dimensions must be >= 2, got {dims}")
        if self.D > MAX_DIMENSION:
            raise ShapeError(f"total dimension {self.D} exceeds cap {MAX_DIMENSION}")

    @classmethod
    def qubits(cls, n: int) -> "SystemShape":
        return cls((2,) * n)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def D(self) -> int:
        return int(np.prod(self.dims))

    @property
    def all_qubits(self) -> bool:
        return all(d == 2 for d in self.dims)

    def sub(self, subset: Sequence[int]) -> "SystemShape":
        return SystemShape(tuple(self.dims[i] for i in subset))

    def check_subset(self, subset: Iterable[int]) -> tuple[int, ...]:
        s = tuple(int(i) for i in subset)
        if not s:
            raise ShapeError("empty particle subset")
        if len(set(s)) != len(s):
            raise ShapeError(f"duplicate particles in {s}")
        bad = [i for i in s if not 0 <= i < self.n]
        if bad:
            raise ShapeError(f"particle index {bad[0]} out of range for n={self.n}")
        return s


# ---------------------------------------------------------------------------
# validation

def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol * scale)


def check_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if not is_hermitian(a, tol):
        raise ValueError("operator is not Hermitian")
    return a


def check_density(rho: np.ndarray, tol: float = DENSITY_TOL) -> np.ndarray:
    rho = check_hermitian(rho, max(tol, HERMITIAN_TOL))
    if abs(np.trace(rho).real - 1.0) > tol:
        raise ValueError(f"trace {np.trace(rho).real!r} is not 1")
    if np.linalg.eigvalsh(rho)[0] < -tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def pure(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def ket(bits: str, dims: Sequence[int] | None = None) -> np.ndarray:
    """Computational basis vector, e.g. ``ket("101")``."""
    digits = [int(c) for c in bits]
    dims = tuple(dims) if dims is not None else (2,) * len(digits)
    v = np.zeros(int(np.prod(dims)), dtype=complex)
    v[np.ravel_multi_index(digits, dims)] = 1.0
    return v


# ---------------------------------------------------------------------------
# tensor bookkeeping

def kron(*ops: np.ndarray) -> np.ndarray:
    return reduce(np.kron, ops)


def tensor_embed(op: np.ndarray, subset: Sequence[int], shape: SystemShape) -> np.ndarray:
    """Lift ``op`` acting on ``subset`` (in the given order) to the full space."""
    subset = shape.check_subset(subset)
    op = np.asarray(op, dtype=complex)
    sub_dims = [shape.dims[i] for i in subset]
    d_sub = int(np.prod(sub_dims))
    if op.shape != (d_sub, d_sub):
        raise ShapeError(f"operator shape {op.shape} does not match subset dims {sub_dims}")
    rest = [i for i in range(shape.n) if i not in subset]
    d_rest = int(np.prod([shape.dims[i] for i in rest])) if rest else 1
    full = np.kron(op, np.eye(d_rest))
    order = list(subset) + rest
    n = shape.n
    t = full.reshape([shape.dims[i] for i in order] * 2)
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [n + k for k in inv])
    return t.reshape(shape.D, shape.D)


def partial_trace(rho: np.ndarray, keep: Sequence[int], shape: SystemShape) -> np.ndarray:
    """Reduced operator on ``keep``; kept particles appear in the given order."""
    if len(keep) == 0:
        raise ShapeError("keep set must be nonempty")
    keep = shape.check_subset(keep)
    n = shape.n
    t = np.asarray(rho).reshape(shape.dims * 2)
    traced = [i for i in range(n) if i not in keep]
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in traced:
        col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    red = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d = int(np.prod([shape.dims[i] for i in keep]))
    return red.reshape(d, d)


def permute_state(psi: np.ndarray, order: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of a state vector: new factor k is old ``order[k]``."""
    t = np.asarray(psi).reshape(dims)
    return t.transpose(order).ravel()


# ---------------------------------------------------------------------------
# spectral functions

def eigh(op: np.ndarray, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix."""
    a = check_hermitian(op, tol)
    a = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(a)
    return w, v


def apply_function(op: np.ndarray, f) -> np.ndarray:
    w, v = eigh(op)
    return (v * f(w)) @ v.conj().T


def expm_hermitian(op: np.ndarray) -> np.ndarray:
    return apply_function(op, np.exp)


def von_neumann_entropy(rho: np.ndarray, cutoff: float = LOG_CUTOFF) -> float:
    w = np.linalg.eigvalsh(0.5 * (rho + np.conj(rho).T))
    w = w[w > cutoff]
    return float(max(0.0, -np.sum(w * np.log(w))))


def log_on_support(rho: np.ndarray, cutoff: float = LOG_CUTOFF) -> np.ndarray:
    """Matrix logarithm on the support of ``rho``; zero on its kernel."""
    w, v = eigh(rho, tol=1e-10)
    mask = w > cutoff
    if not np.any(mask):
        raise ValueError("log_on_support of the zero matrix")
    vals = np.zeros_like(w)
    vals[mask] = np.log(w[mask])
    return (v * vals) @ v.conj().T


def thermal_state(h: np.ndarray, beta: float = 1.0) -> np.ndarray:
    w, v = eigh(h)
    e = np.exp(-beta * (w - w[0]))
    e /= e.sum()
    return (v * e) @ v.conj().T


def trace_norm(a: np.ndarray) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (a + np.conj(a).T)))))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    return 0.5 * trace_norm(np.asarray(a) - np.asarray(b))


# ---------------------------------------------------------------------------
# subspaces

@dataclass(frozen=True)
class Subspace:
    """Orthonormal basis (columns) of a subspace of the full Hilbert space."""

    shape: SystemShape
    basis: np.ndarray
    projector: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim == 1:
            b = b[:, None]
        if b.shape[0] != self.shape.D or not 1 <= b.shape[1] <= self.shape.D:
            raise ShapeError(f"basis shape {b.shape} incompatible with D={self.shape.D}")
        gram = b.conj().T @ b
        if np.max(np.abs(gram - np.eye(b.shape[1]))) > 1e-10:
            raise ValueError("basis columns are not orthonormal")
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "projector", b @ b.conj().T)

    @classmethod
    def span(cls, vectors, shape: SystemShape, rel_cutoff: float = RANK_CUTOFF) -> "Subspace":
        """Orthonormalized span of the given vectors (rows or a column matrix)."""
        m = np.asarray(vectors, dtype=complex)
        if m.ndim == 1:
            m = m[:, None]
        elif m.shape[0] != shape.D:
            m = m.T
        u, s, _ = np.linalg.svd(m, full_matrices=False)
        if s.size == 0 or s[0] == 0:
            raise ValueError("cannot span the zero vector")
        r = int(np.sum(s > rel_cutoff * s[0]))
        return cls(shape, u[:, :r])

    @classmethod
    def full(cls, shape: SystemShape) -> "Subspace":
        return cls(shape, np.eye(shape.D, dtype=complex))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def mixed_state(self) -> np.ndarray:
        """Maximally mixed state supported on the subspace."""
        return self.projector / self.dim

    def complement(self) -> "Subspace | None":
        w, v = np.linalg.eigh(np.eye(self.shape.D) - self.projector)
        cols = v[:, w > 0.5]
        return Subspace(self.shape, cols) if cols.shape[1] else None

    def __repr__(self):
        return f"Subspace(dims={self.shape.dims}, dim={self.dim})"


def range_of(op: np.ndarray, shape: SystemShape, rel_cutoff: float = RANK_CUTOFF) -> Subspace:
    """Span of eigenvectors with eigenvalue above ``rel_cutoff`` times the largest."""
    w, v = eigh(op, tol=1e-9)
    top = np.max(np.abs(w))
    if top == 0:
        raise ValueError("range of the zero operator")
    return Subspace(shape, v[:, w > rel_cutoff * top])


def kernel_projector(op: np.ndarray, rel_cutoff: float = RANK_CUTOFF) -> np.ndarray:
    """Projector onto the kernel of a positive semidefinite operator."""
    w, v = eigh(op, tol=1e-9)
    top = np.max(np.abs(w))
    ker = v[:, w <= rel_cutoff * top]
    return ker @ ker.conj().T


def subspace_intersect(a: Subspace, b: Subspace, tol: float = 1e-8) -> Subspace | None:
    """Intersection of two subspaces, or ``None`` when it is trivial."""
    if a.shape != b.shape:
        raise ShapeError("subspaces live on different systems")
    w, v = np.linalg.eigh(a.projector + b.projector)
    cols = v[:, w >= 2.0 - tol]
    if cols.shape[1] == 0:
        return None
    # re-orthonormalize; eigh already returns orthonormal columns
    return Subspace(a.shape, cols)


def intersect_all(spaces: Sequence[Subspace], tol: float = 1e-8) -> Subspace | None:
    out = spaces[0]
    for s in spaces[1:]:
        out = subspace_intersect(out, s, tol)
        if out is None:
            return None
    return out


def subspace_contains(a: Subspace, b: Subspace, tol: float = 1e-8) -> bool:
    """True when ``b`` lies inside ``a``."""
    resid = b.basis - a.projector @ b.basis
    return bool(np.max(np.abs(resid)) <= tol)


def subspace_equal(a: Subspace, b: Subspace, tol: float = 1e-8) -> bool:
    return a.dim == b.dim and subspace_contains(a, b, tol) and subspace_contains(b, a, tol)


def subspace_overlap(a: Subspace, b: Subspace) -> float:
    """Tr(P_a P_b) / max(dim a, dim b); equals 1 exactly when a == b."""
    return float(np.real(np.vdot(a.projector, b.projector))) / max(a.dim, b.dim)


# ---------------------------------------------------------------------------
# random instances

def random_state(D: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=D) + 1j * rng.normal(size=D)
    return v / np.linalg.norm(v)


def random_density(D: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from the induced (Ginibre) measure."""
    rank = D if rank is None else rank
    g = rng.normal(size=(D, rank)) + 1j * rng.normal(size=(D, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(D: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
    return scale * 0.5 * (g + g.conj().T)
