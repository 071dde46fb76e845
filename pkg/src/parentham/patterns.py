"""Interaction patterns, marginal vectors and K-local Hamiltonians.

A :class:`Pattern` is an ordered list of particle subsets.  Indices are
0-based in code; the text syntax ``"1,2;2,3"`` used by files and the CLI
is 1-based.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .operators import (
    ShapeError,
    SystemShape,
    check_density,
    check_hermitian,
    kron,
    partial_trace,
    tensor_embed,
    trace_norm,
)

MARGINAL_TOL = 1e-10


class PatternError(ValueError):
    pass


@dataclass(frozen=True)
class Pattern:
    shape: SystemShape
    subsets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        subs = []
        for s in self.subsets:
            try:
                s = self.shape.check_subset(s)
            except ShapeError as exc:
                raise PatternError(str(exc)) from None
            subs.append(tuple(sorted(s)))
        if len(set(subs)) != len(subs):
            raise PatternError("pattern lists a subset twice")
        if not subs:
            raise PatternError("pattern must contain at least one subset")
        object.__setattr__(self, "subsets", tuple(subs))

    @classmethod
    def parse(cls, text: str, shape: SystemShape) -> "Pattern":
        """Parse ``"1,2;2,3"`` (1-based) into a pattern."""
        subsets = []
        for chunk in text.replace(" ", "").split(";"):
            if not chunk:
                continue
            try:
                idx = [int(tok) for tok in chunk.split(",") if tok]
            except ValueError:
                raise PatternError(f"bad pattern element {chunk!r}") from None
            for i in idx:
                if not 1 <= i <= shape.n:
                    raise PatternError(
                        f"particle index {i} out of range 1..{shape.n} in pattern {text!r}")
            subsets.append(tuple(i - 1 for i in idx))
        return cls(shape, tuple(subsets))

    @classmethod
    def chain(cls, n: int, periodic: bool = False, d: int = 2) -> "Pattern":
        subs = [(i, i + 1) for i in range(n - 1)]
        if periodic and n > 2:
            subs.append((0, n - 1))
        return cls(SystemShape((d,) * n), tuple(subs))

    @classmethod
    def all_k(cls, shape: SystemShape, k: int) -> "Pattern":
        return cls(shape, tuple(itertools.combinations(range(shape.n), k)))

    def __len__(self):
        return len(self.subsets)

    def __str__(self):
        return ";".join(",".join(str(i + 1) for i in s) for s in self.subsets)

    def index(self, subset: Sequence[int]) -> int:
        return self.subsets.index(tuple(sorted(subset)))

    def covers(self, support: Sequence[int]) -> bool:
        s = set(support)
        return any(s <= set(k) for k in self.subsets)

    def owner(self, support: Sequence[int]) -> tuple[int, ...]:
        """Lexicographically first subset containing ``support``."""
        s = set(support)
        for k in sorted(self.subsets):
            if s <= set(k):
                return k
        raise PatternError(f"support {tuple(support)} is not covered by the pattern")

    def union(self, other: "Pattern") -> "Pattern":
        if other.shape != self.shape:
            raise PatternError("patterns on different systems")
        subs = list(self.subsets) + [s for s in other.subsets if s not in self.subsets]
        return Pattern(self.shape, tuple(subs))

    def contains(self, other: "Pattern") -> bool:
        """Every subset of ``other`` lies inside some subset of ``self``."""
        return all(self.covers(s) for s in other.subsets)


# ---------------------------------------------------------------------------
# marginals

@dataclass
class MarginalVector:
    pattern: Pattern
    marginals: list[np.ndarray]

    def __post_init__(self):
        if len(self.marginals) != len(self.pattern):
            raise PatternError("one marginal per pattern subset is required")
        for k, m in zip(self.pattern.subsets, self.marginals):
            d = self.pattern.shape.sub(k).D
            if np.shape(m) != (d, d):
                raise ShapeError(f"marginal on {k} has shape {np.shape(m)}, expected {(d, d)}")

    def validate(self, tol: float = MARGINAL_TOL) -> None:
        for m in self.marginals:
            check_density(m, tol)

    def max_difference(self, other: "MarginalVector") -> float:
        if other.pattern.subsets != self.pattern.subsets:
            raise PatternError("marginal vectors on different patterns")
        return max(float(np.max(np.abs(a - b))) for a, b in zip(self.marginals, other.marginals))

    def trace_norm_residual(self, other: "MarginalVector") -> float:
        return max(trace_norm(a - b) for a, b in zip(self.marginals, other.marginals))

    def equals(self, other: "MarginalVector", tol: float = MARGINAL_TOL) -> bool:
        return self.max_difference(other) <= tol

    def __add__(self, other):
        return MarginalVector(self.pattern, [a + b for a, b in zip(self.marginals, other.marginals)])

    def __rmul__(self, c):
        return MarginalVector(self.pattern, [c * a for a in self.marginals])


def rdm_vector(rho: np.ndarray, pattern: Pattern) -> MarginalVector:
    D = pattern.shape.D
    if np.shape(rho) != (D, D):
        raise ShapeError(f"state shape {np.shape(rho)} does not match D={D}")
    return MarginalVector(pattern, [partial_trace(rho, k, pattern.shape) for k in pattern.subsets])


# ---------------------------------------------------------------------------
# local operator basis

@lru_cache(maxsize=None)
def gell_mann(d: int) -> tuple[np.ndarray, ...]:
    """Identity followed by the d^2-1 generalized Gell-Mann matrices.

    For d = 2 these are I, X, Y, Z.
    """
    mats = [np.eye(d, dtype=complex)]
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1
            a = np.zeros((d, d), dtype=complex)
            a[j, k], a[k, j] = -1j, 1j
            mats += [s, a]
    for l in range(1, d):
        m = np.zeros((d, d), dtype=complex)
        m[np.arange(l), np.arange(l)] = 1
        m[l, l] = -l
        mats.append(np.sqrt(2.0 / (l * (l + 1))) * m)
    return tuple(mats)


PAULI_LABELS = "IXYZ"


@dataclass(frozen=True)
class BasisElement:
    """Product of single-site Gell-Mann matrices, indexed per particle."""

    shape: SystemShape
    index: tuple[int, ...]  # per-particle Gell-Mann index, 0 = identity
    owner: tuple[int, ...]  # pattern subset that owns this element
    matrix: np.ndarray = field(repr=False, compare=False)
    local: np.ndarray = field(repr=False, compare=False)  # on the owner subset

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, g in enumerate(self.index) if g)

    @property
    def label(self) -> str:
        if self.shape.all_qubits:
            return "".join(PAULI_LABELS[g] for g in self.index)
        return "*".join(str(g) for g in self.index)

    @property
    def norm2(self) -> float:
        """Tr(B^2)."""
        return float(np.real(np.vdot(self.matrix, self.matrix)))


def _product(shape: SystemShape, index: Sequence[int], particles: Sequence[int]) -> np.ndarray:
    return kron(*[gell_mann(shape.dims[p])[index[p]] for p in particles])


@lru_cache(maxsize=64)
def _local_basis_cached(pattern: Pattern) -> tuple[BasisElement, ...]:
    shape = pattern.shape
    n = shape.n
    ident = (0,) * n
    elements = [BasisElement(shape, ident, (), np.eye(shape.D, dtype=complex),
                             np.eye(1, dtype=complex))]
    seen = {ident}
    for k in sorted(pattern.subsets):
        ranges = [range(shape.dims[p] ** 2) for p in k]
        for combo in itertools.product(*ranges):
            if not any(combo):
                continue
            index = [0] * n
            for p, g in zip(k, combo):
                index[p] = g
            index = tuple(index)
            if index in seen:
                continue
            seen.add(index)
            support = tuple(i for i in range(n) if index[i])
            owner = pattern.owner(support)
            local = _product(shape, index, owner)
            full = tensor_embed(local, owner, shape)
            elements.append(BasisElement(shape, index, owner, full, local))
    return tuple(elements)


def local_basis(pattern: Pattern) -> list[BasisElement]:
    """Trace-orthogonal basis of the K-local operators, identity first."""
    return list(_local_basis_cached(pattern))


def basis_stack(pattern: Pattern) -> np.ndarray:
    """Array (M, D, D) of the local basis matrices."""
    return np.stack([b.matrix for b in local_basis(pattern)])


# ---------------------------------------------------------------------------
# local Hamiltonians

@dataclass
class LocalHamiltonian:
    """H = sum_i H_i + offset * I with each H_i supported on a pattern subset."""

    pattern: Pattern
    terms: list[tuple[tuple[int, ...], np.ndarray]]
    offset: float = 0.0

    def __post_init__(self):
        clean = []
        for subset, op in self.terms:
            subset = tuple(sorted(subset))
            if subset not in self.pattern.subsets:
                raise PatternError(f"term subset {subset} is not in the pattern {self.pattern}")
            d = self.pattern.shape.sub(subset).D
            op = check_hermitian(np.asarray(op, dtype=complex), 1e-9)
            if op.shape != (d, d):
                raise ShapeError(f"term on {subset} has shape {op.shape}")
            clean.append((subset, 0.5 * (op + op.conj().T)))
        self.terms = clean
        self.offset = float(self.offset)

    @property
    def shape(self) -> SystemShape:
        return self.pattern.shape

    def assemble(self) -> np.ndarray:
        shape = self.shape
        h = self.offset * np.eye(shape.D, dtype=complex)
        for subset, op in self.terms:
            h = h + tensor_embed(op, subset, shape)
        return h

    def scaled(self, t: float) -> "LocalHamiltonian":
        return LocalHamiltonian(self.pattern, [(s, t * op) for s, op in self.terms], t * self.offset)

    def __add__(self, other: "LocalHamiltonian") -> "LocalHamiltonian":
        pattern = self.pattern.union(other.pattern)
        return LocalHamiltonian(pattern, self.terms + other.terms, self.offset + other.offset)

    def shifted(self, c: float) -> "LocalHamiltonian":
        return LocalHamiltonian(self.pattern, list(self.terms), self.offset + c)

    def merged(self) -> "LocalHamiltonian":
        """One term per subset (terms on the same subset summed)."""
        acc: dict[tuple[int, ...], np.ndarray] = {}
        for s, op in self.terms:
            acc[s] = acc[s] + op if s in acc else op.copy()
        return LocalHamiltonian(self.pattern, [(s, acc[s]) for s in self.pattern.subsets if s in acc],
                                self.offset)

    def relabeled(self, mapping: Sequence[int], shape: SystemShape,
                  pattern: Pattern | None = None) -> "LocalHamiltonian":
        """Move terms to a larger system; local particle i becomes ``mapping[i]``.

        Term matrices are reordered if the mapping does not preserve order.
        """
        new_terms = []
        subsets = []
        for s, op in self.terms:
            g = [mapping[i] for i in s]
            order = np.argsort(g)
            dims = [self.shape.dims[i] for i in s]
            t = op.reshape(dims * 2)
            m = len(s)
            t = t.transpose(list(order) + [m + o for o in order])
            d = op.shape[0]
            gs = tuple(sorted(g))
            new_terms.append((gs, t.reshape(d, d)))
            if gs not in subsets:
                subsets.append(gs)
        if pattern is None:
            pattern = Pattern(shape, tuple(subsets))
        return LocalHamiltonian(pattern, new_terms, self.offset)

    def pauli_terms(self, tol: float = 1e-14) -> list[tuple[str, float]]:
        """Pauli-string coefficients of the assembled operator (qubits only)."""
        if not self.shape.all_qubits:
            raise ShapeError("Pauli strings need an all-qubit system")
        h = self.assemble()
        out = []
        for b in local_basis(self.pattern):
            c = float(np.real(np.vdot(b.matrix, h))) / b.norm2
            if abs(c) > tol:
                out.append((b.label, c))
        return out


def pauli_string(label: str) -> np.ndarray:
    return kron(*[gell_mann(2)[PAULI_LABELS.index(c)] for c in label.upper()])


def from_pauli(shape: SystemShape, pattern: Pattern, entries: Sequence[tuple[str, float]],
               offset: float = 0.0) -> LocalHamiltonian:
    """Build a LocalHamiltonian from Pauli-string entries like ``("XXI", 0.5)``."""
    if not shape.all_qubits:
        raise ShapeError("Pauli strings need an all-qubit system")
    acc: dict[tuple[int, ...], np.ndarray] = {}
    for label, coeff in entries:
        label = label.upper()
        if len(label) != shape.n or any(c not in PAULI_LABELS for c in label):
            raise PatternError(f"bad Pauli string {label!r} for n={shape.n}")
        support = tuple(i for i, c in enumerate(label) if c != "I")
        if not support:
            offset += coeff
            continue
        owner = pattern.owner(support)
        local = kron(*[gell_mann(2)[PAULI_LABELS.index(label[p])] for p in owner])
        acc[owner] = acc.get(owner, 0) + coeff * local
    return LocalHamiltonian(pattern, [(s, acc[s]) for s in pattern.subsets if s in acc], offset)


def project_local(h: np.ndarray, pattern: Pattern) -> tuple[LocalHamiltonian, float]:
    """Orthogonal projection of ``h`` onto the K-local operators.

    Returns the projected Hamiltonian (one term per owner subset, identity
    component as offset) and the Frobenius norm of the rejected part.
    """
    h = check_hermitian(h, 1e-9)
    basis = local_basis(pattern)
    acc: dict[tuple[int, ...], np.ndarray] = {}
    offset = 0.0
    proj = np.zeros_like(h)
    for b in basis:
        c = float(np.real(np.vdot(b.matrix, h))) / b.norm2
        proj += c * b.matrix
        if not b.owner:
            offset = c
        else:
            acc[b.owner] = acc.get(b.owner, 0) + c * b.local
    terms = [(s, acc[s]) for s in pattern.subsets if s in acc]
    residual = float(np.linalg.norm(h - proj))
    return LocalHamiltonian(pattern, terms, offset), residual


def coefficients(h: LocalHamiltonian | np.ndarray, pattern: Pattern) -> np.ndarray:
    """Coefficients on ``local_basis(pattern)`` (trace inner product)."""
    m = h.assemble() if isinstance(h, LocalHamiltonian) else np.asarray(h)
    return np.array([np.real(np.vdot(b.matrix, m)) / b.norm2 for b in local_basis(pattern)])


def from_coefficients(y: np.ndarray, pattern: Pattern) -> LocalHamiltonian:
    acc: dict[tuple[int, ...], np.ndarray] = {}
    offset = 0.0
    for c, b in zip(y, local_basis(pattern)):
        if not b.owner:
            offset += float(c)
        else:
            acc[b.owner] = acc.get(b.owner, 0) + float(c) * b.local
    return LocalHamiltonian(pattern, [(s, acc[s]) for s in pattern.subsets if s in acc], offset)


def traceless_gauge(h: LocalHamiltonian) -> LocalHamiltonian:
    """Same operator with traceless terms; all identity weight moved to the offset."""
    pattern = h.pattern
    y = coefficients(h, pattern)
    return from_coefficients(y, pattern)


def expectations(x: MarginalVector, pattern: Pattern | None = None) -> np.ndarray:
    """Tr(B_j rho) for each local basis element, read off the marginals."""
    pattern = pattern or x.pattern
    out = []
    for b in local_basis(pattern):
        if not b.owner:
            out.append(float(np.real(np.trace(x.marginals[0]))))
            continue
        gamma = x.marginals[x.pattern.index(b.owner)]
        out.append(float(np.real(np.vdot(b.local, gamma))))
    return np.array(out)


def pairing(x: MarginalVector, h: LocalHamiltonian) -> float:
    """<x, H> = sum_j Tr(H_j gamma_j) + offset."""
    if not x.pattern.contains(h.pattern):
        raise PatternError("Hamiltonian pattern is not covered by the marginal vector")
    total = h.offset
    for subset, op in h.terms:
        if subset in x.pattern.subsets:
            gamma = x.marginals[x.pattern.index(subset)]
        else:
            owner = x.pattern.owner(subset)
            big = x.marginals[x.pattern.index(owner)]
            pos = [owner.index(i) for i in subset]
            gamma = partial_trace(big, pos, x.pattern.shape.sub(owner))
        total += float(np.real(np.trace(op @ gamma)))
    return total


def assemble(h: LocalHamiltonian) -> np.ndarray:
    return h.assemble()
