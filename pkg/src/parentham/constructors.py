"""Constructive routes to parent Hamiltonians.

* frustration-free intersection of marginal ranges,
* perturbative splitting ``t H_W + H_U`` of a too-large FF ground space,
* the analytic three-qubit pipeline in Acin form,
* W-type chains and the XXZ model in a field,
* the thermal path (with an exact-kernel snap), and
* composition over subsystems.

Every route ends in :func:`verify_ground_space`; a construction either
returns a verified Hamiltonian or raises.

Perturbation bound.  Write a vector as ``v1 + v2 + v3`` with ``v1 in V``,
``v2 in W - V`` and ``v3`` orthogonal to ``W``.  If ``H_U v1 = 0``, the
compression of ``H_U`` to ``W - V`` is at least ``mu > 0`` and
``||H_U|| = omega``, then

    <v|t H_W + H_U|v> >= (t lam - omega)|v3|^2 - 2 omega |v2||v3| + mu |v2|^2

which is positive definite on the complement of ``V`` once
``t > omega (mu + omega) / (lam mu)``.  ``H_U`` itself need not be
positive: only its compression to ``W - V`` enters.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from .correlated import CorrelatednessCertificate, leakage
from .maxent import PathConfig, ground_space, thermal_path
from .operators import (
    RANK_CUTOFF,
    Subspace,
    SystemShape,
    intersect_all,
    kernel_projector,
    kron,
    partial_trace,
    range_of,
    subspace_contains,
    subspace_equal,
    subspace_intersect,
    subspace_overlap,
    tensor_embed,
)
from .patterns import LocalHamiltonian, Pattern, basis_stack, from_coefficients, from_pauli

log = logging.getLogger(__name__)

VERIFY_TOL = 1e-8
MARGIN = 1.1


class NotKCorrelated(RuntimeError):
    """The target space cannot be a K-local ground space."""

    def __init__(self, msg, certificate: CorrelatednessCertificate | None = None,
                 leakage: float | None = None):
        super().__init__(msg)
        self.certificate = certificate
        self.leakage = leakage if leakage is not None else (
            certificate.lower_bound if certificate is not None else None)


class ConstructionError(RuntimeError):
    """A route's preconditions failed or its output did not verify."""


# ---------------------------------------------------------------------------
# verification

@dataclass
class GroundSpaceReport:
    ground_energy: float
    gap: float  # E_r - E_0 with r = dim V
    overlap: float  # Tr(P_G P_V) / max(dim G, dim V)
    ground_dim: int
    target_dim: int
    passed: bool
    tol: float

    def summary(self) -> str:
        if self.passed:
            head = "unique ground state" if self.target_dim == 1 else \
                f"ground space equals V (dim {self.target_dim})"
        elif self.ground_dim == self.target_dim:
            head = f"FAIL: ground space (dim {self.ground_dim}) differs from V"
        else:
            head = f"FAIL: ground space dim {self.ground_dim} vs target {self.target_dim}"
        return (f"{head}; E0 = {self.ground_energy:.6g}, gap = {self.gap:.6g}, "
                f"fidelity = {self.overlap:.12f}")


def verify_ground_space(h: LocalHamiltonian | np.ndarray, V: Subspace, tol: float = VERIFY_TOL,
                        rel_tol: float = 1e-7) -> GroundSpaceReport:
    """Diagonalize ``h`` and compare its ground eigenspace with ``V``."""
    m = h.assemble() if isinstance(h, LocalHamiltonian) else np.asarray(h)
    gs, w = ground_space(m, V.shape, rel_tol)
    r = V.dim
    gap = float(w[r] - w[0]) if r < len(w) else float("inf")
    ok = gs.dim == r and subspace_equal(gs, V, tol)
    return GroundSpaceReport(float(w[0]), gap, subspace_overlap(gs, V), gs.dim, r, ok, tol)


@dataclass
class PerturbationBound:
    lambda_min_pos_W: float
    mu: float
    omega: float
    t_star: float
    margin: float = MARGIN

    def __post_init__(self):
        if not (self.lambda_min_pos_W > 0 and self.mu > 0 and self.omega > 0):
            raise ValueError("perturbation bound needs lambda, mu, omega > 0")


@dataclass
class ConstructionResult:
    hamiltonian: LocalHamiltonian
    route: str
    report: GroundSpaceReport
    bound: PerturbationBound | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def t(self) -> float | None:
        return self.bound.t_star if self.bound else None


def _require(report: GroundSpaceReport, what: str) -> GroundSpaceReport:
    if not report.passed:
        raise ConstructionError(f"{what} failed verification: {report.summary()}")
    return report


# ---------------------------------------------------------------------------
# frustration-free route

def ff_hamiltonian(V: Subspace, pattern: Pattern,
                   rel_cutoff: float = RANK_CUTOFF) -> tuple[LocalHamiltonian, Subspace]:
    """Sum of kernel projectors of the marginals of rho_V, and its ground space W."""
    if V.shape != pattern.shape:
        raise ValueError("subspace and pattern live on different systems")
    rho = V.mixed_state()
    terms = []
    lifted = []
    for K in pattern.subsets:
        gamma = partial_trace(rho, K, V.shape)
        P0 = kernel_projector(gamma, rel_cutoff)
        if np.trace(P0).real > 0.5:
            terms.append((K, P0))
        lifted.append(range_of(tensor_embed(np.eye(len(P0)) - P0, K, V.shape), V.shape))
    W = intersect_all(lifted)
    if W is None:  # cannot happen for consistent input; V lies in every lifted range
        raise ConstructionError("intersection of marginal ranges is trivial")
    return LocalHamiltonian(pattern, terms), W


def _orth_complement_in(W: Subspace, V: Subspace) -> np.ndarray:
    """Orthonormal basis of W - V (columns, possibly empty)."""
    w, v = np.linalg.eigh(W.projector - V.projector)
    return v[:, w > 0.5]


# ---------------------------------------------------------------------------
# operators annihilating V

def _scaled_basis(pattern: Pattern) -> np.ndarray:
    B = basis_stack(pattern)
    norms = np.sqrt(np.einsum("mij,mji->m", B, B).real)
    return B / norms[:, None, None], norms


def annihilators(V: Subspace, pattern: Pattern) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal coordinates spanning {K-local H : H V = 0}.

    Returns (N, norms) where the columns of ``N`` are trace-orthonormal
    coordinate vectors over the scaled local basis.
    """
    Bh, norms = _scaled_basis(pattern)
    img = np.einsum("mij,jr->mir", Bh, V.basis).reshape(len(Bh), -1)
    A = np.concatenate([img.real, img.imag], axis=1).T
    return null_space(A, rcond=1e-10), norms


def _coords(op: np.ndarray, pattern: Pattern) -> np.ndarray:
    Bh, _ = _scaled_basis(pattern)
    return np.real(np.einsum("mij,ji->m", Bh, op))


def _from_coords(c: np.ndarray, pattern: Pattern, norms: np.ndarray) -> LocalHamiltonian:
    return from_coefficients(c / norms, pattern)


def project_annihilating(op: np.ndarray, V: Subspace, pattern: Pattern) -> LocalHamiltonian:
    """Closest (Frobenius) K-local operator that annihilates V."""
    N, norms = annihilators(V, pattern)
    if N.shape[1] == 0:
        raise ConstructionError("no nonzero K-local operator annihilates V")
    c = N @ (N.T @ _coords(op, pattern))
    return _from_coords(c, pattern, norms)


def snap_to_kernel(h: LocalHamiltonian, V: Subspace) -> LocalHamiltonian:
    """Remove the part of ``h`` that fails to annihilate V.

    A thermal Hamiltonian holds V in its kernel only up to the path's
    temperature; the snapped operator holds it exactly.
    """
    return project_annihilating(h.assemble(), V, h.pattern)


def find_splitting_term(V: Subspace, W: Subspace, pattern: Pattern) -> LocalHamiltonian:
    """K-local H_U with H_U V = 0 and positive compression to W - V.

    Projects the projector onto W - V into the annihilators of V.  The
    compression has trace ``||proj||^2``, so for a one-dimensional W - V it
    is positive whenever any annihilator sees W - V at all.
    """
    E = _orth_complement_in(W, V)
    if E.shape[1] == 0:
        raise ConstructionError("W equals V: nothing to split")
    h = project_annihilating(E @ E.conj().T, V, pattern)
    C = E.conj().T @ h.assemble() @ E
    if np.linalg.eigvalsh(C)[0] <= 1e-9:
        raise ConstructionError("no K-local operator annihilating V separates W - V")
    return h


# ---------------------------------------------------------------------------
# perturbation route

def perturbation_bound(h_w: LocalHamiltonian, h_u: LocalHamiltonian, V: Subspace,
                       tol: float = 1e-9, margin: float = MARGIN) -> tuple[PerturbationBound, Subspace]:
    Hw = h_w.assemble()
    Hu = h_u.assemble()
    w, vecs = np.linalg.eigh(Hw)
    scale = max(1.0, abs(w[-1]))
    if w[0] < -tol * scale:
        raise ConstructionError(f"H_W is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    zero = w <= tol * scale
    if not zero.any():
        raise ConstructionError("H_W has no kernel")
    W = Subspace(V.shape, vecs[:, zero])
    if zero.all():
        raise ConstructionError("H_W vanishes")
    lam = float(w[~zero][0])
    if not subspace_contains(W, V, 1e-7):
        raise ConstructionError("V is not inside the kernel of H_W")
    omega = float(np.linalg.norm(Hu, 2))
    if omega <= tol:
        raise ConstructionError("H_U vanishes: mu is undefined")
    if np.max(np.abs(Hu @ V.basis)) > tol * max(1.0, omega):
        raise ConstructionError("H_U does not annihilate V")
    E = _orth_complement_in(W, V)
    if E.shape[1] == 0:
        return PerturbationBound(lam, float("inf"), omega, margin * omega / lam, margin), W
    mu = float(np.linalg.eigvalsh(E.conj().T @ Hu @ E)[0])
    if mu <= tol:
        raise ConstructionError(
            f"kernel(H_U) meets W outside V (compression min eigenvalue {mu:.3e})")
    t = margin * omega * (mu + omega) / (lam * mu)
    return PerturbationBound(lam, mu, omega, t, margin), W


def perturb_combine(h_w: LocalHamiltonian, h_u: LocalHamiltonian, V: Subspace,
                    margin: float = MARGIN, tol: float = VERIFY_TOL) -> ConstructionResult:
    """``t H_W + H_U`` at the certified threshold, verified."""
    bound, _ = perturbation_bound(h_w, h_u, V, margin=margin)
    h = h_w.scaled(bound.t_star) + h_u
    rep = _require(verify_ground_space(h, V, tol), "perturbative combination")
    return ConstructionResult(h, "perturb", rep, bound)


def intersection_parent(h1: LocalHamiltonian, h2: LocalHamiltonian, V1: Subspace, V2: Subspace,
                        tol: float = VERIFY_TOL) -> ConstructionResult:
    """Ground spaces V1, V2 at energy 0 give H1 + H2 with ground space V1 & V2."""
    V = subspace_intersect(V1, V2)
    if V is None:
        raise ConstructionError("V1 and V2 intersect trivially")
    for h, Vi in ((h1, V1), (h2, V2)):
        rep = verify_ground_space(h, Vi, tol)
        if not rep.passed or abs(rep.ground_energy) > 1e-9 * max(1.0, rep.gap):
            raise ConstructionError("inputs must have their spaces as ground spaces at energy 0")
    h = h1 + h2
    return ConstructionResult(h, "intersection", _require(verify_ground_space(h, V, tol), "sum"))


# ---------------------------------------------------------------------------
# thermal route

def thermal_parent(V: Subspace, pattern: Pattern, cfg: PathConfig | None = None,
                   snap: bool = True, tol: float = VERIFY_TOL) -> ConstructionResult:
    path = thermal_path(V, pattern, cfg)
    if path.verdict == "larger":
        raise NotKCorrelated(path.message)
    if not path.converged:
        raise ConstructionError(f"thermal path: {path.message}")
    h = path.hamiltonian
    notes = [f"path fidelity {path.overlap:.12f} at p = {path.points[-1].p:g}"]
    if snap:
        h = snap_to_kernel(h, V)
        notes.append("snapped onto the annihilators of V")
    rep = verify_ground_space(h, V, tol)
    if snap and not rep.passed:
        raise ConstructionError(f"snapped thermal Hamiltonian failed: {rep.summary()}")
    return ConstructionResult(h, "thermal", rep, notes=notes)


# ---------------------------------------------------------------------------
# three qubits

@dataclass
class AcinForm:
    """l0|000> + l1|100> + l2|101> + l3|110> + l4|111>, l1 complex, rest real >= 0."""

    lambda0: float
    lambda1: complex
    lambda2: float
    lambda3: float
    lambda4: float

    def __post_init__(self):
        self.lambda1 = complex(self.lambda1)
        for name in ("lambda0", "lambda2", "lambda3", "lambda4"):
            v = complex(getattr(self, name))
            if abs(v.imag) > 1e-12 or v.real < -1e-12:
                raise ValueError(f"{name} must be real and nonnegative, got {v}")
            setattr(self, name, max(v.real, 0.0))
        norm = np.sqrt(self.lambda0 ** 2 + abs(self.lambda1) ** 2 + self.lambda2 ** 2
                       + self.lambda3 ** 2 + self.lambda4 ** 2)
        if abs(norm - 1) > 1e-9:
            raise ValueError(f"amplitudes not normalized (norm {norm})")

    @classmethod
    def normalized(cls, *lam) -> "AcinForm":
        lam = np.asarray(lam, dtype=complex)
        return cls(*(lam / np.linalg.norm(lam)))

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([self.lambda0, self.lambda1, self.lambda2, self.lambda3, self.lambda4])

    def state(self) -> np.ndarray:
        psi = np.zeros(8, dtype=complex)
        psi[[0, 4, 5, 6, 7]] = self.lambdas
        return psi

    @property
    def tilde_psi(self) -> np.ndarray:
        """Two-qubit state on {2,3} following |1> on qubit 1."""
        return self.lambdas[1:].copy()

    def product_partner(self) -> np.ndarray:
        """|1> (l2|0> + l4|1>) (l3|0> + l4|1>), the product state beside psi."""
        _, _, l2, l3, l4 = self.lambdas
        return kron(np.array([0, 1]), np.array([l2, l4]), np.array([l3, l4]))

    @property
    def eta(self) -> complex:
        _, l1, l2, l3, l4 = self.lambdas
        return l1 * l2 * l3 + l2 ** 2 * l4 + l3 ** 2 * l4 + l4 ** 3

    def xi(self) -> np.ndarray:
        return self.product_partner() - np.conj(self.eta) * self.state()

    @property
    def generic_gap(self) -> float:
        _, l1, l2, l3, l4 = self.lambdas
        return abs(l1 * l4 - l2 * l3)

    def degenerate_data(self):
        """(lambda_xy, x, y) with psi = l0|000> + lambda_xy |1 x y>."""
        m = self.tilde_psi.reshape(2, 2)
        u, s, vh = np.linalg.svd(m)
        x, y = u[:, 0], vh[0]
        # real, with the larger component positive
        px = np.exp(-1j * np.angle(x[np.argmax(np.abs(x))]))
        py = np.exp(-1j * np.angle(y[np.argmax(np.abs(y))]))
        return s[0] / (px * py), x * px, y * py


def acin_decompose(psi: np.ndarray) -> tuple[AcinForm, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Local unitaries (U1, U2, U3) with (U1 x U2 x U3) psi in Acin form."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.size != 8:
        raise ValueError("need a three-qubit state")
    psi = psi / np.linalg.norm(psi)
    T = psi.reshape(2, 2, 2)
    T0, T1 = T[0], T[1]
    # choose the first qubit-1 basis vector so that the slice is rank one
    a = np.linalg.det(T1)
    b = T0[0, 0] * T1[1, 1] + T1[0, 0] * T0[1, 1] - T0[0, 1] * T1[1, 0] - T1[0, 1] * T0[1, 0]
    c0 = np.linalg.det(T0)
    scale = max(np.max(np.abs(T)) ** 2, 1e-300)
    if abs(c0) <= 1e-14 * scale:
        coef = np.array([1.0, 0.0], dtype=complex)
    elif abs(a) <= 1e-14 * scale and abs(b) <= 1e-14 * scale:
        coef = np.array([0.0, 1.0], dtype=complex)
    else:
        z = np.roots([a, b, c0])[0]
        coef = np.array([1.0, z], dtype=complex)
    coef /= np.linalg.norm(coef)
    U1 = np.array([coef, [-np.conj(coef[1]), np.conj(coef[0])]])
    S0 = coef[0] * T0 + coef[1] * T1
    u, s, vh = np.linalg.svd(S0)
    U2 = u.conj().T
    U3 = vh.conj()
    out = np.einsum("ai,bj,ck,ijk->abc", U1, U2, U3, T)
    # phases on |1> of each qubit: make l2, l3, l4 real nonnegative
    l2, l3, l4 = out[1, 0, 1], out[1, 1, 0], out[1, 1, 1]
    ang = lambda z: np.angle(z) if abs(z) > 1e-14 else 0.0  # noqa: E731
    a2, a3, a4 = ang(l2), ang(l3), ang(l4)
    if abs(l4) > 1e-14:
        p1 = a4 - a2 - a3  # phases chosen so all three vanish
    else:
        p1 = 0.0
    p3 = -a2 - p1
    p2 = -a3 - p1
    if abs(l4) <= 1e-14 and abs(l2) <= 1e-14:
        p3 = 0.0
    D1, D2, D3 = (np.diag([1, np.exp(1j * p)]) for p in (p1, p2, p3))
    # with the phases fixed, l0 carries the residual global phase
    U1, U2, U3 = D1 @ U1, D2 @ U2, D3 @ U3
    out = np.einsum("ai,bj,ck,ijk->abc", U1, U2, U3, T)
    g = np.exp(-1j * np.angle(out[0, 0, 0])) if abs(out[0, 0, 0]) > 1e-14 else 1.0
    U1 = g * U1
    out = g * out
    lam = [out[0, 0, 0], out[1, 0, 0], out[1, 0, 1], out[1, 1, 0], out[1, 1, 1]]
    clean = [lam[0].real, lam[1]] + [abs(x) for x in lam[2:]]
    return AcinForm(*clean), (U1, U2, U3)


def haar_state(D: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=D) + 1j * rng.normal(size=D)
    return v / np.linalg.norm(v)


def random_acin(rng: np.random.Generator) -> AcinForm:
    """Acin form of a Haar-random three-qubit state."""
    return acin_decompose(haar_state(8, rng))[0]


THREE_QUBIT_PATTERN = "1,2;2,3"


def three_qubit_parent(a: AcinForm, margin: float = MARGIN, tol: float = VERIFY_TOL,
                       fallback: bool = True, cfg: PathConfig | None = None) -> ConstructionResult:
    """{{1,2},{2,3}}-local Hamiltonian with the Acin-form state as unique ground state."""
    shape = SystemShape.qubits(3)
    K = Pattern.parse(THREE_QUBIT_PATTERN, shape)
    psi = a.state()
    V = Subspace(shape, psi)
    h0, W = ff_hamiltonian(V, K)
    if W.dim == 1:
        rep = _require(verify_ground_space(h0, V, tol), "frustration-free Hamiltonian")
        return ConstructionResult(h0, "ff", rep)
    notes = []
    candidates = []
    if a.generic_gap > 1e-8:
        # kernel of H'_23 spanned by |00> and the {2,3} part of psi
        ker = Subspace.span(np.stack([np.array([1, 0, 0, 0]), a.tilde_psi], axis=1),
                            shape.sub((1, 2)))
        candidates.append(("three-qubit/generic",
                           lambda: LocalHamiltonian(K, [((1, 2), np.eye(4) - ker.projector)])))
    else:
        _, x, y = a.degenerate_data()
        if abs(x[0]) <= 1e-8 and abs(y[0]) <= 1e-8:
            raise NotKCorrelated("state is local-unitarily equivalent to a GHZ-type state; "
                                 "its {1,2},{2,3} marginals do not determine it")
    candidates.append(("three-qubit/splitting", lambda: find_splitting_term(V, W, K)))
    for route, make in candidates:
        try:
            res = perturb_combine(h0, make(), V, margin, tol)
        except ConstructionError as exc:
            notes.append(f"{route}: {exc}")
            continue
        res.route = route
        res.notes = notes
        return res
    if not fallback:
        raise ConstructionError("; ".join(notes))
    log.info("three-qubit analytic route failed, trying the thermal path")
    res = thermal_parent(V, K, cfg, snap=True, tol=tol)
    res.notes = notes + res.notes
    return res


def conjugate_local(h: LocalHamiltonian, unitaries) -> LocalHamiltonian:
    """Terms conjugated as U^dag h U with U the product of per-site unitaries."""
    terms = []
    for s, op in h.terms:
        U = kron(*[unitaries[i] for i in s])
        terms.append((s, U.conj().T @ op @ U))
    return LocalHamiltonian(h.pattern, terms, h.offset)


def three_qubit_parent_of_state(psi: np.ndarray, **kw) -> ConstructionResult:
    """Three-qubit route for an arbitrary state: Acin form, build, rotate back."""
    a, Us = acin_decompose(psi)
    res = three_qubit_parent(a, **kw)
    h = conjugate_local(res.hamiltonian, Us)
    psi = np.asarray(psi, dtype=complex).ravel()
    V = Subspace(SystemShape.qubits(3), psi / np.linalg.norm(psi))
    rep = _require(verify_ground_space(h, V, kw.get("tol", VERIFY_TOL)), "rotated Hamiltonian")
    return ConstructionResult(h, res.route, rep, res.bound, res.notes)


# ---------------------------------------------------------------------------
# W-type chains

@dataclass
class WTypeSpec:
    amplitudes: tuple[complex, ...]

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).ravel()
        if a.size < 3:
            raise ValueError("W-type states need n >= 3")
        if np.any(np.abs(a) < 1e-12):
            raise ValueError("W-type amplitudes must all be nonzero")
        if abs(np.linalg.norm(a) - 1) > 1e-9:
            raise ValueError("W-type amplitudes must be normalized")
        self.amplitudes = tuple(complex(x) for x in a)

    @classmethod
    def equal(cls, n: int) -> "WTypeSpec":
        return cls(tuple([1 / np.sqrt(n)] * n))

    @classmethod
    def normalized(cls, amps) -> "WTypeSpec":
        a = np.asarray(amps, dtype=complex)
        return cls(tuple(a / np.linalg.norm(a)))

    @property
    def n(self) -> int:
        return len(self.amplitudes)

    def state(self) -> np.ndarray:
        n = self.n
        psi = np.zeros(2 ** n, dtype=complex)
        for i, a in enumerate(self.amplitudes):
            psi[1 << (n - 1 - i)] = a  # particle 0 is the leading bit
        return psi


def excitation_splitting(pattern: Pattern) -> LocalHamiltonian:
    """I - N with N the number of 1s: zero on one excitation, +1 on none."""
    n = pattern.shape.n
    entries = [("I" * i + "Z" + "I" * (n - 1 - i), 0.5) for i in range(n)]
    return from_pauli(pattern.shape, pattern, entries, offset=1.0 - n / 2)


def w_chain_parent(spec: WTypeSpec, margin: float = MARGIN, tol: float = VERIFY_TOL) -> ConstructionResult:
    """Open-chain parent of a W-type state: t * (FF pair projectors) + (I - N)."""
    n = spec.n
    shape = SystemShape.qubits(n)
    K = Pattern.chain(n)
    V = Subspace(shape, spec.state())
    h0, W = ff_hamiltonian(V, K)
    res = perturb_combine(h0, excitation_splitting(K), V, margin, tol)
    res.route = "w-chain"
    res.notes.append(f"frustration-free ground space has dimension {W.dim}")
    return res


@dataclass
class XXZParams:
    p_alpha: float = 1.0
    p_beta: float = 1.0
    epsilon: float = 0.5
    periodic: bool = True

    def __post_init__(self):
        if self.p_alpha <= 0 or self.p_beta <= 0:
            raise ValueError("p_alpha and p_beta must be positive")
        if self.epsilon < 0:  # zero is allowed to exhibit the degeneracy it breaks
            raise ValueError("epsilon must be nonnegative")


def xxz_w_hamiltonian(n: int, params: XXZParams) -> LocalHamiltonian:
    """-sum (pa XX + pa YY + (pa - pb) ZZ) - (2 pb - eps) sum Z."""
    if n < 3:
        raise ValueError("need n >= 3")
    shape = SystemShape.qubits(n)
    K = Pattern.chain(n, params.periodic)
    pa, pb = params.p_alpha, params.p_beta
    entries = []
    for s in K.subsets:
        for P, c in (("X", -pa), ("Y", -pa), ("Z", pb - pa)):
            label = ["I"] * n
            for i in s:
                label[i] = P
            entries.append(("".join(label), c))
    for i in range(n):
        entries.append(("I" * i + "Z" + "I" * (n - 1 - i), -(2 * pb - params.epsilon)))
    return from_pauli(shape, K, [(l, c) for l, c in entries if c != 0])


def xxz_w_parent(n: int, p_alpha: float = 1.0, p_beta: float = 1.0, periodic: bool = True,
                 eps_start: float = 0.5, eps_min: float = 1e-6,
                 tol: float = VERIFY_TOL) -> ConstructionResult:
    """Scan eps = eps_start, eps_start/2, ... until W(n) is the unique ground state."""
    V = Subspace(SystemShape.qubits(n), WTypeSpec.equal(n).state())
    eps = eps_start
    tried = []
    while eps >= eps_min:
        params = XXZParams(p_alpha, p_beta, eps, periodic)
        h = xxz_w_hamiltonian(n, params)
        rep = verify_ground_space(h, V, tol)
        if rep.passed:
            return ConstructionResult(h, "xxz", rep, notes=[f"epsilon = {eps:g}"] + tried)
        tried.append(f"epsilon = {eps:g} failed ({rep.summary()})")
        eps /= 2
    raise ConstructionError("no epsilon in the scan gives W(n) as unique ground state")


# ---------------------------------------------------------------------------
# method of subsystems

def subsystem_space(V: Subspace, K: tuple[int, ...], rel_cutoff: float = RANK_CUTOFF) -> Subspace:
    """Range of the K-marginal of rho_V, on the subsystem."""
    return range_of(partial_trace(V.mixed_state(), K, V.shape), V.shape.sub(K), rel_cutoff)


def local_pattern(sub: Pattern, K: tuple[int, ...], shape: SystemShape) -> Pattern:
    """Re-index a pattern living inside K onto the K-subsystem."""
    pos = {p: i for i, p in enumerate(K)}
    try:
        subsets = tuple(tuple(pos[p] for p in s) for s in sub.subsets)
    except KeyError as exc:
        raise ConstructionError(f"subpattern {sub} leaves the subset {K}") from exc
    return Pattern(shape.sub(K), subsets)


def subsystem_compose(V: Subspace, K: Pattern, subpatterns: list[Pattern],
                      cfg: PathConfig | None = None, tol: float = VERIFY_TOL,
                      leak_tol: float = 1e-7) -> ConstructionResult:
    """Parent on the union of the subpatterns from parents of each marginal range."""
    if len(subpatterns) != len(K.subsets):
        raise ValueError("need one subpattern per subset of K")
    _, W = ff_hamiltonian(V, K)
    if not subspace_equal(W, V, 1e-8) or W.dim != V.dim:
        raise ConstructionError(f"V is not the ground space of a {K}-frustration-free Hamiltonian "
                                f"(intersection has dimension {W.dim})")
    total = None
    notes = []
    for Ki, sub in zip(K.subsets, subpatterns):
        loc = local_pattern(sub, Ki, V.shape)
        Vi = subsystem_space(V, Ki)
        label = "{" + ",".join(str(i + 1) for i in Ki) + "}"
        cert = leakage(Vi, loc, leak_tol, corroborate=False)
        if cert.status != "correlated":
            raise NotKCorrelated(f"range on {label} is not {sub}-correlated: {cert.summary()}", cert)
        part = thermal_parent(Vi, loc, cfg, snap=True, tol=tol)
        lifted = part.hamiltonian.relabeled(list(Ki), V.shape)
        notes.append(f"{label}: leakage <= {max(cert.leakage, 0):.2e}, gap {part.report.gap:.4g}")
        total = lifted if total is None else total + lifted
    union = subpatterns[0]
    for p in subpatterns[1:]:
        union = union.union(p)
    h = LocalHamiltonian(union, total.terms, total.offset).merged()
    rep = _require(verify_ground_space(h, V, tol), "composed Hamiltonian")
    return ConstructionResult(h, "compose", rep, notes=notes)
