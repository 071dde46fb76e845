"""Maximum-entropy reconstruction from marginals and the thermal path.

The entropy maximizer over states with prescribed K-marginals is a Gibbs
state ``exp(A) / Z`` with ``A`` K-local.  We find ``A`` by minimizing the
convex dual ``log Tr exp(A) - <targets, A>`` with damped Newton steps; the
Hessian is the Kubo-Mori covariance, evaluated exactly in the eigenbasis
of ``A``.
"""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from .operators import (
    Subspace,
    check_density,
    eigh,
    log_on_support,
    subspace_contains,
    subspace_overlap,
    von_neumann_entropy,
)
from .patterns import (
    LocalHamiltonian,
    MarginalVector,
    Pattern,
    basis_stack,
    coefficients,
    expectations,
    from_coefficients,
    project_local,
    rdm_vector,
)

log = logging.getLogger(__name__)


class MaxEntError(RuntimeError):
    """The dual minimization did not reach the requested residual."""

    def __init__(self, msg, best: "MaxEntSolution | None" = None):
        super().__init__(msg)
        self.best = best


@dataclass
class MaxEntSolution:
    state: np.ndarray
    dual: LocalHamiltonian  # state == exp(dual.assemble())
    residual: float
    iterations: int
    theta: np.ndarray = field(repr=False)

    @property
    def entropy(self) -> float:
        return von_neumann_entropy(self.state)


@dataclass
class PathConfig:
    p_values: tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4)
    tol: float = 1e-10
    max_iterations: int = 500
    overlap_tol: float = 1e-6
    ground_rel_tol: float = 1e-7
    split_tol: float = 1e-3  # max (E_{r-1} - E_0) / (E_r - E_0) for the low cluster
    extend_to: float | None = 1e-6  # keep dividing p by 10 down to here if unconverged

    def __post_init__(self):
        ps = tuple(float(p) for p in self.p_values)
        if not ps or any(not 0 < p <= 1 for p in ps):
            raise ValueError("p values must lie in (0, 1]")
        if any(b >= a for a, b in zip(ps, ps[1:])):
            raise ValueError("p values must be strictly descending")
        self.p_values = ps

    @classmethod
    def geometric(cls, p_max=1e-1, p_min=1e-4, ratio=10.0, **kw) -> "PathConfig":
        ps = []
        p = p_max
        while p >= p_min * (1 - 1e-9):
            ps.append(p)
            p /= ratio
        return cls(tuple(ps), **kw)


# ---------------------------------------------------------------------------
# Gibbs family evaluation

def _gibbs(theta: np.ndarray, B: np.ndarray):
    A = np.tensordot(theta, B, axes=1)
    a, U = np.linalg.eigh(0.5 * (A + A.conj().T))
    amax = a[-1]
    w = np.exp(a - amax)
    Z = w.sum()
    p = w / Z
    log_z = amax + np.log(Z)
    return a, U, p, log_z


def _kubo_mori_kernel(a: np.ndarray, p: np.ndarray) -> np.ndarray:
    da = a[:, None] - a[None, :]
    small = np.abs(da) < 1e-9
    safe = np.where(small, 1.0, da)
    # (p_k - p_l) / (a_k - a_l) == p_l * expm1(a_k - a_l) / (a_k - a_l)
    ker = np.where(small, 0.5 * (p[:, None] + p[None, :]),
                   p[None, :] * np.expm1(np.clip(da, None, 700)) / safe)
    # symmetrize against overflow on the upper side
    ker = np.where(da > 0, ker.T, ker)
    return ker


def _newton_direction(hess: np.ndarray, g: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(hess)
    floor = max(w[-1], 1e-300) * 1e-15
    w = np.maximum(w, floor)
    return -(v @ ((v.T @ g) / w))


def maxent_solve(targets: MarginalVector, tol: float = 1e-10,
                 warm_start: LocalHamiltonian | None = None,
                 max_iterations: int = 500) -> MaxEntSolution:
    """Entropy maximizer among states whose K-marginals equal ``targets``.

    ``tol`` bounds the trace-norm mismatch of every marginal.  Raises
    :class:`MaxEntError` (carrying the best iterate) on non-convergence.
    """
    pattern = targets.pattern
    B = basis_stack(pattern)[1:]
    m_target = expectations(targets)[1:]
    theta = np.zeros(len(B))
    if warm_start is not None:
        theta = coefficients(warm_start, pattern)[1:].copy()

    def objective(th):
        a, U, p, log_z = _gibbs(th, B)
        return log_z - th @ m_target, (a, U, p, log_z)

    def solution(th, cache, it):
        a, U, p, log_z = cache
        state = (U * p) @ U.conj().T
        y = np.concatenate([[-log_z], th])
        dual = from_coefficients(y, pattern)
        res = rdm_vector(state, pattern).trace_norm_residual(targets)
        return MaxEntSolution(state, dual, res, it, th.copy())

    F, cache = objective(theta)
    best = None
    stall = 0
    for it in range(1, max_iterations + 1):
        a, U, p, _ = cache
        Bt = np.einsum("ki,mkl,lj->mij", U.conj(), B, U, optimize=True)
        diag = np.real(np.einsum("mii->mi", Bt))
        mean = diag @ p
        g = mean - m_target
        sol = None
        if np.max(np.abs(g)) < 10 * tol:
            sol = solution(theta, cache, it - 1)
            if best is None or sol.residual < best.residual:
                best = sol
            if sol.residual <= tol:
                return sol
        ker = _kubo_mori_kernel(a, p)
        flat = Bt.reshape(len(B), -1)
        hess = np.real((flat * ker.ravel()) @ flat.conj().T) - np.outer(mean, mean)
        hess = 0.5 * (hess + hess.T)
        step = _newton_direction(hess, g)
        slope = g @ step
        s = 1.0
        accepted = False
        while s > 1e-12:
            F_new, cache_new = objective(theta + s * step)
            if F_new <= F + 1e-4 * s * slope or (F_new - F) <= 1e-14 * max(1.0, abs(F)) and s == 1.0:
                accepted = True
                break
            s *= 0.5
        if not accepted:
            stall += 1
            if stall > 3:
                break
            # fall back to a plain gradient step
            step = -g
            s = 1.0
            while s > 1e-16:
                F_new, cache_new = objective(theta + s * step)
                if F_new < F:
                    accepted = True
                    break
                s *= 0.5
            if not accepted:
                break
        theta = theta + s * step
        F, cache = F_new, cache_new
    sol = solution(theta, cache, max_iterations)
    if best is None or sol.residual < best.residual:
        best = sol
    if best.residual <= tol:
        return best
    raise MaxEntError(f"maxent did not converge: best residual {best.residual:.3e} > {tol:.1e}", best)


# ---------------------------------------------------------------------------
# thermal path

def rho_p(V: Subspace, p: float) -> np.ndarray:
    """p * I/D + (1 - p) * rho_V."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")
    D = V.shape.D
    return p * np.eye(D) / D + (1 - p) * V.mixed_state()


def ground_space(h: np.ndarray, shape, rel_tol: float = 1e-7) -> tuple[Subspace, np.ndarray]:
    """Lowest eigenspace of ``h``; eigenvalues within rel_tol * spread are degenerate."""
    w, v = eigh(h, tol=1e-9)
    spread = max(w[-1] - w[0], 1e-300)
    r = int(np.sum(w <= w[0] + rel_tol * max(spread, 1.0)))
    return Subspace(shape, v[:, :r]), w


def parent_from_state(state: np.ndarray | MaxEntSolution,
                      pattern: Pattern) -> tuple[LocalHamiltonian, float]:
    """K-local part of -log(state), traceless terms, offset so the ground energy is 0.

    Given a :class:`MaxEntSolution` the logarithm is read off the Gibbs
    exponent; Gibbs weights can underflow the support cutoff of
    ``log_on_support`` long before the exponent loses precision.
    """
    if isinstance(state, MaxEntSolution):
        minus_log = -state.dual.assemble()
    else:
        minus_log = -log_on_support(state)
    h, resid = project_local(minus_log, pattern)
    w = np.linalg.eigvalsh(h.assemble())
    return h.shifted(-w[0]), resid


@dataclass
class PathPoint:
    p: float
    residual: float
    entropy: float
    iterations: int
    overlap: float  # lowest dim(V) eigenvectors against V
    ground_dim: int  # degenerate ground eigenspace at the relative tolerance
    splitting: float = 0.0  # spread of the lowest dim(V) levels over the gap above them


@dataclass
class ThermalPathResult:
    hamiltonian: LocalHamiltonian | None
    ground_space: Subspace | None
    points: list[PathPoint]
    converged: bool
    verdict: str  # "parent", "larger", "inconclusive" or "aborted"
    message: str = ""
    solution: MaxEntSolution | None = None
    projection_residual: float = float("nan")

    @property
    def overlap(self) -> float:
        return self.points[-1].overlap if self.points else float("nan")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["p", "residual", "entropy", "ground_overlap", "ground_dim", "splitting",
                    "iterations"])
        for pt in self.points:
            w.writerow([f"{pt.p:.6g}", f"{pt.residual:.6e}", f"{pt.entropy:.12g}",
                        f"{pt.overlap:.15f}", pt.ground_dim, f"{pt.splitting:.3e}", pt.iterations])
        return buf.getvalue()


def low_cluster(h: np.ndarray, V: Subspace) -> tuple[float, float]:
    """(overlap of the lowest dim(V) eigenvectors with V, their spread over the gap).

    At finite p the thermal Hamiltonian splits a multi-dimensional V by
    O(p) while the gap above it grows like log(1/p); the ratio measures how
    close the low cluster is to an exact degeneracy.
    """
    w, v = np.linalg.eigh(h)
    r = V.dim
    low = Subspace(V.shape, v[:, :r])
    if r == len(w):
        return subspace_overlap(low, V), 0.0
    gap = max(w[r] - w[0], 1e-300)
    return subspace_overlap(low, V), float((w[r - 1] - w[0]) / gap)


def thermal_path(V: Subspace, pattern: Pattern, cfg: PathConfig | None = None) -> ThermalPathResult:
    """Follow rho(p) -> rho_V and read a K-local parent off the Gibbs exponent.

    Converged when, at the last two p values, the lowest dim(V) levels span
    V to within ``overlap_tol`` and their spread is below ``split_tol``
    times the gap above them.
    """
    cfg = cfg or PathConfig()
    if V.shape != pattern.shape:
        raise ValueError("subspace and pattern live on different systems")
    points: list[PathPoint] = []
    warm = None
    h = gs = sol = None
    resid = float("nan")

    def stable() -> bool:
        last = points[-2:]
        return len(last) == 2 and all(pt.overlap >= 1 - cfg.overlap_tol
                                      and pt.splitting <= cfg.split_tol for pt in last)

    schedule = list(cfg.p_values)
    k = 0
    while k < len(schedule):
        p = schedule[k]
        extending = k >= len(cfg.p_values)
        targets = rdm_vector(rho_p(V, p), pattern)
        try:
            sol_p = maxent_solve(targets, cfg.tol, warm, cfg.max_iterations)
        except MaxEntError as exc:
            if extending:  # keep the scheduled result; the extension is best effort
                log.info("path extension stopped at p=%g: %s", p, exc)
                break
            log.warning("thermal path aborted at p=%g: %s", p, exc)
            return ThermalPathResult(h, gs, points, False, "aborted",
                                     f"maxent failed at p={p:g}: {exc}", exc.best, resid)
        sol = sol_p
        warm = sol.dual
        h, resid = parent_from_state(sol, pattern)
        hm = h.assemble()
        gs, _ = ground_space(hm, V.shape, cfg.ground_rel_tol)
        ov, split = low_cluster(hm, V)
        points.append(PathPoint(p, sol.residual, sol.entropy, sol.iterations, ov, gs.dim, split))
        k += 1
        if k == len(schedule) and not stable() and cfg.extend_to and p / 10 >= cfg.extend_to * (1 - 1e-9):
            schedule.append(p / 10)
    converged = stable()
    if converged:
        verdict, msg = "parent", "ground space of the extracted Hamiltonian matches V"
    elif gs.dim > V.dim and subspace_contains(gs, V, 1e-4):
        verdict, msg = "larger", (f"ground space has dimension {gs.dim} > {V.dim} and contains V; "
                                  "V is not K-correlated")
    else:
        verdict, msg = "inconclusive", "no K-local parent found along path"
    return ThermalPathResult(h, gs, points, converged, verdict, msg, sol, resid)


def maxent_of_state(rho: np.ndarray, pattern: Pattern, **kw) -> MaxEntSolution:
    check_density(rho, 1e-8)
    return maxent_solve(rdm_vector(rho, pattern), **kw)
