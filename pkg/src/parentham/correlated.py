"""Certify that a subspace is K-correlated.

``V`` is K-correlated exactly when every state sharing the K-marginals of
the maximally mixed state on ``V`` is itself supported on ``V``.  The
leakage

    max Tr(sigma (I - P_V))  s.t.  sigma >= 0,  R_K(sigma) = R_K(rho_V)

is zero in that case.  When ``V`` is correlated the feasible set has no
interior, so a primal barrier cannot start; we path-follow the dual

    min <R_K(rho_V), H>  s.t.  H K-local,  H - (I - P_V) >= 0

instead, inside the box ``H <= R I``.  Parent Hamiltonians of V are
recession directions of the unboxed dual, so without the box the central
path does not exist.  The dual is strictly feasible (``H = 2 I``), every
iterate is a certified upper bound, and the central point
``(H - Q)^{-1} / t`` is a primal witness whose marginals match up to the
box multiplier, which is O(1/t).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .maxent import PathConfig, thermal_path
from .operators import Subspace
from .patterns import (
    LocalHamiltonian,
    Pattern,
    basis_stack,
    expectations,
    from_coefficients,
    rdm_vector,
)

log = logging.getLogger(__name__)

LEAKAGE_TOL = 1e-7


@dataclass
class CorrelatednessCertificate:
    status: str  # "correlated", "not_correlated" or "indeterminate"
    leakage: float  # certified upper bound from a feasible dual point
    lower_bound: float  # Tr(witness (I - P_V))
    tol: float
    witness: np.ndarray | None = field(default=None, repr=False)
    marginal_mismatch: float = float("nan")
    dual: LocalHamiltonian | None = field(default=None, repr=False)
    iterations: int = 0
    message: str = ""
    path_overlap: float | None = None

    @property
    def correlated(self) -> bool | None:
        return {"correlated": True, "not_correlated": False}.get(self.status)

    def summary(self) -> str:
        if self.status == "correlated":
            return f"correlated, leakage <= {max(self.leakage, 0.0):.3e} (tol {self.tol:.1e})"
        if self.status == "not_correlated":
            return (f"not correlated, leakage = {self.lower_bound:.6f} "
                    f"(upper bound {self.leakage:.6f}), witness marginal mismatch "
                    f"{self.marginal_mismatch:.1e}")
        return f"indeterminate: {self.message}"


class _DualBarrier:
    """Barrier for  Q <= H(y) <= R I.

    The upper box keeps the central path bounded: without it, any parent
    Hamiltonian of V is a recession direction of the dual.
    """

    def __init__(self, V: Subspace, pattern: Pattern, box: float):
        self.B = basis_stack(pattern)
        self.c = expectations(rdm_vector(V.mixed_state(), pattern))
        self.Q = np.eye(V.shape.D) - V.projector
        self.D = V.shape.D
        self.R = box

    def slacks(self, y):
        H = np.tensordot(y, self.B, axes=1)
        H = 0.5 * (H + H.conj().T)
        return H - self.Q, self.R * np.eye(self.D) - H

    def phi(self, y, t):
        total = t * (self.c @ y)
        for S in self.slacks(y):
            s = np.linalg.eigvalsh(S)
            if s[0] <= 0:
                return np.inf
            total -= np.sum(np.log(s))
        return total

    def newton(self, y, t):
        g = t * self.c
        hess = np.zeros((len(self.B), len(self.B)))
        for sign, S in zip((1.0, -1.0), self.slacks(y)):
            s, U = np.linalg.eigh(S)
            Bt = np.einsum("ki,mkl,lj->mij", U.conj(), self.B, U, optimize=True)
            r = 1.0 / np.sqrt(s)
            g = g - sign * (np.real(np.einsum("mii->mi", Bt)) @ (r * r))
            flat = (Bt * r[None, :, None] * r[None, None, :]).reshape(len(self.B), -1)
            hess += np.real(flat @ flat.conj().T)
        w, v = np.linalg.eigh(0.5 * (hess + hess.T))
        w = np.maximum(w, w[-1] * 1e-16)
        step = -(v @ ((v.T @ g) / w))
        return step, -g @ step, g

    def center(self, y, t, eps=1e-11, max_iter=200):
        f = self.phi(y, t)
        it = 0
        for it in range(1, max_iter + 1):
            step, dec2, _ = self.newton(y, t)
            if dec2 / 2 <= eps:
                break
            s = 1.0
            while s > 1e-14:
                f_new = self.phi(y + s * step, t)
                if f_new <= f - 0.25 * s * dec2:
                    break
                s *= 0.5
            else:
                break
            y = y + s * step
            f = f_new
        return y, it


def _witness(prob: _DualBarrier, y: np.ndarray, t: float) -> np.ndarray:
    """Primal point of the central path, trace-normalized.

    The exact primal pair is ``X - Y`` with ``X = (H - Q)^{-1} / t`` and the
    box multiplier ``Y = (R I - H)^{-1} / t``; it is used whenever it is
    positive semidefinite, otherwise ``X`` alone.
    """
    S1, S2 = prob.slacks(y)
    s1, U1 = np.linalg.eigh(S1)
    s2, U2 = np.linalg.eigh(S2)
    X = (U1 / s1) @ U1.conj().T / t
    w = X - (U2 / s2) @ U2.conj().T / t
    w = 0.5 * (w + w.conj().T)
    if np.linalg.eigvalsh(w)[0] < 0:
        w = 0.5 * (X + X.conj().T)
    return w / np.trace(w).real


def leakage(V: Subspace, pattern: Pattern, tol: float = LEAKAGE_TOL,
            corroborate: bool = True, path_cfg: PathConfig | None = None,
            box: float = 100.0, max_outer: int = 60) -> CorrelatednessCertificate:
    """Maximum weight outside ``V`` among states with the K-marginals of rho_V.

    ``box`` bounds the operator norm of dual Hamiltonians.  Any dual point
    is a valid upper bound; a box too small for the optimal dual only
    loosens the bound, so at worst the certificate ends indeterminate.
    """
    if V.shape != pattern.shape:
        raise ValueError("subspace and pattern live on different systems")
    prob = _DualBarrier(V, pattern, box)
    M = len(prob.B)
    y = np.zeros(M)
    y[0] = 2.0  # H = 2 I, slack >= I
    gap_tol = tol / 10
    target = rdm_vector(V.mixed_state(), pattern)
    t = 1.0
    mu = 10.0
    iters = 0
    best = None  # (mismatch, lower, witness): the box multiplier perturbs the
    # witness marginals by O(1/t) while conditioning degrades at large t, so the
    # sharpest witness is not necessarily the last one
    for _ in range(max_outer):
        y, k = prob.center(y, t)
        iters += k
        witness = _witness(prob, y, t)
        mismatch = rdm_vector(witness, pattern).max_difference(target)
        if best is None or mismatch < best[0]:
            best = (mismatch, float(np.real(np.vdot(prob.Q, witness))), witness)
        if prob.D / t <= gap_tol:
            break
        t *= mu
    upper = float(prob.c @ y)
    mismatch, lower, witness = best
    dual = from_coefficients(y, pattern)
    cert = CorrelatednessCertificate("indeterminate", upper, lower, tol, witness, mismatch,
                                     dual, iters)
    if upper <= tol:
        cert.status = "correlated"
        cert.message = "dual certificate closes the leakage below tolerance"
        if corroborate:
            path = thermal_path(V, pattern, path_cfg)
            cert.path_overlap = path.overlap
            if not path.converged:
                cert.status = "indeterminate"
                cert.message = ("zero leakage but the maxent path did not converge to V "
                                f"(overlap {path.overlap:.3e}, {path.verdict})")
    elif lower > tol and mismatch <= tol:
        cert.status = "not_correlated"
        cert.message = "witness state with matching marginals leaks out of V"
    else:
        cert.message = (f"gap not closed: leakage in [{lower:.3e}, {upper:.3e}], "
                        f"witness mismatch {mismatch:.1e}")
    return cert


def verify_witness(cert: CorrelatednessCertificate, V: Subspace, pattern: Pattern) -> tuple[float, float]:
    """Independent check of a witness: (marginal mismatch, weight outside V)."""
    w = cert.witness
    if w is None:
        raise ValueError("certificate carries no witness")
    evals = np.linalg.eigvalsh(w)
    if evals[0] < -1e-9 or abs(np.trace(w).real - 1) > 1e-9:
        raise ValueError("witness is not a density matrix")
    mismatch = rdm_vector(w, pattern).max_difference(rdm_vector(V.mixed_state(), pattern))
    out = float(np.real(np.trace(w @ (np.eye(V.shape.D) - V.projector))))
    return mismatch, out


def is_udr_pure(psi: np.ndarray, pattern: Pattern, tol: float = LEAKAGE_TOL,
                **kw) -> CorrelatednessCertificate:
    """Is the pure state uniquely determined by its K-marginals?"""
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return leakage(Subspace(pattern.shape, psi), pattern, tol, **kw)
