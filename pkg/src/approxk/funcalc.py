"""Rounding almost-idempotents and almost-members to exact ones.

The central tool is holomorphic functional calculus with the indicator
function of the half-plane {Re z > 1/2}: applied to an almost-idempotent e
with defect ||e^2 - e|| = delta < 1/16 it yields a true idempotent at
distance at most 4 sqrt(delta) (||e|| + 2) / (1 - sqrt(delta)).
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.linalg

from .errors import (
    DefectTooLarge,
    InvalidInput,
    NotCloseEnough,
    RoundingUnstable,
    SpectralAmbiguity,
)
from .matcore import DEFAULT_TOL, Tol, as_matrix, eye, op_norm
from .subalg import Subspace

DELTA_MAX = 1.0 / 16.0


@dataclasses.dataclass(frozen=True)
class RoundingCert:
    """Certificate for a Riesz rounding: the measured data and the bound."""

    delta: float
    c: float
    distance: float
    bound: float
    method: str

    @property
    def passed(self) -> bool:
        # exact idempotents give bound 0 but fp distance ~1e-15, hence the floor
        return self.distance <= self.bound + 1e-12 * (1.0 + self.c)


def riesz_bound(delta: float, c: float) -> float:
    """4 sqrt(delta) (c + 2) / (1 - sqrt(delta)) for delta < 1/16."""
    if not 0 <= delta < DELTA_MAX:
        raise DefectTooLarge(f"delta = {delta:.3e} outside [0, 1/16)")
    rd = np.sqrt(delta)
    return float(4.0 * rd * (c + 2.0) / (1.0 - rd))


def _chi_by_eig(a: np.ndarray, tol: Tol) -> np.ndarray:
    from . import matcore

    lam, v = matcore.eig(a, tol)
    if np.any(np.abs(lam.real - 0.5) < 1e-8):
        raise SpectralAmbiguity("eigenvalue on the critical line Re z = 1/2")
    chi = (lam.real > 0.5).astype(complex)
    return v @ np.diag(chi) @ np.linalg.inv(v)


def _chi_by_schur(a: np.ndarray) -> np.ndarray:
    """Spectral projector onto {Re z > 1/2} via an ordered Schur form and a
    Sylvester solve; handles defective matrices."""
    t, q, sdim = scipy.linalg.schur(a, output="complex",
                                    sort=lambda z: z.real > 0.5)
    n = a.shape[0]
    diag = np.diag(t)
    if np.any(np.abs(diag.real - 0.5) < 1e-8):
        raise SpectralAmbiguity("Schur eigenvalue on the critical line Re z = 1/2")
    if sdim == 0:
        return np.zeros_like(a)
    if sdim == n:
        return np.eye(n, dtype=complex)
    t11 = t[:sdim, :sdim]
    t12 = t[:sdim, sdim:]
    t22 = t[sdim:, sdim:]
    y = scipy.linalg.solve_sylvester(t11, -t22, t12)
    p = np.zeros((n, n), dtype=complex)
    p[:sdim, :sdim] = np.eye(sdim)
    p[:sdim, sdim:] = y
    return q @ p @ q.conj().T


def riesz_idempotent(e, tol: Tol = DEFAULT_TOL):
    """Round an almost-idempotent to a true idempotent.

    Returns (f, cert) where f = chi(e) for the half-plane indicator chi and
    cert records the measured distance against the explicit bound.
    """
    e = as_matrix(e)
    if e.shape[0] != e.shape[1]:
        raise InvalidInput("riesz_idempotent requires a square matrix")
    delta = op_norm(e @ e - e)
    c = op_norm(e)
    if delta >= DELTA_MAX:
        raise DefectTooLarge(f"defect {delta:.3e} >= 1/16")
    from .errors import DefectiveMatrix

    try:
        f = _chi_by_eig(e, tol)
        method = "eig"
    except DefectiveMatrix:
        f = _chi_by_schur(e)
        method = "schur"
    idem_resid = op_norm(f @ f - f)
    if idem_resid > 1e-8 * max(1.0, op_norm(f)) ** 2:
        raise RoundingUnstable(f"rounded element has defect {idem_resid:.3e}")
    dist = op_norm(f - e)
    cert = RoundingCert(delta=delta, c=c, distance=dist,
                        bound=riesz_bound(delta, c), method=method)
    return f, cert


def idempotent_eps_max(c: float) -> float:
    """Largest admissible membership error for rounding an almost-idempotent
    of norm at most c into a subspace: eps must lie in (0, 1/(4c + 6))."""
    return 1.0 / (4.0 * c + 6.0)


def invertible_eps_max(c: float) -> float:
    """Largest admissible membership error for rounding an invertible with
    max(||u||, ||u^-1||) <= c into a subspace."""
    return 1.0 / (4.0 * c)


def round_idempotent_in(e, alg, eps: float | None = None,
                        tol: Tol = DEFAULT_TOL, seed: int = 0):
    """Round an almost-idempotent close to (matrices over the unitization of)
    an algebra into an exact idempotent there, and compute its class.

    Returns (f, cls, cert).  The nearest point of e in the span has defect at
    most delta + (2c + eps + 1) eps where delta is the defect of e and
    c = ||e||; that point is Riesz-rounded.  The rounding stays inside the
    algebra, since chi vanishes at 0 and chi(b) lies in the non-unital
    algebra generated by b.  The class does not depend on the admissible
    eps: two roundings differ by less than 1 / ||2f - 1|| and are similar.
    """
    from .subalg import amplify, unitize
    from .wedderburn import decompose, k0_class

    e = as_matrix(e)
    c = op_norm(e)
    if eps is None:
        eps = idempotent_eps_max(c) * (1.0 - 1e-9)
    if not 0 < eps < idempotent_eps_max(c):
        raise InvalidInput(
            f"eps = {eps:.3e} outside (0, 1/(4c+6)) = (0, {idempotent_eps_max(c):.3e})"
        )
    k = e.shape[0] // alg.ambient_dim
    span = amplify(unitize(alg), k) if k > 1 else unitize(alg)
    threshold = eps / 2.0
    b, resid = span.nearest(e)
    if resid > threshold:
        raise NotCloseEnough(resid, threshold)
    f, cert = riesz_idempotent(b, tol)
    cls = k0_class(f, decompose(alg, tol, seed=seed), tol)
    return f, cls, cert


def round_invertible_in(u, span: Subspace, eps: float | None = None,
                        tol: Tol = DEFAULT_TOL):
    """Round an invertible close to a subspace to an exact member of the span.

    The nearest point v is certified invertible through ||1 - u^-1 v|| < 1/4,
    which also gives ||v^-1|| <= 2 max(||u||, ||u^-1||).  Returns
    (v, v_inverse, residual).
    """
    u = as_matrix(u)
    uinv = np.linalg.inv(u)
    c = max(op_norm(u), op_norm(uinv))
    eps0 = invertible_eps_max(c)
    if eps is None:
        eps = eps0 * (1.0 - 1e-9)
    if not 0 < eps < eps0:
        raise InvalidInput(f"eps = {eps:.3e} outside (0, 1/(4c)) = (0, {eps0:.3e})")
    v, resid = span.nearest(u)
    if resid > eps:
        raise NotCloseEnough(resid, eps)
    gap = op_norm(eye(u.shape[0]) - uinv @ v)
    if gap >= 0.25:
        raise RoundingUnstable(f"||1 - u^-1 v|| = {gap:.3f} >= 1/4")
    vinv = np.linalg.inv(v)
    if op_norm(vinv) > 2.0 * c * (1.0 + 1e-9):
        raise RoundingUnstable("inverse norm bound 2c violated")
    return v, vinv, resid


def idempotent_similarity_step(f, f2):
    """One-step conjugator between idempotents with ||f - f2|| < 1/||2f - 1||.

    Returns invertible z with z f z^-1 = f2 exactly (up to numerics); this is
    the step that makes rounded classes independent of the chosen rounding.
    """
    f = as_matrix(f)
    f2 = as_matrix(f2)
    sym = 2.0 * f - eye(f.shape[0])
    gap = op_norm(f - f2)
    limit = 1.0 / op_norm(sym)
    if gap >= limit:
        raise NotCloseEnough(gap, limit)
    z = ((2.0 * f2 - eye(f.shape[0])) @ sym + eye(f.shape[0])) / 2.0
    return z
