"""Sampled model of C(S^1) (x) M_k and its arc ideals.

Elements are samples on a uniform angle grid with no interpolation; the
norm is the max of the per-sample operator norms, so every sup-norm
inequality from the abstract theory becomes finitely checkable.  Arc
ideals have exact (zero-residual) membership distances: the distance to
the ideal is the sup over masked-out samples.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import matcore
from .errors import (
    GridTooCoarse,
    InvalidInput,
    NotQuantized,
    NoWitness,
)
from .matcore import DEFAULT_TOL, Tol
from .wedderburn import K1Vec, path_to_similarity


def _circular_runs(flags: np.ndarray) -> list[tuple[int, int]]:
    """Maximal circular runs of True as (start, length) pairs."""
    m = len(flags)
    if flags.all():
        return [(0, m)]
    if not flags.any():
        return []
    # rotate so position 0 is False, then read off linear runs
    start0 = int(np.argmin(flags))
    rot = np.roll(flags, -start0)
    runs = []
    j = 0
    while j < m:
        if rot[j]:
            j0 = j
            while j < m and rot[j]:
                j += 1
            runs.append(((j0 + start0) % m, j - j0))
        else:
            j += 1
    return runs


@dataclasses.dataclass(frozen=True)
class LoopAlg:
    """C(S^1) (x) M_k on a uniform grid, optionally cut down to an arc ideal."""

    grid_size: int
    fiber_dim: int
    support_mask: np.ndarray | None = None
    basepoint_index: int | None = None

    def __post_init__(self):
        if self.grid_size < 16:
            raise InvalidInput("grid_size must be >= 16")
        if self.fiber_dim < 1:
            raise InvalidInput("fiber_dim must be >= 1")
        if self.support_mask is not None:
            mask = np.asarray(self.support_mask, dtype=bool)
            object.__setattr__(self, "support_mask", mask)
            if mask.shape != (self.grid_size,):
                raise InvalidInput("support mask length must equal grid_size")
            runs = _circular_runs(mask)
            if len(runs) > 2:
                raise InvalidInput("support mask must be a union of at most 2 arcs")
            if len(runs) == 2:
                gaps = _circular_runs(~mask)
                if any(length < 2 for _, length in gaps):
                    raise InvalidInput("arcs must be separated by >= 2 masked samples")

    @property
    def thetas(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.grid_size) / self.grid_size

    @property
    def mask(self) -> np.ndarray:
        if self.support_mask is None:
            return np.ones(self.grid_size, dtype=bool)
        return self.support_mask

    def is_full(self) -> bool:
        return self.support_mask is None or bool(self.support_mask.all())

    def intersect(self, other: "LoopAlg") -> "LoopAlg":
        if self.grid_size != other.grid_size or self.fiber_dim != other.fiber_dim:
            raise InvalidInput("loop algebras live on different grids")
        both = self.mask & other.mask
        if both.all():
            return LoopAlg(self.grid_size, self.fiber_dim)
        return LoopAlg(self.grid_size, self.fiber_dim, both)


class LoopElem:
    """A sampled function S^1 -> M_d, stored as an (m, d, d) array."""

    __slots__ = ("samples",)

    def __init__(self, samples):
        s = np.asarray(samples, dtype=complex)
        if s.ndim != 3 or s.shape[1] != s.shape[2]:
            raise InvalidInput(f"expected (m, d, d) samples, got {s.shape}")
        if not np.all(np.isfinite(s)):
            raise InvalidInput("non-finite loop samples")
        self.samples = s

    @classmethod
    def constant(cls, mat, grid_size: int) -> "LoopElem":
        m = matcore.as_matrix(mat)
        return cls(np.tile(m, (grid_size, 1, 1)))

    @property
    def grid_size(self) -> int:
        return self.samples.shape[0]

    @property
    def side(self) -> int:
        return self.samples.shape[1]

    def norm(self) -> float:
        return float(np.max(np.linalg.norm(self.samples, 2, axis=(1, 2))))

    def adj(self) -> "LoopElem":
        return LoopElem(np.conj(np.swapaxes(self.samples, 1, 2)))

    def inv(self) -> "LoopElem":
        return LoopElem(np.linalg.inv(self.samples))

    def scale(self, c) -> "LoopElem":
        return LoopElem(c * self.samples)

    def scale_profile(self, values: np.ndarray) -> "LoopElem":
        return LoopElem(np.asarray(values)[:, None, None] * self.samples)

    def eye_like(self) -> "LoopElem":
        return LoopElem(np.tile(np.eye(self.side, dtype=complex), (self.grid_size, 1, 1)))

    def zeros_like(self) -> "LoopElem":
        return LoopElem(np.zeros_like(self.samples))

    def __matmul__(self, other):
        return LoopElem(self.samples @ other.samples)

    def __add__(self, other):
        if isinstance(other, LoopElem):
            return LoopElem(self.samples + other.samples)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, LoopElem):
            return LoopElem(self.samples - other.samples)
        return NotImplemented

    def __rmul__(self, c):
        if np.isscalar(c):
            return self.scale(c)
        return NotImplemented

    def __neg__(self):
        return self.scale(-1.0)


def power_z(alg: LoopAlg, n: int, amp: int = 1) -> LoopElem:
    """The loop theta -> e^(i n theta) embedded in the top-left fiber corner
    of an identity of total side amp * fiber_dim."""
    d = amp * alg.fiber_dim
    out = np.tile(np.eye(d, dtype=complex), (alg.grid_size, 1, 1))
    out[:, 0, 0] = np.exp(1j * n * alg.thetas)
    return LoopElem(out)


def winding_k1(u: LoopElem, tol: Tol = DEFAULT_TOL) -> K1Vec:
    """Determinant winding number of a loop of invertibles."""
    dets = np.linalg.det(u.samples)
    if np.min(np.abs(dets)) < 1e-12:
        raise InvalidInput("loop has a non-invertible sample")
    steps = np.angle(np.roll(dets, -1) / dets)
    if np.max(np.abs(steps)) >= np.pi / 2:
        raise GridTooCoarse(
            f"determinant phase step {np.max(np.abs(steps)):.3f} >= pi/2"
        )
    total = float(np.sum(steps) / (2 * np.pi))
    w = int(round(total))
    if abs(total - w) > 1e-3:
        raise NotQuantized(f"winding {total:.6f} not within 1e-3 of an integer")
    return K1Vec((w,))


def arc_ideal(alg: LoopAlg, arc: tuple[float, float]) -> LoopAlg:
    """Ideal of loops supported strictly inside the open arc (theta_a, theta_b)."""
    a, b = float(arc[0]), float(arc[1])
    length = b - a
    if length >= 2 * np.pi:
        return LoopAlg(alg.grid_size, alg.fiber_dim)
    if length <= 0:
        return LoopAlg(alg.grid_size, alg.fiber_dim,
                       np.zeros(alg.grid_size, dtype=bool))
    rel = np.mod(alg.thetas - a, 2 * np.pi)
    mask = (rel > 0) & (rel < length)
    return LoopAlg(alg.grid_size, alg.fiber_dim, mask)


def bump(alg: LoopAlg, plateau: tuple[float, float], ramp: float) -> np.ndarray:
    """Scalar positive-contraction profile: 1 on the plateau, 0 outside the
    plateau widened by `ramp`, linear in between.  Returned as a real array
    of per-sample values in [0, 1]."""
    a, b = float(plateau[0]), float(plateau[1])
    length = b - a
    if length >= 2 * np.pi:
        return np.ones(alg.grid_size)
    ramp = float(ramp)
    rel = np.mod(alg.thetas - a, 2 * np.pi)
    vals = np.zeros(alg.grid_size)
    on = (rel >= 0) & (rel <= length)
    vals[on] = 1.0
    if ramp > 0:
        # rising ramp before the plateau, falling ramp after
        before = np.mod(a - alg.thetas, 2 * np.pi)
        rising = (before > 0) & (before < ramp)
        vals[rising] = np.maximum(vals[rising], 1.0 - before[rising] / ramp)
        after = np.mod(alg.thetas - b, 2 * np.pi)
        falling = (after > 0) & (after < ramp)
        vals[falling] = np.maximum(vals[falling], 1.0 - after[falling] / ramp)
    return np.clip(vals, 0.0, 1.0)


def loop_eps_in(x: LoopElem, ideal: LoopAlg, eps: float):
    """Exact sup-norm epsilon-membership in an arc ideal; the witness is the
    truncation of x to the support mask."""
    mask = ideal.mask
    off = x.samples[~mask]
    resid = 0.0
    if off.size:
        resid = float(np.max(np.linalg.norm(off, 2, axis=(1, 2))))
    witness = LoopElem(np.where(mask[:, None, None], x.samples, 0.0))
    return resid <= eps, witness, resid


def loop_membership(x: LoopElem, ideal: LoopAlg, unitized: bool):
    """(witness, residual) for membership of x in the (unitized) arc ideal,
    at any matrix amplification of the fiber."""
    mask = ideal.mask
    off = x.samples[~mask]
    if off.size == 0:
        return x, 0.0
    if not unitized:
        _, witness, resid = loop_eps_in(x, ideal, 0.0)
        return witness, resid
    # scalar part: a constant coarse matrix tensored with the fiber identity
    k = ideal.fiber_dim
    d = x.side
    if d % k:
        raise InvalidInput("element side is not a multiple of the fiber dimension")
    n = d // k
    traced = off.reshape(-1, n, k, n, k)
    coarse = np.trace(traced, axis1=2, axis2=4) / k
    scal = coarse.mean(axis=0)
    const = np.kron(scal, np.eye(k, dtype=complex))
    resid = float(np.max(np.linalg.norm(off - const, 2, axis=(1, 2))))
    witness = LoopElem(np.where(mask[:, None, None], x.samples, const))
    return witness, resid


def arc_k0_trivialize(e: LoopElem, ideal: LoopAlg, tol: Tol = DEFAULT_TOL,
                      steps: int | None = None):
    """Trivialization data for an idempotent loop over the unitized arc ideal.

    Returns (scalar_rank, conjugator, const) where conjugator w satisfies
    w e w^-1 ~ const, and const is the constant scalar idempotent
    diag(1_r, 0) matching e off the support arcs.
    """
    mask = ideal.mask
    if mask.all():
        raise NoWitness("not a proper arc ideal: no off-support samples")
    off = e.samples[~mask]
    f_inf = off.mean(axis=0)
    dev = float(np.max(np.linalg.norm(off - f_inf, 2, axis=(1, 2))))
    if dev > 1e-6:
        raise NoWitness(f"off-support samples vary by {dev:.3e}; not in the unitized ideal")
    d = e.side
    r = matcore.rank(f_inf, tol)
    if matcore.op_norm(f_inf @ f_inf - f_inf) > 1e-6:
        raise NoWitness("off-support value is not idempotent")
    # constant conjugator g with g f_inf g^-1 = diag(1_r, 0)
    if r == 0:
        g = np.eye(d, dtype=complex)
    elif r == d:
        g = np.eye(d, dtype=complex)
    else:
        u_r, _, vh_k = np.linalg.svd(f_inf)
        # range columns (f_inf acts as identity there) and kernel columns
        rng_basis = f_inf @ u_r[:, :r]
        ker_basis = vh_k[r:].conj().T
        ginv = np.concatenate([rng_basis, ker_basis], axis=1)
        g = np.linalg.inv(ginv)
    const_mat = np.zeros((d, d), dtype=complex)
    const_mat[:r, :r] = np.eye(r)
    g_loop = LoopElem.constant(g, e.grid_size)
    e1 = g_loop @ e @ g_loop.inv()

    runs = _circular_runs(mask)
    m = e.grid_size
    max_len = max((length for _, length in runs), default=1)
    big_t = steps if steps is not None else max(8, max_len)
    path = []
    for s_idx in range(big_t + 1):
        frac = 1.0 - s_idx / big_t
        samples = e1.samples.copy()
        for start, length in runs:
            anchor = (start - 1) % m
            for off_j in range(length):
                j = (start + off_j) % m
                src = (anchor + int(round(frac * (off_j + 1)))) % m
                samples[j] = e1.samples[src]
        path.append(LoopElem(samples))
    z = path_to_similarity(path, tol)
    conj = z @ g_loop
    return r, conj, LoopElem.constant(const_mat, e.grid_size)
