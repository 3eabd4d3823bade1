"""Numerical Artin-Wedderburn decomposition and K_0 bookkeeping.

The K_0 group of a finite-dimensional *-subalgebra of M_N(C) is the free
abelian group on its Wedderburn blocks; classes are integer vectors of
normalized ranks (raw rank divided by the block multiplicity).  K_1 is the
zero group throughout this module.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import matcore
from .errors import DecompositionFailure, InvalidInput, NotAClass, NotEquivalent, PathTooCoarse
from .matcore import DEFAULT_TOL, Tol, adjoint, as_matrix, eye, kron, op_norm
from .subalg import Subalg, Subspace, amplify, unitize


@dataclasses.dataclass(frozen=True)
class K0Vec:
    """Normalized-rank-per-block class vector."""

    entries: tuple
    blocks: tuple  # ((d_i, m_i), ...) signature of the owning decomposition

    def __post_init__(self):
        if len(self.entries) != len(self.blocks):
            raise InvalidInput("K0Vec entry/block length mismatch")

    def _check(self, other):
        if self.blocks != other.blocks:
            raise InvalidInput("K0Vec block signatures differ")

    def __add__(self, other):
        self._check(other)
        return K0Vec(tuple(a + b for a, b in zip(self.entries, other.entries)), self.blocks)

    def __sub__(self, other):
        self._check(other)
        return K0Vec(tuple(a - b for a, b in zip(self.entries, other.entries)), self.blocks)

    def __neg__(self):
        return K0Vec(tuple(-a for a in self.entries), self.blocks)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.entries)

    def scale(self, k: int) -> "K0Vec":
        return K0Vec(tuple(k * a for a in self.entries), self.blocks)


@dataclasses.dataclass(frozen=True)
class K1Vec:
    """Per-block winding integers; empty for finite-dimensional algebras."""

    entries: tuple = ()

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.entries)


@dataclasses.dataclass
class WedderburnData:
    """Block structure of a *-subalgebra: minimal central projections z_i,
    block matrix dimensions d_i and multiplicities m_i."""

    algebra: Subalg
    blocks: list  # [(d_i, m_i)]
    central_projections: list  # [z_i] as ambient matrices

    @property
    def signature(self) -> tuple:
        return tuple(self.blocks)

    def zero_class(self) -> K0Vec:
        return K0Vec((0,) * len(self.blocks), self.signature)


def _center_basis(s: Subalg) -> list[np.ndarray]:
    """Basis of the center of S, via the null space of the commutator map."""
    d = s.dim
    if d == 0:
        return []
    basis = s.basis
    cols = []
    for k in range(d):
        col = np.concatenate([(basis[k] @ b - b @ basis[k]).ravel() for b in basis])
        cols.append(col)
    a = np.array(cols).T
    _, sv, vh = np.linalg.svd(a)
    cut = max(1.0, sv[0] if sv.size else 1.0) * s.tol.rank_rel_tol
    # null vectors of a = U S V* are columns of V, i.e. conjugated rows of vh
    null = np.conj(vh[np.concatenate([sv, np.zeros(max(0, d - sv.size))]) <= cut])
    out = []
    for c in null:
        z = sum(ci * bi for ci, bi in zip(c, basis))
        out.append(z)
    return out


def _cluster(values: np.ndarray, gap: float) -> list[np.ndarray]:
    order = np.argsort(values)
    groups = [[order[0]]]
    for idx in order[1:]:
        if values[idx] - values[groups[-1][-1]] <= gap:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return [np.array(g) for g in groups]


def decompose(s: Subalg, tol: Tol = DEFAULT_TOL, seed: int = 0) -> WedderburnData:
    """Wedderburn data of S via eigenspace splitting of a random self-adjoint
    central element; reseeded on near-degenerate spectra."""
    if s.dim == 0:
        raise InvalidInput("cannot decompose the zero algebra")
    zc = _center_basis(s)
    if not zc:
        raise DecompositionFailure("empty center")
    rng = np.random.default_rng(seed)
    last_err = None
    for _ in range(5):
        coeffs = rng.standard_normal(len(zc)) + 1j * rng.standard_normal(len(zc))
        t = sum(c * z for c, z in zip(coeffs, zc))
        t = (t + adjoint(t)) / 2
        t = s.project(t)
        t = (t + adjoint(t)) / 2
        scale = max(op_norm(t), 1e-12)
        w, v = np.linalg.eigh(t / scale)
        try:
            groups = _cluster(w, 1e-6)
            projs = []
            blocks = []
            for g in groups:
                z = v[:, g] @ adjoint(v[:, g])
                if abs(np.mean(w[g])) < 1e-6 and not s.contains(z, slack=1e-7):
                    # kernel cluster of the ambient action; genuine central
                    # projections carry a random nonzero eigenvalue a.s.
                    continue
                if not s.contains(z, slack=1e-7):
                    raise DecompositionFailure("eigenprojection escapes the algebra")
                comp_dim = _compressed_dim(s, z)
                d = int(round(np.sqrt(comp_dim)))
                if d * d != comp_dim:
                    raise DecompositionFailure("compressed block dimension not a square")
                r = int(round(np.trace(z).real))
                if r % d:
                    raise DecompositionFailure("block rank not divisible by block dim")
                projs.append(z)
                blocks.append((d, r // d))
            if not projs:
                raise DecompositionFailure("no blocks found")
            total = sum(d * d for d, _ in blocks)
            if total != s.dim:
                raise DecompositionFailure(
                    f"sum of d_i^2 = {total} does not match dim(S) = {s.dim}"
                )
            # deterministic block order: by trace of z_i, then by d_i
            key = sorted(range(len(projs)),
                         key=lambda i: (-round(np.trace(projs[i]).real), -blocks[i][0],
                                        _fingerprint(projs[i])))
            return WedderburnData(s, [blocks[i] for i in key], [projs[i] for i in key])
        except DecompositionFailure as err:
            last_err = err
            continue
    raise DecompositionFailure(f"unresolved after 5 reseeds: {last_err}")


def _fingerprint(z: np.ndarray) -> tuple:
    # earlier-supported projections sort first (twisted-pair convention: P, Q)
    d = np.real(np.diag(z))
    return tuple(np.round(-d, 6))


def _compressed_dim(s: Subalg, z: np.ndarray) -> int:
    flats = np.array([(z @ b @ z).ravel() for b in s.basis])
    sv = np.linalg.svd(flats, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > sv[0] * s.tol.rank_rel_tol))


def k0_class(e, w: WedderburnData, tol: Tol = DEFAULT_TOL) -> K0Vec:
    """Class of an idempotent over an amplification of (the unitization of)
    the algebra, as normalized ranks against the minimal central projections."""
    e = as_matrix(e)
    if op_norm(e @ e - e) > 1e-6:
        raise NotAClass("input is not idempotent to tolerance 1e-6")
    n_amb = w.algebra.ambient_dim
    if e.shape[0] % n_amb:
        raise InvalidInput("idempotent size is not a multiple of the ambient dimension")
    k = e.shape[0] // n_amb
    entries = []
    for z, (d, m) in zip(w.central_projections, w.blocks):
        za = kron(eye(k), z)
        comp = za @ e @ za
        r = matcore.rank(comp, tol)
        if r % m:
            raise NotAClass(
                f"rank {r} of block compression not divisible by multiplicity {m}"
            )
        entries.append(r // m)
    return K0Vec(tuple(entries), w.signature)


def algebra_conjugator(e, f, span: Subspace, tol: Tol = DEFAULT_TOL, seed: int = 0,
                       cond_max: float = 1e8):
    """An invertible w in span with w e w^-1 ~ f, found from the null space of
    w -> w e - f w; raises NotEquivalent when no invertible solution exists."""
    e = as_matrix(e)
    f = as_matrix(f)
    basis = span.basis
    if not basis:
        raise NotEquivalent("empty algebra span")
    cols = [((b @ e) - (f @ b)).ravel() for b in basis]
    a = np.array(cols).T
    _, sv, vh = np.linalg.svd(a)
    top = sv[0] if sv.size and sv[0] > 0 else 1.0
    padded = np.concatenate([sv, np.zeros(max(0, len(basis) - sv.size))])
    null = np.conj(vh[padded <= top * 1e-9])
    if null.shape[0] == 0:
        raise NotEquivalent("no intertwiner in the algebra")
    rng = np.random.default_rng(seed)
    for _ in range(32):
        c = rng.standard_normal(null.shape[0]) + 1j * rng.standard_normal(null.shape[0])
        coeffs = c @ null
        wmat = sum(coeffs[j] * basis[j] for j in range(len(basis)))
        if matcore.cond(wmat) <= cond_max:
            return wmat
    raise NotEquivalent("no invertible intertwiner found in the null space")


def similarity_witness(e, f, s: Subalg, tol: Tol = DEFAULT_TOL, seed: int = 0) -> np.ndarray:
    """Invertible w in the amplified unitized algebra conjugating e to f.

    K_0 classes must agree; in the finite-dimensional setting equality of
    classes already forces similarity within the algebra itself (l = 0).
    """
    e = as_matrix(e)
    f = as_matrix(f)
    if e.shape != f.shape:
        raise InvalidInput("idempotent shapes differ")
    w = decompose(s, tol, seed=seed)
    ce = k0_class(e, w, tol)
    cf = k0_class(f, w, tol)
    if ce.entries != cf.entries:
        raise NotEquivalent(f"K0 classes differ: {ce.entries} vs {cf.entries}")
    k = e.shape[0] // s.ambient_dim
    span = amplify(unitize(s), k)
    wmat = algebra_conjugator(e, f, span, tol, seed=seed)
    resid = op_norm(wmat @ e @ np.linalg.inv(wmat) - f)
    if resid > 1e-8:
        raise NotEquivalent(f"conjugation residual {resid:.3e} exceeds 1e-8")
    return wmat


def path_to_similarity(e_path, tol: Tol = DEFAULT_TOL):
    """Telescoping conjugator along a discrete path of idempotents.

    Each step uses z_i = ((2 e_{i+1} - 1)(2 e_i - 1) + 1) / 2, which is
    invertible when the step size beats 1 / (2 max ||2 e_i - 1||).
    """
    from . import ops

    path = list(e_path)
    if len(path) < 1:
        raise InvalidInput("empty idempotent path")
    bound = max(ops.norm(ops.scal(2.0, e) - ops.eye_like(e)) for e in path)
    limit = 1.0 / (2.0 * max(bound, 1e-12))
    z = ops.eye_like(path[0])
    for i in range(len(path) - 1):
        step = ops.norm(path[i + 1] - path[i])
        if step >= limit:
            raise PathTooCoarse(i, f"step {step:.3e} >= {limit:.3e} at index {i}")
        sym_next = ops.scal(2.0, path[i + 1]) - ops.eye_like(path[i + 1])
        sym_cur = ops.scal(2.0, path[i]) - ops.eye_like(path[i])
        zi = ops.scal(0.5, sym_next @ sym_cur + ops.eye_like(path[i]))
        z = zi @ z
    resid = ops.norm(z @ path[0] @ ops.inv(z) - path[-1])
    if resid > 1e-6:
        raise PathTooCoarse(len(path) - 1,
                            f"telescoped conjugation residual {resid:.3e} > 1e-6")
    return z
