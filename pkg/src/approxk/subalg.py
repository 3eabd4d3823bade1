"""Finite-dimensional *-subalgebras of an ambient M_N(C).

A subalgebra is stored as an orthonormal basis under the Hilbert-Schmidt
inner product <a, b> = tr(a* b).  The nearest-point oracle projects in the
HS geometry and reports the residual in operator norm, which is a certified
upper bound for the operator-norm distance to the span.
"""

from __future__ import annotations

import numpy as np

from . import matcore
from .errors import (
    AmbiguousIntersection,
    ClosureFailure,
    InvalidInput,
)
from .matcore import DEFAULT_TOL, Tol, adjoint, as_matrix, eye, hs_norm, kron, op_norm


def _orthonormalize(flats: np.ndarray, rel_tol: float) -> np.ndarray:
    """Rows spanning a subspace of C^(N^2) -> orthonormal rows of the same span."""
    if flats.shape[0] == 0:
        return flats
    _, s, vh = np.linalg.svd(flats, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return flats[:0]
    keep = s > s[0] * rel_tol
    return vh[keep]


class Subspace:
    """A linear subspace of M_N(C) with an HS-orthonormal basis."""

    def __init__(self, ambient_dim: int, basis, tol: Tol = DEFAULT_TOL, _orthonormal=False):
        self.ambient_dim = int(ambient_dim)
        self.tol = tol
        mats = [as_matrix(b) for b in basis]
        for b in mats:
            if b.shape != (self.ambient_dim, self.ambient_dim):
                raise InvalidInput(
                    f"basis element shape {b.shape} != ambient ({self.ambient_dim},)*2"
                )
        if mats:
            flats = np.array([b.ravel() for b in mats]).reshape(len(mats), -1)
        else:
            # the zero subspace: legal, e.g. the intersection of two corners
            # in general position
            flats = np.zeros((0, self.ambient_dim * self.ambient_dim), dtype=complex)
        if not _orthonormal:
            flats = _orthonormalize(flats, tol.rank_rel_tol)
        self._flats = flats

    @property
    def dim(self) -> int:
        return self._flats.shape[0]

    @property
    def basis(self) -> list[np.ndarray]:
        n = self.ambient_dim
        return [f.reshape(n, n) for f in self._flats]

    def coefficients(self, x) -> np.ndarray:
        return np.conj(self._flats) @ as_matrix(x).ravel()

    def project(self, x) -> np.ndarray:
        """HS-orthogonal projection onto the span."""
        x = as_matrix(x)
        if x.shape != (self.ambient_dim, self.ambient_dim):
            raise InvalidInput("dimension mismatch in nearest-point oracle")
        c = self.coefficients(x)
        return (c @ self._flats).reshape(x.shape)

    def nearest(self, x):
        """(HS projection, operator-norm residual).

        The residual certifies an upper bound on the operator-norm distance
        d(x, span), since ||.||_op <= ||.||_HS.
        """
        p = self.project(x)
        return p, op_norm(as_matrix(x) - p)

    def eps_in(self, x, eps: float):
        """One-sided epsilon-membership test with the HS witness."""
        p, r = self.nearest(x)
        return r <= eps, p, r

    def contains(self, x, slack: float | None = None) -> bool:
        _, r = self.nearest(x)
        return r <= (slack if slack is not None else self.tol.membership_tol) * max(
            1.0, op_norm(x)
        )

    def gram_residual(self) -> float:
        if self.dim == 0:
            return 0.0
        g = np.conj(self._flats) @ self._flats.T
        return float(np.abs(g - np.eye(self.dim)).max())


class Subalg(Subspace):
    """A *-closed, multiplicatively closed subspace of M_N(C)."""

    def __init__(self, ambient_dim, basis, tol: Tol = DEFAULT_TOL, _orthonormal=False,
                 check: bool = True):
        super().__init__(ambient_dim, basis, tol, _orthonormal=_orthonormal)
        if check:
            self._check_closure()
        one = eye(self.ambient_dim)
        self.is_unital_in_ambient = self.dim > 0 and self.contains(one)

    def _check_closure(self):
        # closure residuals measured in HS norm with mild slack for products
        slack = 64 * max(self.tol.membership_tol, 1e-12)
        for b in self.basis:
            if hs_norm(adjoint(b) - self.project(adjoint(b))) > slack * max(1.0, hs_norm(b)):
                raise ClosureFailure("span not closed under adjoint")
        for bi in self.basis:
            for bj in self.basis:
                p = bi @ bj
                if hs_norm(p - self.project(p)) > slack * max(1.0, hs_norm(p)):
                    raise ClosureFailure("span not closed under multiplication")
        if self.dim and self.gram_residual() > 1e-10:
            raise ClosureFailure("basis Gram matrix deviates from identity")


def from_basis(ambient_dim: int, generators, tol: Tol = DEFAULT_TOL) -> Subalg:
    """The *-algebra generated by the given matrices.

    Iterates closure under adjoints and pairwise products until the span
    dimension stabilizes; errors if it fails to do so within N^2 rounds.
    """
    mats = [as_matrix(g) for g in generators]
    span = Subspace(ambient_dim, mats, tol)
    cap = ambient_dim * ambient_dim
    for _ in range(cap + 1):
        cur = span.basis
        new = list(cur)
        new.extend(adjoint(b) for b in cur)
        new.extend(bi @ bj for bi in cur for bj in cur)
        grown = Subspace(ambient_dim, new, tol)
        if grown.dim == span.dim:
            return Subalg(ambient_dim, grown.basis, tol, _orthonormal=True)
        span = grown
    raise ClosureFailure(f"span dimension failed to stabilize within {cap} iterations")


def unitize(s: Subalg) -> Subalg:
    """Span of S and the ambient unit; idempotent."""
    if s.is_unital_in_ambient:
        return s
    return Subalg(s.ambient_dim, s.basis + [eye(s.ambient_dim)], s.tol)


def amplify(s: Subalg, n: int) -> Subalg:
    """M_n(S) inside M_{nN}(C), coarse block factor on the left."""
    if n < 1:
        raise InvalidInput("amplification count must be >= 1")
    basis = [
        kron(matcore.matrix_unit(n, i, j), b)
        for i in range(n)
        for j in range(n)
        for b in s.basis
    ]
    return Subalg(s.ambient_dim * n, basis, s.tol, _orthonormal=True, check=False)


def tensor_with_full(s: Subalg, m: int) -> Subalg:
    """S tensor M_m, realized with the S factor on the left."""
    if m < 1:
        raise InvalidInput("tensor factor size must be >= 1")
    basis = [
        kron(b, matcore.matrix_unit(m, i, j))
        for b in s.basis
        for i in range(m)
        for j in range(m)
    ]
    return Subalg(s.ambient_dim * m, basis, s.tol, _orthonormal=True, check=False)


def intersect(s: Subalg, t: Subalg, tol: Tol = DEFAULT_TOL) -> Subalg:
    """Subspace intersection of the two spans, verified *-closed.

    Computed from the singular vectors of the stacked complement projectors;
    borderline singular values raise AmbiguousIntersection.
    """
    if s.ambient_dim != t.ambient_dim:
        raise InvalidInput("intersection requires a common ambient")
    n2 = s.ambient_dim * s.ambient_dim
    ps = s._flats.T @ s._flats.conj()
    pt = t._flats.T @ t._flats.conj()
    stacked = np.vstack([np.eye(n2) - ps, np.eye(n2) - pt])
    _, sv, vh = np.linalg.svd(stacked)
    # intersection = joint null space of the complements
    cut = max(sv[0], 1.0) * tol.rank_rel_tol
    borderline = np.sum((sv > cut / 10) & (sv < cut * 10))
    if borderline:
        raise AmbiguousIntersection(
            f"{borderline} borderline singular value(s) near cutoff {cut:.3e}"
        )
    # kernel vectors are columns of V, i.e. conjugated rows of vh
    null = np.conj(vh[sv <= cut])
    basis = [v.reshape(s.ambient_dim, s.ambient_dim) for v in null]
    return Subalg(s.ambient_dim, basis, tol)


def _positive_contraction_parts(x: np.ndarray) -> list[np.ndarray]:
    """Split a contraction into four positive contractions (re/im, +/- parts)."""
    parts = []
    for herm in ((x + adjoint(x)) / 2, (x - adjoint(x)) / 2j):
        w, v = np.linalg.eigh(herm)
        for sel in (np.clip(w, 0, None), np.clip(-w, 0, None)):
            p = v @ np.diag(sel.astype(complex)) @ adjoint(v)
            if op_norm(p) > 1e-14:
                parts.append(p / max(1.0, op_norm(p)))
    return parts


def enlarge_subspace(x0: Subspace, n_pow: int) -> Subspace:
    """Subspace bootstrap: adjoin all m-th roots (m <= n_pow + 1) of the
    positive-contraction pieces of a contraction basis of x0."""
    if n_pow < 2:
        raise InvalidInput("n_pow must be >= 2")
    out: list[np.ndarray] = list(x0.basis)
    for b in x0.basis:
        nb = op_norm(b)
        if nb < 1e-14:
            continue
        for p in _positive_contraction_parts(b / nb):
            w, v = np.linalg.eigh((p + adjoint(p)) / 2)
            w = np.clip(w, 0.0, None)
            for m in range(1, n_pow + 2):
                root = v @ np.diag(w ** (1.0 / m)).astype(complex) @ adjoint(v)
                out.append(root)
    return Subspace(x0.ambient_dim, out, x0.tol)
