"""External K-theory products on concrete representatives.

Products are computed on Kronecker representatives (coarse factor on the
left) and checked for compatibility with boundary classes.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import boundary, matcore, subalg
from .boundary import LiftCert, certify_lift
from .errors import InvalidInput, NotAClass
from .loops import LoopElem
from .matcore import DEFAULT_TOL, Tol, as_matrix, eye, kron, op_norm
from .subalg import Subalg
from .wedderburn import K0Vec, WedderburnData, k0_class


def box_times(u, p):
    """u (box) p = u (x) p + 1 (x) (1 - p), the K_1 x K_0 product
    representative; invertible with inverse u^-1 (box) p."""
    p = as_matrix(p)
    if op_norm(p @ p - p) > 1e-8:
        raise NotAClass("p is not idempotent to 1e-8")
    pbar = eye(p.shape[0]) - p
    if isinstance(u, LoopElem):
        one = np.eye(u.side, dtype=complex)
        samples = np.array([np.kron(s, p) + np.kron(one, pbar)
                            for s in u.samples])
        return LoopElem(samples)
    u = as_matrix(u)
    return kron(u, p) + kron(eye(u.shape[0]), pbar)


def k0_product(p, q, w: WedderburnData, tol: Tol = DEFAULT_TOL) -> K0Vec:
    """Class of the product idempotent p (x) q against the given block data
    of the tensor algebra."""
    p = as_matrix(p)
    q = as_matrix(q)
    for name, mat in (("p", p), ("q", q)):
        if op_norm(mat @ mat - mat) > 1e-8:
            raise NotAClass(f"{name} is not idempotent to 1e-8")
    return k0_class(kron(p, q), w, tol)


@dataclasses.dataclass
class ProductCheck:
    lhs_entries: tuple
    rhs_entries: tuple
    equal: bool
    tensored_cert: LiftCert
    intersection_gap: int


def boundary_product_check(cert: LiftCert, p, m: int, tol: Tol = DEFAULT_TOL,
                           seed: int = 0) -> ProductCheck:
    """Compare d_v(u) x [p] with d_{v box p}(u box p) over the tensored pair.

    Both sides are computed in K_0((C cap D) (x) M_m); the left side is the
    boundary class of the input lift scaled by the rank of p, the right side
    is the boundary class of the tensored lift.
    """
    if cert.kind != "matrix":
        raise InvalidInput("product checks run over matrix carriers")
    p = as_matrix(p)
    if p.shape != (m, m):
        raise InvalidInput(f"p must be {m}x{m}")
    rank_p = matcore.rank(p, tol)
    base = boundary.boundary_class(cert, tol, seed=seed)
    lhs = tuple(entry * rank_p for entry in base.entries)

    c2 = subalg.tensor_with_full(cert.c_side.alg, m)
    d2 = subalg.tensor_with_full(cert.d_side.alg, m)
    u2 = box_times(cert.u, p)
    v2 = box_times(cert.v, p)
    cert2 = certify_lift(u2, v2, c2, d2, tol)

    i2_direct = subalg.tensor_with_full(cert.int_side.alg, m)
    gap = cert2.int_side.alg.dim - i2_direct.dim
    rhs_class = boundary.boundary_class(cert2, tol, seed=seed)
    rhs = rhs_class.entries
    return ProductCheck(lhs, tuple(rhs), tuple(lhs) == tuple(rhs), cert2, int(gap))


def _augmentation_functional(alg: Subalg) -> np.ndarray:
    """Matrix functional extracting the scalar coefficient in S + C1."""
    n = alg.ambient_dim
    one = eye(n)
    if alg.is_unital_in_ambient:
        raise InvalidInput("augmentation needs a non-unital algebra")
    w = one - alg.project(one)
    return np.conj(w) / np.vdot(w, one)


def _apply_left_functional(e: np.ndarray, f: np.ndarray, n_a: int, n_b: int,
                           k: int) -> np.ndarray:
    t = e.reshape(k, n_a, n_b, k, n_a, n_b)
    return np.einsum("pq,ipajqb->iajb", f, t).reshape(k * n_b, k * n_b)


def _apply_right_functional(e: np.ndarray, f: np.ndarray, n_a: int, n_b: int,
                            k: int) -> np.ndarray:
    t = e.reshape(k, n_a, n_b, k, n_a, n_b)
    return np.einsum("pq,iapjbq->iajb", f, t).reshape(k * n_a, k * n_a)


def nonunital_class_check(e, a_alg: Subalg, b_alg: Subalg,
                          f=None, tol: Tol = DEFAULT_TOL) -> bool:
    """Whether the class of e over the tensored unitizations descends to the
    non-unital tensor product: both augmentation images must have zero class.

    With a second idempotent f, checks instead that the formal difference
    [e] - [f] descends, i.e. the augmentation images have matching ranks.
    """
    e = as_matrix(e)
    n_a = a_alg.ambient_dim
    n_b = b_alg.ambient_dim
    if e.shape[0] % (n_a * n_b):
        raise InvalidInput("element size incompatible with the tensor ambient")
    k = e.shape[0] // (n_a * n_b)
    phi_a = _augmentation_functional(a_alg)
    phi_b = _augmentation_functional(b_alg)
    targets = [(matcore.rank(_apply_left_functional(e, phi_a, n_a, n_b, k), tol),
                matcore.rank(_apply_right_functional(e, phi_b, n_a, n_b, k), tol))]
    if f is None:
        ref = (0, 0)
    else:
        f = as_matrix(f)
        ref = (matcore.rank(_apply_left_functional(f, phi_a, n_a, n_b, k), tol),
               matcore.rank(_apply_right_functional(f, phi_b, n_a, n_b, k), tol))
    return targets[0] == ref
