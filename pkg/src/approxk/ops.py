"""Type-generic element operations.

The boundary machinery runs over two carriers: dense complex matrices
(numpy arrays) and sampled loop elements (:class:`approxk.loops.LoopElem`).
These helpers dispatch on the carrier so the lift formulas can be written
once.
"""

from __future__ import annotations

import numpy as np

from . import matcore


def _is_loop(x) -> bool:
    from .loops import LoopElem

    return isinstance(x, LoopElem)


def norm(x) -> float:
    if _is_loop(x):
        return x.norm()
    return matcore.op_norm(x)


def inv(x):
    if _is_loop(x):
        return x.inv()
    return np.linalg.inv(matcore.as_matrix(x))


def adj(x):
    if _is_loop(x):
        return x.adj()
    return matcore.adjoint(matcore.as_matrix(x))


def eye_like(x):
    if _is_loop(x):
        return x.eye_like()
    return matcore.eye(matcore.as_matrix(x).shape[0])


def zero_like(x):
    if _is_loop(x):
        return x.zeros_like()
    return matcore.zeros(matcore.as_matrix(x).shape[0])


def scal(c, x):
    if _is_loop(x):
        return x.scale(c)
    return c * matcore.as_matrix(x)


def block2(a, b, c, d):
    """2x2 block matrix [[a, b], [c, d]] over the carrier."""
    if _is_loop(a):
        from .loops import LoopElem

        samples = np.concatenate(
            [
                np.concatenate([a.samples, b.samples], axis=2),
                np.concatenate([c.samples, d.samples], axis=2),
            ],
            axis=1,
        )
        return LoopElem(samples)
    return np.block(
        [
            [matcore.as_matrix(a), matcore.as_matrix(b)],
            [matcore.as_matrix(c), matcore.as_matrix(d)],
        ]
    )


def oplus(a, b):
    """Block-diagonal sum; the summands may have different sizes."""
    if _is_loop(a):
        from .loops import LoopElem

        m, na, _ = a.samples.shape
        nb = b.samples.shape[1]
        out = np.zeros((m, na + nb, na + nb), dtype=complex)
        out[:, :na, :na] = a.samples
        out[:, na:, na:] = b.samples
        return LoopElem(out)
    am = matcore.as_matrix(a)
    bm = matcore.as_matrix(b)
    na, nb = am.shape[0], bm.shape[0]
    out = np.zeros((na + nb, na + nb), dtype=complex)
    out[:na, :na] = am
    out[na:, na:] = bm
    return out


def corner_blocks(x, n_top: int):
    """Split a square element into 2x2 corner blocks with top-left size n_top."""
    if _is_loop(x):
        from .loops import LoopElem

        s = x.samples
        return (
            LoopElem(s[:, :n_top, :n_top]),
            LoopElem(s[:, :n_top, n_top:]),
            LoopElem(s[:, n_top:, :n_top]),
            LoopElem(s[:, n_top:, n_top:]),
        )
    a = matcore.as_matrix(x)
    return (
        a[:n_top, :n_top],
        a[:n_top, n_top:],
        a[n_top:, :n_top],
        a[n_top:, n_top:],
    )


def upper_unipotent(z):
    """X(z) = [[1, z], [0, 1]]."""
    one = eye_like(z)
    return block2(one, z, zero_like(z), one)


def lower_unipotent(z):
    """Y(z) = [[1, 0], [z, 1]]."""
    one = eye_like(z)
    return block2(one, zero_like(z), z, one)


def rotation_j(x):
    """J = [[0, -1], [1, 0]] sized to match x's 2x2 block structure."""
    one = eye_like(x)
    zero = zero_like(x)
    return block2(zero, scal(-1.0, one), one, zero)


def side_size(x) -> int:
    if _is_loop(x):
        return x.samples.shape[1]
    return matcore.as_matrix(x).shape[0]


def embed_top_left(x, total: int):
    """Top-left corner embedding of x into a size-`total` identity."""
    n = side_size(x)
    if n == total:
        return x
    if n > total:
        raise ValueError("cannot embed into a smaller size")
    if _is_loop(x):
        from .loops import LoopElem

        m = x.samples.shape[0]
        out = np.tile(np.eye(total, dtype=complex), (m, 1, 1))
        out[:, :n, :n] = x.samples
        return LoopElem(out)
    out = matcore.eye(total)
    out[:n, :n] = matcore.as_matrix(x)
    return out
