"""Differential of the matrix lift and the rank certificate for dim = 7.

Tangent vectors are pairs ``(b, v)`` at ``(a0, u0)`` with b arbitrary and
``Re(v conj(u0)) = 0``.  Matrices are flattened row-major into R^16 as in
:meth:`MatH2.flat`.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import BadParameter, DomainError
from .groups import MatH2, orbit_tangent_basis
from .quaternion import I, J, K, ONE, TOL_UNIT, ZERO, Quaternion, check_unit, qdot, qexp, qmul
from .regular import A_MAX, lift_matrix

TOL_RANK = 1e-8
BASE_MAX = 0.9


class TangentPair(NamedTuple):
    b: Quaternion
    v: Quaternion

    def check(self, u0: Quaternion) -> "TangentPair":
        if abs(qdot(self.v, u0)) > TOL_UNIT * max(1.0, self.v.norm()):
            raise BadParameter("v is not tangent to Sp(1) at u0")
        return self


def _base(a0, u0) -> tuple[Quaternion, Quaternion]:
    a0 = Quaternion.coerce(a0)
    if a0.norm() > BASE_MAX:
        raise BadParameter(f"|a0| = {a0.norm():.6g} exceeds {BASE_MAX}")
    return a0, check_unit(u0, "u0")


def dlift_closed(a0, u0, t: TangentPair) -> MatH2:
    """Closed-form differential of ``lift_matrix`` at ``(a0, u0)`` along ``t``.

    With ``s = a0 . b`` (real inner product) and ``m = 1 - |a0|^2`` the result is
    ``m^{-3/2}`` times

        [[s conj(u0) + m conj(v),   s conj(a0 u0) + m conj(b u0 + a0 v)],
         [s a0 + m b,               s                                  ]].
    """
    a0, u0 = _base(a0, u0)
    b, v = Quaternion.coerce(t.b), Quaternion.coerce(t.v)
    TangentPair(b, v).check(u0)
    s = qdot(a0, b)
    m = 1.0 - a0.norm2()
    c = m ** -1.5
    return MatH2(
        (u0.conj() * s + v.conj() * m) * c,
        (qmul(a0, u0).conj() * s + (qmul(b, u0) + qmul(a0, v)).conj() * m) * c,
        (a0 * s + b * m) * c,
        Quaternion(s * c),
    )


def dlift_fd(a0, u0, t: TangentPair, h: float = 1e-5) -> MatH2:
    """Central difference of ``lift_matrix`` along ``a0 + s b``, ``u0 exp(s u0^{-1} v)``."""
    a0, u0 = _base(a0, u0)
    b, v = Quaternion.coerce(t.b), Quaternion.coerce(t.v)
    TangentPair(b, v).check(u0)
    xi = qmul(u0.conj(), v)
    if (a0.norm() + h * b.norm()) > A_MAX:
        raise DomainError("difference curve leaves the supported ball")

    def lift_at(s):
        return lift_matrix(a0 + b * s, qmul(u0, qexp(xi * s)))

    return (lift_at(h) - lift_at(-h)).scale(1.0 / (2.0 * h))


def canonical_tangents(u0) -> list[TangentPair]:
    """Four coordinate directions of B, then ``u0 i, u0 j, u0 k`` on Sp(1)."""
    u0 = Quaternion.coerce(u0)
    basis_b = [TangentPair(e, ZERO) for e in (ONE, I, J, K)]
    basis_v = [TangentPair(ZERO, qmul(u0, e)) for e in (I, J, K)]
    return basis_b + basis_v


def dpi_kernel_basis(a0, u0) -> list[np.ndarray]:
    """Flattened ``A i, A j, A k`` at ``A = lift_matrix(a0, u0)``."""
    return [M.flat() for M in orbit_tangent_basis(lift_matrix(a0, u0))]


def numerical_rank(rows: Sequence[np.ndarray], tol_rank: float = TOL_RANK) -> int:
    """Number of singular values above ``tol_rank * sigma_max``."""
    M = np.atleast_2d(np.asarray(rows, dtype=float))
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol_rank * sv[0]))


def image_rows(a0, u0) -> list[np.ndarray]:
    return [dlift_closed(a0, u0, t).flat() for t in canonical_tangents(u0)]


def transversality_rank(a0, u0, tol_rank: float = TOL_RANK) -> int:
    """Rank of the image of the lift's differential stacked with the fiber directions.

    10 means the 7-dimensional image is injective and meets the
    3-dimensional tangent space of the orbit ``A Sp(1)`` only in 0.
    """
    a0, u0 = _base(a0, u0)
    return numerical_rank(image_rows(a0, u0) + dpi_kernel_basis(a0, u0), tol_rank)


def image_rank(a0, u0, tol_rank: float = TOL_RANK) -> int:
    a0, u0 = _base(a0, u0)
    return numerical_rank(image_rows(a0, u0), tol_rank)


def fd_relative_deviation(a0, u0, t: TangentPair, h: float = 1e-5) -> float:
    """``max|closed - fd| / max|closed|`` over the 16 real entries."""
    closed = dlift_closed(a0, u0, t).flat()
    fd = dlift_fd(a0, u0, t, h).flat()
    scale = np.max(np.abs(closed))
    if scale == 0.0:
        return float(np.max(np.abs(fd)))
    return float(np.max(np.abs(closed - fd)) / scale)


def random_tangent(rng: np.random.Generator, u0: Quaternion) -> TangentPair:
    b = Quaternion(*rng.standard_normal(4))
    xi = Quaternion(0.0, *rng.standard_normal(3))
    return TangentPair(b, qmul(u0, xi))
