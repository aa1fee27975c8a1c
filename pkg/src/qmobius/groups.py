"""2x2 quaternionic matrices and the group Sp(1,1).

Matrices are stored row-major as ``[[m00, m01], [m10, m11]]``.  The displayed
matrix ``[[a, c], [b, d]]`` of a Moebius transformation therefore has
``m00 = a``, ``m01 = c``, ``m10 = b``, ``m11 = d``; with this layout the row
vector ``(q, 1) A = (q a + b, q c + d)``.

Sp(1,1) is cut out by ``A* I11 A = I11`` with ``I11 = diag(1, -1)``.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import BadParameter, NotInGroup
from .quaternion import I, J, K, ONE, ZERO, Quaternion, make_rng, qmul, random_quat

TOL_GRP = 1e-9
BOOST_MAX = 0.95


class MatH2(NamedTuple):
    m00: Quaternion
    m01: Quaternion
    m10: Quaternion
    m11: Quaternion

    @classmethod
    def of(cls, m00, m01, m10, m11) -> "MatH2":
        return cls(*(Quaternion.coerce(e) for e in (m00, m01, m10, m11)))

    def __matmul__(self, other):
        if isinstance(other, MatH2):
            return mat_mul(self, other)
        return NotImplemented

    def __neg__(self):
        return MatH2(-self.m00, -self.m01, -self.m10, -self.m11)

    def __add__(self, other):
        if isinstance(other, MatH2):
            return MatH2(*(p + q for p, q in zip(self, other)))
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, MatH2):
            return MatH2(*(p - q for p, q in zip(self, other)))
        return NotImplemented

    def scale(self, s: float) -> "MatH2":
        return MatH2(*(e * float(s) for e in self))

    def left_scalar(self, u: Quaternion) -> "MatH2":
        """``(u I2) A``: every entry multiplied by ``u`` on the left."""
        return MatH2(*(qmul(u, e) for e in self))

    def right_scalar(self, w: Quaternion) -> "MatH2":
        """``A (w I2)``: every entry multiplied by ``w`` on the right."""
        return MatH2(*(qmul(e, w) for e in self))

    def flat(self) -> np.ndarray:
        """Row-major entries, each as (w, x, y, z): a vector in R^16."""
        return np.array([c for e in self for c in e], dtype=float)

    @classmethod
    def from_flat(cls, v) -> "MatH2":
        v = np.asarray(v, dtype=float).reshape(4, 4)
        return cls(*(Quaternion(*row) for row in v))

    def to_json(self) -> dict:
        return {"m": [[self.m00.to_json(), self.m01.to_json()], [self.m10.to_json(), self.m11.to_json()]]}

    @classmethod
    def from_json(cls, obj) -> "MatH2":
        try:
            rows = obj["m"]
            if len(rows) != 2 or any(len(r) != 2 for r in rows):
                raise BadParameter("matrix JSON must be 2x2")
            return cls(*(Quaternion.from_json(e) for r in rows for e in r))
        except (KeyError, TypeError) as exc:
            raise BadParameter(f"malformed matrix JSON: {exc}") from None


IDENTITY = MatH2(ONE, ZERO, ZERO, ONE)
I11 = MatH2(ONE, ZERO, ZERO, -ONE)


def diag(u, v) -> MatH2:
    return MatH2(Quaternion.coerce(u), ZERO, ZERO, Quaternion.coerce(v))


def mat_mul(A: MatH2, B: MatH2) -> MatH2:
    return MatH2(
        qmul(A.m00, B.m00) + qmul(A.m01, B.m10),
        qmul(A.m00, B.m01) + qmul(A.m01, B.m11),
        qmul(A.m10, B.m00) + qmul(A.m11, B.m10),
        qmul(A.m10, B.m01) + qmul(A.m11, B.m11),
    )


def adjoint(A: MatH2) -> MatH2:
    """Conjugate transpose."""
    return MatH2(A.m00.conj(), A.m10.conj(), A.m01.conj(), A.m11.conj())


def frobenius(A: MatH2) -> float:
    return float(np.linalg.norm(A.flat()))


def membership_defect(A: MatH2) -> float:
    """``|| A* I11 A - I11 ||_F`` over the 16 real components."""
    return frobenius(mat_mul(adjoint(A), mat_mul(I11, A)) - I11)


class Sp11Element(MatH2):
    """A MatH2 that passed the membership test at construction."""

    __slots__ = ()

    def __new__(cls, m00, m01, m10, m11, tol: float = TOL_GRP):
        self = super().__new__(cls, *(Quaternion.coerce(e) for e in (m00, m01, m10, m11)))
        defect = membership_defect(self)
        if not defect <= tol:
            raise NotInGroup(f"membership defect {defect:.3e} exceeds {tol:.1e}")
        return self

    @classmethod
    def wrap(cls, A: MatH2, tol: float = TOL_GRP) -> "Sp11Element":
        if isinstance(A, Sp11Element):
            return A
        return cls(*A, tol=tol)


def sp11_inverse(A: MatH2) -> Sp11Element:
    """``A^{-1} = I11 A* I11``, valid only on the group."""
    A = Sp11Element.wrap(A)
    return Sp11Element(A.m00.conj(), -A.m10.conj(), -A.m01.conj(), A.m11.conj())


def boost(a) -> Sp11Element:
    """``(1 - |a|^2)^{-1/2} [[1, conj(a)], [a, 1]]``; ``boost(a)^{-1} = boost(-a)``."""
    a = Quaternion.coerce(a)
    n2 = a.norm2()
    if math.sqrt(n2) > BOOST_MAX:
        raise BadParameter(f"|a| = {math.sqrt(n2):.6g} exceeds {BOOST_MAX}")
    lam = 1.0 / math.sqrt(1.0 - n2)
    return Sp11Element(Quaternion(lam), a.conj() * lam, a * lam, Quaternion(lam))


def random_sp11(rng, rmax: float = 0.9) -> Sp11Element:
    """``diag(u, v) boost(a)`` with random units u, v and a in the rmax-ball.

    Only membership is relied upon; surjectivity onto the group is not claimed.
    """
    if not isinstance(rng, np.random.Generator):
        rng = make_rng(rng)
    u = random_quat(rng, "unit")
    v = random_quat(rng, "unit")
    a = random_quat(rng, "ball", rmax)
    return Sp11Element.wrap(mat_mul(diag(u, v), boost(a)))


def _close(p: Quaternion, q: Quaternion, tol: float) -> bool:
    return (p - q).norm() <= tol


def classify_subgroup(A: MatH2, tol: float = TOL_GRP) -> str:
    """Finest of ``z2``, ``scalar_sp1``, ``sp1_left``, ``diag_sp1xsp1`` containing A, else ``none``.

    ``sp1_left`` means ``diag(u, 1)``; ``z2`` means ``+-I2``.
    """
    A = Sp11Element.wrap(A)
    if A.m01.norm() > tol or A.m10.norm() > tol:
        return "none"
    if _close(A.m00, A.m11, tol):
        if _close(A.m00, ONE, tol) or _close(A.m00, -ONE, tol):
            return "z2"
        return "scalar_sp1"
    if _close(A.m11, ONE, tol):
        return "sp1_left"
    return "diag_sp1xsp1"


def orbit_tangent_basis(A: MatH2) -> tuple[MatH2, MatH2, MatH2]:
    """Tangent vectors ``A i, A j, A k`` to the orbit ``A Sp(1)``."""
    return tuple(A.right_scalar(w) for w in (I, J, K))
