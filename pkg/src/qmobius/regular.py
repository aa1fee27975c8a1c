"""Slice regular Moebius transformations of the quaternionic unit ball.

Every such map is stored through its canonical pair ``(a, u)`` in
``B x Sp(1)``, standing for

    q -> (1 - q conj(a))^{-*} * (q - a) u,

whose unique zero is ``a``.  Matrices enter through the lift
``lift_matrix(a, u) = diag(conj(u), 1) boost(a)`` and the bundle projection
``projection(A) = F_{A^{-1}}``, which are read off entry-wise instead of by
root finding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import series as ss
from .errors import BadParameter, DomainError, InconsistentFiber, NoConvergence
from .groups import (
    BOOST_MAX,
    TOL_GRP,
    MatH2,
    Sp11Element,
    classify_subgroup,
    mat_mul,
    sp11_inverse,
)
from .quaternion import ONE, ZERO, Quaternion, check_unit, qmul

TOL_BALL = 1e-12
A_MAX = BOOST_MAX
SERIES_RADIUS = 0.8
MIN_SERIES_ORDER = 40


@dataclass(frozen=True)
class RegularMoebius:
    """The map ``(1 - q conj(a))^{-*} * (q - a) u``."""

    a: Quaternion
    u: Quaternion

    def __post_init__(self):
        a = Quaternion.coerce(self.a)
        if a.norm() > A_MAX:
            raise BadParameter(f"|a| = {a.norm():.6g} exceeds the supported radius {A_MAX}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "u", check_unit(self.u))

    def __call__(self, q) -> Quaternion:
        return eval_closed(self, q)

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "u": self.u.to_json()}


def from_params(a, u) -> RegularMoebius:
    return RegularMoebius(Quaternion.coerce(a), Quaternion.coerce(u))


def rot(u) -> RegularMoebius:
    """``R_u : q -> q u``."""
    return RegularMoebius(ZERO, Quaternion.coerce(u))


IDENTITY = RegularMoebius(ZERO, ONE)


def param_distance(F: RegularMoebius, G: RegularMoebius) -> float:
    return max((F.a - G.a).norm(), (F.u - G.u).norm())


def eval_closed(F: RegularMoebius, q) -> Quaternion:
    """``(1 - 2Re(a) q + q^2 |a|^2)^{-1} (q (a^2 + 1) - (q^2 + 1) a) u``.

    The first factor is a real polynomial in q, so it commutes with q and the
    order of the left inverse is immaterial.
    """
    q = Quaternion.coerce(q)
    if q.norm() >= 1.0:
        raise DomainError(f"|q| = {q.norm():.6g} is not inside the unit ball")
    a = F.a
    q2 = qmul(q, q)
    den = ONE - q * (2.0 * a.w) + q2 * a.norm2()
    num = qmul(q, qmul(a, a) + ONE) - qmul(q2 + ONE, a)
    return qmul(qmul(den.inv(), num), F.u)


@lru_cache(maxsize=4096)
def series_form(F: RegularMoebius, order: int = ss.DEFAULT_ORDER) -> ss.SliceSeries:
    """The *-quotient ``(1 - q conj(a))^{-*} * ((q - a) u)`` as a truncated series."""
    den = ss.linear_series(-F.a.conj(), ONE)
    num = ss.linear_series(F.u, -qmul(F.a, F.u))
    return ss.star_product(ss.regular_reciprocal(den, order), num, order=order)


def eval_series(F: RegularMoebius, q, order: int = ss.DEFAULT_ORDER) -> Quaternion:
    q = Quaternion.coerce(q)
    if q.norm() > SERIES_RADIUS:
        raise DomainError(f"series evaluation is limited to |q| <= {SERIES_RADIUS}")
    if order < MIN_SERIES_ORDER:
        raise BadParameter(f"series order must be at least {MIN_SERIES_ORDER}")
    return ss.eval_series(series_form(F, order), q)


def matrix_series(A: MatH2, order: int = ss.DEFAULT_ORDER) -> ss.SliceSeries:
    """``(q c + d)^{-*} * (q a + b)`` for ``A = [[a, c], [b, d]]``, built literally."""
    A = Sp11Element.wrap(A)
    den = ss.linear_series(A.m01, A.m11)
    num = ss.linear_series(A.m00, A.m10)
    return ss.star_product(ss.regular_reciprocal(den, order), num, order=order)


# -- matrices -----------------------------------------------------------------

def lift_matrix(a, u) -> Sp11Element:
    """``(1 - |a|^2)^{-1/2} [[conj(u), conj(a u)], [a, 1]]``."""
    a = Quaternion.coerce(a)
    u = check_unit(u)
    n2 = a.norm2()
    if math.sqrt(n2) > A_MAX:
        raise BadParameter(f"|a| = {math.sqrt(n2):.6g} exceeds {A_MAX}")
    lam = 1.0 / math.sqrt(1.0 - n2)
    return Sp11Element(u.conj() * lam, qmul(a, u).conj() * lam, a * lam, Quaternion(lam))


class Canonical(NamedTuple):
    F: RegularMoebius
    consistency_defect: float


def canonical_pair(A: MatH2) -> Canonical:
    """Canonical pair of ``F_{A^{-1}}`` plus the defect of the unused entry m01.

    Every A is ``lift_matrix(a, u) w`` for a unit w, so
    ``m11 = lam w``, ``m10 = lam a w`` and ``m00 = lam conj(u) w``.
    """
    A = Sp11Element.wrap(A)
    lam = A.m11.norm()
    v = A.m11.inv() * lam  # = w^{-1}
    if A.m10.norm() <= 1e-12 * lam:
        a = ZERO
    else:
        a = qmul(A.m10, A.m11.conj()) / (lam * lam)
    u = qmul(A.m00, v).conj() / lam
    u = u / u.norm()
    defect = (qmul(A.m01, v) - qmul(a, u).conj() * lam).norm()
    return Canonical(RegularMoebius(a, u), defect)


def projection(A: MatH2) -> RegularMoebius:
    """Bundle projection ``A -> F_{A^{-1}}``, constant on cosets ``A Sp(1)``."""
    F, defect = canonical_pair(A)
    lam = Sp11Element.wrap(A).m11.norm()
    if defect > TOL_GRP * max(1.0, lam):
        raise InconsistentFiber(f"entry m01 disagrees with the extracted pair by {defect:.3e}")
    return F


def regular_of_matrix(A: MatH2) -> RegularMoebius:
    """``F_A = (qc + d)^{-*} * (qa + b)`` in canonical form."""
    return projection(sp11_inverse(A))


def section(F: RegularMoebius) -> Sp11Element:
    """Global section of the projection: ``projection(section(F)) == F``."""
    return lift_matrix(F.a, F.u)


def fiber_equivalent(A: MatH2, B: MatH2) -> bool:
    """``F_A == F_B``, decided as ``A B^{-1} in Sp(1) I2``."""
    A = Sp11Element.wrap(A)
    C = Sp11Element.wrap(mat_mul(A, sp11_inverse(B)))
    return classify_subgroup(C) in ("scalar_sp1", "z2")


# -- the action of the stabilizer ------------------------------------------

def left_compose_rot(w, F: RegularMoebius) -> RegularMoebius:
    """``R_w o F``, which is again in the family: ``(a, u) -> (a, u w)``."""
    w = check_unit(w, "w")
    u = qmul(F.u, w)
    return RegularMoebius(F.a, u / u.norm())


def in_stabilizer(F: RegularMoebius, tol: float = TOL_BALL) -> bool:
    return F.a.norm() <= tol


def inverse_orbit_at_0(F: RegularMoebius) -> Quaternion:
    """``F^{-1}(0)``, which is the stored zero ``a``."""
    return F.a


def double_coset_invariant(A: MatH2) -> Quaternion:
    """``(F_{A^{-1}})^{-1}(0)``, constant on ``diag(Sp(1), 1) A Sp(1)``."""
    return inverse_orbit_at_0(projection(A))


# -- inverse images -------------------------------------------------------------

def _as_vec(q: Quaternion) -> np.ndarray:
    return np.array(q, dtype=float)


def _jacobian_fd(F: RegularMoebius, q: np.ndarray, h: float) -> np.ndarray:
    Jm = np.empty((4, 4))
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        Jm[:, k] = (_as_vec(eval_closed(F, Quaternion(*(q + e))))
                    - _as_vec(eval_closed(F, Quaternion(*(q - e))))) / (2.0 * h)
    return Jm


def preimage(F: RegularMoebius, target, tol: float = 1e-13, max_iter: int = 100,
             h: float = 1e-7) -> Quaternion:
    """Solve ``F(q) = target`` by damped Newton in R^4, starting at the zero ``a``.

    The Jacobian is a central difference; steps are halved until the residual
    decreases and the iterate stays in the ball.
    """
    t = Quaternion.coerce(target)
    if t.norm() >= 1.0:
        raise DomainError("target must lie inside the unit ball")
    tv = _as_vec(t)
    q = _as_vec(F.a)

    def resid(x):
        return _as_vec(eval_closed(F, Quaternion(*x))) - tv

    r = resid(q)
    for _ in range(max_iter):
        rn = np.linalg.norm(r)
        if rn <= tol:
            return Quaternion(*q)
        step = np.linalg.solve(_jacobian_fd(F, q, h), -r)
        s = 1.0
        while s > 1e-12:
            trial = q + s * step
            if np.dot(trial, trial) < 1.0:
                rt = resid(trial)
                if np.linalg.norm(rt) < rn:
                    q, r = trial, rt
                    break
            s *= 0.5
        else:
            break
    if np.linalg.norm(r) <= tol:
        return Quaternion(*q)
    raise NoConvergence(f"Newton stalled at residual {np.linalg.norm(r):.3e} (tol {tol:.1e})")


# -- composition leaves the family -------------------------------------------

class CompositionResult(NamedTuple):
    coeffs: ss.SliceSeries
    residual: float


def composition_series(a: float, order: int = ss.DEFAULT_ORDER) -> ss.SliceSeries:
    """Real coefficients of ``f o g`` in the variable ``p = q u``.

    ``f(q) = (1 - q a)^{-1} (q - a)`` with real a and ``g(q) = q u`` give
    ``-a + sum_{n>=1} p^n a^{n-1} (1 - a^2)``.  In q this is a right-coefficient
    series only when u commutes with q, i.e. ``u = +-1``.
    """
    c = np.zeros((order + 1, 4))
    c[0, 0] = -a
    c[1:, 0] = (1.0 - a * a) * a ** np.arange(order)
    return ss.SliceSeries.from_array(c)


def composition_counterexample(a: float, u, probe: ss.CullenProbe,
                               order: int = ss.DEFAULT_ORDER) -> CompositionResult:
    a = float(a)
    if abs(a) > 0.9:
        raise BadParameter(f"|a| must be at most 0.9, got {a!r}")
    u = check_unit(u)
    coeffs = composition_series(a, order)

    def composed(q):
        return ss.eval_series(coeffs, qmul(q, u))

    return CompositionResult(coeffs, ss.cullen_residual(composed, probe))
