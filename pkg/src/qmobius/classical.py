"""Classical quaternionic Moebius transformations ``F_A(q) = (qc + d)^{-1}(qa + b)``.

``A -> F_A`` is an anti-homomorphism, ``F_{AB} = F_B o F_A``, with kernel
``{+-I2}``.  Maps are compared by sampling, see :func:`pointwise_equal`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import qmc

from .errors import DomainError
from .groups import TOL_GRP, MatH2, Sp11Element, mat_mul, sp11_inverse
from .quaternion import ZERO, Quaternion, qmul

TOL_EQ = 1e-9
TOL_BALL = 1e-12
N_SAMPLES = 32


@dataclass(frozen=True)
class ClassicalMoebius:
    A: Sp11Element

    def __post_init__(self):
        object.__setattr__(self, "A", Sp11Element.wrap(self.A))

    def __call__(self, q) -> Quaternion:
        return classical_eval(self, q)


def classical_eval(F: ClassicalMoebius, q) -> Quaternion:
    q = Quaternion.coerce(q)
    if q.norm() >= 1.0:
        raise DomainError(f"|q| = {q.norm():.6g} is not inside the unit ball")
    A = F.A
    num = qmul(q, A.m00) + A.m10
    den = qmul(q, A.m01) + A.m11
    return qmul(den.inv(), num)


def classical_compose(F: ClassicalMoebius, G: ClassicalMoebius) -> ClassicalMoebius:
    """The map ``q -> G(F(q))``, i.e. the transformation of the product ``A_F A_G``."""
    return ClassicalMoebius(Sp11Element.wrap(mat_mul(F.A, G.A)))


def classical_inverse(F: ClassicalMoebius) -> ClassicalMoebius:
    return ClassicalMoebius(sp11_inverse(F.A))


def classical_fixes_origin(F: ClassicalMoebius, tol: float = TOL_GRP) -> bool:
    """True iff A is diagonal with unit diagonal entries."""
    A = F.A
    return (A.m01.norm() <= tol and A.m10.norm() <= tol
            and abs(A.m00.norm() - 1.0) <= tol and abs(A.m11.norm() - 1.0) <= tol)


@lru_cache(maxsize=None)
def sample_points(n: int = N_SAMPLES, radius: float = 0.8) -> tuple[Quaternion, ...]:
    """Deterministic quasi-random points of the closed ``radius``-ball (Halton, rejection)."""
    halton = qmc.Halton(d=4, scramble=False)
    pts: list[Quaternion] = []
    while len(pts) < n:
        for row in halton.random(4 * n):
            v = (2.0 * row - 1.0) * radius
            if np.dot(v, v) <= radius * radius and np.any(v != 0.0):
                pts.append(Quaternion(*v))
                if len(pts) == n:
                    break
    return tuple(pts)


def max_deviation(f, g, n_samples: int = N_SAMPLES) -> float:
    return max((f(q) - g(q)).norm() for q in sample_points(n_samples))


def pointwise_equal(F: ClassicalMoebius, G: ClassicalMoebius, n_samples: int = N_SAMPLES,
                    tol: float = TOL_EQ) -> bool:
    if n_samples < 8:
        raise ValueError("n_samples must be at least 8")
    return max_deviation(F, G, n_samples) <= tol


def classical_quotient_point(A: MatH2) -> Quaternion:
    """``F_A(0) = d^{-1} b``; constant on cosets ``(Sp(1) x Sp(1)) A``."""
    A = Sp11Element.wrap(A)
    return qmul(A.m11.inv(), A.m10)


def classical_inverse_orbit(F: ClassicalMoebius) -> Quaternion:
    """``F^{-1}(0)``, evaluated as ``F_{A^{-1}}(0)``."""
    return classical_eval(classical_inverse(F), ZERO)
