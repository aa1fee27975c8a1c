"""Double-precision quaternion algebra.

Quaternions are immutable 4-tuples ``(w, x, y, z)`` standing for
``w + x i + y j + z k``.  Besides the scalar :class:`Quaternion` type the
module provides vectorised helpers over ``(..., 4)`` float arrays, which the
series and matrix code use for their inner loops.
"""
from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BadParameter

TOL_UNIT = 1e-10
TOL_ZERO = 1e-300


class Quaternion(NamedTuple):
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def coerce(cls, value) -> "Quaternion":
        """Accept a Quaternion, a real number or a length-4 sequence."""
        if isinstance(value, Quaternion):
            return value
        if isinstance(value, (int, float, np.floating, np.integer)):
            return cls(float(value))
        comps = [float(c) for c in value]
        if len(comps) != 4:
            raise BadParameter(f"expected 4 quaternion components, got {len(comps)}")
        if not all(math.isfinite(c) for c in comps):
            raise BadParameter("quaternion components must be finite")
        return cls(*comps)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        o = _coerce_operand(other)
        if o is NotImplemented:
            return NotImplemented
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce_operand(other)
        if o is NotImplemented:
            return NotImplemented
        return Quaternion(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)

    def __rsub__(self, other):
        o = _coerce_operand(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return qmul(self, other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            s = float(other)
            return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)
        return NotImplemented

    def __rmul__(self, other):
        # only reached for real scalars, which commute
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            s = float(other)
            return Quaternion(self.w / s, self.x / s, self.y / s, self.z / s)
        return NotImplemented

    def __abs__(self):
        return self.norm()

    # -- basic maps ------------------------------------------------------
    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def inv(self) -> "Quaternion":
        n2 = self.norm2()
        if n2 <= TOL_ZERO:
            raise ZeroDivisionError("quaternion inverse of (numerically) zero")
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> "Quaternion":
        return Quaternion(0.0, self.x, self.y, self.z)

    def to_json(self) -> list[float]:
        return [float(c) + 0.0 for c in self]  # + 0.0 drops negative zeros

    @classmethod
    def from_json(cls, obj) -> "Quaternion":
        if not isinstance(obj, (list, tuple)):
            raise BadParameter(f"quaternion JSON must be an array [w, x, y, z], got {obj!r}")
        return cls.coerce(obj)

    def __repr__(self):
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


def _coerce_operand(value):
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, (int, float, np.floating, np.integer)):
        return Quaternion(float(value))
    return NotImplemented


ONE = Quaternion(1.0)
ZERO = Quaternion()
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def qmul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product ``p q``."""
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return Quaternion(
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    )


def qconj_inv_norm(q: Quaternion) -> tuple[Quaternion, Quaternion, float]:
    """Return ``(conj(q), q^{-1}, |q|)``; raises ZeroDivisionError for q = 0."""
    q = Quaternion.coerce(q)
    return q.conj(), q.inv(), q.norm()


def qdot(p: Quaternion, q: Quaternion) -> float:
    """Euclidean inner product of the coordinate vectors in R^4."""
    return p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z


def qexp(w: Quaternion) -> Quaternion:
    w = Quaternion.coerce(w)
    scale = math.exp(w.w)
    theta = math.sqrt(w.x * w.x + w.y * w.y + w.z * w.z)
    if theta < 1e-12:
        # sin(t)/t = 1 - t^2/6 + ..., exact to double precision here
        s = 1.0 - theta * theta / 6.0
    else:
        s = math.sin(theta) / theta
    return Quaternion(scale * math.cos(theta), scale * s * w.x, scale * s * w.y, scale * s * w.z)


class SliceCoords(NamedTuple):
    """``q = x + I y`` with ``y >= 0`` and ``I`` an imaginary unit."""

    x: float
    y: float
    I: Quaternion

    def point(self) -> Quaternion:
        return Quaternion(self.x) + self.I * self.y


def to_slice(q: Quaternion) -> SliceCoords:
    """Split ``q`` into its slice coordinates.

    Real inputs lie on every slice; they are assigned ``I = i``.
    """
    q = Quaternion.coerce(q)
    y = math.sqrt(q.x * q.x + q.y * q.y + q.z * q.z)
    if y <= TOL_ZERO:
        return SliceCoords(q.w, 0.0, I)
    return SliceCoords(q.w, y, Quaternion(0.0, q.x / y, q.y / y, q.z / y))


def is_unit(q: Quaternion, tol: float = TOL_UNIT) -> bool:
    return abs(q.norm() - 1.0) <= tol


def is_imaginary_unit(q: Quaternion, tol: float = TOL_UNIT) -> bool:
    return abs(q.w) <= tol and abs(q.norm() - 1.0) <= tol


def check_unit(q, name: str = "u") -> Quaternion:
    q = Quaternion.coerce(q)
    if not is_unit(q):
        raise BadParameter(f"{name} must be a unit quaternion, |{name}| = {q.norm()!r}")
    return q


def check_imaginary_unit(q, name: str = "I") -> Quaternion:
    q = Quaternion.coerce(q)
    if not is_imaginary_unit(q):
        raise BadParameter(f"{name} must satisfy {name}^2 = -1, got {q!r}")
    return q


# -- randomness -------------------------------------------------------------

def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator keyed by ``seed`` and a stream path.

    Distinct stream paths give statistically independent generators, so a
    failing trial can be replayed from ``(seed, suite, trial)`` alone.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


def random_quat(rng, kind: str = "unit", rmax: float = 0.9) -> Quaternion:
    """Draw a quaternion.

    ``rng`` is a Generator or an integer seed.  ``kind`` is ``"unit"``
    (uniform on S^3), ``"ball"`` (uniform in the ball of radius ``rmax``) or
    ``"imaginary_unit"`` (uniform on the sphere of imaginary units).
    """
    if not isinstance(rng, np.random.Generator):
        rng = make_rng(rng)
    if kind == "unit":
        v = rng.standard_normal(4)
        return Quaternion(*(v / np.linalg.norm(v)))
    if kind == "ball":
        if not 0.0 < rmax < 1.0:
            raise BadParameter(f"rmax must lie in (0, 1), got {rmax!r}")
        v = rng.standard_normal(4)
        r = rmax * rng.random() ** 0.25
        return Quaternion(*(r * v / np.linalg.norm(v)))
    if kind == "imaginary_unit":
        v = rng.standard_normal(3)
        v = v / np.linalg.norm(v)
        return Quaternion(0.0, *v)
    raise BadParameter(f"unknown sample kind {kind!r}")


# -- array helpers ------------------------------------------------------------

def as_array(qs: Sequence) -> np.ndarray:
    return np.asarray([tuple(Quaternion.coerce(q)) for q in qs], dtype=float).reshape(-1, 4)


def hamilton(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Broadcast Hamilton product over arrays with trailing axis of length 4."""
    a1, b1, c1, d1 = np.moveaxis(p, -1, 0)
    a2, b2, c2, d2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def conj_array(q: np.ndarray) -> np.ndarray:
    return q * np.array([1.0, -1.0, -1.0, -1.0])
