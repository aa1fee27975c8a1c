"""Truncated power series with right quaternionic coefficients.

A :class:`SliceSeries` stores ``a_0 .. a_N`` for ``f(q) = sum q^n a_n``.  The
*-product is the ordered coefficient convolution, which is what makes the
space of such series a real algebra; pointwise products of slice regular
functions are in general not slice regular.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import BadParameter, DomainError, DomainWarning, NotInvertibleAtZero
from .quaternion import TOL_ZERO, Quaternion, check_imaginary_unit, conj_array, hamilton, qmul

DEFAULT_ORDER = 80


class SliceSeries:
    """Immutable truncated series ``sum_{n<=N} q^n a_n``."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable):
        arr = np.array([tuple(Quaternion.coerce(c)) for c in coeffs], dtype=float)
        if arr.size == 0:
            raise BadParameter("a series needs at least one coefficient")
        self._init_array(arr)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "SliceSeries":
        arr = np.array(arr, dtype=float).reshape(-1, 4)
        if arr.shape[0] == 0:
            raise BadParameter("a series needs at least one coefficient")
        obj = cls.__new__(cls)
        obj._init_array(arr)
        return obj

    def _init_array(self, arr: np.ndarray) -> None:
        if not np.all(np.isfinite(arr)):
            raise BadParameter("series coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "_c", arr)

    @property
    def coeffs(self) -> np.ndarray:
        """Read-only ``(N+1, 4)`` coefficient array."""
        return self._c

    @property
    def order(self) -> int:
        return self._c.shape[0] - 1

    def __len__(self):
        return self._c.shape[0]

    def __getitem__(self, n: int) -> Quaternion:
        return Quaternion(*self._c[n])

    def __call__(self, q) -> Quaternion:
        return eval_series(self, q)

    def __repr__(self):
        return f"SliceSeries(order={self.order})"

    def truncate(self, order: int) -> "SliceSeries":
        if order >= self.order:
            return self.pad(order)
        return SliceSeries.from_array(self._c[: order + 1])

    def pad(self, order: int) -> "SliceSeries":
        if order <= self.order:
            return self
        out = np.zeros((order + 1, 4))
        out[: len(self)] = self._c
        return SliceSeries.from_array(out)

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": self._c.tolist()}

    @classmethod
    def from_json(cls, obj) -> "SliceSeries":
        try:
            order = int(obj["order"])
            coeffs = [Quaternion.from_json(c) for c in obj["coeffs"]]
        except (KeyError, TypeError) as exc:
            raise BadParameter(f"malformed series JSON: {exc}") from None
        if len(coeffs) != order + 1:
            raise BadParameter(f"series JSON has {len(coeffs)} coefficients for order {order}")
        return cls(coeffs)


def unit_series(order: int = 0) -> SliceSeries:
    arr = np.zeros((order + 1, 4))
    arr[0, 0] = 1.0
    return SliceSeries.from_array(arr)


def linear_series(a, b) -> SliceSeries:
    """The map ``q -> q a + b`` as the order-1 series ``[b, a]``."""
    return SliceSeries([Quaternion.coerce(b), Quaternion.coerce(a)])


def star_product(f: SliceSeries, g: SliceSeries, order: int | None = None) -> SliceSeries:
    """Regular product: ``c_n = sum_k a_k b_{n-k}`` with f-coefficients on the left.

    The result has order ``f.order + g.order`` unless ``order`` truncates it.
    """
    n_out = f.order + g.order if order is None else order
    out = np.zeros((n_out + 1, 4))
    gc = g.coeffs
    for k in range(min(len(f), n_out + 1)):
        m = min(len(gc), n_out + 1 - k)
        out[k : k + m] += hamilton(f.coeffs[k], gc[:m])
    return SliceSeries.from_array(out)


def regular_conjugate(f: SliceSeries) -> SliceSeries:
    return SliceSeries.from_array(conj_array(f.coeffs))


def symmetrization(f: SliceSeries) -> SliceSeries:
    return star_product(f, regular_conjugate(f))


def _real_part_checked(s: SliceSeries) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(s.coeffs))))
    if np.max(np.abs(s.coeffs[:, 1:])) > 1e-10 * scale:
        raise BadParameter("symmetrization is not real; input coefficients are not finite quaternions?")
    return s.coeffs[:, 0].copy()


def real_series_inverse(s: np.ndarray, order: int) -> np.ndarray:
    """Coefficients of ``1 / s(x)`` about 0 up to ``x^order`` (recursive division)."""
    s = np.asarray(s, dtype=float)
    if abs(s[0]) <= TOL_ZERO:
        raise NotInvertibleAtZero("series vanishes at the origin")
    deg = len(s) - 1
    r = np.zeros(order + 1)
    r[0] = 1.0 / s[0]
    for n in range(1, order + 1):
        m = min(n, deg)
        r[n] = -np.dot(s[1 : m + 1], r[n - m : n][::-1]) / s[0]
    return r


def _effective_degree(s: np.ndarray) -> int:
    scale = float(np.max(np.abs(s)))
    deg = len(s) - 1
    while deg > 0 and abs(s[deg]) <= 1e-15 * scale:
        deg -= 1
    return deg


def symmetrization_roots(s: np.ndarray) -> list[complex]:
    """Roots of a real polynomial of degree <= 2 (empty for constants)."""
    deg = _effective_degree(s)
    if deg == 0:
        return []
    if deg == 1:
        return [complex(-s[0] / s[1])]
    if deg == 2:
        c, b, a = s[0], s[1], s[2]
        disc = cmath.sqrt(b * b - 4 * a * c)
        # pick the sign that avoids cancellation, then use Vieta for the other root
        t = -0.5 * (b + math.copysign(1.0, b) * disc) if b != 0 else -0.5 * disc
        if t == 0:
            return [0j, 0j]
        return [t / a, c / t]
    raise BadParameter("analytic root check is only available for degree <= 2")


def regular_reciprocal(f: SliceSeries, out_order: int = DEFAULT_ORDER) -> SliceSeries:
    """``f^{-*} = (1/f^s) f^c`` truncated at ``out_order``.

    ``1/f^s`` is expanded as a real series about 0; since its coefficients are
    real it commutes with everything and the final product is an ordinary
    convolution.  For symmetrizations of degree <= 2 the roots are checked and
    a :class:`DomainWarning` is emitted when one lies in the closed unit ball,
    because the expansion then does not represent ``f^{-*}`` on all of B.
    """
    if out_order < 0:
        raise BadParameter("out_order must be non-negative")
    s = _real_part_checked(symmetrization(f))
    if abs(s[0]) <= TOL_ZERO:
        raise NotInvertibleAtZero("f^s(0) = |f(0)|^2 vanishes")
    if _effective_degree(s) <= 2:
        bad = [z for z in symmetrization_roots(s) if abs(z) <= 1.0]
        if bad:
            warnings.warn(
                f"symmetrization has roots of modulus {[abs(z) for z in bad]} <= 1",
                DomainWarning,
                stacklevel=2,
            )
    r = real_series_inverse(s, out_order)
    fc = regular_conjugate(f).coeffs
    out = np.zeros((out_order + 1, 4))
    for k in range(min(len(fc), out_order + 1)):
        out[k:] += np.outer(r[: out_order + 1 - k], fc[k])
    return SliceSeries.from_array(out)


def eval_series(f: SliceSeries, q) -> Quaternion:
    """Horner evaluation of ``sum q^n a_n``; q multiplies from the left."""
    q = Quaternion.coerce(q)
    c = f.coeffs
    acc = Quaternion(*c[-1])
    for n in range(len(c) - 2, -1, -1):
        acc = qmul(q, acc) + Quaternion(*c[n])
    return acc


@dataclass(frozen=True)
class CullenProbe:
    """Point ``x + I y`` on the slice of ``I`` with a difference step ``h``."""

    I: Quaternion
    x: float
    y: float
    h: float = 1e-4

    def __post_init__(self):
        object.__setattr__(self, "I", check_imaginary_unit(self.I))
        if not 0.0 < self.h < 1e-2:
            raise BadParameter(f"probe step h must lie in (0, 1e-2), got {self.h!r}")
        if self.x * self.x + self.y * self.y >= 1.0:
            raise BadParameter("probe point must lie in the unit ball")

    def with_step(self, h: float) -> "CullenProbe":
        return CullenProbe(self.I, self.x, self.y, h)

    def point(self) -> Quaternion:
        return Quaternion(self.x) + self.I * self.y


def cullen_residual(fn: Callable[[Quaternion], Quaternion], probe: CullenProbe) -> float:
    """``|(d/dx + I d/dy) f(x + I y) / 2|`` by central differences of step h.

    For slice regular ``fn`` this is the O(h^2) truncation error plus roundoff;
    for maps that are not slice regular it tends to a positive limit.
    """
    I, x, y, h = probe.I, probe.x, probe.y, probe.h
    reach = max(math.hypot(abs(x) + h, y), math.hypot(x, abs(y) + h))
    if reach >= 1.0:
        raise DomainError(f"difference stencil reaches |q| = {reach:.6g} outside the unit ball")

    def at(s, t):
        return Quaternion.coerce(fn(Quaternion(s) + I * t))

    dx = (at(x + h, y) - at(x - h, y)) / (2.0 * h)
    dy = (at(x, y + h) - at(x, y - h)) / (2.0 * h)
    return ((dx + qmul(I, dy)) * 0.5).norm()
