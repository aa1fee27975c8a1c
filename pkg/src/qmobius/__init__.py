"""Quaternionic Moebius transformations of the unit ball, classical and slice regular."""
from .classical import ClassicalMoebius, classical_eval, pointwise_equal
from .errors import (
    BadParameter,
    DomainError,
    DomainWarning,
    InconsistentFiber,
    NoConvergence,
    NotInGroup,
    NotInvertibleAtZero,
    QMobiusError,
)
from .groups import MatH2, Sp11Element, boost, random_sp11
from .quaternion import Quaternion, make_rng, random_quat
from .regular import RegularMoebius, lift_matrix, projection, regular_of_matrix
from .series import SliceSeries, star_product

__all__ = [
    "BadParameter",
    "ClassicalMoebius",
    "DomainError",
    "DomainWarning",
    "InconsistentFiber",
    "MatH2",
    "NoConvergence",
    "NotInGroup",
    "NotInvertibleAtZero",
    "QMobiusError",
    "Quaternion",
    "RegularMoebius",
    "SliceSeries",
    "Sp11Element",
    "boost",
    "classical_eval",
    "lift_matrix",
    "make_rng",
    "pointwise_equal",
    "projection",
    "random_quat",
    "random_sp11",
    "regular_of_matrix",
    "star_product",
]
