"""Exception and warning types raised across the package."""


class QMobiusError(Exception):
    """Base class for all package errors."""


class BadParameter(QMobiusError, ValueError):
    pass


class DomainError(QMobiusError, ValueError):
    """A point or stencil lies outside the region where the operation is defined."""


class NotInGroup(QMobiusError, ValueError):
    """A matrix fails the Sp(1,1) membership test."""


class InconsistentFiber(QMobiusError, ValueError):
    pass


class NotInvertibleAtZero(QMobiusError, ZeroDivisionError):
    pass


class NoConvergence(QMobiusError, RuntimeError):
    pass


class DomainWarning(UserWarning):
    """The symmetrization has a root in the closed unit ball."""
