"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class CircumaError(Exception):
    """Base class; the CLI maps these to exit code 2."""


class InvalidDomain(CircumaError):
    pass


class PointOutsideDomain(CircumaError):
    pass


class EmptyWindow(CircumaError):
    pass


class Disconnected(CircumaError):
    pass


class InfinityInDomain(CircumaError):
    pass


class CurveExitsDomain(CircumaError):
    pass


class PreconditionFailed(CircumaError):
    pass


class LargeComponentHit(CircumaError):
    def __init__(self, message: str, components=()):
        super().__init__(message)
        self.components = tuple(components)


class DegenerateComponent(CircumaError):
    pass


class BadThresholds(CircumaError):
    pass


class NotStarlike(CircumaError):
    def __init__(self, message: str, component: int | None = None, sweep: int | None = None):
        super().__init__(message)
        self.component = component
        self.sweep = sweep


class FitResidualTooLarge(CircumaError):
    pass


class DegenerateAtInfinity(CircumaError):
    pass


class NoConvergence(CircumaError):
    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class EmptySet(CircumaError):
    pass


class BadRadii(CircumaError):
    pass


class ComplementNotContained(CircumaError):
    pass


class CaseUndetermined(CircumaError):
    pass
