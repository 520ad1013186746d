"""Exception hierarchy shared by every service module."""


class ExactWKBError(Exception):
    """Base class for all errors raised by the toolkit."""


class ConfigError(ExactWKBError):
    """Invalid run configuration or settings value."""


class AlgebraError(ExactWKBError):
    """Failure inside the exact differential-field tower."""


class TowerSpecError(AlgebraError):
    """A generator spec is malformed or references a later generator."""


class DerivationError(AlgebraError):
    """A derivative was requested for a variable with no registered rule."""


class TowerZeroDivisionError(AlgebraError, ZeroDivisionError):
    """Division by an element that normalizes to zero."""


class PrimitiveError(AlgebraError):
    """Rebinding an already bound primitive, or inverting a primitive symbol."""


class PrecisionError(ExactWKBError):
    """A series coefficient was requested beyond its truncation order."""


class NumericsError(ExactWKBError):
    """Failure in numeric evaluation, continuation or quadrature."""


class BranchError(NumericsError):
    """Root collision or loss of sheet while tracking branches."""


class ClearanceError(NumericsError):
    """Evaluation requested inside the clearance disc of a singular point."""


class QuadratureError(NumericsError):
    """Adaptive quadrature did not reach the requested tolerance."""


class PadeDefectError(NumericsError):
    """A Padé pole lies on (or next to) the Laplace integration ray."""


class GeometryError(ExactWKBError):
    """Stokes curve tracing failed."""


class ConnectionInconsistencyError(ExactWKBError):
    """The Stokes multiplier equations do not determine a unique ratio."""
