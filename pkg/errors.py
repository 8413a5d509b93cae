"""
Exception hierarchy shared by the engine and the command-line tools.
"""


class ToricError(Exception):
    """Base class for every error raised by the engine."""


class DimensionError(ToricError, ValueError):
    """Raised when shapes or dimensions do not line up."""


class SingularMatrixError(ToricError, ArithmeticError):
    """Raised when a basis is linearly dependent."""


class NotUnimodularError(ToricError, ArithmeticError):
    """Raised when a basis does not span the lattice (|det| != 1)."""


class InvalidFanError(ToricError, ValueError):
    """Raised when rays or cones do not describe a smooth fan."""


class IncompleteFanError(InvalidFanError):
    """Raised when a smooth fan does not cover the whole space."""


class NotAWallError(ToricError, ValueError):
    """Raised when a cone is not a codimension-one face shared by two maximal cones."""


class SurfaceTypeError(ToricError, ValueError):
    """Raised when a codimension-two cone does not cut out a Hirzebruch surface."""


class ParameterError(ToricError, ValueError):
    """Raised when catalog parameters violate their invariants."""


class ConsistencyError(ToricError, AssertionError):
    """Raised when two independent computations that must agree do not."""
