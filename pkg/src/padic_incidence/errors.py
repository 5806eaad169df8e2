"""Exception hierarchy shared by all modules."""


class PadicError(Exception):
    """Base class for every error raised by this package."""


class NotAUnit(PadicError, ArithmeticError):
    pass


class RingMismatch(PadicError, ValueError):
    pass


class BadScale(PadicError, ValueError):
    pass


class TooLarge(PadicError, ValueError):
    pass


class LinesIntersect(PadicError, ValueError):
    pass


class NotInCube(PadicError, ValueError):
    pass


class EmptyIntersection(PadicError, ValueError):
    pass


class WeightedLines(PadicError, ValueError):
    pass


class NotASubmodule(PadicError, ValueError):
    pass


class SpacingViolated(PadicError, ValueError):
    pass


class NotSeparated(PadicError, ValueError):
    pass


class InvalidGrid(PadicError, ValueError):
    pass


class GNotInCube(PadicError, AssertionError):
    """Raised if a grid point escapes the common cube of the base points.

    Unreachable for valid input; seeing it means a geometry bug.
    """


class NotPrimeField(PadicError, ValueError):
    pass


class DegenerateBase(PadicError, ValueError):
    pass


class ConfigError(PadicError, ValueError):
    pass


class SchemaError(PadicError, ValueError):
    pass
