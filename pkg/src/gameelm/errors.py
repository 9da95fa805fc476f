"""Exception types raised across the package."""


class GameElmError(Exception):
    pass


class DimensionMismatch(GameElmError, ValueError):
    pass


class NonFiniteIterate(GameElmError, ArithmeticError):
    pass


class UnknownVariant(GameElmError, KeyError):
    pass


class NoConvergence(GameElmError, RuntimeError):
    pass


class ZeroNormal(GameElmError, ValueError):
    pass


class SingularSystem(GameElmError, ArithmeticError):
    pass


class ConstantTarget(GameElmError, ValueError):
    pass


class InvalidK(GameElmError, ValueError):
    pass


class InvalidFraction(GameElmError, ValueError):
    pass


class NoNumericRows(GameElmError, ValueError):
    pass


class UnknownColumn(GameElmError, KeyError):
    pass


class ColumnMismatch(GameElmError, ValueError):
    pass


class ConfigError(GameElmError, ValueError):
    pass
