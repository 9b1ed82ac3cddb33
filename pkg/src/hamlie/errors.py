"""Exception hierarchy shared by every module."""


class HamlieError(Exception):
    pass


class NonPrime(HamlieError, ValueError):
    pass


class PrimeTooSmall(HamlieError, ValueError):
    pass


class FieldTooLarge(HamlieError, ValueError):
    pass


class DimensionMismatch(HamlieError, ValueError):
    pass


class ContextMismatch(HamlieError, ValueError):
    pass


class IndexOutOfRange(HamlieError, IndexError):
    pass


class Inconsistent(HamlieError, ArithmeticError):
    """A linear system has no solution."""


class NonNilpotentSubstituent(HamlieError, ValueError):
    pass


class ShapeViolation(HamlieError, AssertionError):
    """A characteristic polynomial of a derivation has support outside p-power exponents."""


class NotInImage(HamlieError, ValueError):
    pass


class NotInH(HamlieError, ValueError):
    pass


class FieldTooSmall(HamlieError, ValueError):
    pass


class NotInvertible(HamlieError, ValueError):
    pass


class NonNilpotentImage(HamlieError, ValueError):
    pass


class PreconditionError(HamlieError, ValueError):
    pass


class BudgetExceeded(HamlieError, RuntimeError):
    pass


class ParseError(HamlieError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
