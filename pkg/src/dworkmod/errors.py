"""Exception hierarchy shared by every layer of the package."""


class DworkError(Exception):
    """Base class for all errors raised by dworkmod."""


class CompositeModulus(DworkError, ValueError):
    pass


class PrecisionExhausted(DworkError, ArithmeticError):
    pass


class ContextMismatch(DworkError, ValueError):
    pass


class DegreeOverflow(DworkError, OverflowError):
    pass


class NotInvertibleDiagnostic(DworkError, ZeroDivisionError):
    pass


class FloorTooShallow(DworkError, ArithmeticError):
    pass


class RankOverflow(DworkError, OverflowError):
    pass


class NotOrdinaryShape(DworkError, ValueError):
    pass


class BudgetExceeded(DworkError, RuntimeError):
    pass


class NonContraction(DworkError, ArithmeticError):
    pass


class GaloisInvarianceViolation(DworkError, ArithmeticError):
    pass


class NonInvertibleFiber(DworkError, ZeroDivisionError):
    pass


class NonTermination(DworkError, ArithmeticError):
    pass


class IntegralityViolation(DworkError, ArithmeticError):
    pass


class NegativeSupport(DworkError, ArithmeticError):
    pass


class UnsupportedDimension(DworkError, NotImplementedError):
    pass


class TruncationUnsound(DworkError, ValueError):
    pass


class NotNormalized(DworkError, ValueError):
    pass


class UnitLost(DworkError, ArithmeticError):
    pass


class NotOrdinaryAtPoint(DworkError, ArithmeticError):
    pass


class UnresolvedOrd(DworkError, ArithmeticError):
    pass


class ParseError(DworkError, ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class ValidationError(DworkError, ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
