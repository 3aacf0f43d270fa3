"""Exception types shared across the package."""


class DiracRedError(Exception):
    """Base class for all errors raised by diracred."""


# -- expressions ------------------------------------------------------------

class ExprSyntaxError(DiracRedError, ValueError):
    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        pointer = ""
        if text:
            pointer = f"\n  {text}\n  {' ' * position}^"
        super().__init__(f"{message} at position {position}{pointer}")


class UnknownCoordinate(DiracRedError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown coordinate"


class DivisionByZeroPolynomial(DiracRedError, ZeroDivisionError):
    pass


class ChartMismatch(DiracRedError, ValueError):
    pass


class ZeroDenominatorAfterSubstitution(DiracRedError, ZeroDivisionError):
    pass


class NonNormalizedWeight(DiracRedError, ValueError):
    pass


class IrrationalIntegral(DiracRedError, ValueError):
    """The integral contains a non-cancelling power of pi."""


class NonPolynomialIntegrand(DiracRedError, ValueError):
    pass


# -- distributions and structures -------------------------------------------

class DenominatorVanishes(DiracRedError, ZeroDivisionError):
    def __init__(self, message, generator=None, point=None):
        self.generator = generator
        self.point = point
        super().__init__(message)


class NotASubbundle(DiracRedError, ValueError):
    pass


class InternalInconsistency(DiracRedError, RuntimeError):
    pass


class NotIsotropic(DiracRedError, ValueError):
    def __init__(self, message, pair=None, residual=None):
        self.pair = pair
        self.residual = residual
        super().__init__(message)


class RankDeficient(DiracRedError, ValueError):
    def __init__(self, message, point=None):
        self.point = point
        super().__init__(message)


# -- actions ----------------------------------------------------------------

class GeneratorMismatch(DiracRedError, ValueError):
    pass


class NotInvariant(DiracRedError, ValueError):
    pass


class UnsupportedAction(DiracRedError, ValueError):
    pass


# -- reduction ---------------------------------------------------------------

class NotDescending(DiracRedError, ValueError):
    pass


class NotExpressibleAtBound(DiracRedError, ValueError):
    pass


class PresentationMismatch(DiracRedError, ValueError):
    pass


class NotTangentToStratum(DiracRedError, ValueError):
    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class RankDeficientOnStratum(DiracRedError, ValueError):
    pass


class MembershipFailure(DiracRedError, RuntimeError):
    pass


# -- scenes and cli ------------------------------------------------------------

class UnknownScene(DiracRedError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown scene"


class SceneParseError(DiracRedError, ValueError):
    def __init__(self, message, line=0, column=0):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


ParseError = SceneParseError


class ValidationError(DiracRedError, ValueError):
    def __init__(self, message, invariant=None):
        self.invariant = invariant
        super().__init__(message)


class DenominatorNearZero(DiracRedError, ArithmeticError):
    def __init__(self, message, last_point=None, trajectory=None):
        self.last_point = last_point
        self.trajectory = trajectory
        super().__init__(message)
