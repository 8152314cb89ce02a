"""Exception types raised across the package."""


class KnotHomError(Exception):
    """Base class for every error raised by knothom."""


class CutoffTooSmall(KnotHomError):
    pass


class Inexact(KnotHomError):
    """A computation needed a degree whose group is only known as a lower bound."""


class DegreeZeroGenerator(KnotHomError):
    pass


class NonIntegralSolution(KnotHomError):
    pass


class WeightBoundExceeded(KnotHomError):
    pass


class NotDivisible(KnotHomError):
    pass


class KnotSyntaxError(KnotHomError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownAtom(KnotHomError):
    pass


class InvalidExpression(KnotHomError):
    """Raised when an operation that requires an admissible tree receives one with violations."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class UnsupportedSymmetry(KnotHomError):
    pass


class UnsupportedClass(KnotHomError):
    pass


class MissingSymmetryData(KnotHomError):
    pass


class ActionOrderMismatch(KnotHomError):
    pass


class InvalidComplex(KnotHomError):
    pass


class CellBudgetExceeded(KnotHomError):
    pass


class OracleUnavailable(KnotHomError):
    """The model has no finite chain-level realisation in the oracle."""
