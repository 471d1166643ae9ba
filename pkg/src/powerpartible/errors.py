"""Exception hierarchy shared by the algebra layer and the verification harness."""


class PowerPartibleError(Exception):
    """Base class for every error raised by this package."""


class DenominatorDividesModulus(PowerPartibleError, ZeroDivisionError):
    pass


class NotPrime(PowerPartibleError, ValueError):
    pass


class ParseError(PowerPartibleError, ValueError):
    pass


class IndexOutOfRange(PowerPartibleError, IndexError):
    pass


class IndicialIdenticallyZero(PowerPartibleError):
    pass


class NotPartible(PowerPartibleError):
    def __init__(self, message, reason="no-gamma"):
        super().__init__(message)
        self.reason = reason


class AmbiguousGamma(PowerPartibleError):
    pass


class NotAnnihilated(PowerPartibleError):
    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class NonIntegralStep(PowerPartibleError, ArithmeticError):
    pass


class SingularRecurrence(PowerPartibleError, ZeroDivisionError):
    pass


class ReductionError(PowerPartibleError):
    """Internal consistency failure of the reduction engine."""


class LeadingCoefficientVanishes(ReductionError):
    pass


class ParityViolation(ReductionError):
    pass


class NonMonomialDenominator(ReductionError):
    pass


class DegenerateSpecialization(PowerPartibleError, ValueError):
    pass


class HypothesisViolated(PowerPartibleError, ValueError):
    pass


class EtaDividesModulus(PowerPartibleError, ZeroDivisionError):
    pass
