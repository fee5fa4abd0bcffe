"""Exception hierarchy shared by every cslacc module."""


class CslError(Exception):
    """Base class for all library errors."""


class ConfigError(CslError, ValueError):
    """An experiment or scenario configuration is invalid."""


# numerics
class NonHermitianInput(CslError, ValueError):
    pass


class NegativeEigenvalue(CslError, ValueError):
    pass


class ConvergenceFailure(CslError, ArithmeticError):
    """An iterative factorisation hit its sweep cap.

    ``condition`` carries a cheap condition-number estimate of the input so
    callers can tell ill-conditioning from a genuine bug.
    """

    def __init__(self, message, condition=float("nan")):
        super().__init__(message)
        self.condition = condition


class DimensionOverflow(CslError, ValueError):
    pass


# scenario
class InvalidRho(ConfigError):
    pass


class BandOverflow(ConfigError):
    pass


# sampler
class IndivisibleRatio(ConfigError):
    pass


class DimensionMismatch(CslError, ValueError):
    pass


# csl
class IndexOutOfRange(CslError, IndexError):
    pass


class EmptySegments(CslError, ValueError):
    pass


class NoShiftAvailable(CslError, ValueError):
    pass


class DegenerateSpectrum(CslError, ArithmeticError):
    pass


class ReshapeMismatch(CslError, ValueError):
    pass


# theory
class RhoAtUnity(CslError, ValueError):
    pass


class RhoZero(CslError, ValueError):
    pass


class ShiftOutOfRange(CslError, ValueError):
    pass


# sensing
class SingularProjection(CslError, ArithmeticError):
    pass
