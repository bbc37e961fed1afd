"""Exception hierarchy shared by all modules."""


class ChermnykhError(Exception):
    """Base class for every error raised by the package."""


class ParameterOutOfRange(ChermnykhError, ValueError):
    pass


class NonPositiveInput(ParameterOutOfRange):
    pass


class NegativeFactor(ParameterOutOfRange):
    """Radiation force exceeds gravity, so q1 would be negative."""


class SingularityAtPrimary(ChermnykhError, ZeroDivisionError):
    """Evaluation point lies inside the guard radius of a singular source."""


class NegativeRadicand(ChermnykhError, ValueError):
    pass


class DegenerateTriangular(ChermnykhError):
    """The triangular equilibria do not exist for these parameters."""


class NoConvergence(ChermnykhError):
    pass


class ConvergedToPrimary(NoConvergence):
    pass


class RootNotBracketed(ChermnykhError):
    pass


class NoSignChange(ChermnykhError):
    """Stability does not change over the searched mass-ratio range."""


class NotStable(ChermnykhError):
    pass


class DegenerateFrequencies(ChermnykhError):
    pass


class GaugeUnreachable(ChermnykhError):
    """An eigenvector has zero x-component, so J11 = J12 = 0 cannot be imposed."""


class SignatureMismatch(ChermnykhError):
    """Mode energies do not have the signs required by w1*I1 - w2*I2."""


class SingularityEncountered(ChermnykhError):
    """Integration entered a singularity guard.

    ``time`` is the time of the last accepted step and ``trajectory`` holds
    the samples collected before the encounter.
    """

    def __init__(self, message, time, trajectory=None):
        super().__init__(message)
        self.time = time
        self.trajectory = trajectory


class StepUnderflow(ChermnykhError):
    pass


class ConfigError(ChermnykhError):
    pass
