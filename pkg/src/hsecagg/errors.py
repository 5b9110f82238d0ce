"""Exception hierarchy for the hierarchical secure aggregation simulator."""


class HSAError(Exception):
    pass


class InvalidOperand(HSAError, ZeroDivisionError):
    pass


class SingularMatrix(HSAError):
    pass


class DimensionMismatch(HSAError, ValueError):
    pass


class InfeasibleParameters(HSAError, ValueError):
    pass


class InsufficientField(HSAError, ValueError):
    pass


class SearchExhausted(HSAError):
    pass


class CertificationTooLarge(HSAError):
    pass


class EnumerationTooLarge(HSAError):
    pass


class LengthMismatch(HSAError, ValueError):
    pass


class MissingMessage(HSAError, KeyError):
    pass


class NotSurviving(HSAError):
    pass


class TooFewSurvivors(HSAError):
    pass


class InsufficientSymbols(HSAError):
    pass


class SingularDecode(HSAError, AssertionError):
    """The decode submatrix was singular; cannot happen with a certified alpha."""


class ConfigError(HSAError, ValueError):
    pass
