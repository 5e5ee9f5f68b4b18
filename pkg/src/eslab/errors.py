"""Exception types shared across the package."""


class EslabError(Exception):
    """Base class for all package errors."""


class NonMonomialError(EslabError):
    """A graded scalar with several pi-grades has no graded inverse."""


class WeightMismatchError(EslabError):
    """Operands live in modules of incompatible weights or twists."""


class NegativeDetFractionalPowerError(EslabError):
    """det(g) <= 0 while the twist exponent is not an integer."""


class DetRootInexactError(EslabError):
    """|det(g)|^(p/q) is irrational, so the exact action is undefined."""


class UnspecifiedSignStructureError(EslabError):
    """The orientation-reversing action needs a chosen +/- structure."""


class NotInDiscreteSeriesError(EslabError):
    """Operation is only defined on vectors supported on |t| >= k."""


class NonPositiveDetError(EslabError):
    """Iwasawa coordinates require a positive determinant."""


class StepTooLargeError(EslabError):
    """Finite-difference extrapolation did not converge at this step."""


class NonIntegralExpansionError(EslabError):
    """Eta exponents do not produce an integral-weight q-series."""


class InsufficientTermsError(EslabError):
    """The stored expansion is too short for the requested operation."""


class AccuracyUnreachableError(EslabError):
    """Certified error bound cannot be pushed below the target.

    Carries ``required_terms`` when a longer expansion would fix it.
    """

    def __init__(self, message, required_terms=None):
        super().__init__(message)
        self.required_terms = required_terms


class NonCuspidalAtCuspError(EslabError):
    """Paths may end at a cusp only for cuspidal expansions."""
