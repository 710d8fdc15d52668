"""Exception hierarchy for magcas."""


class MagcasError(Exception):
    """Base class for all magcas errors."""


class ToleranceNotMet(MagcasError):
    """Quadrature refinement limit reached before tolerances were satisfied."""


class NonFiniteIntegrand(MagcasError):
    """Integrand returned NaN or infinity at a quadrature node."""


class NonPositiveSquareBracket(MagcasError):
    """The square-bracket term A_sigma(k) of the ferrimagnet dispersion is <= 0."""


class ComplexFrequency(MagcasError):
    """Second square-root argument of the ferrimagnet dispersion is negative.

    Signals instability of the assumed ground state for the given parameters.
    """


class NotApplicable(MagcasError):
    """Operation invoked outside its domain of validity (e.g. gapped asymptote)."""


class UnknownPreset(MagcasError):
    """Requested material preset name is not registered."""


class ParseError(MagcasError):
    """Material config file could not be parsed."""


class InvariantViolation(MagcasError):
    """A parameter bundle violates a construction invariant."""


class UnknownField(MagcasError):
    """Material config file contains an unrecognized key."""


class UnknownFigure(MagcasError):
    """Requested figure id has no reproduction bundle."""
