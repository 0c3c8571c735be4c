"""Exception types raised across the package."""


class EmmsError(Exception):
    """Base class for every error raised by this package."""


class InstanceError(EmmsError, ValueError):
    pass


class NegativeValue(InstanceError):
    pass


class UnnormalizedWeights(InstanceError):
    pass


class DimensionMismatch(InstanceError):
    pass


class GeneralFormUnsupported(EmmsError):
    """The operation is only defined for the network externalities model."""


class NotABijection(EmmsError, ValueError):
    pass


class EnumerationCapExceeded(EmmsError):
    pass


class SearchCapExceeded(EmmsError):
    pass


class BadEpsilon(EmmsError, ValueError):
    pass


class BadParameters(EmmsError, ValueError):
    pass


class WrongAgentCount(EmmsError, ValueError):
    pass


class InvariantBroken(EmmsError, AssertionError):
    """A proven structural guarantee failed at runtime.

    This points at a bug in the implementation, never at bad input.
    """


class ParseError(EmmsError, ValueError):
    pass


class BadConfig(EmmsError, ValueError):
    pass
