"""Exception hierarchy shared by all modules."""


class MaxMinError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(MaxMinError, ValueError):
    """An argument refers to unknown elements or is malformed."""


class InvalidInstanceError(InvalidInputError):
    """An instance violates its structural invariants (bad ids, T <= 0, ...)."""


class ParameterError(MaxMinError, ValueError):
    """Solver parameters fall outside their admissible range."""


class AugmentationFailed(MaxMinError):
    """A matroid augmentation could not reach the requested size."""


class InvalidStateError(MaxMinError):
    """Preconditions of a state-dependent operation do not hold."""


class UnsupportedScaleError(MaxMinError):
    """The input exceeds the size guard of an enumeration-based routine."""


class InternalError(MaxMinError, RuntimeError):
    """A guarantee that should hold by construction was violated."""
