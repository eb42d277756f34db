"""Exception types raised across the package."""


class QpfrftError(Exception):
    """Base class for all package errors."""


class LengthError(QpfrftError, ValueError):
    """Signal or register length is incompatible with the operation."""


class NormError(QpfrftError, ValueError):
    """A quantum input is not unit-norm."""


class RegisterError(QpfrftError, ValueError):
    """Unknown register, bad qubit index, or out-of-range register value."""


class MemoryGuardError(QpfrftError, ValueError):
    """Requested layout exceeds the configured qubit budget."""


class ParameterError(QpfrftError, ValueError):
    """Algorithm parameters are infeasible (e.g. non-integer u*alpha)."""
