"""Exception types shared across the package."""


class GaloisError(Exception):
    """Base class for failures of the Galois group computation."""


class InputError(GaloisError, ValueError):
    """Malformed polynomial, prime or parameterization."""


class ResourceCapExceeded(GaloisError):
    """A table, lattice or enumeration exceeded its configured cap."""


class PrecisionError(GaloisError):
    """p-adic or complex precision was insufficient and the ceiling was hit."""


class NotApplicable(GaloisError):
    """An algorithm does not handle this input."""


class Inconsistent(GaloisError):
    """Deduction reached an empty candidate pool."""


class ChooserExhausted(GaloisError):
    """No useful subgroup remains; ``state`` holds the deduction state reached."""

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state
