"""Exception hierarchy shared by the library and the CLI."""


class CertboundError(Exception):
    """Base class for every error raised by certbound."""


class InvalidInputError(CertboundError, ValueError):
    """Malformed strings, codes, vectors or flags."""


class InvalidConfigError(InvalidInputError):
    """A configuration that can never run (e.g. binary backend with k != 2)."""


class CapacityError(CertboundError):
    """The requested configuration does not fit the memory budget."""

    def __init__(self, message: str, required_bytes: int | None = None):
        super().__init__(message)
        self.required_bytes = required_bytes


class FixedPointOverflowError(CertboundError, OverflowError):
    """A fixed-point aggregate left the signed 64-bit range."""


class StructuralError(CertboundError):
    """A certificate file or object is malformed."""


class NoCertificateError(CertboundError):
    """Verification failed for the proposed (v, r)."""

    def __init__(self, message: str, witness: int | None = None):
        super().__init__(message)
        self.witness = witness
