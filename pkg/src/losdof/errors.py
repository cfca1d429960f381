"""Exception hierarchy shared by the library and the CLI."""


class LosDofError(Exception):
    """Base class for all errors raised by losdof."""


class InvalidGeometryError(LosDofError, ValueError):
    """Aperture has a singular transform or non-positive extents."""


class InvalidSamplingError(LosDofError, ValueError):
    """Antenna grid cannot be built from the requested counts."""


class SingularKernelError(LosDofError, ValueError):
    """Kernel evaluated at zero separation."""


class UndefinedAgreementError(LosDofError, ValueError):
    """Agreement metric requested for a zero matrix."""


class NumericalFailureError(LosDofError, RuntimeError):
    """Eigensolver did not converge or produced non-finite output."""


class ParaxialViolationError(LosDofError, ValueError):
    """Paraxial kernel requested for a link outside its validity region."""

    def __init__(self, margin, message=None):
        self.margin = margin
        super().__init__(message or f"paraxial margin {margin:.6g} < 0")


class ConfigError(LosDofError, ValueError):
    """Scenario file could not be parsed or validated."""
