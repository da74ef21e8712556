"""Exception types shared across the package."""


class DipgpeError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(DipgpeError, ValueError):
    """Invalid input data or configuration values."""


class GridMismatch(DipgpeError, ValueError):
    """Two objects built on different grids were combined."""


class ZeroMass(DipgpeError, ValueError):
    """An operation required a field with positive mass."""


class DecayViolation(DipgpeError, ValueError):
    """Field does not decay near the box boundary; rescaling would wrap."""


class InvalidTriple(DipgpeError, ValueError):
    """Scaling-coefficient triple outside the admissible cone."""


class NotOnManifold(DipgpeError, ValueError):
    """Triple is not virial-free at unit scale within tolerance."""


class BadEndpoints(DipgpeError, ValueError):
    """Invalid path endpoints or sample count."""


class InvalidCouplings(DipgpeError, ValueError):
    """Coupling constants outside the regime an operation supports."""


class NumericalBlowup(DipgpeError, ArithmeticError):
    """NaN or infinity detected during an iterative computation."""


class NotConvergedInput(DipgpeError, ValueError):
    """A verification step received a non-converged solver result."""


class ParseError(DipgpeError, ValueError):
    """Malformed configuration text.

    Carries the 1-based line number of the offending line.
    """

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class FieldFormatError(DipgpeError, ValueError):
    """Base class for binary field-file format errors."""


class BadMagic(FieldFormatError):
    """File does not start with the expected magic bytes."""


class VersionMismatch(FieldFormatError):
    """Unsupported field-file format version."""


class TruncatedFile(FieldFormatError):
    """Field file payload shorter (or longer) than the header declares."""


class DimensionOverflow(FieldFormatError):
    """Field file header declares an implausibly large grid."""
