"""Exception types shared across the library.

Plain ``ValueError`` is used for ordinary bad-argument cases (negative
fractions, empty lists, length mismatches); the classes below mark failure
modes callers are expected to branch on.
"""


class DiscbenchError(Exception):
    """Base class for library-specific failures."""


class DimensionError(DiscbenchError):
    """Shapes do not line up (non-square, empty, or mismatched matrices)."""


class SingularMatrixError(DiscbenchError):
    """Matrix is not positive definite within tolerance; direct solve refused."""


class CapacityError(DiscbenchError):
    """Requested output dimensionality exceeds what the method can produce."""


class DegenerateClassError(DiscbenchError):
    """A class is empty or too small for the statistic being computed."""


class RankCollapseError(DiscbenchError):
    """All singular values fell below the truncation threshold."""


class NumericError(DiscbenchError):
    """A computation produced non-finite values."""


class UndefinedCorrelationError(DiscbenchError):
    """Correlation requested on a zero-variance series."""


class FeatureFileError(DiscbenchError):
    """Base class for feature-file problems."""


class FileFormatError(FeatureFileError):
    """Bad magic bytes or unsupported version."""


class CorruptFileError(FeatureFileError):
    """Structurally valid file with inconsistent contents (e.g. label >= C)."""


class TruncatedFileError(FeatureFileError):
    """File ended before the declared payload was read."""
