"""Exception types shared across the package."""


class DocclassError(Exception):
    """Base class for all docclass errors."""


class InvalidSpaceError(DocclassError):
    """An operation received a raster in the wrong color space."""


class RasterTooSmallError(DocclassError):
    """Raster is smaller than one 32x32 block."""


class ValidationError(DocclassError):
    """Malformed input data (non-finite features, bad plane ranges, ...)."""


class DimensionMismatchError(DocclassError):
    """Feature vector dimension does not match the model."""


class DegenerateTrainingError(DocclassError):
    """Binary training set contains only one class."""


class IncompleteDatasetError(DocclassError):
    """Five-class training set is missing at least one class."""


class InsufficientDataError(DocclassError):
    """Not enough samples per class for the requested evaluation."""


class UnknownLabelError(DocclassError):
    """Manifest entry carries a label outside the five known classes."""


class ManifestError(DocclassError):
    """Manifest is unreadable, duplicated, or references missing files."""


class BundleVersionError(DocclassError):
    """Model bundle was written by an unsupported format version."""


class BundleCorruptError(DocclassError):
    """Model bundle content hash does not match or the file is truncated."""


class UndefinedImpactError(DocclassError):
    """Feature impact factor is undefined because the baseline W_m is zero."""
