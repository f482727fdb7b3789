"""Error taxonomy for the extractor."""


class ExtractorError(Exception):
    """Base class for extraction failures."""


class DatasetMissingError(ExtractorError):
    """Dataset files not found locally; message carries download steps."""


class WeightsUnavailableError(ExtractorError):
    """Pretrained checkpoint neither cached nor downloadable."""


class DimensionMismatchError(ExtractorError):
    """Backbone produced a feature width other than the invariant table's."""


class ClassMapMismatchError(ExtractorError):
    """Existing sidecar class map disagrees with the dataset's classes."""
