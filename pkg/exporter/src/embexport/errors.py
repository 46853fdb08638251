"""Exception hierarchy.

The CLI maps ModelError to exit 1 and everything else to exit 2.
"""


class ExportError(Exception):
    """Base class for all exporter errors."""


class JobError(ExportError):
    """Invalid export request: vocabulary, dim, or input paths."""


class FormatError(ExportError):
    """Malformed QTPE bytes, or a record the format cannot represent."""


class ModelError(ExportError):
    """Checkpoint could not be loaded."""
