"""Standalone exporter for pretrained transformer token embeddings.

Writes QTPE tables from a checkpoint's input embedding matrix. The
byte layout is the whole contract with downstream consumers; nothing
here imports them and nothing of theirs imports this.
"""

from .errors import ExportError, FormatError, JobError, ModelError
from .extract import (
    ExportJob,
    ExportReport,
    load_token_table,
    piece_vector,
    run_export,
)
from .format import (
    MAGIC,
    VERSION,
    encode_table,
    file_digest,
    read_table,
    write_table,
)

__version__ = "0.1.0"

__all__ = [
    "ExportError",
    "ExportJob",
    "ExportReport",
    "FormatError",
    "JobError",
    "MAGIC",
    "ModelError",
    "VERSION",
    "encode_table",
    "file_digest",
    "load_token_table",
    "piece_vector",
    "read_table",
    "run_export",
    "write_table",
]
