"""Token vector extraction from a pretrained transformer checkpoint.

Vectors come straight from the model's input embedding matrix; no text
runs through the encoder, so a token's vector never depends on context.
Each requested token is split into pieces by the checkpoint's own
tokenizer and mapped to the mean of its piece rows. Tokens the
tokenizer cannot encode (no pieces, or only the unknown placeholder)
are skipped with a warning and listed in the report, never written.
"""

from __future__ import annotations

import hashlib
import sys
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from .errors import JobError, ModelError
from .format import encode_table


@dataclass
class ExportJob:
    """One export request: which checkpoint, which tokens, where to.

    dim, when set, is the expected embedding width; the job fails
    before writing if the model disagrees. None accepts whatever the
    checkpoint provides.
    """

    model: str
    vocab: list[str]
    output: str
    dim: int | None = None


@dataclass
class ExportReport:
    """What an export actually did, sidecar-ready via to_dict."""

    model: str
    output: str
    dim: int
    requested: int
    written: int
    skipped: list[str] = field(default_factory=list)
    sha256: str = ""

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "output": self.output,
            "dim": self.dim,
            "requested": self.requested,
            "written": self.written,
            "skipped": list(self.skipped),
            "sha256": self.sha256,
        }


def load_token_table(model_id: str):
    """Load (tokenizer, embedding matrix) for a checkpoint id or path.

    The matrix is the input embedding weight as float32, one row per
    tokenizer piece.
    """
    try:
        from transformers import AutoModel, AutoTokenizer
        from transformers.utils import logging as hf_logging
    except ImportError as exc:
        raise ModelError(f"transformers is not installed: {exc}") from exc
    hf_logging.disable_progress_bar()
    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModel.from_pretrained(model_id)
    except Exception as exc:
        raise ModelError(f"cannot load checkpoint {model_id!r}: {exc}") from exc
    weight = model.get_input_embeddings().weight.detach().float().cpu().numpy()
    return tokenizer, np.asarray(weight, dtype=np.float32)


def piece_vector(tokenizer, matrix: np.ndarray, token: str) -> np.ndarray | None:
    """Mean of the piece rows for one token, or None when the tokenizer
    cannot encode it. The mean is taken in float64; the f32 truncation
    happens once, at serialization."""
    pieces = tokenizer.tokenize(token)
    if not pieces:
        return None
    ids = tokenizer.convert_tokens_to_ids(pieces)
    unk = tokenizer.unk_token_id
    if unk is not None and unk in ids:
        return None
    if max(ids) >= matrix.shape[0] or min(ids) < 0:
        return None
    rows = matrix[np.asarray(ids, dtype=np.intp)]
    return rows.astype(np.float64).mean(axis=0)


def run_export(job: ExportJob, log: TextIO | None = None) -> ExportReport:
    """Resolve every requested token and write the table.

    Duplicate and empty vocabulary entries are dropped up front, first
    occurrence wins. Raises JobError before any file is touched when
    the vocabulary is empty or the model width does not match job.dim.
    """
    if log is None:
        log = sys.stderr
    vocab: list[str] = []
    seen: set[str] = set()
    for token in job.vocab:
        if token and token not in seen:
            seen.add(token)
            vocab.append(token)
    if not vocab:
        raise JobError("empty vocabulary: nothing to export")
    tokenizer, matrix = load_token_table(job.model)
    dim = int(matrix.shape[1])
    if job.dim is not None and job.dim != dim:
        raise JobError(
            f"model {job.model!r} has embedding width {dim}, "
            f"job requires {job.dim}"
        )
    records: list[tuple[str, np.ndarray]] = []
    skipped: list[str] = []
    for token in vocab:
        vector = piece_vector(tokenizer, matrix, token)
        if vector is None:
            skipped.append(token)
            print(
                f"warning: skipping {token!r}: tokenizer found no usable pieces",
                file=log,
            )
            continue
        records.append((token, vector))
    blob = encode_table(records, dim)
    with open(job.output, "wb") as fh:
        fh.write(blob)
    return ExportReport(
        model=job.model,
        output=job.output,
        dim=dim,
        requested=len(vocab),
        written=len(records),
        skipped=skipped,
        sha256=hashlib.sha256(blob).hexdigest(),
    )
