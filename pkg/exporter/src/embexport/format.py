"""QTPE embedding table serialization.

Layout: 4-byte magic "QTPE", three little-endian u32 header fields
(version, vocabulary size, dim), then one record per token: a u16 LE
byte length, the UTF-8 token bytes, and dim little-endian f32
components. Components are truncated to f32 on write; that rounding is
part of the format, not an accident of the writer. A table holding the
single token "a" at dim 4 is exactly 35 bytes.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

from .errors import FormatError

MAGIC = b"QTPE"
VERSION = 1
_HEADER = struct.Struct("<III")


def encode_table(records: list[tuple[str, np.ndarray]], dim: int) -> bytes:
    """Serialize (token, vector) pairs, preserving order."""
    if dim < 1:
        raise FormatError(f"embedding dim must be positive, got {dim}")
    seen: set[str] = set()
    parts = [MAGIC, _HEADER.pack(VERSION, len(records), dim)]
    for token, vector in records:
        if token in seen:
            raise FormatError(f"duplicate token {token!r}")
        seen.add(token)
        encoded = token.encode("utf-8")
        if not 0 < len(encoded) <= 0xFFFF:
            raise FormatError(
                f"token byte length {len(encoded)} out of range for {token[:32]!r}"
            )
        values = np.asarray(vector, dtype="<f4")
        if values.shape != (dim,):
            raise FormatError(
                f"vector for {token!r} has shape {values.shape}, want ({dim},)"
            )
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
        parts.append(values.tobytes())
    return b"".join(parts)


def write_table(
    path: str, records: list[tuple[str, np.ndarray]], dim: int
) -> str:
    """Write a table, returning the sha256 hex digest of the file bytes."""
    blob = encode_table(records, dim)
    with open(path, "wb") as fh:
        fh.write(blob)
    return hashlib.sha256(blob).hexdigest()


def read_table(path: str) -> tuple[int, list[tuple[str, np.ndarray]]]:
    """Read and validate a table, returning (dim, records).

    Vectors come back as float32, bit for bit as stored.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 16 or blob[:4] != MAGIC:
        raise FormatError(f"{path}: not a QTPE file")
    version, vocab, dim = _HEADER.unpack_from(blob, 4)
    if version != VERSION:
        raise FormatError(f"{path}: unsupported QTPE version {version}")
    if dim < 1:
        raise FormatError(f"{path}: bad embedding dim {dim}")
    records: list[tuple[str, np.ndarray]] = []
    offset = 16
    for i in range(vocab):
        if offset + 2 > len(blob):
            raise FormatError(f"{path}: truncated at record {i}")
        (token_len,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        end = offset + token_len + 4 * dim
        if end > len(blob):
            raise FormatError(f"{path}: truncated at record {i}")
        token = blob[offset:offset + token_len].decode("utf-8")
        offset += token_len
        values = np.frombuffer(blob[offset:end], dtype="<f4").copy()
        offset = end
        records.append((token, values))
    if offset != len(blob):
        raise FormatError(f"{path}: {len(blob) - offset} trailing bytes")
    return dim, records


def file_digest(path: str) -> str:
    """sha256 hex digest of a file's bytes."""
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()
