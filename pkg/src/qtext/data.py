"""Text dataset loading, tokenization, and token embeddings.

Datasets are JSONL, one example per line with keys "id", "text", "label",
optionally preceded by a header line {"classes": C}. Embeddings come from
an in-memory store that can be filled from a QTPE file; out-of-vocabulary
tokens are handled by a configurable policy:

  hash  deterministic unit vector seeded by the token bytes (default)
  zero  all-zero vector
  skip  token dropped from pooling
"""

from __future__ import annotations

import json
import string
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DegenerateInputError, ValidationError
from .seeding import stable_hash64

OOV_HASH = "hash"
OOV_ZERO = "zero"
OOV_SKIP = "skip"
OOV_POLICIES = (OOV_HASH, OOV_ZERO, OOV_SKIP)

QTPE_MAGIC = b"QTPE"
QTPE_VERSION = 1



@dataclass
class LabeledExample:
    id: str
    text: str
    label: int


def load_dataset(path: str) -> tuple[list[LabeledExample], int]:
    """Read a JSONL dataset, returning (examples, n_classes).

    n_classes comes from the optional {"classes": C} header line when
    present, else from the largest label seen plus one.
    """
    examples: list[LabeledExample] = []
    seen_ids: set[str] = set()
    n_classes: int | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise DataError(f"line {lineno}: expected an object")
            if lineno == 1 and "classes" in record and "id" not in record:
                c = record["classes"]
                if not isinstance(c, int) or c < 2:
                    raise DataError("line 1: classes must be an integer >= 2")
                n_classes = c
                continue
            try:
                ex = LabeledExample(
                    id=str(record["id"]),
                    text=str(record["text"]),
                    label=int(record["label"]),
                )
            except KeyError as exc:
                raise DataError(f"line {lineno}: missing key {exc.args[0]!r}") from exc
            except (TypeError, ValueError) as exc:
                raise DataError(f"line {lineno}: bad field value ({exc})") from exc
            if ex.id in seen_ids:
                raise DataError(f"duplicate example id {ex.id!r}")
            if not ex.text.strip():
                raise DataError(f"line {lineno}: empty text in example {ex.id!r}")
            if ex.label < 0:
                raise DataError(
                    f"label must be non-negative in example {ex.id!r}"
                )
            if n_classes is not None and ex.label >= n_classes:
                raise DataError(
                    f"label {ex.label} out of range for {n_classes} classes "
                    f"in example {ex.id!r}"
                )
            seen_ids.add(ex.id)
            examples.append(ex)
    if not examples:
        raise DataError("no examples in dataset")
    if n_classes is None:
        n_classes = max(ex.label for ex in examples) + 1
    return examples, n_classes


def tokenize(text: str) -> list[str]:
    """Lowercase, split on Unicode whitespace, strip surrounding ASCII
    punctuation from each token. Interior punctuation is kept."""
    tokens = []
    for raw in text.lower().split():
        token = raw.strip(string.punctuation)
        if token:
            tokens.append(token)
    return tokens


def hash_vector(token: str, dim: int) -> np.ndarray:
    """Deterministic unit vector for an out-of-vocabulary token."""
    rng = np.random.Generator(np.random.PCG64(stable_hash64("oov", token)))
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


@dataclass
class EmbeddingStore:
    """Token -> vector map with an out-of-vocabulary policy."""

    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)
    oov_policy: str = OOV_HASH

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValidationError(f"embedding dim must be positive, got {self.dim}")
        if self.oov_policy not in OOV_POLICIES:
            raise ValidationError(f"unknown oov policy {self.oov_policy!r}")

    def add(self, token: str, vector: np.ndarray) -> None:
        v = np.asarray(vector, dtype=np.float64)
        if v.shape != (self.dim,):
            raise ValidationError(
                f"vector for {token!r} has shape {v.shape}, expected ({self.dim},)"
            )
        self.vectors[token] = v

    def lookup(self, token: str) -> np.ndarray | None:
        """The token's vector, or the policy fallback; None means skip."""
        hit = self.vectors.get(token)
        if hit is not None:
            return hit
        if self.oov_policy == OOV_HASH:
            return hash_vector(token, self.dim)
        if self.oov_policy == OOV_ZERO:
            return np.zeros(self.dim)
        return None

    def sentence_embedding(self, tokens: list[str]) -> np.ndarray:
        """Mean of the per-token vectors that the policy keeps."""
        kept = [v for v in (self.lookup(t) for t in tokens) if v is not None]
        if not kept:
            raise DegenerateInputError(
                "no embeddable tokens in sentence"
            )
        return np.mean(kept, axis=0)


def load_qtpe(path: str, oov_policy: str = OOV_HASH) -> EmbeddingStore:
    """Read a QTPE embedding table.

    Layout: 4-byte magic "QTPE", then three little-endian u32 fields
    (version, vocab size, dim), then per token a u16 LE byte length,
    the UTF-8 token, and dim little-endian f32 components.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 16 or blob[:4] != QTPE_MAGIC:
        raise DataError(f"{path}: not a QTPE file")
    version, vocab, dim = struct.unpack_from("<III", blob, 4)
    if version != QTPE_VERSION:
        raise DataError(f"{path}: unsupported QTPE version {version}")
    if dim < 1:
        raise DataError(f"{path}: bad embedding dim {dim}")
    store = EmbeddingStore(dim=dim, oov_policy=oov_policy)
    offset = 16
    for i in range(vocab):
        if offset + 2 > len(blob):
            raise DataError(f"{path}: truncated at record {i}")
        (token_len,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        end = offset + token_len + 4 * dim
        if end > len(blob):
            raise DataError(f"{path}: truncated at record {i}")
        token = blob[offset:offset + token_len].decode("utf-8")
        offset += token_len
        values = np.frombuffer(blob[offset:offset + 4 * dim], dtype="<f4")
        offset += 4 * dim
        store.add(token, values.astype(np.float64))
    if offset != len(blob):
        raise DataError(f"{path}: {len(blob) - offset} trailing bytes")
    return store


def write_dataset(
    path: str, examples: list[LabeledExample], n_classes: int | None = None
) -> None:
    """JSONL writer; n_classes, when given, becomes the header line."""
    with open(path, "w", encoding="utf-8") as fh:
        if n_classes is not None:
            fh.write(json.dumps({"classes": n_classes}) + "\n")
        for ex in examples:
            fh.write(json.dumps(
                {"id": ex.id, "text": ex.text, "label": ex.label}) + "\n")


_SYLLABLES = ("ba", "de", "ki", "lo", "mu", "na", "po", "ra",
              "su", "ti", "vo", "za")


def synthetic_separable_dataset(
    n_examples: int = 200,
    n_classes: int = 2,
    vocab_size: int = 8,
    seed: int = 0,
    min_tokens: int = 3,
    max_tokens: int = 8,
) -> list[LabeledExample]:
    """Balanced synthetic classification set with disjoint per-class
    vocabularies, so mean hash embeddings are linearly separable."""
    if n_classes < 2 or n_examples < n_classes:
        raise ValidationError("need >= 2 classes and at least one example each")
    rng = np.random.Generator(np.random.PCG64(stable_hash64(seed, "synthetic")))
    vocab: list[list[str]] = []
    used: set[str] = set()
    for c in range(n_classes):
        words = []
        while len(words) < vocab_size:
            parts = rng.choice(_SYLLABLES, size=int(rng.integers(2, 4)))
            word = "".join(parts)
            if word not in used:
                used.add(word)
                words.append(word)
        vocab.append(words)
    examples = []
    for i in range(n_examples):
        label = i % n_classes
        length = int(rng.integers(min_tokens, max_tokens + 1))
        words = rng.choice(vocab[label], size=length)
        examples.append(LabeledExample(
            id=f"ex{i:04d}", text=" ".join(words), label=label))
    return examples


def save_qtpe(path: str, store: EmbeddingStore) -> None:
    """Write an EmbeddingStore in QTPE layout (insertion order)."""
    with open(path, "wb") as fh:
        fh.write(QTPE_MAGIC)
        fh.write(struct.pack("<III", QTPE_VERSION, len(store.vectors), store.dim))
        for token, vector in store.vectors.items():
            encoded = token.encode("utf-8")
            if len(encoded) > 0xFFFF:
                raise ValidationError(f"token too long to serialize: {token[:32]!r}")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(np.asarray(vector, dtype="<f4").tobytes())
