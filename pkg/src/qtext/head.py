"""Linear fusion classifier: concatenate quantum probability features with
the frozen classical sentence embedding, apply one trainable linear layer
with softmax, and optimize by rectified Adam.

Everything upstream of the linear layer is frozen, so the fused feature
matrix is computed once before the first epoch and reused as-is for every
later epoch (the feature cache). Training is deterministic given the seed.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .data import EmbeddingStore, LabeledExample, tokenize
from .encoding import WordVector
from .errors import DataError, DegenerateInputError, NumericError, ValidationError
from .features import QepfeConfig, extract_sequence_features
from .seeding import child_seed

BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8

QTPH_MAGIC = b"QTPH"
QTPH_VERSION = 1


@dataclass(frozen=True)
class FusionInput:
    """Quantum features p and classical embedding h, fused as z = p then h."""

    p: np.ndarray
    h: np.ndarray

    @property
    def z(self) -> np.ndarray:
        return np.concatenate([self.p, self.h])


@dataclass
class LinearHead:
    """weights (C, N+d) and bias (C,), with the p/h split remembered so
    checkpoints can record both widths."""

    weights: np.ndarray
    bias: np.ndarray
    feature_dim: int
    embed_dim: int

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        c = self.bias.shape[0] if self.bias.ndim == 1 else -1
        if self.weights.shape != (c, self.feature_dim + self.embed_dim):
            raise ValidationError(
                f"weights shape {self.weights.shape} inconsistent with "
                f"{c} classes and input dim {self.feature_dim + self.embed_dim}"
            )
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise ValidationError("head parameters must be finite")

    @property
    def n_classes(self) -> int:
        return self.bias.shape[0]


def new_head(n_classes: int, feature_dim: int, embed_dim: int) -> LinearHead:
    """Zero-initialized head, the uniform predictor."""
    if n_classes < 2:
        raise ValidationError(f"need at least 2 classes, got {n_classes}")
    return LinearHead(
        np.zeros((n_classes, feature_dim + embed_dim)),
        np.zeros(n_classes),
        feature_dim,
        embed_dim,
    )


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def forward(head: LinearHead, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Logits and softmax probabilities for one fused input."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (head.weights.shape[1],):
        raise ValidationError(
            f"input dim {z.shape} does not match head input "
            f"dim {head.weights.shape[1]}"
        )
    logits = head.weights @ z + head.bias
    return logits, np.exp(_log_softmax(logits))


def loss_and_grad(
    head: LinearHead, z_batch: np.ndarray, labels: np.ndarray
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy over the batch and its analytic gradients."""
    z_batch = np.asarray(z_batch, dtype=np.float64)
    labels = np.asarray(labels)
    if z_batch.ndim != 2 or z_batch.shape[0] == 0:
        raise ValidationError("batch must be a non-empty 2-D array")
    if labels.shape != (z_batch.shape[0],):
        raise ValidationError("one label per batch row required")
    c = head.n_classes
    if labels.min() < 0 or labels.max() >= c:
        raise ValidationError(f"labels must lie in 0..{c - 1}")
    b = z_batch.shape[0]
    logits = z_batch @ head.weights.T + head.bias
    logp = _log_softmax(logits)
    loss = float(-logp[np.arange(b), labels].mean())
    dlogits = np.exp(logp)
    dlogits[np.arange(b), labels] -= 1.0
    dlogits /= b
    return loss, {
        "weights": dlogits.T @ z_batch,
        "bias": dlogits.sum(axis=0),
    }


@dataclass
class RAdamState:
    """Step counter plus first and second moment accumulators per block."""

    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def rho_infinity(beta2: float = BETA2) -> float:
    return 2.0 / (1.0 - beta2) - 1.0


def rho_step(t: int, beta2: float = BETA2) -> float:
    return rho_infinity(beta2) - 2.0 * t * beta2**t / (1.0 - beta2**t)


def radam_step(
    state: RAdamState,
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    lr: float,
) -> dict[str, np.ndarray]:
    """One rectified-Adam update; mutates state, returns the new params.

    The variance-rectified step applies only once the length of the
    approximated SMA exceeds 4; earlier steps fall back to plain
    bias-corrected momentum.
    """
    if lr <= 0:
        raise ValidationError(f"learning rate must be positive, got {lr}")
    for name, g in grads.items():
        if not np.isfinite(g).all():
            raise NumericError(f"non-finite gradient in parameter block {name!r}")
        if name not in params or params[name].shape != g.shape:
            raise ValidationError(f"gradient shape mismatch for block {name!r}")
    state.step += 1
    t = state.step
    rho_t = rho_step(t)
    updated: dict[str, np.ndarray] = {}
    for name, g in grads.items():
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None:
            m = np.zeros_like(g)
            v = np.zeros_like(g)
        m = BETA1 * m + (1.0 - BETA1) * g
        v = BETA2 * v + (1.0 - BETA2) * g * g
        state.m[name] = m
        state.v[name] = v
        m_hat = m / (1.0 - BETA1**t)
        if rho_t > 4.0:
            rho_inf = rho_infinity()
            rect = np.sqrt(
                ((rho_t - 4.0) * (rho_t - 2.0) * rho_inf)
                / ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t)
            )
            v_hat = np.sqrt(v / (1.0 - BETA2**t))
            updated[name] = params[name] - lr * rect * m_hat / (v_hat + EPSILON)
        else:
            updated[name] = params[name] - lr * m_hat
    return updated


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.001
    epochs: int = 50
    batch_size: int = 32
    seed: int = 0
    tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.lr <= 0:
            raise ValidationError(f"learning rate must be positive, got {self.lr}")
        if self.epochs < 1:
            raise ValidationError(f"epochs must be at least 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValidationError(f"batch size must be at least 1, got {self.batch_size}")


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    loss: float
    accuracy: float


def fusion_input(
    text: str, store: EmbeddingStore, config: QepfeConfig
) -> FusionInput:
    """Fuse a sentence: pooled quantum features over its token vectors
    plus the mean classical embedding."""
    vectors = [store.lookup(t) for t in tokenize(text)]
    kept = [v for v in vectors if v is not None]
    if not kept:
        raise DegenerateInputError("no embeddable tokens in sentence")
    h = np.mean(kept, axis=0)
    p = extract_sequence_features([WordVector(v) for v in kept], config).p
    return FusionInput(p, h)


def featurize_dataset(
    examples: list[LabeledExample],
    store: EmbeddingStore,
    config: QepfeConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Fused feature matrix and label vector for a dataset.

    This is the training-time feature cache: the extractor and embeddings
    are frozen, so one pass here serves every epoch.
    """
    if not examples:
        raise DataError("no examples to featurize")
    rows = []
    for ex in examples:
        try:
            rows.append(fusion_input(ex.text, store, config).z)
        except DegenerateInputError as exc:
            raise DataError(f"example {ex.id!r}: {exc}") from exc
    labels = np.array([ex.label for ex in examples], dtype=np.int64)
    return np.stack(rows), labels


def train_head(
    z: np.ndarray,
    labels: np.ndarray,
    n_classes: int,
    feature_dim: int,
    embed_dim: int,
    config: TrainConfig,
) -> tuple[LinearHead, list[EpochStats]]:
    """Minibatch RAdam on a precomputed fused feature matrix.

    Runs at most config.epochs epochs with a seeded per-epoch shuffle,
    stopping early once the epoch-mean loss improves by less than
    config.tol. History carries the per-epoch mean loss and full-set
    accuracy.
    """
    z = np.asarray(z, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n = z.shape[0]
    if n == 0 or labels.shape != (n,):
        raise ValidationError("feature matrix and labels must align and be non-empty")
    head = new_head(n_classes, feature_dim, embed_dim)
    if z.shape[1] != head.weights.shape[1]:
        raise ValidationError(
            f"fused width {z.shape[1]} does not match "
            f"feature_dim + embed_dim = {head.weights.shape[1]}"
        )
    params = {"weights": head.weights, "bias": head.bias}
    state = RAdamState()
    rng = np.random.Generator(np.random.PCG64(child_seed(config.seed, "shuffle")))
    history: list[EpochStats] = []
    prev_loss = None
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start:start + config.batch_size]
            head.weights = params["weights"]
            head.bias = params["bias"]
            batch_loss, grads = loss_and_grad(head, z[batch], labels[batch])
            total += batch_loss * batch.size
            params = radam_step(state, params, grads, config.lr)
        head.weights = params["weights"]
        head.bias = params["bias"]
        epoch_loss = total / n
        preds = (z @ head.weights.T + head.bias).argmax(axis=1)
        accuracy = float((preds == labels).mean())
        history.append(EpochStats(epoch, epoch_loss, accuracy))
        if prev_loss is not None and abs(prev_loss - epoch_loss) < config.tol:
            break
        prev_loss = epoch_loss
    return head, history


def train(
    examples: list[LabeledExample],
    store: EmbeddingStore,
    n_classes: int,
    qepfe_config: QepfeConfig,
    train_config: TrainConfig,
) -> tuple[LinearHead, list[EpochStats]]:
    """Featurize once, then fit the head on the cached matrix."""
    z, labels = featurize_dataset(examples, store, qepfe_config)
    feature_dim = 1 << qepfe_config.n_qubits
    return train_head(
        z, labels, n_classes, feature_dim, store.dim, train_config
    )


def predict(head: LinearHead, z: np.ndarray) -> np.ndarray:
    """Class predictions for a fused feature matrix (rows = examples)."""
    z = np.asarray(z, dtype=np.float64)
    if z.ndim == 1:
        z = z[None, :]
    return (z @ head.weights.T + head.bias).argmax(axis=1)


def save_checkpoint(path: str, head: LinearHead) -> None:
    """Binary head checkpoint: magic "QTPH", u32 version, class count,
    quantum feature width, embedding width, then the weight matrix
    row-major and the bias, all little-endian f64."""
    with open(path, "wb") as fh:
        fh.write(QTPH_MAGIC)
        fh.write(struct.pack(
            "<IIII", QTPH_VERSION, head.n_classes,
            head.feature_dim, head.embed_dim,
        ))
        fh.write(np.ascontiguousarray(head.weights, dtype="<f8").tobytes())
        fh.write(np.asarray(head.bias, dtype="<f8").tobytes())


def load_checkpoint(path: str) -> LinearHead:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 20 or blob[:4] != QTPH_MAGIC:
        raise DataError(f"{path}: not a QTPH checkpoint")
    version, c, feature_dim, embed_dim = struct.unpack_from("<IIII", blob, 4)
    if version != QTPH_VERSION:
        raise DataError(f"{path}: unsupported checkpoint version {version}")
    input_dim = feature_dim + embed_dim
    expected = 20 + 8 * (c * input_dim + c)
    if len(blob) != expected:
        raise DataError(
            f"{path}: expected {expected} bytes for shape "
            f"({c}, {input_dim}), got {len(blob)}"
        )
    flat = np.frombuffer(blob, dtype="<f8", offset=20)
    weights = flat[: c * input_dim].reshape(c, input_dim).astype(np.float64)
    bias = flat[c * input_dim:].astype(np.float64)
    return LinearHead(weights, bias, feature_dim, embed_dim)
