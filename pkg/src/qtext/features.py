"""Feature pipeline: encode a word vector, amplify its oracle-marked
components with the adaptive schedule, and emit exact Born probabilities.

Features are read from the final pre-measurement state rather than sampled,
so extraction is deterministic given the config seed. Per-token features
are pooled (mean or renormalized max) into one vector per token sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .encoding import (
    AMPLITUDE,
    ANGLE,
    ENCODING_KINDS,
    WordVector,
    amplitude_encode,
    angle_encode,
    fold_to_length,
    project_to_register,
)
from .errors import ConfigError, DegenerateInputError
from .grover import MarkedSet, grover_iterate, marked_set
from .search import SearchConfig, adaptive_search
from .statevector import Statevector, probabilities

MEAN = "mean"
MAX = "max"
POOLING_KINDS = (MEAN, MAX)

MIN_FEATURE_QUBITS = 2
MAX_FEATURE_QUBITS = 12

_ZERO_NORM = 1e-12


@dataclass(frozen=True)
class QepfeConfig:
    """Feature-extraction settings: register width, encoding, the oracle
    threshold tau, the search schedule, and the pooling mode."""

    n_qubits: int = 6
    encoding: str = AMPLITUDE
    tau: float = 0.5
    search: SearchConfig = field(default_factory=SearchConfig)
    pooling: str = MEAN

    def __post_init__(self) -> None:
        if not MIN_FEATURE_QUBITS <= self.n_qubits <= MAX_FEATURE_QUBITS:
            raise ConfigError(
                f"feature extraction supports {MIN_FEATURE_QUBITS} to "
                f"{MAX_FEATURE_QUBITS} qubits, got {self.n_qubits}"
            )
        if not 0.0 < self.tau <= 1.0:
            raise ConfigError(f"tau must be in (0, 1], got {self.tau}")
        if self.encoding not in ENCODING_KINDS:
            raise ConfigError(f"unknown encoding {self.encoding!r}")
        if self.pooling not in POOLING_KINDS:
            raise ConfigError(f"unknown pooling {self.pooling!r}")


@dataclass
class FeatureVector:
    """Probability features over the 2^n basis states."""

    p: np.ndarray
    source_tokens: int


def _encode(w: WordVector, config: QepfeConfig) -> Statevector:
    if config.encoding == AMPLITUDE:
        return amplitude_encode(project_to_register(w.values, config.n_qubits),
                                config.n_qubits)
    angles = w.values
    if angles.size != config.n_qubits:
        angles = fold_to_length(angles, config.n_qubits)
    return angle_encode(WordVector(angles), config.n_qubits)


def derive_marked_set(w: WordVector, config: QepfeConfig) -> MarkedSet:
    """Mark every index whose register-projected magnitude clears
    tau * max; fall back to the argmax alone when that set would be empty
    or the full register. Ties break toward the smaller index."""
    projected = project_to_register(w.values, config.n_qubits).values
    norm = float(np.linalg.norm(projected))
    if norm <= _ZERO_NORM:
        raise DegenerateInputError("cannot derive a marked set from a zero vector")
    magnitudes = np.abs(projected) / norm
    threshold = config.tau * float(magnitudes.max())
    indices = np.flatnonzero(magnitudes >= threshold)
    if indices.size == 0 or indices.size == magnitudes.size:
        indices = np.array([int(np.argmax(magnitudes))])
    return marked_set(config.n_qubits, indices.tolist())


def extract_features(
    w: WordVector,
    config: QepfeConfig,
    marked: MarkedSet | None = None,
    iterations: int | None = None,
) -> FeatureVector:
    """Encode w, amplify its marked components, read out probabilities.

    marked overrides the derived oracle set; iterations bypasses the
    adaptive schedule and applies exactly that many Grover iterations
    (used by demos and by tests pinning specific iteration counts).
    """
    if marked is None:
        marked = derive_marked_set(w, config)
    if iterations is not None:
        state = _encode(w, config)
        trace: list[float] = []
        for _ in range(iterations):
            state = grover_iterate(state, marked, with_pd=True, pd_trace=trace)
        return FeatureVector(probabilities(state), 1)
    outcome = adaptive_search(
        marked, config.search, prepare=lambda: _encode(w, config)
    )
    return FeatureVector(probabilities(outcome.final_state), 1)


def extract_sequence_features(
    tokens: list[WordVector], config: QepfeConfig
) -> FeatureVector:
    """Per-token extract_features pooled into one vector."""
    if not tokens:
        raise DegenerateInputError("no tokens to extract features from")
    stack = np.stack([extract_features(w, config).p for w in tokens])
    if config.pooling == MEAN:
        pooled = stack.mean(axis=0)
    else:
        pooled = stack.max(axis=0)
        pooled = pooled / pooled.sum()
    return FeatureVector(pooled, len(tokens))
