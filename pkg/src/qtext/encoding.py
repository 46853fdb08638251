"""Load real word vectors into the register.

Amplitude encoding writes the L2-normalized vector directly into the
amplitude array (simulator privilege; observationally equivalent to a
state-preparation circuit). Angle encoding rotates each qubit by its own
component. fold_to_length bridges arbitrary-dimension embeddings into a
fixed component count by strided summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DegenerateInputError, ValidationError
from .statevector import Statevector, apply_gate, new_zero_state, ry

AMPLITUDE = "amplitude"
ANGLE = "angle"
ENCODING_KINDS = (AMPLITUDE, ANGLE)

_ZERO_NORM = 1e-12


@dataclass
class WordVector:
    """Real embedding components; unitless for amplitude encoding, radians
    per qubit for angle encoding."""

    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValidationError("word vector must be a non-empty 1-D array")

    def __len__(self) -> int:
        return int(self.values.size)


def amplitude_encode(w: WordVector, n_qubits: int) -> Statevector:
    """amplitude(x) = w_x / ||w|| for x < m, zero-padded above."""
    values = w.values
    dim = 1 << n_qubits
    if values.size > dim:
        needed = math.ceil(math.log2(values.size))
        raise CapacityError(
            f"vector of length {values.size} needs at least {needed} qubits, "
            f"got {n_qubits}"
        )
    norm = float(np.linalg.norm(values))
    if norm <= _ZERO_NORM:
        raise DegenerateInputError("cannot amplitude-encode a zero vector")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[: values.size] = values / norm
    return Statevector(n_qubits, amps)


def angle_encode(w: WordVector, n_qubits: int) -> Statevector:
    """Product state with qubit i carrying [cos(w_i/2), sin(w_i/2)]."""
    if len(w) != n_qubits:
        raise ValidationError(
            f"angle encoding needs one angle per qubit: "
            f"got {len(w)} angles for {n_qubits} qubits"
        )
    state = new_zero_state(n_qubits)
    for i, angle in enumerate(w.values):
        state = apply_gate(state, ry(float(angle), i))
    return state


def fold_to_length(values: np.ndarray, length: int) -> np.ndarray:
    """Zero-pad up or fold down by summing strided segments of the input.

    output_j = sum_k values[j + k*length]; the identity (plus padding) when
    the input already fits.
    """
    values = np.asarray(values, dtype=np.float64)
    segments = -(-values.size // length)
    padded = np.zeros(segments * length, dtype=np.float64)
    padded[: values.size] = values
    return padded.reshape(segments, length).sum(axis=0)


def project_to_register(embedding: np.ndarray, n_qubits: int) -> WordVector:
    """Fit a d-dimensional embedding into the 2^n register components."""
    return WordVector(fold_to_length(embedding, 1 << n_qubits))
