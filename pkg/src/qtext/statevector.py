"""Dense complex statevector simulation with deterministic gate kernels.

Qubit order is big-endian: qubit 0 is the most significant bit of the basis
index, so on n qubits the basis index x assigns qubit q the bit value
(x >> (n - 1 - q)) & 1. All kernels are plain vectorized numpy over the full
amplitude array, which makes results bitwise deterministic for identical
(state, gate sequence) inputs regardless of how the work is chunked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ValidationError

MAX_QUBITS = 20

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass
class Statevector:
    """n-qubit register state: 2**n_qubits complex double amplitudes."""

    n_qubits: int
    amplitudes: np.ndarray

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class GateSpec:
    """One gate: kind in {X, H, RY, MCX, MCZ}, a target, optional controls.

    Controls may accompany any kind; the action applies only where every
    control qubit reads 1. MCX/MCZ are the controlled forms of X and Z.
    RY carries its angle in radians.
    """

    kind: str
    target: int
    controls: tuple[int, ...] = ()
    angle: float | None = None


def x(target: int) -> GateSpec:
    return GateSpec("X", target)


def h(target: int) -> GateSpec:
    return GateSpec("H", target)


def ry(angle: float, target: int) -> GateSpec:
    return GateSpec("RY", target, angle=float(angle))


def mcx(controls: tuple[int, ...] | list[int], target: int) -> GateSpec:
    return GateSpec("MCX", target, controls=tuple(controls))


def mcz(controls: tuple[int, ...] | list[int], target: int) -> GateSpec:
    return GateSpec("MCZ", target, controls=tuple(controls))


def new_zero_state(n_qubits: int) -> Statevector:
    """All-zeros basis state on n_qubits."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigError(
            f"n_qubits must be between 1 and {MAX_QUBITS}, got {n_qubits}"
        )
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n_qubits, amps)


def _base_matrix(gate: GateSpec) -> np.ndarray:
    if gate.kind == "X" or gate.kind == "MCX":
        return np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
    if gate.kind == "H":
        return np.array(
            [[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]],
            dtype=np.complex128,
        )
    if gate.kind == "RY":
        if gate.angle is None:
            raise ValidationError("RY gate requires an angle")
        c = math.cos(gate.angle / 2.0)
        s = math.sin(gate.angle / 2.0)
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if gate.kind == "MCZ":
        return np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
    raise ValidationError(f"unknown gate kind {gate.kind!r}")


def _validate_indices(gate: GateSpec, n_qubits: int) -> None:
    indices = (gate.target, *gate.controls)
    for q in indices:
        if not 0 <= q < n_qubits:
            raise ValidationError(
                f"qubit index {q} out of range for {n_qubits} qubits"
            )
    if len(set(indices)) != len(indices):
        raise ValidationError("control and target qubits must be distinct")


def _control_mask(gate: GateSpec, n_qubits: int) -> int:
    mask = 0
    for q in gate.controls:
        mask |= 1 << (n_qubits - 1 - q)
    return mask


def apply_gate(state: Statevector, gate: GateSpec) -> Statevector:
    """Apply one gate, returning a new state; the input is untouched."""
    n = state.n_qubits
    _validate_indices(gate, n)
    amps = state.amplitudes.copy()
    tbit = 1 << (n - 1 - gate.target)
    cmask = _control_mask(gate, n)
    idx = np.arange(amps.size)
    active = (idx & cmask) == cmask if cmask else np.ones(amps.size, dtype=bool)

    if gate.kind in ("X", "MCX"):
        i1 = idx[active & ((idx & tbit) != 0)]
        i0 = i1 ^ tbit
        amps[i0], amps[i1] = state.amplitudes[i1], state.amplitudes[i0]
    elif gate.kind == "MCZ":
        amps[active & ((idx & tbit) != 0)] *= -1.0
    else:
        u = _base_matrix(gate)
        i0 = idx[active & ((idx & tbit) == 0)]
        i1 = i0 | tbit
        a0 = state.amplitudes[i0]
        a1 = state.amplitudes[i1]
        amps[i0] = u[0, 0] * a0 + u[0, 1] * a1
        amps[i1] = u[1, 0] * a0 + u[1, 1] * a1
    return Statevector(n, amps)


def gate_matrix(gate: GateSpec, n_qubits: int) -> np.ndarray:
    """Explicit 2^n x 2^n matrix of the gate, built from its basis action.

    Intended for verification at small n; independent of the vectorized
    kernels in apply_gate (column x is the definition-level image of |x>).
    """
    _validate_indices(gate, n_qubits)
    dim = 1 << n_qubits
    tbit = 1 << (n_qubits - 1 - gate.target)
    cmask = _control_mask(gate, n_qubits)
    u = _base_matrix(gate)
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for col in range(dim):
        if (col & cmask) != cmask:
            mat[col, col] = 1.0
            continue
        b = 1 if col & tbit else 0
        mat[col & ~tbit, col] = u[0, b]
        mat[col | tbit, col] = u[1, b]
    return mat


def probabilities(state: Statevector) -> np.ndarray:
    """Exact Born probabilities |amplitude(x)|^2."""
    a = state.amplitudes
    return a.real * a.real + a.imag * a.imag


def _sample_with_rng(
    amplitudes: np.ndarray, shots: int, rng: np.random.Generator
) -> np.ndarray:
    probs = amplitudes.real**2 + amplitudes.imag**2
    cdf = np.cumsum(probs)
    u = rng.random(shots) * cdf[-1]
    return np.searchsorted(cdf, u, side="right").astype(np.int64)


def sample(state: Statevector, shots: int, seed: int) -> np.ndarray:
    """Draw basis indices by inverse-CDF over probabilities(state)."""
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    rng = np.random.Generator(np.random.PCG64(seed))
    return _sample_with_rng(state.amplitudes, shots, rng)
