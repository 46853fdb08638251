"""Phase oracle, diffusion, phase detection, and the analytic success curve.

One Grover iteration is oracle then diffusion. The phase-detection operator
couples the data register's overlap with the uniform state |s> to an ancilla
flip; during iteration the simulator records that overlap as a classical
statistic instead of physically attaching an ancilla, so the monitored state
is never disturbed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ValidationError
from .statevector import Statevector, apply_gate, h, new_zero_state

_PREDICATE_CHECK_LIMIT = 12


@dataclass(frozen=True)
class MarkedSet:
    """Set A of marked basis indices with a classically checkable predicate."""

    n_qubits: int
    members: tuple[int, ...]
    predicate: Callable[[int], bool] = field(compare=False)

    def __post_init__(self) -> None:
        dim = 1 << self.n_qubits
        if not self.members or len(self.members) >= dim:
            raise ValidationError(
                f"marked set must satisfy 1 <= |A| <= {dim - 1}, "
                f"got |A| = {len(self.members)}"
            )
        if any(not 0 <= x < dim for x in self.members):
            raise ValidationError("marked index out of register range")
        if tuple(sorted(set(self.members))) != self.members:
            raise ValidationError("members must be sorted and unique")
        if self.n_qubits <= _PREDICATE_CHECK_LIMIT:
            member_set = set(self.members)
            for x in range(dim):
                if bool(self.predicate(x)) != (x in member_set):
                    raise ValidationError(
                        f"predicate disagrees with members at index {x}"
                    )

    @property
    def a(self) -> int:
        return len(self.members)

    def contains(self, x: int) -> bool:
        return bool(self.predicate(x))


def marked_set(n_qubits: int, indices) -> MarkedSet:
    """MarkedSet from explicit indices; the predicate is set membership."""
    members = tuple(sorted(set(int(i) for i in indices)))
    member_set = frozenset(members)
    return MarkedSet(n_qubits, members, lambda x: x in member_set)


@dataclass(frozen=True)
class GroverAngles:
    """Rotation angle per iteration and the optimal iteration count."""

    theta_a: float
    k_opt: int


def grover_angles(n_qubits: int, a: int) -> GroverAngles:
    dim = 1 << n_qubits
    if not 1 <= a < dim:
        raise ValidationError(f"need 1 <= a < {dim}, got a = {a}")
    theta = math.asin(math.sqrt(a / dim))
    k_opt = int(math.floor((math.pi / 4.0) * math.sqrt(dim / a)))
    return GroverAngles(theta, k_opt)


def uniform_superposition(n_qubits: int) -> Statevector:
    """|In> with every amplitude 1/sqrt(2^n); equals H on every qubit of |0>."""
    state = new_zero_state(n_qubits)
    amps = np.full(state.dim, 1.0 / math.sqrt(state.dim), dtype=np.complex128)
    return Statevector(n_qubits, amps)


def hadamard_all(n_qubits: int) -> Statevector:
    """Gate-level H^(x)n |0>, for cross-checking uniform_superposition."""
    state = new_zero_state(n_qubits)
    for q in range(n_qubits):
        state = apply_gate(state, h(q))
    return state


def apply_oracle(state: Statevector, marked: MarkedSet) -> Statevector:
    """Negate the amplitude of every marked basis index."""
    if marked.n_qubits != state.n_qubits:
        raise ValidationError(
            f"marked set is on {marked.n_qubits} qubits, "
            f"state on {state.n_qubits}"
        )
    amps = state.amplitudes.copy()
    amps[list(marked.members)] *= -1.0
    return Statevector(state.n_qubits, amps)


def apply_diffusion(state: Statevector) -> Statevector:
    """Reflect about the uniform state: amplitude <- 2*mean - amplitude."""
    amps = state.amplitudes
    mean = amps.mean()
    return Statevector(state.n_qubits, 2.0 * mean - amps)


def grover_iterate(
    state: Statevector,
    marked: MarkedSet,
    with_pd: bool = False,
    pd_trace: list[float] | None = None,
) -> Statevector:
    """One iteration: oracle, optional overlap capture, diffusion.

    with_pd records |<s|psi>|^2 of the post-oracle state into pd_trace
    without collapsing or otherwise altering the state.
    """
    state = apply_oracle(state, marked)
    if with_pd:
        if pd_trace is None:
            raise ValidationError("with_pd requires a pd_trace accumulator")
        pd_trace.append(uniform_overlap_probability(state))
    return apply_diffusion(state)


def uniform_overlap_probability(state: Statevector) -> float:
    """|<s|psi>|^2 where |s> is the uniform state on the full register."""
    overlap = state.amplitudes.sum() / math.sqrt(state.dim)
    return float(abs(overlap) ** 2)


def apply_phase_detection(
    state: Statevector, ancilla: int
) -> tuple[Statevector, float]:
    """Explicit phase-detection unitary on a register with one ancilla qubit.

    The operator is (I - |s><s|) (x) I + |s><s| (x) X with |s> uniform over
    the data qubits (every qubit except the ancilla). The ancilla must enter
    in |0>; its exact flip probability |<s|psi_data>|^2 is returned alongside
    the transformed state.
    """
    n = state.n_qubits
    if not 0 <= ancilla < n:
        raise ValidationError(f"ancilla index {ancilla} out of range")
    if n < 2:
        raise ValidationError("phase detection needs a data register plus ancilla")
    abit = 1 << (n - 1 - ancilla)
    idx = np.arange(state.dim)
    lo = idx[(idx & abit) == 0]
    hi = lo | abit
    psi0 = state.amplitudes[lo]
    psi1 = state.amplitudes[hi]
    if np.linalg.norm(psi1) > 1e-10:
        raise ValidationError("ancilla qubit must be initialized to |0>")
    ndata = state.dim // 2
    root = math.sqrt(ndata)
    overlap0 = psi0.sum() / root
    overlap1 = psi1.sum() / root
    flip_probability = float(abs(overlap0) ** 2)
    amps = np.empty_like(state.amplitudes)
    amps[lo] = psi0 + (overlap1 - overlap0) / root
    amps[hi] = psi1 + (overlap0 - overlap1) / root
    return Statevector(n, amps), flip_probability


def analytic_success(n_qubits: int, a: int, k: int) -> float:
    """Closed-form marked-mass after k iterations: sin^2((2k+1) theta_a)."""
    if k < 0:
        raise ValidationError(f"iteration count must be >= 0, got {k}")
    angles = grover_angles(n_qubits, a)
    return math.sin((2 * k + 1) * angles.theta_a) ** 2
