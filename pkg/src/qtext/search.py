"""Randomized Grover search when the marked count is unknown.

The schedule grows an iteration bound m geometrically: each round samples an
iteration count k uniformly below m (or from 1..m under the one-based
convention), runs k Grover iterations on a freshly prepared register,
measures once, and verifies the outcome classically. On failure m grows by
the configured factor, capped at max_m; after a failed round at the cap the
search reports not-found rather than raising.

p_m is the closed-form expected success probability when k is drawn
uniformly from {0..m-1}: 1/2 - sin(4m theta)/(4m sin(2 theta)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, NumericError, ValidationError
from .grover import MarkedSet, uniform_superposition
from .statevector import Statevector, _sample_with_rng

ZERO_BASED = "zero-based"
ONE_BASED = "one-based"
K_CONVENTIONS = (ZERO_BASED, ONE_BASED)

_SIN_2THETA_FLOOR = 1e-12


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the adaptive schedule.

    growth is the geometric factor applied to m after each failed round.
    max_m caps m; None means sqrt(N) of the register being searched.
    k_convention picks the sampling range for k: "zero-based" draws from
    {0..ceil(m)-1} (matches the closed form p_m), "one-based" from
    {1..ceil(m)} (the literal pseudo-code range).
    """

    growth: float = 1.2
    max_m: float | None = None
    k_convention: str = ZERO_BASED
    seed: int = 0

    def __post_init__(self) -> None:
        if not 1.0 < self.growth <= 2.0:
            raise ConfigError(f"growth must be in (1, 2], got {self.growth}")
        if self.max_m is not None and self.max_m < 1.0:
            raise ConfigError(f"max_m must be >= 1, got {self.max_m}")
        if self.k_convention not in K_CONVENTIONS:
            raise ConfigError(
                f"k_convention must be {ZERO_BASED!r} or {ONE_BASED!r}, "
                f"got {self.k_convention!r}"
            )


@dataclass
class SearchOutcome:
    """Result of one adaptive search run.

    found is the verified marked index, or None on loop exhaustion.
    oracle_calls counts the sampled k values plus one classical
    verification per round. iterations_log holds one (m, k, measured_x,
    success) tuple per round. pd_trace accumulates the per-iteration
    uniform-overlap statistic across all rounds. final_state is the
    pre-measurement state of the last round, which downstream feature
    extraction consumes whether or not the search succeeded.
    """

    found: int | None
    oracle_calls: int
    iterations_log: list[tuple[float, int, int, bool]]
    pd_trace: list[float]
    final_state: Statevector | None = None


def adaptive_search(
    marked: MarkedSet,
    config: SearchConfig,
    prepare: Callable[[], Statevector] | None = None,
) -> SearchOutcome:
    """Run the adaptive schedule against the marked set.

    prepare builds the fresh register state for each round; the default is
    the uniform superposition. Deterministic given config.seed.
    """
    n = marked.n_qubits
    dim = 1 << n
    max_m = config.max_m if config.max_m is not None else math.sqrt(dim)
    rng = np.random.Generator(np.random.PCG64(config.seed))
    marked_idx = list(marked.members)
    root_dim = math.sqrt(dim)

    m = 1.0
    oracle_calls = 0
    log: list[tuple[float, int, int, bool]] = []
    pd_trace: list[float] = []
    found: int | None = None
    state: Statevector | None = None

    while True:
        ceil_m = math.ceil(m)
        if config.k_convention == ZERO_BASED:
            k = int(rng.integers(0, ceil_m))
        else:
            k = int(rng.integers(1, ceil_m + 1))
        state = prepare() if prepare is not None else uniform_superposition(n)
        amps = state.amplitudes.copy()
        for _ in range(k):
            amps[marked_idx] *= -1.0
            total = amps.sum()
            pd_trace.append(abs(total / root_dim) ** 2)
            amps = (2.0 * total / dim) - amps
        state = Statevector(n, amps)
        measured = int(_sample_with_rng(amps, 1, rng)[0])
        success = marked.contains(measured)
        oracle_calls += k + 1
        log.append((m, k, measured, success))
        if success:
            found = measured
            break
        if m >= max_m:
            break
        m = min(config.growth * m, max_m)

    return SearchOutcome(found, oracle_calls, log, pd_trace, state)


def _sin_multiple(cos_2t: float, sin_2t: float, half_turns: int) -> float:
    """sin(2j*theta) for j = half_turns, by complex square-and-multiply.

    Exact-seeded evaluation: the base is (cos 2theta, sin 2theta) computed
    from sin^2 theta without ever forming theta, which keeps the small
    closed-form cases exact in double precision.
    """
    result = complex(1.0, 0.0)
    base = complex(cos_2t, sin_2t)
    e = half_turns
    while e:
        if e & 1:
            result *= base
        base *= base
        e >>= 1
    return result.imag


def p_m(n_qubits: int, a: int, m: float) -> float:
    """Expected success probability for k drawn uniformly from {0..m-1}."""
    dim = 1 << n_qubits
    if not 1 <= a < dim:
        raise ValidationError(f"need 1 <= a < {dim}, got a = {a}")
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    s2 = a / dim
    sin_2t = 2.0 * math.sqrt(s2) * math.sqrt(1.0 - s2)
    if sin_2t < _SIN_2THETA_FLOOR:
        raise NumericError(
            f"sin(2 theta) = {sin_2t} below {_SIN_2THETA_FLOOR}; "
            "success formula is degenerate"
        )
    if float(m).is_integer():
        sin_4mt = _sin_multiple(1.0 - 2.0 * s2, sin_2t, 2 * int(m))
    else:
        theta = math.asin(math.sqrt(s2))
        sin_4mt = math.sin(4.0 * m * theta)
    return 0.5 - sin_4mt / (4.0 * m * sin_2t)


def round_success_probability(
    n_qubits: int, a: int, m: float, k_convention: str = ZERO_BASED
) -> float:
    """Success probability of one round sampling k per the convention.

    The sampling range follows ceil(m), matching adaptive_search. Under the
    one-based convention the value is the k-average over {1..ceil(m)},
    derived from p_m by removing the k=0 term.
    """
    ceil_m = math.ceil(m)
    if k_convention == ZERO_BASED:
        return p_m(n_qubits, a, ceil_m)
    dim = 1 << n_qubits
    total = (ceil_m + 1) * p_m(n_qubits, a, ceil_m + 1) - a / dim
    return total / ceil_m


def schedule_success_probability(
    n_qubits: int, a: int, config: SearchConfig
) -> float:
    """Analytic probability that the full schedule finds a marked index."""
    dim = 1 << n_qubits
    max_m = config.max_m if config.max_m is not None else math.sqrt(dim)
    fail = 1.0
    m = 1.0
    while True:
        fail *= 1.0 - round_success_probability(n_qubits, a, m, config.k_convention)
        if m >= max_m:
            break
        m = min(config.growth * m, max_m)
    return 1.0 - fail


def expected_calls_bound(n_qubits: int, a: int) -> float:
    """Reference envelope 8*sqrt(N/a) on mean oracle calls."""
    dim = 1 << n_qubits
    if not 1 <= a < dim:
        raise ValidationError(f"need 1 <= a < {dim}, got a = {a}")
    return 8.0 * math.sqrt(dim / a)
