import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtext.errors import ConfigError, ValidationError
from qtext.grover import analytic_success, grover_iterate, marked_set, uniform_superposition
from qtext.search import (
    ONE_BASED,
    SearchConfig,
    ZERO_BASED,
    adaptive_search,
    expected_calls_bound,
    p_m,
    round_success_probability,
    schedule_success_probability,
)


class TestSearchConfig:
    def test_defaults(self):
        config = SearchConfig()
        assert config.growth == 1.2
        assert config.max_m is None
        assert config.k_convention == ZERO_BASED

    @pytest.mark.parametrize("growth", [1.0, 0.5, 2.5])
    def test_growth_bounds(self, growth):
        with pytest.raises(ConfigError, match="growth"):
            SearchConfig(growth=growth)

    def test_growth_upper_edge_allowed(self):
        assert SearchConfig(growth=2.0).growth == 2.0

    def test_max_m_bound(self):
        with pytest.raises(ConfigError, match="max_m"):
            SearchConfig(max_m=0.5)

    def test_convention_names(self):
        with pytest.raises(ConfigError, match="k_convention"):
            SearchConfig(k_convention="fancy")


class TestPm:
    def test_quarter_exactly(self):
        assert p_m(2, 1, 1) == 0.25

    def test_m_two_exactly(self):
        assert p_m(2, 1, 2) == 0.625

    def test_input_validation(self):
        with pytest.raises(ValidationError):
            p_m(2, 0, 1)
        with pytest.raises(ValidationError):
            p_m(2, 4, 1)
        with pytest.raises(ValidationError):
            p_m(2, 1, 0)

    def test_half_marked_register_is_fine(self):
        # a = N/2 gives sin(2 theta) = 1, nowhere near the degenerate guard
        value = p_m(2, 2, 3)
        expected = np.mean([analytic_success(2, 2, k) for k in range(3)])
        assert value == pytest.approx(expected, abs=1e-12)

    def test_identity_against_k_average(self):
        for n in (2, 3, 4, 5, 6):
            dim = 1 << n
            for a in {1, 2, dim // 2, dim - 1}:
                for m in (1, 2, 3, 5, 8, 13, 16):
                    expected = np.mean(
                        [analytic_success(n, a, k) for k in range(m)]
                    )
                    assert p_m(n, a, m) == pytest.approx(expected, abs=1e-12), (
                        n, a, m,
                    )

    def test_non_integer_m_matches_formula(self):
        n, a, m = 4, 3, 2.5
        theta = math.asin(math.sqrt(a / 16))
        expected = 0.5 - math.sin(4 * m * theta) / (4 * m * math.sin(2 * theta))
        assert p_m(n, a, m) == pytest.approx(expected, abs=1e-12)

    def test_quarter_threshold(self):
        for n in (2, 3, 4, 5, 6, 7):
            dim = 1 << n
            for a in range(1, dim):
                theta = math.asin(math.sqrt(a / dim))
                threshold = 1.0 / math.sin(2 * theta)
                m = math.ceil(threshold)
                assert p_m(n, a, m) >= 0.25 - 1e-12


class TestRoundAndSchedule:
    def test_zero_based_round_is_p_m(self):
        assert round_success_probability(4, 2, 3, ZERO_BASED) == p_m(4, 2, 3)

    def test_zero_based_uses_ceil(self):
        assert round_success_probability(4, 2, 2.3, ZERO_BASED) == p_m(4, 2, 3)

    def test_one_based_round_matches_direct_average(self):
        for n, a, m in [(2, 1, 1), (4, 1, 3), (5, 2, 7), (6, 3, 4)]:
            direct = np.mean(
                [analytic_success(n, a, k) for k in range(1, m + 1)]
            )
            value = round_success_probability(n, a, m, ONE_BASED)
            assert value == pytest.approx(direct, abs=1e-12)

    def test_schedule_bounds_and_monotone_in_a(self):
        config = SearchConfig()
        p1 = schedule_success_probability(10, 1, config)
        p4 = schedule_success_probability(10, 4, config)
        p16 = schedule_success_probability(10, 16, config)
        assert 0.9 < p1 < p4 < p16 <= 1.0

    def test_schedule_matches_empirical(self):
        config = SearchConfig(k_convention=ZERO_BASED)
        analytic = schedule_success_probability(4, 1, config)
        ms = marked_set(4, [11])
        runs = 2000
        found = sum(
            adaptive_search(ms, SearchConfig(seed=s)).found is not None
            for s in range(runs)
        )
        sigma = math.sqrt(analytic * (1 - analytic) / runs)
        assert abs(found / runs - analytic) <= 4 * sigma


class TestExpectedCallsBound:
    @pytest.mark.parametrize("n,a,expected", [(8, 4, 64.0), (2, 1, 16.0), (10, 1, 256.0)])
    def test_values(self, n, a, expected):
        assert expected_calls_bound(n, a) == expected

    def test_validation(self):
        with pytest.raises(ValidationError):
            expected_calls_bound(4, 0)


class TestAdaptiveSearch:
    def test_deterministic(self):
        ms = marked_set(6, [9, 40])
        config = SearchConfig(seed=123)
        a = adaptive_search(ms, config)
        b = adaptive_search(ms, config)
        assert a.found == b.found
        assert a.oracle_calls == b.oracle_calls
        assert a.iterations_log == b.iterations_log
        assert np.array_equal(a.final_state.amplitudes, b.final_state.amplitudes)

    def test_oracle_call_accounting(self):
        outcome = adaptive_search(marked_set(6, [5]), SearchConfig(seed=4))
        ks = [k for (_, k, _, _) in outcome.iterations_log]
        assert outcome.oracle_calls == sum(ks) + len(outcome.iterations_log)
        assert len(outcome.pd_trace) == sum(ks)

    def test_m_schedule_is_clamped_geometric(self):
        # find a seed that exhausts the loop so the full schedule is logged
        ms = marked_set(4, [3])
        config = None
        outcome = None
        for seed in range(200):
            config = SearchConfig(seed=seed, growth=2.0)
            outcome = adaptive_search(ms, config)
            if outcome.found is None:
                break
        assert outcome.found is None
        ms_logged = [m for (m, _, _, _) in outcome.iterations_log]
        assert ms_logged == [1.0, 2.0, 4.0]  # clamp at sqrt(16) = 4

    def test_not_found_keeps_final_state(self):
        ms = marked_set(4, [3])
        for seed in range(200):
            outcome = adaptive_search(ms, SearchConfig(seed=seed, max_m=1.0))
            if outcome.found is None:
                assert outcome.final_state is not None
                assert len(outcome.iterations_log) == 1
                return
        pytest.fail("no exhausted run found in 200 seeds")

    def test_one_based_draws_start_at_one(self):
        ks = []
        for seed in range(50):
            outcome = adaptive_search(
                marked_set(5, [2]), SearchConfig(seed=seed, k_convention=ONE_BASED)
            )
            ks.extend(k for (_, k, _, _) in outcome.iterations_log)
        assert min(ks) >= 1

    def test_zero_based_draws_within_ceil(self):
        for seed in range(50):
            outcome = adaptive_search(marked_set(5, [2]), SearchConfig(seed=seed))
            for m, k, _, _ in outcome.iterations_log:
                assert 0 <= k < math.ceil(m) + 1e-9

    def test_prepare_called_once_per_round(self):
        calls = []

        def prepare():
            calls.append(1)
            return uniform_superposition(4)

        outcome = adaptive_search(marked_set(4, [7]), SearchConfig(seed=11),
                                  prepare=prepare)
        assert len(calls) == len(outcome.iterations_log)

    def test_final_state_replays_bitwise_through_grover_iterate(self):
        ms = marked_set(6, [17])
        outcome = adaptive_search(ms, SearchConfig(seed=21))
        last_k = outcome.iterations_log[-1][1]
        state = uniform_superposition(6)
        for _ in range(last_k):
            state = grover_iterate(state, ms)
        assert np.array_equal(state.amplitudes, outcome.final_state.amplitudes)

    def test_first_round_quarter_success(self):
        # N=4, a=1: round one draws k=0 (zero-based), so success is 1/4
        ms = marked_set(2, [1])
        runs = 10_000
        hits = sum(
            adaptive_search(ms, SearchConfig(seed=s)).iterations_log[0][3]
            for s in range(runs)
        )
        assert abs(hits / runs - 0.25) <= 0.02

    def test_almost_everything_marked(self):
        n = 4
        ms = marked_set(n, list(range(15)))
        runs = 2000
        first_round = sum(
            adaptive_search(ms, SearchConfig(seed=s)).iterations_log[0][3]
            for s in range(runs)
        )
        assert abs(first_round / runs - 15 / 16) <= 0.02

    def test_empirical_agreement_with_p_m(self):
        # fixed m: per-trial k-draw then one measurement, vs the closed form
        n, a, m = 5, 3, 7
        ms = marked_set(n, list(range(a)))
        masses = []
        state = uniform_superposition(n)
        masses.append(sum(abs(state.amplitudes[i]) ** 2 for i in ms.members))
        for _ in range(m - 1):
            state = grover_iterate(state, ms)
            masses.append(sum(abs(state.amplitudes[i]) ** 2 for i in ms.members))
        rng = np.random.Generator(np.random.PCG64(77))
        trials = 10_000
        ks = rng.integers(0, m, size=trials)
        hits = int((rng.random(trials) < np.array(masses)[ks]).sum())
        expected = p_m(n, a, m)
        sigma = math.sqrt(expected * (1 - expected) / trials)
        assert abs(hits / trials - expected) <= 3 * sigma


@given(st.integers(2, 6), st.integers(0, 10_000), st.integers(1, 3))
@settings(max_examples=60)
def test_found_always_satisfies_predicate(n, seed, a):
    ms = marked_set(n, list(range(a)))
    outcome = adaptive_search(ms, SearchConfig(seed=seed))
    if outcome.found is not None:
        assert ms.contains(outcome.found)
    for _, _, measured, success in outcome.iterations_log:
        assert success == ms.contains(measured)
