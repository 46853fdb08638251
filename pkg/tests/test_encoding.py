import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qtext.encoding import (
    WordVector,
    amplitude_encode,
    angle_encode,
    fold_to_length,
    project_to_register,
)
from qtext.errors import CapacityError, DegenerateInputError, ValidationError
from qtext.statevector import probabilities


class TestWordVector:
    def test_wraps_and_measures(self):
        w = WordVector([1.0, 2.0])
        assert len(w) == 2
        assert w.values.dtype == np.float64

    def test_rejects_empty(self):
        with pytest.raises(ValidationError):
            WordVector([])

    def test_rejects_matrix(self):
        with pytest.raises(ValidationError):
            WordVector([[1.0, 2.0]])


class TestAmplitudeEncode:
    def test_three_four_five(self):
        state = amplitude_encode(WordVector([3.0, 4.0]), 1)
        assert np.allclose(state.amplitudes, [0.6, 0.8], atol=1e-15)

    def test_uniform(self):
        state = amplitude_encode(WordVector([1.0, 1.0, 1.0, 1.0]), 2)
        assert np.allclose(state.amplitudes, [0.5, 0.5, 0.5, 0.5], atol=1e-15)

    def test_zero_padding(self):
        state = amplitude_encode(WordVector([1.0, 2.0, 2.0]), 2)
        assert np.allclose(
            state.amplitudes, [1 / 3, 2 / 3, 2 / 3, 0.0], atol=1e-15
        )

    def test_capacity_error_names_requirement(self):
        with pytest.raises(CapacityError, match="3 qubits"):
            amplitude_encode(WordVector([1.0] * 5), 2)

    def test_zero_vector_rejected(self):
        with pytest.raises(DegenerateInputError):
            amplitude_encode(WordVector([0.0, 0.0]), 1)

    def test_norm_within_tolerance(self):
        rng = np.random.Generator(np.random.PCG64(3))
        for _ in range(20):
            w = WordVector(rng.standard_normal(13))
            state = amplitude_encode(w, 4)
            assert abs(state.norm() - 1.0) <= 1e-12

    def test_round_trip_probabilities(self):
        rng = np.random.Generator(np.random.PCG64(5))
        values = rng.standard_normal(8)
        state = amplitude_encode(WordVector(values), 3)
        expected = (values / np.linalg.norm(values)) ** 2
        assert np.max(np.abs(probabilities(state) - expected)) <= 1e-12

    def test_scale_invariance(self):
        values = np.array([0.3, -1.2, 4.0, 0.01])
        a = amplitude_encode(WordVector(values), 2)
        b = amplitude_encode(WordVector(values * 7.5), 2)
        assert np.max(np.abs(a.amplitudes - b.amplitudes)) <= 1e-12

    def test_signed_components_allowed(self):
        state = amplitude_encode(WordVector([-3.0, 4.0]), 1)
        assert np.allclose(state.amplitudes, [-0.6, 0.8], atol=1e-15)


class TestAngleEncode:
    def test_pi_gives_one(self):
        state = angle_encode(WordVector([math.pi]), 1)
        assert np.allclose(state.amplitudes, [0.0, 1.0], atol=1e-12)

    def test_half_pi_gives_plus(self):
        state = angle_encode(WordVector([math.pi / 2]), 1)
        inv = 1 / math.sqrt(2)
        assert np.allclose(state.amplitudes, [inv, inv], atol=1e-12)

    def test_big_endian_product(self):
        state = angle_encode(WordVector([math.pi, 0.0]), 2)
        assert np.allclose(state.amplitudes, [0, 0, 1, 0], atol=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            angle_encode(WordVector([1.0, 2.0, 3.0]), 2)

    @given(st.integers(0, 2**31 - 1), st.integers(1, 5))
    def test_marginals_separate(self, seed, n):
        rng = np.random.Generator(np.random.PCG64(seed))
        angles = rng.uniform(-math.pi, math.pi, size=n)
        state = angle_encode(WordVector(angles), n)
        probs = probabilities(state)
        for q in range(n):
            bit = 1 << (n - 1 - q)
            p_one = probs[(np.arange(1 << n) & bit) != 0].sum()
            assert p_one == pytest.approx(math.sin(angles[q] / 2) ** 2, abs=1e-12)


class TestFoldAndProject:
    def test_identity_when_it_fits(self):
        values = np.array([1.0, 2.0, 3.0, 4.0])
        assert np.array_equal(fold_to_length(values, 4), values)

    def test_strided_fold(self):
        values = np.array([1.0, 0, 0, 0, 1.0, 0, 0, 0])
        assert np.array_equal(fold_to_length(values, 4), [2, 0, 0, 0])

    def test_pads_up(self):
        assert np.array_equal(fold_to_length(np.array([1.0, 2.0, 3.0]), 4),
                              [1, 2, 3, 0])

    def test_fold_definition(self):
        rng = np.random.Generator(np.random.PCG64(9))
        values = rng.standard_normal(11)
        out = fold_to_length(values, 4)
        for j in range(4):
            expected = sum(values[j + 4 * k] for k in range((11 + 3) // 4)
                           if j + 4 * k < 11)
            assert out[j] == pytest.approx(expected, abs=1e-12)

    def test_project_returns_register_sized_vector(self):
        w = project_to_register(np.arange(1.0, 9.0), 2)
        assert len(w) == 4
        assert np.array_equal(w.values, [1 + 5, 2 + 6, 3 + 7, 4 + 8])
