"""Unit tests for phase states and their embedding."""

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from src.apps.phase.harness import embed_and_noise
from src.apps.phase.state import (
    GoalEstimate,
    Measurement,
    PhaseState,
    PhaseVector,
    wrap_phase,
    wrapped_difference,
)


class PhaseStateTest(SimpleTestCase):
    """
    Unit tests for PhaseState normalization.
    """

    def test_components_are_normalized(self):
        """
        Test that phases wrap while amplitudes and frequencies clamp.
        """
        state = PhaseState([1.25, -0.25], [1.4, -0.1], [45.0, -2.0])
        np.testing.assert_allclose(state.phase, [0.25, 0.75])
        np.testing.assert_allclose(state.amplitude, [1.0, 0.0])
        np.testing.assert_allclose(state.frequency, [30.0, 0.0])

    def test_tiny_negative_phase_wraps_below_one(self):
        """
        Test that wrapping never produces exactly 1.
        """
        self.assertLess(float(wrap_phase(-1e-18)), 1.0)

    def test_mismatched_channels_are_rejected(self):
        """
        Test that components of different lengths raise ValidationError.
        """
        with self.assertRaises(ValidationError):
            PhaseState([0.1, 0.2], [0.5], [1.0, 1.0])

    def test_wrapped_difference_range(self):
        """
        Test that circular differences land in (-0.5, 0.5].
        """
        np.testing.assert_allclose(wrapped_difference([0.01, 0.99, 0.75, 0.25], [0.99, 0.01, 0.25, 0.75]),
                                   [0.02, -0.02, 0.5, 0.5])

    def test_dict_round_trip_keeps_values(self):
        """
        Test that a state survives its dict form.
        """
        state = PhaseState([0.1, 0.6], [0.3, 0.9], [1.0, 2.5])
        restored = PhaseState.from_dict(state.to_dict())
        np.testing.assert_array_equal(restored.as_array(), state.as_array())


class EstimateTest(SimpleTestCase):
    """
    Unit tests for GoalEstimate and Measurement.
    """

    def test_covariance_broadcasts_per_channel(self):
        """
        Test that a single 3x3 covariance is copied to every channel.
        """
        estimate = GoalEstimate(PhaseState.zeros(4), np.eye(3))
        self.assertEqual(estimate.covariance.shape, (4, 3, 3))
        np.testing.assert_allclose(estimate.trace, [3.0] * 4)

    def test_measurement_rejects_indefinite_covariance(self):
        """
        Test that a measurement covariance with a negative eigenvalue is
        rejected.
        """
        with self.assertRaises(ValidationError):
            Measurement(PhaseState.zeros(2), np.diag([1.0, -0.5, 1.0]))

    def test_measurement_rejects_asymmetric_covariance(self):
        """
        Test that an asymmetric covariance is rejected.
        """
        covariance = np.eye(3)
        covariance[0, 1] = 0.3
        with self.assertRaises(ValidationError):
            Measurement(PhaseState.zeros(2), covariance)


class EmbedTest(SimpleTestCase):
    """
    Unit tests for PhaseVector and embed_and_noise.
    """

    def test_quarter_phase(self):
        """
        Test that S = 0.25 with unit amplitude embeds to (0, 1).
        """
        vector = PhaseVector.embed(PhaseState([0.25], [1.0], [2.0]))
        np.testing.assert_allclose(vector.pairs[0], [0.0, 1.0], atol=1e-12)

    def test_noise_free_pairs_have_amplitude_norm(self):
        """
        Test that without noise each pair's norm equals the amplitude.
        """
        rng = np.random.default_rng(4)
        state = PhaseState(rng.uniform(0, 1, 8), rng.uniform(0, 1, 8), rng.uniform(0, 5, 8))
        vector = embed_and_noise(state, sigma=0.0, seed=1)
        np.testing.assert_allclose(vector.amplitudes, state.amplitude, atol=1e-9)
        np.testing.assert_array_equal(vector.frequency, state.frequency)

    def test_embedding_inverts(self):
        """
        Test that the phase state is recovered from its exact embedding.
        """
        state = PhaseState([0.1, 0.6, 0.95], [0.5, 0.7, 0.2], [1.0, 2.0, 3.0])
        restored = PhaseVector.embed(state).to_state()
        np.testing.assert_allclose(wrapped_difference(restored.phase, state.phase), 0.0, atol=1e-12)
        np.testing.assert_allclose(restored.amplitude, state.amplitude)

    def test_noise_is_seeded(self):
        """
        Test that equal seeds draw equal noise.
        """
        state = PhaseState.zeros(8)
        first = embed_and_noise(state, 0.1, seed=9)
        second = embed_and_noise(state, 0.1, seed=9)
        np.testing.assert_array_equal(first.pairs, second.pairs)
        np.testing.assert_array_equal(first.frequency, second.frequency)

    def test_noise_variance(self):
        """
        Test that the empirical variance of 1e5 draws is within 5% of
        sigma squared.
        """
        channels = 100_000
        state = PhaseState(np.zeros(channels), np.ones(channels), np.full(channels, 2.0))
        vector = embed_and_noise(state, sigma=0.1, seed=0)
        exact = PhaseVector.embed(state)
        residuals = [vector.pairs[:, 0] - exact.pairs[:, 0], vector.pairs[:, 1] - exact.pairs[:, 1],
                     vector.frequency - exact.frequency]
        for residual in residuals:
            self.assertAlmostEqual(float(np.var(residual)), 0.01, delta=0.0005)

    def test_negative_sigma_is_rejected(self):
        """
        Test that a negative noise level raises ValidationError.
        """
        with self.assertRaises(ValidationError):
            embed_and_noise(PhaseState.zeros(1), sigma=-0.1)
