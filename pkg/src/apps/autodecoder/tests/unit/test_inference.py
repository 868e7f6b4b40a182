"""Unit tests for latent inference and field decoding."""

import numpy as np
import torch
from django.test import SimpleTestCase

from src.apps.autodecoder.cases import default_condition
from src.apps.autodecoder.constants import NormalizationConfig
from src.apps.autodecoder.inference import (
    collect_observations,
    decode_field,
    infer_latent,
    target_prior_samples,
)
from src.apps.autodecoder.network import FieldDecoder
from src.apps.common.exceptions import InferenceFailure
from src.apps.eikonal.constants import FieldConfig
from src.apps.eikonal.fields import object_centric_geometry
from src.tests.helpers.scenes import lone_target_scene, sphere, straight_demo


def small_decoder(seed=0):
    torch.manual_seed(seed)
    return FieldDecoder(latent_size=8, hidden_size=32)


class InferenceTest(SimpleTestCase):
    """
    Unit tests for infer_latent and its observation set.
    """

    def setUp(self):
        self.scene = lone_target_scene(extra=(sphere("rock", (-0.2, 0.0, 0.0), 0.1),))
        self.prior = straight_demo((0.3, 0.0, 0.0), (0.04, 0.0, 0.0), speed=0.5)
        self.condition = default_condition(self.scene)
        self.geometry = object_centric_geometry(self.scene, 0.1)

    def infer(self, decoder=None, **options):
        options.setdefault("steps", 30)
        options.setdefault("h", 0.1)
        decoder = decoder if decoder is not None else small_decoder()
        return infer_latent(decoder, self.scene, self.prior, self.condition, **options)

    def test_target_samples_carry_remaining_time(self):
        """
        Test that only prior samples within 5 cm of the target are kept,
        the contact sample holding 1/epsilon_t.
        """
        positions, toa = target_prior_samples(self.scene, self.prior)
        self.assertGreater(len(positions), 0)
        self.assertTrue(np.all(positions[:, 0] < 0.04 + 0.05 + 1e-9))
        self.assertAlmostEqual(float(toa[-1]), 1.0 / FieldConfig.EPSILON_T)
        self.assertTrue(np.all(np.diff(toa) >= 0.0))

    def test_obstacle_cells_join_the_prior_set(self):
        """
        Test that the prior set holds the obstacle interior cells with a
        zero time-of-arrival target.
        """
        observations = collect_observations(self.scene, self.prior, self.condition, self.geometry)
        self.assertGreater(observations.obstacle_count, 0)
        self.assertEqual(len(observations), self.geometry.size)
        zeros = observations.prior_toa[:observations.obstacle_count]
        self.assertTrue(torch.all(zeros == 0.0))
        self.assertTrue(torch.all(observations.prior_toa <= 1.0 + 1e-6))

    def test_prior_far_from_target_fails(self):
        """
        Test that a prior never within 5 cm of the target raises
        InferenceFailure.
        """
        self.prior = straight_demo((0.3, 0.0, 0.0), (0.2, 0.0, 0.0))
        with self.assertRaises(InferenceFailure) as raised:
            self.infer()
        self.assertEqual(raised.exception.code, "inference")

    def test_loss_decreases(self):
        """
        Test that latent optimization lowers the inference loss.
        """
        fit = self.infer(steps=50, lr=1e-2)
        self.assertEqual(len(fit.history), 50)
        self.assertLess(fit.history[-1], fit.history[0])
        self.assertEqual(fit.latent.shape, (8,))

    def test_inference_is_seeded(self):
        """
        Test that the noise seed alone decides the recovered latent.
        """
        first = self.infer(seed=1)
        second = self.infer(seed=1)
        other = self.infer(seed=2)
        np.testing.assert_array_equal(first.latent, second.latent)
        self.assertFalse(np.array_equal(first.latent, other.latent))

    def test_decoder_stays_frozen(self):
        """
        Test that inference leaves the decoder weights unchanged and
        trainable afterwards.
        """
        decoder = small_decoder()
        before = [p.detach().clone() for p in decoder.parameters()]
        self.infer(decoder)
        for old, new in zip(before, decoder.parameters()):
            self.assertTrue(torch.equal(old, new))
            self.assertTrue(new.requires_grad)


class DecodeFieldTest(SimpleTestCase):
    """
    Unit tests for decode_field.
    """

    def setUp(self):
        self.scene = lone_target_scene()
        self.geometry = object_centric_geometry(self.scene, 0.1)
        self.condition = default_condition(self.scene)

    def test_decoded_fields_cover_the_grid(self):
        """
        Test that decoding fills every cell with finite non-negative
        values.
        """
        fields = decode_field(small_decoder(), np.zeros(8), self.condition, self.geometry, batch_size=100)
        self.assertEqual(fields.geometry, self.geometry)
        values = fields.stacked()
        self.assertEqual(values.shape, self.geometry.dims + (3,))
        self.assertTrue(np.all(np.isfinite(values)))
        self.assertTrue(np.all(values >= 0.0))

    def test_constant_decoder_gives_uniform_fields(self):
        """
        Test that a decoder with zero weights decodes the de-normalized
        bias image everywhere.
        """
        decoder = small_decoder()
        with torch.no_grad():
            for layer in decoder.layers:
                layer.weight.zero_()
                layer.bias.zero_()
        fields = decode_field(decoder, np.zeros(8), self.condition, self.geometry)
        expected = np.log(2.0) * np.asarray(NormalizationConfig.CHANNEL_SCALE)
        for channel, value in zip(fields.channels(), expected):
            np.testing.assert_allclose(channel.values, value, rtol=1e-6)

    def test_latent_midpoint_decodes_to_valid_fields(self):
        """
        Test that the midpoint of two latents decodes to bounded
        non-negative fields.
        """
        generator = np.random.default_rng(0)
        first, second = generator.normal(0.0, 0.5, 8), generator.normal(0.0, 0.5, 8)
        fields = decode_field(small_decoder(), 0.5 * (first + second), self.condition, self.geometry)
        values = fields.stacked()
        self.assertTrue(np.all(np.isfinite(values)))
        self.assertTrue(np.all(values >= 0.0))
