"""Unit tests for the ADWT checkpoint format."""

import json
import tempfile
from pathlib import Path

import numpy as np
import torch
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from src.apps.autodecoder.checkpoints import (
    decode_checkpoint,
    encode_checkpoint,
    read_checkpoint,
    read_latents,
    sidecar_path,
    write_checkpoint,
)
from src.apps.autodecoder.network import FieldDecoder
from src.apps.autodecoder.training import TrainingResult
from src.apps.cli.run_config import RunConfig


def small_decoder():
    torch.manual_seed(0)
    return FieldDecoder(latent_size=8, hidden_size=16)


class CheckpointTest(SimpleTestCase):
    """
    Unit tests for encode_checkpoint and decode_checkpoint.
    """

    def test_restored_decoder_evaluates_identically(self):
        """
        Test that a decoded checkpoint has the stored architecture and
        reproduces the outputs of the original network exactly.
        """
        decoder = small_decoder()
        restored, digest = decode_checkpoint(encode_checkpoint(decoder, "ab" * 32))
        self.assertEqual(restored.architecture(), decoder.architecture())
        self.assertEqual(digest, "ab" * 32)
        points = torch.rand(10, 3)
        latent, condition = torch.zeros(8), torch.ones(4)
        with torch.no_grad():
            self.assertTrue(torch.equal(decoder(points, latent, condition), restored(points, latent, condition)))

    def test_header_starts_with_magic(self):
        """
        Test that the payload starts with ADWT and version 1.
        """
        data = encode_checkpoint(small_decoder())
        self.assertEqual(data[:4], b"ADWT")
        self.assertEqual(int.from_bytes(data[4:8], "little"), 1)

    def test_bad_magic_is_rejected(self):
        """
        Test that a payload with another magic raises ValidationError.
        """
        data = b"TOAF" + encode_checkpoint(small_decoder())[4:]
        with self.assertRaises(ValidationError):
            decode_checkpoint(data)

    def test_truncated_payload_is_rejected(self):
        """
        Test that a payload cut inside the parameters raises
        ValidationError.
        """
        data = encode_checkpoint(small_decoder())
        with self.assertRaises(ValidationError):
            decode_checkpoint(data[:len(data) // 2])


class CheckpointFileTest(SimpleTestCase):
    """
    Unit tests for write_checkpoint and its sidecar.
    """

    def test_sidecar_holds_latents_and_run_config(self):
        """
        Test that latents, history and the run config land next to the
        weights and the binary trailer carries the same hash.
        """
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "w.adwt"
            config = RunConfig("train-ad", {"epochs": 1})
            result = TrainingResult(small_decoder(), {"a": np.arange(8.0)}, [{"epoch": 0, "loss": 1.0}])
            write_checkpoint(path, result, config)

            _, digest = read_checkpoint(path)
            self.assertEqual(digest, config.digest)
            sidecar = json.loads(sidecar_path(path).read_text())
            self.assertEqual(sidecar["run_config"]["hash"], config.digest)
            self.assertEqual(sidecar["history"], result.history)
            np.testing.assert_array_equal(read_latents(path)["a"], np.arange(8.0))

    def test_missing_sidecar_gives_no_latents(self):
        """
        Test that a checkpoint without sidecar reads as having no latents.
        """
        with tempfile.TemporaryDirectory() as directory:
            self.assertEqual(read_latents(Path(directory) / "none.adwt"), {})
