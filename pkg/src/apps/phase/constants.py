"""Constants for the phase app."""

import math

from django.db import models


class Keyjoint(models.TextChoices):
    LEFT_HAND = "left_hand", "Left hand"
    RIGHT_HAND = "right_hand", "Right hand"
    HIP = "hip", "Hip"


# Keyjoint that carries each hand's goal.
HAND_KEYJOINTS = {
    "left": Keyjoint.LEFT_HAND,
    "right": Keyjoint.RIGHT_HAND,
}


class MeasurementSource(models.TextChoices):
    PREDICTED = "predicted", "Network prediction"
    MATCHED = "matched", "Matched motion prior"


class FilterVariant(models.TextChoices):
    PREDICTED = "predicted", "Predicted only"
    MATCHED = "matched", "Matched only"
    FUSED = "fused", "Fused"


class PhaseConfig:
    CHANNELS = 8
    FRAME_RATE = 60.0
    # Nyquist bound at the frame rate.
    MAX_FREQUENCY = 30.0


class KalmanConfig:
    """
    Filter noise levels. The statistical spreads are harness defaults in
    (S, A, F) order, F in Hz.
    """
    STATISTICAL_STD = (0.05, 0.02, 0.5)
    STATISTICAL_VARIANCE = tuple(std ** 2 for std in STATISTICAL_STD)
    PROCESS_FRACTION = 0.2
    REGULARIZATION = 1e-9
    NEARBY_RADIUS = 0.4
    PSD_FLOOR = -1e-12


class DeviationConfig:
    ROTATION_WEIGHT = 1.0 / math.pi
    BODY_WIDTH = 0.4


class HarnessConfig:
    # Blend of the phase update along the frequency (B matrix).
    CONTROL_BLEND = 0.5
    CONTROL_STD = (0.01, 0.005, 0.05)
    MEASUREMENT_NOISE = 0.1
    MATCH_BIAS = 0.1
    BIAS_DRIFT = 0.02
    BIAS_PERIOD = 2.0
    CONFIDENCE = 1.0
    HORIZON = 2.0
    HAND_OFFSET = 0.6
    BURN_IN = 0.25


class ErrorMessages:
    BAD_DT = "Time step must be strictly positive."
    BAD_SIGMA = "Noise level must be non-negative."
    BAD_HORIZON = "Tracking horizon must be strictly positive."
    CHANNEL_MISMATCH = "Phase components must have one value per channel."
    NOT_PSD = "Covariance must be symmetric positive semidefinite."
    BAD_COVARIANCE_SHAPE = "Covariance must be 3x3 per channel."
    MISSING_KEYJOINT = "Keyjoint {name!r} is missing from the transform set."
    NO_EVENTS = "Tracking needs at least one goal event."
    BAD_BODY_WIDTH = "Body width must be strictly positive."
