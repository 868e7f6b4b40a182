"""Constants for the autodecoder app."""

from src.apps.eikonal.constants import FieldConfig


class DecoderConfig:
    """
    Network layout: six fully connected layers, the input delivered again
    to the fifth.
    """
    POINT_SIZE = 3
    LATENT_SIZE = 128
    CONDITION_SIZE = 4
    HIDDEN_SIZE = 256
    LAYERS = 6
    SKIP_LAYER = 4
    OUTPUT_SIZE = 3


class NormalizationConfig:
    # Supremum of each channel (D_t, D_o, D_toa).
    CHANNEL_SCALE = (1.0 / FieldConfig.EPSILON, 1.0 / FieldConfig.EPSILON, 1.0 / FieldConfig.EPSILON_T)


class TrainingConfig:
    EPOCHS = 300
    LEARNING_RATE = 1e-4
    LATENT_SIGMA = 0.01
    LATENT_INIT_STD = 0.01
    BATCH_SIZE = 4096
    SEED = 0
    MIN_CASES = 2
    TRAINING_SCENES = 48
    HELD_OUT_SCENES = 16
    LOG_EVERY = 25


class InferenceConfig:
    STEPS = 100
    LEARNING_RATE = 1e-3
    PRIOR_RADIUS = 0.05
    DECODE_BATCH = 65536


class GradientCheckConfig:
    EPSILON = 1e-6
    ABSOLUTE_TOLERANCE = 1e-6
    RELATIVE_TOLERANCE = 1e-4
    SAMPLES = 3


class CheckpointFormat:
    MAGIC = b"ADWT"
    VERSION = 1


class ErrorMessages:
    NO_CASES = "Training needs at least {count} cases."
    BAD_EPOCHS = "Epoch count must be a positive integer."
    BAD_RATE = "Learning rate must be strictly positive."
    BAD_SIGMA = "Latent prior sigma must be strictly positive."
    BAD_SKIP = "Skip layer must lie strictly inside the network."
    NON_FINITE_LOSS = "Loss became non-finite at epoch {epoch}."
    NON_FINITE_LATENT = "Latent code must be finite."
    LATENT_SIZE = "Latent code must have {size} entries, got {found}."
    TARGETS_INVALID = "Training targets must be finite and non-negative."
    POSITIONS_OUTSIDE = "Training samples must lie within the object-centric cube."
    NO_TARGET_SAMPLES = "No prior sample lies within {radius} m of the target."
    CHECKPOINT_SHAPES = "Checkpoint layer shapes do not match the stored architecture."
