"""Constants for the metrics app."""

from django.db import models


class BenchPlanner(models.TextChoices):
    FIELD = "field", "Time-of-arrival field from the demonstration"
    FIELD_AD = "field-ad", "Auto-decoded time-of-arrival field"
    STRAIGHT = "straight", "Straight-line baseline"


# Reported lengths are in centimeters.
CM_PER_M = 100.0


class BenchConfig:
    """
    Benchmark protocol defaults.
    """
    SEEDS = range(0, 200)
    CONTACT_WINDOW = 0.2
    # Contact is reached within one grid spacing.
    CONTACT_TOLERANCE_FACTOR = 1.0
    MIN_FRAMES = 3


class MeasureTolerance:
    DEGENERATE_SEGMENT = 1e-9


REPORT_COLUMNS = ("scene_id", "seed", "success", "unsmoothness", "safety", "rmsc", "diagnostic")


class ErrorMessages:
    TOO_FEW_FRAMES = "{name} needs at least {count} frames, got {found}."
    ALL_DEGENERATE = "Every segment of the path is degenerate."
    BAD_WINDOW = "The contact window must be strictly positive."
    WEIGHTS_REQUIRED = "The field-ad planner needs decoder weights."
    UNKNOWN_PLANNER = "Unknown planner {name!r}."
