"""Training cases sampled from the fields of generated scenes."""

from dataclasses import dataclass

import numpy as np
from django.core.exceptions import ValidationError

from src.apps.eikonal.fields import build_fields, object_centric_geometry
from src.apps.planner.trajectory import ConditionVector
from src.apps.scene.constants import GridConfig

from .constants import ErrorMessages, NormalizationConfig


def normalize_points(points, geometry):
    """
    World points mapped into the object-centric cube ``[-1, 1]^3`` of
    ``geometry``.
    """
    half = 0.5 * max(geometry.dims) * geometry.spacing
    return (np.asarray(points, dtype=float) - geometry.center) / half


def normalize_targets(values):
    return np.asarray(values, dtype=float) / np.asarray(NormalizationConfig.CHANNEL_SCALE)


def denormalize_targets(values):
    return np.asarray(values, dtype=float) * np.asarray(NormalizationConfig.CHANNEL_SCALE)


@dataclass(frozen=True)
class TrainingCase:
    """
    Field samples of one scene and condition: every cell center of the
    object-centric grid with its ``(D_t, D_o, D_toa)`` values.
    """
    scene_id: str
    condition: ConditionVector
    geometry: object
    positions: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        targets = np.asarray(self.targets, dtype=float).reshape(-1, 3)
        if not np.all(np.isfinite(targets)) or np.any(targets < 0.0):
            raise ValidationError(ErrorMessages.TARGETS_INVALID)
        if not np.all(self.geometry.bounds.contains(positions)):
            raise ValidationError(ErrorMessages.POSITIONS_OUTSIDE)
        object.__setattr__(self, "scene_id", str(self.scene_id))
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "targets", targets)

    def __len__(self):
        return len(self.positions)

    @classmethod
    def from_fields(cls, scene_id, condition, fields):
        geometry = fields.geometry
        return cls(
            scene_id,
            condition,
            geometry,
            geometry.cell_centers().reshape(-1, 3),
            fields.stacked().reshape(-1, 3),
        )

    def network_inputs(self):
        """
        Normalized positions, normalized targets and the encoded condition.
        """
        return (
            normalize_points(self.positions, self.geometry),
            normalize_targets(self.targets),
            self.condition.encode(),
        )


def default_condition(scene):
    return ConditionVector(goal_height=float(scene.target.center[2]))


def build_training_case(scene, demo, condition=None, h=GridConfig.SPACING, cube=GridConfig.CUBE_SIZE,
                        scene_id=None):
    """
    Build the three fields of ``scene`` on its object-centric grid and
    wrap them as a training case.
    """
    geometry = object_centric_geometry(scene, h, cube)
    fields = build_fields(scene, demo, geometry)
    if scene_id is None:
        scene_id = scene.meta.get("seed", "scene")
    return TrainingCase.from_fields(scene_id, condition or default_condition(scene), fields)
