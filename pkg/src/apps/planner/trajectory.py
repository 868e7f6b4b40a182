"""Timestamped 6D wrist trajectories and planning conditions."""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError

from src.apps.common.artifacts import atomic_write_json
from src.apps.common.rotations import frame_from_tangent, is_rotation

from .constants import Action, ErrorMessages, Hand, Segment, TrajectoryTolerance


GOAL_HEIGHT_SCALE = 2.0


@dataclass(frozen=True)
class ConditionVector:
    goal_height: float
    hand: str = Hand.RIGHT
    action: str = Action.GRASP
    segment: str = Segment.APPROACH

    def __post_init__(self):
        object.__setattr__(self, "goal_height", float(self.goal_height))
        for value, choices in ((self.hand, Hand), (self.action, Action), (self.segment, Segment)):
            if value not in choices.values:
                raise ValidationError(f"Invalid condition value {value!r}.")

    def encode(self):
        """
        Network input: goal height over 2 m, then 0/1 for
        left/right, grasp/place and approach/leave.
        """
        return np.array([
            self.goal_height / GOAL_HEIGHT_SCALE,
            1.0 if self.hand == Hand.RIGHT else 0.0,
            1.0 if self.action == Action.PLACE else 0.0,
            1.0 if self.segment == Segment.LEAVE else 0.0,
        ])

    def key(self):
        return (self.hand, self.action, self.segment)

    def to_dict(self):
        return {
            "goal_height": self.goal_height,
            "hand": self.hand,
            "action": self.action,
            "segment": self.segment,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


@dataclass(frozen=True)
class Frame:
    t: float
    p: np.ndarray
    R: np.ndarray
    tangent: np.ndarray
    speed: float


def path_tangents(positions):
    """
    Unit tangents by central differences (one-sided at the ends).
    """
    positions = np.asarray(positions, dtype=float)
    if len(positions) < 2:
        return np.tile([1.0, 0.0, 0.0], (len(positions), 1))
    tangents = np.gradient(positions, axis=0)
    norms = np.linalg.norm(tangents, axis=1)
    for i in np.nonzero(norms <= TrajectoryTolerance.DUPLICATE_POINT)[0]:
        j = min(i + 1, len(positions) - 1)
        tangents[i] = positions[j] - positions[max(j - 1, 0)]
    norms = np.linalg.norm(tangents, axis=1)
    tangents[norms == 0.0] = (1.0, 0.0, 0.0)
    norms[norms == 0.0] = 1.0
    return tangents / norms[:, None]


def drop_repeated_points(positions, speeds):
    positions = np.asarray(positions, dtype=float)
    speeds = np.asarray(speeds, dtype=float)
    if len(positions) < 2:
        return positions, speeds
    steps = np.linalg.norm(np.diff(positions, axis=0), axis=1)
    keep = np.concatenate([[True], steps > TrajectoryTolerance.DUPLICATE_POINT])
    return positions[keep], speeds[keep]


def timestamps(positions, speeds, start=0.0):
    """
    Times from arc length over the mean speed of each segment.
    """
    positions = np.asarray(positions, dtype=float)
    speeds = np.asarray(speeds, dtype=float)
    if len(positions) < 2:
        return np.array([start])
    steps = np.linalg.norm(np.diff(positions, axis=0), axis=1)
    mean_speed = 0.5 * (speeds[1:] + speeds[:-1])
    return start + np.concatenate([[0.0], np.cumsum(steps / mean_speed)])


@dataclass(frozen=True)
class Trajectory6:
    """
    End-effector trajectory stored column-wise: ``times (n,)``,
    ``positions (n, 3)``, ``rotations (n, 3, 3)``, ``tangents (n, 3)``,
    ``speeds (n,)``.
    """
    times: np.ndarray
    positions: np.ndarray
    rotations: np.ndarray
    tangents: np.ndarray
    speeds: np.ndarray
    contact_index: int

    def __post_init__(self):
        for name in ("times", "positions", "rotations", "tangents", "speeds"):
            array = np.array(getattr(self, name), dtype=float)
            array.setflags(write=False)
            object.__setattr__(self, name, array)
        object.__setattr__(self, "contact_index", int(self.contact_index))
        self.validate()

    def validate(self):
        n = len(self.times)
        if n == 0:
            raise ValidationError(ErrorMessages.TOO_SHORT.format(name="A trajectory", count=1))
        shapes = {
            "positions": (n, 3),
            "rotations": (n, 3, 3),
            "tangents": (n, 3),
            "speeds": (n,),
        }
        for name, shape in shapes.items():
            if getattr(self, name).shape != shape:
                raise ValidationError(f"Trajectory {name} must have shape {shape}.")
        if not 0 <= self.contact_index < n:
            raise ValidationError(ErrorMessages.CONTACT_OUT_OF_RANGE.format(index=self.contact_index))
        if np.any(np.diff(self.times) <= 0.0):
            raise ValidationError(ErrorMessages.TIMES_NOT_INCREASING)
        norms = np.linalg.norm(self.tangents, axis=1)
        bad = np.nonzero(np.abs(norms - 1.0) > TrajectoryTolerance.TANGENT)[0]
        if len(bad):
            raise ValidationError(ErrorMessages.TANGENT_NOT_UNIT.format(index=int(bad[0])))
        for index, rotation in enumerate(self.rotations):
            if not is_rotation(rotation, TrajectoryTolerance.ROTATION):
                raise ValidationError(ErrorMessages.NOT_ROTATION.format(index=index))

    def __len__(self):
        return len(self.times)

    def frame(self, index):
        return Frame(
            float(self.times[index]),
            self.positions[index],
            self.rotations[index],
            self.tangents[index],
            float(self.speeds[index]),
        )

    @property
    def contact_position(self):
        return self.positions[self.contact_index]

    @property
    def contact_rotation(self):
        return self.rotations[self.contact_index]

    @property
    def length(self):
        return float(np.sum(np.linalg.norm(np.diff(self.positions, axis=0), axis=1)))

    @classmethod
    def from_path(cls, positions, speeds, rotations=None, contact_index=-1, start_time=0.0):
        """
        Build a trajectory from positions and speeds. Without rotations
        every frame is aligned with its tangent.
        """
        positions = np.asarray(positions, dtype=float)
        speeds = np.asarray(speeds, dtype=float)
        tangents = path_tangents(positions)
        if rotations is None:
            rotations = np.stack([frame_from_tangent(t) for t in tangents])
        if contact_index < 0:
            contact_index += len(positions)
        return cls(
            timestamps(positions, speeds, start_time),
            positions,
            rotations,
            tangents,
            speeds,
            contact_index,
        )

    def reversed(self):
        """
        Same samples in reverse order; times are re-measured from zero.
        """
        times = self.times[-1] - self.times[::-1]
        return Trajectory6(
            times,
            self.positions[::-1],
            self.rotations[::-1],
            -self.tangents[::-1],
            self.speeds[::-1],
            len(self) - 1 - self.contact_index,
        )

    def transformed(self, rotation, translation):
        rotation = np.asarray(rotation, dtype=float)
        return Trajectory6(
            self.times,
            self.positions @ rotation.T + translation,
            np.einsum("ij,njk->nik", rotation, self.rotations),
            self.tangents @ rotation.T,
            self.speeds,
            self.contact_index,
        )

    def retimed(self, scale):
        """
        Time axis scaled by ``scale``; speeds scale inversely.
        """
        return Trajectory6(
            self.times * scale,
            self.positions,
            self.rotations,
            self.tangents,
            self.speeds / scale,
            self.contact_index,
        )

    def to_dict(self):
        frames = []
        for i in range(len(self)):
            frames.append({
                "t": float(self.times[i]),
                "p": self.positions[i].tolist(),
                "R": self.rotations[i].reshape(9).tolist(),
                "tangent": self.tangents[i].tolist(),
                "speed": float(self.speeds[i]),
            })
        return {"frames": frames, "contact_index": self.contact_index}

    @classmethod
    def from_dict(cls, data):
        frames = data["frames"]
        return cls(
            np.array([f["t"] for f in frames]),
            np.array([f["p"] for f in frames]),
            np.array([f["R"] for f in frames]).reshape(-1, 3, 3),
            np.array([f["tangent"] for f in frames]),
            np.array([f["speed"] for f in frames]),
            data["contact_index"],
        )


def write_trajectory(path, trajectory, run_config=None, extra=None):
    payload = trajectory.to_dict()
    if extra:
        payload.update(extra)
    if run_config is not None:
        payload["run_config"] = run_config.to_dict()
    return atomic_write_json(path, payload)


def read_trajectory(path):
    data = json.loads(Path(path).read_text())
    return Trajectory6.from_dict(data)
