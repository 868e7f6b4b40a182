"""KD-tree goal matching over environment descriptors."""

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from scipy.spatial import cKDTree

from src.apps.common.artifacts import atomic_write_json
from src.apps.common.exceptions import DomainFailure, MatchFailure
from src.apps.planner.constants import Action, Hand, Segment
from src.apps.planner.trajectory import ConditionVector
from src.apps.scene.generator import generate_scene

from .constants import HAND_JOINTS, ErrorMessages, MatchConfig
from .environment import encode_environment
from .goals import goal_set_from_dict, goal_set_to_dict, reaching_goals


logger = logging.getLogger(__name__)

ENV_SIZE = 16


def _anchor(goal, center):
    """
    Offset between stored and placed goals: hands follow the object in
    3D, the body only horizontally so it stays on the ground.
    """
    center = np.asarray(center, dtype=float)
    if goal.joint in HAND_JOINTS.values():
        return center
    return np.array([center[0], center[1], 0.0])


def place_goals(goals, center):
    return tuple(goal.moved(_anchor(goal, center)) for goal in goals)


def relative_goals(goals, center):
    return tuple(goal.moved(-_anchor(goal, center)) for goal in goals)


@dataclass(frozen=True)
class MatchFeature:
    env: np.ndarray
    condition: ConditionVector

    def __post_init__(self):
        env = np.asarray(self.env, dtype=float).reshape(-1)
        if env.size != ENV_SIZE or not np.all(np.isfinite(env)):
            raise ValidationError(ErrorMessages.BAD_ENV)
        object.__setattr__(self, "env", env)

    def to_dict(self):
        return {"env": self.env.tolist(), "condition": self.condition.to_dict()}

    @classmethod
    def from_dict(cls, data):
        return cls(data["env"], ConditionVector.from_dict(data["condition"]))


@dataclass(frozen=True)
class MatchEntry:
    """
    One database keyframe: the feature it is found by and the keyjoint
    goals it prescribes, relative to the object center.
    """
    feature: MatchFeature
    goals: tuple
    source: str = ""

    def to_dict(self):
        return {"feature": self.feature.to_dict(), "goals": goal_set_to_dict(self.goals), "source": self.source}

    @classmethod
    def from_dict(cls, data):
        return cls(MatchFeature.from_dict(data["feature"]), goal_set_from_dict(data["goals"]), data.get("source", ""))


@dataclass(frozen=True)
class MatchCandidate:
    distance: float
    index: int
    entry: MatchEntry

    def goals_at(self, center):
        return place_goals(self.entry.goals, center)


class MatchDatabase:
    """
    Immutable set of entries with one KD-tree per condition key.
    """

    def __init__(self, entries):
        self.entries = tuple(entries)
        groups = {}
        for index, entry in enumerate(self.entries):
            groups.setdefault(entry.feature.condition.key(), []).append(index)
        self._indices = {key: np.array(indices) for key, indices in groups.items()}
        self._trees = {
            key: cKDTree(np.stack([self.entries[i].feature.env for i in indices]))
            for key, indices in self._indices.items()
        }

    def __len__(self):
        return len(self.entries)

    def conditions(self):
        return list(self._indices)

    def tree_for(self, key):
        """
        ``(tree, entry indices)`` of one condition key, or ``None``.
        """
        if key not in self._trees:
            return None
        return self._trees[key], self._indices[key]

    def to_dict(self):
        return {"entries": [entry.to_dict() for entry in self.entries]}

    @classmethod
    def from_dict(cls, data):
        return cls(MatchEntry.from_dict(item) for item in data["entries"])


def match_goal(db, query, k=MatchConfig.K):
    """
    The ``k`` entries nearest to ``query`` among those whose condition
    matches exactly, by Euclidean distance over the environment
    descriptors. Ties keep insertion order.
    """
    if len(db) == 0:
        raise ValidationError(ErrorMessages.EMPTY_DATABASE)
    if int(k) < 1:
        raise ValidationError(ErrorMessages.BAD_K)
    key = query.condition.key()
    group = db.tree_for(key)
    if group is None:
        raise MatchFailure(ErrorMessages.NO_MATCH.format(condition="/".join(key)))

    tree, indices = group
    count = min(int(k), len(indices))
    distances, _ = tree.query(query.env, k=count)
    radius = float(np.max(np.atleast_1d(distances)))
    # Gather every entry at the k-th distance so ties resolve by index.
    local = np.asarray(tree.query_ball_point(query.env, radius * (1.0 + 1e-9) + 1e-12), dtype=int)
    exact = np.linalg.norm(tree.data[local] - query.env, axis=1)
    order = np.lexsort((indices[local], exact))[:count]
    return [
        MatchCandidate(float(exact[i]), int(indices[local[i]]), db.entries[indices[local[i]]])
        for i in order
    ]


def keyframe_entries(scene, demo, source=""):
    """
    Database entries for the contact keyframe of a demonstration: one per
    hand and segment, goals relative to the target center.
    """
    center = scene.target.center
    env = encode_environment(scene, scene.target.id)
    approach = -demo.tangents[demo.contact_index]
    contact = demo.contact_position
    entries = []
    for hand in Hand.values:
        for segment in Segment.values:
            condition = ConditionVector(float(center[2]), hand, Action.GRASP, segment)
            goals = relative_goals(
                reaching_goals(contact, approach, hand, Action.GRASP, hand_rotation=demo.contact_rotation), center,
            )
            entries.append(MatchEntry(MatchFeature(env, condition), goals, source))
    return entries


def build_match_database(seeds=MatchConfig.SEEDS, params=None):
    """
    Goal-matching database from generated scenes and the contact
    keyframes of their demonstrations. Seeds that fail to generate are
    skipped.
    """
    entries = []
    for seed in seeds:
        try:
            scene, demo = generate_scene(seed, params)
        except DomainFailure as failure:
            logger.warning("Seed %s skipped: %s", seed, failure.diagnostic())
            continue
        entries.extend(keyframe_entries(scene, demo, source=f"seed-{seed}"))
    logger.info("Match database with %d entries", len(entries))
    return MatchDatabase(entries)


def write_database(path, db, run_config=None, extra=None):
    payload = db.to_dict()
    if extra:
        payload.update(extra)
    if run_config is not None:
        payload["run_config"] = run_config.to_dict()
    return atomic_write_json(path, payload)


def read_match_database(path):
    return MatchDatabase.from_dict(json.loads(Path(path).read_text()))
