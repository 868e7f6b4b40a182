"""Scene-generalization benchmark of the wrist trajectory planners."""

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import partial

import numpy as np
from django.core.exceptions import ValidationError

from src.apps.autodecoder.cases import default_condition
from src.apps.autodecoder.constants import InferenceConfig
from src.apps.autodecoder.inference import decode_field, infer_latent
from src.apps.common.artifacts import atomic_write_json, atomic_write_text
from src.apps.common.exceptions import DomainFailure
from src.apps.eikonal.fields import build_fields, object_centric_geometry
from src.apps.planner.audit import audit_collision
from src.apps.planner.pipeline import plan_with_fields, straight_line_plan
from src.apps.scene.constants import Archetype, GridConfig
from src.apps.scene.generator import GeneratorParams, generate_scene

from .constants import REPORT_COLUMNS, BenchConfig, BenchPlanner, ErrorMessages
from .measures import contact_reached, rms_curvature, safety_distance, unsmoothness


logger = logging.getLogger(__name__)


BENCH_ARCHETYPES = (Archetype.SHELF, Archetype.CABINET, Archetype.DRAWER)


def rotating_archetypes(seed, params=None):
    """
    Scene source cycling shelf, cabinet and drawer layouts by seed.
    """
    params = replace(params or GeneratorParams(), archetype=BENCH_ARCHETYPES[int(seed) % len(BENCH_ARCHETYPES)])
    return generate_scene(seed, params)


def straight_planner(scene, demo):
    return straight_line_plan(demo, demo.positions[0])


def field_planner(scene, demo, h=GridConfig.SPACING):
    fields = build_fields(scene, demo, object_centric_geometry(scene, h))
    return plan_with_fields(fields, demo, demo.positions[0])


@dataclass(frozen=True)
class DecodedFieldPlanner:
    """
    Plans through a field decoded from a latent code optimized for each
    scene against its demonstration.
    """
    decoder: object
    steps: int = InferenceConfig.STEPS
    seed: int = 0
    h: float = GridConfig.SPACING

    def __call__(self, scene, demo):
        condition = default_condition(scene)
        fit = infer_latent(self.decoder, scene, demo, condition, steps=self.steps, seed=self.seed, h=self.h)
        fields = decode_field(self.decoder, fit.latent, condition, object_centric_geometry(scene, self.h))
        return plan_with_fields(fields, demo, demo.positions[0])


def planner_for(name, decoder=None, h=GridConfig.SPACING):
    if name == BenchPlanner.STRAIGHT:
        return straight_planner
    if name == BenchPlanner.FIELD:
        return partial(field_planner, h=h)
    if name == BenchPlanner.FIELD_AD:
        if decoder is None:
            raise ValidationError(ErrorMessages.WEIGHTS_REQUIRED)
        return DecodedFieldPlanner(decoder, h=h)
    raise ValidationError(ErrorMessages.UNKNOWN_PLANNER.format(name=name))


@dataclass(frozen=True)
class SceneResult:
    """
    Outcome of one benchmark scene. Metrics are ``None`` when they could
    not be measured; ``safety`` is only measured on successes.
    """
    scene_id: str
    seed: int
    success: bool
    unsmoothness: float = None
    safety: float = None
    rmsc: float = None
    diagnostic: str = ""

    def to_dict(self):
        return asdict(self)


def _mean(values):
    finite = [value for value in values if value is not None and math.isfinite(value)]
    return float(np.mean(finite)) if finite else None


@dataclass(frozen=True)
class BenchReport:
    planner: str
    window: float
    records: tuple = field(default=())

    @property
    def successes(self):
        return [record for record in self.records if record.success]

    @property
    def success_rate(self):
        if not self.records:
            return 0.0
        return 100.0 * len(self.successes) / len(self.records)

    def aggregate(self):
        """
        Success rate (%) over every scene; the metric means over the
        successful scenes only.
        """
        successes = self.successes
        return {
            "scenes": len(self.records),
            "success_rate": self.success_rate,
            "unsmoothness": _mean(record.unsmoothness for record in successes),
            "safety": _mean(record.safety for record in successes),
            "rmsc": _mean(record.rmsc for record in successes),
        }

    def to_dict(self):
        return {
            "planner": self.planner,
            "window": self.window,
            "aggregate": self.aggregate(),
            "scenes": [record.to_dict() for record in self.records],
        }


def _measure(function, *args):
    try:
        return function(*args)
    except ValidationError:
        return None


def evaluate_scene(seed, planner, source, window=BenchConfig.CONTACT_WINDOW, tolerance=None):
    """
    Generate, plan and audit one scene. Failures become unsuccessful
    records carrying their diagnostic.
    """
    scene_id = f"seed-{seed}"
    tolerance = GridConfig.SPACING * BenchConfig.CONTACT_TOLERANCE_FACTOR if tolerance is None else tolerance
    try:
        scene, demo = source(seed)
        result = planner(scene, demo)
    except DomainFailure as failure:
        logger.info("Scene %s failed: %s", scene_id, failure.diagnostic())
        return SceneResult(scene_id, int(seed), False, diagnostic=failure.diagnostic())
    except ValidationError as error:
        diagnostic = f"invalid: {'; '.join(error.messages)}"
        logger.warning("Scene %s rejected: %s", scene_id, diagnostic)
        return SceneResult(scene_id, int(seed), False, diagnostic=diagnostic)

    trajectory = result.trajectory
    audit = audit_collision(trajectory, scene)
    reached = contact_reached(trajectory, scene, tolerance) and result.contact_gap <= tolerance
    success = audit.collision_free and reached
    if not audit.collision_free:
        diagnostic = f"collision: frame {audit.offending_frame} hits {audit.offending_solid}"
    elif not reached:
        diagnostic = f"contact: gap {result.contact_gap:.4f} m"
    else:
        diagnostic = ""
    safety = safety_distance(trajectory, scene, window) if success else None
    return SceneResult(
        scene_id,
        int(seed),
        success,
        unsmoothness=_measure(unsmoothness, trajectory),
        safety=safety if safety is not None and math.isfinite(safety) else None,
        rmsc=_measure(rms_curvature, trajectory),
        diagnostic=diagnostic,
    )


def benchmark(seeds, planner=BenchPlanner.FIELD, window=BenchConfig.CONTACT_WINDOW, threads=1, decoder=None,
              params=None, source=None):
    """
    Evaluate ``planner`` on the generated scene of every seed.

    ``planner`` is a ``BenchPlanner`` name or any callable taking
    ``(scene, demo)`` and returning a ``PlanResult``; ``source`` replaces
    the scene generator. Scenes run in up to ``threads`` worker processes
    and the records keep the seed order.
    """
    params = params or GeneratorParams()
    if isinstance(planner, str):
        name, plan = str(planner), planner_for(planner, decoder, params.spacing)
    else:
        name, plan = getattr(planner, "__name__", type(planner).__name__), planner
    source = source or partial(generate_scene, params=params)
    task = partial(
        evaluate_scene,
        planner=plan,
        source=source,
        window=window,
        tolerance=params.spacing * BenchConfig.CONTACT_TOLERANCE_FACTOR,
    )

    seeds = list(seeds)
    workers = min(max(int(threads), 1), len(seeds))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(task, seeds))
    else:
        records = [task(seed) for seed in seeds]

    report = BenchReport(name, float(window), tuple(records))
    logger.info("Benchmark %s over %d scenes: %.1f%% success", name, len(records), report.success_rate)
    return report


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def report_csv(report, run_config=None):
    buffer = io.StringIO()
    if run_config is not None:
        buffer.write(f"# config_hash={run_config.digest}\n")
    writer = csv.DictWriter(buffer, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for record in report.records:
        writer.writerow({key: _cell(value) for key, value in record.to_dict().items()})
    return buffer.getvalue()


def write_report_json(path, report, run_config=None):
    payload = report.to_dict()
    if run_config is not None:
        payload["run_config"] = run_config.to_dict()
    return atomic_write_json(path, payload)


def write_report_csv(path, report, run_config=None):
    return atomic_write_text(path, report_csv(report, run_config))
