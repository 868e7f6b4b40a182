import json
from pathlib import Path

from src.apps.cli.base import ToolkitCommand, vector_argument
from src.apps.eikonal.fields import FieldTriple
from src.apps.planner.audit import audit_collision
from src.apps.planner.constants import Action, BlendConfig, ExtractionConfig, Segment
from src.apps.planner.pipeline import plan_with_fields
from src.apps.planner.trajectory import Trajectory6, write_trajectory
from src.apps.scene.serializers import read_scene


def read_prior(path):
    """
    A trajectory JSON, or the demonstration embedded in a scene JSON.
    """
    data = json.loads(Path(path).read_text())
    return Trajectory6.from_dict(data.get("demonstration", data))


class Command(ToolkitCommand):
    help = "Plan a wrist trajectory from a time-of-arrival field and a prior."

    def add_arguments(self, parser):
        parser.add_argument("--fields", required=True)
        parser.add_argument("--prior", required=True)
        parser.add_argument("--wrist", type=vector_argument(3), required=True)
        parser.add_argument("--out", required=True)
        parser.add_argument("--segment", choices=Segment.values, default=Segment.APPROACH)
        parser.add_argument("--action", choices=Action.values, default=Action.GRASP)
        parser.add_argument("--scene", default=None, help="Scene JSON used to audit the result.")
        parser.add_argument("--step", type=float, default=None)
        parser.add_argument("--v-bar", type=float, default=ExtractionConfig.AVERAGE_WALKING_SPEED)
        parser.add_argument("--blend", type=int, default=BlendConfig.BLEND_FRAMES)
        parser.add_argument("--hadamard", action="store_true")
        parser.add_argument("--literal-orientation", action="store_true")

    def run(self, config, **options):
        fields, _ = FieldTriple.read(options["fields"])
        prior = read_prior(options["prior"])
        result = plan_with_fields(
            fields,
            prior,
            options["wrist"],
            segment=options["segment"],
            step=options["step"],
            v_bar=options["v_bar"],
            n_blend=options["blend"],
            hadamard=options["hadamard"],
            literal=options["literal_orientation"],
        )
        extra = {"contact_gap": result.contact_gap, "start": result.start.tolist(), "notes": list(result.notes)}
        if options["scene"]:
            carrying = (options["segment"] == Segment.LEAVE) == (options["action"] == Action.GRASP)
            report = audit_collision(result.trajectory, read_scene(options["scene"]), carrying=carrying)
            extra["audit"] = report.to_dict()
        write_trajectory(options["out"], result.trajectory, config, extra)
        self.report(f"{options['out']}: {len(result.trajectory)} frames, contact gap {result.contact_gap:.4f} m")
