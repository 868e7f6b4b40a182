from src.apps.cli.base import ToolkitCommand, vector_argument
from src.apps.common.artifacts import atomic_write_json
from src.apps.common.exceptions import SchedulingFailure
from src.apps.scene.serializers import read_scene
from src.apps.scheduler.constants import MachineState, MatchConfig
from src.apps.scheduler.matching import read_match_database
from src.apps.scheduler.navigation import BodyPose, read_navigation_database
from src.apps.scheduler.state_machine import SynthesisMachine, run_to_completion


class Command(ToolkitCommand):
    help = "Schedule the keyframe goals for fetching a clicked object."

    def add_arguments(self, parser):
        parser.add_argument("--scene", required=True)
        parser.add_argument("--click", default=None, help="Object id; the scene target by default.")
        parser.add_argument("--db", default=None, help="Goal-matching database JSON.")
        parser.add_argument("--nav-db", default=None, help="Navigation database JSON.")
        parser.add_argument("--start", type=vector_argument(2), default=(2.0, 0.0))
        parser.add_argument("--heading", type=vector_argument(2), default=(-1.0, 0.0))
        parser.add_argument("--k", type=int, default=MatchConfig.K)
        parser.add_argument("--out", required=True)

    def run(self, config, **options):
        scene = read_scene(options["scene"])
        machine = SynthesisMachine(
            scene,
            BodyPose(options["start"], options["heading"]),
            match_db=read_match_database(options["db"]) if options["db"] else None,
            nav_db=read_navigation_database(options["nav_db"]) if options["nav_db"] else None,
            k=options["k"],
        )
        steps = run_to_completion(machine, options["click"])
        last = steps[-1]
        if last.failure is not None:
            raise last.failure
        if last.diagnostic:
            raise SchedulingFailure(last.diagnostic)
        if machine.state != MachineState.IDLE:
            raise SchedulingFailure(f"still in {machine.state} after {len(steps)} steps")
        payload = {
            "click": options["click"] or scene.target.id,
            "keyframes": [step.to_dict() for step in steps],
            "run_config": config.to_dict(),
        }
        atomic_write_json(options["out"], payload)
        states = " -> ".join(str(step.state) for step in steps)
        self.report(f"{options['out']}: {len(steps)} keyframes ({states})")
