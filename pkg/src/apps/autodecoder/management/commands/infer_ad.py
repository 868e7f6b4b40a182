import numpy as np
from django.core.management.base import CommandError

from src.apps.autodecoder.cases import default_condition
from src.apps.autodecoder.checkpoints import read_checkpoint
from src.apps.autodecoder.constants import InferenceConfig
from src.apps.autodecoder.inference import decode_field, infer_latent
from src.apps.cli.base import ToolkitCommand
from src.apps.common.artifacts import atomic_write_json
from src.apps.eikonal.fields import object_centric_geometry
from src.apps.planner.constants import Action, Hand, Segment
from src.apps.planner.trajectory import ConditionVector, read_trajectory
from src.apps.scene.constants import GridConfig
from src.apps.scene.serializers import read_demonstration, read_scene


class Command(ToolkitCommand):
    help = "Infer a latent code for a scene and decode its fields as a TOAF file."

    def add_arguments(self, parser):
        parser.add_argument("--weights", required=True)
        parser.add_argument("--scene", required=True)
        parser.add_argument("--prior", default=None, help="Trajectory JSON; defaults to the scene's demonstration.")
        parser.add_argument("--steps", type=int, default=InferenceConfig.STEPS)
        parser.add_argument("--out", required=True, help="Decoded TOAF fields.")
        parser.add_argument("--latent-out", default=None, help="Optional JSON with the latent and loss history.")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--lr", type=float, default=InferenceConfig.LEARNING_RATE)
        parser.add_argument("--hand", choices=Hand.values, default=Hand.RIGHT)
        parser.add_argument("--action", choices=Action.values, default=Action.GRASP)
        parser.add_argument("--segment", choices=Segment.values, default=Segment.APPROACH)
        parser.add_argument("--h", type=float, default=GridConfig.SPACING)
        parser.add_argument("--cube", type=float, default=GridConfig.CUBE_SIZE)

    def run(self, config, **options):
        decoder, _ = read_checkpoint(options["weights"])
        scene = read_scene(options["scene"])
        prior = read_trajectory(options["prior"]) if options["prior"] else read_demonstration(options["scene"])
        if prior is None:
            raise CommandError("The scene carries no demonstration; pass --prior.", returncode=2)
        condition = ConditionVector(
            default_condition(scene).goal_height, options["hand"], options["action"], options["segment"],
        )

        fit = infer_latent(
            decoder, scene, prior, condition,
            steps=options["steps"], lr=options["lr"], seed=options["seed"], h=options["h"], cube=options["cube"],
        )
        geometry = object_centric_geometry(scene, options["h"], options["cube"])
        fields = decode_field(decoder, fit.latent, condition, geometry)
        fields.write(options["out"], config.digest)
        if options["latent_out"]:
            atomic_write_json(options["latent_out"], {
                "latent": np.asarray(fit.latent).tolist(),
                "history": fit.history,
                "condition": condition.to_dict(),
                "run_config": config.to_dict(),
            })
        self.report(f"{options['out']}: {len(fit.history)} steps, final loss {fit.final_loss:.6f}")
