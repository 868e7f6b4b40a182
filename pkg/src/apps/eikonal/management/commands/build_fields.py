from django.core.management.base import CommandError

from src.apps.cli.base import ToolkitCommand
from src.apps.eikonal.constants import FieldConfig
from src.apps.eikonal.fields import build_fields, object_centric_geometry
from src.apps.planner.trajectory import read_trajectory
from src.apps.scene.constants import GridConfig
from src.apps.scene.serializers import read_demonstration, read_scene


class Command(ToolkitCommand):
    help = "Build the D_t, D_o and D_toa fields of a scene as a TOAF file."

    def add_arguments(self, parser):
        parser.add_argument("--scene", required=True)
        parser.add_argument("--demo", default=None, help="Trajectory JSON; defaults to the scene's demonstration.")
        parser.add_argument("--out", required=True)
        parser.add_argument("--sigma", type=float, default=FieldConfig.SIGMA)
        parser.add_argument("--h", type=float, default=GridConfig.SPACING)
        parser.add_argument("--cube", type=float, default=GridConfig.CUBE_SIZE)

    def run(self, config, **options):
        scene = read_scene(options["scene"])
        demo = read_trajectory(options["demo"]) if options["demo"] else read_demonstration(options["scene"])
        if demo is None:
            raise CommandError("The scene carries no demonstration; pass --demo.", returncode=2)
        geometry = object_centric_geometry(scene, options["h"], options["cube"])
        fields = build_fields(scene, demo, geometry, sigma=options["sigma"])
        fields.write(options["out"], config.digest)
        self.report(f"{options['out']}: {geometry.dims} cells, 3 channels")
