from src.apps.cli.base import ToolkitCommand
from src.apps.scene.constants import Archetype, GeneratorConfig, GridConfig
from src.apps.scene.generator import GeneratorParams, generate_scene
from src.apps.scene.serializers import write_scene


class Command(ToolkitCommand):
    help = "Generate a cluttered container scene and its demonstration."

    def add_arguments(self, parser):
        parser.add_argument("--seed", type=int, required=True)
        parser.add_argument("--archetype", choices=Archetype.values, default=Archetype.SHELF)
        parser.add_argument("--obstacles", type=int, default=GeneratorConfig.OBSTACLE_COUNT)
        parser.add_argument("--scale", type=float, default=None)
        parser.add_argument("--door-closed", action="store_true")
        parser.add_argument("--h", type=float, default=GridConfig.SPACING)
        parser.add_argument("--cube", type=float, default=GridConfig.CUBE_SIZE)
        parser.add_argument("--max-attempts", type=int, default=GeneratorConfig.MAX_ATTEMPTS)
        parser.add_argument("--out", required=True)

    def run(self, config, **options):
        params = GeneratorParams(
            archetype=options["archetype"],
            obstacle_count=options["obstacles"],
            scale=options["scale"],
            door_open=not options["door_closed"],
            spacing=options["h"],
            cube_size=options["cube"],
            max_attempts=options["max_attempts"],
        )
        scene, demo = generate_scene(options["seed"], params)
        write_scene(options["out"], scene, config, demo)
        self.report(f"{options['out']}: {len(scene.solids)} solids, demonstration {len(demo)} frames")
