from pathlib import Path

from django.core.management.base import CommandError

from src.apps.autodecoder.cases import build_training_case
from src.apps.autodecoder.checkpoints import write_checkpoint
from src.apps.autodecoder.constants import ErrorMessages, TrainingConfig
from src.apps.autodecoder.training import train
from src.apps.cli.base import ToolkitCommand
from src.apps.cli.constants import ExitCodes
from src.apps.scene.constants import GridConfig
from src.apps.scene.serializers import read_demonstration, read_scene


class Command(ToolkitCommand):
    help = "Train the field decoder and per-scene latent codes on a directory of scenes."

    def add_arguments(self, parser):
        parser.add_argument("--cases", required=True, help="Directory of scene JSON files with demonstrations.")
        parser.add_argument("--epochs", type=int, default=TrainingConfig.EPOCHS)
        parser.add_argument("--out", required=True)
        parser.add_argument("--lr", type=float, default=TrainingConfig.LEARNING_RATE)
        parser.add_argument("--batch", type=int, default=TrainingConfig.BATCH_SIZE)
        parser.add_argument("--seed", type=int, default=TrainingConfig.SEED)
        parser.add_argument("--latent-sigma", type=float, default=TrainingConfig.LATENT_SIGMA)
        parser.add_argument("--h", type=float, default=GridConfig.SPACING)
        parser.add_argument("--cube", type=float, default=GridConfig.CUBE_SIZE)

    def load_cases(self, directory, h, cube):
        cases = []
        for path in sorted(Path(directory).glob("*.json")):
            demo = read_demonstration(path)
            if demo is None:
                self.stderr.write(f"{path}: no demonstration, skipped")
                continue
            cases.append(build_training_case(read_scene(path), demo, h=h, cube=cube, scene_id=path.stem))
        return cases

    def run(self, config, **options):
        cases = self.load_cases(options["cases"], options["h"], options["cube"])
        if len(cases) < TrainingConfig.MIN_CASES:
            raise CommandError(ErrorMessages.NO_CASES.format(count=TrainingConfig.MIN_CASES), returncode=ExitCodes.USAGE)
        result = train(
            cases,
            epochs=options["epochs"],
            lr=options["lr"],
            latent_sigma=options["latent_sigma"],
            batch_size=options["batch"],
            seed=options["seed"],
        )
        write_checkpoint(options["out"], result, config)
        self.report(
            f"{options['out']}: {len(cases)} cases, {len(result.history)} epochs, "
            f"reconstruction {result.history[-1]['reconstruction']:.6f}"
        )
