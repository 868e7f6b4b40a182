from django.core.management.base import CommandError

from src.apps.cli.base import ToolkitCommand
from src.apps.cli.visualization import AXES, field_cloud, field_slice, ply_text, slice_csv, trajectory_cloud
from src.apps.common.artifacts import atomic_write_text
from src.apps.eikonal.constants import FieldConfig
from src.apps.eikonal.fields import FieldTriple
from src.apps.planner.trajectory import read_trajectory


class Command(ToolkitCommand):
    help = "Export a trajectory or field as a PLY point cloud and a field slice as a CSV heatmap."

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--trajectory", help="Trajectory JSON.")
        source.add_argument("--fields", help="TOAF field file.")
        parser.add_argument("--ply", default=None, help="Point cloud output.")
        parser.add_argument("--csv", default=None, help="Heatmap slice output (fields only).")
        parser.add_argument("--channel", choices=FieldConfig.CHANNELS, default="d_toa")
        parser.add_argument("--axis", choices=list(AXES), default="z")
        parser.add_argument("--at", type=float, default=None, help="Slice plane coordinate; the middle layer by default.")
        parser.add_argument("--min-value", type=float, default=0.0, help="Smallest field value exported to PLY.")

    def run(self, config, **options):
        if options["trajectory"]:
            if not options["ply"] or options["csv"]:
                raise CommandError("A trajectory exports to --ply only.", returncode=2)
            points, properties = trajectory_cloud(read_trajectory(options["trajectory"]))
            atomic_write_text(options["ply"], ply_text(points, properties, config))
            self.report(f"{options['ply']}: {len(points)} trajectory vertices")
            return

        if not (options["ply"] or options["csv"]):
            raise CommandError("Pass --ply, --csv or both.", returncode=2)
        fields, _ = FieldTriple.read(options["fields"])
        written = []
        if options["ply"]:
            points, properties = field_cloud(fields, options["channel"], options["min_value"])
            atomic_write_text(options["ply"], ply_text(points, properties, config))
            written.append(f"{options['ply']}: {len(points)} cells")
        if options["csv"]:
            points, values = field_slice(fields, options["channel"], options["axis"], options["at"])
            atomic_write_text(options["csv"], slice_csv(points, values, config))
            written.append(f"{options['csv']}: {len(values)} slice cells")
        self.report("; ".join(written))
