import json
from dataclasses import replace
from pathlib import Path

from src.apps.cli.base import ToolkitCommand
from src.apps.phase.constants import FilterVariant, HarnessConfig
from src.apps.phase.harness import Scenario, compare_filters, phase_rmse, run_variant, write_trace_csv


class Command(ToolkitCommand):
    help = "Track a synthetic goal phase with the Kalman filter and write the trace CSV."

    def add_arguments(self, parser):
        parser.add_argument("--scenario", default=None, help="Scenario JSON; defaults apply to missing keys.")
        parser.add_argument("--noise", type=float, default=HarnessConfig.MEASUREMENT_NOISE)
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--variant", choices=FilterVariant.values, default=FilterVariant.FUSED)
        parser.add_argument("--compare", action="store_true", help="Also report every filter variant.")
        parser.add_argument("--out", required=True)

    def run(self, config, **options):
        data = json.loads(Path(options["scenario"]).read_text()) if options["scenario"] else {}
        scenario = replace(Scenario.from_dict(data), noise=options["noise"])
        if options["seed"] is not None:
            scenario = replace(scenario, seed=options["seed"])

        truth, source, events = scenario.build()
        trace = run_variant(options["variant"], events, source, scenario.horizon, scenario.dt, scenario.body_width)
        write_trace_csv(options["out"], trace, config)

        summary = f"{options['out']}: {len(trace) - 1} steps, phase RMSE {phase_rmse(trace, truth):.4f}"
        if trace.truncated:
            summary += f" (truncated: {trace.failure})"
        self.report(summary)
        if options["compare"]:
            for variant, rmse in compare_filters(truth, events, source, scenario.horizon, scenario.dt,
                                                 scenario.body_width).items():
                self.report(f"  {variant}: {rmse:.4f}")
