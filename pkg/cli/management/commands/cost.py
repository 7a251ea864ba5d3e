from django.core.management.base import BaseCommand

from cli.services import apply_verbosity, load_report
from cli.tables import cost_table, optimized_deltas, render_csv, render_table


class Command(BaseCommand):
    help = "Desglose del modelo de costo por fase y deltas optimizado vs. normal."

    def add_arguments(self, parser):
        parser.add_argument("--inputs", nargs="+", required=True, help="RunReports JSON.")
        parser.add_argument("--format", choices=["table", "csv"], default="table")

    def handle(self, *args, **options):
        apply_verbosity(options["verbosity"])
        reports = [load_report(path) for path in options["inputs"]]
        render = render_csv if options["format"] == "csv" else render_table

        self.stdout.write(render(*cost_table(reports)), ending="")
        header, rows = optimized_deltas(reports)
        if rows:
            self.stdout.write("")
            self.stdout.write(render(header, rows), ending="")

        for report in reports:
            if not report.optimized:
                continue
            # en las variantes optimizadas sólo la primera pasada de cada fase poda
            clean = all(
                checks == 0
                for phase in report.phases
                for checks in phase.per_level_prune_checks[1:]
            )
            status = "0 en pasadas no iniciales" if clean else "DISTINTO DE CERO en pasadas no iniciales"
            self.stdout.write(f"{report.label}: prune_checks {status}")
