import logging

from django.core.management.base import BaseCommand

from cli.services import apply_verbosity, load_report, same_experiment
from cli.tables import candidate_table, elapsed_table, render_csv, render_table

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Tabla comparativa de tiempos por fase y candidatos por fase."

    def add_arguments(self, parser):
        parser.add_argument("--inputs", nargs="+", required=True, help="RunReports JSON.")
        parser.add_argument("--format", choices=["table", "csv"], default="table")

    def handle(self, *args, **options):
        apply_verbosity(options["verbosity"])
        reports = [load_report(path) for path in options["inputs"]]

        if not same_experiment(reports):
            logger.warning("Los reportes no corresponden al mismo dataset y min_sup.")
            self.stderr.write("WARNING: los reportes mezclan datasets o min_sup distintos.")

        if options["format"] == "csv":
            # valores exactos (repr) en CSV
            self.stdout.write(render_csv(*elapsed_table(reports, exact=True)), ending="")
            self.stdout.write("")
            self.stdout.write(render_csv(*candidate_table(reports)), ending="")
            return

        self.stdout.write("Elapsed time per phase")
        self.stdout.write(render_table(*elapsed_table(reports)), ending="")
        self.stdout.write("")
        self.stdout.write("Candidates per phase")
        self.stdout.write(render_table(*candidate_table(reports)), ending="")
