from pathlib import Path

from django.core.management.base import BaseCommand

from cli.services import apply_verbosity, load_source
from cli.tables import render_table
from datasets.services import stats


class Command(BaseCommand):
    help = "Atributos de uno o más datasets FIMI: N, |I| y ancho promedio."

    def add_arguments(self, parser):
        parser.add_argument("paths", nargs="+")

    def handle(self, *args, **options):
        apply_verbosity(options["verbosity"])
        rows = []
        for path in options["paths"]:
            db, _ = load_source(path, None)
            summary = stats(db)
            rows.append([Path(path).name, str(summary.n), str(summary.item_count), f"{summary.avg_width:.2f}"])
        self.stdout.write(render_table(["Dataset", "N", "|I|", "Avg width"], rows), ending="")
