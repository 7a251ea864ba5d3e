from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from cli.services import EXIT_USAGE, apply_verbosity, validation_message, write_output
from datasets.services import GeneratorConfig, generate_synthetic, serialize_fimi, stats


class Command(BaseCommand):
    help = "Genera un dataset sintético en formato FIMI."

    def add_arguments(self, parser):
        parser.add_argument("--n", type=int, required=True, help="Número de transacciones.")
        parser.add_argument("--items", type=int, required=True, help="Tamaño del universo de items.")
        parser.add_argument("--width", type=float, required=True, help="Ancho promedio.")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--zipf", type=float, default=1.0, help="Exponente de popularidad.")
        parser.add_argument("--out-file")

    def handle(self, *args, **options):
        apply_verbosity(options["verbosity"])
        config = GeneratorConfig(
            n=options["n"],
            item_count=options["items"],
            avg_width=options["width"],
            seed=options["seed"],
            zipf_exponent=options["zipf"],
        )
        try:
            db = generate_synthetic(config)
        except ValidationError as exc:
            raise CommandError(validation_message(exc), returncode=EXIT_USAGE)

        write_output(self.stdout, serialize_fimi(db), options["out_file"])
        if options["out_file"]:
            summary = stats(db)
            self.stderr.write(
                f"{options['out_file']}: N={summary.n} |I|={summary.item_count} "
                f"ancho={summary.avg_width:.2f}"
            )
