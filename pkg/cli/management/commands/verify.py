from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from cli.services import EXIT_DIFF, EXIT_USAGE, apply_verbosity, load_report, load_source, validation_message
from core.itemsets import format_itemset
from oracle.services import OracleBudgetExceeded, verify_run


class Command(BaseCommand):
    help = "Compara un RunReport contra el oráculo de fuerza bruta."

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group()
        source.add_argument("--input", help="Archivo FIMI con el que se generó el reporte.")
        source.add_argument("--generate", help="Dataset sintético: n,items,width,seed.")
        parser.add_argument("--min-sup", type=float,
                            help="Soporte mínimo; por defecto el del reporte.")
        parser.add_argument("--report", required=True, help="RunReport JSON.")

    def handle(self, *args, **options):
        apply_verbosity(options["verbosity"])
        db, _ = load_source(options["input"], options["generate"])
        report = load_report(options["report"], db)

        try:
            verdict = verify_run(report, db, min_sup=options["min_sup"])
        except OracleBudgetExceeded as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE)
        except ValidationError as exc:
            raise CommandError(validation_message(exc), returncode=EXIT_USAGE)

        if verdict.ok:
            self.stdout.write(self.style.SUCCESS(f"OK: {report.label} coincide con el oráculo."))
            return

        labels = db.labels
        for itemset, support in verdict.missing:
            self.stdout.write(f"missing  {{{format_itemset(itemset, labels)}}} support={support}")
        for itemset, support in verdict.extra:
            self.stdout.write(f"extra    {{{format_itemset(itemset, labels)}}} support={support}")
        for itemset, want, got in verdict.mismatched:
            self.stdout.write(
                f"support  {{{format_itemset(itemset, labels)}}} expected={want} reported={got}"
            )
        for k, want, got in verdict.count_mismatches:
            self.stdout.write(f"level    k={k} expected={want} reported={got}")
        raise CommandError(f"{report.label}: el reporte difiere del oráculo.", returncode=EXIT_DIFF)
