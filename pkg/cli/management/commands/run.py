from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from cli.services import (
    EXIT_CONSISTENCY,
    EXIT_USAGE,
    apply_verbosity,
    load_source,
    report_to_csv,
    report_to_json,
    validation_message,
    write_output,
)
from core.exceptions import ConsistencyError
from engine.models import EmissionMode, GenerationScope, Rounding, TimeMode
from engine.services import TimeSource
from strategies.models import Variant
from strategies.services import StrategyConfig, run_strategy


class Command(BaseCommand):
    help = "Ejecuta una estrategia de minado y escribe el RunReport (JSON o CSV)."

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group()
        source.add_argument("--input", help="Archivo FIMI.")
        source.add_argument("--generate", help="Dataset sintético: n,items,width,seed.")
        parser.add_argument("--min-sup", type=float, help="Soporte mínimo relativo en (0, 1].")
        parser.add_argument("--algo", choices=Variant.values, default=Variant.SPC)
        parser.add_argument("--optimized", action="store_true")
        parser.add_argument("--lines-per-split", type=int)
        parser.add_argument("--workers", type=int)
        parser.add_argument("--num-reducers", type=int)
        parser.add_argument("--time", choices=TimeMode.values)
        parser.add_argument("--cost-coeffs", help="a,b,c,d")
        parser.add_argument("--emission-mode", choices=EmissionMode.values)
        parser.add_argument("--generation-scope", choices=GenerationScope.values)
        parser.add_argument("--rounding", choices=Rounding.values)
        parser.add_argument("--fpc-width", type=int)
        parser.add_argument("--fpc-start", type=int)
        parser.add_argument("--alpha-high", type=float)
        parser.add_argument("--beta", type=float)
        parser.add_argument("--beta1", type=float)
        parser.add_argument("--beta2", type=float)
        parser.add_argument("--out", choices=["json", "csv"], default="json")
        parser.add_argument("--out-file")
        parser.add_argument("--emit-itemsets", action="store_true",
                            help="Incluye los itemsets frecuentes en el JSON.")

    def handle(self, *args, **options):
        apply_verbosity(options["verbosity"])

        if options["min_sup"] is None:
            raise CommandError("Falta --min-sup.", returncode=EXIT_USAGE)
        if options["optimized"] and options["algo"] not in (Variant.VFPC, Variant.ETDPC):
            raise CommandError("Optimized variants apply to VFPC/ETDPC", returncode=EXIT_USAGE)

        try:
            config = StrategyConfig.from_settings(
                variant=Variant(options["algo"]),
                optimized=options["optimized"],
                fpc_width=options["fpc_width"],
                fpc_start=options["fpc_start"],
                dpc_alpha_high=options["alpha_high"],
                dpc_beta=options["beta"],
                etdpc_beta1=options["beta1"],
                etdpc_beta2=options["beta2"],
                lines_per_split=options["lines_per_split"],
                num_reducers=options["num_reducers"],
                workers=options["workers"],
                emission_mode=options["emission_mode"],
                generation_scope=options["generation_scope"],
                rounding=options["rounding"],
            )
            config.clean()
            time_source = TimeSource.from_settings(options["time"], options["cost_coeffs"])
        except ValidationError as exc:
            raise CommandError(validation_message(exc), returncode=EXIT_USAGE)

        db, name = load_source(options["input"], options["generate"])

        try:
            report = run_strategy(db, options["min_sup"], config, time_source)
        except ValidationError as exc:
            raise CommandError(validation_message(exc), returncode=EXIT_USAGE)
        except ConsistencyError as exc:
            raise CommandError(str(exc), returncode=EXIT_CONSISTENCY)
        report.dataset = name

        if options["out"] == "csv":
            text = report_to_csv(report)
        else:
            text = report_to_json(report, labels=db.labels, emit_itemsets=options["emit_itemsets"])
        write_output(self.stdout, text, options["out_file"])
