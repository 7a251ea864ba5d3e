from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Optional

from django.core.exceptions import ValidationError
from django.core.management.base import CommandError
from rest_framework import serializers as drf_serializers

from cli.serializers import RunReportSerializer
from core.exceptions import DatasetParseError
from datasets.services import GeneratorConfig, TransactionDb, generate_synthetic, load_fimi
from strategies.reports import RunReport

logger = logging.getLogger(__name__)

# Códigos de salida de los comandos
EXIT_DIFF = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CONSISTENCY = 4


def validation_message(exc: ValidationError) -> str:
    return "; ".join(exc.messages)


def parse_generator_spec(raw: str) -> GeneratorConfig:
    """"n,items,width,seed" -> GeneratorConfig."""
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 4:
        raise CommandError("--generate espera n,items,width,seed.", returncode=EXIT_USAGE)
    try:
        n, items, width, seed = int(parts[0]), int(parts[1]), float(parts[2]), int(parts[3])
    except ValueError:
        raise CommandError(f"--generate inválido: {raw!r}.", returncode=EXIT_USAGE)
    return GeneratorConfig(n=n, item_count=items, avg_width=width, seed=seed)


def load_source(input_path: Optional[str], generate: Optional[str]) -> tuple[TransactionDb, str]:
    """Dataset desde --input o --generate, con los códigos de salida del CLI."""
    if input_path:
        try:
            return load_fimi(input_path), Path(input_path).name
        except OSError as exc:
            raise CommandError(f"No se pudo leer {input_path}: {exc}", returncode=EXIT_IO)
        except (DatasetParseError, UnicodeDecodeError) as exc:
            message = validation_message(exc) if isinstance(exc, ValidationError) else str(exc)
            raise CommandError(f"{input_path}: {message}", returncode=EXIT_IO)
    if generate:
        config = parse_generator_spec(generate)
        try:
            return generate_synthetic(config), f"synthetic({generate})"
        except ValidationError as exc:
            raise CommandError(validation_message(exc), returncode=EXIT_USAGE)
    raise CommandError("Falta el dataset: use --input o --generate.", returncode=EXIT_USAGE)


# ---------------- Reportes ----------------

def report_to_json(report: RunReport, labels=None, emit_itemsets: bool = False) -> str:
    data = RunReportSerializer(
        report,
        context={"labels": labels, "emit_itemsets": emit_itemsets and report.has_itemsets},
    ).data
    return json.dumps(data, indent=2) + "\n"


def report_to_csv(report: RunReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([
        "label", "phase", "first_pass", "npass", "modes", "per_level_candidates",
        "candidate_count", "joins", "prune_checks", "pruned", "subset_node_visits",
        "emitted_pairs", "elapsed_ticks",
    ])
    for index, phase in enumerate(report.phases, start=1):
        writer.writerow([
            report.label, index, phase.first_pass, phase.npass,
            ";".join(phase.modes),
            ";".join(str(c) for c in phase.per_level_candidates),
            phase.candidate_count, phase.joins, phase.prune_checks, phase.pruned,
            phase.subset_node_visits, phase.emitted_pairs, repr(phase.elapsed),
        ])
    return buffer.getvalue()


def parse_report(text: str, db: Optional[TransactionDb] = None) -> RunReport:
    serializer = RunReportSerializer(data=json.loads(text), context={"db": db})
    serializer.is_valid(raise_exception=True)
    return serializer.save()


def load_report(path: str, db: Optional[TransactionDb] = None) -> RunReport:
    try:
        text = Path(path).read_text(encoding="utf-8")
        return parse_report(text, db)
    except OSError as exc:
        raise CommandError(f"No se pudo leer el reporte {path}: {exc}", returncode=EXIT_IO)
    except (json.JSONDecodeError, drf_serializers.ValidationError) as exc:
        raise CommandError(f"Reporte inválido {path}: {exc}", returncode=EXIT_IO)


def write_output(stdout, text: str, out_file: Optional[str] = None):
    if out_file:
        try:
            Path(out_file).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise CommandError(f"No se pudo escribir {out_file}: {exc}", returncode=EXIT_IO)
        logger.info("Reporte escrito en %s", out_file)
    else:
        stdout.write(text, ending="")


def same_experiment(reports: list[RunReport]) -> bool:
    keys = {(r.dataset, r.stats.n, r.stats.item_count, r.min_sup) for r in reports}
    return len(keys) <= 1


_PROJECT_LOGGERS = ("datasets", "candidates", "engine", "strategies", "oracle", "cli")
_VERBOSITY_LEVELS = {0: logging.ERROR, 1: logging.WARNING, 2: logging.INFO, 3: logging.DEBUG}


def apply_verbosity(verbosity: int):
    """--verbosity de Django -> nivel de los loggers del proyecto."""
    level = _VERBOSITY_LEVELS.get(verbosity, logging.DEBUG)
    for name in _PROJECT_LOGGERS:
        logging.getLogger(name).setLevel(level)
