from __future__ import annotations

import csv
import io
from typing import Sequence

from strategies.models import PassMode
from strategies.reports import RunReport


def _ticks(value: float) -> str:
    return f"{value:.3f}"


def _max_pass(reports: Sequence[RunReport]) -> int:
    return max((p.last_pass for r in reports for p in r.phases), default=0)


def elapsed_table(reports: Sequence[RunReport], exact: bool = False) -> tuple[list[str], list[list[str]]]:
    """
    Tiempo por fase alineado por pasada: el valor de una fase va en la
    columna de su primera pasada. Luego Total (suma) y Actual.
    """
    fmt = repr if exact else _ticks
    passes = _max_pass(reports)
    header = ["Algorithm (phases)"] + [f"Pass {i}" for i in range(1, passes + 1)] + ["Total", "Actual"]
    rows = []
    for report in reports:
        cells = [""] * passes
        for phase in report.phases:
            cells[phase.first_pass - 1] = fmt(phase.elapsed)
        rows.append(
            [f"{report.label} ({report.phase_count})"]
            + cells
            + [fmt(report.total_elapsed), fmt(report.actual_elapsed)]
        )
    return header, rows


def candidate_table(reports: Sequence[RunReport]) -> tuple[list[str], list[list[str]]]:
    """Candidatos por fase desde la pasada 2 (Job1 no genera candidatos)."""
    passes = _max_pass(reports)
    header = ["Algorithm"] + [f"Pass {i}" for i in range(2, passes + 1)]
    rows = []
    for report in reports:
        cells = [""] * max(passes - 1, 0)
        for phase in report.phases:
            if phase.first_pass >= 2:
                cells[phase.first_pass - 2] = str(phase.candidate_count)
        rows.append([report.label] + cells)
    return header, rows


def cost_table(reports: Sequence[RunReport]) -> tuple[list[str], list[list[str]]]:
    header = [
        "Algorithm", "Passes", "Modes", "Candidates", "Joins", "Prune checks",
        "Pruned", "Subset visits", "Emitted pairs", "Unpruned prune checks",
    ]
    rows = []
    for report in reports:
        for phase in report.phases:
            unpruned_checks = sum(
                checks
                for mode, checks in zip(phase.modes, phase.per_level_prune_checks)
                if mode == PassMode.UNPRUNED
            )
            rows.append([
                report.label,
                f"{phase.first_pass}-{phase.last_pass}" if phase.npass > 1 else str(phase.first_pass),
                "/".join(phase.modes),
                str(phase.candidate_count),
                str(phase.joins),
                str(phase.prune_checks),
                str(phase.pruned),
                str(phase.subset_node_visits),
                str(phase.emitted_pairs),
                str(unpruned_checks),
            ])
    return header, rows


def cost_totals(report: RunReport) -> dict[str, int]:
    return {
        "candidates": sum(p.candidate_count for p in report.phases),
        "joins": sum(p.joins for p in report.phases),
        "prune_checks": sum(p.prune_checks for p in report.phases),
        "pruned": sum(p.pruned for p in report.phases),
        "subset_node_visits": sum(p.subset_node_visits for p in report.phases),
        "emitted_pairs": sum(p.emitted_pairs for p in report.phases),
        "unpruned_passes": sum(
            1 for p in report.phases for mode in p.modes if mode == PassMode.UNPRUNED
        ),
    }


def optimized_deltas(reports: Sequence[RunReport]) -> tuple[list[str], list[list[str]]]:
    """
    Optimized-X menos X para cada variante que aparezca en ambas formas.
    """
    header = ["Variant", "Candidates", "Joins", "Prune checks", "Subset visits", "Emitted pairs"]
    plain = {r.variant: r for r in reports if not r.optimized}
    rows = []
    for report in reports:
        base = plain.get(report.variant)
        if not report.optimized or base is None:
            continue
        opt, ref = cost_totals(report), cost_totals(base)
        rows.append([
            report.label,
            *(f"{opt[key] - ref[key]:+d}" for key in
              ("candidates", "joins", "prune_checks", "subset_node_visits", "emitted_pairs")),
        ])
    return header, rows


def render_table(header: list[str], rows: list[list[str]]) -> str:
    if not rows:
        return ""
    widths = [
        max(len(str(row[i])) for row in [header] + rows)
        for i in range(len(header))
    ]
    lines = [
        "  ".join(str(cell).ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in [header] + rows
    ]
    return "\n".join(lines) + "\n"


def render_csv(header: list[str], rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()
