"""
Implementaciones de referencia, deliberadamente simples y sin código
compartido con `candidates`: generación por conjuntos, conteo por fuerza
bruta y un Apriori secuencial por niveles.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional

from django.conf import settings

from datasets.services import TransactionDb
from engine.models import Rounding
from engine.services import threshold

logger = logging.getLogger(__name__)


class OracleBudgetExceeded(ValueError):
    pass


@dataclass
class Verdict:
    missing: list[tuple[tuple[int, ...], int]] = field(default_factory=list)
    extra: list[tuple[tuple[int, ...], int]] = field(default_factory=list)
    # (itemset, soporte esperado, soporte reportado)
    mismatched: list[tuple[tuple[int, ...], int, int]] = field(default_factory=list)
    # (k, esperado, reportado) cuando el reporte sólo trae conteos
    count_mismatches: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.missing or self.extra or self.mismatched or self.count_mismatches)


def set_based_gen(prev: Iterable[tuple[int, ...]], prune: bool) -> set[tuple[int, ...]]:
    """
    Join explícito por pares que comparten los primeros k-1 items; con
    prune=True se prueban TODOS los (k-1)-subconjuntos, sin cortar.
    """
    prev = {tuple(s) for s in prev}
    by_prefix: dict[tuple[int, ...], list[int]] = defaultdict(list)
    for itemset in prev:
        by_prefix[itemset[:-1]].append(itemset[-1])

    out = set()
    for prefix, lasts in by_prefix.items():
        for a, b in combinations(sorted(lasts), 2):
            candidate = prefix + (a, b)
            if prune:
                missing = [s for s in combinations(candidate, len(candidate) - 1) if s not in prev]
                if missing:
                    continue
            out.add(candidate)
    return out


def brute_force_frequent(
    db: TransactionDb,
    min_sup,
    max_k: Optional[int] = None,
    budget: Optional[int] = None,
    rounding: str = Rounding.CEIL,
) -> dict[int, dict[tuple[int, ...], int]]:
    """
    Apriori secuencial: candidatos de set_based_gen y soporte contado
    transacción por transacción con pruebas de subconjunto explícitas.
    budget limita transacciones x candidatos por nivel.
    """
    if budget is None:
        budget = settings.MINING["ORACLE_BUDGET"]
    min_count = threshold(min_sup, db.n, rounding)
    baskets = [frozenset(t) for t in db.transactions]

    singles: dict[tuple[int, ...], int] = defaultdict(int)
    for basket in baskets:
        for item in basket:
            singles[(item,)] += 1

    levels: dict[int, dict[tuple[int, ...], int]] = {}
    current = {s: c for s, c in singles.items() if c >= min_count}
    k = 1
    while current and (max_k is None or k <= max_k):
        levels[k] = current
        k += 1
        if max_k is not None and k > max_k:
            break
        candidates = set_based_gen(current, prune=True)
        work = len(candidates) * len(baskets)
        if work > budget:
            raise OracleBudgetExceeded(
                f"Nivel {k}: {len(candidates)} candidatos x {len(baskets)} transacciones "
                f"excede el presupuesto {budget}."
            )
        counts = dict.fromkeys(candidates, 0)
        candidate_sets = [(c, frozenset(c)) for c in candidates]
        for basket in baskets:
            if len(basket) < k:
                continue
            for c, cs in candidate_sets:
                if cs <= basket:
                    counts[c] += 1
        current = {c: n for c, n in counts.items() if n >= min_count}
        logger.debug("oráculo k=%d: %d candidatos, %d frecuentes", k, len(candidates), len(current))

    return levels


def verify_run(report, db: TransactionDb, min_sup=None, rounding: Optional[str] = None) -> Verdict:
    """
    Recalcula los frecuentes con el oráculo y los compara contra el
    reporte. Sin itemsets en el reporte, compara conteos por nivel.
    """
    if min_sup is None:
        min_sup = report.min_sup
    rounding = rounding or report.config.get("rounding", Rounding.CEIL)
    expected_levels = brute_force_frequent(db, min_sup, rounding=rounding)
    verdict = Verdict()

    if not report.has_itemsets:
        got = report.counts()
        for k in sorted(set(expected_levels) | set(got)):
            want = len(expected_levels.get(k, {}))
            have = got.get(k, 0)
            if want != have:
                verdict.count_mismatches.append((k, want, have))
        return verdict

    expected: dict[tuple[int, ...], int] = {}
    for level in expected_levels.values():
        expected.update(level)
    got = report.frequent()

    for itemset in sorted(expected.keys() - got.keys()):
        verdict.missing.append((itemset, expected[itemset]))
    for itemset in sorted(got.keys() - expected.keys()):
        verdict.extra.append((itemset, got[itemset]))
    for itemset in sorted(expected.keys() & got.keys()):
        if expected[itemset] != got[itemset]:
            verdict.mismatched.append((itemset, expected[itemset], got[itemset]))
    return verdict
