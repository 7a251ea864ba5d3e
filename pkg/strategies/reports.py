from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional

from core.itemsets import Itemset
from datasets.services import DatasetStats
from engine.services import JobCounters


@dataclass(frozen=True)
class LevelResult:
    k: int
    supports: dict[Itemset, int]
    # conteo declarado cuando el reporte no trae los itemsets
    known_count: Optional[int] = None

    @property
    def count(self) -> int:
        if self.known_count is not None:
            return self.known_count
        return len(self.supports)


@dataclass(frozen=True)
class PhaseReport:
    """
    Una fase = un job MapReduce, posiblemente con varias pasadas.
    """
    first_pass: int
    npass: int
    per_level_candidates: tuple[int, ...]
    modes: tuple[str, ...]
    per_level_prune_checks: tuple[int, ...]
    candidate_count: int
    joins: int
    prune_checks: int
    pruned: int
    subset_node_visits: int
    emitted_pairs: int
    elapsed: float

    @property
    def last_pass(self) -> int:
        return self.first_pass + self.npass - 1

    @classmethod
    def from_job(cls, first_pass: int, counters: JobCounters, elapsed: float) -> PhaseReport:
        return cls(
            first_pass=first_pass,
            npass=counters.npass,
            per_level_candidates=counters.per_level_candidates,
            modes=counters.modes,
            per_level_prune_checks=counters.per_level_prune_checks,
            candidate_count=counters.candidate_count,
            joins=counters.joins,
            prune_checks=counters.prune_checks,
            pruned=counters.pruned,
            subset_node_visits=counters.subset_node_visits,
            emitted_pairs=counters.emitted_pairs,
            elapsed=elapsed,
        )


@dataclass
class RunReport:
    label: str
    variant: str
    optimized: bool
    min_sup: float
    threshold: int
    stats: DatasetStats
    config: dict = field(default_factory=dict)
    phases: list[PhaseReport] = field(default_factory=list)
    levels: list[LevelResult] = field(default_factory=list)
    actual_elapsed: float = 0.0
    dataset: str = ""
    # False cuando se leyó de un JSON sin itemsets (sólo conteos)
    has_itemsets: bool = True

    @property
    def total_elapsed(self) -> float:
        return sum(p.elapsed for p in self.phases)

    @property
    def phase_count(self) -> int:
        return len(self.phases)

    def counts(self) -> dict[int, int]:
        return {level.k: level.count for level in self.levels}

    def frequent(self) -> dict[Itemset, int]:
        merged: dict[Itemset, int] = {}
        for level in self.levels:
            merged.update(level.supports)
        return merged


def split_levels(pairs: Iterable[tuple[Itemset, int]]) -> list[LevelResult]:
    """
    Agrupa pares reducidos por tamaño de itemset. Sólo niveles no vacíos,
    en orden ascendente de k; el último es el nivel más alto.
    """
    grouped: dict[int, dict[Itemset, int]] = defaultdict(dict)
    for itemset, support in pairs:
        grouped[len(itemset)][tuple(itemset)] = support
    return [LevelResult(k=k, supports=grouped[k]) for k in sorted(grouped)]


def phase_structure(report: RunReport) -> list[tuple[int, int]]:
    """Grupos de pasadas: [(primera pasada, npass), ...]."""
    return [(p.first_pass, p.npass) for p in report.phases]
