from __future__ import annotations

import logging
import math
import time
import zlib
from collections import defaultdict
from dataclasses import dataclass, field
from decimal import Decimal
from multiprocessing import Pool
from typing import Callable, Optional, Sequence

from django.conf import settings
from django.core.exceptions import ValidationError

from candidates.trie import CandidateTrie, GenCounters
from core.exceptions import ConsistencyError
from core.itemsets import Itemset
from engine.models import EmissionMode, GenerationScope, Rounding, TimeMode

logger = logging.getLogger(__name__)


# ---------------- Tiempo ----------------

@dataclass(frozen=True)
class CostCoefficients:
    emitted_pair: float = 0.0
    join: float = 0.0
    prune_check: float = 0.0
    node_visit: float = 0.0

    @classmethod
    def parse(cls, raw: str | Sequence[float]) -> CostCoefficients:
        """Acepta "a,b,c,d" o una secuencia de cuatro números."""
        if isinstance(raw, str):
            parts = [p.strip() for p in raw.split(",")]
        else:
            parts = list(raw)
        if len(parts) != 4:
            raise ValidationError("Se esperan cuatro coeficientes a,b,c,d.")
        try:
            values = [float(p) for p in parts]
        except (TypeError, ValueError):
            raise ValidationError(f"Coeficientes no numéricos: {raw!r}.")
        if any(v < 0 for v in values):
            raise ValidationError("Los coeficientes de costo no pueden ser negativos.")
        return cls(*values)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.emitted_pair, self.join, self.prune_check, self.node_visit)


@dataclass(frozen=True)
class TimeSource:
    """
    Fuente de tiempo de los jobs.
    wall: segundos medidos con perf_counter.
    cost: a*pares + b*joins + c*pruebas de poda + d*nodos visitados,
          reproducible bit a bit.
    """
    mode: str = TimeMode.COST
    coefficients: CostCoefficients = field(default_factory=CostCoefficients)

    @classmethod
    def from_settings(cls, mode: Optional[str] = None, coefficients=None) -> TimeSource:
        conf = settings.MINING
        return cls(
            mode=TimeMode(mode or conf["TIME_MODE"]),
            coefficients=CostCoefficients.parse(coefficients or conf["COST_COEFFICIENTS"]),
        )

    @property
    def is_wall(self) -> bool:
        return self.mode == TimeMode.WALL

    def now(self) -> float:
        return time.perf_counter()

    def elapsed(self, counters: JobCounters, wall_seconds: float) -> float:
        if self.is_wall:
            return wall_seconds
        c = self.coefficients
        return (
            c.emitted_pair * counters.emitted_pairs
            + c.join * counters.joins
            + c.prune_check * counters.prune_checks
            + c.node_visit * counters.subset_node_visits
        )


# ---------------- Contratos map/reduce ----------------

@dataclass(frozen=True)
class MapContext:
    """
    Valores que cada mapper deja en el "context" de Hadoop. Dependen sólo
    de datos difundidos, así que deben coincidir entre map tasks.
    """
    candidate_count: int = 0
    npass: int = 0
    per_level_candidates: tuple[int, ...] = ()
    modes: tuple[str, ...] = ()
    per_level_gen: tuple[GenCounters, ...] = ()


@dataclass
class MapOutput:
    pairs: list[tuple[Itemset, int]]
    context: MapContext
    # emisiones lógicas (c, 1): sum |C_t| sobre las transacciones del split
    emitted_pairs: int = 0
    subset_node_visits: int = 0


Mapper = Callable[[Sequence[Itemset], Optional[CandidateTrie], str], MapOutput]


@dataclass(frozen=True)
class JobSpec:
    mapper: Mapper
    reducer_min_count: int
    num_reducers: int = 1
    emission_mode: str = EmissionMode.ACCUMULATE
    workers: int = 1
    generation_scope: str = GenerationScope.TASK
    name: str = "job"

    def clean(self):
        if self.num_reducers < 1:
            raise ValidationError({"num_reducers": "num_reducers debe ser >= 1."})
        if self.workers < 1:
            raise ValidationError({"workers": "workers debe ser >= 1."})
        if self.reducer_min_count < 0:
            raise ValidationError({"reducer_min_count": "reducer_min_count no puede ser negativo."})


@dataclass(frozen=True)
class JobCounters:
    candidate_count: int = 0
    npass: int = 0
    per_level_candidates: tuple[int, ...] = ()
    modes: tuple[str, ...] = ()
    per_level_prune_checks: tuple[int, ...] = ()
    emitted_pairs: int = 0
    joins: int = 0
    prune_checks: int = 0
    pruned: int = 0
    subset_node_visits: int = 0


@dataclass(frozen=True)
class JobResult:
    pairs: list[tuple[Itemset, int]]
    counters: JobCounters
    elapsed: float


# ---------------- Umbral ----------------

def threshold(min_sup, n: int, rounding: str = Rounding.CEIL) -> int:
    """
    Soporte mínimo absoluto. Se calcula con Decimal para que, por ejemplo,
    0.15 * 100 dé 15 y no 15.000000000000002.
    """
    frac = Decimal(str(min_sup))
    if not (Decimal(0) < frac <= Decimal(1)):
        raise ValidationError({"min_sup": "min_sup debe estar en (0, 1]."})
    if n < 1:
        raise ValidationError({"n": "n debe ser >= 1."})

    exact = frac * n
    if rounding == Rounding.FLOOR_PLUS_ONE:
        return math.floor(exact) + 1
    return math.ceil(exact)


# ---------------- Combiner / partición ----------------

def combine(pairs: Sequence[tuple[Itemset, int]]) -> dict[Itemset, int]:
    """Mini reducer: suma por clave dentro de un split."""
    sums: dict[Itemset, int] = defaultdict(int)
    for key, value in pairs:
        sums[key] += value
    return dict(sums)


def partition_of(key: Itemset, num_reducers: int) -> int:
    raw = ",".join(str(i) for i in key).encode("ascii")
    return zlib.crc32(raw) % num_reducers


def _run_map_task(args) -> tuple[list[dict[Itemset, int]], MapContext, int, int]:
    mapper, split, broadcast, emission_mode, num_reducers = args
    output = mapper(split, broadcast, emission_mode)

    partitions: list[dict[Itemset, int]] = [{} for _ in range(num_reducers)]
    for key, value in combine(output.pairs).items():
        partitions[partition_of(key, num_reducers)][key] = value
    return partitions, output.context, output.emitted_pairs, output.subset_node_visits


def _reduce(partials: Sequence[dict[Itemset, int]], min_count: int) -> list[tuple[Itemset, int]]:
    sums: dict[Itemset, int] = defaultdict(int)
    for partial in partials:
        for key, value in partial.items():
            sums[key] += value
    return [(key, total) for key, total in sums.items() if total >= min_count]


def _agreed_context(contexts: Sequence[MapContext], job: str) -> MapContext:
    if not contexts:
        return MapContext()
    first = contexts[0]
    for other in contexts[1:]:
        if other != first:
            raise ConsistencyError(
                f"{job}: los map tasks no coinciden en el contexto "
                f"({first.candidate_count}/{first.npass} vs {other.candidate_count}/{other.npass})."
            )
    return first


def run_job(
    spec: JobSpec,
    splits: Sequence[Sequence[Itemset]],
    broadcast: Optional[CandidateTrie],
    time_source: TimeSource,
) -> JobResult:
    """
    Ejecuta un job: un mapper por split, combiner local, partición por hash
    de la clave y reducers que suman y filtran por reducer_min_count.
    La salida se ordena lexicográficamente; los pares no dependen del número de splits,
    de reducers ni del orden de ejecución.
    """
    spec.clean()
    if broadcast is not None and not broadcast.frozen:
        raise ValidationError("El trie difundido debe estar congelado.")

    started = time_source.now()
    tasks = [
        (spec.mapper, split, broadcast, spec.emission_mode, spec.num_reducers)
        for split in splits
    ]
    logger.debug(
        "%s: %d splits, %d reducers, %d workers",
        spec.name, len(tasks), spec.num_reducers, spec.workers,
    )

    if spec.workers > 1 and len(tasks) > 1:
        with Pool(processes=min(spec.workers, len(tasks))) as pool:
            results = pool.map(_run_map_task, tasks)
    else:
        results = [_run_map_task(task) for task in tasks]

    context = _agreed_context([r[1] for r in results], spec.name)

    pairs: list[tuple[Itemset, int]] = []
    for p in range(spec.num_reducers):
        pairs.extend(_reduce([r[0][p] for r in results], spec.reducer_min_count))
    pairs.sort()

    # Cada map task regenera el mismo nivel: el costo de generación se paga
    # una vez por task (o por transacción).
    factor = len(splits)
    if spec.generation_scope == GenerationScope.TRANSACTION:
        factor = sum(len(split) for split in splits)
    gen = sum(context.per_level_gen, GenCounters()).scaled(factor)

    counters = JobCounters(
        candidate_count=context.candidate_count,
        npass=context.npass,
        per_level_candidates=context.per_level_candidates,
        modes=context.modes,
        per_level_prune_checks=tuple(g.prune_checks * factor for g in context.per_level_gen),
        emitted_pairs=sum(r[2] for r in results),
        joins=gen.joins,
        prune_checks=gen.prune_checks,
        pruned=gen.pruned,
        subset_node_visits=sum(r[3] for r in results),
    )
    wall = time_source.now() - started
    elapsed = time_source.elapsed(counters, wall)
    logger.debug("%s: %d claves reducidas, elapsed=%.6f", spec.name, len(pairs), elapsed)
    return JobResult(pairs=pairs, counters=counters, elapsed=elapsed)
