from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from functools import partial
from typing import Optional

from django.conf import settings
from django.core.exceptions import ValidationError

from candidates.trie import CandidateTrie, trie_from_itemsets
from datasets.services import TransactionDb, make_splits, split_transactions, stats
from engine.models import EmissionMode, GenerationScope, Rounding
from engine.services import JobSpec, TimeSource, run_job, threshold
from strategies.mappers import CandidateThreshold, FixedPasses, StopRule, multi_pass_mapper, one_itemset_mapper
from strategies.models import OPTIMIZABLE, Variant
from strategies.planner import (
    PlannerState,
    candidate_threshold,
    dpc_next_alpha,
    etdpc_next_alpha,
    vfpc_next_npass,
)
from strategies.reports import LevelResult, PhaseReport, RunReport, split_levels

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StrategyConfig:
    variant: str = Variant.SPC
    optimized: bool = False
    fpc_width: int = 3
    fpc_start: int = 3
    dpc_alpha_high: float = 2.0
    dpc_beta: float = 60.0
    etdpc_beta1: float = 40.0
    etdpc_beta2: float = 60.0
    lines_per_split: int = 1000
    num_reducers: int = 1
    workers: int = 1
    emission_mode: str = EmissionMode.ACCUMULATE
    generation_scope: str = GenerationScope.TASK
    rounding: str = Rounding.CEIL

    @classmethod
    def from_settings(cls, **overrides) -> StrategyConfig:
        conf = settings.MINING
        values = dict(
            fpc_width=conf["FPC_WIDTH"],
            fpc_start=conf["FPC_START"],
            dpc_alpha_high=conf["DPC_ALPHA_HIGH"],
            dpc_beta=conf["DPC_BETA"],
            etdpc_beta1=conf["ETDPC_BETA1"],
            etdpc_beta2=conf["ETDPC_BETA2"],
            lines_per_split=conf["LINES_PER_SPLIT"],
            num_reducers=conf["NUM_REDUCERS"],
            workers=conf["WORKERS"],
            emission_mode=conf["EMISSION_MODE"],
            generation_scope=conf["GENERATION_SCOPE"],
            rounding=conf["THRESHOLD_ROUNDING"],
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def clean(self):
        if self.variant not in Variant.values:
            raise ValidationError({"variant": f"Algoritmo desconocido: {self.variant}."})
        if self.optimized and self.variant not in OPTIMIZABLE:
            raise ValidationError(
                {"optimized": "Las variantes optimizadas sólo aplican a VFPC/ETDPC."},
                code="optimized_variant",
            )
        if self.fpc_width < 1:
            raise ValidationError({"fpc_width": "fpc_width debe ser >= 1."})
        if self.fpc_start < 2:
            raise ValidationError({"fpc_start": "fpc_start debe ser >= 2."})
        if self.dpc_alpha_high < 1:
            raise ValidationError({"dpc_alpha_high": "alpha_high debe ser >= 1."})
        if self.dpc_beta < 0:
            raise ValidationError({"dpc_beta": "beta no puede ser negativo."})
        if not (0 < self.etdpc_beta1 < self.etdpc_beta2):
            raise ValidationError({"etdpc_beta1": "Se requiere 0 < beta1 < beta2."})
        if self.lines_per_split < 1:
            raise ValidationError({"lines_per_split": "lines_per_split debe ser >= 1."})

    @property
    def label(self) -> str:
        name = Variant(self.variant).label
        return f"Optimized-{name}" if self.optimized else name

    def echo(self) -> dict:
        return {key: (str(value) if isinstance(value, str) else value) for key, value in asdict(self).items()}


# ---------------- Ejecución de fases ----------------

class PhaseRunner:
    """
    Estado compartido de una corrida: splits, umbral, niveles frecuentes
    acumulados y reportes de fase. Los drivers deciden qué fase sigue.
    """

    def __init__(self, db: TransactionDb, min_sup, config: StrategyConfig, time_source: TimeSource):
        config.clean()
        self.db = db
        self.min_sup = min_sup
        self.config = config
        self.time_source = time_source
        # db vacía: umbral de una transacción y un único split vacío, así
        # Job1 corre y el reporte queda sin niveles.
        self.min_count = threshold(min_sup, max(db.n, 1), config.rounding)
        self.splits = split_transactions(db, make_splits(db, config.lines_per_split)) or [()]
        self.frequent: dict[int, LevelResult] = {}
        self.phases: list[PhaseReport] = []
        self._started = time_source.now()

    def _append(self, phase: PhaseReport) -> PhaseReport:
        self.phases.append(phase)
        logger.info(
            "%s fase %d: pasadas %d-%d, candidateCount=%d, elapsed=%.4f",
            self.config.label, len(self.phases), phase.first_pass, phase.last_pass,
            phase.candidate_count, phase.elapsed,
        )
        return phase

    def level_count(self, k: int) -> int:
        level = self.frequent.get(k)
        return level.count if level else 0

    def has_level(self, k: int) -> bool:
        return self.level_count(k) > 0

    def broadcast(self, k: int) -> CandidateTrie:
        """L_{k-1} como trie congelado para los map tasks."""
        level = self.frequent.get(k - 1)
        itemsets = level.supports.keys() if level else ()
        return trie_from_itemsets(itemsets, level=k - 1).freeze()

    def job1(self) -> PhaseReport:
        level, phase = one_itemset_phase(self.db, self.min_count, self.time_source, self.config, self.splits)
        if level.count:
            self.frequent[1] = level
        return self._append(phase)

    def job2(self, k: int, stop: StopRule, optimized: bool = False) -> PhaseReport:
        mapper = partial(multi_pass_mapper, k=k, stop=stop, optimized=optimized)
        spec = _job_spec(mapper, self.min_count, self.config, f"Job2(k={k})")
        result = run_job(spec, self.splits, self.broadcast(k), self.time_source)
        for level in split_levels(result.pairs):
            self.frequent[level.k] = level
        return self._append(PhaseReport.from_job(k, result.counters, result.elapsed))

    def report(self) -> RunReport:
        if self.time_source.is_wall:
            actual = self.time_source.now() - self._started
        else:
            actual = sum(p.elapsed for p in self.phases)
        return RunReport(
            label=self.config.label,
            variant=str(self.config.variant),
            optimized=self.config.optimized,
            min_sup=float(self.min_sup),
            threshold=self.min_count,
            stats=stats(self.db),
            config=self.config.echo(),
            phases=list(self.phases),
            levels=[self.frequent[k] for k in sorted(self.frequent)],
            actual_elapsed=actual,
        )


def _job_spec(mapper, min_count: int, config: StrategyConfig, name: str) -> JobSpec:
    return JobSpec(
        mapper=mapper,
        reducer_min_count=min_count,
        num_reducers=config.num_reducers,
        emission_mode=config.emission_mode,
        workers=config.workers,
        generation_scope=config.generation_scope,
        name=name,
    )


def one_itemset_phase(db: TransactionDb, min_count: int, time_source: TimeSource,
                      config: Optional[StrategyConfig] = None,
                      splits=None) -> tuple[LevelResult, PhaseReport]:
    """Job1: L1 con un umbral absoluto ya calculado."""
    config = config or StrategyConfig()
    if splits is None:
        splits = split_transactions(db, make_splits(db, config.lines_per_split)) or [()]
    result = run_job(_job_spec(one_itemset_mapper, min_count, config, "Job1"), splits, None, time_source)
    levels = split_levels(result.pairs)
    level = levels[0] if levels else LevelResult(k=1, supports={})
    return level, PhaseReport.from_job(1, result.counters, result.elapsed)


# ---------------- Drivers ----------------

def _config(config: Optional[StrategyConfig], variant: str, optimized: bool = False) -> StrategyConfig:
    base = config or StrategyConfig.from_settings()
    return StrategyConfig(**{**asdict(base), "variant": variant, "optimized": optimized})


def _time(time_source: Optional[TimeSource]) -> TimeSource:
    return time_source or TimeSource.from_settings()


def spc_run(db, min_sup, time_source=None, config=None) -> RunReport:
    runner = PhaseRunner(db, min_sup, _config(config, Variant.SPC), _time(time_source))
    runner.job1()
    k = 2
    while runner.has_level(k - 1):
        phase = runner.job2(k, FixedPasses(1))
        k += phase.npass
    return runner.report()


def fpc_run(db, min_sup, config=None, time_source=None) -> RunReport:
    config = _config(config, Variant.FPC)
    runner = PhaseRunner(db, min_sup, config, _time(time_source))
    runner.job1()
    k = 2
    while runner.has_level(k - 1):
        width = 1 if k < config.fpc_start else config.fpc_width
        phase = runner.job2(k, FixedPasses(width))
        k += phase.npass
    return runner.report()


def vfpc_run(db, min_sup, optimized: bool = False, time_source=None, config=None) -> RunReport:
    runner = PhaseRunner(db, min_sup, _config(config, Variant.VFPC, optimized), _time(time_source))
    runner.job1()
    state = PlannerState(k=2, npass=2, num_cands_k_prev=0)
    while runner.has_level(state.k - 1):
        phase = runner.job2(state.k, FixedPasses(state.npass), optimized)
        state.num_cands_k = phase.candidate_count
        next_npass = vfpc_next_npass(state.num_cands_k, state.num_cands_k_prev, state.npass)
        state.num_cands_k_prev = state.num_cands_k
        state.advance(phase.npass)
        state.npass = next_npass
    return runner.report()


def etdpc_run(db, min_sup, optimized: bool = False, time_source=None, config=None) -> RunReport:
    config = _config(config, Variant.ETDPC, optimized)
    runner = PhaseRunner(db, min_sup, config, _time(time_source))
    job1 = runner.job1()
    state = PlannerState(k=2, npass=1, alpha=1.0, et_prev=job1.elapsed)
    while runner.has_level(state.k - 1):
        ct = candidate_threshold(state.alpha, runner.level_count(state.k - 1))
        phase = runner.job2(state.k, CandidateThreshold(ct), optimized)
        state.npass = phase.npass
        state.et = phase.elapsed
        state.alpha = etdpc_next_alpha(state.et, state.et_prev, config.etdpc_beta1, config.etdpc_beta2)
        state.et_prev = state.et
        state.advance(phase.npass)
    return runner.report()


def dpc_run(db, min_sup, time_source=None, config=None) -> RunReport:
    config = _config(config, Variant.DPC)
    runner = PhaseRunner(db, min_sup, config, _time(time_source))
    runner.job1()
    state = PlannerState(k=2, npass=1, alpha=1.0)
    while runner.has_level(state.k - 1):
        ct = candidate_threshold(state.alpha, runner.level_count(state.k - 1))
        phase = runner.job2(state.k, CandidateThreshold(ct))
        state.npass = phase.npass
        state.et_prev = phase.elapsed
        state.alpha = dpc_next_alpha(state.et_prev, config.dpc_beta, config.dpc_alpha_high)
        state.advance(phase.npass)
    return runner.report()


def run_strategy(db: TransactionDb, min_sup, config: StrategyConfig,
                 time_source: Optional[TimeSource] = None) -> RunReport:
    """Punto único de despacho para las siete variantes."""
    config.clean()
    variant = Variant(config.variant)
    if variant == Variant.SPC:
        return spc_run(db, min_sup, time_source, config)
    if variant == Variant.FPC:
        return fpc_run(db, min_sup, config, time_source)
    if variant == Variant.DPC:
        return dpc_run(db, min_sup, time_source, config)
    if variant == Variant.VFPC:
        return vfpc_run(db, min_sup, config.optimized, time_source, config)
    return etdpc_run(db, min_sup, config.optimized, time_source, config)
