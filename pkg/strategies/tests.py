import random
import statistics
from dataclasses import replace
from pathlib import Path
from unittest import skipUnless

from django.conf import settings
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from candidates.trie import trie_from_itemsets
from datasets.services import load_fimi, parse_fimi
from engine.models import TimeMode
from engine.services import CostCoefficients, TimeSource
from oracle.services import brute_force_frequent
from strategies.mappers import CandidateThreshold, FixedPasses, multi_pass_mapper, one_itemset_mapper
from strategies.models import PassMode, Variant
from strategies.planner import (
    PlannerState,
    candidate_threshold,
    dpc_next_alpha,
    etdpc_next_alpha,
    vfpc_next_npass,
)
from strategies.reports import LevelResult, phase_structure, split_levels
from strategies.services import (
    StrategyConfig,
    dpc_run,
    etdpc_run,
    fpc_run,
    one_itemset_phase,
    run_strategy,
    spc_run,
    vfpc_run,
)

COST = TimeSource(mode=TimeMode.COST, coefficients=CostCoefficients(2e-5, 1e-5, 2e-5, 2e-6))

# 6 copias de {0..9} más ruido: todos los subconjuntos de {0..9} son
# frecuentes a min_sup 0.5, diez niveles.
DENSE = parse_fimi(
    "0 1 2 3 4 5 6 7 8 9\n" * 6
    + "10 11\n" * 4
)

ALL_STRATEGIES = [
    (Variant.SPC, False),
    (Variant.FPC, False),
    (Variant.DPC, False),
    (Variant.VFPC, False),
    (Variant.ETDPC, False),
    (Variant.VFPC, True),
    (Variant.ETDPC, True),
]


def _random_db(seed, n=40, items=9):
    rng = random.Random(seed)
    rows = [sorted(rng.sample(range(items), rng.randint(2, 7))) for _ in range(n)]
    return parse_fimi("".join(" ".join(map(str, row)) + "\n" for row in rows))


def _seeded_db(seed):
    """Dataset chico con n <= 50 y a lo más 15 items."""
    rng = random.Random(seed)
    items = rng.randint(3, 15)
    rows = [
        sorted(rng.sample(range(items), rng.randint(1, min(6, items))))
        for _ in range(rng.randint(5, 50))
    ]
    return parse_fimi("".join(" ".join(map(str, row)) + "\n" for row in rows))


def _oracle(db, min_sup):
    merged = {}
    for level in brute_force_frequent(db, min_sup).values():
        merged.update(level)
    return merged


def _config(variant, optimized=False, **extra):
    return StrategyConfig(variant=variant, optimized=optimized, lines_per_split=7, dpc_alpha_high=3.0, **extra)


class PlannerTests(SimpleTestCase):

    def test_candidate_threshold(self):
        self.assertEqual(candidate_threshold(1.0, 500), 500)
        self.assertEqual(candidate_threshold(3.0, 0), 0)
        self.assertEqual(candidate_threshold(2.0, 8163), 16326)

    def test_dpc_alpha(self):
        self.assertEqual(dpc_next_alpha(30, 60, 2.0), 2.0)
        self.assertEqual(dpc_next_alpha(60, 60, 2.0), 1.0)
        self.assertEqual(dpc_next_alpha(5, 60, 3.0), 3.0)
        self.assertEqual(dpc_next_alpha(0, 0, 3.0), 1.0)

    def test_etdpc_alpha(self):
        self.assertEqual(etdpc_next_alpha(30, 20, 40, 60), 3)
        self.assertEqual(etdpc_next_alpha(50, 20, 40, 60), 2)
        self.assertEqual(etdpc_next_alpha(70, 20, 40, 60), 1)
        self.assertEqual(etdpc_next_alpha(40, 60, 40, 60), 3)
        self.assertEqual(etdpc_next_alpha(50, 60, 40, 60), 2)

    def test_vfpc_npass(self):
        self.assertEqual(vfpc_next_npass(15769, 10449, 2), 2)
        self.assertEqual(vfpc_next_npass(7873, 15769, 2), 5)
        self.assertEqual(vfpc_next_npass(100, 100, 2), 2)

    def test_state_advances_by_executed_passes(self):
        state = PlannerState(k=2, npass=5)
        state.advance(3)
        self.assertEqual(state.k, 5)


class MapperTests(SimpleTestCase):

    def setUp(self):
        self.split = DENSE.transactions
        self.l1 = trie_from_itemsets([(i,) for i in range(10)]).freeze()

    def test_job1_context(self):
        output = one_itemset_mapper(self.split, None, "accumulate")
        self.assertEqual(output.context.npass, 1)
        self.assertEqual(output.context.modes, (PassMode.PRUNED,))
        self.assertEqual(dict(output.pairs)[(0,)], 6)

    def test_single_pass_ignores_optimized(self):
        plain = multi_pass_mapper(self.split, self.l1, "accumulate", k=2, stop=FixedPasses(1))
        optimized = multi_pass_mapper(self.split, self.l1, "accumulate", k=2, stop=FixedPasses(1), optimized=True)
        self.assertEqual(plain.context, optimized.context)
        self.assertEqual(plain.context.per_level_candidates, (45,))

    def test_two_fixed_passes(self):
        output = multi_pass_mapper(self.split, self.l1, "accumulate", k=2, stop=FixedPasses(2))
        self.assertEqual(output.context.per_level_candidates, (45, 120))
        self.assertEqual(output.context.candidate_count, 165)
        self.assertEqual(output.context.modes, (PassMode.PRUNED, PassMode.PRUNED))

    def test_candidate_threshold_stops(self):
        output = multi_pass_mapper(self.split, self.l1, "accumulate", k=2, stop=CandidateThreshold(10))
        self.assertEqual(output.context.npass, 1)
        output = multi_pass_mapper(self.split, self.l1, "accumulate", k=2, stop=CandidateThreshold(165))
        # 45 + 120 <= 165 sigue; 45 + 120 + 210 > 165 corta
        self.assertEqual(output.context.per_level_candidates, (45, 120, 210))

    def test_empty_level_ends_phase(self):
        output = multi_pass_mapper(self.split, self.l1, "accumulate", k=2, stop=FixedPasses(50))
        self.assertEqual(output.context.npass, 10)
        self.assertEqual(output.context.per_level_candidates[-1], 0)

    def test_optimized_superset(self):
        db = _random_db(3, n=60)
        l1 = trie_from_itemsets([(i,) for i in range(9)]).freeze()
        plain = multi_pass_mapper(db.transactions, l1, "accumulate", k=2, stop=FixedPasses(4))
        optimized = multi_pass_mapper(db.transactions, l1, "accumulate", k=2, stop=FixedPasses(4), optimized=True)
        self.assertGreaterEqual(optimized.context.npass, plain.context.npass)
        for ours, theirs in zip(optimized.context.per_level_candidates, plain.context.per_level_candidates):
            self.assertGreaterEqual(ours, theirs)
        self.assertEqual(optimized.context.modes[1:], (PassMode.UNPRUNED,) * (optimized.context.npass - 1))
        self.assertTrue(all(g.prune_checks == 0 for g in optimized.context.per_level_gen[1:]))

    def test_wrong_broadcast_level(self):
        with self.assertRaises(ValidationError):
            multi_pass_mapper(self.split, self.l1, "accumulate", k=3, stop=FixedPasses(1))


class SplitLevelsTests(SimpleTestCase):

    def test_groups_by_size(self):
        levels = split_levels([((0, 1), 5), ((0, 1, 2), 3), ((0, 2), 4)])
        self.assertEqual([level.k for level in levels], [2, 3])
        self.assertEqual(levels[0].supports, {(0, 1): 5, (0, 2): 4})
        self.assertEqual(levels[1].supports, {(0, 1, 2): 3})

    def test_empty(self):
        self.assertEqual(split_levels([]), [])

    def test_known_count(self):
        self.assertEqual(LevelResult(k=2, supports={}, known_count=7).count, 7)


class ConfigTests(SimpleTestCase):

    def test_optimized_needs_vfpc_or_etdpc(self):
        for variant in (Variant.SPC, Variant.FPC, Variant.DPC):
            with self.assertRaises(ValidationError):
                StrategyConfig(variant=variant, optimized=True).clean()
        StrategyConfig(variant=Variant.ETDPC, optimized=True).clean()

    def test_label(self):
        self.assertEqual(StrategyConfig(variant=Variant.VFPC, optimized=True).label, "Optimized-VFPC")
        self.assertEqual(StrategyConfig(variant=Variant.DPC).label, "DPC")

    def test_from_settings(self):
        config = StrategyConfig.from_settings(fpc_width=5, workers=None)
        self.assertEqual(config.fpc_width, 5)
        self.assertEqual(config.workers, settings.MINING["WORKERS"])

    def test_invalid_values(self):
        with self.assertRaises(ValidationError):
            StrategyConfig(dpc_alpha_high=0.5).clean()
        with self.assertRaises(ValidationError):
            StrategyConfig(etdpc_beta1=70, etdpc_beta2=60).clean()


class RandomizedOracleTests(SimpleTestCase):

    def test_every_strategy_matches_oracle(self):
        for seed in range(100):
            db = _seeded_db(seed)
            for min_sup in (0.2, 0.4, 0.6):
                expected = _oracle(db, min_sup)
                for variant, optimized in ALL_STRATEGIES:
                    with self.subTest(seed=seed, min_sup=min_sup, variant=variant, optimized=optimized):
                        report = run_strategy(db, min_sup, _config(variant, optimized), COST)
                        self.assertEqual(report.frequent(), expected)


class StrategyIntegrityTests(SimpleTestCase):

    def test_all_strategies_match_oracle(self):
        for seed in range(6):
            db = _random_db(seed)
            expected = _oracle(db, 0.2)
            for variant, optimized in ALL_STRATEGIES:
                with self.subTest(seed=seed, variant=variant, optimized=optimized):
                    report = run_strategy(db, 0.2, _config(variant, optimized), COST)
                    self.assertEqual(report.frequent(), expected)

    def test_dense_levels(self):
        report = spc_run(DENSE, 0.5, COST, _config(Variant.SPC))
        self.assertEqual(
            [level.count for level in report.levels],
            [10, 45, 120, 210, 252, 210, 120, 45, 10, 1],
        )
        self.assertEqual(report.threshold, 5)
        self.assertEqual(phase_structure(report), [(k, 1) for k in range(1, 12)])

    def test_nothing_frequent(self):
        db = parse_fimi("1\n2\n3\n4\n")
        report = spc_run(db, 0.5, COST, _config(Variant.SPC))
        self.assertEqual(report.phase_count, 1)
        self.assertEqual(report.levels, [])

    def test_fpc_phase_groups(self):
        report = fpc_run(DENSE, 0.5, _config(Variant.FPC), COST)
        self.assertEqual(phase_structure(report), [(1, 1), (2, 1), (3, 3), (6, 3), (9, 3)])
        self.assertEqual(report.phases[-1].per_level_candidates, (10, 1, 0))

    def test_fpc_width_one_is_spc(self):
        spc = spc_run(DENSE, 0.5, COST, _config(Variant.SPC))
        fpc = fpc_run(DENSE, 0.5, _config(Variant.FPC, fpc_width=1), COST)
        self.assertEqual(fpc.phases, spc.phases)
        self.assertEqual(fpc.levels, spc.levels)

    def test_vfpc_first_phase_combines_two_passes(self):
        report = vfpc_run(DENSE, 0.5, time_source=COST, config=_config(Variant.VFPC))
        self.assertEqual(phase_structure(report)[1], (2, 2))

    def test_etdpc_first_phase_single_pass(self):
        report = etdpc_run(DENSE, 0.5, time_source=COST, config=_config(Variant.ETDPC))
        self.assertEqual(report.phases[1].npass, 1)

    def test_optimized_skips_pruning(self):
        for runner in (vfpc_run, etdpc_run):
            plain = runner(DENSE, 0.5, optimized=False, time_source=COST, config=_config(Variant.VFPC))
            optimized = runner(DENSE, 0.5, optimized=True, time_source=COST, config=_config(Variant.VFPC))
            self.assertEqual(plain.frequent(), optimized.frequent())
            for phase in optimized.phases:
                self.assertTrue(all(checks == 0 for checks in phase.per_level_prune_checks[1:]))
                self.assertTrue(all(mode == PassMode.UNPRUNED for mode in phase.modes[1:]))

    def test_dpc_matches_etdpc(self):
        for seed in range(3):
            db = _random_db(seed)
            dpc = dpc_run(db, 0.2, COST, _config(Variant.DPC, dpc_beta=0))
            etdpc = etdpc_run(db, 0.2, time_source=COST, config=_config(Variant.ETDPC))
            self.assertEqual(dpc.frequent(), etdpc.frequent())

    def test_split_size_does_not_change_results(self):
        db = _random_db(9, n=50)
        for variant, optimized in ALL_STRATEGIES:
            small = run_strategy(db, 0.2, replace(_config(variant, optimized), lines_per_split=3), COST)
            large = run_strategy(db, 0.2, replace(_config(variant, optimized), lines_per_split=100), COST)
            self.assertEqual(small.frequent(), large.frequent())
            if variant in (Variant.DPC, Variant.ETDPC):
                # el tiempo de costo crece con los splits y guía estas fases
                continue
            self.assertEqual(phase_structure(small), phase_structure(large))
            self.assertEqual(
                [p.per_level_candidates for p in small.phases],
                [p.per_level_candidates for p in large.phases],
            )

    def test_reducer_count_does_not_change_results(self):
        for seed in range(3):
            db = _random_db(seed, n=50)
            for variant, optimized in ALL_STRATEGIES:
                with self.subTest(seed=seed, variant=variant, optimized=optimized):
                    one = run_strategy(db, 0.2, _config(variant, optimized, num_reducers=1), COST)
                    four = run_strategy(db, 0.2, _config(variant, optimized, num_reducers=4), COST)
                    self.assertEqual(one.frequent(), four.frequent())
                    self.assertEqual(one.phases, four.phases)

    def test_empty_database(self):
        db = parse_fimi("")
        for variant, optimized in ALL_STRATEGIES:
            report = run_strategy(db, 0.5, _config(variant, optimized), COST)
            self.assertEqual(report.phase_count, 1)
            self.assertEqual(report.levels, [])
            self.assertEqual(report.stats.n, 0)
        with self.assertRaises(ValidationError):
            spc_run(db, 0, COST, _config(Variant.SPC))

    def test_single_item_database(self):
        db = parse_fimi("7\n7\n7\n")
        level, phase = one_itemset_phase(db, 3, COST)
        self.assertEqual(level.supports, {(0,): 3})
        self.assertEqual(phase.first_pass, 1)
        self.assertEqual(phase.npass, 1)
        report = spc_run(db, 1.0, COST, _config(Variant.SPC))
        self.assertEqual([level.supports for level in report.levels], [{(0,): 3}])
        self.assertEqual(report.phases[0], phase)

    def test_optimized_saves_prune_checks_on_dense(self):
        for runner in (vfpc_run, etdpc_run):
            plain = runner(DENSE, 0.5, optimized=False, time_source=COST, config=_config(Variant.VFPC))
            optimized = runner(DENSE, 0.5, optimized=True, time_source=COST, config=_config(Variant.VFPC))
            self.assertEqual(phase_structure(plain), phase_structure(optimized))
            self.assertTrue(any(phase.npass > 1 for phase in optimized.phases))
            self.assertLess(
                sum(p.prune_checks for p in optimized.phases),
                sum(p.prune_checks for p in plain.phases),
            )

    def test_optimized_prune_checks_never_exceed_plain(self):
        for seed in range(30):
            db = _random_db(seed, n=50)
            for runner in (vfpc_run, etdpc_run):
                plain = runner(db, 0.2, optimized=False, time_source=COST, config=_config(Variant.VFPC))
                optimized = runner(db, 0.2, optimized=True, time_source=COST, config=_config(Variant.VFPC))
                if phase_structure(plain) != phase_structure(optimized):
                    continue
                with self.subTest(seed=seed, runner=runner.__name__):
                    saved = sum(sum(p.per_level_prune_checks[1:]) for p in plain.phases)
                    plain_total = sum(p.prune_checks for p in plain.phases)
                    optimized_total = sum(p.prune_checks for p in optimized.phases)
                    self.assertEqual(optimized_total, plain_total - saved)
                    if saved:
                        self.assertLess(optimized_total, plain_total)

    def test_optimized_candidates_are_a_superset(self):
        dbs = [DENSE] + [_random_db(seed, n=50) for seed in range(10)]
        for index, db in enumerate(dbs):
            for runner in (vfpc_run, etdpc_run):
                plain = runner(db, 0.2, optimized=False, time_source=COST, config=_config(Variant.VFPC))
                optimized = runner(db, 0.2, optimized=True, time_source=COST, config=_config(Variant.VFPC))
                by_first_pass = {p.first_pass: p for p in plain.phases}
                for phase in optimized.phases:
                    other = by_first_pass.get(phase.first_pass)
                    if other is None:
                        continue
                    with self.subTest(db=index, runner=runner.__name__, first_pass=phase.first_pass):
                        for ours, theirs in zip(phase.per_level_candidates, other.per_level_candidates):
                            self.assertGreaterEqual(ours, theirs)
                        if phase.npass == other.npass:
                            self.assertGreaterEqual(phase.candidate_count, other.candidate_count)

    def test_cost_mode_is_deterministic(self):
        db = _random_db(4)
        for variant, optimized in ALL_STRATEGIES:
            first = run_strategy(db, 0.2, _config(variant, optimized), COST)
            second = run_strategy(db, 0.2, _config(variant, optimized), COST)
            self.assertEqual(first.phases, second.phases)
            self.assertEqual(first.actual_elapsed, first.total_elapsed)


def _dataset(name):
    return Path(settings.MINING["DATASET_DIR"]) / name


@skipUnless(_dataset("chess.dat").exists(), "chess.dat no disponible")
class ChessAcceptanceTests(SimpleTestCase):
    LEVELS = [29, 307, 1716, 5992, 13927, 22442, 25713, 21111, 12329, 5027, 1384, 240, 19]
    SPC_CANDIDATES = [406, 2179, 6777, 15231, 23728, 26586, 21537, 12469, 5051, 1387, 243, 22]

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.db = load_fimi(_dataset("chess.dat"))

    def test_spc_levels_and_candidates(self):
        report = spc_run(self.db, 0.65, COST, StrategyConfig.from_settings(lines_per_split=400))
        self.assertEqual([level.count for level in report.levels], self.LEVELS)
        candidates = [phase.candidate_count for phase in report.phases[1:]]
        self.assertEqual(candidates[:len(self.SPC_CANDIDATES)], self.SPC_CANDIDATES)

    def test_all_strategies_agree(self):
        spc = spc_run(self.db, 0.65, COST, StrategyConfig.from_settings(lines_per_split=400))
        for variant, optimized in ALL_STRATEGIES[1:]:
            config = StrategyConfig.from_settings(
                variant=variant, optimized=optimized, lines_per_split=400, dpc_alpha_high=3.0,
            )
            report = run_strategy(self.db, 0.65, config, COST)
            self.assertEqual(report.frequent(), spc.frequent())


@skipUnless(_dataset("mushroom.dat").exists(), "mushroom.dat no disponible")
class MushroomAcceptanceTests(SimpleTestCase):
    LEVELS = [48, 530, 2510, 6751, 12372, 17008, 18745, 16887, 12290, 7052, 3094, 1001, 224, 31, 2]

    def test_spc_levels(self):
        db = load_fimi(_dataset("mushroom.dat"))
        report = spc_run(db, 0.15, COST)
        self.assertEqual([level.count for level in report.levels], self.LEVELS)
        self.assertEqual(report.phases[1].candidate_count, 1128)

    def test_combined_passes_finish_sooner(self):
        db = load_fimi(_dataset("mushroom.dat"))
        wall = TimeSource(mode=TimeMode.WALL)

        def median_run(variant, optimized=False):
            config = StrategyConfig.from_settings(variant=variant, optimized=optimized, workers=4)
            reports = [run_strategy(db, 0.15, config, wall) for _ in range(3)]
            return reports[0], statistics.median(r.actual_elapsed for r in reports)

        spc, spc_time = median_run(Variant.SPC)
        vfpc, vfpc_time = median_run(Variant.VFPC)
        _, optimized_time = median_run(Variant.VFPC, optimized=True)
        etdpc, _ = median_run(Variant.ETDPC)

        self.assertLessEqual(vfpc_time, 0.95 * spc_time)
        self.assertLessEqual(optimized_time, 0.95 * vfpc_time)
        self.assertLess(vfpc.phase_count, spc.phase_count)
        self.assertLess(etdpc.phase_count, spc.phase_count)
