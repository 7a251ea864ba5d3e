import random
from functools import partial

from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from candidates.trie import trie_from_itemsets
from core.exceptions import ConsistencyError
from datasets.services import TransactionDb, make_splits, split_transactions
from engine.models import EmissionMode, GenerationScope, Rounding, TimeMode
from engine.services import (
    CostCoefficients,
    JobCounters,
    JobSpec,
    MapContext,
    MapOutput,
    TimeSource,
    combine,
    partition_of,
    run_job,
    threshold,
)
from strategies.mappers import FixedPasses, multi_pass_mapper, one_itemset_mapper

COST = TimeSource(mode=TimeMode.COST, coefficients=CostCoefficients(2e-5, 1e-5, 2e-5, 2e-6))


def _random_db(seed, n=80, items=10):
    rng = random.Random(seed)
    return TransactionDb(
        transactions=tuple(tuple(sorted(rng.sample(range(items), rng.randint(1, 7)))) for _ in range(n)),
        labels=tuple(range(items)),
    )


def _unstable_mapper(split, broadcast, emission_mode):
    return MapOutput(pairs=[], context=MapContext(candidate_count=len(split), npass=1))


class ThresholdTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(threshold(1.0, 100), 100)
        self.assertEqual(threshold(0.15, 8124), 1219)
        self.assertEqual(threshold(0.15, 8124, Rounding.FLOOR_PLUS_ONE), 1219)

    def test_exact_products(self):
        self.assertEqual(threshold(0.15, 100), 15)
        self.assertEqual(threshold(0.5, 10), 5)
        self.assertEqual(threshold(0.5, 10, Rounding.FLOOR_PLUS_ONE), 6)

    def test_rejects_out_of_range(self):
        for min_sup in (0, -0.1, 1.5):
            with self.assertRaises(ValidationError):
                threshold(min_sup, 10)
        with self.assertRaises(ValidationError):
            threshold(0.5, 0)


class CombinePartitionTests(SimpleTestCase):

    def test_combiner(self):
        pairs = [((0, 1), 1), ((0, 1), 1), ((0, 2), 1)]
        self.assertEqual(combine(pairs), {(0, 1): 2, (0, 2): 1})

    def test_partition_is_stable(self):
        for key in [(0,), (1, 2), (3, 4, 5)]:
            part = partition_of(key, 4)
            self.assertIn(part, range(4))
            self.assertEqual(part, partition_of(key, 4))


class TimeSourceTests(SimpleTestCase):

    def test_cost_formula(self):
        source = TimeSource(mode=TimeMode.COST, coefficients=CostCoefficients.parse("1,2,3,4"))
        counters = JobCounters(emitted_pairs=10, joins=5, prune_checks=2, subset_node_visits=1)
        self.assertEqual(source.elapsed(counters, wall_seconds=99.0), 10 + 10 + 6 + 4)

    def test_wall_is_the_default(self):
        self.assertEqual(TimeSource.from_settings().mode, TimeMode.WALL)
        self.assertEqual(TimeSource.from_settings("cost").mode, TimeMode.COST)

    def test_wall_uses_measured_time(self):
        source = TimeSource(mode=TimeMode.WALL)
        self.assertEqual(source.elapsed(JobCounters(joins=100), wall_seconds=1.5), 1.5)

    def test_bad_coefficients(self):
        for raw in ("1,2", "a,b,c,d", "1,2,3,-1"):
            with self.assertRaises(ValidationError):
                CostCoefficients.parse(raw)


class RunJobTests(SimpleTestCase):

    def setUp(self):
        self.db = _random_db(5)
        self.l1 = trie_from_itemsets([(i,) for i in range(10)]).freeze()

    def _run(self, mapper, lines_per_split=80, broadcast=None, time_source=COST, **spec):
        splits = split_transactions(self.db, make_splits(self.db, lines_per_split))
        job = JobSpec(mapper=mapper, reducer_min_count=spec.pop("min_count", 5), **spec)
        return run_job(job, splits, broadcast, time_source)

    def test_split_invariance(self):
        for mapper, broadcast in [
            (one_itemset_mapper, None),
            (partial(multi_pass_mapper, k=2, stop=FixedPasses(3)), self.l1),
        ]:
            whole = self._run(mapper, 80, broadcast)
            parts = self._run(mapper, 10, broadcast)
            self.assertEqual(whole.pairs, parts.pairs)
            for name in ("candidate_count", "npass", "per_level_candidates", "modes",
                         "emitted_pairs", "subset_node_visits"):
                self.assertEqual(getattr(whole.counters, name), getattr(parts.counters, name))

    def test_generation_is_charged_per_task(self):
        mapper = partial(multi_pass_mapper, k=2, stop=FixedPasses(3))
        whole = self._run(mapper, 80, self.l1).counters
        parts = self._run(mapper, 10, self.l1).counters
        self.assertGreater(whole.joins, 0)
        self.assertGreater(whole.prune_checks, 0)
        # 8 map tasks regeneran cada uno los mismos niveles
        self.assertEqual(parts.joins, 8 * whole.joins)
        self.assertEqual(parts.prune_checks, 8 * whole.prune_checks)
        self.assertEqual(parts.pruned, 8 * whole.pruned)
        self.assertEqual(parts.per_level_prune_checks, tuple(8 * c for c in whole.per_level_prune_checks))

    def test_reducer_invariance(self):
        mapper = partial(multi_pass_mapper, k=2, stop=FixedPasses(2))
        one = self._run(mapper, 10, self.l1, num_reducers=1)
        three = self._run(mapper, 10, self.l1, num_reducers=3)
        self.assertEqual(one.pairs, three.pairs)

    def test_emission_modes_agree(self):
        mapper = partial(multi_pass_mapper, k=2, stop=FixedPasses(2))
        accumulate = self._run(mapper, 10, self.l1, emission_mode=EmissionMode.ACCUMULATE)
        per_match = self._run(mapper, 10, self.l1, emission_mode=EmissionMode.PER_MATCH)
        self.assertEqual(accumulate.pairs, per_match.pairs)
        self.assertEqual(accumulate.counters, per_match.counters)

    def test_worker_pool_agrees(self):
        mapper = partial(multi_pass_mapper, k=2, stop=FixedPasses(2))
        serial = self._run(mapper, 10, self.l1, workers=1)
        pooled = self._run(mapper, 10, self.l1, workers=2)
        self.assertEqual(serial.pairs, pooled.pairs)
        self.assertEqual(serial.counters, pooled.counters)

    def test_worker_counts_agree_in_wall_mode(self):
        mapper = partial(multi_pass_mapper, k=2, stop=FixedPasses(3))
        wall = TimeSource(mode=TimeMode.WALL)
        results = [self._run(mapper, 10, self.l1, time_source=wall, workers=w) for w in (1, 2, 4)]
        for other in results[1:]:
            self.assertEqual(results[0].pairs, other.pairs)
            self.assertEqual(results[0].counters, other.counters)
        for result in results:
            self.assertGreaterEqual(result.elapsed, 0.0)

    def test_output_sorted_and_filtered(self):
        result = self._run(one_itemset_mapper, 10, min_count=20)
        self.assertEqual(result.pairs, sorted(result.pairs))
        self.assertTrue(all(support >= 20 for _, support in result.pairs))

    def test_emitted_pairs_are_logical(self):
        result = self._run(one_itemset_mapper, 10, min_count=1)
        self.assertEqual(result.counters.emitted_pairs, sum(len(t) for t in self.db.transactions))

    def test_generation_scope_scales_counters(self):
        mapper = partial(multi_pass_mapper, k=2, stop=FixedPasses(1))
        task = self._run(mapper, 80, self.l1)
        per_transaction = self._run(mapper, 10, self.l1, generation_scope=GenerationScope.TRANSACTION)
        self.assertEqual(per_transaction.counters.joins, task.counters.joins * self.db.n)
        self.assertEqual(per_transaction.pairs, task.pairs)

    def test_disagreeing_contexts(self):
        with self.assertRaises(ConsistencyError):
            self._run(_unstable_mapper, 30)

    def test_broadcast_must_be_frozen(self):
        mapper = partial(multi_pass_mapper, k=2, stop=FixedPasses(1))
        with self.assertRaises(ValidationError):
            self._run(mapper, 10, trie_from_itemsets([(0,), (1,)]))

    def test_bad_spec(self):
        with self.assertRaises(ValidationError):
            self._run(one_itemset_mapper, 10, num_reducers=0)
