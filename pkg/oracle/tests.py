from django.test import SimpleTestCase

from datasets.services import parse_fimi, stats
from engine.models import Rounding, TimeMode
from engine.services import TimeSource
from oracle.services import OracleBudgetExceeded, brute_force_frequent, set_based_gen, verify_run
from strategies.reports import RunReport
from strategies.services import StrategyConfig, spc_run

# a=0, b=1, c=2
SMALL = parse_fimi("1 2\n1 2\n1 3\n")


class BruteForceTests(SimpleTestCase):

    def test_hand_countable(self):
        levels = brute_force_frequent(SMALL, 0.5)
        self.assertEqual(levels, {1: {(0,): 3, (1,): 2}, 2: {(0, 1): 2}})

    def test_threshold_above_n(self):
        self.assertEqual(brute_force_frequent(SMALL, 1.0, rounding=Rounding.FLOOR_PLUS_ONE), {})

    def test_max_k(self):
        self.assertEqual(list(brute_force_frequent(SMALL, 0.5, max_k=1)), [1])

    def test_budget(self):
        with self.assertRaises(OracleBudgetExceeded):
            brute_force_frequent(SMALL, 0.5, budget=1)


class SetBasedGenTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(set_based_gen({(1, 2), (1, 3), (2, 3)}, prune=True), {(1, 2, 3)})
        self.assertEqual(set_based_gen({(1, 2), (1, 3)}, prune=False), {(1, 2, 3)})
        self.assertEqual(set_based_gen({(1, 2), (1, 3)}, prune=True), set())


class VerifyRunTests(SimpleTestCase):

    def setUp(self):
        self.db = parse_fimi("1 2 3\n1 2\n1 3\n2 3\n1 2 3 4\n1 4\n")
        self.report = spc_run(self.db, 0.5, TimeSource(mode=TimeMode.COST), StrategyConfig(lines_per_split=2))

    def test_fresh_run_is_clean(self):
        self.assertTrue(verify_run(self.report, self.db).ok)

    def test_tampered_support(self):
        level = self.report.levels[1]
        itemset = next(iter(level.supports))
        level.supports[itemset] -= 1
        verdict = verify_run(self.report, self.db)
        self.assertFalse(verdict.ok)
        expected = level.supports[itemset] + 1
        self.assertEqual(verdict.mismatched, [(itemset, expected, expected - 1)])
        self.assertEqual((verdict.missing, verdict.extra), ([], []))

    def test_empty_report(self):
        empty = RunReport(
            label="SPC", variant="spc", optimized=False, min_sup=0.5, threshold=3, stats=stats(self.db),
        )
        verdict = verify_run(empty, self.db)
        expected = self.report.frequent()
        self.assertEqual(sorted(itemset for itemset, _ in verdict.missing), sorted(expected))

    def test_wrong_min_sup(self):
        self.assertFalse(verify_run(self.report, self.db, min_sup=0.3).ok)

    def test_counts_only(self):
        self.report.has_itemsets = False
        self.assertTrue(verify_run(self.report, self.db).ok)
        self.assertFalse(verify_run(self.report, self.db, min_sup=0.3).ok)
