import random
from collections import Counter
from itertools import combinations

from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from candidates.trie import (
    CandidateTrie,
    add_support,
    apriori_gen,
    non_apriori_gen,
    subset_match,
    trie_from_itemsets,
)
from core.exceptions import TrieMismatchError
from oracle.services import set_based_gen


class TrieStructureTests(SimpleTestCase):

    def test_empty(self):
        trie = trie_from_itemsets([], level=1)
        self.assertEqual(len(trie), 0)
        self.assertEqual(list(trie), [])

    def test_from_itemsets(self):
        trie = trie_from_itemsets([(0, 1), (0, 2), (1, 2)])
        self.assertEqual(trie.level, 2)
        self.assertEqual(len(trie), 3)
        self.assertIn((0, 2), trie)
        self.assertNotIn((0, 3), trie)

    def test_set_semantics(self):
        trie = CandidateTrie(2)
        self.assertTrue(trie.insert((0, 1)))
        self.assertFalse(trie.insert((0, 1)))
        self.assertEqual(len(trie), 1)

    def test_lexicographic_iteration(self):
        trie = CandidateTrie(2)
        for itemset in [(2, 3), (0, 5), (0, 1), (0, 2)]:
            trie.insert(itemset)
        self.assertEqual(list(trie), [(0, 1), (0, 2), (0, 5), (2, 3)])

    def test_rejects_bad_input(self):
        with self.assertRaises(ValidationError):
            trie_from_itemsets([(0,), (0, 1)])
        with self.assertRaises(ValidationError):
            trie_from_itemsets([(1, 0)])
        with self.assertRaises(ValidationError):
            CandidateTrie(0)

    def test_frozen_is_read_only(self):
        trie = trie_from_itemsets([(1, 2)]).freeze()
        with self.assertRaises(RuntimeError):
            trie.insert((1, 3))
        with self.assertRaises(RuntimeError):
            trie.add_support((1, 2))

    def test_dump(self):
        trie = trie_from_itemsets([(0, 1), (1, 2)])
        trie.add_support((1, 2), 4)
        self.assertEqual(trie.dump(), "0 1\t0\n1 2\t4\n")


class GenerationTests(SimpleTestCase):

    def test_pairs_of_singletons(self):
        out, counters = apriori_gen(trie_from_itemsets([(0,), (1,), (2,)]))
        self.assertEqual(list(out), [(0, 1), (0, 2), (1, 2)])
        self.assertEqual((counters.joins, counters.pruned, counters.prune_checks), (3, 0, 0))

    def test_prune_removes_unsupported(self):
        out, counters = apriori_gen(trie_from_itemsets([(1, 2), (1, 3)]))
        self.assertEqual(len(out), 0)
        self.assertEqual(out.level, 3)
        self.assertEqual((counters.joins, counters.pruned, counters.prune_checks), (1, 1, 1))

    def test_join_only_keeps_candidate(self):
        out, counters = non_apriori_gen(trie_from_itemsets([(1, 2), (1, 3)]))
        self.assertEqual(list(out), [(1, 2, 3)])
        self.assertEqual((counters.joins, counters.pruned, counters.prune_checks), (1, 0, 0))

    def test_c2_size(self):
        for size in (29, 48):
            out, _ = apriori_gen(trie_from_itemsets([(i,) for i in range(size)]))
            self.assertEqual(len(out), size * (size - 1) // 2)
        self.assertEqual(len(apriori_gen(trie_from_itemsets([(i,) for i in range(48)]))[0]), 1128)

    def test_vacuous_prune(self):
        prev = trie_from_itemsets(combinations(range(5), 2))
        pruned, _ = apriori_gen(prev)
        joined, _ = non_apriori_gen(prev)
        self.assertEqual(list(pruned), list(joined))

    def test_matches_set_based_generation(self):
        rng = random.Random(20240601)
        for _ in range(200):
            size = rng.randint(1, 4)
            universe = list(combinations(range(rng.randint(size + 1, 8)), size))
            prev = set(rng.sample(universe, rng.randint(0, len(universe))))
            trie = trie_from_itemsets(prev, level=size)

            pruned, counters = apriori_gen(trie)
            joined, _ = non_apriori_gen(trie)
            self.assertEqual(set(pruned), set_based_gen(prev, prune=True))
            self.assertEqual(set(joined), set_based_gen(prev, prune=False))

            k = size + 1
            self.assertTrue(set(pruned) <= set(joined))
            self.assertEqual(counters.joins, len(joined))
            self.assertEqual(counters.pruned, len(joined) - len(pruned))
            self.assertLessEqual(counters.prune_checks, counters.joins * max(k - 2, 0))


class SubsetMatchTests(SimpleTestCase):

    def test_match(self):
        trie = trie_from_itemsets([(1, 2), (1, 4), (2, 3)])
        matched, visits = subset_match(trie, (1, 2, 3))
        self.assertEqual(matched, [(1, 2), (2, 3)])
        self.assertGreater(visits, 0)

    def test_empty_transaction(self):
        trie = trie_from_itemsets([(1, 2)])
        self.assertEqual(subset_match(trie, ()), ([], 0))

    def test_matches_brute_force(self):
        rng = random.Random(7)
        candidates = [c for c in combinations(range(9), 3) if rng.random() < 0.4]
        trie = trie_from_itemsets(candidates, level=3)
        for _ in range(50):
            t = tuple(sorted(rng.sample(range(9), rng.randint(0, 9))))
            matched, _ = subset_match(trie, t)
            expected = [c for c in candidates if set(c) <= set(t)]
            self.assertEqual(matched, expected)


class SupportTests(SimpleTestCase):

    def test_add_twice(self):
        trie = trie_from_itemsets([(1, 2)])
        add_support(trie, (1, 2))
        add_support(trie, (1, 2))
        self.assertEqual(trie.support((1, 2)), 2)

    def test_zero_delta_rejected(self):
        with self.assertRaises(ValidationError):
            add_support(trie_from_itemsets([(1, 2)]), (1, 2), 0)

    def test_absent_itemset(self):
        with self.assertRaises(TrieMismatchError):
            add_support(trie_from_itemsets([(1, 2)]), (1, 3))

    def test_pair_counts(self):
        rng = random.Random(11)
        transactions = [tuple(sorted(rng.sample(range(8), rng.randint(1, 6)))) for _ in range(60)]
        trie = trie_from_itemsets(combinations(range(8), 2))
        for t in transactions:
            for itemset in subset_match(trie, t)[0]:
                add_support(trie, itemset)

        expected = Counter(pair for t in transactions for pair in combinations(t, 2))
        for itemset, support in trie.items():
            self.assertEqual(support, expected.get(itemset, 0))
