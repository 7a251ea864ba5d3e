from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from core.exceptions import DatasetParseError
from datasets.services import (
    GeneratorConfig,
    TransactionDb,
    generate_synthetic,
    make_splits,
    parse_fimi,
    serialize_fimi,
    split_transactions,
    stats,
)


class ParseFimiTests(SimpleTestCase):

    def test_recoding(self):
        db = parse_fimi("1 2 3\n2 3\n")
        self.assertEqual(db.n, 2)
        self.assertEqual(db.item_count, 3)
        self.assertEqual(db.transactions, ((0, 1, 2), (1, 2)))

    def test_duplicates_and_order(self):
        db = parse_fimi("3 3 1\n")
        self.assertEqual(db.transactions, ((0, 1),))
        self.assertEqual(db.labels, (1, 3))

    def test_ids_follow_label_order(self):
        db = parse_fimi("40 7\n7 100\n")
        self.assertEqual(db.labels, (7, 40, 100))
        self.assertEqual(db.to_labels((0, 2)), (7, 100))
        self.assertEqual(db.from_labels([100, 7]), (0, 2))

    def test_empty_input(self):
        db = parse_fimi("")
        self.assertEqual(db.n, 0)
        self.assertEqual(db.item_count, 0)

    def test_blank_lines_skipped(self):
        db = parse_fimi(["1 2\n", "\n", "   \n", "2\n"])
        self.assertEqual(db.n, 2)

    def test_bad_token_names_line(self):
        with self.assertRaises(DatasetParseError) as ctx:
            parse_fimi("1 2\n3 -4\n")
        self.assertEqual(ctx.exception.line, 2)
        self.assertEqual(ctx.exception.token, "-4")

    def test_round_trip(self):
        db = generate_synthetic(GeneratorConfig(n=50, item_count=30, avg_width=4, seed=3))
        self.assertEqual(parse_fimi(serialize_fimi(db)), db)


class StatsTests(SimpleTestCase):

    def test_single_transaction(self):
        db = parse_fimi("1 2 3 4 5\n")
        self.assertEqual(stats(db).avg_width, 5)

    def test_empty(self):
        summary = stats(TransactionDb(transactions=()))
        self.assertEqual((summary.n, summary.item_count, summary.avg_width), (0, 0, 0.0))

    def test_exact_average(self):
        summary = stats(parse_fimi("1 2\n1\n1 2 3\n"))
        self.assertEqual(summary.avg_width, 2.0)
        self.assertEqual(summary.item_count, 3)


class SplitTests(SimpleTestCase):

    def _db(self, n):
        return TransactionDb(transactions=((0,),) * n, labels=(1,))

    def test_mushroom_like(self):
        plan = make_splits(self._db(8124), 1000)
        self.assertEqual(len(plan), 9)
        self.assertEqual(plan.boundaries[-1], (8000, 8124))

    def test_chess_like(self):
        self.assertEqual(len(make_splits(self._db(3196), 400)), 8)

    def test_single_split(self):
        self.assertEqual(make_splits(self._db(5), 10).boundaries, ((0, 5),))

    def test_zero_lines_rejected(self):
        with self.assertRaises(ValidationError):
            make_splits(self._db(5), 0)

    def test_splits_cover_db(self):
        db = parse_fimi("1\n2\n1 2\n3\n1 3\n2 3\n1 2 3\n")
        for lines in range(1, 9):
            plan = make_splits(db, lines)
            blocks = split_transactions(db, plan)
            self.assertEqual(tuple(t for block in blocks for t in block), db.transactions)
            self.assertTrue(all(len(block) == lines for block in blocks[:-1]))


class GeneratorTests(SimpleTestCase):

    def test_deterministic(self):
        config = GeneratorConfig(n=100, item_count=20, avg_width=5, seed=42)
        self.assertEqual(serialize_fimi(generate_synthetic(config)), serialize_fimi(generate_synthetic(config)))

    def test_seed_changes_output(self):
        a = generate_synthetic(GeneratorConfig(n=100, item_count=20, avg_width=5, seed=1))
        b = generate_synthetic(GeneratorConfig(n=100, item_count=20, avg_width=5, seed=2))
        self.assertNotEqual(a, b)

    def test_minimal(self):
        db = generate_synthetic(GeneratorConfig(n=1, item_count=1, avg_width=1, seed=0))
        self.assertEqual(db.transactions, ((0,),))

    def test_shape(self):
        db = generate_synthetic(GeneratorConfig(n=10000, item_count=192, avg_width=20, seed=7))
        summary = stats(db)
        self.assertEqual(summary.n, 10000)
        self.assertLessEqual(summary.item_count, 192)
        self.assertAlmostEqual(summary.avg_width, 20, delta=1.0)

    def test_invalid_config(self):
        with self.assertRaises(ValidationError):
            generate_synthetic(GeneratorConfig(n=10, item_count=5, avg_width=6))
        with self.assertRaises(ValidationError):
            generate_synthetic(GeneratorConfig(n=0, item_count=5, avg_width=2))
