from django.conf import settings
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from core.exceptions import DatasetParseError
from core.itemsets import as_itemset, format_itemset, is_strictly_sorted


class ItemsetTests(SimpleTestCase):

    def test_strict_order(self):
        self.assertTrue(is_strictly_sorted((0, 2, 5)))
        self.assertTrue(is_strictly_sorted(()))
        self.assertFalse(is_strictly_sorted((0, 2, 2)))
        self.assertFalse(is_strictly_sorted((3, 1)))

    def test_as_itemset(self):
        self.assertEqual(as_itemset([1, 4]), (1, 4))
        with self.assertRaises(ValidationError):
            as_itemset([])
        with self.assertRaises(ValidationError):
            as_itemset([4, 1])

    def test_format_with_labels(self):
        self.assertEqual(format_itemset((0, 2)), "0 2")
        self.assertEqual(format_itemset((0, 2), labels=(10, 11, 12)), "10 12")


class ExceptionTests(SimpleTestCase):

    def test_parse_error_carries_line(self):
        exc = DatasetParseError(3, "x")
        self.assertIsInstance(exc, ValidationError)
        self.assertEqual(exc.line, 3)
        self.assertEqual(exc.code, "fimi_parse")
        self.assertIn("Línea 3", exc.messages[0])


class SettingsTests(SimpleTestCase):

    def test_no_auth_apps(self):
        self.assertNotIn("django.contrib.auth", settings.INSTALLED_APPS)
        self.assertNotIn("django.contrib.contenttypes", settings.INSTALLED_APPS)

    def test_quiet_loggers_while_testing(self):
        self.assertTrue(settings.TESTING)
        for app in ("datasets", "candidates", "engine", "strategies", "oracle", "cli"):
            self.assertEqual(settings.LOGGING["loggers"][app]["level"], "WARNING")

    def test_wall_clock_default(self):
        self.assertEqual(settings.MINING["TIME_MODE"], "wall")
