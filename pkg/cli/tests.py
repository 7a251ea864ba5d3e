import csv
import io
import json
import tempfile
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from cli.services import parse_report, report_to_csv, report_to_json, same_experiment
from cli.tables import candidate_table, cost_table, cost_totals, elapsed_table, render_table
from datasets.services import load_fimi, parse_fimi
from engine.models import TimeMode
from engine.services import CostCoefficients, TimeSource
from strategies.models import Variant
from strategies.services import StrategyConfig, run_strategy

FIMI = "10 11 12 13\n10 11 12\n10 11 13\n11 12 13\n10 12 14\n10 11 12 13 15\n"
COST = TimeSource(mode=TimeMode.COST, coefficients=CostCoefficients(2e-5, 1e-5, 2e-5, 2e-6))


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        self.data = self.tmp / "small.dat"
        self.data.write_text(FIMI)

    def tearDown(self):
        self._tmp.cleanup()

    def call(self, *args):
        out, err = io.StringIO(), io.StringIO()
        call_command(*args, stdout=out, stderr=err)
        return out.getvalue(), err.getvalue()

    def run_report(self, name, *extra):
        path = self.tmp / name
        self.call("run", "--input", str(self.data), "--min-sup", "0.5", "--out-file", str(path), *extra)
        return path


class RunCommandTests(CommandTestCase):

    def test_json_report(self):
        path = self.run_report("spc.json", "--algo", "spc")
        data = json.loads(path.read_text())
        self.assertEqual(data["schema_version"], 1)
        self.assertEqual(data["label"], "SPC")
        self.assertEqual(data["dataset"], "small.dat")
        self.assertEqual(data["threshold"], 3)
        self.assertEqual([level["count"] for level in data["levels"]], [4, 6, 3])
        self.assertNotIn("items", data["levels"][0])

    def test_emit_itemsets_uses_labels(self):
        path = self.run_report("spc.json", "--emit-itemsets")
        data = json.loads(path.read_text())
        self.assertEqual(data["levels"][1]["items"][0], {"itemset": [10, 11], "support": 4})

    def test_stdout_csv(self):
        out, _ = self.call("run", "--input", str(self.data), "--min-sup", "0.5", "--out", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        self.assertEqual(rows[0][0], "label")
        self.assertEqual(rows[1][1], "1")

    def test_rerun_is_byte_identical(self):
        for algo in ("vfpc", "etdpc", "dpc"):
            first = self.run_report("a.json", "--algo", algo, "--time", "cost")
            text = first.read_text()
            second = self.run_report("b.json", "--algo", algo, "--time", "cost")
            self.assertEqual(text, second.read_text())

    def test_missing_input(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("run", "--algo", "spc", "--min-sup", "0.5")
        self.assertEqual(ctx.exception.returncode, 2)

    def test_optimized_spc_rejected(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("run", "--input", str(self.data), "--min-sup", "0.5", "--algo", "spc", "--optimized")
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn("VFPC/ETDPC", str(ctx.exception))

    def test_bad_min_sup(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("run", "--input", str(self.data), "--min-sup", "1.5")
        self.assertEqual(ctx.exception.returncode, 2)

    def test_unreadable_input(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("run", "--input", str(self.tmp / "missing.dat"), "--min-sup", "0.5")
        self.assertEqual(ctx.exception.returncode, 3)

    def test_unparsable_input(self):
        bad = self.tmp / "bad.dat"
        bad.write_text("1 2\nx\n")
        with self.assertRaises(CommandError) as ctx:
            self.call("run", "--input", str(bad), "--min-sup", "0.5")
        self.assertEqual(ctx.exception.returncode, 3)

    def test_generated_input(self):
        out, _ = self.call("run", "--generate", "50,12,4,1", "--min-sup", "0.3", "--algo", "etdpc", "--optimized")
        data = json.loads(out)
        self.assertEqual(data["label"], "Optimized-ETDPC")
        self.assertEqual(data["stats"]["n"], 50)


class VerifyCommandTests(CommandTestCase):

    def test_fresh_run(self):
        path = self.run_report("spc.json", "--emit-itemsets")
        out, _ = self.call("verify", "--input", str(self.data), "--report", str(path))
        self.assertIn("OK", out)

    def test_counts_only_report(self):
        path = self.run_report("vfpc.json", "--algo", "vfpc", "--optimized")
        out, _ = self.call("verify", "--input", str(self.data), "--report", str(path))
        self.assertIn("OK", out)

    def test_tampered_report(self):
        path = self.run_report("spc.json", "--emit-itemsets")
        data = json.loads(path.read_text())
        data["levels"][1]["items"][0]["support"] -= 1
        path.write_text(json.dumps(data))

        out = io.StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command("verify", "--input", str(self.data), "--report", str(path), stdout=out)
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn("{10 11}", out.getvalue())

    def test_wrong_min_sup(self):
        path = self.run_report("spc.json", "--emit-itemsets")
        with self.assertRaises(CommandError) as ctx:
            self.call("verify", "--input", str(self.data), "--report", str(path), "--min-sup", "0.3")
        self.assertEqual(ctx.exception.returncode, 1)

    def test_unreadable_report(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("verify", "--input", str(self.data), "--report", str(self.tmp / "nope.json"))
        self.assertEqual(ctx.exception.returncode, 3)

    def test_invalid_report(self):
        path = self.tmp / "broken.json"
        path.write_text('{"schema_version": 99}')
        with self.assertRaises(CommandError) as ctx:
            self.call("verify", "--input", str(self.data), "--report", str(path))
        self.assertEqual(ctx.exception.returncode, 3)


class ReportCommandTests(CommandTestCase):

    def test_single_row_table(self):
        path = self.run_report("spc.json")
        out, err = self.call("report", "--inputs", str(path))
        self.assertIn("SPC (4)", out)
        self.assertIn("Candidates per phase", out)
        self.assertEqual(err, "")

    def test_csv_parses_back(self):
        path = self.run_report("dpc.json", "--algo", "dpc")
        report = parse_report(path.read_text())
        out, _ = self.call("report", "--inputs", str(path), "--format", "csv")
        rows = list(csv.reader(io.StringIO(out.split("\n\n")[0])))
        header, row = rows[0], rows[1]
        for phase in report.phases:
            cell = row[header.index(f"Pass {phase.first_pass}")]
            self.assertEqual(float(cell), phase.elapsed)
        self.assertEqual(float(row[header.index("Total")]), report.total_elapsed)

    def test_mixed_experiments_warn(self):
        first = self.run_report("a.json")
        second = self.tmp / "b.json"
        self.call("run", "--input", str(self.data), "--min-sup", "0.3", "--out-file", str(second))
        _, err = self.call("report", "--inputs", str(first), str(second))
        self.assertIn("WARNING", err)


class CostCommandTests(CommandTestCase):

    def test_optimized_breakdown(self):
        plain = self.run_report("vfpc.json", "--algo", "vfpc")
        optimized = self.run_report("ovfpc.json", "--algo", "vfpc", "--optimized")
        out, _ = self.call("cost", "--inputs", str(plain), str(optimized))
        self.assertIn("Optimized-VFPC", out)
        self.assertIn("prune_checks 0", out)

    def test_spc_has_no_unpruned_passes(self):
        report = parse_report(self.run_report("spc.json").read_text())
        self.assertEqual(cost_totals(report)["unpruned_passes"], 0)


class GenerateStatsCommandTests(CommandTestCase):

    def test_generate_then_stats(self):
        target = self.tmp / "synthetic.dat"
        self.call("generate", "--n", "40", "--items", "15", "--width", "4", "--seed", "9",
                  "--out-file", str(target))
        self.assertEqual(load_fimi(target).n, 40)
        out, _ = self.call("stats", str(target), str(self.data))
        self.assertIn("synthetic.dat", out)
        self.assertIn("small.dat", out)

    def test_generate_is_deterministic(self):
        first, _ = self.call("generate", "--n", "30", "--items", "10", "--width", "3", "--seed", "2")
        second, _ = self.call("generate", "--n", "30", "--items", "10", "--width", "3", "--seed", "2")
        self.assertEqual(first, second)

    def test_generate_invalid(self):
        with self.assertRaises(CommandError) as ctx:
            self.call("generate", "--n", "10", "--items", "3", "--width", "5")
        self.assertEqual(ctx.exception.returncode, 2)


class ReportFormatTests(SimpleTestCase):

    def setUp(self):
        self.db = parse_fimi(FIMI)
        self.reports = [
            run_strategy(self.db, 0.5, StrategyConfig(variant=variant, optimized=optimized), COST)
            for variant, optimized in [(Variant.SPC, False), (Variant.VFPC, False), (Variant.VFPC, True)]
        ]

    def test_json_round_trip_is_fixed_point(self):
        for report in self.reports:
            for emit in (False, True):
                text = report_to_json(report, labels=self.db.labels, emit_itemsets=emit)
                again = report_to_json(parse_report(text), emit_itemsets=emit)
                self.assertEqual(text, again)

    def test_json_with_db_recodes_labels(self):
        text = report_to_json(self.reports[0], labels=self.db.labels, emit_itemsets=True)
        self.assertEqual(parse_report(text, self.db).frequent(), self.reports[0].frequent())

    def test_csv_projection(self):
        rows = list(csv.reader(io.StringIO(report_to_csv(self.reports[1]))))
        self.assertEqual(len(rows), 1 + self.reports[1].phase_count)
        for row, phase in zip(rows[1:], self.reports[1].phases):
            self.assertEqual(float(row[-1]), phase.elapsed)
            self.assertEqual(int(row[6]), phase.candidate_count)

    def test_elapsed_table_alignment(self):
        header, rows = elapsed_table(self.reports)
        self.assertEqual(header[-2:], ["Total", "Actual"])
        self.assertEqual(len(rows), 3)
        self.assertTrue(rows[0][0].startswith("SPC ("))

    def test_candidate_table_starts_at_pass_two(self):
        header, rows = candidate_table(self.reports[:1])
        self.assertEqual(header[1], "Pass 2")
        self.assertEqual(rows[0][1], str(self.reports[0].phases[1].candidate_count))

    def test_empty_cost_table(self):
        self.assertEqual(render_table(*cost_table([])), "")

    def test_same_experiment(self):
        self.assertTrue(same_experiment(self.reports))
