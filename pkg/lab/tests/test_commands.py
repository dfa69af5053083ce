import csv
import io
import json
import tempfile
import unittest
from decimal import Decimal
from pathlib import Path

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, override_settings

from lab.cli import RunConfig, parse_range
from lab.exceptions import UsageError
from lab.models import Knot
from lab.tasks import collect_samples, sample_sequence


def run(*args):
    out = io.StringIO()
    call_command(*args, stdout=out)
    return out.getvalue()


def run_json(*args):
    return json.loads(run(*args))


class ParseRangeTests(SimpleTestCase):
    def test_forms(self):
        self.assertEqual(parse_range("7"), [7])
        self.assertEqual(parse_range("1:4"), [1, 2, 3, 4])
        self.assertEqual(parse_range("100:140:20"), [100, 120, 140])

    def test_invalid(self):
        for text in ("", "a:b", "0:3", "5:2", "1:5:0", "1:2:3:4"):
            with self.subTest(text=text), self.assertRaises(UsageError):
                parse_range(text)


class RunConfigTests(SimpleTestCase):
    def test_defaults(self):
        config = RunConfig.from_options({})
        self.assertEqual(config.digits, settings.KNOTLAB_DEFAULT_DIGITS)
        self.assertEqual(config.u, "ipi")
        self.assertEqual(config.as_dict(), {"digits": config.digits, "u": "ipi", "seed": 0})

    def test_digits_floor(self):
        with self.assertRaises(UsageError):
            RunConfig(digits=settings.KNOTLAB_MIN_DIGITS - 1)

    def test_N_in_summary(self):
        config = RunConfig.from_options({"digits": 40, "N": "3:9:3"})
        self.assertEqual(config.N_values, (3, 6, 9))
        self.assertEqual(config.as_dict()["N"], [3, 9])


class JonesCommandTests(TestCase):
    def test_figure_eight(self):
        report = run_json("jones", "4_1")
        self.assertEqual(report["polynomial"], {"5/2": 1, "-5/2": 1})
        self.assertEqual(report["color"], 2)

    def test_unknot_by_flag(self):
        report = run_json("jones", "--knot", "unknot")
        self.assertEqual(report["polynomial"], {"1/2": 1, "-1/2": 1})

    def test_trefoil_rows(self):
        rows = run_json("jones", "3_1")["rows"]
        self.assertEqual([r["q_exponent"] for r in rows], ["-1/2", "-3/2", "-5/2", "-9/2"])
        self.assertEqual([r["coefficient"] for r in rows], [1, 1, 1, -1])

    def test_colored(self):
        report = run_json("jones", "unknot", "--color", "3")
        self.assertEqual(report["polynomial"], {"1": 1, "0": 1, "-1": 1})

    def test_unknown_knot(self):
        with self.assertRaises(CommandError) as ctx:
            run("jones", "nosuch")
        self.assertEqual(ctx.exception.returncode, 2)

    def test_missing_name(self):
        with self.assertRaises(CommandError) as ctx:
            run("jones")
        self.assertEqual(ctx.exception.returncode, 2)

    def test_budget_exceeded(self):
        with override_settings(KNOTLAB_MAX_CROSSINGS=2):
            with self.assertRaises(CommandError) as ctx:
                run("jones", "3_1")
        self.assertEqual(ctx.exception.returncode, 1)


class KashaevCommandTests(TestCase):
    def test_first_values(self):
        report = run_json("kashaev", "--N", "1:3", "--digits", "32")
        values = [Decimal(row["value"]) for row in report["rows"]]
        self.assertEqual([row["N"] for row in report["rows"]], [1, 2, 3])
        for value, expected in zip(values, (1, 5, 13)):
            self.assertAlmostEqual(float(value), expected, places=20)
        self.assertIn("value_err", report["rows"][0])
        self.assertEqual(report["config"]["N"], [1, 3])

    def test_from_polynomial(self):
        report = run_json("kashaev", "--knot", "3_1", "--N", "1:2", "--digits", "32")
        self.assertEqual(len(report["rows"]), 2)
        first = report["rows"][0]
        self.assertAlmostEqual(float(first.get("value_re", first.get("value"))), 1, places=20)

    def test_N_required(self):
        with self.assertRaises(CommandError) as ctx:
            run("kashaev")
        self.assertEqual(ctx.exception.returncode, 2)

    def test_digits_too_low(self):
        with self.assertRaises(CommandError) as ctx:
            run("kashaev", "--N", "1:3", "--digits", "10")
        self.assertEqual(ctx.exception.returncode, 2)

    def test_csv(self):
        text = run("kashaev", "--N", "1:3", "--digits", "32", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(text)))
        self.assertEqual([row["N"] for row in rows], ["1", "2", "3"])
        self.assertEqual(list(rows[0]), ["N", "value", "value_err"])

    def test_out_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "kashaev.json"
            self.assertEqual(run("kashaev", "--N", "2", "--digits", "32", "--out", str(path)), "")
            report = json.loads(path.read_text(encoding="utf-8"))
        self.assertEqual(report["rows"][0]["N"], 2)

    def test_deterministic(self):
        args = ("kashaev", "--N", "1:6", "--digits", "40")
        self.assertEqual(run(*args), run(*args))


class ParallelSamplingTests(TestCase):
    def setUp(self):
        self.eager = sample_sequence.app.conf.task_always_eager
        sample_sequence.app.conf.task_always_eager = True

    def tearDown(self):
        sample_sequence.app.conf.task_always_eager = self.eager

    def test_matches_in_process(self):
        args = ("kashaev", "--N", "1:5", "--digits", "32")
        serial = run(*args)
        with override_settings(KNOTLAB_PARALLEL=True):
            parallel = run(*args)
        self.assertEqual(serial, parallel)

    def test_group_returns_every_payload(self):
        with override_settings(KNOTLAB_PARALLEL=True):
            parallel = collect_samples("ipi", [3, 1, 2], 32)
        serial = collect_samples("ipi", [3, 1, 2], 32)
        self.assertEqual(sorted(parallel), [1, 2, 3])
        self.assertEqual(parallel, serial)


class VolumeCommandTests(TestCase):
    def test_at_ipi(self):
        row = run_json("volume", "--digits", "32")["rows"][0]
        self.assertAlmostEqual(float(row["vol"]), 2.0298832128193, places=12)
        self.assertAlmostEqual(float(row["cs"]), 0, places=20)
        self.assertTrue(row["table_vol"].startswith("2.029883212819"))
        for name in ("ics_re", "ics_im", "torsion_re", "s2_im", "s3_re"):
            self.assertIn(name, row)

    def test_needs_closed_form(self):
        with self.assertRaises(CommandError) as ctx:
            run("volume", "--knot", "3_1", "--digits", "32")
        self.assertEqual(ctx.exception.returncode, 2)

    def test_bad_u(self):
        with self.assertRaises(CommandError) as ctx:
            run("volume", "--u", "1+x", "--digits", "32")
        self.assertEqual(ctx.exception.returncode, 2)


class RecursionCommandTests(TestCase):
    def test_unknot(self):
        report = run_json(
            "recursion", "--knot", "unknot", "--order", "1", "--degree", "1", "--s-degree", "2",
            "--m-step", "2", "--s-step", "1", "--N", "1:12", "--digits", "32",
        )
        self.assertTrue(report["found"])
        self.assertEqual(report["order"], 1)
        self.assertEqual(report["rows"], report["operator"])
        self.assertEqual({(t["a"], t["b"]) for t in report["rows"]}, {(0, 0), (0, 2), (1, 0), (1, 2)})
        self.assertNotIn("curve_residual", report)

    def test_nothing_in_box(self):
        report = run_json("recursion", "--knot", "unknot", "--order", "0", "--degree", "1",
                          "--N", "1:12", "--digits", "32")
        self.assertFalse(report["found"])

    def test_normalized_needs_closed_form(self):
        with self.assertRaises(CommandError) as ctx:
            run("recursion", "--knot", "3_1", "--normalized", "--N", "1:8", "--digits", "32")
        self.assertEqual(ctx.exception.returncode, 2)


class QuantizeCommandTests(TestCase):
    def test_graphs(self):
        report = run_json("quantize", "graphs", "--digits", "32")
        self.assertTrue(report["passed"])
        self.assertEqual([row["value"] for row in report["rows"]], [2, 36, 1728])

    def test_moyal(self):
        report = run_json("quantize", "moyal", "--trials", "3", "--degree", "3", "--digits", "32")
        self.assertTrue(report["passed"])
        self.assertEqual(report["rows"][0]["case"], "[x,p]")

    def test_oscillator_and_bohr(self):
        for check in ("oscillator", "bohr"):
            with self.subTest(check=check):
                self.assertTrue(run_json("quantize", check, "--digits", "32")["passed"])


class LoadKnotsCommandTests(TestCase):
    def test_load(self):
        report = run_json("load_knots")
        self.assertEqual((report["created"], report["updated"]), (3, 0))
        self.assertEqual(
            report["rows"],
            [
                {"name": "3_1", "crossings": 3, "has_a_poly": True},
                {"name": "4_1", "crossings": 4, "has_a_poly": True},
                {"name": "unknot", "crossings": 0, "has_a_poly": False},
            ],
        )
        self.assertEqual(run_json("load_knots")["updated"], 3)
        self.assertEqual(Knot.objects.count(), 3)

    def test_bad_table(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bad.json"
            path.write_text('{"knots": []}', encoding="utf-8")
            with self.assertRaises(CommandError) as ctx:
                run("load_knots", "--table", str(path))
        self.assertEqual(ctx.exception.returncode, 2)


class FitCommandTests(TestCase):
    @unittest.skipUnless(settings.KNOTLAB_SLOW_TESTS, "N up to 800")
    def test_kashaev_growth(self):
        report = run_json("fit", "--N", "100:800:20", "--digits", "64")
        rows = {row["quantity"]: row for row in report["rows"]}
        self.assertAlmostEqual(float(rows["growth_rate"]["fitted_re"]), 0.3230659472, places=9)
        self.assertLess(float(rows["log_coeff"]["relative_error"]), 1e-4)
        self.assertEqual(report["fit"]["model_order"], 3)

    def test_needs_N(self):
        with self.assertRaises(CommandError) as ctx:
            run("fit", "--digits", "32")
        self.assertEqual(ctx.exception.returncode, 2)
