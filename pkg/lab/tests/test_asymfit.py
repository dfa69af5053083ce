import unittest

import mpmath
from django.conf import settings
from django.test import SimpleTestCase
from mpmath import mp

from lab.acurve import ics_closed_41, s2_41
from lab.asymfit import (
    FitReport,
    SequenceSample,
    build_sequence,
    compare_quantum_vc,
    fit_expansion,
    growth_rate_richardson,
    is_ipi,
    richardson_limit,
)
from lab.exceptions import IllConditionedError, UsageError
from lab.numerics import parse_u

GROWTH_41 = mpmath.mpf("0.3230659472")


def torsion_constant():
    return -mpmath.log(3) / 4


def synthetic(N_values, a, b, c, d):
    out = []
    for N in N_values:
        N = mpmath.mpf(N)
        log_value = a * N + b * mpmath.log(N) + c + d / N
        out.append(SequenceSample(N=int(N), value=mpmath.exp(log_value), log_value=log_value))
    return out


class FitTests(SimpleTestCase):
    def test_recovers_synthetic_coefficients(self):
        with mp.workdps(50):
            samples = synthetic(range(10, 42, 2), mpmath.mpf("0.7"), mpmath.mpf("1.5"), mpmath.mpf("-0.25"),
                                mpmath.mpf("0.4"))
            report = fit_expansion(samples, model_order=2)
            self.assertLess(abs(report.growth_rate - mpmath.mpf("0.7")), mpmath.mpf(10) ** -20)
            self.assertLess(abs(report.log_coeff - mpmath.mpf("1.5")), mpmath.mpf(10) ** -15)
            self.assertLess(abs(report.constant + mpmath.mpf("0.25")), mpmath.mpf(10) ** -15)
            self.assertLess(abs(report.inverse_coeffs[0] - mpmath.mpf("0.4")), mpmath.mpf(10) ** -12)
            self.assertLess(report.residual, mpmath.mpf(10) ** -15)
            self.assertEqual(len(report.held_out_N), 3)
            self.assertNotIn(10, report.held_out_N)
            self.assertNotIn(40, report.held_out_N)

    def test_constrained_log(self):
        with mp.workdps(50):
            samples = synthetic(range(10, 30), mpmath.mpf(1), mpmath.mpf(3) / 2, mpmath.mpf(2), mpmath.mpf(0))
            report = fit_expansion(samples, model_order=1, constrain_log=True)
            self.assertEqual(report.log_coeff, mpmath.mpf(3) / 2)
            self.assertLess(abs(report.constant - 2), mpmath.mpf(10) ** -20)

    def test_too_few_samples(self):
        with mp.workdps(30):
            samples = synthetic(range(10, 15), 1, 1, 1, 1)
            with self.assertRaises(UsageError):
                fit_expansion(samples, model_order=3)
            with self.assertRaises(UsageError):
                fit_expansion(samples, holdout=2)

    def test_ill_conditioned(self):
        with mp.workdps(30):
            samples = synthetic(range(100, 140), 1, 1, 1, 1)
            with self.assertRaises(IllConditionedError):
                fit_expansion(samples, model_order=3, max_condition=10)


class RichardsonTests(SimpleTestCase):
    def test_polynomial_tail(self):
        with mp.workdps(30):
            N_list = list(range(10, 16))
            values = [2 + mpmath.mpf(3) / N + mpmath.mpf(5) / N**2 for N in N_list]
            self.assertLess(abs(richardson_limit(values, N_list) - 2), mpmath.mpf(10) ** -20)

    def test_with_log(self):
        with mp.workdps(30):
            N_list = list(range(10, 16))
            values = [2 + mpmath.log(mpmath.mpf(1) / N) / 2 + mpmath.mpf(1) / N for N in N_list]
            self.assertLess(abs(richardson_limit(values, N_list, include_log=True) - 2), mpmath.mpf(10) ** -15)

    def test_mismatched_input(self):
        with self.assertRaises(UsageError):
            richardson_limit([1, 2], [1])


class ComparisonTests(SimpleTestCase):
    def test_exact_report_compares_cleanly(self):
        with mp.workdps(40):
            u = parse_u("ipi")
            report = FitReport(
                growth_rate=-ics_closed_41(u) / (4 * u),
                log_coeff=mpmath.mpf(3) / 2,
                constant=torsion_constant(),
                inverse_coeffs=[s2_41(u) * u],
                residual=mpmath.mpf(0),
                condition=mpmath.mpf(1),
                model_order=1,
                constrain_log=False,
            )
            rows = compare_quantum_vc(report, "ipi")
            self.assertEqual([r["quantity"] for r in rows], ["growth_rate", "log_coeff", "constant", "s2_tilde"])
            for row in rows:
                self.assertLess(row["relative_error"], mpmath.mpf(10) ** -20, msg=row["quantity"])
            self.assertLess(abs(rows[0]["expected"] - GROWTH_41), mpmath.mpf(10) ** -9)

    def test_is_ipi(self):
        self.assertTrue(is_ipi("ipi"))
        self.assertTrue(is_ipi(" iPi "))
        self.assertFalse(is_ipi("ipi+0.3"))
        self.assertTrue(is_ipi(mpmath.mpc(0, mpmath.pi)))


class KashaevSequenceTests(SimpleTestCase):
    def test_short_sequence(self):
        with mp.workdps(84):
            samples = build_sequence("ipi", range(20, 84, 4), 32)
            report = fit_expansion(samples, model_order=3, constrain_log=True)
            self.assertLess(abs(mpmath.re(report.growth_rate) - GROWTH_41), mpmath.mpf(10) ** -4)
            self.assertLess(abs(mpmath.re(report.constant) - torsion_constant()), mpmath.mpf(10) ** -2)
            self.assertLess(abs(growth_rate_richardson(samples) - GROWTH_41), mpmath.mpf(10) ** -3)

    def test_precomputed_values_are_used(self):
        with mp.workdps(40):
            samples = build_sequence("ipi", [3, 1, 2], 32, values={2: (5, 0)})
            self.assertEqual([s.N for s in samples], [1, 2, 3])
            self.assertEqual(samples[1].value, 5)

    @unittest.skipUnless(settings.KNOTLAB_SLOW_TESTS, "N up to 800")
    def test_volume_conjecture_at_desk_scale(self):
        with mp.workdps(148):
            samples = build_sequence("ipi", range(100, 801, 20), 64)
            free = fit_expansion(samples, model_order=3)
            self.assertLess(abs(mpmath.re(free.growth_rate) - GROWTH_41), mpmath.mpf(10) ** -5)
            self.assertLess(abs(free.log_coeff - mpmath.mpf(3) / 2), mpmath.mpf(10) ** -2)
            constrained = fit_expansion(samples, model_order=3, constrain_log=True)
            self.assertLess(abs(mpmath.re(constrained.constant) - torsion_constant()), mpmath.mpf(10) ** -3)
            rows = {r["quantity"]: r for r in compare_quantum_vc(constrained, "ipi")}
            self.assertLess(rows["s2_tilde"]["relative_error"], mpmath.mpf(10) ** -2)

    def test_parametrized_growth(self):
        with mp.workdps(84):
            samples = build_sequence("ipi+0.3", range(40, 201, 8), 32)
            report = fit_expansion(samples, model_order=3)
            u = parse_u("ipi+0.3")
            expected = mpmath.re(-ics_closed_41(u) / (4 * u))
            self.assertLess(abs(mpmath.re(report.growth_rate) - expected) / abs(expected), mpmath.mpf(10) ** -3)
