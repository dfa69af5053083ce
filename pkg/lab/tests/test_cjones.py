import mpmath
from django.test import SimpleTestCase, override_settings
from mpmath import mp

from lab.cjones import (
    EvalPoint,
    QPochhammer,
    colored_jones_by_cabling,
    colored_jones_by_decomposition,
    colored_jones_unknot,
    habiro_41,
    habiro_41_normalized,
    jn_numeric,
    kashaev_41,
    vn_from_polynomial,
)
from lab.exceptions import UsageError
from lab.knotcore import LaurentHalf, cable, jones, quantum_integer

from .test_knotcore import FIGURE_EIGHT, TREFOIL


class ColoredJonesTests(SimpleTestCase):
    def test_unknot(self):
        self.assertEqual(colored_jones_unknot(3), quantum_integer(3))
        with self.assertRaises(UsageError):
            colored_jones_unknot(0)

    def test_low_colors(self):
        self.assertEqual(colored_jones_by_decomposition(FIGURE_EIGHT, 1), LaurentHalf.one())
        self.assertEqual(colored_jones_by_decomposition(FIGURE_EIGHT, 2), jones(FIGURE_EIGHT))
        self.assertEqual(habiro_41(1), LaurentHalf.one())
        self.assertEqual(habiro_41(2), jones(FIGURE_EIGHT))

    def test_cabling_rule_matches_cyclotomic_sum(self):
        # J_3 = J(K^2) - 1
        self.assertEqual(jones(cable(FIGURE_EIGHT, 2)) - 1, habiro_41(3))
        self.assertEqual(colored_jones_by_cabling(FIGURE_EIGHT, 3), habiro_41(3))

    def test_trefoil_color_three(self):
        j3 = colored_jones_by_cabling(TREFOIL, 3)
        self.assertEqual(j3.at_one(), 3)
        self.assertFalse(j3.is_palindromic())

    def test_cabling_is_limited(self):
        with self.assertRaises(UsageError):
            colored_jones_by_cabling(FIGURE_EIGHT, 4)

    @override_settings(KNOTLAB_MAX_CROSSINGS=36)
    def test_color_four_by_decomposition(self):
        self.assertEqual(colored_jones_by_decomposition(FIGURE_EIGHT, 4), habiro_41(4))

    def test_habiro_sum(self):
        for N in range(1, 7):
            self.assertEqual(habiro_41(N), quantum_integer(N) * habiro_41_normalized(N))
            self.assertTrue(habiro_41(N).is_palindromic())
            self.assertEqual(habiro_41(N).at_one(), N)


class KashaevTests(SimpleTestCase):
    def test_first_values(self):
        for N, expected in ((1, 1), (2, 5), (3, 13)):
            estimate = kashaev_41(N, 32)
            self.assertLess(abs(estimate.value - expected), mpmath.mpf(10) ** -30)

    def test_agrees_with_exact_division(self):
        for N in (2, 3, 4, 5):
            direct = kashaev_41(N, 32)
            reduced = vn_from_polynomial(habiro_41(N), N, 32)
            with mp.workdps(40):
                self.assertLess(abs(direct.value - reduced.value), mpmath.mpf(10) ** -25)

    def test_pochhammer_extend(self):
        with mp.workdps(30):
            q = mpmath.expjpi(mpmath.mpf(2) / 7)
            step = QPochhammer.compute(q, 2).extend()
            self.assertLess(abs(step.value - QPochhammer.compute(q, 3).value), mpmath.mpf(10) ** -25)


class NumericColoredJonesTests(SimpleTestCase):
    def test_matches_polynomial(self):
        point = EvalPoint("0.3+0.2i", 4)
        estimate = jn_numeric("4_1", point, 32)
        with mp.workdps(60):
            exact = habiro_41(4).evaluate(EvalPoint("0.3+0.2i", 4).s())
            self.assertLess(abs(estimate.value - exact), mpmath.mpf(10) ** -25)

    def test_normalized_value_at_ipi(self):
        estimate = jn_numeric("4_1", EvalPoint("ipi", 3), 32, normalized=True)
        self.assertLess(abs(estimate.value - 13), mpmath.mpf(10) ** -25)
        unnormalized = jn_numeric("4_1", EvalPoint("ipi", 3), 32)
        self.assertLess(abs(unnormalized.value), mpmath.mpf(10) ** -25)

    def test_diagrams_use_the_exact_polynomial(self):
        point = EvalPoint("0.3+0.2i", 3)
        from_diagram = jn_numeric(FIGURE_EIGHT, point, 32, normalized=True)
        closed = jn_numeric("4_1", point, 32, normalized=True)
        with mp.workdps(40):
            self.assertLess(abs(from_diagram.value - closed.value), mpmath.mpf(10) ** -25)
        trefoil = jn_numeric(TREFOIL, point, 32)
        with mp.workdps(60):
            exact = colored_jones_by_decomposition(TREFOIL, 3).evaluate(point.s())
            self.assertLess(abs(trefoil.value - exact), mpmath.mpf(10) ** -25)
        with self.assertRaises(UsageError):
            jn_numeric("3_1", point, 32)

    def test_level(self):
        with mp.workdps(30):
            self.assertLess(abs(EvalPoint("ipi", 5).k() - 5), mpmath.mpf(10) ** -25)

    def test_bad_points(self):
        with self.assertRaises(UsageError):
            EvalPoint("ipi", 0)
        with self.assertRaises(UsageError):
            EvalPoint(0, 3)
