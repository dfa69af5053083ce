import logging
import random
from fractions import Fraction

import mpmath
from mpmath import mp

from lab.cli import LabCommand
from lab.numerics import GUARD_DIGITS, certify
from lab.quantize import (
    HBAR,
    MAX_OSCILLATOR_LEVEL,
    P,
    X,
    PoissonBivector,
    PolyObs,
    bohr_sommerfeld,
    enumerate_graphs,
    moyal,
    oscillator_action,
    oscillator_check,
    random_polynomial,
    star_commutator,
)
from lab.reports import numeric_fields

logger = logging.getLogger(__name__)

CHECKS = ("graphs", "moyal", "oscillator", "bohr")


def check_graphs(max_order):
    rows = []
    for n in range(1, max_order + 1):
        count = len(enumerate_graphs(n))
        expected = n**n * (n + 1) ** n
        rows.append({"check": "graphs", "case": f"n={n}", "value": count, "expected": expected,
                     "passed": count == expected})
    return rows


def check_moyal(rng, trials, degree):
    alpha = PoissonBivector.canonical()
    x, p = PolyObs(X, (X, P)), PolyObs(P, (X, P))
    commutator = star_commutator(x, p, alpha)
    rows = [{"check": "moyal", "case": "[x,p]", "value": str(commutator.expr), "expected": str(2 * HBAR),
             "passed": commutator == PolyObs(2 * HBAR, (X, P))}]
    failures = 0
    for _ in range(trials):
        f, g, h = (random_polynomial(rng, degree) for _ in range(3))
        if moyal(moyal(f, g, alpha), h, alpha) != moyal(f, moyal(g, h, alpha), alpha):
            failures += 1
    rows.append({"check": "moyal", "case": f"associativity x{trials}", "value": trials - failures,
                 "expected": trials, "passed": failures == 0})
    return rows


def check_oscillator():
    rows = []
    for n in range(MAX_OSCILLATOR_LEVEL + 1):
        on_shell = oscillator_check(n)
        off_shell = oscillator_check(n, energy=HBAR * (n + 1))
        rows.append({"check": "oscillator", "case": f"n={n}", "value": str(on_shell.expr), "expected": "0",
                     "passed": on_shell.is_zero() and not off_shell.is_zero()})
    return rows


def check_bohr(digits):
    rows = []
    for E in (Fraction(1), Fraction(2), Fraction(5, 2), Fraction(3)):
        verdict = bohr_sommerfeld(E, 1)
        action = certify(lambda: oscillator_action(mpmath.mpf(E.numerator) / E.denominator), digits,
                         label=f"action(E={E})")
        with mp.workdps(2 * digits + GUARD_DIGITS):
            target = 2 * mpmath.pi * mpmath.mpf(E.numerator) / E.denominator
            agrees = abs(action.value - target) <= 10 * action.error + mpmath.mpf(10) ** (-digits)
        rows.append({
            "check": "bohr",
            "case": f"E={E}",
            "value": verdict["n"],
            "expected": int(E) if E.denominator == 1 else None,
            "passed": verdict["quantizable"] == (E.denominator == 1) and bool(agrees),
            **numeric_fields("action", action, digits),
        })
    return rows


class Command(LabCommand):
    help = "Run the deformation quantization checks"

    def add_lab_arguments(self, parser):
        parser.add_argument("check", nargs="?", choices=CHECKS + ("all",), default="all")
        parser.add_argument("--order", type=int, default=3, help="Largest admissible graph order to count")
        parser.add_argument("--degree", type=int, default=4, help="Degree of the random polynomials")
        parser.add_argument("--trials", type=int, default=20)

    def run(self, config, options):
        selected = CHECKS if options["check"] == "all" else (options["check"],)
        rng = random.Random(config.seed)
        rows = []
        if "graphs" in selected:
            rows.extend(check_graphs(options["order"]))
        if "moyal" in selected:
            rows.extend(check_moyal(rng, options["trials"], options["degree"]))
        if "oscillator" in selected:
            rows.extend(check_oscillator())
        if "bohr" in selected:
            rows.extend(check_bohr(config.digits))
        failed = [f"{r['check']}:{r['case']}" for r in rows if not r["passed"]]
        if failed:
            logger.error(f"Quantization checks failed: {', '.join(failed)}")
        else:
            logger.info(f"{len(rows)} quantization checks passed")
        return {"config": config.as_dict(), "passed": not failed, "rows": rows}
