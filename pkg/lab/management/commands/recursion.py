import logging
import random

import mpmath
from mpmath import mp

from lab.cjones import colored_jones_by_decomposition
from lab.cli import LabCommand
from lab.exceptions import UsageError
from lab.numerics import GUARD_DIGITS, format_error
from lab.qrec import (
    JSequence,
    classical_limit,
    curve_residual,
    discover_recursion,
    lift_to_unnormalized,
)
from lab.table import get_knot

logger = logging.getLogger(__name__)

DEFAULT_MAX_N = 20
CURVE_POINTS = 5
CURVE_RADIUS = 0.4


def _sequence(knot, max_N, normalized):
    if knot.name == "unknot":
        return JSequence.unknot(max_N)
    if knot.has_closed_form:
        return JSequence.figure_eight(max_N, normalized=normalized)
    if normalized:
        raise UsageError("Normalized sequences are only available for knots with closed forms")
    return JSequence.from_function(knot.name, lambda N: colored_jones_by_decomposition(knot, N), max_N)


def _curve_points(seed):
    """u values in a disc of radius CURVE_RADIUS about iπ."""
    rng = random.Random(seed)
    return [
        mpmath.mpc(0, mpmath.pi) + mpmath.rect(rng.uniform(0.05, CURVE_RADIUS), rng.uniform(0, 2 * mpmath.pi))
        for _ in range(CURVE_POINTS)
    ]


class Command(LabCommand):
    help = "Search for a q-difference operator annihilating a colored Jones sequence"

    use_N = True

    def add_lab_arguments(self, parser):
        parser.add_argument("--knot", default="4_1")
        parser.add_argument("--order", type=int, default=2)
        parser.add_argument("--degree", type=int, default=8, help="Largest power of the m^ coefficients")
        parser.add_argument("--s-degree", type=int, help="Largest power of s in coefficients (defaults to --degree)")
        parser.add_argument("--m-step", type=int, default=2)
        parser.add_argument("--s-step", type=int, default=2)
        parser.add_argument("--held-out", type=int, default=4)
        parser.add_argument("--inhomogeneous", action="store_true")
        parser.add_argument("--normalized", action="store_true",
                            help="Search on J_N/[N] and lift the result back to J_N")

    def run(self, config, options):
        knot = get_knot(options["knot"], options.get("table"))
        max_N = config.N_values[-1] if config.N_values else DEFAULT_MAX_N
        normalized = options["normalized"]
        sequence = _sequence(knot, max_N, normalized)
        op = discover_recursion(
            sequence,
            order=options["order"],
            coeff_degree=options["degree"],
            s_degree=options["s_degree"],
            m_step=options["m_step"],
            s_step=options["s_step"],
            inhomogeneous=options["inhomogeneous"],
            held_out=options["held_out"],
        )
        if op is None:
            logger.info(f"No operator in the search box for {knot}")
            return {"knot": knot.name, "found": False, "rows": []}
        if normalized:
            op = lift_to_unnormalized(op)
        limit = classical_limit(op)
        report = {
            "knot": knot.name,
            "found": True,
            "order": op.order,
            "operator": op.as_json(),
            "classical_limit": limit.as_json(),
            "rows": op.as_json(),
        }
        if knot.has_closed_form and knot.a_polynomial is not None and not limit.is_zero():
            with mp.workdps(2 * config.digits + GUARD_DIGITS):
                residual = curve_residual(limit, knot.a_polynomial, _curve_points(config.seed))
            report["curve_residual"] = format_error(residual)
        return report
