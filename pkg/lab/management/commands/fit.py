import logging

import mpmath
from mpmath import mp

from lab.acurve import ics_closed_41
from lab.asymfit import (
    DEFAULT_HOLDOUT,
    MAX_MODEL_ORDER,
    build_sequence,
    compare_quantum_vc,
    fit_expansion,
    growth_rate_richardson,
    is_ipi,
)
from lab.cli import LabCommand
from lab.exceptions import UsageError
from lab.numerics import GUARD_DIGITS, format_error, parse_u
from lab.reports import numeric_fields
from lab.table import get_knot
from lab.tasks import collect_samples

logger = logging.getLogger(__name__)


class Command(LabCommand):
    help = "Fit the asymptotic expansion of the figure-eight sequence and compare with the classical side"

    use_N = True
    use_u = True

    def add_lab_arguments(self, parser):
        parser.add_argument("--knot", default="4_1")
        parser.add_argument("--order", type=int, default=MAX_MODEL_ORDER, help="Number of 1/N terms")
        parser.add_argument("--holdout", type=int, default=DEFAULT_HOLDOUT)
        parser.add_argument("--constrain-log", action="store_true", help="Fix the log N coefficient to 3/2")

    def run(self, config, options):
        if not config.N_values:
            raise UsageError("--N is required")
        knot = get_knot(options["knot"], options.get("table"))
        if not knot.has_closed_form:
            raise UsageError(f"No sequence generator for {knot}")
        digits = config.digits
        values = collect_samples(config.u, list(config.N_values), digits)
        with mp.workdps(2 * digits + GUARD_DIGITS):
            samples = build_sequence(config.u, config.N_values, digits, values=values)
            report = fit_expansion(
                samples,
                model_order=options["order"],
                constrain_log=options["constrain_log"],
                holdout=options["holdout"],
            )
            comparison = compare_quantum_vc(report, config.u)
            if is_ipi(config.u):
                u_value = parse_u(config.u)
                richardson = growth_rate_richardson(samples)
                expected = -ics_closed_41(u_value) / (4 * u_value)
                comparison.append({
                    "quantity": "growth_rate_richardson",
                    "fitted": richardson,
                    "expected": expected,
                    "relative_error": abs(richardson - expected) / abs(expected),
                })
            floor = mpmath.mpf(10) ** (-digits)
            rows = []
            for entry in comparison:
                rows.append({
                    "quantity": entry["quantity"],
                    **numeric_fields("fitted", entry["fitted"], digits, report.residual),
                    **numeric_fields("expected", entry["expected"], digits, floor),
                    "relative_error": format_error(entry["relative_error"]),
                })
            summary = {
                "model_order": report.model_order,
                "constrain_log": report.constrain_log,
                "fit_N": [report.fit_N[0], report.fit_N[-1], len(report.fit_N)],
                "held_out_N": report.held_out_N,
                "residual": format_error(report.residual),
                "condition": format_error(report.condition),
            }
        logger.info(f"Fit of {knot} at u={config.u} over {len(samples)} samples")
        return {"knot": knot.name, "config": config.as_dict(), "fit": summary, "rows": rows}
