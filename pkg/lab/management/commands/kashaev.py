import logging

import mpmath
from mpmath import mp

from lab.cjones import colored_jones_by_cabling, vn_from_polynomial
from lab.cli import LabCommand
from lab.exceptions import UsageError
from lab.numerics import GUARD_DIGITS
from lab.reports import numeric_fields
from lab.table import get_knot
from lab.tasks import collect_samples

logger = logging.getLogger(__name__)


class Command(LabCommand):
    help = "Kashaev invariants V_N of a knot over a range of N"

    use_N = True

    def add_lab_arguments(self, parser):
        parser.add_argument("--knot", default="4_1")

    def run(self, config, options):
        if not config.N_values:
            raise UsageError("--N is required")
        knot = get_knot(options["knot"], options.get("table"))
        digits = config.digits
        rows = []
        if knot.has_closed_form:
            values = collect_samples("ipi", list(config.N_values), digits)
            with mp.workdps(2 * digits + GUARD_DIGITS):
                for N in config.N_values:
                    value, error = values[N]
                    rows.append({"N": N, **numeric_fields("value", mpmath.re(value), digits, error)})
        else:
            for N in config.N_values:
                estimate = vn_from_polynomial(colored_jones_by_cabling(knot, N), N, digits)
                rows.append({"N": N, **numeric_fields("value", estimate, digits)})
        logger.info(f"Kashaev invariants of {knot} for {len(rows)} values of N")
        return {"knot": knot.name, "config": config.as_dict(), "rows": rows}
