import logging

from lab.cjones import colored_jones_by_cabling
from lab.cli import LabCommand
from lab.exceptions import UsageError
from lab.knotcore import jones
from lab.table import get_knot

logger = logging.getLogger(__name__)


class Command(LabCommand):
    help = "Print the exact Jones (or colored Jones) polynomial of a knot from the table"

    def add_lab_arguments(self, parser):
        parser.add_argument("knot_name", nargs="?", help="Knot name, same as --knot")
        parser.add_argument("--knot")
        parser.add_argument("--color", type=int, default=2, help="Color N; 2 is the Jones polynomial")

    def run(self, config, options):
        name = options.get("knot_name") or options.get("knot")
        if not name:
            raise UsageError("A knot name is required")
        knot = get_knot(name, options.get("table"))
        color = options["color"]
        if color == 2:
            poly = jones(knot.diagram)
        else:
            poly = colored_jones_by_cabling(knot, color)
        coefficients = poly.to_q_dict()
        logger.info(f"J_{color}({name}) has {len(coefficients)} terms")
        return {
            "knot": name,
            "color": color,
            "polynomial": coefficients,
            "rows": [{"q_exponent": exp, "coefficient": c} for exp, c in coefficients.items()],
        }
