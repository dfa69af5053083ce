import logging

from lab.acurve import complex_volume_41
from lab.cli import LabCommand
from lab.exceptions import UsageError
from lab.reports import numeric_fields
from lab.table import get_knot

logger = logging.getLogger(__name__)

QUANTITIES = ("vol", "cs", "ics", "p", "v", "torsion", "s2", "s3")


class Command(LabCommand):
    help = "Complexified volume, torsion and higher loop terms at a spectral parameter u"

    use_u = True

    def add_lab_arguments(self, parser):
        parser.add_argument("--knot", default="4_1")

    def run(self, config, options):
        knot = get_knot(options["knot"], options.get("table"))
        if not knot.has_closed_form:
            raise UsageError(f"No closed-form volume data for {knot}")
        values = complex_volume_41(config.u, config.digits)
        row = {"knot": knot.name, "u": config.u}
        for name in QUANTITIES:
            row.update(numeric_fields(name, values[name], config.digits))
        if knot.known_volume is not None:
            row["table_vol"] = str(knot.known_volume)
        return {"config": config.as_dict(), "rows": [row]}
