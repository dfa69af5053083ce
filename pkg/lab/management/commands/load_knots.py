import logging

from lab.cli import LabCommand
from lab.models import Knot
from lab.serializers import KnotSerializer
from lab.table import store_table

logger = logging.getLogger(__name__)


class Command(LabCommand):
    help = "Validate a knot table file and store its entries in the database"

    def run(self, config, options):
        created, updated = store_table(options.get("table"))
        knots = KnotSerializer(Knot.objects.all(), many=True).data
        rows = [{"name": k["name"], "crossings": k["crossings"], "has_a_poly": k["a_poly"] is not None}
                for k in knots]
        return {"created": created, "updated": updated, "rows": rows}
