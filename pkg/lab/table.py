"""
Knot table ingestion.

The table is a JSON document {"knots": [...]} validated with DRF
serializers. Lookups go to the database when the knot has been loaded
with `load_knots`, otherwise to the table file.
"""
import json
import logging
from pathlib import Path

import mpmath
from django.conf import settings
from django.db import DatabaseError, transaction

from .acurve import BivarPoly
from .exceptions import TableError, UnknownKnotError
from .knotcore import KnotRecord, PlanarDiagram
from .models import Knot
from .numerics import parse_u
from .serializers import KnotTableSerializer

logger = logging.getLogger(__name__)


def _flatten_errors(errors, prefix=""):
    if isinstance(errors, dict):
        for key, value in errors.items():
            yield from _flatten_errors(value, f"{prefix}{key}.")
    elif isinstance(errors, list):
        for index, value in enumerate(errors):
            if isinstance(value, (dict, list)):
                yield from _flatten_errors(value, f"{prefix}{index}.")
            else:
                yield f"{prefix.rstrip('.')}: {value}"
    else:
        yield f"{prefix.rstrip('.')}: {errors}"


def read_table(path=None) -> list:
    """Validated entries of a table file as plain dicts."""
    path = Path(path or settings.KNOTLAB_TABLE_PATH)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise TableError(f"Knot table {path} not found") from exc
    except json.JSONDecodeError as exc:
        raise TableError(f"Knot table {path} is not valid JSON: {exc}") from exc
    serializer = KnotTableSerializer(data=document)
    if not serializer.is_valid():
        details = "; ".join(_flatten_errors(serializer.errors))
        raise TableError(f"Knot table {path} is invalid: {details}")
    entries = serializer.validated_data["knots"]
    logger.debug(f"Read {len(entries)} knots from {path}")
    return [dict(entry) for entry in entries]


def to_record(entry: dict) -> KnotRecord:
    diagram = PlanarDiagram(
        tuple(tuple(c) for c in entry["pd"]), loops=entry.get("loops", 0), is_link=entry.get("is_link", False)
    )
    a_poly = entry.get("a_poly")
    return KnotRecord(
        name=entry["name"],
        diagram=diagram,
        a_polynomial=BivarPoly(a_poly) if a_poly else None,
        known_volume=mpmath.mpf(entry["vol"]) if entry.get("vol") else None,
        has_closed_form=bool(entry.get("closed_form")),
        ics_anchor=parse_u(entry["ics_anchor"]) if entry.get("ics_anchor") else None,
    )


def load_table(path=None) -> dict:
    """Name -> KnotRecord for every knot in a table file."""
    return {entry["name"]: to_record(entry) for entry in read_table(path)}


def get_knot(name: str, path=None) -> KnotRecord:
    if path is None:
        try:
            row = Knot.objects.filter(name=name).first()
        except DatabaseError:
            row = None
        if row is not None:
            return to_record({
                "name": row.name, "pd": row.pd, "loops": row.loops, "is_link": row.is_link,
                "a_poly": row.a_poly, "vol": row.vol, "closed_form": row.closed_form,
                "ics_anchor": row.ics_anchor,
            })
    table = load_table(path)
    if name not in table:
        raise UnknownKnotError(name)
    return table[name]


@transaction.atomic
def store_table(path=None) -> tuple:
    """Upsert every table entry into the database; returns (created, updated)."""
    created = updated = 0
    for entry in read_table(path):
        name = entry.pop("name")
        entry["a_poly"] = entry.get("a_poly")
        _, was_created = Knot.objects.update_or_create(name=name, defaults=entry)
        if was_created:
            created += 1
        else:
            updated += 1
    logger.info(f"Knot table stored: {created} created, {updated} updated")
    return created, updated
