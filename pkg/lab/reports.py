"""
Report rendering for the management commands.

Reports are dicts with a `rows` list. Numbers are rendered as fixed
decimal strings and every numeric field `x` is followed by `x_err`, so
identical configurations produce byte-identical files.
"""
import csv
import io
import json
import logging
from pathlib import Path

import mpmath

from .numerics import Estimate, format_decimal, format_error

logger = logging.getLogger(__name__)


def numeric_fields(name, value, digits, error=None) -> dict:
    """`name`/`name_err` for reals; `name_re`, `name_im` and their errors for complex values."""
    if isinstance(value, Estimate):
        value, error = value.value, value.error
    error = 0 if error is None else error
    value = mpmath.mpmathify(value)
    if isinstance(value, mpmath.mpc):
        return {
            f"{name}_re": format_decimal(mpmath.re(value), digits),
            f"{name}_re_err": format_error(error),
            f"{name}_im": format_decimal(mpmath.im(value), digits),
            f"{name}_im_err": format_error(error),
        }
    return {name: format_decimal(value, digits), f"{name}_err": format_error(error)}


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    rows = report.get("rows", [])
    header = []
    for row in rows:
        for key in row:
            if key not in header:
                header.append(key)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=header, lineterminator="\r\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _cell(value) for key, value in row.items()})
    return buffer.getvalue()


def _cell(value):
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return value


def emit(report: dict, fmt: str, out=None, stdout=None):
    text = render(report, fmt)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"Report written to {out}")
    elif stdout is not None:
        stdout.write(text, ending="")
    return text
