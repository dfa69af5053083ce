"""
Precision bookkeeping for the numeric side of the lab.

Values are mpmath numbers carried together with an error bound. A value is
certified by evaluating the same closure at two working precisions and
taking the difference as the error estimate.
"""
import logging
from dataclasses import dataclass
from typing import Callable

import mpmath
from mpmath import mp

from .exceptions import PrecisionError, UsageError
from .metrics import PRECISION_FAILURES

logger = logging.getLogger(__name__)

GUARD_DIGITS = 20


@dataclass(frozen=True)
class Estimate:
    """A numeric value with an absolute error bound."""

    value: object
    error: object

    @property
    def real(self):
        return mpmath.re(self.value)

    @property
    def imag(self):
        return mpmath.im(self.value)

    def relative_error(self):
        size = abs(self.value)
        if size == 0:
            return mpmath.mpf(self.error)
        return self.error / size


def certify(func: Callable[[], object], digits: int, label: str = "value") -> Estimate:
    """Evaluate `func` at 2*digits and at a guard precision and compare.

    The result is accepted when the two agree to a relative 10^(-digits/2),
    or when the value itself is below 10^(-digits) (an absolute zero).
    """
    working = 2 * digits
    with mp.workdps(working):
        first = func()
    with mp.workdps(working + GUARD_DIGITS):
        second = func()
        error = abs(second - first)
        size = abs(second)
        tolerance = mpmath.mpf(10) ** (-mpmath.mpf(digits) / 2) * size
        floor = mpmath.mpf(10) ** (-digits)
    if error > tolerance and size > floor:
        PRECISION_FAILURES.inc()
        raise PrecisionError(
            f"{label} not certified at {digits} digits "
            f"(error {mpmath.nstr(error, 3)} against size {mpmath.nstr(size, 3)})"
        )
    logger.debug(f"Certified {label} at {digits} digits, error {mpmath.nstr(error, 3)}")
    return Estimate(second, error)


def parse_u(text: str):
    """Parse a spectral parameter: "ipi", "ipi+0.3", "0.3+ipi" or "a+bi"."""
    raw = text.replace(" ", "").lower()
    if not raw:
        raise UsageError("Empty value for u")
    if "ipi" in raw:
        head, tail = raw.split("ipi", 1)
        if (head and tail) or (head and not head.endswith("+")) or (tail and tail[0] not in "+-"):
            raise UsageError(f"Cannot parse u='{text}': use 'ipi+x' or 'x+ipi'")
        rest = head[:-1] if head else tail
        try:
            shift = mpmath.mpf(rest) if rest else mpmath.mpf(0)
        except ValueError as exc:
            raise UsageError(f"Cannot parse u='{text}'") from exc
        return mpmath.mpc(shift, mpmath.pi)
    if raw.endswith("i"):
        body = raw[:-1]
        # last sign that is neither leading nor part of an exponent
        splits = [k for k, ch in enumerate(body) if ch in "+-" and k > 0 and body[k - 1] != "e"]
        if splits:
            real_text, imag_text = body[:splits[-1]], body[splits[-1]:]
        else:
            real_text, imag_text = "0", body
    else:
        real_text, imag_text = raw, "0"
    if imag_text in ("", "+"):
        imag_text = "1"
    elif imag_text == "-":
        imag_text = "-1"
    try:
        return mpmath.mpc(mpmath.mpf(real_text), mpmath.mpf(imag_text))
    except ValueError as exc:
        raise UsageError(f"Cannot parse u='{text}'") from exc


def format_decimal(x, digits: int) -> str:
    """Deterministic decimal rendering with `digits` significant digits."""
    return mpmath.nstr(mpmath.mpf(x), digits, strip_zeros=False)


def format_error(err) -> str:
    return mpmath.nstr(mpmath.mpf(err), 3, strip_zeros=False)


def unwrap_log(value, previous=None):
    """Logarithm of `value` on the branch closest to `previous`."""
    principal = mpmath.log(value)
    if previous is None:
        return principal
    turns = mpmath.nint((mpmath.im(previous) - mpmath.im(principal)) / (2 * mpmath.pi))
    return principal + 2j * mpmath.pi * turns
