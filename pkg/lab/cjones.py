"""
Colored Jones polynomials and the Kashaev invariant.

J_N is normalized so that the unknot gives the quantum integer [N] and
J_2 is the Jones polynomial. Exact results are LaurentHalf values in
s = q^(1/2); numeric ones are certified Estimates.
"""
import logging
from dataclasses import dataclass

import mpmath

from .exceptions import UsageError
from .knotcore import (
    KnotRecord,
    LaurentHalf,
    cable,
    decomposition_multiplicity,
    jones,
    quantum_integer,
)
from .numerics import Estimate, certify, parse_u

logger = logging.getLogger(__name__)

MAX_CABLING_COLOR = 3
CLOSED_FORM_KNOT = "4_1"


@dataclass(frozen=True)
class QPochhammer:
    """(x)_m = (1 - x)(1 - x^2)...(1 - x^m)."""

    x: object
    m: int
    value: object

    @classmethod
    def compute(cls, x, m):
        value = mpmath.mpf(1)
        power = mpmath.mpf(1)
        for _ in range(m):
            power *= x
            value *= 1 - power
        return cls(x, m, value)

    def extend(self):
        """(x)_{m+1} from (x)_m."""
        return QPochhammer(self.x, self.m + 1, self.value * (1 - mpmath.power(self.x, self.m + 1)))


@dataclass(frozen=True)
class EvalPoint:
    """Evaluation point q = e^(2 hbar) with hbar = u / N.

    `u` may be text ("ipi+0.3") or a number. Text is re-parsed at the
    current working precision so two-precision certification sees an
    exact iπ.
    """

    u: object
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise UsageError(f"N must be positive, got {self.N}")
        if self.u_value() == 0:
            raise UsageError("u must be nonzero")

    def u_value(self):
        if isinstance(self.u, str):
            return parse_u(self.u)
        return mpmath.mpmathify(self.u)

    def hbar(self):
        return self.u_value() / self.N

    def k(self):
        """Level k with u = iπ N / k."""
        return 1j * mpmath.pi * self.N / self.u_value()

    def s(self):
        return mpmath.exp(self.hbar())

    def q(self):
        return mpmath.exp(2 * self.hbar())


def colored_jones_unknot(N: int) -> LaurentHalf:
    if N < 1:
        raise UsageError(f"Color must be at least 1, got {N}")
    return quantum_integer(N)


def _diagram(knot):
    return knot.diagram if isinstance(knot, KnotRecord) else knot


def colored_jones_by_decomposition(knot, N: int) -> LaurentHalf:
    """J_N from the Jones polynomial of the (N-1)-cable.

    The (N-1)-cable carries V_2 tensored N-1 times, which splits into
    V_N plus lower colors with known multiplicities, so
    J_N = J(K^(N-1)) - sum_M mult(M) J_M.
    """
    if N < 1:
        raise UsageError(f"Color must be at least 1, got {N}")
    if N == 1:
        return LaurentHalf.one()
    d = _diagram(knot)
    result = jones(cable(d, N - 1))
    for lower in range(N - 1, 0, -1):
        mult = decomposition_multiplicity(N - 1, lower)
        if mult:
            result = result - colored_jones_by_decomposition(d, lower) * mult
    logger.info(f"J_{N}({knot}) from the {N - 1}-cable: {len(result.coeffs)} terms")
    return result


def colored_jones_by_cabling(knot, N: int) -> LaurentHalf:
    if N > MAX_CABLING_COLOR:
        raise UsageError(
            f"Cabling is limited to N <= {MAX_CABLING_COLOR}; "
            f"use colored_jones_by_decomposition for larger colors"
        )
    return colored_jones_by_decomposition(knot, N)


def habiro_41_normalized(N: int) -> LaurentHalf:
    """J_N(4_1) / [N] = sum_{j<N} prod_{k<=j} (q^N + q^-N - q^k - q^-k)."""
    if N < 1:
        raise UsageError(f"Color must be at least 1, got {N}")
    base = LaurentHalf({2 * N: 1, -2 * N: 1})
    total = LaurentHalf.one()
    term = LaurentHalf.one()
    for k in range(1, N):
        term = term * (base - LaurentHalf({2 * k: 1, -2 * k: 1}))
        total = total + term
    return total


def habiro_41(N: int) -> LaurentHalf:
    return quantum_integer(N) * habiro_41_normalized(N)


def kashaev_41(N: int, digits: int) -> Estimate:
    """V_N(4_1) = sum_m |(q)_m|^2 at q = e^(2 pi i / N)."""
    if N < 1:
        raise UsageError(f"N must be positive, got {N}")

    def evaluate():
        q = mpmath.expjpi(mpmath.mpf(2) / N)
        total = mpmath.mpf(0)
        poch = QPochhammer.compute(q, 0)
        for m in range(N):
            if m:
                poch = poch.extend()
            total += abs(poch.value) ** 2
        return total

    return certify(evaluate, digits, label=f"V_{N}(4_1)")


def _habiro_sum(point, normalized):
    q = point.q()
    qn = mpmath.power(q, point.N)
    base = qn + 1 / qn
    total = mpmath.mpc(1)
    term = mpmath.mpc(1)
    qk = mpmath.mpc(1)
    for _ in range(1, point.N):
        qk *= q
        term *= base - qk - 1 / qk
        total += term
    if normalized:
        return total
    s = point.s()
    return (mpmath.power(s, point.N) - mpmath.power(s, -point.N)) / (s - 1 / s) * total


def _uses_habiro(knot):
    if isinstance(knot, KnotRecord):
        return knot.has_closed_form
    return knot == CLOSED_FORM_KNOT


def jn_numeric(knot, point: EvalPoint, digits: int, normalized: bool = False) -> Estimate:
    """J_N(K) at q = e^(2u/N).

    The figure-eight (a record with a closed form, or its name) goes
    through the cyclotomic sum; any other record or diagram is evaluated
    from its exact colored Jones polynomial. With `normalized` the factor
    [N] is dropped, which is the quantity whose growth the volume
    conjecture describes (it vanishes with [N] at u = iπ otherwise).
    """
    label = f"J_{point.N}({knot}; u={point.u})"
    if _uses_habiro(knot):
        return certify(lambda: _habiro_sum(point, normalized), digits, label=label)
    if isinstance(knot, str):
        raise UsageError(f"No closed form for '{knot}'; pass its table record or diagram")
    exact = colored_jones_by_decomposition(knot, point.N)
    if normalized:
        exact = exact.divexact(quantum_integer(point.N))
    return certify(lambda: exact.evaluate(point.s()), digits, label=label)


def vn_from_polynomial(jn: LaurentHalf, N: int, digits: int) -> Estimate:
    """Kashaev invariant J_N / [N] at q = e^(2 pi i / N) for any knot.

    The division is done exactly first; evaluating J_N numerically at the
    zero of [N] would lose everything.
    """
    reduced = jn.divexact(quantum_integer(N))
    return certify(
        lambda: reduced.evaluate(mpmath.expjpi(mpmath.mpf(1) / N)),
        digits,
        label=f"V_{N}",
    )
