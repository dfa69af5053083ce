"""
Exact Laurent polynomials and planar-diagram evaluation of the Jones
polynomial.

PD conventions
--------------
A crossing X[a, b, c, d] lists its four arc labels counterclockwise starting
from the incoming under-strand, so the under-strand runs a -> c. The crossing
is positive when the over-strand runs d -> b.

The bracket is summed with every loop (the last one included) weighted by
d = -A^2 - A^-2. The Jones polynomial is (-A^3)^-w * (-1)^c * <D> with
A^2 = s = q^(1/2). With this choice the right-handed trefoil comes out as
s^-1 + s^-3 + s^-5 - s^-9 and the unknot as s + s^-1.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from math import comb
from typing import Iterable

import mpmath
import sympy
from django.conf import settings

from .exceptions import CrossingBudgetError, DiagramError
from .metrics import STATES_EVALUATED

logger = logging.getLogger(__name__)

# Bracket variable A maps to s through A^2 = s.
A_TO_S_POWER = 2

UNDER_IN, OVER_RIGHT, UNDER_OUT, OVER_LEFT = range(4)


class LaurentHalf:
    """Laurent polynomial in s = q^(1/2) with integer coefficients.

    Exponents are integer powers of s. Instances are immutable; zero
    coefficients are never stored.
    """

    __slots__ = ("_terms",)

    def __init__(self, coeffs=None):
        terms = {}
        for exp, coeff in (coeffs or {}).items():
            coeff = int(coeff)
            if coeff:
                terms[int(exp)] = coeff
        self._terms = tuple(sorted(terms.items()))

    @classmethod
    def monomial(cls, exp, coeff=1):
        return cls({exp: coeff})

    @classmethod
    def one(cls):
        return cls({0: 1})

    @property
    def coeffs(self):
        return dict(self._terms)

    def terms(self):
        return self._terms

    def is_zero(self):
        return not self._terms

    def degree_range(self):
        if not self._terms:
            return None
        return self._terms[0][0], self._terms[-1][0]

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentHalf({0: other})
        if not isinstance(other, LaurentHalf):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def _coerce(self, other):
        if isinstance(other, LaurentHalf):
            return other
        if isinstance(other, int):
            return LaurentHalf({0: other})
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = defaultdict(int, self._terms)
        for exp, coeff in other._terms:
            out[exp] += coeff
        return LaurentHalf(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentHalf({e: -c for e, c in self._terms})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = defaultdict(int)
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                out[e1 + e2] += c1 * c2
        return LaurentHalf(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("Negative powers are only defined for monomials")
        result = LaurentHalf.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, k):
        """Multiply by s^k."""
        return LaurentHalf({e + k: c for e, c in self._terms})

    def bar(self):
        """The involution s -> s^-1."""
        return LaurentHalf({-e: c for e, c in self._terms})

    def is_palindromic(self):
        return self == self.bar()

    def at_one(self):
        return sum(c for _, c in self._terms)

    def divexact(self, other):
        """Exact division; raises ValueError when `other` does not divide."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return LaurentHalf()
        remainder = dict(self._terms)
        lead_exp, lead_coeff = other._terms[-1]
        lowest = self._terms[0][0] - other._terms[0][0]
        quotient = {}
        while remainder:
            top = max(remainder)
            q_exp = top - lead_exp
            if q_exp < lowest or remainder[top] % lead_coeff:
                raise ValueError("polynomial division is not exact")
            q_coeff = remainder[top] // lead_coeff
            quotient[q_exp] = q_coeff
            for exp, c in other._terms:
                key = exp + q_exp
                value = remainder.get(key, 0) - q_coeff * c
                if value:
                    remainder[key] = value
                else:
                    remainder.pop(key, None)
        return LaurentHalf(quotient)

    def evaluate(self, s):
        """Numeric value at a point s (an mpmath number or int)."""
        total = mpmath.mpf(0)
        for exp, coeff in self._terms:
            total += coeff * mpmath.power(s, exp)
        return total

    def to_sympy(self, symbol):
        return sum((c * symbol**e for e, c in self._terms), 0)

    @classmethod
    def from_sympy(cls, expr, symbol):
        out = defaultdict(int)
        for term in sympy.Add.make_args(sympy.expand(expr)):
            if term == 0:
                continue
            coeff, exp = term.as_coeff_exponent(symbol)
            if not (coeff.is_Integer and exp.is_Integer):
                raise ValueError(f"{term} is not an integral monomial in {symbol}")
            out[int(exp)] += int(coeff)
        return cls(out)

    def to_q_dict(self):
        """Serialized form keyed by q-exponents ("5/2", "-1"), highest first."""
        out = {}
        for exp, coeff in reversed(self._terms):
            key = str(exp // 2) if exp % 2 == 0 else f"{exp}/2"
            out[key] = coeff
        return out

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for exp, coeff in reversed(self._terms):
            parts.append(f"{coeff}*s^{exp}")
        return " + ".join(parts)


def quantum_integer(n: int) -> LaurentHalf:
    """[n] = (s^n - s^-n) / (s - s^-1) = s^(n-1) + s^(n-3) + ... + s^(1-n)."""
    if n == 0:
        return LaurentHalf()
    sign = 1 if n > 0 else -1
    n = abs(n)
    return LaurentHalf({n - 1 - 2 * k: sign for k in range(n)})


@dataclass(frozen=True)
class PlanarDiagram:
    """PD code of a knot or link diagram.

    `loops` counts crossingless components (the PD list cannot express
    them); a bare circle is `PlanarDiagram((), loops=1)`.
    """

    crossings: tuple
    loops: int = 0
    is_link: bool = False
    _orientation: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        try:
            crossings = tuple(tuple(int(x) for x in c) for c in self.crossings)
        except (TypeError, ValueError) as exc:
            raise DiagramError(f"PD code must be a list of integer 4-tuples: {exc}") from exc
        object.__setattr__(self, "crossings", crossings)
        for c in crossings:
            if len(c) != 4:
                raise DiagramError(f"Crossing {c} does not have four arc labels")
        counts = defaultdict(int)
        for c in crossings:
            for label in c:
                counts[label] += 1
        bad = sorted(label for label, n in counts.items() if n != 2)
        if bad:
            raise DiagramError(f"Arc labels {bad} do not appear exactly twice")
        if not crossings and self.loops == 0:
            raise DiagramError("Empty diagram")
        orientation = _orient(crossings)
        object.__setattr__(self, "_orientation", orientation)
        if self.components() > 1 and not self.is_link:
            raise DiagramError(
                f"Diagram has {self.components()} components but is not flagged as a link"
            )

    @property
    def n_arcs(self):
        return 2 * len(self.crossings)

    def labels(self):
        return sorted({label for c in self.crossings for label in c})

    def signs(self):
        return [self._orientation[i] for i in range(len(self.crossings))]

    def components(self):
        return _component_count(self.crossings, self.loops)


def _component_count(crossings, loops):
    parent = {label: label for c in crossings for label in c}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, c, d in crossings:
        parent[find(a)] = find(c)
        parent[find(b)] = find(d)
    return len({find(x) for x in parent}) + loops


def _orient(crossings):
    """Propagate strand directions and return the crossing signs.

    Each label occurs at two slots; a label entering one slot leaves through
    the other. Under slots are fixed by the PD convention, over slots are
    inferred. Returns {crossing index: +1 or -1}.
    """
    occurrences = defaultdict(list)
    for i, c in enumerate(crossings):
        for slot, label in enumerate(c):
            occurrences[label].append((i, slot))

    # True = strand enters the crossing at this slot
    incoming = {}
    pending = []

    def assign(i, slot, value):
        key = (i, slot)
        if key in incoming:
            if incoming[key] != value:
                raise DiagramError(f"Inconsistent orientation at crossing {i}")
            return
        incoming[key] = value
        pending.append(key)

    for i in range(len(crossings)):
        assign(i, UNDER_IN, True)
        assign(i, UNDER_OUT, False)

    while pending:
        i, slot = pending.pop()
        value = incoming[(i, slot)]
        opposite = (slot + 2) % 4
        assign(i, opposite, not value)
        label = crossings[i][slot]
        for j, other_slot in occurrences[label]:
            if (j, other_slot) != (i, slot):
                assign(j, other_slot, not value)

    signs = {}
    for i in range(len(crossings)):
        if (i, OVER_LEFT) not in incoming:
            raise DiagramError(f"Over-strand at crossing {i} cannot be oriented")
        signs[i] = 1 if incoming[(i, OVER_LEFT)] else -1
    return signs


def writhe(d: PlanarDiagram) -> int:
    """Sum of crossing signs."""
    return sum(d.signs())


def _check_budget(n_crossings):
    limit = settings.KNOTLAB_MAX_CROSSINGS
    if n_crossings > limit:
        raise CrossingBudgetError(n_crossings, limit)


def _processing_order(crossings):
    remaining = list(range(len(crossings)))
    seen = set()
    order = []
    while remaining:
        best = max(remaining, key=lambda i: (len(seen.intersection(crossings[i])), -i))
        remaining.remove(best)
        order.append(best)
        seen.update(crossings[best])
    return order


def _attach(partner, x, y):
    """Join endpoints x and y in the open-path map; return loops closed."""
    if x == y:
        return 1
    end_x, end_y = x, y
    if x in partner:
        end_x = partner.pop(x)
        partner.pop(end_x)
        if end_x == y:
            return 1
    if y in partner:
        end_y = partner.pop(y)
        partner.pop(end_y)
    partner[end_x] = end_y
    partner[end_y] = end_x
    return 0


def _bracket_terms(d: PlanarDiagram):
    """State sum over smoothings; returns {A-exponent: coefficient} of <D>."""
    # d-power bookkeeping: each state keeps a polynomial in A and the loop
    # factor is applied on the fly.
    loop_factor = {2: -1, -2: -1}

    def times(poly, factor):
        out = defaultdict(int)
        for e1, c1 in poly.items():
            for e2, c2 in factor.items():
                out[e1 + e2] += c1 * c2
        return {e: c for e, c in out.items() if c}

    states = {(): {0: 1}}
    for index in _processing_order(d.crossings):
        a, b, c, dd = d.crossings[index]
        smoothings = (((a, b), (c, dd), 1), ((a, dd), (b, c), -1))
        next_states = defaultdict(lambda: defaultdict(int))
        for key, poly in states.items():
            for pair1, pair2, a_exp in smoothings:
                partner = {}
                for x, y in key:
                    partner[x] = y
                    partner[y] = x
                loops = _attach(partner, *pair1) + _attach(partner, *pair2)
                term = {e + a_exp: v for e, v in poly.items()}
                for _ in range(loops):
                    term = times(term, loop_factor)
                new_key = tuple(sorted((x, y) for x, y in partner.items() if x < y))
                target = next_states[new_key]
                for e, v in term.items():
                    target[e] += v
        states = {k: {e: v for e, v in p.items() if v} for k, p in next_states.items()}
        STATES_EVALUATED.inc(len(states))
    result = defaultdict(int)
    for key, poly in states.items():
        if key:
            raise DiagramError("State sum left open arcs; the diagram is not closed")
        for e, v in poly.items():
            result[e] += v
    for _ in range(d.loops):
        result = defaultdict(int, times(result, loop_factor))
    return {e: v for e, v in result.items() if v}


def kauffman_bracket(d: PlanarDiagram) -> LaurentHalf:
    """(-1)^c <D> as a Laurent polynomial in the bracket variable A."""
    _check_budget(len(d.crossings))
    terms = _bracket_terms(d)
    sign = -1 if d.components() % 2 else 1
    bracket = LaurentHalf({e: sign * v for e, v in terms.items()})
    logger.debug(f"Bracket of {len(d.crossings)}-crossing diagram has {len(terms)} terms")
    return bracket


def jones(d: PlanarDiagram) -> LaurentHalf:
    """Writhe-normalized Jones polynomial in s, unknot -> s + s^-1."""
    bracket = kauffman_bracket(d)
    w = writhe(d)
    sign = -1 if w % 2 else 1
    normalized = {e - 3 * w: sign * v for e, v in bracket.coeffs.items()}
    odd = [e for e in normalized if e % A_TO_S_POWER]
    if odd:
        raise DiagramError(f"Bracket exponents {odd} do not map to integer powers of s")
    return LaurentHalf({e // A_TO_S_POWER: v for e, v in normalized.items()})


def _relabel(crossings, loops, is_link):
    mapping = {}
    for c in crossings:
        for label in c:
            if label not in mapping:
                mapping[label] = len(mapping) + 1
    return PlanarDiagram(
        tuple(tuple(mapping[x] for x in c) for c in crossings), loops=loops, is_link=is_link
    )


def switch_crossing(d: PlanarDiagram, index: int) -> PlanarDiagram:
    """Exchange over and under at one crossing."""
    crossings = list(d.crossings)
    a, b, c, dd = crossings[index]
    if d.signs()[index] > 0:
        crossings[index] = (dd, a, b, c)
    else:
        crossings[index] = (b, c, dd, a)
    return PlanarDiagram(tuple(crossings), loops=d.loops, is_link=d.is_link)


def mirror(d: PlanarDiagram) -> PlanarDiagram:
    result = d
    for index in range(len(d.crossings)):
        result = switch_crossing(result, index)
    return result


def smooth_crossing(d: PlanarDiagram, index: int) -> PlanarDiagram:
    """Orientation-respecting smoothing of one crossing (the L0 of a skein triple)."""
    a, b, c, dd = d.crossings[index]
    pairs = ((a, b), (dd, c)) if d.signs()[index] > 0 else ((a, dd), (b, c))
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            x = parent[x]
        return x

    loops = d.loops
    for x, y in pairs:
        rx, ry = find(x), find(y)
        if rx == ry:
            loops += 1
        else:
            parent[ry] = rx
    crossings = tuple(
        tuple(find(x) for x in crossing) for i, crossing in enumerate(d.crossings) if i != index
    )
    return PlanarDiagram(crossings, loops=loops, is_link=_component_count(crossings, loops) > 1)


def disjoint_union(d1: PlanarDiagram, d2: PlanarDiagram) -> PlanarDiagram:
    offset = max(d1.labels(), default=0)
    shifted = tuple(tuple(x + offset for x in c) for c in d2.crossings)
    return PlanarDiagram(d1.crossings + shifted, loops=d1.loops + d2.loops, is_link=True)


def cable_crossing_count(d: PlanarDiagram, n: int) -> int:
    return n * n * len(d.crossings) + abs(writhe(d)) * n * (n - 1)


def cable(d: PlanarDiagram, n: int) -> PlanarDiagram:
    """Zero-framed n-parallel of a knot diagram.

    Every crossing becomes an n x n grid; -w full twists on the first arc
    cancel the blackboard linking number w between the copies.
    """
    if n < 1:
        raise DiagramError("Cable index must be positive")
    if d.components() > 1:
        raise DiagramError("Cabling is only defined for knot diagrams")
    if not d.crossings:
        return PlanarDiagram((), loops=n * d.loops, is_link=n * d.loops > 1)
    if n == 1:
        return d
    _check_budget(cable_crossing_count(d, n))

    signs = d.signs()
    w = sum(signs)
    twist_arc = d.crossings[0][UNDER_IN]
    crossings = []

    for index, (a, b, c, dd) in enumerate(d.crossings):
        positive = signs[index] > 0

        def vertical(x, y):
            if y == 0:
                if index == 0 and w:
                    return ("twist-end", x)
                return (a, x)
            if y == n:
                return (c, x)
            return ("v", index, x, y)

        def horizontal(x, y):
            copy = n + 1 - y if positive else y
            if x == 0:
                return (dd, copy)
            if x == n:
                return (b, copy)
            return ("h", index, x, y)

        for x in range(1, n + 1):
            for y in range(1, n + 1):
                crossings.append(
                    (vertical(x, y - 1), horizontal(x, y), vertical(x, y), horizontal(x - 1, y))
                )

    if w:
        current = [(twist_arc, k) for k in range(1, n + 1)]
        fresh = 0
        generator_sign = -1 if w > 0 else 1
        for _ in range(abs(w)):
            for _ in range(n):
                for i in range(n - 1):
                    p_in, q_in = current[i], current[i + 1]
                    fresh += 1
                    nw, ne = ("t", fresh, 0), ("t", fresh, 1)
                    if generator_sign > 0:
                        crossings.append((q_in, ne, nw, p_in))
                    else:
                        crossings.append((p_in, q_in, ne, nw))
                    current[i], current[i + 1] = nw, ne
        rename = {label: ("twist-end", k + 1) for k, label in enumerate(current)}
        crossings = [tuple(rename.get(x, x) for x in c) for c in crossings]

    result = _relabel(crossings, loops=0, is_link=True)
    logger.info(f"{n}-cable built with {len(result.crossings)} crossings (writhe {w} compensated)")
    return result


def decomposition_multiplicity(n: int, dimension: int) -> int:
    """Multiplicity of the dimension-N irreducible in the n-th tensor power of V_2."""
    j = dimension - 1
    if j > n or (n - j) % 2:
        return 0
    k = (n - j) // 2
    return comb(n, k) - (comb(n, k - 1) if k >= 1 else 0)


def parse_pd(rows: Iterable) -> tuple:
    return tuple(tuple(int(x) for x in row) for row in rows)


@dataclass(frozen=True)
class KnotRecord:
    """A named knot from the table with whatever geometric data is known."""

    name: str
    diagram: PlanarDiagram
    a_polynomial: object = None
    known_volume: object = None
    has_closed_form: bool = False
    ics_anchor: object = None

    def __str__(self):
        return self.name
