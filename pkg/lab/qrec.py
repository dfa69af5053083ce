"""
q-Weyl operators acting on colored Jones sequences.

On a sequence J_N the shift l^ and the multiplication m^ act by

    (l^ J)_N = J_{N+1},    (m^ J)_N = s^N J_N

so l^ m^ = s m^ l^. Operators are kept normal-ordered as sums of
c(s) m^b l^a with the m-powers on the left and c a rational function of s.
"""
import logging
from dataclasses import dataclass, field
from math import gcd, lcm

import mpmath
import sympy
from flint import fmpz_mat, nmod_mat

from .acurve import BivarPoly, BranchPoint, geometric_seed_41, solve_branch
from .cjones import habiro_41, habiro_41_normalized
from .exceptions import PoleError, UnderdeterminedError, UsageError, VerificationError
from .knotcore import LaurentHalf, quantum_integer
from .metrics import RECURSIONS_VERIFIED

logger = logging.getLogger(__name__)

S = sympy.Symbol("s")
ROW_SELECTION_PRIME = 2**61 - 1
MIN_HELD_OUT = 4


def _canonical(coeff):
    return sympy.cancel(sympy.sympify(coeff))


class QWeylOp:
    """Normal-ordered operator: {(a, b): c(s)} for the terms c(s) m^b l^a."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        out = {}
        for (a, b), coeff in (terms or {}).items():
            key = (int(a), int(b))
            out[key] = out.get(key, 0) + sympy.sympify(coeff)
        self._terms = {k: c for k, c in ((k, _canonical(c)) for k, c in out.items()) if c != 0}

    @classmethod
    def ell(cls, power=1):
        return cls({(power, 0): 1})

    @classmethod
    def em(cls, power=1):
        return cls({(0, power): 1})

    @classmethod
    def scalar(cls, coeff):
        return cls({(0, 0): coeff})

    @classmethod
    def one(cls):
        return cls.scalar(1)

    @classmethod
    def from_word(cls, word, coeff=1):
        """Normal-order a product of letters 'l' and 'm' read left to right."""
        a = b = 0
        factor = sympy.Integer(1)
        for letter in word:
            if letter == "l":
                a += 1
            elif letter == "m":
                # m^b l^a m = s^a m^(b+1) l^a
                factor *= S**a
                b += 1
            else:
                raise UsageError(f"Unknown operator letter '{letter}'")
        return cls({(a, b): factor * coeff})

    @property
    def terms(self):
        return dict(self._terms)

    def is_zero(self):
        return not self._terms

    @property
    def order(self):
        return max((a for a, _ in self._terms), default=0)

    def coefficient(self, a, b):
        return self._terms.get((a, b), sympy.Integer(0))

    def __eq__(self, other):
        if not isinstance(other, QWeylOp):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted((k, sympy.srepr(c)) for k, c in self._terms.items())))

    def __add__(self, other):
        other = other if isinstance(other, QWeylOp) else QWeylOp.scalar(other)
        merged = dict(self._terms)
        for key, coeff in other._terms.items():
            merged[key] = merged.get(key, 0) + coeff
        return QWeylOp(merged)

    __radd__ = __add__

    def __neg__(self):
        return QWeylOp({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = other if isinstance(other, QWeylOp) else QWeylOp.scalar(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, QWeylOp):
            return QWeylOp({k: c * other for k, c in self._terms.items()})
        out = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                # l^a1 m^b2 = s^(a1 b2) m^b2 l^a1
                key = (a1 + a2, b1 + b2)
                out[key] = out.get(key, 0) + c1 * c2 * S ** (a1 * b2)
        return QWeylOp(out)

    def __rmul__(self, other):
        return QWeylOp({k: other * c for k, c in self._terms.items()})

    def substitute_m(self, factor):
        """Replace m^ by factor * m^ (factor a function of s)."""
        return QWeylOp({(a, b): c * sympy.sympify(factor) ** b for (a, b), c in self._terms.items()})

    def __repr__(self):
        parts = [f"({c})*m^{b}*l^{a}" for (a, b), c in sorted(self._terms.items())]
        return " + ".join(parts) if parts else "0"

    def as_json(self):
        out = []
        for (a, b), coeff in sorted(self._terms.items()):
            num, den = sympy.fraction(coeff)
            out.append({
                "a": a,
                "b": b,
                "num": _poly_dict(num),
                "den": _poly_dict(den),
            })
        return out


def _poly_dict(expr):
    poly = sympy.Poly(expr, S)
    return {str(exp[0]): int(c) for exp, c in sorted(poly.as_dict().items(), reverse=True)}


@dataclass
class JSequence:
    """Exact values J_1 .. J_max_N of a colored Jones sequence."""

    name: str
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        if 1 not in self.values:
            raise UsageError("A sequence must start at N=1")
        if not self.is_zero() and self.values[1] != 1:
            raise UsageError(f"Sequence '{self.name}' has J_1 = {self.values[1]}, expected 1")

    @property
    def max_N(self):
        return max(self.values)

    def __getitem__(self, N):
        try:
            return self.values[N]
        except KeyError:
            raise UsageError(f"Index N={N} is outside 1..{self.max_N}") from None

    def is_zero(self):
        return all(v.is_zero() for v in self.values.values())

    @classmethod
    def from_function(cls, name, func, max_N):
        return cls(name, {N: func(N) for N in range(1, max_N + 1)})

    @classmethod
    def unknot(cls, max_N):
        return cls.from_function("unknot", quantum_integer, max_N)

    @classmethod
    def figure_eight(cls, max_N, normalized=False):
        func = habiro_41_normalized if normalized else habiro_41
        name = "4_1/[N]" if normalized else "4_1"
        return cls.from_function(name, func, max_N)

    @classmethod
    def zero(cls, max_N):
        return cls("zero", {N: LaurentHalf() for N in range(1, max_N + 1)})


def _as_laurent(coeff):
    num, den = sympy.fraction(sympy.cancel(coeff))
    den_poly = sympy.Poly(den, S)
    if len(den_poly.terms()) != 1:
        return None
    (shift,), unit = den_poly.terms()[0]
    if unit not in (1, -1):
        return None
    try:
        return LaurentHalf.from_sympy(num, S).shift(-shift) * int(unit)
    except ValueError:
        return None


def apply(op: QWeylOp, seq: JSequence, N: int):
    """(op J)_N. A LaurentHalf when the result is a Laurent polynomial,
    otherwise the reduced sympy expression."""
    if N < 1 or N + op.order > seq.max_N:
        raise UsageError(f"Index N={N} with order {op.order} is outside 1..{seq.max_N}")
    total = LaurentHalf()
    rest = sympy.Integer(0)
    for (a, b), coeff in op.terms.items():
        value = seq[N + a].shift(b * N)
        laurent = _as_laurent(coeff)
        if laurent is not None:
            total = total + laurent * value
        else:
            rest += coeff * value.to_sympy(S)
    if rest == 0:
        return total
    combined = sympy.cancel(rest + total.to_sympy(S))
    laurent = _as_laurent(combined)
    return laurent if laurent is not None else combined


def first_nonvanishing(op: QWeylOp, seq: JSequence, indices) -> int | None:
    """First index in `indices` where op J is nonzero, else None."""
    for N in indices:
        value = apply(op, seq, N)
        if not (value.is_zero() if isinstance(value, LaurentHalf) else value == 0):
            return N
    return None


@dataclass(frozen=True)
class SearchBox:
    order: int
    coeff_degree: int
    s_degree: int
    m_step: int = 1
    s_step: int = 1
    inhomogeneous: bool = False

    def operator_columns(self):
        return [
            (a, b, k)
            for a in range(self.order + 1)
            for b in range(self.coeff_degree + 1)
            for k in range(self.s_degree + 1)
        ]

    def rhs_columns(self):
        if not self.inhomogeneous:
            return []
        return [(b, k) for b in range(self.coeff_degree + 1) for k in range(self.s_degree + 1)]

    @property
    def n_unknowns(self):
        return len(self.operator_columns()) + len(self.rhs_columns())


def _equation_rows(seq, box, N):
    """Rows (one per power of s) of the linear conditions at index N."""
    rows = {}
    columns = box.operator_columns()
    offset = len(columns)
    for col, (a, b, k) in enumerate(columns):
        shifted = seq[N + a].shift(k * box.s_step + b * box.m_step * N)
        for exp, c in shifted.terms():
            rows.setdefault(exp, {})[col] = c
    for j, (b, k) in enumerate(box.rhs_columns()):
        exp = k * box.s_step + b * box.m_step * N
        rows.setdefault(exp, {})[offset + j] = -1
    return [rows[e] for e in sorted(rows)]


def _independent_rows(rows, n_cols):
    """Indices of a maximal set of rows independent modulo a large prime."""
    n_rows = len(rows)
    entries = [0] * (n_cols * n_rows)
    for r, row in enumerate(rows):
        for c, value in row.items():
            entries[c * n_rows + r] = value % ROW_SELECTION_PRIME
    reduced, rank = nmod_mat(n_cols, n_rows, entries, ROW_SELECTION_PRIME).rref()
    picks = []
    j = 0
    for i in range(rank):
        while not int(reduced[i, j]):
            j += 1
        picks.append(j)
        j += 1
    return picks


def _vector_to_ops(vector, box):
    common = 0
    for x in vector:
        common = gcd(common, x)
    first = next(x for x in vector if x)
    if first < 0:
        common = -common
    vector = [x // common for x in vector]
    op_terms = {}
    for x, (a, b, k) in zip(vector, box.operator_columns()):
        if x:
            key = (a, b * box.m_step)
            op_terms[key] = op_terms.get(key, 0) + x * S ** (k * box.s_step)
    rhs_terms = {}
    offset = len(box.operator_columns())
    for x, (b, k) in zip(vector[offset:], box.rhs_columns()):
        if x:
            key = (0, b * box.m_step)
            rhs_terms[key] = rhs_terms.get(key, 0) + x * S ** (k * box.s_step)
    return QWeylOp(op_terms), QWeylOp(rhs_terms)


def _rhs_value(rhs: QWeylOp, N):
    total = LaurentHalf()
    for (_, b), coeff in rhs.terms.items():
        total = total + _as_laurent(coeff).shift(b * N)
    return total


def _check_inhomogeneous(op, rhs, seq, indices):
    for N in indices:
        if apply(op, seq, N) != _rhs_value(rhs, N):
            return N
    return None


def homogenize(op: QWeylOp, rhs: QWeylOp) -> QWeylOp:
    """Turn op J = rhs(m^) 1 into a homogeneous relation of order + 1.

    With r_N = R(s^N): R(m^) l^ op - R(s m^) op annihilates J.
    """
    if any(a for a, _ in rhs.terms):
        raise UsageError("The right-hand side must not contain shifts")
    if rhs.is_zero():
        return op
    return rhs * QWeylOp.ell() * op - rhs.substitute_m(S) * op


def lift_to_unnormalized(op: QWeylOp, order: int = None) -> QWeylOp:
    """From an annihilator of J_N/[N] to one of J_N.

    J_{N+a}/[N+a] is cleared by multiplying through with
    prod_a (s^(N+a) - s^-(N+a)) and one power of m^ per factor.
    """
    order = op.order if order is None else order
    lifted = QWeylOp()
    for (a, b), coeff in op.terms.items():
        term = QWeylOp({(a, b): coeff})
        for other in range(order + 1):
            if other != a:
                term = QWeylOp({(0, 2): S**other, (0, 0): -(S ** (-other))}) * term
        lifted = lifted + term
    return lifted


def discover_recursion(seq: JSequence, order: int, coeff_degree: int, s_degree: int = None,
                       m_step: int = 1, s_step: int = 1, inhomogeneous: bool = False,
                       held_out: int = MIN_HELD_OUT):
    """Find a nonzero operator of the given shape annihilating `seq`.

    Coefficients are sum_{b <= coeff_degree, k <= s_degree} x m^(b m_step) s^(k s_step)
    with integer x. The linear system is solved exactly; the result is
    re-applied on every fit index and on `held_out` further indices. With
    `inhomogeneous` a right-hand side of the same shape is allowed and the
    returned operator is its homogenization (order + 1). Returns None when
    only the zero solution exists.
    """
    s_degree = coeff_degree if s_degree is None else s_degree
    box = SearchBox(order, coeff_degree, s_degree, m_step, s_step, inhomogeneous)
    if seq.is_zero():
        logger.info(f"Sequence '{seq.name}' is identically zero; every operator annihilates it")
        return QWeylOp.one()
    if held_out < MIN_HELD_OUT:
        raise UsageError(f"At least {MIN_HELD_OUT} held-out indices are required")

    usable = list(range(1, seq.max_N - order + 1))
    if len(usable) <= held_out:
        raise UnderdeterminedError(
            f"max_N={seq.max_N} leaves {len(usable)} usable indices at order {order}; "
            f"need more than {held_out}"
        )
    fit, checks = usable[:-held_out], usable[-held_out:]

    rows = []
    for N in fit:
        rows.extend(_equation_rows(seq, box, N))
    n_cols = box.n_unknowns
    if len(rows) < n_cols:
        raise UnderdeterminedError(f"{len(rows)} equations for {n_cols} unknowns; increase max_N")

    picks = _independent_rows(rows, n_cols)
    logger.debug(f"{len(rows)} equations, {len(picks)} independent, {n_cols} unknowns")
    system = fmpz_mat([[rows[r].get(c, 0) for c in range(n_cols)] for r in picks])
    basis, nullity = system.nullspace()
    if nullity == 0:
        logger.info(f"No recursion of order {order}, degree {coeff_degree} for '{seq.name}'")
        return None

    first_failure = None
    for j in range(nullity):
        vector = [int(basis[i, j]) for i in range(n_cols)]
        if not any(vector[: len(box.operator_columns())]):
            continue
        op, rhs = _vector_to_ops(vector, box)
        failure = _check_inhomogeneous(op, rhs, seq, fit + checks)
        if failure is None:
            RECURSIONS_VERIFIED.inc()
            result = homogenize(op, rhs) if inhomogeneous else op
            logger.info(
                f"Recursion for '{seq.name}' of order {result.order} with {len(result.terms)} terms, "
                f"verified on N={fit[0]}..{checks[-1]}"
            )
            return result
        logger.warning(f"Candidate {j} of the nullspace fails at N={failure}")
        first_failure = first_failure or failure
    raise VerificationError(first_failure or checks[0])


def classical_limit(op: QWeylOp) -> BivarPoly:
    """s -> 1, l^ -> l, m^ -> m, up to overall content and monomials.

    The denominator shared by all coefficients and the common factor of the
    numerators are removed first; a coefficient that still has a pole at
    s = 1 raises PoleError.
    """
    if op.is_zero():
        return BivarPoly()
    fractions = {key: sympy.fraction(sympy.cancel(c)) for key, c in op.terms.items()}
    shared = None
    common = sympy.Integer(0)
    for num, den in fractions.values():
        shared = den if shared is None else sympy.gcd(shared, den)
        common = sympy.gcd(common, num)
    terms = []
    for (a, b), (num, den) in fractions.items():
        reduced = sympy.cancel(num * shared / (common * den))
        r_num, r_den = sympy.fraction(reduced)
        if r_den.subs(S, 1) == 0:
            raise PoleError(op.terms[(a, b)])
        value = sympy.Rational(r_num.subs(S, 1), r_den.subs(S, 1))
        if value:
            terms.append((value, a, b))
    if not terms:
        return BivarPoly()
    scale = lcm(*(int(t[0].q) for t in terms))
    min_a = min(a for _, a, _ in terms)
    min_b = min(b for _, _, b in terms)
    return BivarPoly((int(v * scale), a - min_a, b - min_b) for v, a, b in terms).primitive()


def curve_residual(limit: BivarPoly, curve: BivarPoly, u_values, seed: BranchPoint = None) -> object:
    """Largest relative size of `limit` on the geometric branch of A(l, m) = 0.

    Each u is reached from `seed` (the figure-eight complete structure by
    default) with `solve_branch`; the value of `limit` at (l, e^u) is
    divided by the sum of the absolute values of its terms. A classical
    limit vanishing on the geometric component gives a residual at the
    working precision.
    """
    if limit.is_zero() or curve.is_zero():
        raise UsageError("Both polynomials must be nonzero")
    seed = seed or geometric_seed_41()
    worst = mpmath.mpf(0)
    for u in u_values:
        point = solve_branch(curve, u, seed)
        l, m = point.l, mpmath.exp(point.u)
        scale = sum(abs(c) * abs(l) ** dl * abs(m) ** dm for c, dl, dm in limit.terms)
        worst = max(worst, abs(limit.evaluate(l, m)) / scale)
    logger.debug(f"Classical limit residual on the '{seed.branch_id}' branch: {mpmath.nstr(worst, 3)}")
    return worst
