"""
Deformation and geometric quantization checks on polynomial observables.

The star product follows the convention

    f * g = f g + hbar {f, g} + hbar^2/2 a^ij a^kl d_i d_k f d_j d_l g + ...

with {f, g} = a^ij d_i f d_j g and no i/2 factors, so [x, p]_* = 2 hbar.
The customary product with (i hbar'/2) {f, g} is recovered by substituting
hbar = i hbar' / 2 (see `to_standard_convention`).
"""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import sympy

from .exceptions import UsageError

logger = logging.getLogger(__name__)

HBAR = sympy.Symbol("hbar", positive=True)
HBAR_STANDARD = sympy.Symbol("hbar_std", positive=True)
X, P = sympy.symbols("x p")
MAX_GRAPH_ORDER = 4
MAX_OSCILLATOR_LEVEL = 6
LEFT, RIGHT = "L", "R"


@dataclass(frozen=True)
class PolyObs:
    """Polynomial observable, optionally times the Gaussian exp(-x^2 / 2 hbar)."""

    expr: object
    variables: tuple
    gaussian: bool = False

    def __post_init__(self):
        object.__setattr__(self, "expr", sympy.expand(sympy.sympify(self.expr)))
        object.__setattr__(self, "variables", tuple(self.variables))

    def is_zero(self):
        return self.expr == 0

    def __eq__(self, other):
        if not isinstance(other, PolyObs):
            return NotImplemented
        return self.gaussian == other.gaussian and sympy.expand(self.expr - other.expr) == 0

    def __hash__(self):
        return hash((sympy.srepr(self.expr), self.gaussian))

    def __add__(self, other):
        return PolyObs(self.expr + _expr(other), self.variables, self.gaussian)

    def __sub__(self, other):
        return PolyObs(self.expr - _expr(other), self.variables, self.gaussian)

    def __mul__(self, other):
        return PolyObs(self.expr * _expr(other), self.variables, self.gaussian)

    __rmul__ = __mul__

    def diff(self, var, times=1):
        return PolyObs(sympy.diff(self.expr, var, times), self.variables, self.gaussian)

    def degree(self):
        if self.expr == 0:
            return -1
        return sympy.Poly(self.expr, *self.variables).total_degree()

    def hbar_coefficient(self, n):
        return PolyObs(sympy.expand(self.expr).coeff(HBAR, n), self.variables, self.gaussian)

    def full_expr(self):
        if not self.gaussian:
            return self.expr
        return self.expr * sympy.exp(-X**2 / (2 * HBAR))


def random_polynomial(rng, degree: int, variables=(X, P)) -> PolyObs:
    """Integer polynomial of total degree <= `degree` in two variables, coefficients in -3..3."""
    x, p = variables
    expr = 0
    for a in range(degree + 1):
        for b in range(degree + 1 - a):
            expr += rng.randint(-3, 3) * x**a * p**b
    return PolyObs(expr, variables)


def _expr(value):
    return value.expr if isinstance(value, PolyObs) else sympy.sympify(value)


@dataclass(frozen=True)
class PoissonBivector:
    """Antisymmetric matrix a^ij of polynomial entries."""

    matrix: object
    variables: tuple

    def __post_init__(self):
        matrix = sympy.Matrix(self.matrix).applyfunc(sympy.expand)
        if matrix.shape != (len(self.variables), len(self.variables)):
            raise UsageError(f"Bivector shape {matrix.shape} does not match {len(self.variables)} variables")
        if (matrix + matrix.T).applyfunc(sympy.expand) != sympy.zeros(*matrix.shape):
            raise UsageError("Poisson bivector must be antisymmetric")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "variables", tuple(self.variables))

    @classmethod
    def canonical(cls, variables=(X, P)):
        """Darboux form a^{x_k p_k} = 1 on (x_1..x_d, p_1..p_d)."""
        n = len(variables)
        if n % 2:
            raise UsageError("Canonical bivector needs an even number of variables")
        half = n // 2
        matrix = sympy.zeros(n, n)
        for k in range(half):
            matrix[k, half + k] = 1
            matrix[half + k, k] = -1
        return cls(matrix, variables)

    @property
    def dim(self):
        return len(self.variables)

    def is_constant(self):
        return all(sympy.sympify(e).free_symbols.isdisjoint(self.variables) for e in self.matrix)

    def entry(self, i, j):
        return self.matrix[i, j]

    def jacobi_holds(self):
        """a^il d_l a^jk + cyclic = 0 for every i, j, k."""
        d = self.dim
        for i, j, k in itertools.product(range(d), repeat=3):
            total = 0
            for l in range(d):
                total += self.matrix[i, l] * sympy.diff(self.matrix[j, k], self.variables[l])
                total += self.matrix[j, l] * sympy.diff(self.matrix[k, i], self.variables[l])
                total += self.matrix[k, l] * sympy.diff(self.matrix[i, j], self.variables[l])
            if sympy.expand(total) != 0:
                return False
        return True


def poisson_bracket(f: PolyObs, g: PolyObs, alpha: PoissonBivector) -> PolyObs:
    total = 0
    for i, j in itertools.product(range(alpha.dim), repeat=2):
        entry = alpha.entry(i, j)
        if entry != 0:
            total += entry * sympy.diff(f.expr, alpha.variables[i]) * sympy.diff(g.expr, alpha.variables[j])
    return PolyObs(total, alpha.variables)


def moyal(f: PolyObs, g: PolyObs, alpha: PoissonBivector, order: int = None) -> PolyObs:
    """Exact hbar-expansion of f * g for constant a, truncated after `order`.

    Without `order` the series is summed until it terminates, which for
    polynomials happens at min(deg f, deg g).
    """
    if not alpha.is_constant():
        raise UsageError("The Moyal product needs a constant Poisson bivector")
    if order is None:
        order = max(0, min(f.degree(), g.degree()))
    nonzero = [(i, j, alpha.entry(i, j)) for i, j in itertools.product(range(alpha.dim), repeat=2)
               if alpha.entry(i, j) != 0]
    variables = alpha.variables
    # P^n(f, g) as weighted pairs (d..f, d..g)
    pairs = {(f.expr, g.expr): 1}
    total = f.expr * g.expr
    for n in range(1, order + 1):
        merged = {}
        for (left, right), weight in pairs.items():
            for i, j, entry in nonzero:
                dl = sympy.diff(left, variables[i])
                if dl == 0:
                    continue
                dr = sympy.diff(right, variables[j])
                if dr == 0:
                    continue
                key = (sympy.expand(entry * dl), sympy.expand(dr))
                merged[key] = merged.get(key, 0) + weight
        pairs = merged
        term = sum((w * left * right for (left, right), w in pairs.items()), 0)
        total += HBAR**n / sympy.factorial(n) * term
        if not pairs:
            break
    return PolyObs(total, f.variables or variables)


def star_commutator(f: PolyObs, g: PolyObs, alpha: PoissonBivector) -> PolyObs:
    return moyal(f, g, alpha) - moyal(g, f, alpha)


def to_standard_convention(obs: PolyObs) -> PolyObs:
    """Rewrite an hbar-series in the (i hbar_std / 2) convention."""
    return PolyObs(obs.expr.subs(HBAR, sympy.I * HBAR_STANDARD / 2), obs.variables, obs.gaussian)


@dataclass(frozen=True)
class AdmissibleGraph:
    """Vertex k sends its two ordered edges to i[k-1] and j[k-1]."""

    n: int
    i: tuple
    j: tuple

    def __post_init__(self):
        if len(self.i) != self.n or len(self.j) != self.n:
            raise UsageError(f"Graph of order {self.n} needs {self.n} edge pairs")
        targets = set(range(1, self.n + 1)) | {LEFT, RIGHT}
        for k, (a, b) in enumerate(zip(self.i, self.j), start=1):
            if a not in targets or b not in targets:
                raise UsageError(f"Vertex {k} has an edge to an unknown target")
            if a == k or b == k:
                raise UsageError(f"Vertex {k} has a loop")
            if a == b:
                raise UsageError(f"Vertex {k} sends both edges to {a}")

    def has_internal_edge(self):
        return any(t not in (LEFT, RIGHT) for t in self.i + self.j)

    def as_json(self):
        return {"i": list(self.i), "j": list(self.j)}


def enumerate_graphs(n: int) -> list:
    """All n^n (n+1)^n admissible graphs of order n."""
    if not 1 <= n <= MAX_GRAPH_ORDER:
        raise UsageError(f"Graph order must be in 1..{MAX_GRAPH_ORDER}, got {n}")
    choices = []
    for k in range(1, n + 1):
        targets = [t for t in range(1, n + 1) if t != k] + [LEFT, RIGHT]
        choices.append([(a, b) for a in targets for b in targets if a != b])
    graphs = []
    for combo in itertools.product(*choices):
        graphs.append(AdmissibleGraph(n, tuple(c[0] for c in combo), tuple(c[1] for c in combo)))
    logger.debug(f"Enumerated {len(graphs)} admissible graphs of order {n}")
    return graphs


def graph_operator(gamma: AdmissibleGraph, alpha: PoissonBivector, f: PolyObs, g: PolyObs) -> PolyObs:
    """B_Gamma(f, g).

    Every vertex carries a factor a^{I(e1) I(e2)} for its two edges; an edge
    with index I landing on a vertex, on f or on g applies d_I there. The
    sum runs over all index assignments.
    """
    variables = alpha.variables
    edges = [(k, t) for k in range(1, gamma.n + 1) for t in (gamma.i[k - 1], gamma.j[k - 1])]
    total = 0
    for labels in itertools.product(range(alpha.dim), repeat=len(edges)):
        incoming = {target: [] for target in list(range(1, gamma.n + 1)) + [LEFT, RIGHT]}
        for (_, target), label in zip(edges, labels):
            incoming[target].append(variables[label])
        product = 1
        for k in range(1, gamma.n + 1):
            factor = alpha.entry(labels[2 * (k - 1)], labels[2 * (k - 1) + 1])
            if incoming[k]:
                factor = sympy.diff(factor, *incoming[k])
            product *= factor
            if product == 0:
                break
        if product == 0:
            continue
        left = sympy.diff(f.expr, *incoming[LEFT]) if incoming[LEFT] else f.expr
        right = sympy.diff(g.expr, *incoming[RIGHT]) if incoming[RIGHT] else g.expr
        total += product * left * right
    return PolyObs(total, variables)


def bohr_sommerfeld(E, hbar) -> dict:
    """Whether the orbit at energy E carries an integral action: E / hbar in Z."""
    E, hbar = Fraction(E), Fraction(hbar)
    if E <= 0 or hbar <= 0:
        raise UsageError("E and hbar must be positive")
    ratio = E / hbar
    quantizable = ratio.denominator == 1
    return {"quantizable": quantizable, "n": int(ratio) if quantizable else None}


def oscillator_action(E):
    """Integral of p dx around the circle x^2 + p^2 = 2E."""
    radius = mpmath.sqrt(2 * mpmath.mpf(E))
    return mpmath.quad(lambda t: (radius * mpmath.cos(t)) ** 2, [0, 2 * mpmath.pi])


def oscillator_state(n: int) -> PolyObs:
    """P_n(x) exp(-x^2 / 2 hbar) with P_{n+1} = 2x P_n - hbar P_n'."""
    if not 0 <= n <= MAX_OSCILLATOR_LEVEL:
        raise UsageError(f"Oscillator level must be in 0..{MAX_OSCILLATOR_LEVEL}")
    poly = sympy.Integer(1)
    for _ in range(n):
        poly = sympy.expand(2 * X * poly - HBAR * sympy.diff(poly, X))
    return PolyObs(poly, (X,), gaussian=True)


def oscillator_check(n: int, energy=None) -> PolyObs:
    """(O_H - E) psi_n / exp(-x^2 / 2 hbar) with O_H = (x^2 + p^2)/2, p = -i hbar d/dx.

    E defaults to hbar (n + 1/2).
    """
    state = oscillator_state(n)
    if energy is None:
        energy = HBAR * (n + sympy.Rational(1, 2))
    poly = state.expr
    # psi'' = (P'' - 2x P' / hbar + (x^2 / hbar^2 - 1 / hbar) P) G
    second = sympy.diff(poly, X, 2) - 2 * X * sympy.diff(poly, X) / HBAR + (X**2 / HBAR**2 - 1 / HBAR) * poly
    hamiltonian = (X**2 * poly - HBAR**2 * second) / 2
    return PolyObs(sympy.expand(hamiltonian - energy * poly), (X,), gaussian=True)
