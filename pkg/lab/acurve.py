"""
Classical side of the figure-eight computations.

Branches of an A-polynomial curve A(l, m) = 0 are followed in the
meridian log-coordinate u (m = e^u) and stored with v = log l on a
continuously tracked log sheet. For the figure-eight the geometric branch
starts at the parabolic point u = iπ, v = iπ (l = -1 is a double root
there) and leaves it with slope dv/du = 2*sqrt(3)*i.

Sheet convention: along the geometric branch

    dI_CS/du = -4 v

which is -4(v' + iπ) for the centred coordinate v' = v - iπ (v' = 0 at the
complete structure). This is the sheet on which J_N at q = e^(2u/N) grows
like exp(-N I_CS / 4u); the closed form accordingly carries 8p(u - iπ).
`vol_cs` expects the centred coordinate.
"""
import logging
from dataclasses import dataclass
from math import gcd

import mpmath
import sympy
from mpmath.libmp.libhyper import NoConvergence

from .exceptions import ConvergenceError, DegenerateError, PrecisionError, RamificationError
from .numerics import Estimate, certify, parse_u, unwrap_log

logger = logging.getLogger(__name__)

TRACK_STEP = mpmath.mpf("0.01")
MAX_ROMBERG_LEVELS = 12


class BivarPoly:
    """Integer polynomial in (l, m) stored as sorted (coeff, deg_l, deg_m) terms."""

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        collected = {}
        for coeff, deg_l, deg_m in terms:
            key = (int(deg_l), int(deg_m))
            collected[key] = collected.get(key, 0) + int(coeff)
        self._terms = tuple(
            (c, dl, dm) for (dl, dm), c in sorted(collected.items(), reverse=True) if c
        )

    @property
    def terms(self):
        return self._terms

    def is_zero(self):
        return not self._terms

    def __eq__(self, other):
        if not isinstance(other, BivarPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def __repr__(self):
        return f"BivarPoly({list(self._terms)})"

    @property
    def degree_l(self):
        return max((dl for _, dl, _ in self._terms), default=0)

    def evaluate(self, l, m):
        total = mpmath.mpf(0)
        for c, dl, dm in self._terms:
            total += c * mpmath.power(l, dl) * mpmath.power(m, dm)
        return total

    def coefficients_in_l(self, m):
        """Coefficients of A(., m), highest l-degree first."""
        coeffs = [mpmath.mpf(0)] * (self.degree_l + 1)
        for c, dl, dm in self._terms:
            coeffs[self.degree_l - dl] += c * mpmath.power(m, dm)
        return coeffs

    def content(self):
        g = 0
        for c, _, _ in self._terms:
            g = gcd(g, c)
        return g

    def primitive(self):
        """Divide out the integer content and make the leading coefficient positive."""
        if not self._terms:
            return self
        g = self.content()
        if self._terms[0][0] < 0:
            g = -g
        return BivarPoly((c // g, dl, dm) for c, dl, dm in self._terms)

    def to_sympy(self, l, m):
        return sum((c * l**dl * m**dm for c, dl, dm in self._terms), 0)

    @classmethod
    def from_sympy(cls, expr, l, m):
        poly = sympy.Poly(sympy.expand(expr), l, m)
        terms = []
        for (dl, dm), c in poly.terms():
            if not c.is_Integer:
                raise ValueError(f"Coefficient {c} is not an integer")
            terms.append((int(c), dl, dm))
        return cls(terms)

    def as_json(self):
        return [list(t) for t in self._terms]


# (l - 1)(m^4 l^2 - (1 - m^2 - 2m^4 - m^6 + m^8) l + m^4)
FIGURE_EIGHT_A = BivarPoly([
    (1, 3, 4),
    (-1, 2, 0), (1, 2, 2), (1, 2, 4), (1, 2, 6), (-1, 2, 8),
    (1, 1, 0), (-1, 1, 2), (-1, 1, 4), (-1, 1, 6), (1, 1, 8),
    (-1, 0, 4),
])


@dataclass(frozen=True)
class BranchPoint:
    """A point (u, v) on a tracked branch; v = log l + 2πi * winding."""

    u: object
    v: object
    branch_id: str
    winding: int = 0
    slope: object = None

    @property
    def l(self):
        return mpmath.exp(self.v)

    def centred_v(self):
        return self.v - 1j * mpmath.pi


@dataclass(frozen=True)
class CSVolume:
    u: object
    ics: object
    vol: object
    cs: object


def _as_u(u):
    if isinstance(u, str):
        return parse_u(u)
    return mpmath.mpmathify(u)


def _ipi():
    return mpmath.mpc(0, mpmath.pi)


def _li2_series(z):
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec)
    total = mpmath.mpf(0)
    power = z
    n = 1
    while True:
        term = power / (n * n)
        total += term
        if abs(term) < eps * max(abs(total), 1):
            return total
        n += 1
        power *= z


def _li2_bernoulli(z):
    w = -mpmath.log(1 - z)
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec)
    total = mpmath.mpf(0)
    power = w
    factorial = mpmath.mpf(1)
    n = 0
    small = 0
    while small < 2:
        term = mpmath.bernoulli(n) * power / (factorial * (n + 1))
        total += term
        small = small + 1 if abs(term) < eps * max(abs(total), 1) and n > 1 else 0
        n += 1
        factorial *= n
        power *= w
    return total


def _li2(z):
    """Principal-branch dilogarithm at the current working precision.

    |z| <= 1/2: Maclaurin series. |z| >= 2: inversion to 1/z.
    |1 - z| <= 1/2: reflection to 1 - z. Otherwise the Bernoulli series in
    -log(1 - z), which converges since |log(1 - z)| < 2π in that annulus.
    """
    z = mpmath.mpmathify(z)
    if z == 0:
        return mpmath.mpf(0)
    if z == 1:
        return mpmath.pi**2 / 6
    if abs(z) <= 0.5:
        return _li2_series(z)
    if abs(z) >= 2:
        return -mpmath.pi**2 / 6 - mpmath.log(-z) ** 2 / 2 - _li2(1 / z)
    if abs(1 - z) <= 0.5:
        return mpmath.pi**2 / 6 - mpmath.log(z) * mpmath.log(1 - z) - _li2_series(1 - z)
    return _li2_bernoulli(z)


def dilog(z, digits: int) -> Estimate:
    """Certified Li_2(z); `z` may be text so the guard run sees the exact point."""
    return certify(lambda: _li2(_as_u(z)), digits, label=f"Li2({z})")


def geometric_seed_41() -> BranchPoint:
    """The complete structure of the figure-eight: u = v = iπ."""
    return BranchPoint(
        u=_ipi(), v=_ipi(), branch_id="geometric", winding=0, slope=2j * mpmath.sqrt(3)
    )


def abelian_seed(u=None) -> BranchPoint:
    """The l = 1 branch coming from the (l - 1) factor."""
    return BranchPoint(u=_ipi() if u is None else _as_u(u), v=mpmath.mpf(0), branch_id="abelian", slope=0)


def _pick_root(A, u, predicted_v):
    coeffs = A.coefficients_in_l(mpmath.exp(u))
    while coeffs and coeffs[0] == 0:
        coeffs = coeffs[1:]
    if len(coeffs) < 2:
        raise DegenerateError(f"A(l, m) has no roots in l at u={mpmath.nstr(u, 8)}")
    try:
        roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=mpmath.mp.prec)
    except NoConvergence as exc:
        raise RamificationError(mpmath.nstr(u, 8), "Root finder did not converge") from exc
    target = mpmath.exp(predicted_v)
    ranked = sorted(roots, key=lambda r: abs(r - target))
    if len(ranked) > 1 and abs(ranked[1] - target) < 2 * abs(ranked[0] - target):
        raise RamificationError(mpmath.nstr(u, 8))
    return unwrap_log(ranked[0], predicted_v)


def _march(A, start: BranchPoint, u_end, previous=None, min_steps=4):
    """Follow the branch from `start` to `u_end` in short straight steps."""
    u_end = _as_u(u_end)
    delta = u_end - start.u
    if delta == 0:
        return start, previous
    n_steps = max(min_steps, int(mpmath.ceil(abs(delta) / TRACK_STEP)))
    h = delta / n_steps
    current = start
    for k in range(1, n_steps + 1):
        u = start.u + k * h
        if previous is not None:
            slope = (current.v - previous.v) / (current.u - previous.u)
        else:
            slope = current.slope or 0
        predicted = current.v + slope * h
        v = _pick_root(A, u, predicted)
        previous = current
        winding = int(mpmath.nint((mpmath.im(v) - mpmath.im(mpmath.log(mpmath.exp(v)))) / (2 * mpmath.pi)))
        current = BranchPoint(u=u, v=v, branch_id=start.branch_id, winding=winding, slope=slope)
    return current, previous


def solve_branch(A: BivarPoly, u, seed: BranchPoint) -> BranchPoint:
    """Root of A(l, e^u) = 0 reached from `seed` along the straight path."""
    point, _ = _march(A, seed, u)
    logger.debug(f"Branch '{seed.branch_id}' at u={mpmath.nstr(point.u, 10)}: v={mpmath.nstr(point.v, 10)}")
    return point


def discriminant_l(A: BivarPoly, m):
    """Discriminant of A(., m) as a polynomial in l, evaluated at m."""
    L, M = sympy.symbols("l m")
    disc = sympy.Poly(sympy.discriminant(A.to_sympy(L, M), L), M)
    coeffs = [int(c) for c in disc.all_coeffs()]
    return mpmath.polyval(coeffs, m)


def _p_roots(m):
    a = m**3
    b = 1 - m**2 - m**4
    root = mpmath.sqrt(b * b - 4 * a * a)
    return (-b + root) / (2 * a), (-b - root) / (2 * a)


def p_branch_41(u):
    """p = log x for the root of m^3 x^2 + (1 - m^2 - m^4) x + m^3 = 0
    continued from x = e^(-2πi/3) at u = iπ."""
    u = _as_u(u)
    start = _ipi()
    delta = u - start
    p = mpmath.mpc(0, -2 * mpmath.pi / 3)
    if delta == 0:
        return p
    n_steps = max(8, int(mpmath.ceil(abs(delta) / TRACK_STEP)))
    for k in range(1, n_steps + 1):
        m = mpmath.exp(start + delta * k / n_steps)
        x1, x2 = _p_roots(m)
        if abs(x1 - x2) < mpmath.mpf(10) ** (-mpmath.mp.dps // 3):
            raise RamificationError(mpmath.nstr(u, 8), "Quadratic for p degenerates")
        target = mpmath.exp(p)
        x = x1 if abs(x1 - target) < abs(x2 - target) else x2
        p = unwrap_log(x, p)
    return p


def ics_closed_41(u):
    """I_CS(u) = 2Li2(e^(-p-u)) - 2Li2(e^(p-u)) + 8p(u - iπ).

    Differs from the form with 8(p - iπ)(u - iπ) by 8iπ(u - iπ); both agree
    at u = iπ but only this one matches the growth of J_N away from it.
    """
    u = _as_u(u)
    p = p_branch_41(u)
    ipi = _ipi()
    return 2 * _li2(mpmath.exp(-p - u)) - 2 * _li2(mpmath.exp(p - u)) + 8 * p * (u - ipi)


def ics_derivative_41(v):
    """dI_CS/du on the geometric branch given v = log l there (v = iπ at the seed)."""
    return -4 * v


def ics_path(A: BivarPoly, u_end, steps: int = 4, seed: BranchPoint = None, anchor=None,
             tol=None) -> Estimate:
    """I_CS(u_end) = I_CS(iπ) + integral of dI/du along the straight path.

    Romberg integration on `steps` * 2^k panels; the error is the change
    between the last two diagonal entries.
    """
    u_end = _as_u(u_end)
    seed = seed or geometric_seed_41()
    if anchor is None:
        anchor = ics_closed_41(seed.u)
    delta = u_end - seed.u
    if delta == 0:
        return Estimate(anchor, mpmath.mpf(0))
    if tol is None:
        tol = mpmath.mpf(10) ** (-min(mpmath.mp.dps // 2, 30))

    def sample(panels):
        # v is followed in increasing t so log sheets stay continuous
        point, previous = seed, None
        out = []
        for j in range(panels + 1):
            t = mpmath.mpf(j) / panels
            point, previous = _march(A, point, seed.u + t * delta, previous, min_steps=1)
            out.append(ics_derivative_41(point.v))
        return out

    table = []
    for level in range(MAX_ROMBERG_LEVELS):
        panels = steps * (1 << level)
        f = sample(panels)
        trapezoid = delta * (sum(f) - (f[0] + f[-1]) / 2) / panels
        row = [trapezoid]
        for j in range(1, level + 1):
            factor = mpmath.mpf(4) ** j
            row.append(row[j - 1] + (row[j - 1] - table[-1][j - 1]) / (factor - 1))
        table.append(row)
        if level:
            error = abs(row[-1] - table[-2][-1])
            estimate = row[-1]
            logger.debug(f"ics_path level {level}: {panels} panels, change {mpmath.nstr(error, 3)}")
            if error < tol:
                return Estimate(anchor + estimate, error)
    raise ConvergenceError(f"ics_path did not converge to u={mpmath.nstr(u_end, 10)}")


def vol_cs(u, ics, v) -> CSVolume:
    """Vol + i CS = (i/2) I_CS + 2i v Re(u) - 2π u + 2π^2 i, with v the centred coordinate."""
    u = _as_u(u)
    z = 0.5j * ics + 2j * v * mpmath.re(u) - 2 * mpmath.pi * u + 2j * mpmath.pi**2
    return CSVolume(u=u, ics=ics, vol=mpmath.re(z), cs=mpmath.im(z))


def _torsion_radicand(m):
    return -m**-4 + 2 * m**-2 + 1 + 2 * m**2 - m**4


def _sqrt_radicand_41(u):
    u = _as_u(u)
    start = _ipi()
    delta = u - start
    root = mpmath.sqrt(_torsion_radicand(mpmath.exp(start)))
    if delta == 0:
        return root
    n_steps = max(8, int(mpmath.ceil(abs(delta) / TRACK_STEP)))
    for k in range(1, n_steps + 1):
        radicand = _torsion_radicand(mpmath.exp(start + delta * k / n_steps))
        if abs(radicand) < mpmath.mpf(10) ** (-mpmath.mp.dps // 3):
            raise RamificationError(mpmath.nstr(u, 8), "Torsion radicand vanishes")
        candidate = mpmath.sqrt(radicand)
        root = candidate if abs(candidate - root) <= abs(candidate + root) else -candidate
    return root


def torsion_41(u):
    """T(u) = 4π^2 / sqrt(-m^-4 + 2m^-2 + 1 + 2m^2 - m^4)."""
    return 4 * mpmath.pi**2 / _sqrt_radicand_41(u)


def s2_41(u):
    u = _as_u(u)
    m = mpmath.exp(u)
    t = torsion_41(u) / (4 * mpmath.pi**2)
    bracket = 1 - m**2 - 2 * m**4 + 15 * m**6 - 2 * m**8 - m**10 + m**12
    return -1j * t**3 / (12 * m**6) * bracket


def s3_41(u):
    """Printed form including the trailing -1/6."""
    u = _as_u(u)
    m = mpmath.exp(u)
    t = torsion_41(u) / (4 * mpmath.pi**2)
    bracket = 1 - m**2 - 2 * m**4 + 5 * m**6 - 2 * m**8 - m**10 + m**12
    return -2 * t**6 / m**6 * bracket - mpmath.mpf(1) / 6


def complex_volume_41(u, digits: int) -> dict:
    """Certified I_CS, p, v, Vol, CS, T, S2 and S3 of the figure-eight at u."""
    def branch_v():
        return solve_branch(FIGURE_EIGHT_A, _as_u(u), geometric_seed_41()).v

    def volume():
        point = solve_branch(FIGURE_EIGHT_A, _as_u(u), geometric_seed_41())
        result = vol_cs(u, ics_closed_41(u), point.centred_v())
        return mpmath.mpc(result.vol, result.cs)

    try:
        out = {
            "ics": certify(lambda: ics_closed_41(u), digits, "I_CS"),
            "p": certify(lambda: p_branch_41(u), digits, "p"),
            "v": certify(branch_v, digits, "v"),
            "volume": certify(volume, digits, "Vol + i CS"),
            "torsion": certify(lambda: torsion_41(u), digits, "T"),
            "s2": certify(lambda: s2_41(u), digits, "S2"),
            "s3": certify(lambda: s3_41(u), digits, "S3"),
        }
        combined = out.pop("volume")
        out["vol"] = Estimate(mpmath.re(combined.value), combined.error)
        out["cs"] = Estimate(mpmath.im(combined.value), combined.error)
    except PrecisionError:
        logger.warning(f"Complex volume at u={u} failed certification at {digits} digits")
        raise
    logger.info(f"4_1 at u={u}: Vol={mpmath.nstr(out['vol'].value, 12)} CS={mpmath.nstr(out['cs'].value, 12)}")
    return out
