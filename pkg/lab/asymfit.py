"""
Asymptotic fits of invariant sequences.

log V_N is modelled as a*N + b*log N + c + sum_i d_i N^-i (i <= 3). The
growth rate a is compared with -I_CS(u)/(4u), b with 3/2, c with the
torsion constant and d_1 with u * S~_2.
"""
import logging
from dataclasses import dataclass, field

import mpmath
from mpmath import mp

from . import acurve
from .cjones import CLOSED_FORM_KNOT, EvalPoint, jn_numeric, kashaev_41
from .exceptions import IllConditionedError, UsageError
from .metrics import SAMPLES_GENERATED
from .numerics import GUARD_DIGITS, parse_u

logger = logging.getLogger(__name__)

MAX_MODEL_ORDER = 3
DEFAULT_HOLDOUT = 3
LOG_COEFF = mpmath.mpf(3) / 2


@dataclass(frozen=True)
class SequenceSample:
    N: int
    value: object
    log_value: object
    error: object = 0


@dataclass
class FitReport:
    growth_rate: object
    log_coeff: object
    constant: object
    inverse_coeffs: list
    residual: object
    condition: object
    model_order: int
    constrain_log: bool
    fit_N: list = field(default_factory=list)
    held_out_N: list = field(default_factory=list)


def is_ipi(u) -> bool:
    if isinstance(u, str):
        return u.replace(" ", "").lower() == "ipi"
    value = mpmath.mpmathify(u)
    return mpmath.re(value) == 0 and mpmath.almosteq(mpmath.im(value), mpmath.pi)


def _unwound(samples):
    """Unwind log phases along the sample order by linear prediction."""
    out = []
    for k, (N, value, error) in enumerate(samples):
        principal = mpmath.log(value)
        if k == 0:
            log_value = principal
        else:
            prev = out[-1]
            predicted = prev.log_value
            if k >= 2:
                before = out[-2]
                predicted += (prev.log_value - before.log_value) * (N - prev.N) / (prev.N - before.N)
            turns = mpmath.nint((mpmath.im(predicted) - mpmath.im(principal)) / (2 * mpmath.pi))
            log_value = principal + 2j * mpmath.pi * turns
        out.append(SequenceSample(N=N, value=value, log_value=log_value, error=error))
    return out


def sample_value(u, N: int, digits: int):
    """One certified sample: the Kashaev invariant at u = iπ, J_N/[N] elsewhere."""
    if is_ipi(u):
        estimate = kashaev_41(N, digits)
        kind = "kashaev"
    else:
        estimate = jn_numeric(CLOSED_FORM_KNOT, EvalPoint(u, N), digits, normalized=True)
        kind = "jn"
    SAMPLES_GENERATED.labels(kind=kind).inc()
    return estimate


def build_sequence(u, N_list, digits: int, values=None) -> list:
    """Samples of the figure-eight sequence at u, logs unwound along N.

    `values` may carry precomputed (value, error) pairs keyed by N, which is
    how results gathered from workers come back in.
    """
    N_list = sorted(set(int(N) for N in N_list))
    if not N_list or N_list[0] < 1:
        raise UsageError("N values must be positive")
    raw = []
    with mp.workdps(2 * digits + GUARD_DIGITS):
        for N in N_list:
            if values is not None and N in values:
                value, error = values[N]
                value, error = mpmath.mpmathify(value), mpmath.mpmathify(error)
            else:
                estimate = sample_value(u, N, digits)
                value, error = estimate.value, estimate.error
            raw.append((N, value, error))
        samples = _unwound(raw)
    logger.info(f"Built {len(samples)} samples at u={u} for N in [{N_list[0]}, {N_list[-1]}]")
    return samples


def _basis(N, model_order, constrain_log):
    N = mpmath.mpf(N)
    row = [N]
    if not constrain_log:
        row.append(mpmath.log(N))
    row.append(mpmath.mpf(1))
    row.extend(N ** (-i) for i in range(1, model_order + 1))
    return row


def _split_holdout(samples, holdout):
    """Spread `holdout` samples evenly over the sample range, endpoints excluded."""
    n = len(samples)
    picks = {round((k + 1) * (n - 1) / (holdout + 1)) for k in range(holdout)}
    fit = [s for i, s in enumerate(samples) if i not in picks]
    held = [s for i, s in enumerate(samples) if i in picks]
    return fit, held


def fit_expansion(samples, model_order: int = MAX_MODEL_ORDER, constrain_log: bool = False,
                  holdout: int = DEFAULT_HOLDOUT, max_condition=None) -> FitReport:
    """Least-squares fit of the log-sequence on column-scaled normal equations."""
    if not 0 <= model_order <= MAX_MODEL_ORDER:
        raise UsageError(f"model_order must be in 0..{MAX_MODEL_ORDER}")
    if holdout < 3:
        raise UsageError("At least 3 samples must be held out")
    n_params = model_order + (2 if constrain_log else 3)
    if len(samples) < n_params + holdout:
        raise UsageError(
            f"{len(samples)} samples cannot fit {n_params} parameters with {holdout} held out"
        )
    fit, held = _split_holdout(samples, holdout)

    rows = [_basis(s.N, model_order, constrain_log) for s in fit]
    targets = [s.log_value - (LOG_COEFF * mpmath.log(s.N) if constrain_log else 0) for s in fit]
    scales = [max(abs(r[j]) for r in rows) for j in range(n_params)]
    design = mpmath.matrix([[r[j] / scales[j] for j in range(n_params)] for r in rows])
    normal = design.T * design
    condition = mpmath.cond(normal)
    if max_condition is None:
        max_condition = mpmath.mpf(10) ** (mp.dps // 2)
    if condition > max_condition:
        raise IllConditionedError(float(condition), float(max_condition))

    rhs_re = design.T * mpmath.matrix([mpmath.re(t) for t in targets])
    rhs_im = design.T * mpmath.matrix([mpmath.im(t) for t in targets])
    sol_re = mpmath.lu_solve(normal, rhs_re)
    sol_im = mpmath.lu_solve(normal, rhs_im)
    coeffs = [mpmath.mpc(sol_re[j], sol_im[j]) / scales[j] for j in range(n_params)]

    def predict(N):
        value = sum(c * b for c, b in zip(coeffs, _basis(N, model_order, constrain_log)))
        return value + (LOG_COEFF * mpmath.log(N) if constrain_log else 0)

    residual = max(abs(predict(s.N) - s.log_value) for s in held)

    growth = coeffs[0]
    if constrain_log:
        log_coeff, constant, inverse = LOG_COEFF, coeffs[1], coeffs[2:]
    else:
        log_coeff, constant, inverse = mpmath.re(coeffs[1]), coeffs[2], coeffs[3:]
    report = FitReport(
        growth_rate=growth,
        log_coeff=log_coeff,
        constant=constant,
        inverse_coeffs=list(inverse),
        residual=residual,
        condition=condition,
        model_order=model_order,
        constrain_log=constrain_log,
        fit_N=[s.N for s in fit],
        held_out_N=[s.N for s in held],
    )
    logger.info(
        f"Fit order {model_order}{' (b=3/2)' if constrain_log else ''}: "
        f"a={mpmath.nstr(growth, 12)} b={mpmath.nstr(log_coeff, 8)} "
        f"c={mpmath.nstr(constant, 8)} residual={mpmath.nstr(residual, 3)}"
    )
    return report


def richardson_limit(values, N_list, include_log: bool = False):
    """Limit N -> oo of a sequence with an expansion in 1/N.

    Fits the samples exactly with 1, 1/N, 1/N^2, ... (plus log(1/N) when
    `include_log`) and returns the constant coefficient.
    """
    if len(values) != len(N_list) or not values:
        raise UsageError("values and N_list must be non-empty and of equal length")
    eps = [mpmath.mpf(1) / N for N in N_list]
    n = len(eps)
    terms = []
    if include_log:
        terms.append(mpmath.log)
    terms.extend((lambda e, i=i: e**i) for i in range(n - len(terms)))
    mat = mpmath.matrix([[t(e) for t in terms] for e in eps])
    coeffs = mpmath.lu_solve(mat, mpmath.matrix(list(values)))
    return coeffs[1] if include_log else coeffs[0]


def growth_rate_richardson(samples, points: int = 6):
    """Model-free estimate of a from (log V_N - 3/2 log N)/N on the largest N."""
    tail = samples[-points:]
    values = [(s.log_value - LOG_COEFF * mpmath.log(s.N)) / s.N for s in tail]
    return richardson_limit(values, [s.N for s in tail])


def _relative(fitted, expected):
    size = abs(expected)
    diff = abs(fitted - expected)
    return diff / size if size else diff


def compare_quantum_vc(report: FitReport, u) -> list:
    """Fitted coefficients against the classical predictions at u.

    Rows are dicts with `quantity`, `fitted`, `expected` and `relative_error`.
    """
    u_value = parse_u(u) if isinstance(u, str) else mpmath.mpmathify(u)
    ics = acurve.ics_closed_41(u_value)
    torsion = acurve.torsion_41(u_value)
    s2 = acurve.s2_41(u_value)
    rows = [
        ("growth_rate", report.growth_rate, -ics / (4 * u_value)),
        ("log_coeff", report.log_coeff, LOG_COEFF),
    ]
    if is_ipi(u):
        # (1/2) log(-iπ T / 4) - (3/2) log(iπ) reduces to (1/2) log(T / 4π^2)
        rows.append(("constant", report.constant, mpmath.log(torsion / (4 * mpmath.pi**2)) / 2))
    if report.inverse_coeffs:
        rows.append(("s2_tilde", report.inverse_coeffs[0] / u_value, s2))
    table = []
    for name, fitted, expected in rows:
        table.append({
            "quantity": name,
            "fitted": fitted,
            "expected": expected,
            "relative_error": _relative(fitted, expected),
        })
        logger.debug(f"{name}: fitted {mpmath.nstr(fitted, 10)} expected {mpmath.nstr(expected, 10)}")
    return table
