import logging

import mpmath
from celery import group, shared_task
from django.conf import settings
from mpmath import mp

from .asymfit import sample_value
from .numerics import GUARD_DIGITS

logger = logging.getLogger(__name__)


def _payload(N, estimate, digits):
    value = mpmath.mpmathify(estimate.value)
    width = 2 * digits + GUARD_DIGITS
    return {
        "status": "success",
        "N": N,
        "re": mpmath.nstr(mpmath.re(value), width),
        "im": mpmath.nstr(mpmath.im(value), width),
        "error": mpmath.nstr(estimate.error, 5),
    }


@shared_task
def sample_sequence(u, N, digits):
    """One sample of the figure-eight sequence at u (Kashaev at u = iπ)."""
    with mp.workdps(2 * digits + GUARD_DIGITS):
        estimate = sample_value(u, N, digits)
        payload = _payload(N, estimate, digits)
    logger.debug(f"Sample N={N} at u={u} done")
    return payload


def collect_samples(u, N_list, digits) -> dict:
    """N -> (value, error) for every N, fanned out to workers when
    KNOTLAB_PARALLEL is set and computed in-process otherwise."""
    if settings.KNOTLAB_PARALLEL:
        logger.info(f"Dispatching {len(N_list)} samples to workers")
        job = group(sample_sequence.s(u, N, digits) for N in N_list)
        if sample_sequence.app.conf.task_always_eager:
            results = [r.get() for r in job.apply().results]
        else:
            results = job.apply_async().join()
    else:
        results = [sample_sequence.run(u, N, digits) for N in N_list]
    out = {}
    with mp.workdps(2 * digits + GUARD_DIGITS):
        for item in results:
            out[item["N"]] = (mpmath.mpc(item["re"], item["im"]), mpmath.mpf(item["error"]))
    return out
