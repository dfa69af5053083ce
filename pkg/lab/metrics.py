import time
import logging
from django.conf import settings
from prometheus_client import Counter, Histogram, start_http_server
from celery.signals import worker_process_init, task_prerun, task_postrun, task_failure

logger = logging.getLogger(__name__)

# Task lifecycle
TASKS_STARTED = Counter(
    "knotlab_tasks_started_total", "Total started Celery tasks", ["task"]
)
TASKS_SUCCEEDED = Counter(
    "knotlab_tasks_succeeded_total", "Total succeeded Celery tasks", ["task"]
)
TASKS_FAILED = Counter(
    "knotlab_tasks_failed_total", "Total failed Celery tasks", ["task"]
)
TASK_RUNTIME = Histogram(
    "knotlab_task_runtime_seconds", "Celery task runtime in seconds", ["task"]
)

# Domain counters
STATES_EVALUATED = Counter(
    "knotlab_bracket_states_total", "Partial smoothing states produced by bracket state sums"
)
SAMPLES_GENERATED = Counter(
    "knotlab_sequence_samples_total", "Invariant samples generated", ["kind"]
)
PRECISION_FAILURES = Counter(
    "knotlab_precision_failures_total", "Evaluations that failed two-precision certification"
)
RECURSIONS_VERIFIED = Counter(
    "knotlab_recursions_verified_total", "Discovered recursions that passed held-out checks"
)

# Keep per-task start times
_runtime_cache = {}


@worker_process_init.connect
def _start_metrics_server(**_kwargs):
    port = settings.KNOTLAB_METRICS_PORT
    start_http_server(port, addr="0.0.0.0")
    logger.info(f"Prometheus metrics server started on port {port}")


@task_prerun.connect
def _on_prerun(task_id=None, task=None, **_kwargs):
    TASKS_STARTED.labels(task=task.name).inc()
    _runtime_cache[task_id] = time.perf_counter()


@task_postrun.connect
def _on_postrun(task_id=None, task=None, state=None, **_kwargs):
    start = _runtime_cache.pop(task_id, None)
    if start is not None:
        TASK_RUNTIME.labels(task=task.name).observe(time.perf_counter() - start)
    if state != "FAILURE":
        TASKS_SUCCEEDED.labels(task=task.name).inc()


@task_failure.connect
def _on_failure(task_id=None, exception=None, sender=None, **_kwargs):
    name = getattr(sender, "name", "unknown")
    TASKS_FAILED.labels(task=name).inc()
    logger.warning(f"Task {name} [{task_id}] failed: {exception}")
