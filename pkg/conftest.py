"""Wire the Django test environment for pytest, as `manage.py test` does."""
import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "knotlab.settings")
# Tests run without a broker: execute Celery tasks in-process (read by settings).
os.environ.setdefault("CELERY_TASK_ALWAYS_EAGER", "True")
django.setup()

from django.test.runner import DiscoverRunner  # noqa: E402

_runner = DiscoverRunner(verbosity=0, interactive=False)
_state = {}


def pytest_sessionstart(session):
    _runner.setup_test_environment()
    _state["old_config"] = _runner.setup_databases()


def pytest_sessionfinish(session, exitstatus):
    if "old_config" in _state:
        _runner.teardown_databases(_state["old_config"])
        _runner.teardown_test_environment()
