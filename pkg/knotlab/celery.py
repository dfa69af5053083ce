import os
from celery import Celery


os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'knotlab.settings')

app = Celery('knotlab')

# Load settings from Django
app.config_from_object('django.conf:settings', namespace='CELERY')

# Auto-discover tasks in all installed apps
app.autodiscover_tasks()

import lab.metrics  # noqa: E402,F401  registers the worker signal handlers
