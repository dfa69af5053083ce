"""
Django settings for the knotlab project.

Everything tunable is read from the environment (a local .env file is
honoured). The project has no web surface; Django provides configuration,
the knot-table database and the management-command CLI.
"""
import os
from dotenv import load_dotenv
from pathlib import Path

# Load .env file
load_dotenv()

# Build base directory path
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv("DJANGO_SECRET_KEY", "knotlab-local-secret")

DEBUG = os.getenv("DJANGO_DEBUG", "False").lower() in ["true", "1", "yes"]

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "rest_framework",
    "lab",
]

MIDDLEWARE = []


# Database

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": os.getenv("KNOTLAB_DB_PATH", str(BASE_DIR / "data" / "db.sqlite3")),
    }
}

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Numerics

# Working precision in decimal digits; RunConfig rejects anything below 32.
KNOTLAB_DEFAULT_DIGITS = int(os.getenv("KNOTLAB_DEFAULT_DIGITS", "64"))
KNOTLAB_MIN_DIGITS = 32

# State sums enumerate 2^c smoothings in the worst case.
KNOTLAB_MAX_CROSSINGS = int(os.getenv("KNOTLAB_MAX_CROSSINGS", "24"))

KNOTLAB_TABLE_PATH = Path(
    os.getenv("KNOTLAB_TABLE_PATH", str(BASE_DIR / "lab" / "data" / "knot_table.json"))
)

# Fan sequence generation out to Celery workers instead of running in-process
KNOTLAB_PARALLEL = os.getenv("KNOTLAB_PARALLEL", "False").lower() in ["true", "1", "yes"]

KNOTLAB_SLOW_TESTS = os.getenv("KNOTLAB_SLOW_TESTS", "False").lower() in ["true", "1", "yes"]

# Prometheus exporter started by each worker process
KNOTLAB_METRICS_PORT = int(os.getenv("KNOTLAB_METRICS_PORT", "9091"))


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'default': {
            'format': '[{asctime}] {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'default',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'INFO',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
        'lab': {
            'handlers': ['console'],
            'level': os.getenv("KNOTLAB_LOG_LEVEL", "DEBUG"),
            'propagate': False,
        },
    },
}

CELERY_BROKER_URL = os.getenv("CELERY_BROKER_URL", 'redis://localhost:6379/0')
CELERY_RESULT_BACKEND = os.getenv("CELERY_RESULT_BACKEND", 'redis://localhost:6379/0')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = 'UTC'
CELERY_TASK_ALWAYS_EAGER = os.getenv("CELERY_TASK_ALWAYS_EAGER", "False").lower() in ["true", "1", "yes"]
CELERY_TASK_EAGER_PROPAGATES = True
