"""
Django settings for the paritylens project.

The project has no HTTP surface: Django provides configuration, the ORM used for
background analysis jobs, management commands and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables from .env file
load_dotenv(BASE_DIR / '.env')


SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'paritylens-local-only-not-a-secret')

DEBUG = os.getenv('DJANGO_DEBUG', 'false').lower() == 'true'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'fairness_audit',
]

MIDDLEWARE = []


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# paritylens configuration
PARITYLENS_VERSION = '1.0.0'

# Worker cap for enumeration and simulation pools
PARITYLENS_THREADS = max(1, int(os.getenv('PARITYLENS_THREADS', os.cpu_count() or 1)))

# Float-mode tolerance for verdicts and bisection refinement
PARITYLENS_FLOAT_TOLERANCE = float(os.getenv('PARITYLENS_FLOAT_TOLERANCE', '1e-9'))
PARITYLENS_BISECTION_ITERATIONS = 60

# Impossibility enumeration
PARITYLENS_PROGRESS_INTERVAL = 10_000
PARITYLENS_MAX_ENUMERATION_PAIRS = int(os.getenv('PARITYLENS_MAX_ENUMERATION_PAIRS', '2000000'))

# Simulation chunks are fixed-size so output does not depend on the worker count
PARITYLENS_SIMULATION_CHUNK_SIZE = 250_000
PARITYLENS_DEFAULT_FEMALE_SHARE = '1/2'


# Celery Configuration
CELERY_BROKER_URL = os.getenv('CELERY_BROKER_URL', 'redis://localhost:6379/0')
CELERY_RESULT_BACKEND = os.getenv('CELERY_RESULT_BACKEND', 'redis://localhost:6379/0')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = TIME_ZONE
CELERY_TASK_TRACK_STARTED = True
CELERY_TASK_TIME_LIMIT = 60 * 60  # 1 hour


# Logging Configuration
LOG_DIR = BASE_DIR / 'logs'
LOG_DIR.mkdir(exist_ok=True)

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
            'level': os.getenv('PARITYLENS_LOG_LEVEL', 'WARNING'),
        },
        'file': {
            'class': 'logging.FileHandler',
            'filename': LOG_DIR / 'paritylens.log',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'INFO',
        },
        'fairness_audit': {
            'handlers': ['console', 'file'],
            'level': 'DEBUG',
            'propagate': False,
        },
    },
}
