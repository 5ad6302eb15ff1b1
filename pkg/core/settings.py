"""
Django settings for the braided geometry project.

Engine tunables (truncation order, sample counts, probe counts) are read
here and passed explicitly into the geometry engine by the verification app.
"""

from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config(
    "SECRET_KEY",
    default="django-insecure-7w!v1q2x$geometry-dev-key-only-for-local-runs^k3m",
)

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = config("DEBUG", default=True, cast=bool)

ALLOWED_HOSTS = ["*"]


# Application definition

INSTALLED_APPS = [
    "django.contrib.admin",
    "django.contrib.auth",
    "django.contrib.contenttypes",
    "django.contrib.sessions",
    "django.contrib.messages",
    "django.contrib.staticfiles",
    # 3rd party apps
    "rest_framework",
    "drf_yasg",
    "django_celery_beat",
    # local apps
    "geometry",
    "verification",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.contrib.sessions.middleware.SessionMiddleware",
    "django.middleware.common.CommonMiddleware",
    "django.middleware.csrf.CsrfViewMiddleware",
    "django.contrib.auth.middleware.AuthenticationMiddleware",
    "django.contrib.messages.middleware.MessageMiddleware",
    "django.middleware.clickjacking.XFrameOptionsMiddleware",
]

ROOT_URLCONF = "core.urls"

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "context_processors": [
                "django.template.context_processors.debug",
                "django.template.context_processors.request",
                "django.contrib.auth.context_processors.auth",
                "django.contrib.messages.context_processors.messages",
            ],
        },
    },
]

WSGI_APPLICATION = "core.wsgi.application"


# Database
# SQLite unless DB_ENGINE points at PostgreSQL.

DB_ENGINE = config("DB_ENGINE", default="django.db.backends.sqlite3")

if DB_ENGINE == "django.db.backends.sqlite3":
    DATABASES = {
        "default": {
            "ENGINE": DB_ENGINE,
            "NAME": config("DB_NAME", default=str(BASE_DIR / "db.sqlite3")),
        }
    }
else:
    DATABASES = {
        "default": {
            "ENGINE": DB_ENGINE,
            "NAME": config("DB_NAME"),
            "USER": config("DB_USER"),
            "PASSWORD": config("DB_PASSWORD"),
            "HOST": config("DB_HOST"),
            "PORT": config("DB_PORT", default=5432),
        }
    }

AUTH_PASSWORD_VALIDATORS = [
    {
        "NAME": "django.contrib.auth.password_validation.UserAttributeSimilarityValidator",
    },
    {
        "NAME": "django.contrib.auth.password_validation.MinimumLengthValidator",
    },
    {
        "NAME": "django.contrib.auth.password_validation.CommonPasswordValidator",
    },
    {
        "NAME": "django.contrib.auth.password_validation.NumericPasswordValidator",
    },
]


LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = True

USE_TZ = True


STATIC_URL = "static/"

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Geometry engine

GEOMETRY_DIR = Path(config("GEOMETRY_DIR", default=str(BASE_DIR / "geometry" / "geometries")))
GEOMETRY_DEFAULT_ORDER = config("GEOMETRY_DEFAULT_ORDER", default=2, cast=int)
GEOMETRY_DEFAULT_SEED = config("GEOMETRY_DEFAULT_SEED", default=0, cast=int)
GEOMETRY_SUITE_SAMPLES = config("GEOMETRY_SUITE_SAMPLES", default=50, cast=int)
GEOMETRY_CONNECTION_SAMPLES = config("GEOMETRY_CONNECTION_SAMPLES", default=4, cast=int)
GEOMETRY_DEGREE_BOUND = config("GEOMETRY_DEGREE_BOUND", default=2, cast=int)
GEOMETRY_UNIQUENESS_PROBES = config("GEOMETRY_UNIQUENESS_PROBES", default=20, cast=int)
GEOMETRY_ASYNC_CHECKS = config("GEOMETRY_ASYNC_CHECKS", default=False, cast=bool)


# Logging

LOG_LEVEL = config("LOG_LEVEL", default="INFO")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{asctime} {levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "loggers": {
        "geometry": {"handlers": ["console"], "level": LOG_LEVEL, "propagate": False},
        "verification": {"handlers": ["console"], "level": LOG_LEVEL, "propagate": False},
    },
}


CELERY_TIMEZONE = "UTC"
CELERY_TASK_TRACK_STARTED = True
CELERY_TASK_TIME_LIMIT = 30 * 60
CELERY_BROKER_URL = config("CELERY_BROKER_URL", default="redis://localhost:6379")
CELERY_RESULT_BACKEND = config("CELERY_RESULT_BACKEND", default="redis://localhost:6379")

from celery.schedules import crontab

CELERY_BEAT_SCHEDULE = {
    "verify-shipped-geometries": {
        "task": "verification.tasks.verify_shipped_geometries",
        "schedule": crontab(minute=0, hour=3),  # Nightly regression over the shipped .geo files
    },
}
