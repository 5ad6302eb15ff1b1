"""
Celery configuration for the braided geometry project.
"""

import os
from celery import Celery

# Set the default Django settings module for the 'celery' program.
os.environ.setdefault("DJANGO_SETTINGS_MODULE", "core.settings")

app = Celery("braided_geometry")

app.config_from_object("django.conf:settings", namespace="CELERY")

app.autodiscover_tasks()
