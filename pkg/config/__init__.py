# Load the Celery app with Django so simulate_chunk registers on it.
from .celery import app as celery_app

__all__ = ("celery_app",)
