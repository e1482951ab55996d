from .base import *  # noqa

DEBUG = True

# Celery: run simulation shards eagerly (in-process) without a broker
CELERY_TASK_ALWAYS_EAGER = True
CELERY_TASK_EAGER_PROPAGATES = True
