import multiprocessing
import os

bind = f"0.0.0.0:{os.getenv('PORT', '8000')}"
# Decoding is CPU bound numpy work; threads add little.
workers = int(os.getenv("WEB_CONCURRENCY", multiprocessing.cpu_count() + 1))
worker_class = "sync"
timeout = int(os.getenv("GUNICORN_TIMEOUT", "60"))
preload_app = True
accesslog = "-"  # stdout
errorlog = "-"  # stderr
loglevel = os.getenv("POLAR_LOG_LEVEL", "info").lower()
