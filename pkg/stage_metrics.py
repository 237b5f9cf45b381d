"""
Timing metrics for pipeline stages.

Each tracked stage logs its duration and feeds a Prometheus histogram kept in a
module registry; batch runs can dump that registry next to their artifacts.
"""
from functools import wraps
import time

from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile

from logger_config import logger

registry = CollectorRegistry()

STAGE_DURATION = Histogram(
    "susy_stage_duration_seconds",
    "Wall time spent in a pipeline stage",
    ["stage"],
    registry=registry,
)

STAGE_FAILURES = Counter(
    "susy_stage_failures_total",
    "Pipeline stages that raised",
    ["stage"],
    registry=registry,
)


def track_stage(func=None, stage_name=None):
    """Decorator to track stage duration and failures"""
    def decorator(f):
        @wraps(f)
        def wrapper(*args, **kwargs):
            start_time = time.time()
            stage = stage_name or f.__name__

            try:
                result = f(*args, **kwargs)

                duration = time.time() - start_time
                STAGE_DURATION.labels(stage=stage).observe(duration)
                logger.info(
                    "stage_completed",
                    stage=stage,
                    duration_seconds=duration,
                    status="success"
                )

                return result
            except Exception as e:
                duration = time.time() - start_time
                STAGE_FAILURES.labels(stage=stage).inc()
                logger.error(
                    "stage_failed",
                    stage=stage,
                    duration_seconds=duration,
                    status="error",
                    error=str(e)
                )
                raise

        return wrapper

    # Handle both @track_stage and @track_stage(stage_name="...")
    if func is None:
        return decorator
    return decorator(func)


def write_metrics(path: str) -> None:
    """Write the stage registry in Prometheus text format"""
    write_to_textfile(path, registry)
    logger.info("metrics_written", path=path)
