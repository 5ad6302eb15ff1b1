import logging

from celery import shared_task
from django.conf import settings
from django.utils import timezone

from geometry.exceptions import GeometryError
from geometry.loader import shipped_geometries
from .models import GeometryRun
from . import pipeline

logger = logging.getLogger(__name__)


@shared_task
def run_check_suite(run_id):
    """
    Execute a recorded check run and store its report.

    The run moves pending -> running -> passed | failed | error. Spec and
    engine errors end in "error" with the message stored on the run.

    Returns:
        dict: Summary of the run
    """
    try:
        run = GeometryRun.objects.get(id=run_id)
    except GeometryRun.DoesNotExist:
        logger.warning("run %s vanished before execution", run_id)
        return {"task": "run_check_suite", "run_id": run_id, "status": "missing"}

    run.status = "running"
    run.save(update_fields=["status"])
    try:
        spec = pipeline.load(run.geometry)
        report = pipeline.run_check(spec, suite=run.suite, seed=run.seed)
        run.spec_hash = spec.digest
        run.report = report
        run.status = "passed" if report["ok"] else "failed"
    except (GeometryError, FileNotFoundError) as e:
        logger.warning("run %s failed with %s", run_id, e)
        run.status = "error"
        run.error = str(e)
    run.finished_at = timezone.now()
    run.save()

    return {
        "task": "run_check_suite",
        "timestamp": timezone.now().isoformat(),
        "run_id": run.id,
        "geometry": run.geometry,
        "status": run.status,
    }


@shared_task
def verify_shipped_geometries():
    """
    Nightly regression: run the full check suite on every shipped geometry.

    Returns:
        dict: Summary of passed, failed and errored geometries
    """
    outcome = {"passed": [], "failed": [], "error": []}
    for name in shipped_geometries(settings.GEOMETRY_DIR):
        try:
            seed = pipeline.default_seed(pipeline.load(name))
        except (GeometryError, FileNotFoundError):
            seed = settings.GEOMETRY_DEFAULT_SEED
        run = GeometryRun.objects.create(geometry=name, suite="all", seed=seed)
        summary = run_check_suite(run.id)
        outcome.setdefault(summary["status"], []).append(name)

    return {
        "task": "verify_shipped_geometries",
        "timestamp": timezone.now().isoformat(),
        "passed": outcome["passed"],
        "failed": outcome["failed"],
        "errors": outcome["error"],
        "total_geometries": sum(len(names) for names in outcome.values()),
    }
