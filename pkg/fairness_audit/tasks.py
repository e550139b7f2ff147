"""
Celery tasks for background processing
"""
import logging
from pathlib import Path

from celery import shared_task

from fairness_audit.domain import EnumerationBounds
from fairness_audit.exceptions import ParityLensError
from fairness_audit.models import AnalysisJob
from fairness_audit.services.dataset_service import DatasetService
from fairness_audit.services.hiring_model_service import HiringModelService
from fairness_audit.services.impossibility_service import ImpossibilityService
from fairness_audit.services.report_service import ReportService
from fairness_audit.services.simulation_service import SimulationService

logger = logging.getLogger(__name__)


def _load_job(job_id: str):
    try:
        return AnalysisJob.objects.get(job_id=job_id)
    except AnalysisJob.DoesNotExist:
        logger.error(f"Job {job_id} not found")
        return None


def _fail(task, job: AnalysisJob, error: Exception):
    """Domain errors fail the job for good; anything else is retried"""
    if isinstance(error, ParityLensError):
        logger.warning(f"Job {job.job_id} rejected: {error.message}")
        job.mark_failed(error.message)
        return {"error": error.message}

    error_msg = f"Task failed: {str(error)}"
    logger.error(f"Job {job.job_id} failed with error: {error_msg}", exc_info=True)
    try:
        job.mark_failed(error_msg)
    except Exception as update_error:
        logger.error(f"Failed to update job status: {update_error}")

    # Retry the task if it hasn't exceeded max retries
    raise task.retry(exc=error, countdown=60)


@shared_task(bind=True, max_retries=3)
def run_impossibility_verification_task(self, job_id: str):
    """
    Background task enumerating (distribution, algorithm) pairs of the theorem grid

    Args:
        job_id: UUID of the AnalysisJob; its parameters hold x_arity, mass_denominator,
            prob_denominator and optionally threads

    Progress stages:
        0% - Task started
        5% - Bounds validated
        5-95% - One step per progress interval of mass vectors
        100% - Completed
    """
    job = _load_job(job_id)
    if job is None:
        return {"error": f"Job {job_id} not found"}

    try:
        job.start_processing()
        logger.info(f"Starting impossibility verification for job {job_id}")
        parameters = job.parameters
        bounds = EnumerationBounds(
            x_arity=parameters.get('x_arity', 2),
            mass_denominator=parameters.get('mass_denominator', 4),
            prob_denominator=parameters.get('prob_denominator', 2),
        )
        job.update_progress(5)

        def report_progress(done: int, total: int):
            job.update_progress(5 + int(90 * done / total))

        summary = ImpossibilityService.enumerate_verify(
            bounds,
            threads=parameters.get('threads'),
            progress_callback=report_progress,
        )
        result = ReportService.verification_summary(summary).model_dump(mode='json')
        job.mark_completed(result)
        logger.info(f"Impossibility verification completed for job {job_id}")
        return {
            "status": "success",
            "job_id": str(job_id),
            "counterexamples": len(summary.counterexamples),
        }
    except Exception as e:
        return _fail(self, job, e)


@shared_task(bind=True, max_retries=3)
def run_simulation_task(self, job_id: str):
    """
    Background task drawing a synthetic applicant pool from a scenario file

    Args:
        job_id: UUID of the AnalysisJob; its parameters hold scenario, n, seed and
            optionally out, d_m, d_f, female_share and threads
    """
    job = _load_job(job_id)
    if job is None:
        return {"error": f"Job {job_id} not found"}

    try:
        job.start_processing()
        logger.info(f"Starting simulation for job {job_id}")
        parameters = job.parameters
        loaded = HiringModelService.load_scenario_file(parameters['scenario'])
        policy = HiringModelService.resolve_policy(loaded, parameters.get('d_m'), parameters.get('d_f'))
        female_share = HiringModelService.resolve_female_share(loaded, parameters.get('female_share'))
        job.update_progress(10)

        dataset = SimulationService.simulate(
            loaded.scenario,
            policy,
            n=parameters['n'],
            seed=parameters.get('seed', 0),
            female_share=female_share,
            threads=parameters.get('threads'),
        )
        job.update_progress(80)

        output = parameters.get('out')
        if output:
            if Path(output).suffix.lower() == '.json':
                DatasetService.write_json(dataset, output)
            else:
                DatasetService.write_csv(dataset, output)
        job.update_progress(90)

        rates = HiringModelService.model_rates(loaded.scenario, policy)
        report = ReportService.simulation_report(dataset, parameters.get('seed', 0), rates, output)
        job.mark_completed(report.model_dump(mode='json'))
        logger.info(f"Simulation completed for job {job_id}")
        return {"status": "success", "job_id": str(job_id)}
    except Exception as e:
        return _fail(self, job, e)
