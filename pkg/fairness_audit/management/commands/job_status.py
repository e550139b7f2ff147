"""
job-status: progress and result of a background analysis job
"""
from django.core.exceptions import ValidationError
from django.core.management.base import CommandError

from fairness_audit.models import AnalysisJob
from fairness_audit.services.report_service import ReportService

from ._report import EXIT_ERROR, ReportCommand


class Command(ReportCommand):
    help = 'Show the status of a job started with --background'

    def add_arguments(self, parser):
        parser.add_argument('job_id', help='Job id printed when the job was queued')
        super().add_arguments(parser)

    def run(self, **options):
        try:
            job = AnalysisJob.objects.get(job_id=options['job_id'])
        except (AnalysisJob.DoesNotExist, ValidationError):
            raise CommandError(f"Job not found: {options['job_id']}", returncode=EXIT_ERROR) from None

        report = ReportService.job_status(job)
        self.emit(report, ReportService.render_job_status(report))
