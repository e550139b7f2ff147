"""
Shared plumbing for the paritylens commands: --json output, error translation and exit codes
"""
import logging
import sys
from functools import partial

from django.core.management.base import BaseCommand, CommandError

from fairness_audit.exceptions import ParityLensError
from fairness_audit.models import AnalysisJob
from fairness_audit.services.report_service import ReportService

logger = logging.getLogger(__name__)

EXIT_ERROR = 1
EXIT_VIOLATED = 2


def split_names(values) -> tuple[str, ...]:
    """Flatten repeated and comma-separated column options"""
    return tuple(name.strip() for value in values or () for name in value.split(',') if name.strip())


class ReportCommand(BaseCommand):
    """
    Base for commands that print one report

    Subclasses implement run(**options) and publish their result with emit().
    Domain errors exit with 1, violated criteria with 2.
    """

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = partial(self._usage_error, parser)
        return parser

    @staticmethod
    def _usage_error(parser, message):
        if parser.called_from_command_line:
            parser.print_usage(sys.stderr)
            parser.exit(EXIT_ERROR, f"{parser.prog}: error: {message}\n")
        raise CommandError(f"Error: {message}", returncode=EXIT_ERROR)

    def add_arguments(self, parser):
        parser.add_argument(
            '--json',
            action='store_true',
            dest='json_output',
            help='Write the JSON report to stdout and the text report to stderr',
        )

    def handle(self, *args, **options):
        self.json_output = options['json_output']
        self.verbosity = options['verbosity']
        try:
            self.run(**options)
        except ParityLensError as e:
            logger.debug(f"{self.__module__} rejected its input: {e.message}")
            raise CommandError(e.message, returncode=EXIT_ERROR) from e

    def run(self, **options):
        raise NotImplementedError('subclasses of ReportCommand must provide a run() method')

    def emit(self, report, text: str):
        if self.json_output:
            self.stdout.write(report.model_dump_json(indent=2))
            self.stderr.write(text, style_func=lambda message: message)
        else:
            self.stdout.write(text)

    def progress(self, message: str):
        if self.verbosity >= 2:
            self.stderr.write(message, style_func=lambda text: text)

    def require(self, options, name: str, flag: str):
        if options.get(name) is None:
            raise CommandError(f"Error: the {flag} option is required", returncode=EXIT_ERROR)
        return options[name]

    def violated(self, message: str):
        raise CommandError(message, returncode=EXIT_VIOLATED)

    def queue_job(self, kind: str, parameters: dict, task):
        """Record an AnalysisJob and hand it to the Celery worker"""
        job = AnalysisJob.objects.create(kind=kind, parameters=parameters)
        task.delay(str(job.job_id))
        logger.info(f"Queued {kind} job {job.job_id}")
        report = ReportService.job_status(job)
        self.emit(report, ReportService.render_job_status(report))
