"""
audit: per-group rates, fairness verdicts and theorem conditions of a decision dataset
"""
from pathlib import Path

from django.core.management.base import CommandError

from fairness_audit.domain import ColumnRoles, Criterion
from fairness_audit.exceptions import ParityLensError
from fairness_audit.services.dataset_service import DatasetService
from fairness_audit.services.report_service import ReportService

from ._report import EXIT_ERROR, ReportCommand, split_names


class Command(ReportCommand):
    help = 'Audit a decision dataset against every fairness criterion'

    def add_arguments(self, parser):
        parser.add_argument('input', help='Dataset file: CSV with a header row, or the JSON dataset format')
        parser.add_argument('--sensitive', action='append', help='Sensitive column(s), comma-separated or repeated')
        parser.add_argument('--permissible', action='append', help='Permissible column(s), comma-separated or repeated')
        parser.add_argument('--outcome', help='Outcome column (0/1)')
        parser.add_argument('--decision', help='Decision column (0/1)')
        parser.add_argument('--weight', help='Optional column holding record multiplicity')
        parser.add_argument(
            '--criteria',
            help='Comma-separated criteria the exit code depends on (default: all), e.g. erb,dp',
        )
        parser.add_argument(
            '--tolerance',
            type=float,
            help='Compare rates as floats within this tolerance instead of exactly',
        )
        super().add_arguments(parser)

    def _criteria(self, text):
        if not text:
            return tuple(Criterion)
        try:
            return tuple(Criterion.parse(name) for name in text.split(',') if name.strip())
        except ValueError as e:
            raise CommandError(f"Error: unknown criterion in --criteria: {e}", returncode=EXIT_ERROR) from None

    def run(self, **options):
        path = options['input']
        roles = None
        if Path(path).suffix.lower() != '.json':
            roles = ColumnRoles(
                sensitive=split_names(options['sensitive']),
                permissible=split_names(options['permissible']),
                outcome=self.require(options, 'outcome', '--outcome'),
                decision=self.require(options, 'decision', '--decision'),
                weight=options['weight'],
            )
        tolerance = options['tolerance']
        if tolerance is not None and tolerance < 0:
            raise CommandError('Error: --tolerance must not be negative', returncode=EXIT_ERROR)
        requested = self._criteria(options['criteria'])

        try:
            dataset = DatasetService.ingest(path, roles)
        except ParityLensError as e:
            raise CommandError(f"{path}: {e.message}", returncode=EXIT_ERROR) from e

        report = ReportService.build_audit_report(dataset, requested, tolerance)
        self.emit(report, ReportService.render_audit(report))

        if not report.all_satisfied:
            violated = [
                verdict.criterion
                for verdict in report.verdicts
                if verdict.criterion in report.requested_criteria and not verdict.satisfied
            ]
            self.violated(f"criteria violated: {', '.join(violated)}")
