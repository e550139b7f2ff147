"""
verify-impossibility: exhaustive check of the fairness impossibility theorem on a finite grid
"""
from fairness_audit.domain import EnumerationBounds
from fairness_audit.services.impossibility_service import ImpossibilityService
from fairness_audit.services.report_service import ReportService
from fairness_audit.tasks import run_impossibility_verification_task

from ._report import ReportCommand


class Command(ReportCommand):
    help = 'Enumerate small distributions and algorithms and report any counterexample to the theorem'

    def add_arguments(self, parser):
        parser.add_argument('--x-arity', dest='x_arity', type=int, default=2, help='Permissible values (default 2)')
        parser.add_argument(
            '--mass-denominator',
            dest='mass_denominator',
            type=int,
            default=4,
            help='Largest denominator of the enumerated masses (default 4)',
        )
        parser.add_argument(
            '--prob-denominator',
            dest='prob_denominator',
            type=int,
            default=2,
            help='Largest denominator of the enumerated hire probabilities (default 2)',
        )
        parser.add_argument('--threads', type=int, help='Worker threads (default PARITYLENS_THREADS)')
        parser.add_argument('--background', action='store_true', help='Run as a Celery job and print its id')
        super().add_arguments(parser)

    def run(self, **options):
        bounds = EnumerationBounds(
            x_arity=options['x_arity'],
            mass_denominator=options['mass_denominator'],
            prob_denominator=options['prob_denominator'],
        )
        if options['background']:
            parameters = {
                'x_arity': bounds.x_arity,
                'mass_denominator': bounds.mass_denominator,
                'prob_denominator': bounds.prob_denominator,
                'threads': options['threads'],
            }
            self.queue_job('verify_impossibility', parameters, run_impossibility_verification_task)
            return

        summary = ImpossibilityService.enumerate_verify(
            bounds,
            threads=options['threads'],
            progress_callback=lambda done, total: self.progress(f"{done}/{total} mass vectors"),
        )
        report = ReportService.verification_summary(summary)
        self.emit(report, ReportService.render_verification(report))

        if report.counterexamples:
            self.violated(f"{len(report.counterexamples)} counterexample(s) found")
