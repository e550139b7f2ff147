"""
sd-feasible: which (d_m, d_f) policies satisfy a fairness goal in a scenario
"""
from django.core.management.base import CommandError

from fairness_audit.domain import Criterion
from fairness_audit.services.feasibility_service import FeasibilityService
from fairness_audit.services.hiring_model_service import HiringModelService
from fairness_audit.services.report_service import ReportService

from ._report import EXIT_ERROR, ReportCommand


class Command(ReportCommand):
    help = 'Search the (d_m, d_f) policy square for policies meeting a fairness goal'

    def add_arguments(self, parser):
        parser.add_argument('scenario', help='Scenario file (JSON or key = value lines)')
        parser.add_argument('--goal', help='Criterion to satisfy: erb, ppv, npv, pp, tpr, tnr, dp, ac, cdp')
        parser.add_argument('--grid', type=int, default=101, help='Grid points per axis (default 101)')
        parser.add_argument('--tolerance', type=float, help='Gap accepted after bisection (default 1e-9)')
        super().add_arguments(parser)

    def run(self, **options):
        try:
            goal = Criterion.parse(self.require(options, 'goal', '--goal'))
        except ValueError:
            raise CommandError(f"Error: unknown goal {options['goal']!r}", returncode=EXIT_ERROR) from None

        loaded = HiringModelService.load_scenario_file(options['scenario'])
        feasible = FeasibilityService.feasibility_search(
            loaded.scenario,
            goal,
            grid=options['grid'],
            tolerance=options['tolerance'],
        )
        report = ReportService.feasible_set(feasible)
        self.emit(report, ReportService.render_feasible_set(report))
