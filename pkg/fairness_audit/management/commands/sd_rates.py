"""
sd-rates: closed-form PPV/NPV/TPR/TNR of a hiring policy in a scenario
"""
from fairness_audit.services.fairness_service import FairnessService
from fairness_audit.services.hiring_model_service import HiringModelService
from fairness_audit.services.report_service import ReportService

from ._report import ReportCommand


def add_scenario_arguments(parser, policy: bool = True):
    parser.add_argument('scenario', help='Scenario file (JSON or key = value lines)')
    if policy:
        parser.add_argument('--d-m', dest='d_m', help="Men's hire probability at the muddled score, e.g. 1/2")
        parser.add_argument('--d-f', dest='d_f', help="Women's hire probability at the muddled score")
    parser.add_argument('--female-share', dest='female_share', help='Share of women among applicants (default 1/2)')


class Command(ReportCommand):
    help = 'Closed-form rates and fairness verdicts of a hiring policy'

    def add_arguments(self, parser):
        add_scenario_arguments(parser)
        super().add_arguments(parser)

    def run(self, **options):
        loaded = HiringModelService.load_scenario_file(options['scenario'])
        policy = HiringModelService.resolve_policy(loaded, options['d_m'], options['d_f'])
        female_share = HiringModelService.resolve_female_share(loaded, options['female_share'])

        rates = HiringModelService.model_rates(loaded.scenario, policy)
        verdicts = FairnessService.check_all(HiringModelService.model_joint(loaded.scenario, policy, female_share))
        report = ReportService.model_rates_report(loaded.scenario, policy, rates, verdicts)
        self.emit(report, ReportService.render_model_rates(report))
