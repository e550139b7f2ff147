"""
sd-optimal: threshold, posterior beliefs and the employer's optimal hiring rule
"""
from fairness_audit.services.fairness_service import FairnessService
from fairness_audit.services.hiring_model_service import HiringModelService
from fairness_audit.services.report_service import ReportService

from ._report import ReportCommand
from .sd_rates import add_scenario_arguments


class Command(ReportCommand):
    help = "Optimal threshold rule for a scenario and the fairness criteria it satisfies"

    def add_arguments(self, parser):
        add_scenario_arguments(parser, policy=False)
        super().add_arguments(parser)

    def run(self, **options):
        loaded = HiringModelService.load_scenario_file(options['scenario'])
        female_share = HiringModelService.resolve_female_share(loaded, options['female_share'])
        scenario = loaded.scenario

        threshold = HiringModelService.optimal_threshold(scenario.payoffs)
        beliefs = HiringModelService.posterior_table(scenario)
        rule = HiringModelService.optimal_decision_rule(beliefs, scenario.payoffs)
        policy = HiringModelService.optimal_policy(scenario)
        verdicts = FairnessService.check_all(HiringModelService.model_joint(scenario, policy, female_share))

        report = ReportService.optimal_report(scenario, threshold, beliefs, policy, rule, verdicts)
        self.emit(report, ReportService.render_optimal(report))
