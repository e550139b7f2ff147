"""
sd-simulate: seeded synthetic applicant pool drawn from a scenario and policy
"""
from pathlib import Path

from fairness_audit.exceptions import ScenarioError
from fairness_audit.services.dataset_service import DatasetService
from fairness_audit.services.hiring_model_service import HiringModelService
from fairness_audit.services.report_service import ReportService
from fairness_audit.services.simulation_service import SimulationService
from fairness_audit.tasks import run_simulation_task

from ._report import ReportCommand
from .sd_rates import add_scenario_arguments


class Command(ReportCommand):
    help = 'Simulate applicants, scores and hiring decisions and compare with the closed forms'

    def add_arguments(self, parser):
        add_scenario_arguments(parser)
        parser.add_argument('--n', type=int, help='Number of applicants to draw')
        parser.add_argument('--seed', type=int, default=0, help='Random seed (default 0)')
        parser.add_argument('--out', help='Write the dataset to this file (.json or .csv)')
        parser.add_argument('--threads', type=int, help='Worker threads (default PARITYLENS_THREADS)')
        parser.add_argument('--background', action='store_true', help='Run as a Celery job and print its id')
        super().add_arguments(parser)

    def run(self, **options):
        n = self.require(options, 'n', '--n')
        if n < 1:
            raise ScenarioError('n', f"must be at least 1, got {n}")
        loaded = HiringModelService.load_scenario_file(options['scenario'])
        policy = HiringModelService.resolve_policy(loaded, options['d_m'], options['d_f'])
        female_share = HiringModelService.resolve_female_share(loaded, options['female_share'])

        if options['background']:
            parameters = {
                'scenario': str(Path(options['scenario']).resolve()),
                'n': n,
                'seed': options['seed'],
                'out': str(Path(options['out']).resolve()) if options['out'] else None,
                'd_m': options['d_m'],
                'd_f': options['d_f'],
                'female_share': options['female_share'],
                'threads': options['threads'],
            }
            self.queue_job('simulate', parameters, run_simulation_task)
            return

        dataset = SimulationService.simulate(
            loaded.scenario,
            policy,
            n=n,
            seed=options['seed'],
            female_share=female_share,
            threads=options['threads'],
        )
        output = options['out']
        if output:
            if Path(output).suffix.lower() == '.json':
                DatasetService.write_json(dataset, output)
            else:
                DatasetService.write_csv(dataset, output)

        rates = HiringModelService.model_rates(loaded.scenario, policy)
        report = ReportService.simulation_report(dataset, options['seed'], rates, output)
        self.emit(report, ReportService.render_simulation(report))
