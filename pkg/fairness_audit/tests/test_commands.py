import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest.mock import patch

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from fairness_audit.models import AnalysisJob

from . import SAMPLE_DATA

WORKED_EXAMPLE = str(SAMPLE_DATA / 'optimal_hiring_example.csv')
PERFECT_PREDICTOR = str(SAMPLE_DATA / 'perfect_predictor.csv')
PREVALENCE = str(SAMPLE_DATA / 'prevalence_scenario.json')
PRECISION = str(SAMPLE_DATA / 'precision_scenario.env')
WORKED_EXAMPLE_COLUMNS = {
    'sensitive': ['gender'],
    'permissible': ['score'],
    'outcome': 'qualified',
    'decision': 'hired',
}
PERFECT_PREDICTOR_COLUMNS = {
    'sensitive': ['group'],
    'permissible': ['x'],
    'outcome': 'y',
    'decision': 'delta',
}


def run(*args, **options):
    stdout, stderr = StringIO(), StringIO()
    call_command(*args, stdout=stdout, stderr=stderr, **options)
    return stdout.getvalue(), stderr.getvalue()


class AuditCommandTests(SimpleTestCase):

    def test_worked_example_violates_criteria(self):
        stdout = StringIO()

        with self.assertRaises(CommandError) as caught:
            call_command('audit', WORKED_EXAMPLE, stdout=stdout, **WORKED_EXAMPLE_COLUMNS)

        self.assertEqual(caught.exception.returncode, 2)
        self.assertIn('ERROR_RATE_BALANCE', str(caught.exception))
        self.assertIn('DEMOGRAPHIC_PARITY', str(caught.exception))
        self.assertIn('equal base rates:  yes', stdout.getvalue())

    def test_selected_criteria_decide_the_exit_code(self):
        with self.assertRaises(CommandError) as caught:
            run('audit', WORKED_EXAMPLE, criteria='dp', **WORKED_EXAMPLE_COLUMNS)

        self.assertEqual(caught.exception.returncode, 2)
        self.assertEqual(str(caught.exception), 'criteria violated: DEMOGRAPHIC_PARITY')

    def test_perfect_predictor_passes(self):
        stdout, _ = run('audit', PERFECT_PREDICTOR, **PERFECT_PREDICTOR_COLUMNS)

        self.assertIn('perfect predictor: yes', stdout)
        self.assertNotIn('VIOLATED', stdout)

    def test_json_report(self):
        stdout, stderr = run('audit', PERFECT_PREDICTOR, json_output=True, **PERFECT_PREDICTOR_COLUMNS)

        report = json.loads(stdout)
        self.assertTrue(report['all_satisfied'])
        self.assertEqual(report['mode'], 'exact')
        self.assertEqual(report['dataset']['n'], 6)
        self.assertTrue(report['theorem_conditions']['perfect_predictor'])
        self.assertIn('perfect predictor: yes', stderr)

    def test_json_dataset_needs_no_columns(self):
        stdout = StringIO()

        with self.assertRaises(CommandError):
            call_command('audit', str(SAMPLE_DATA / 'optimal_hiring_example.json'), json_output=True,
                         stdout=stdout, stderr=StringIO())

        report = json.loads(stdout.getvalue())
        self.assertEqual(report['dataset']['n'], 20)
        self.assertFalse(report['all_satisfied'])

    def test_float_mode(self):
        stdout, _ = run('audit', WORKED_EXAMPLE, criteria='dp', tolerance=0.5, **WORKED_EXAMPLE_COLUMNS)

        self.assertIn('mode: float', stdout)

    def test_repeated_runs_are_identical(self):
        first, _ = run('audit', PERFECT_PREDICTOR, json_output=True, **PERFECT_PREDICTOR_COLUMNS)
        second, _ = run('audit', PERFECT_PREDICTOR, json_output=True, **PERFECT_PREDICTOR_COLUMNS)

        self.assertEqual(first, second)

    def test_input_errors(self):
        cases = {
            'missing outcome': {**WORKED_EXAMPLE_COLUMNS, 'outcome': None},
            'unknown criterion': {**WORKED_EXAMPLE_COLUMNS, 'criteria': 'calibration'},
            'negative tolerance': {**WORKED_EXAMPLE_COLUMNS, 'tolerance': -1.0},
            'unknown column': {**WORKED_EXAMPLE_COLUMNS, 'outcome': 'salary'},
        }
        for name, options in cases.items():
            with self.subTest(name):
                with self.assertRaises(CommandError) as caught:
                    run('audit', WORKED_EXAMPLE, **options)
                self.assertEqual(caught.exception.returncode, 1)

    def test_missing_file(self):
        with self.assertRaises(CommandError) as caught:
            run('audit', 'no_such_file.csv', **WORKED_EXAMPLE_COLUMNS)

        self.assertEqual(caught.exception.returncode, 1)
        self.assertIn('no_such_file.csv', str(caught.exception))

    def test_malformed_csv_is_an_input_error(self):
        with tempfile.TemporaryDirectory() as workspace:
            path = Path(workspace) / 'ragged.csv'
            path.write_text('gender,score,qualified,hired\nM,1,1,1\nF,1,0,0,9\n', encoding='utf-8')

            with self.assertRaises(CommandError) as caught:
                run('audit', str(path), **WORKED_EXAMPLE_COLUMNS)

        self.assertEqual(caught.exception.returncode, 1)
        self.assertIn('row 3', str(caught.exception))

    def test_usage_error_exits_with_one(self):
        with self.assertRaises(CommandError) as caught:
            call_command('audit', stdout=StringIO(), stderr=StringIO())

        self.assertEqual(caught.exception.returncode, 1)


class ModelCommandTests(SimpleTestCase):

    def test_rates_of_the_file_policy(self):
        stdout, _ = run('sd_rates', PREVALENCE, json_output=True)

        report = json.loads(stdout)
        self.assertEqual(report['policy']['d_m'], {'num': 1, 'den': 2})
        verdicts = {verdict['criterion']: verdict['satisfied'] for verdict in report['verdicts']}
        self.assertTrue(verdicts['ERROR_RATE_BALANCE'])
        self.assertTrue(verdicts['ANTI_CLASSIFICATION'])

    def test_policy_options_override_the_file(self):
        stdout, _ = run('sd_rates', PREVALENCE, d_m='0', d_f='1', json_output=True)

        verdicts = {verdict['criterion']: verdict['satisfied'] for verdict in json.loads(stdout)['verdicts']}
        self.assertFalse(verdicts['ANTI_CLASSIFICATION'])
        self.assertFalse(verdicts['ERROR_RATE_BALANCE'])

    def test_half_a_policy_is_an_error(self):
        with self.assertRaises(CommandError) as caught:
            run('sd_rates', PREVALENCE, d_m='0')

        self.assertEqual(caught.exception.returncode, 1)

    def test_optimal_threshold(self):
        stdout, _ = run('sd_optimal', PREVALENCE)

        self.assertIn('threshold s̄ = 2/3', stdout)
        self.assertIn('optimal policy: d_m = 0', stdout)

    def test_optimal_report_json(self):
        stdout, _ = run('sd_optimal', PREVALENCE, json_output=True)

        report = json.loads(stdout)
        self.assertEqual(report['threshold'], {'num': 2, 'den': 3})
        self.assertEqual(report['policy']['d_f'], {'num': 1, 'den': 1})

    def test_precision_error_rate_balance_is_infeasible(self):
        stdout, _ = run('sd_feasible', PRECISION, goal='erb')

        self.assertIn('feasible set: empty', stdout)
        self.assertIn('findings: EMPTY', stdout)

    def test_feasible_points_json(self):
        stdout, _ = run('sd_feasible', PREVALENCE, goal='ppv', grid=11, json_output=True)

        report = json.loads(stdout)
        self.assertEqual(report['goal'], 'POS_PRED_PARITY')
        self.assertEqual(len(report['points']), 2)
        self.assertIn('FAVOURS_HIGHER_PREVALENCE', report['findings'])

    def test_feasibility_goal_is_required(self):
        for options in ({}, {'goal': 'calibration'}):
            with self.subTest(options=options):
                with self.assertRaises(CommandError) as caught:
                    run('sd_feasible', PRECISION, **options)
                self.assertEqual(caught.exception.returncode, 1)

    def test_missing_scenario_field(self):
        with tempfile.TemporaryDirectory() as workspace:
            path = Path(workspace) / 'scenario.env'
            path.write_text('variant = PRECISION\np_tilde = 1/2\nphi_m = 3/10\nB = 1\nomega = -2\n')
            with self.assertRaises(CommandError) as caught:
                run('sd_optimal', str(path))

        self.assertEqual(caught.exception.returncode, 1)
        self.assertIn('phi_f', str(caught.exception))


class SimulateCommandTests(SimpleTestCase):

    def test_sample_count_must_be_positive(self):
        with self.assertRaises(CommandError) as caught:
            run('sd_simulate', PREVALENCE, n=0)

        self.assertEqual(caught.exception.returncode, 1)

    def test_fixed_seed_is_reproducible(self):
        first, _ = run('sd_simulate', PRECISION, n=20_000, seed=7, json_output=True)
        second, _ = run('sd_simulate', PRECISION, n=20_000, seed=7, json_output=True)

        self.assertEqual(first, second)
        report = json.loads(first)
        self.assertEqual(report['n'], 20_000)
        self.assertEqual(report['seed'], 7)

    def test_writes_the_dataset(self):
        with tempfile.TemporaryDirectory() as workspace:
            output = Path(workspace) / 'pool.csv'

            stdout, _ = run('sd_simulate', PREVALENCE, n=1_000, seed=3, out=str(output))

            self.assertIn(f"written to {output}", stdout)
            lines = output.read_text().splitlines()
            self.assertEqual(lines[0], 'gender,score,qualified,hired,count')
            self.assertEqual(sum(int(line.split(',')[-1]) for line in lines[1:]), 1_000)


class VerifyCommandTests(SimpleTestCase):

    def test_small_grid_holds(self):
        stdout, _ = run('verify_impossibility', x_arity=1, mass_denominator=2, prob_denominator=2)

        self.assertIn('counterexamples: 0', stdout)
        self.assertIn('theorem holds on this grid', stdout)

    def test_bounds_are_validated(self):
        with self.assertRaises(CommandError) as caught:
            run('verify_impossibility', x_arity=5)

        self.assertEqual(caught.exception.returncode, 1)


class BackgroundCommandTests(TestCase):

    @patch('fairness_audit.management.commands.verify_impossibility.run_impossibility_verification_task.delay')
    def test_verification_is_queued(self, delay):
        stdout, _ = run('verify_impossibility', mass_denominator=3, background=True)

        job = AnalysisJob.objects.get()
        delay.assert_called_once_with(str(job.job_id))
        self.assertEqual(job.kind, 'verify_impossibility')
        self.assertEqual(job.parameters['mass_denominator'], 3)
        self.assertIn('status: pending', stdout)
        self.assertIn(f"manage.py job_status {job.job_id}", stdout)

    @patch('fairness_audit.management.commands.sd_simulate.run_simulation_task.delay')
    def test_simulation_is_queued_with_absolute_paths(self, delay):
        run('sd_simulate', PREVALENCE, n=500, seed=2, out='pool.json', background=True)

        job = AnalysisJob.objects.get()
        delay.assert_called_once_with(str(job.job_id))
        self.assertTrue(Path(job.parameters['scenario']).is_absolute())
        self.assertTrue(Path(job.parameters['out']).is_absolute())
        self.assertEqual(job.parameters['n'], 500)

    def test_job_status(self):
        job = AnalysisJob.objects.create(kind='simulate', parameters={'n': 10})
        job.start_processing()
        job.update_progress(40)

        stdout, _ = run('job_status', str(job.job_id), json_output=True)

        report = json.loads(stdout)
        self.assertEqual(report['status'], 'processing')
        self.assertEqual(report['progress'], 40)

    def test_failed_job_shows_its_error(self):
        job = AnalysisJob.objects.create(kind='simulate')
        job.mark_failed('scenario: file not found')

        stdout, _ = run('job_status', str(job.job_id))

        self.assertIn('status: failed', stdout)
        self.assertIn('error: scenario: file not found', stdout)

    def test_unknown_job(self):
        for job_id in ('3f1c0a52-7d3e-4a59-9a51-0c8f7f6b1d20', 'not-a-uuid'):
            with self.subTest(job_id=job_id):
                with self.assertRaises(CommandError) as caught:
                    run('job_status', job_id)
                self.assertEqual(caught.exception.returncode, 1)
