from fractions import Fraction
from math import sqrt

import numpy as np
from django.test import SimpleTestCase, override_settings

from fairness_audit.domain import Gender, HiringPolicy
from fairness_audit.exceptions import ScenarioError
from fairness_audit.services.hiring_model_service import HiringModelService
from fairness_audit.services.metrics_service import MetricsService
from fairness_audit.services.simulation_service import SimulationService

from .test_hiring_model_service import precision_scenario, prevalence_scenario

HALF = Fraction(1, 2)
CHECKED_RATES = (
    # rate and the confusion cells of its denominator
    ('tpr', ('tp', 'fn')),
    ('tnr', ('tn', 'fp')),
    ('ppv', ('tp', 'fp')),
    ('npv', ('tn', 'fn')),
)


def empirical_confusions(dataset):
    return {confusion.group[0]: confusion for confusion in MetricsService.confusion_by_group(dataset)}


def random_cases(count, seed):
    """Scenarios and policies with every parameter in [1/5, 4/5]"""
    rng = np.random.default_rng(seed)
    cases = []
    for index in range(count):
        p_one, p_two, phi_one, phi_two, d_m, d_f = (Fraction(int(k), 5) for k in rng.integers(1, 5, size=6))
        if index % 2:
            scenario = precision_scenario(p_one, phi_one, phi_two)
        else:
            scenario = prevalence_scenario(p_one, p_two, phi_one)
        cases.append((scenario, HiringPolicy(d_m, d_f)))
    return cases


class MonteCarloAgreementTests(SimpleTestCase):

    def test_documented_example_within_half_a_percent(self):
        scenario = prevalence_scenario(HALF, HALF, HALF)
        policy = HiringPolicy(HALF, HALF)

        dataset = SimulationService.simulate(scenario, policy, n=1_000_000, seed=42)

        self.assertEqual(dataset.n, 1_000_000)
        expected = HiringModelService.model_rates(scenario, policy)
        for gender, confusion in empirical_confusions(dataset).items():
            bundle = MetricsService.rates(confusion)
            self.assertAlmostEqual(float(expected[Gender(gender)].tpr), 0.75)
            for name, _ in CHECKED_RATES:
                self.assertLessEqual(abs(float(bundle.get(name)) - float(expected[Gender(gender)].get(name))), 0.005)

    def test_random_scenarios_within_three_standard_errors(self):
        for case, (scenario, policy) in enumerate(random_cases(20, seed=2024)):
            expected = HiringModelService.model_rates(scenario, policy)
            dataset = SimulationService.simulate(scenario, policy, n=1_000_000, seed=case)
            for gender, confusion in empirical_confusions(dataset).items():
                bundle = MetricsService.rates(confusion)
                for name, denominator in CHECKED_RATES:
                    with self.subTest(case=case, gender=gender, rate=name):
                        rate = float(expected[Gender(gender)].get(name))
                        count = sum(getattr(confusion, cell) for cell in denominator)
                        standard_error = sqrt(rate * (1 - rate) / count)
                        deviation = abs(float(bundle.get(name)) - rate)
                        self.assertLessEqual(deviation, 3 * standard_error)
                        self.assertLessEqual(deviation, 0.005)


class SimulationBehaviourTests(SimpleTestCase):

    def setUp(self):
        self.scenario = prevalence_scenario(Fraction(3, 10), Fraction(3, 5), HALF)

    def test_single_applicant(self):
        dataset = SimulationService.simulate(self.scenario, HiringPolicy(HALF, HALF), n=1, seed=0)

        self.assertEqual(dataset.n, 1)
        self.assertEqual(len(dataset.records), 1)

    def test_never_hiring_the_muddled_score(self):
        dataset = SimulationService.simulate(self.scenario, HiringPolicy(Fraction(0), Fraction(0)), n=20_000, seed=3)

        for record in dataset.records:
            if record.context == ('2',):
                self.assertEqual(record.decision, 0)
            if record.context == ('3',):
                self.assertEqual(record.decision, 1)
                self.assertEqual(record.outcome, 1)

    def test_sample_count_must_be_positive(self):
        with self.assertRaises(ScenarioError) as caught:
            SimulationService.simulate(self.scenario, HiringPolicy(HALF, HALF), n=0, seed=0)
        self.assertEqual(caught.exception.field, 'n')

    def test_all_women(self):
        dataset = SimulationService.simulate(
            self.scenario, HiringPolicy(HALF, HALF), n=500, seed=1, female_share=Fraction(1)
        )

        self.assertEqual(dataset.groups, (('f',),))

    def test_same_seed_same_pool(self):
        policy = HiringPolicy(Fraction(1, 4), Fraction(3, 4))

        first = SimulationService.simulate(self.scenario, policy, n=5_000, seed=11)
        second = SimulationService.simulate(self.scenario, policy, n=5_000, seed=11)
        other = SimulationService.simulate(self.scenario, policy, n=5_000, seed=12)

        self.assertEqual(first.records, second.records)
        self.assertNotEqual(first.records, other.records)

    @override_settings(PARITYLENS_SIMULATION_CHUNK_SIZE=1_000)
    def test_worker_count_does_not_change_the_pool(self):
        policy = HiringPolicy(HALF, Fraction(1, 3))

        serial = SimulationService.simulate(self.scenario, policy, n=7_500, seed=5, threads=1)
        parallel = SimulationService.simulate(self.scenario, policy, n=7_500, seed=5, threads=4)

        self.assertEqual(serial.records, parallel.records)
        self.assertEqual(serial.n, 7_500)
