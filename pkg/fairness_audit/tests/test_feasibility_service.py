from fractions import Fraction
from math import sqrt

from django.test import SimpleTestCase
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.django import SimpleTestCase as HypothesisTestCase

from fairness_audit.domain import Criterion, FeasibilityFinding, FeasiblePoint, FeasibleShape
from fairness_audit.exceptions import ScenarioError
from fairness_audit.services.feasibility_service import FeasibilityService

from .test_hiring_model_service import precision_scenario, prevalence_scenario

inner = st.fractions(min_value=Fraction(1, 20), max_value=Fraction(19, 20), max_denominator=20)
HALF = Fraction(1, 2)


def coordinates(points):
    return [(point.d_m, point.d_f) for point in points]


class PrevalenceFeasibilityTests(SimpleTestCase):

    def setUp(self):
        self.scenario = prevalence_scenario(HALF, Fraction(4, 5), HALF)

    def test_error_rate_balance_is_the_diagonal(self):
        feasible = FeasibilityService.feasibility_search(self.scenario, Criterion.ERROR_RATE_BALANCE)

        self.assertEqual(feasible.shape, FeasibleShape.CURVE)
        self.assertEqual(len(feasible.points), 101)
        self.assertTrue(all(point.exact and point.d_m == point.d_f for point in feasible.points))
        self.assertIn(FeasibilityFinding.DIAGONAL_EXACTLY, feasible.findings)
        self.assertIn(FeasibilityFinding.INCLUDES_ORIGIN, feasible.findings)

    def test_positive_predictive_parity_favours_women(self):
        feasible = FeasibilityService.feasibility_search(self.scenario, Criterion.POS_PRED_PARITY, grid=11)

        # d_f = 4 d_m / (1 - 3 d_m), inside the square up to d_m = 1/7
        self.assertEqual(coordinates(feasible.points), [(Fraction(0), Fraction(0)), (Fraction(1, 10), Fraction(4, 7))])
        self.assertEqual(feasible.diagonal_points(), (FeasiblePoint(Fraction(0), Fraction(0)),))
        self.assertIn(FeasibilityFinding.ON_DIAGONAL_ONLY_AT_ORIGIN, feasible.findings)
        self.assertIn(FeasibilityFinding.FAVOURS_HIGHER_PREVALENCE, feasible.findings)

    def test_joint_predictive_parity_is_an_interior_crossing(self):
        feasible = FeasibilityService.feasibility_search(self.scenario, Criterion.PREDICTIVE_PARITY)

        self.assertEqual(feasible.shape, FeasibleShape.POINTS)
        self.assertEqual(len(feasible.points), 1)
        point = feasible.points[0]
        self.assertFalse(point.exact)
        # crossing of the PPV and NPV curves: 3 d^2 - 8 d + 1 = 0
        self.assertAlmostEqual(float(point.d_m), (4 - sqrt(13)) / 3, places=9)
        self.assertGreater(point.d_f, point.d_m)
        self.assertIn(FeasibilityFinding.OFF_DIAGONAL, feasible.findings)
        self.assertIn(FeasibilityFinding.FAVOURS_HIGHER_PREVALENCE, feasible.findings)

    def test_diagonal_goals(self):
        for goal in (Criterion.ANTI_CLASSIFICATION, Criterion.COND_DEMOGRAPHIC_PARITY):
            with self.subTest(goal=goal):
                feasible = FeasibilityService.feasibility_search(self.scenario, goal, grid=5)

                self.assertEqual(coordinates(feasible.points), [(Fraction(i, 4), Fraction(i, 4)) for i in range(5)])
                self.assertIn(FeasibilityFinding.DIAGONAL_EXACTLY, feasible.findings)

    def test_perfect_test_makes_every_policy_feasible(self):
        perfect = prevalence_scenario(HALF, Fraction(4, 5), Fraction(1))

        feasible = FeasibilityService.feasibility_search(perfect, Criterion.POS_PRED_PARITY, grid=3)

        self.assertEqual(feasible.shape, FeasibleShape.REGION)
        self.assertEqual(len(feasible.points), 9)
        self.assertIn(FeasibilityFinding.DEGENERATE_SCENARIO, feasible.findings)

    def test_grid_needs_two_points(self):
        with self.assertRaises(ScenarioError) as caught:
            FeasibilityService.feasibility_search(self.scenario, Criterion.ERROR_RATE_BALANCE, grid=1)
        self.assertEqual(caught.exception.field, 'grid')


class PrecisionFeasibilityTests(SimpleTestCase):

    def setUp(self):
        self.scenario = precision_scenario(HALF, Fraction(3, 10), Fraction(7, 10))

    def test_error_rate_balance_is_empty(self):
        feasible = FeasibilityService.feasibility_search(self.scenario, Criterion.ERROR_RATE_BALANCE)

        self.assertTrue(feasible.is_empty)
        self.assertEqual(feasible.shape, FeasibleShape.EMPTY)
        self.assertEqual(feasible.findings, frozenset({FeasibilityFinding.EMPTY}))

    def test_positive_predictive_parity_is_a_ray(self):
        feasible = FeasibilityService.feasibility_search(self.scenario, Criterion.POS_PRED_PARITY, grid=11)

        # d_m (1 - phi_m) phi_f = d_f (1 - phi_f) phi_m, so d_f = 49/9 d_m
        self.assertEqual(coordinates(feasible.points), [(Fraction(0), Fraction(0)), (Fraction(1, 10), Fraction(49, 90))])
        self.assertEqual(feasible.shape, FeasibleShape.CURVE)
        self.assertEqual(coordinates(feasible.diagonal_points()), [(Fraction(0), Fraction(0))])
        self.assertIn(FeasibilityFinding.ON_DIAGONAL_ONLY_AT_ORIGIN, feasible.findings)


class FeasibilityPropertyTests(HypothesisTestCase):

    @given(inner, inner, inner)
    @settings(max_examples=200, deadline=None)
    def test_predictive_parity_hires_more_women_at_the_muddled_score(self, p_m, p_f, phi):
        assume(p_m < p_f)
        scenario = prevalence_scenario(p_m, p_f, phi)

        for goal in (Criterion.POS_PRED_PARITY, Criterion.PREDICTIVE_PARITY):
            feasible = FeasibilityService.feasibility_search(scenario, goal)
            for point in feasible.non_corner_points():
                self.assertGreater(point.d_f, point.d_m)

        joint = FeasibilityService.feasibility_search(scenario, Criterion.PREDICTIVE_PARITY)
        self.assertEqual(joint.diagonal_points(), ())

    @given(inner, inner, inner)
    @settings(max_examples=200, deadline=None)
    def test_precision_gap_rules_out_balance(self, p_tilde, phi_m, phi_f):
        assume(phi_m != phi_f)
        scenario = precision_scenario(p_tilde, phi_m, phi_f)

        balance = FeasibilityService.feasibility_search(scenario, Criterion.ERROR_RATE_BALANCE)
        self.assertTrue(balance.is_empty)

        parity = FeasibilityService.feasibility_search(scenario, Criterion.POS_PRED_PARITY)
        self.assertEqual(coordinates(parity.diagonal_points()), [(Fraction(0), Fraction(0))])
        self.assertIn(FeasibilityFinding.ON_DIAGONAL_ONLY_AT_ORIGIN, parity.findings)
