"""
Feasibility service: which muddled-score hiring policies (d_m, d_f) satisfy a fairness goal
"""
import logging
from fractions import Fraction
from typing import Optional

from django.conf import settings

from ..domain import (
    Criterion,
    FeasibilityFinding,
    FeasiblePoint,
    FeasibleSet,
    FeasibleShape,
    Gender,
    PhelpsianScenario,
    ScenarioVariant,
)
from ..exceptions import ScenarioError
from .hiring_model_service import HiringModelService, LinearFractional, RootSet

logger = logging.getLogger(__name__)

GOAL_RATES = {
    Criterion.POS_PRED_PARITY: ('ppv',),
    Criterion.NEG_PRED_PARITY: ('npv',),
    Criterion.PREDICTIVE_PARITY: ('ppv', 'npv'),
    Criterion.POS_ERROR_BALANCE: ('tpr',),
    Criterion.NEG_ERROR_BALANCE: ('tnr',),
    Criterion.ERROR_RATE_BALANCE: ('tpr', 'tnr'),
    Criterion.DEMOGRAPHIC_PARITY: ('hire_rate',),
}
DIAGONAL_GOALS = (Criterion.ANTI_CLASSIFICATION, Criterion.COND_DEMOGRAPHIC_PARITY)


def _intersect(first: RootSet, second: RootSet) -> RootSet:
    if first.everywhere and second.everywhere:
        return RootSet(everywhere=True, excluded=tuple(sorted(set(first.excluded) | set(second.excluded))))
    if first.everywhere:
        first, second = second, first
    return RootSet(roots=tuple(root for root in first.roots if second.contains(root)))


class FeasibilityService:
    """Service class for the grid-and-bisection search over hiring policies"""

    @staticmethod
    def _root_sets(
        pairs: list[tuple[LinearFractional, LinearFractional]],
        d_m: Fraction,
    ) -> RootSet:
        solutions = None
        for male, female in pairs:
            roots = female.solve(male(d_m))
            solutions = roots if solutions is None else _intersect(solutions, roots)
        return solutions

    @staticmethod
    def _root_gap(pairs, d_m: Fraction) -> Optional[Fraction]:
        """Difference of the unclamped d_f solving the first and the second rate equation"""
        roots = []
        for male, female in pairs:
            target = male(d_m)
            if target is None:
                return None
            root = female.linear_root(target)
            if root is None:
                return None
            roots.append(root)
        return roots[0] - roots[1]

    @staticmethod
    def _bisect(pairs, low: Fraction, high: Fraction, tolerance: float) -> Optional[FeasiblePoint]:
        """Refine a sign change of the root gap between two grid values of d_m"""
        gap_low = FeasibilityService._root_gap(pairs, low)
        for _ in range(settings.PARITYLENS_BISECTION_ITERATIONS):
            middle = (low + high) / 2
            gap_middle = FeasibilityService._root_gap(pairs, middle)
            if gap_middle is None:
                return None
            if gap_middle == 0:
                low = high = middle
                break
            if (gap_middle > 0) == (gap_low > 0):
                low, gap_low = middle, gap_middle
            else:
                high = middle
        d_m = (low + high) / 2
        gap = FeasibilityService._root_gap(pairs, d_m)
        if gap is None or abs(float(gap)) > tolerance:
            return None
        male, female = pairs[0]
        d_f = female.linear_root(male(d_m))
        if not 0 <= d_f <= 1:
            return None
        return FeasiblePoint(d_m=d_m, d_f=d_f, exact=gap == 0)

    @staticmethod
    def feasibility_search(
        scenario: PhelpsianScenario,
        goal: Criterion,
        grid: int = 101,
        tolerance: Optional[float] = None,
    ) -> FeasibleSet:
        """
        Scan d_m over an evenly spaced grid and solve each rate equation for d_f exactly

        Single-rate goals are linear in d_f once d_m is fixed, so their solutions are exact.
        Joint goals also look for crossings of the two solution curves between grid values of
        d_m and refine them by bisection; those points are reported with exact=False.
        """
        if grid < 2:
            raise ScenarioError('grid', f"needs at least 2 points per axis, got {grid}")
        tolerance = settings.PARITYLENS_FLOAT_TOLERANCE if tolerance is None else tolerance
        axis = [Fraction(i, grid - 1) for i in range(grid)]

        points: set[FeasiblePoint] = set()
        region = False
        if goal in DIAGONAL_GOALS:
            points.update(FeasiblePoint(d, d) for d in axis)
        else:
            male = HiringModelService.rate_coefficients(scenario, Gender.MALE)
            female = HiringModelService.rate_coefficients(scenario, Gender.FEMALE)
            pairs = [(male[name], female[name]) for name in GOAL_RATES[goal]]
            for d_m in axis:
                solutions = FeasibilityService._root_sets(pairs, d_m)
                if solutions.everywhere:
                    region = True
                    points.update(FeasiblePoint(d_m, d_f) for d_f in axis if solutions.contains(d_f))
                else:
                    points.update(FeasiblePoint(d_m, d_f) for d_f in solutions.roots)

            if len(pairs) == 2:
                for low, high in zip(axis, axis[1:]):
                    gap_low = FeasibilityService._root_gap(pairs, low)
                    gap_high = FeasibilityService._root_gap(pairs, high)
                    if gap_low is None or gap_high is None or gap_low == 0 or gap_high == 0:
                        continue
                    if (gap_low > 0) != (gap_high > 0):
                        point = FeasibilityService._bisect(pairs, low, high, tolerance)
                        if point is not None:
                            points.add(point)

        ordered = tuple(sorted(points, key=lambda point: (point.d_m, point.d_f)))
        shape = FeasibilityService._shape(ordered, region)
        findings = FeasibilityService._findings(scenario, ordered, axis, tolerance)
        logger.info(
            f"Feasibility of {goal.value} on {scenario.variant.value} scenario: "
            f"{shape.value}, {len(ordered)} points, findings {sorted(finding.value for finding in findings)}"
        )
        return FeasibleSet(
            goal=goal,
            variant=scenario.variant,
            grid=grid,
            shape=shape,
            points=ordered,
            findings=findings,
        )

    @staticmethod
    def _shape(points: tuple[FeasiblePoint, ...], region: bool) -> FeasibleShape:
        if not points:
            return FeasibleShape.EMPTY
        if region:
            return FeasibleShape.REGION
        if len({point.d_m for point in points}) > 1:
            return FeasibleShape.CURVE
        return FeasibleShape.POINTS

    @staticmethod
    def _findings(
        scenario: PhelpsianScenario,
        points: tuple[FeasiblePoint, ...],
        axis: list[Fraction],
        tolerance: float,
    ) -> frozenset[FeasibilityFinding]:
        findings = set()
        if scenario.is_degenerate:
            findings.add(FeasibilityFinding.DEGENERATE_SCENARIO)
        if not points:
            findings.add(FeasibilityFinding.EMPTY)
            return frozenset(findings)

        origin = FeasiblePoint(Fraction(0), Fraction(0))
        if origin in points:
            findings.add(FeasibilityFinding.INCLUDES_ORIGIN)

        diagonal = [point for point in points if point.on_diagonal(tolerance)]
        if not diagonal:
            findings.add(FeasibilityFinding.OFF_DIAGONAL)
        elif diagonal == [origin]:
            findings.add(FeasibilityFinding.ON_DIAGONAL_ONLY_AT_ORIGIN)
        if set(points) == {FeasiblePoint(d, d) for d in axis}:
            findings.add(FeasibilityFinding.DIAGONAL_EXACTLY)

        if scenario.variant == ScenarioVariant.PREVALENCE and scenario.p_m != scenario.p_f:
            higher_is_female = scenario.p_f > scenario.p_m
            interior = [point for point in points if not point.is_corner]
            if interior and all(
                (point.d_f > point.d_m) if higher_is_female else (point.d_m > point.d_f)
                for point in interior
            ):
                findings.add(FeasibilityFinding.FAVOURS_HIGHER_PREVALENCE)
        return frozenset(findings)
