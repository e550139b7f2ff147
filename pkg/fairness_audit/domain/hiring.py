"""
Employer-worker hiring model: payoffs, testing technologies and threshold policies
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional

from ..exceptions import ScenarioError
from .fairness import Criterion
from .metrics import RateBundle

SCORES = (1, 2, 3)
MUDDLED_SCORE = 2


class Gender(str, Enum):
    MALE = 'm'
    FEMALE = 'f'


class ScenarioVariant(str, Enum):
    PREVALENCE = 'PREVALENCE'  # gender-blind test, prevalences differ
    PRECISION = 'PRECISION'  # common prevalence, gender-specific test precision


def _check_probability(field: str, value: Optional[Fraction]) -> None:
    if value is None:
        raise ScenarioError(field, "is required for this variant")
    if not 0 <= value <= 1:
        raise ScenarioError(field, f"must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class EmployerPayoffs:
    benefit: Fraction  # B
    omega: Fraction

    def __post_init__(self):
        if self.benefit <= 0:
            raise ScenarioError('B', f"must be positive, got {self.benefit}")
        if self.omega >= 0:
            raise ScenarioError('omega', f"must be negative, got {self.omega}")


@dataclass(frozen=True)
class PhelpsianScenario:
    variant: ScenarioVariant
    payoffs: EmployerPayoffs
    p_m: Optional[Fraction] = None
    p_f: Optional[Fraction] = None
    p_tilde: Optional[Fraction] = None
    phi: Optional[Fraction] = None
    phi_m: Optional[Fraction] = None
    phi_f: Optional[Fraction] = None

    def __post_init__(self):
        if self.variant == ScenarioVariant.PREVALENCE:
            for name in ('p_m', 'p_f', 'phi'):
                _check_probability(name, getattr(self, name))
        else:
            for name in ('p_tilde', 'phi_m', 'phi_f'):
                _check_probability(name, getattr(self, name))

    def prevalence(self, gender: Gender) -> Fraction:
        if self.variant == ScenarioVariant.PRECISION:
            return self.p_tilde
        return self.p_m if gender == Gender.MALE else self.p_f

    def precision(self, gender: Gender) -> Fraction:
        if self.variant == ScenarioVariant.PREVALENCE:
            return self.phi
        return self.phi_m if gender == Gender.MALE else self.phi_f

    @property
    def is_degenerate(self) -> bool:
        """φ of 0 or 1 somewhere: uninformative or perfect test"""
        return any(self.precision(gender) in (0, 1) for gender in Gender)


@dataclass(frozen=True)
class HiringPolicy:
    """Hire for sure at x=3, never at x=1, with probability d(a) at x=2"""

    d_m: Fraction
    d_f: Fraction

    def __post_init__(self):
        _check_probability('d_m', self.d_m)
        _check_probability('d_f', self.d_f)

    def d(self, gender: Gender) -> Fraction:
        return self.d_m if gender == Gender.MALE else self.d_f

    def hire_probability(self, gender: Gender, score: int) -> Fraction:
        if score == 3:
            return Fraction(1)
        if score == 1:
            return Fraction(0)
        return self.d(gender)

    @property
    def is_anti_classifying(self) -> bool:
        return self.d_m == self.d_f


@dataclass(frozen=True)
class ModelRates:
    by_gender: Mapping[Gender, RateBundle]

    def __getitem__(self, gender: Gender) -> RateBundle:
        return self.by_gender[gender]


class FeasibilityFinding(str, Enum):
    EMPTY = 'EMPTY'
    DIAGONAL_EXACTLY = 'DIAGONAL_EXACTLY'  # feasible set is the whole line d_m = d_f
    OFF_DIAGONAL = 'OFF_DIAGONAL'  # no feasible point satisfies anti-classification
    ON_DIAGONAL_ONLY_AT_ORIGIN = 'ON_DIAGONAL_ONLY_AT_ORIGIN'
    FAVOURS_HIGHER_PREVALENCE = 'FAVOURS_HIGHER_PREVALENCE'  # non-corner points hire the higher-prevalence group more at x=2
    INCLUDES_ORIGIN = 'INCLUDES_ORIGIN'
    DEGENERATE_SCENARIO = 'DEGENERATE_SCENARIO'


class FeasibleShape(str, Enum):
    EMPTY = 'empty'
    POINTS = 'points'
    CURVE = 'curve'
    REGION = 'region'


@dataclass(frozen=True)
class FeasiblePoint:
    """A policy satisfying the goal; exact=False marks a bisection estimate within ε"""

    d_m: Fraction
    d_f: Fraction
    exact: bool = True

    @property
    def is_corner(self) -> bool:
        return self.d_m in (0, 1) and self.d_f in (0, 1)

    def on_diagonal(self, tolerance: float = 0.0) -> bool:
        if self.exact:
            return self.d_m == self.d_f
        return abs(float(self.d_m - self.d_f)) <= tolerance


@dataclass(frozen=True)
class FeasibleSet:
    goal: Criterion
    variant: ScenarioVariant
    grid: int
    shape: FeasibleShape
    points: tuple[FeasiblePoint, ...]
    findings: frozenset[FeasibilityFinding]

    @property
    def is_empty(self) -> bool:
        return not self.points

    def diagonal_points(self, tolerance: float = 0.0) -> tuple[FeasiblePoint, ...]:
        return tuple(point for point in self.points if point.on_diagonal(tolerance))

    def non_corner_points(self) -> tuple[FeasiblePoint, ...]:
        return tuple(point for point in self.points if not point.is_corner)
