"""
Side conditions of the predictive-parity / error-rate-balance impossibility result
and the records produced by its exhaustive verification
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..exceptions import ScenarioError
from .dataset import JointDistribution, Profile, RandomizedAlgorithm
from .fairness import FairnessVerdict


@dataclass(frozen=True)
class TheoremConditions:
    perfect_predictor: bool
    equal_base_rates: bool
    per_cell_posteriors: dict[tuple[Profile, Profile], Fraction]
    per_group_base_rates: dict[Profile, Fraction]
    omitted_cells: tuple[tuple[Profile, Profile], ...] = ()

    @property
    def escape_holds(self) -> bool:
        return self.perfect_predictor or self.equal_base_rates


@dataclass(frozen=True)
class EnumerationBounds:
    """Two sensitive groups, |x| permissible values, rational mass and probability grids"""

    x_arity: int = 2
    mass_denominator: int = 4
    prob_denominator: int = 2
    group_count: int = 2

    def __post_init__(self):
        if self.group_count != 2:
            raise ScenarioError('group_count', "enumeration is defined for exactly two groups")
        if not 1 <= self.x_arity <= 3:
            raise ScenarioError('x_arity', f"must be between 1 and 3, got {self.x_arity}")
        if self.mass_denominator < 1:
            raise ScenarioError('mass_denominator', f"must be at least 1, got {self.mass_denominator}")
        if self.prob_denominator < 1:
            raise ScenarioError('prob_denominator', f"must be at least 1, got {self.prob_denominator}")

    @property
    def cell_count(self) -> int:
        return self.group_count * self.x_arity


@dataclass(frozen=True)
class CounterexampleReport:
    distribution: JointDistribution
    algorithm: RandomizedAlgorithm
    verdicts: tuple[FairnessVerdict, FairnessVerdict]
    conditions: TheoremConditions


@dataclass
class VerificationSummary:
    bounds: EnumerationBounds
    distributions: int = 0
    algorithms: int = 0
    skipped_distributions: int = 0
    examined: int = 0
    satisfied_both: int = 0
    perfect_predictor_count: int = 0
    equal_base_rates_count: int = 0
    identity_checks: int = 0
    identity_failures: int = 0
    counterexamples: list[CounterexampleReport] = field(default_factory=list)
    convention_artifacts: list[CounterexampleReport] = field(default_factory=list)

    def merge(self, other: VerificationSummary) -> None:
        for name in (
            'distributions', 'skipped_distributions', 'examined', 'satisfied_both',
            'perfect_predictor_count', 'equal_base_rates_count',
            'identity_checks', 'identity_failures',
        ):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        self.counterexamples.extend(other.counterexamples)
        self.convention_artifacts.extend(other.convention_artifacts)

    @property
    def holds(self) -> bool:
        return not self.counterexamples and self.identity_failures == 0
