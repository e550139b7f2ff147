"""
Hiring model service: optimal thresholds, posterior beliefs, closed-form rates and
model-implied joint distributions of the employer-worker model
"""
import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Optional, Union

from django.conf import settings
from dotenv import dotenv_values
from pydantic import ValidationError

from ..domain import (
    RATE_NAMES,
    EmployerPayoffs,
    Gender,
    HiringPolicy,
    JointDistribution,
    ModelJoint,
    ModelRates,
    PhelpsianScenario,
    Profile,
    RandomizedAlgorithm,
    RateBundle,
    ScenarioVariant,
)
from ..domain.hiring import MUDDLED_SCORE, SCORES
from ..exceptions import EmptyInputError, ParityLensError, ScenarioError
from ..schemas import ScenarioFileSchema, parse_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RootSet:
    """Solutions d in [0, 1] of a one-variable equation: none, finitely many, or all but `excluded`"""

    roots: tuple[Fraction, ...] = ()
    everywhere: bool = False
    excluded: tuple[Fraction, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.everywhere and not self.roots

    def contains(self, value: Fraction) -> bool:
        if self.everywhere:
            return value not in self.excluded
        return value in self.roots


def _in_unit(value: Fraction) -> bool:
    return 0 <= value <= 1


@dataclass(frozen=True)
class LinearFractional:
    """(a + b·d) / (c + e·d); UNDEFINED where the denominator vanishes"""

    a: Fraction
    b: Fraction
    c: Fraction
    e: Fraction

    def __call__(self, d: Fraction) -> Optional[Fraction]:
        denominator = self.c + self.e * d
        if denominator == 0:
            return None
        return (self.a + self.b * d) / denominator

    def undefined_points(self) -> RootSet:
        if self.e == 0:
            return RootSet(everywhere=self.c == 0)
        point = -self.c / self.e
        return RootSet(roots=(point,) if _in_unit(point) else ())

    def linear_root(self, target: Fraction) -> Optional[Fraction]:
        """Unclamped solution of f(d) = target from the cross-multiplied linear equation"""
        slope = self.b - target * self.e
        if slope == 0:
            return None
        return -(self.a - target * self.c) / slope

    def solve(self, target: Optional[Fraction]) -> RootSet:
        """All d in [0, 1] with f(d) = target; an UNDEFINED target matches UNDEFINED values"""
        undefined = self.undefined_points()
        if target is None:
            return undefined
        if undefined.everywhere:
            return RootSet()
        intercept = self.a - target * self.c
        slope = self.b - target * self.e
        if slope == 0:
            if intercept != 0:
                return RootSet()
            return RootSet(everywhere=True, excluded=undefined.roots)
        root = -intercept / slope
        if not _in_unit(root) or root in undefined.roots:
            return RootSet()
        return RootSet(roots=(root,))


@dataclass(frozen=True)
class ScenarioFile:
    scenario: PhelpsianScenario
    policy: Optional[HiringPolicy] = None
    female_share: Optional[Fraction] = None


class HiringModelService:
    """Service class for the closed forms of the employer-worker hiring model"""

    @staticmethod
    def optimal_threshold(payoffs: EmployerPayoffs) -> Fraction:
        """s̄(B, ω) = −ω / (B − ω), strictly inside (0, 1)"""
        return -payoffs.omega / (payoffs.benefit - payoffs.omega)

    @staticmethod
    def likelihood(scenario: PhelpsianScenario, gender: Gender, score: int, outcome: int) -> Fraction:
        """P[x | y, a]: informative scores reveal y with probability φ, otherwise the muddled score"""
        phi = scenario.precision(gender)
        if score == MUDDLED_SCORE:
            return 1 - phi
        revealing = 3 if outcome == 1 else 1
        return phi if score == revealing else Fraction(0)

    @staticmethod
    def posterior(scenario: PhelpsianScenario, gender: Gender, score: int) -> Optional[Fraction]:
        """P[y=1 | a, x] by Bayes' rule; None when the score has probability zero"""
        if score not in SCORES:
            raise ScenarioError('x', f"score must be one of {SCORES}, got {score}")
        p = scenario.prevalence(gender)
        qualified = p * HiringModelService.likelihood(scenario, gender, score, 1)
        unqualified = (1 - p) * HiringModelService.likelihood(scenario, gender, score, 0)
        if qualified + unqualified == 0:
            return None
        return qualified / (qualified + unqualified)

    @staticmethod
    def posterior_table(scenario: PhelpsianScenario) -> dict[tuple[Profile, Profile], Fraction]:
        """Beliefs for every (gender, score) cell with positive probability"""
        table = {}
        for gender in Gender:
            for score in SCORES:
                belief = HiringModelService.posterior(scenario, gender, score)
                if belief is not None:
                    table[((gender.value,), (str(score),))] = belief
        return table

    @staticmethod
    def posterior_table_from_joint(joint: JointDistribution) -> dict[tuple[Profile, Profile], Fraction]:
        return {cell: joint.posterior(*cell) for cell in joint.support()}

    @staticmethod
    def optimal_decision_rule(
        beliefs: Mapping[tuple[Profile, Profile], Fraction],
        payoffs: EmployerPayoffs,
    ) -> RandomizedAlgorithm:
        """Hire exactly when the belief reaches the threshold (ties are hired)"""
        threshold = HiringModelService.optimal_threshold(payoffs)
        table = {
            cell: Fraction(1) if belief >= threshold else Fraction(0)
            for cell, belief in beliefs.items()
        }
        return RandomizedAlgorithm(table=table)

    @staticmethod
    def optimal_policy(scenario: PhelpsianScenario) -> HiringPolicy:
        """
        Hire at the muddled score iff the prevalence reaches the threshold

        The posterior at the muddled score equals the prevalence, so this is the optimal
        decision rule restricted to x=2. In the PRECISION variant both genders share p̃
        and the rule is always anti-classifying.
        """
        threshold = HiringModelService.optimal_threshold(scenario.payoffs)
        d = {
            gender: Fraction(1) if scenario.prevalence(gender) >= threshold else Fraction(0)
            for gender in Gender
        }
        return HiringPolicy(d_m=d[Gender.MALE], d_f=d[Gender.FEMALE])

    @staticmethod
    def policy_algorithm(policy: HiringPolicy) -> RandomizedAlgorithm:
        return RandomizedAlgorithm(table={
            ((gender.value,), (str(score),)): policy.hire_probability(gender, score)
            for gender in Gender
            for score in SCORES
        })

    @staticmethod
    def rate_coefficients(scenario: PhelpsianScenario, gender: Gender) -> dict[str, LinearFractional]:
        """Every rate of one gender as a linear-fractional function of its muddled-score hire probability"""
        p = scenario.prevalence(gender)
        phi = scenario.precision(gender)
        zero, one = Fraction(0), Fraction(1)
        return {
            'tpr': LinearFractional(p * phi, p * (1 - phi), p, zero),
            'tnr': LinearFractional(1 - p, -(1 - p) * (1 - phi), 1 - p, zero),
            'ppv': LinearFractional(p * phi, p * (1 - phi), p * phi, 1 - phi),
            'npv': LinearFractional(1 - p, -(1 - p) * (1 - phi), 1 - p * phi, -(1 - phi)),
            'base_rate': LinearFractional(p, zero, one, zero),
            'hire_rate': LinearFractional(p * phi, 1 - phi, one, zero),
        }

    @staticmethod
    def model_rates(scenario: PhelpsianScenario, policy: HiringPolicy) -> ModelRates:
        """
        Closed-form rates per gender

        TPR = φ + (1−φ)d and TNR = 1 − d(1−φ) whenever the group has both outcomes;
        PPV = pφ+pd(1−φ) over pφ+d(1−φ), UNDEFINED only when nobody is hired.
        """
        by_gender = {}
        for gender in Gender:
            coefficients = HiringModelService.rate_coefficients(scenario, gender)
            d = policy.d(gender)
            by_gender[gender] = RateBundle(**{name: coefficients[name](d) for name in RATE_NAMES})
        if scenario.is_degenerate:
            logger.warning(f"Degenerate {scenario.variant.value} scenario: a test precision is 0 or 1")
        return ModelRates(by_gender=by_gender)

    @staticmethod
    def default_female_share() -> Fraction:
        return parse_rational(settings.PARITYLENS_DEFAULT_FEMALE_SHARE)

    @staticmethod
    def model_joint(
        scenario: PhelpsianScenario,
        policy: HiringPolicy,
        female_share: Optional[Fraction] = None,
    ) -> ModelJoint:
        """The (gender, score, qualified) distribution of the model and the policy deciding on it"""
        share = HiringModelService.default_female_share() if female_share is None else female_share
        if not 0 < share < 1:
            raise ScenarioError('gender_split', f"must lie strictly between 0 and 1, got {share}")

        weights = {Gender.MALE: 1 - share, Gender.FEMALE: share}
        masses = {}
        for gender in Gender:
            p = scenario.prevalence(gender)
            for score in SCORES:
                for outcome, prior in ((0, 1 - p), (1, p)):
                    mass = weights[gender] * prior * HiringModelService.likelihood(scenario, gender, score, outcome)
                    if mass:
                        masses[((gender.value,), (str(score),), outcome)] = mass

        joint = JointDistribution(
            masses=masses,
            groups=tuple((gender.value,) for gender in Gender),
            contexts=tuple((str(score),) for score in SCORES),
        )
        return ModelJoint(joint=joint, algorithm=HiringModelService.policy_algorithm(policy))

    @staticmethod
    def build_scenario(fields: ScenarioFileSchema) -> ScenarioFile:
        payoffs = EmployerPayoffs(benefit=fields.B, omega=fields.omega)
        scenario = PhelpsianScenario(
            variant=ScenarioVariant(fields.variant),
            payoffs=payoffs,
            p_m=fields.p_m,
            p_f=fields.p_f,
            p_tilde=fields.p_tilde,
            phi=fields.phi,
            phi_m=fields.phi_m,
            phi_f=fields.phi_f,
        )
        policy = None
        if fields.d_m is not None or fields.d_f is not None:
            missing = 'd_f' if fields.d_f is None else 'd_m' if fields.d_m is None else None
            if missing:
                raise ScenarioError(missing, "d_m and d_f must be given together")
            policy = HiringPolicy(d_m=fields.d_m, d_f=fields.d_f)
        return ScenarioFile(scenario=scenario, policy=policy, female_share=fields.gender_split)

    @staticmethod
    def rational_option(field: str, value) -> Optional[Fraction]:
        if value is None:
            return None
        try:
            return parse_rational(value)
        except ValueError as e:
            raise ScenarioError(field, str(e)) from None

    @staticmethod
    def resolve_policy(loaded: ScenarioFile, d_m=None, d_f=None) -> HiringPolicy:
        """Policy from command options, falling back to the one in the scenario file"""
        if (d_m is None) != (d_f is None):
            raise ScenarioError('d_f' if d_f is None else 'd_m', "d_m and d_f must be given together")
        if d_m is not None:
            return HiringPolicy(
                d_m=HiringModelService.rational_option('d_m', d_m),
                d_f=HiringModelService.rational_option('d_f', d_f),
            )
        if loaded.policy is None:
            raise ScenarioError('d_m', "the scenario names no policy; pass --d-m and --d-f")
        return loaded.policy

    @staticmethod
    def resolve_female_share(loaded: ScenarioFile, female_share=None) -> Optional[Fraction]:
        if female_share is not None:
            return HiringModelService.rational_option('gender_split', female_share)
        return loaded.female_share

    @staticmethod
    def load_scenario_file(path: Union[str, Path]) -> ScenarioFile:
        """
        Read a scenario from JSON or from `key = value` lines

        Raises:
            ScenarioError: naming the first field that fails validation
        """
        path = Path(path)
        if not path.exists():
            raise ParityLensError(f"file not found: {path}")
        text = path.read_text(encoding='utf-8')
        if not text.strip():
            raise EmptyInputError(f"{path} is empty")

        if path.suffix.lower() == '.json' or text.lstrip().startswith('{'):
            try:
                raw = json.loads(text)
            except json.JSONDecodeError as e:
                raise ScenarioError('file', f"invalid JSON at line {e.lineno}: {e.msg}") from None
        else:
            raw = {key: value for key, value in dotenv_values(path).items() if value is not None}

        try:
            fields = ScenarioFileSchema.model_validate(raw)
        except ValidationError as e:
            first = e.errors()[0]
            field = '.'.join(str(part) for part in first['loc']) or 'file'
            raise ScenarioError(field, first['msg']) from None

        loaded = HiringModelService.build_scenario(fields)
        logger.info(f"Loaded {loaded.scenario.variant.value} scenario from {path}")
        return loaded
