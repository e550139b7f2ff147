"""
Fairness service: pairwise group-fairness checks producing witnessed verdicts
"""
import logging
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence, Union

from ..domain import (
    Criterion,
    Dataset,
    FairnessVerdict,
    GroupConfusion,
    JointDistribution,
    ModelJoint,
    Profile,
    RandomizedAlgorithm,
    Rate,
    VerdictMode,
    Witness,
    WitnessKind,
)
from ..exceptions import SchemaError
from .dataset_service import DatasetService
from .metrics_service import MetricsService

logger = logging.getLogger(__name__)

# Anything a confusion-based criterion can be evaluated on
ConfusionSource = Union[Dataset, ModelJoint, Sequence[GroupConfusion]]
AlgorithmSource = Union[RandomizedAlgorithm, Dataset, ModelJoint]

RATE_CRITERIA = {
    Criterion.POS_PRED_PARITY: 'ppv',
    Criterion.NEG_PRED_PARITY: 'npv',
    Criterion.POS_ERROR_BALANCE: 'tpr',
    Criterion.NEG_ERROR_BALANCE: 'tnr',
    Criterion.DEMOGRAPHIC_PARITY: 'hire_rate',
}


class FairnessService:
    """Service class for group fairness criteria"""

    @staticmethod
    def confusions(source: ConfusionSource) -> list[GroupConfusion]:
        if isinstance(source, Dataset):
            return MetricsService.confusion_by_group(source)
        if isinstance(source, ModelJoint):
            return MetricsService.confusion_from_joint(source.joint, source.algorithm)
        return list(source)

    @staticmethod
    def _within_tolerance(gap: Fraction, tolerance: Optional[float]) -> bool:
        if tolerance is None:
            return gap == 0
        return float(gap) <= tolerance

    @staticmethod
    def _scan_pairs(
        entries: Sequence[tuple[Profile, Rate]],
        tolerance: Optional[float],
        context: Optional[Profile] = None,
    ) -> tuple[Fraction, Optional[Witness]]:
        """
        Compare every pair of groups

        Returns the largest gap between defined values and a witness: the widest pair when
        it exceeds the tolerance, otherwise the first one-sided UNDEFINED pair, otherwise None.
        """
        gap = Fraction(0)
        widest = None
        mismatch = None
        for (group_a, value_a), (group_b, value_b) in combinations(entries, 2):
            if value_a is None and value_b is None:
                continue
            if value_a is None or value_b is None:
                if mismatch is None:
                    mismatch = Witness(group_a, group_b, value_a, value_b, WitnessKind.UNDEFINED_MISMATCH, context)
                continue
            difference = abs(value_a - value_b)
            if difference > gap:
                gap = difference
                widest = Witness(group_a, group_b, value_a, value_b, WitnessKind.GAP, context)

        if widest is not None and not FairnessService._within_tolerance(gap, tolerance):
            return gap, widest
        return gap, mismatch

    @staticmethod
    def _verdict(
        criterion: Criterion,
        gap: Fraction,
        witness: Optional[Witness],
        tolerance: Optional[float],
        empirical: bool = False,
        components: tuple = (),
    ) -> FairnessVerdict:
        return FairnessVerdict(
            criterion=criterion,
            satisfied=witness is None,
            gap=gap,
            witness=witness,
            mode=VerdictMode.EXACT if tolerance is None else VerdictMode.FLOAT,
            empirical=empirical,
            components=components,
        )

    @staticmethod
    def _composite(criterion: Criterion, parts: tuple[FairnessVerdict, ...], tolerance) -> FairnessVerdict:
        witness = next((part.witness for part in parts if not part.satisfied), None)
        gap = max(part.gap for part in parts)
        empirical = any(part.empirical for part in parts)
        return FairnessService._verdict(criterion, gap, witness, tolerance, empirical, parts)

    @staticmethod
    def rate_parity(
        criterion: Criterion,
        source: ConfusionSource,
        tolerance: Optional[float] = None,
    ) -> FairnessVerdict:
        """Equality of one rate (see RATE_CRITERIA) across every pair of groups"""
        rate_name = RATE_CRITERIA[criterion]
        entries = [
            (confusion.group, MetricsService.rates(confusion).get(rate_name))
            for confusion in FairnessService.confusions(source)
        ]
        gap, witness = FairnessService._scan_pairs(entries, tolerance)
        return FairnessService._verdict(criterion, gap, witness, tolerance)

    @staticmethod
    def check_positive_predictive_parity(source: ConfusionSource, tolerance: Optional[float] = None) -> FairnessVerdict:
        return FairnessService.rate_parity(Criterion.POS_PRED_PARITY, source, tolerance)

    @staticmethod
    def check_negative_predictive_parity(source: ConfusionSource, tolerance: Optional[float] = None) -> FairnessVerdict:
        return FairnessService.rate_parity(Criterion.NEG_PRED_PARITY, source, tolerance)

    @staticmethod
    def check_predictive_parity(source: ConfusionSource, tolerance: Optional[float] = None) -> FairnessVerdict:
        """Both positive and negative predictive parity; the parts are kept as components"""
        confusions = FairnessService.confusions(source)
        parts = (
            FairnessService.check_positive_predictive_parity(confusions, tolerance),
            FairnessService.check_negative_predictive_parity(confusions, tolerance),
        )
        return FairnessService._composite(Criterion.PREDICTIVE_PARITY, parts, tolerance)

    @staticmethod
    def check_positive_error_balance(source: ConfusionSource, tolerance: Optional[float] = None) -> FairnessVerdict:
        return FairnessService.rate_parity(Criterion.POS_ERROR_BALANCE, source, tolerance)

    @staticmethod
    def check_negative_error_balance(source: ConfusionSource, tolerance: Optional[float] = None) -> FairnessVerdict:
        return FairnessService.rate_parity(Criterion.NEG_ERROR_BALANCE, source, tolerance)

    @staticmethod
    def check_error_rate_balance(source: ConfusionSource, tolerance: Optional[float] = None) -> FairnessVerdict:
        confusions = FairnessService.confusions(source)
        parts = (
            FairnessService.check_positive_error_balance(confusions, tolerance),
            FairnessService.check_negative_error_balance(confusions, tolerance),
        )
        return FairnessService._composite(Criterion.ERROR_RATE_BALANCE, parts, tolerance)

    @staticmethod
    def check_demographic_parity(source: ConfusionSource, tolerance: Optional[float] = None) -> FairnessVerdict:
        """P[δ=1 | a] equal across groups"""
        return FairnessService.rate_parity(Criterion.DEMOGRAPHIC_PARITY, source, tolerance)

    @staticmethod
    def _algorithm(source: AlgorithmSource, joint: Optional[JointDistribution]) -> tuple[RandomizedAlgorithm, bool]:
        if isinstance(source, Dataset):
            return DatasetService.empirical_algorithm(source), True
        if isinstance(source, ModelJoint):
            joint = source.joint
            source = source.algorithm
        if joint is not None and not source.covers(joint):
            raise SchemaError("algorithm does not cover every cell of the joint support")
        return source, False

    @staticmethod
    def _per_context(
        criterion: Criterion,
        source: AlgorithmSource,
        tolerance: Optional[float],
        joint: Optional[JointDistribution],
    ) -> FairnessVerdict:
        algorithm, empirical = FairnessService._algorithm(source, joint)
        gap = Fraction(0)
        widest = None
        widest_gap = Fraction(0)
        for context in algorithm.contexts:
            entries = [
                (group, algorithm.table[(group, context)])
                for group in algorithm.groups
                if (group, context) in algorithm.table
            ]
            context_gap, context_witness = FairnessService._scan_pairs(entries, tolerance, context)
            gap = max(gap, context_gap)
            # hire probabilities are never UNDEFINED, so a witness here is always a gap
            if context_witness is not None and (widest is None or context_gap > widest_gap):
                widest, widest_gap = context_witness, context_gap
        return FairnessService._verdict(criterion, gap, widest, tolerance, empirical)

    @staticmethod
    def check_anti_classification(
        source: AlgorithmSource,
        tolerance: Optional[float] = None,
        joint: Optional[JointDistribution] = None,
    ) -> FairnessVerdict:
        """
        Equal hire probability for every pair of groups sharing a permissible profile

        A Dataset is checked on its observed hire frequencies and the verdict is flagged
        empirical.
        """
        return FairnessService._per_context(Criterion.ANTI_CLASSIFICATION, source, tolerance, joint)

    @staticmethod
    def check_conditional_demographic_parity(
        source: AlgorithmSource,
        tolerance: Optional[float] = None,
        joint: Optional[JointDistribution] = None,
    ) -> FairnessVerdict:
        """P[δ=1 | a, x] independent of a within each x; coincides with anti-classification"""
        return FairnessService._per_context(Criterion.COND_DEMOGRAPHIC_PARITY, source, tolerance, joint)

    @staticmethod
    def check(criterion: Criterion, source, tolerance: Optional[float] = None) -> FairnessVerdict:
        checks = {
            Criterion.ANTI_CLASSIFICATION: FairnessService.check_anti_classification,
            Criterion.POS_PRED_PARITY: FairnessService.check_positive_predictive_parity,
            Criterion.NEG_PRED_PARITY: FairnessService.check_negative_predictive_parity,
            Criterion.PREDICTIVE_PARITY: FairnessService.check_predictive_parity,
            Criterion.POS_ERROR_BALANCE: FairnessService.check_positive_error_balance,
            Criterion.NEG_ERROR_BALANCE: FairnessService.check_negative_error_balance,
            Criterion.ERROR_RATE_BALANCE: FairnessService.check_error_rate_balance,
            Criterion.DEMOGRAPHIC_PARITY: FairnessService.check_demographic_parity,
            Criterion.COND_DEMOGRAPHIC_PARITY: FairnessService.check_conditional_demographic_parity,
        }
        return checks[criterion](source, tolerance)

    @staticmethod
    def check_all(
        source: Union[Dataset, ModelJoint],
        tolerance: Optional[float] = None,
        criteria: Iterable[Criterion] = tuple(Criterion),
    ) -> list[FairnessVerdict]:
        """Run the requested criteria in declaration order"""
        requested = set(criteria)
        verdicts = [
            FairnessService.check(criterion, source, tolerance)
            for criterion in Criterion
            if criterion in requested
        ]
        violated = [verdict.criterion.value for verdict in verdicts if not verdict.satisfied]
        logger.info(f"Checked {len(verdicts)} criteria, violated: {violated or 'none'}")
        return verdicts
