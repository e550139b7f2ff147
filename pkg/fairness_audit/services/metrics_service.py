"""
Metrics service: per-group confusion counts, Table-style rates and the identities linking them
"""
import logging
from collections import defaultdict
from fractions import Fraction
from math import lcm
from typing import Optional

from ..domain import (
    Dataset,
    GroupConfusion,
    JointDistribution,
    RandomizedAlgorithm,
    Rate,
    RateBundle,
)
from ..exceptions import EmptyInputError

logger = logging.getLogger(__name__)


def ratio(numerator, denominator) -> Rate:
    """Exact quotient, or None (UNDEFINED) for a zero denominator"""
    if denominator == 0:
        return None
    return Fraction(numerator, denominator)


def _weighted(rate: Rate, weight: Fraction) -> Optional[Fraction]:
    # an UNDEFINED rate only contributes when it carries no weight
    if weight == 0:
        return Fraction(0)
    if rate is None:
        return None
    return rate * weight


class MetricsService:
    """Service class for predictive-performance measures"""

    @staticmethod
    def confusion_by_group(dataset: Dataset) -> list[GroupConfusion]:
        """One GroupConfusion per observed sensitive profile, in vocabulary order"""
        if not dataset.records:
            raise EmptyInputError("dataset holds no records")

        counts = defaultdict(lambda: [0, 0, 0, 0])
        for record in dataset.records:
            cell = counts[record.group]
            # tp, fp, fn, tn
            index = {(1, 1): 0, (0, 1): 1, (1, 0): 2, (0, 0): 3}[(record.outcome, record.decision)]
            cell[index] += record.weight

        return [GroupConfusion(group, *counts[group]) for group in dataset.groups]

    @staticmethod
    def confusion_from_joint(joint: JointDistribution, algorithm: RandomizedAlgorithm) -> list[GroupConfusion]:
        """
        Model-implied confusion per group, scaled to integer counts

        The joint masses of (y, δ) per group are rationals; every group is scaled by the
        least common denominator of all of them, so ratios between counts equal the
        model rates exactly. Groups without mass are left out.
        """
        masses = {}
        for group in joint.groups:
            if joint.group_mass(group) == 0:
                continue
            tp = fp = fn = tn = Fraction(0)
            for context in joint.contexts:
                if joint.cell_mass(group, context) == 0:
                    continue
                hire = algorithm.hire_probability(group, context)
                qualified = joint.mass(group, context, 1)
                unqualified = joint.mass(group, context, 0)
                tp += qualified * hire
                fn += qualified * (1 - hire)
                fp += unqualified * hire
                tn += unqualified * (1 - hire)
            masses[group] = (tp, fp, fn, tn)

        scale = lcm(1, *(mass.denominator for cells in masses.values() for mass in cells))
        confusions = [
            GroupConfusion(group, *(int(mass * scale) for mass in cells))
            for group, cells in masses.items()
        ]
        logger.debug(f"Scaled model joint over {len(confusions)} groups by {scale}")
        return confusions

    @staticmethod
    def rates(confusion: GroupConfusion) -> RateBundle:
        tp, fp, fn, tn = confusion.tp, confusion.fp, confusion.fn, confusion.tn
        n = confusion.n_group
        return RateBundle(
            tpr=ratio(tp, tp + fn),
            tnr=ratio(tn, tn + fp),
            ppv=ratio(tp, tp + fp),
            npv=ratio(tn, tn + fn),
            base_rate=ratio(tp + fn, n),
            hire_rate=ratio(tp + fp, n),
        )

    @staticmethod
    def bayes_identity_holds(bundle: RateBundle) -> bool:
        """
        ppv·hire_rate = tpr·base_rate and npv·(1−hire_rate) = tnr·(1−base_rate)

        Both sides of each equation are a joint mass (P[y=1, δ=1] and P[y=0, δ=0]).
        An empty group satisfies them vacuously.
        """
        if bundle.base_rate is None or bundle.hire_rate is None:
            return True
        positive = _weighted(bundle.ppv, bundle.hire_rate) == _weighted(bundle.tpr, bundle.base_rate)
        negative = _weighted(bundle.npv, 1 - bundle.hire_rate) == _weighted(bundle.tnr, 1 - bundle.base_rate)
        return positive and negative

    @staticmethod
    def chouldechova_identity_applies(bundle: RateBundle) -> bool:
        if bundle.ppv is None or bundle.ppv == 0 or bundle.base_rate is None:
            return False
        return 0 < bundle.base_rate < 1

    @staticmethod
    def chouldechova_identity_holds(bundle: RateBundle) -> Optional[bool]:
        """
        FPR = base/(1−base) · (1−ppv)/ppv · tpr

        Returns None when a term is undefined (ppv undefined or zero, base rate 0 or 1).
        """
        if not MetricsService.chouldechova_identity_applies(bundle):
            return None
        base = bundle.base_rate
        false_positive_rate = 1 - bundle.tnr
        expected = base / (1 - base) * (1 - bundle.ppv) / bundle.ppv * bundle.tpr
        return false_positive_rate == expected
