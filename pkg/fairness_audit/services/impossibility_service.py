"""
Impossibility service: side conditions of the predictive-parity / error-rate-balance
theorem and its exhaustive verification over small rational grids
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations, product
from math import comb, gcd, lcm
from typing import Callable, Optional

from django.conf import settings

from ..domain import (
    CounterexampleReport,
    EnumerationBounds,
    GroupConfusion,
    JointDistribution,
    Profile,
    RandomizedAlgorithm,
    RateDecomposition,
    TheoremConditions,
    VerificationSummary,
)
from ..exceptions import EnumerationTooLargeError, ParityLensError
from .fairness_service import FairnessService
from .metrics_service import MetricsService, ratio

logger = logging.getLogger(__name__)

ENUMERATION_GROUPS: tuple[Profile, ...] = (('A',), ('B',))
DISTRIBUTION_CHUNK = 64

ProgressCallback = Callable[[int, int], None]


def _compositions(total: int, parts: int):
    """Every way to write total as an ordered sum of `parts` non-negative integers"""
    for bars in combinations(range(total + parts - 1), parts - 1):
        previous = -1
        composition = []
        for bar in bars:
            composition.append(bar - previous - 1)
            previous = bar
        composition.append(total + parts - 2 - previous)
        yield tuple(composition)


def probability_grid(denominator: int) -> tuple[Fraction, ...]:
    """All distinct fractions i/g in [0, 1] with g ≤ denominator, ascending"""
    return tuple(sorted({Fraction(i, g) for g in range(1, denominator + 1) for i in range(g + 1)}))


class ImpossibilityService:
    """Service class for the impossibility theorem and its verification"""

    @staticmethod
    def theorem_conditions(joint: JointDistribution, warn_omitted: bool = True) -> TheoremConditions:
        """
        Evaluate the perfect-predictor and equal-base-rates conditions exactly

        Cells without mass have no posterior; they are listed in omitted_cells.
        """
        posteriors = {}
        omitted = []
        for group in joint.groups:
            for context in joint.contexts:
                posterior = joint.posterior(group, context)
                if posterior is None:
                    omitted.append((group, context))
                else:
                    posteriors[(group, context)] = posterior
        if omitted and warn_omitted:
            logger.warning(f"{len(omitted)} (group, traits) cells carry no mass and were left out")

        base_rates = {
            group: joint.base_rate(group)
            for group in joint.groups
            if joint.group_mass(group) > 0
        }
        return TheoremConditions(
            perfect_predictor=all(posterior in (0, 1) for posterior in posteriors.values()),
            equal_base_rates=len(set(base_rates.values())) <= 1,
            per_cell_posteriors=posteriors,
            per_group_base_rates=base_rates,
            omitted_cells=tuple(omitted),
        )

    @staticmethod
    def decompose_rates(joint: JointDistribution, algorithm: RandomizedAlgorithm) -> list[RateDecomposition]:
        """
        The four masses P[y, δ | a] of every group with mass, and PPV/NPV/TPR/TNR recomputed from them
        """
        decompositions = []
        for group in joint.groups:
            group_mass = joint.group_mass(group)
            if group_mass == 0:
                continue
            tp = fp = fn = Fraction(0)
            for context in joint.contexts:
                if joint.cell_mass(group, context) == 0:
                    continue
                hire = algorithm.hire_probability(group, context)
                tp += joint.mass(group, context, 1) * hire / group_mass
                fn += joint.mass(group, context, 1) * (1 - hire) / group_mass
                fp += joint.mass(group, context, 0) * hire / group_mass
            # the four masses are fully specified by any three of them
            tn = 1 - tp - fp - fn
            if tn < 0:
                raise ParityLensError(f"joint masses of group {group} exceed 1")
            decompositions.append(RateDecomposition(
                group=group,
                true_positive=tp,
                false_positive=fp,
                false_negative=fn,
                true_negative=tn,
                ppv=ratio(tp, tp + fp),
                npv=ratio(tn, tn + fn),
                tpr=ratio(tp, tp + fn),
                tnr=ratio(tn, tn + fp),
            ))
        return decompositions

    @staticmethod
    def estimate_pairs(bounds: EnumerationBounds) -> int:
        """Upper bound on (distribution, algorithm) pairs, before duplicate grids are removed"""
        mass_cells = 2 * bounds.cell_count
        distributions = sum(
            comb(denominator + mass_cells - 1, mass_cells - 1)
            for denominator in range(1, bounds.mass_denominator + 1)
        )
        algorithms = len(probability_grid(bounds.prob_denominator)) ** bounds.cell_count
        return distributions * algorithms

    @staticmethod
    def _distributions(bounds: EnumerationBounds):
        """Mass vectors over (a, x, y) in lowest terms, ordered by denominator then composition"""
        mass_cells = 2 * bounds.cell_count
        for denominator in range(1, bounds.mass_denominator + 1):
            for parts in _compositions(denominator, mass_cells):
                yield denominator, parts

    @staticmethod
    def _joint(bounds: EnumerationBounds, denominator: int, parts: tuple[int, ...]) -> JointDistribution:
        contexts = tuple((str(i),) for i in range(bounds.x_arity))
        cells = product(ENUMERATION_GROUPS, contexts, (0, 1))
        masses = {
            cell: Fraction(count, denominator)
            for cell, count in zip(cells, parts)
            if count
        }
        return JointDistribution(masses=masses, groups=ENUMERATION_GROUPS, contexts=contexts)

    @staticmethod
    def _verify_distribution(
        bounds: EnumerationBounds,
        denominator: int,
        parts: tuple[int, ...],
        grid: tuple[Fraction, ...],
    ) -> VerificationSummary:
        summary = VerificationSummary(bounds=bounds)
        if gcd(denominator, *parts) > 1:
            return summary

        k = bounds.x_arity
        # counts[group][context][y]
        counts = [
            [(parts[(g * k + x) * 2], parts[(g * k + x) * 2 + 1]) for x in range(k)]
            for g in range(len(ENUMERATION_GROUPS))
        ]
        if any(sum(a + b for a, b in group) == 0 for group in counts):
            summary.skipped_distributions = 1
            return summary
        summary.distributions = 1

        joint = ImpossibilityService._joint(bounds, denominator, parts)
        conditions = ImpossibilityService.theorem_conditions(joint, warn_omitted=False)
        scale = lcm(*(value.denominator for value in grid))
        scaled = [int(value * scale) for value in grid]

        # confusion and rates of every per-group sub-algorithm, computed once
        per_group = []
        for g, group in enumerate(ENUMERATION_GROUPS):
            options = []
            for choice in product(range(len(grid)), repeat=k):
                tp = sum(counts[g][x][1] * scaled[choice[x]] for x in range(k))
                fn = sum(counts[g][x][1] * (scale - scaled[choice[x]]) for x in range(k))
                fp = sum(counts[g][x][0] * scaled[choice[x]] for x in range(k))
                tn = sum(counts[g][x][0] * (scale - scaled[choice[x]]) for x in range(k))
                confusion = GroupConfusion(group, tp, fp, fn, tn)
                bundle = MetricsService.rates(confusion)
                identities = [MetricsService.bayes_identity_holds(bundle)]
                chouldechova = MetricsService.chouldechova_identity_holds(bundle)
                if chouldechova is not None:
                    identities.append(chouldechova)
                options.append((choice, confusion, bundle, identities))
            per_group.append(options)

        contexts = joint.contexts
        for option_a, option_b in product(*per_group):
            summary.examined += 1
            table = {}
            for (choice, *_), group in zip((option_a, option_b), ENUMERATION_GROUPS):
                for x, index in enumerate(choice):
                    table[(group, contexts[x])] = grid[index]
            algorithm = RandomizedAlgorithm(table=table)

            for *_, identities in (option_a, option_b):
                summary.identity_checks += len(identities)
                summary.identity_failures += identities.count(False)
            for decomposition, (_, _, bundle, _) in zip(
                ImpossibilityService.decompose_rates(joint, algorithm), (option_a, option_b)
            ):
                summary.identity_checks += 1
                agrees = all(
                    getattr(decomposition, name) == bundle.get(name) for name in ('ppv', 'npv', 'tpr', 'tnr')
                )
                if not agrees:
                    summary.identity_failures += 1
                    logger.error(f"Rate decomposition disagrees with counts for {decomposition.group} on {table}")

            confusions = [option_a[1], option_b[1]]
            predictive = FairnessService.check_predictive_parity(confusions)
            balance = FairnessService.check_error_rate_balance(confusions)
            if not (predictive.satisfied and balance.satisfied):
                continue

            summary.satisfied_both += 1
            summary.perfect_predictor_count += int(conditions.perfect_predictor)
            summary.equal_base_rates_count += int(conditions.equal_base_rates)
            if conditions.escape_holds:
                continue

            report = CounterexampleReport(joint, algorithm, (predictive, balance), conditions)
            bundles = (option_a[2], option_b[2])
            if any(bundle.get(name) is None for bundle in bundles for name in ('ppv', 'npv', 'tpr', 'tnr')):
                summary.convention_artifacts.append(report)
            else:
                logger.error(f"Counterexample found: masses {parts}/{denominator}, algorithm {table}")
                summary.counterexamples.append(report)
        return summary

    @staticmethod
    def enumerate_verify(
        bounds: EnumerationBounds,
        threads: Optional[int] = None,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> VerificationSummary:
        """
        Check every (distribution, algorithm) pair of the grid against the theorem

        Args:
            bounds: group count, |x| and the two grid denominators
            threads: worker cap, defaults to PARITYLENS_THREADS
            progress_callback: called with (distributions done, distributions total)

        Returns:
            VerificationSummary; merged in enumeration order, so it does not depend on the worker count

        Raises:
            EnumerationTooLargeError: when the pair estimate exceeds PARITYLENS_MAX_ENUMERATION_PAIRS
        """
        estimate = ImpossibilityService.estimate_pairs(bounds)
        limit = settings.PARITYLENS_MAX_ENUMERATION_PAIRS
        if estimate > limit:
            raise EnumerationTooLargeError(estimate, limit)

        grid = probability_grid(bounds.prob_denominator)
        candidates = list(ImpossibilityService._distributions(bounds))
        chunks = [candidates[i:i + DISTRIBUTION_CHUNK] for i in range(0, len(candidates), DISTRIBUTION_CHUNK)]
        workers = max(1, threads or settings.PARITYLENS_THREADS)
        interval = settings.PARITYLENS_PROGRESS_INTERVAL
        logger.info(
            f"Enumerating {len(candidates)} mass vectors x {len(grid) ** bounds.cell_count} algorithms "
            f"(estimate {estimate} pairs) on {workers} workers"
        )
        algorithm_count = len(grid) ** bounds.cell_count

        def run_chunk(chunk):
            partial = VerificationSummary(bounds=bounds)
            for denominator, parts in chunk:
                partial.merge(ImpossibilityService._verify_distribution(bounds, denominator, parts, grid))
            return partial

        summary = VerificationSummary(bounds=bounds, algorithms=algorithm_count)
        done = 0
        next_report = interval
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix='enumeration_worker') as executor:
            for chunk, partial in zip(chunks, executor.map(run_chunk, chunks)):
                summary.merge(partial)
                done += len(chunk)
                if done >= next_report or done == len(candidates):
                    logger.info(f"Enumeration progress: {done}/{len(candidates)} mass vectors")
                    if progress_callback:
                        progress_callback(done, len(candidates))
                    next_report = done + interval

        logger.info(
            f"Enumeration finished: {summary.examined} pairs, {summary.satisfied_both} satisfy both criteria, "
            f"{len(summary.counterexamples)} counterexamples, {len(summary.convention_artifacts)} convention artifacts"
        )
        return summary
