"""
Report service: JSON schemas and plain-text renderings of every command's result
"""
import logging
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from django.conf import settings

from ..domain import (
    RATE_NAMES,
    CounterexampleReport,
    Criterion,
    Dataset,
    FairnessVerdict,
    FeasibleSet,
    Gender,
    GroupConfusion,
    HiringPolicy,
    JointDistribution,
    ModelRates,
    PhelpsianScenario,
    RandomizedAlgorithm,
    Rate,
    RateBundle,
    TheoremConditions,
    VerdictMode,
    VerificationSummary,
)
from ..models import AnalysisJob
from ..schemas import (
    AlgorithmEntrySchema,
    AuditReportSchema,
    CellPosteriorSchema,
    CellSchema,
    CounterexampleSchema,
    DatasetSummarySchema,
    EnumerationBoundsSchema,
    FeasiblePointSchema,
    FeasibleSetSchema,
    GenderRatesSchema,
    GroupBaseRateSchema,
    GroupRatesSchema,
    JobStatusSchema,
    MassEntrySchema,
    ModelRatesReportSchema,
    OptimalReportSchema,
    PolicySchema,
    RateValueSchema,
    RationalSchema,
    SimulationReportSchema,
    TheoremConditionsSchema,
    TraitSchema,
    VerdictSchema,
    VerificationSummarySchema,
    WitnessSchema,
)
from .dataset_service import DatasetService
from .fairness_service import FairnessService
from .impossibility_service import ImpossibilityService
from .metrics_service import MetricsService

logger = logging.getLogger(__name__)

SIX_PLACES = Decimal('0.000001')


def decimal_text(value: Fraction) -> str:
    """Six-place decimal computed from the exact value, not from a float"""
    exact = Decimal(value.numerator) / Decimal(value.denominator)
    return str(exact.quantize(SIX_PLACES, rounding=ROUND_HALF_EVEN))


def fraction_text(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def rate_text(rate: Rate) -> str:
    if rate is None:
        return 'UNDEFINED'
    return f"{decimal_text(rate)} ({fraction_text(rate)})"


def profile_text(profile: Sequence[str]) -> str:
    return ','.join(profile)


def _table(headers: Sequence[str], rows: Iterable[Sequence[str]]) -> list[str]:
    rows = [list(row) for row in rows]
    widths = [max(len(str(cell)) for cell in column) for column in zip(headers, *rows)]
    lines = ['  '.join(str(cell).ljust(width) for cell, width in zip(headers, widths)).rstrip()]
    lines.append('  '.join('-' * width for width in widths))
    lines.extend('  '.join(str(cell).ljust(width) for cell, width in zip(row, widths)).rstrip() for row in rows)
    return lines


class ReportService:
    """Service class converting results into report schemas and text"""

    @staticmethod
    def rational(value: Fraction) -> RationalSchema:
        return RationalSchema.from_fraction(value)

    @staticmethod
    def rate_value(rate: Rate) -> RateValueSchema:
        if rate is None:
            return RateValueSchema()
        return RateValueSchema(exact=RationalSchema.from_fraction(rate), decimal=decimal_text(rate))

    @staticmethod
    def verdict(verdict: FairnessVerdict) -> VerdictSchema:
        witness = None
        if verdict.witness is not None:
            w = verdict.witness
            witness = WitnessSchema(
                group_a=list(w.group_a),
                group_b=list(w.group_b),
                x=list(w.context) if w.context is not None else None,
                value_a=RationalSchema.from_fraction(w.value_a) if w.value_a is not None else None,
                value_b=RationalSchema.from_fraction(w.value_b) if w.value_b is not None else None,
                kind=w.kind.value,
            )
        return VerdictSchema(
            criterion=verdict.criterion.value,
            satisfied=verdict.satisfied,
            gap=RationalSchema.from_fraction(verdict.gap),
            witness=witness,
            mode=verdict.mode.value,
            empirical=verdict.empirical,
            components=[ReportService.verdict(part) for part in verdict.components],
        )

    @staticmethod
    def group_rates(confusion: GroupConfusion) -> GroupRatesSchema:
        bundle = MetricsService.rates(confusion)
        return GroupRatesSchema(
            group=list(confusion.group),
            n_group=confusion.n_group,
            tp=confusion.tp,
            fp=confusion.fp,
            fn=confusion.fn,
            tn=confusion.tn,
            **{name: ReportService.rate_value(bundle.get(name)) for name in RATE_NAMES},
        )

    @staticmethod
    def gender_rates(gender: Gender, bundle: RateBundle) -> GenderRatesSchema:
        return GenderRatesSchema(
            gender=gender.value,
            **{name: ReportService.rate_value(bundle.get(name)) for name in RATE_NAMES},
        )

    @staticmethod
    def conditions(conditions: TheoremConditions) -> TheoremConditionsSchema:
        return TheoremConditionsSchema(
            perfect_predictor=conditions.perfect_predictor,
            equal_base_rates=conditions.equal_base_rates,
            posteriors=[
                CellPosteriorSchema(group=list(group), x=list(context), posterior=RationalSchema.from_fraction(value))
                for (group, context), value in conditions.per_cell_posteriors.items()
            ],
            base_rates=[
                GroupBaseRateSchema(group=list(group), base_rate=RationalSchema.from_fraction(value))
                for group, value in conditions.per_group_base_rates.items()
            ],
            omitted_cells=[
                CellSchema(group=list(group), x=list(context))
                for group, context in conditions.omitted_cells
            ],
        )

    @staticmethod
    def dataset_summary(dataset: Dataset) -> DatasetSummarySchema:
        schema = dataset.schema
        return DatasetSummarySchema(
            n=dataset.n,
            groups=[list(group) for group in dataset.groups],
            sensitive=[TraitSchema(name=dim.name, values=list(dim.labels)) for dim in schema.sensitive],
            permissible=[TraitSchema(name=dim.name, values=list(dim.labels)) for dim in schema.permissible],
            outcome=schema.outcome,
            decision=schema.decision,
        )

    @staticmethod
    def _mode(tolerance: Optional[float]) -> str:
        return VerdictMode.EXACT.value if tolerance is None else VerdictMode.FLOAT.value

    @staticmethod
    def build_audit_report(
        dataset: Dataset,
        requested: Sequence[Criterion] = tuple(Criterion),
        tolerance: Optional[float] = None,
    ) -> AuditReportSchema:
        """Metrics, every fairness verdict and the theorem conditions of the empirical joint"""
        confusions = MetricsService.confusion_by_group(dataset)
        verdicts = FairnessService.check_all(dataset, tolerance)
        conditions = ImpossibilityService.theorem_conditions(DatasetService.joint_distribution(dataset))
        wanted = set(requested)
        requested = [criterion for criterion in Criterion if criterion in wanted]
        return AuditReportSchema(
            tool_version=settings.PARITYLENS_VERSION,
            mode=ReportService._mode(tolerance),
            tolerance=tolerance,
            dataset=ReportService.dataset_summary(dataset),
            groups=[ReportService.group_rates(confusion) for confusion in confusions],
            verdicts=[ReportService.verdict(verdict) for verdict in verdicts],
            theorem_conditions=ReportService.conditions(conditions),
            requested_criteria=[criterion.value for criterion in requested],
            all_satisfied=all(
                verdict.satisfied for verdict in verdicts if verdict.criterion in requested
            ),
        )

    @staticmethod
    def _rate_cell(rate: RateValueSchema) -> str:
        if rate.exact is None:
            return 'UNDEFINED'
        return f"{rate.decimal} ({fraction_text(rate.exact.to_fraction())})"

    @staticmethod
    def _verdict_lines(verdicts: Sequence[VerdictSchema]) -> list[str]:
        rows = []
        for verdict in verdicts:
            detail = ''
            if verdict.witness is not None:
                w = verdict.witness
                values = [
                    'UNDEFINED' if value is None else fraction_text(value.to_fraction())
                    for value in (w.value_a, w.value_b)
                ]
                at = f" at x={profile_text(w.x)}" if w.x is not None else ''
                detail = f"{profile_text(w.group_a)}={values[0]} vs {profile_text(w.group_b)}={values[1]}{at}"
                if w.kind == 'undefined_mismatch':
                    detail += ' (undefined mismatch)'
            flag = ' [empirical]' if verdict.empirical else ''
            rows.append((
                verdict.criterion + flag,
                'satisfied' if verdict.satisfied else 'VIOLATED',
                fraction_text(verdict.gap.to_fraction()),
                detail,
            ))
        return _table(('criterion', 'verdict', 'gap', 'witness'), rows)

    @staticmethod
    def _conditions_lines(conditions: TheoremConditionsSchema) -> list[str]:
        lines = [
            f"perfect predictor: {'yes' if conditions.perfect_predictor else 'no'}",
            f"equal base rates:  {'yes' if conditions.equal_base_rates else 'no'}",
        ]
        for entry in conditions.base_rates:
            lines.append(f"  base rate {profile_text(entry.group)}: {rate_text(entry.base_rate.to_fraction())}")
        for cell in conditions.omitted_cells:
            lines.append(f"  no mass at {profile_text(cell.group)}, x={profile_text(cell.x)}; posterior omitted")
        return lines

    @staticmethod
    def render_audit(report: AuditReportSchema) -> str:
        header = f"paritylens {report.tool_version}  mode: {report.mode}"
        if report.tolerance is not None:
            header += f"  tolerance: {report.tolerance:g}"
        lines = [header, f"records: {report.dataset.n}  groups: {len(report.groups)}", '']
        lines += _table(
            ('group', 'n', 'tp', 'fp', 'fn', 'tn', *RATE_NAMES),
            (
                (profile_text(row.group), row.n_group, row.tp, row.fp, row.fn, row.tn,
                 *(ReportService._rate_cell(getattr(row, name)) for name in RATE_NAMES))
                for row in report.groups
            ),
        )
        lines += ['', *ReportService._verdict_lines(report.verdicts), '']
        lines += ReportService._conditions_lines(report.theorem_conditions)
        lines += ['', f"requested criteria {'all satisfied' if report.all_satisfied else 'VIOLATED'}"]
        return '\n'.join(lines)

    @staticmethod
    def mass_entries(joint: JointDistribution) -> list[MassEntrySchema]:
        return [
            MassEntrySchema(group=list(group), x=list(context), y=outcome, mass=RationalSchema.from_fraction(mass))
            for (group, context, outcome), mass in joint.masses.items()
        ]

    @staticmethod
    def algorithm_entries(algorithm: RandomizedAlgorithm) -> list[AlgorithmEntrySchema]:
        return [
            AlgorithmEntrySchema(
                group=list(group), x=list(context), hire_probability=RationalSchema.from_fraction(probability)
            )
            for (group, context), probability in algorithm.table.items()
        ]

    @staticmethod
    def counterexample(report: CounterexampleReport) -> CounterexampleSchema:
        return CounterexampleSchema(
            distribution=ReportService.mass_entries(report.distribution),
            algorithm=ReportService.algorithm_entries(report.algorithm),
            verdicts=[ReportService.verdict(verdict) for verdict in report.verdicts],
            conditions=ReportService.conditions(report.conditions),
        )

    @staticmethod
    def verification_summary(summary: VerificationSummary) -> VerificationSummarySchema:
        bounds = summary.bounds
        return VerificationSummarySchema(
            tool_version=settings.PARITYLENS_VERSION,
            bounds=EnumerationBoundsSchema(
                x_arity=bounds.x_arity,
                mass_denominator=bounds.mass_denominator,
                prob_denominator=bounds.prob_denominator,
                group_count=bounds.group_count,
            ),
            distributions=summary.distributions,
            algorithms=summary.algorithms,
            skipped_distributions=summary.skipped_distributions,
            examined=summary.examined,
            satisfied_both=summary.satisfied_both,
            perfect_predictor_count=summary.perfect_predictor_count,
            equal_base_rates_count=summary.equal_base_rates_count,
            identity_checks=summary.identity_checks,
            identity_failures=summary.identity_failures,
            counterexamples=[ReportService.counterexample(report) for report in summary.counterexamples],
            convention_artifacts=[ReportService.counterexample(report) for report in summary.convention_artifacts],
        )

    @staticmethod
    def render_verification(report: VerificationSummarySchema) -> str:
        bounds = report.bounds
        lines = [
            f"paritylens {report.tool_version}  mode: exact",
            f"groups: {bounds.group_count}  |x|: {bounds.x_arity}  "
            f"mass denominator <= {bounds.mass_denominator}  probability denominator <= {bounds.prob_denominator}",
            f"distributions: {report.distributions} (skipped {report.skipped_distributions} with an empty group)",
            f"algorithms per distribution: {report.algorithms}",
            f"pairs examined: {report.examined}",
            f"predictive parity and error rate balance: {report.satisfied_both}",
            f"  with perfect predictor: {report.perfect_predictor_count}",
            f"  with equal base rates:  {report.equal_base_rates_count}",
            f"identity checks: {report.identity_checks} (failures {report.identity_failures})",
            f"convention artifacts: {len(report.convention_artifacts)}",
            f"counterexamples: {len(report.counterexamples)}",
        ]
        for index, counterexample in enumerate(report.counterexamples, start=1):
            masses = ', '.join(
                f"P({profile_text(entry.group)},{profile_text(entry.x)},{entry.y})={fraction_text(entry.mass.to_fraction())}"
                for entry in counterexample.distribution
            )
            hires = ', '.join(
                f"{profile_text(entry.group)},{profile_text(entry.x)}:{fraction_text(entry.hire_probability.to_fraction())}"
                for entry in counterexample.algorithm
            )
            lines += [f"  #{index} masses {masses}", f"      algorithm {hires}"]
        lines.append('theorem holds on this grid' if not report.counterexamples else 'THEOREM VIOLATED on this grid')
        return '\n'.join(lines)

    @staticmethod
    def policy(policy: HiringPolicy) -> PolicySchema:
        return PolicySchema(d_m=RationalSchema.from_fraction(policy.d_m), d_f=RationalSchema.from_fraction(policy.d_f))

    @staticmethod
    def model_rates_report(
        scenario: PhelpsianScenario,
        policy: HiringPolicy,
        rates: ModelRates,
        verdicts: Sequence[FairnessVerdict],
    ) -> ModelRatesReportSchema:
        return ModelRatesReportSchema(
            tool_version=settings.PARITYLENS_VERSION,
            variant=scenario.variant.value,
            degenerate=scenario.is_degenerate,
            policy=ReportService.policy(policy),
            rates=[ReportService.gender_rates(gender, rates[gender]) for gender in Gender],
            verdicts=[ReportService.verdict(verdict) for verdict in verdicts],
        )

    @staticmethod
    def _gender_rate_lines(rates: Sequence[GenderRatesSchema]) -> list[str]:
        return _table(
            ('gender', *RATE_NAMES),
            ((row.gender, *(ReportService._rate_cell(getattr(row, name)) for name in RATE_NAMES)) for row in rates),
        )

    @staticmethod
    def _policy_text(policy: PolicySchema) -> str:
        return (
            f"d_m = {rate_text(policy.d_m.to_fraction())}  "
            f"d_f = {rate_text(policy.d_f.to_fraction())}"
        )

    @staticmethod
    def render_model_rates(report: ModelRatesReportSchema) -> str:
        lines = [
            f"paritylens {report.tool_version}  mode: exact",
            f"variant: {report.variant}{'  (degenerate test precision)' if report.degenerate else ''}",
            f"policy: {ReportService._policy_text(report.policy)}",
            '',
            *ReportService._gender_rate_lines(report.rates),
            '',
            *ReportService._verdict_lines(report.verdicts),
        ]
        return '\n'.join(lines)

    @staticmethod
    def optimal_report(
        scenario: PhelpsianScenario,
        threshold: Fraction,
        beliefs: dict,
        policy: HiringPolicy,
        rule: RandomizedAlgorithm,
        verdicts: Sequence[FairnessVerdict],
    ) -> OptimalReportSchema:
        return OptimalReportSchema(
            tool_version=settings.PARITYLENS_VERSION,
            variant=scenario.variant.value,
            threshold=RationalSchema.from_fraction(threshold),
            posteriors=[
                CellPosteriorSchema(group=list(group), x=list(context), posterior=RationalSchema.from_fraction(value))
                for (group, context), value in beliefs.items()
            ],
            policy=ReportService.policy(policy),
            decision_rule=ReportService.algorithm_entries(rule),
            verdicts=[ReportService.verdict(verdict) for verdict in verdicts],
        )

    @staticmethod
    def render_optimal(report: OptimalReportSchema) -> str:
        threshold = report.threshold.to_fraction()
        lines = [
            f"paritylens {report.tool_version}  mode: exact",
            f"variant: {report.variant}",
            f"threshold s̄ = {fraction_text(threshold)} ({decimal_text(threshold)})",
            '',
        ]
        hires = {
            (tuple(entry.group), tuple(entry.x)): entry.hire_probability.to_fraction()
            for entry in report.decision_rule
        }
        lines += _table(
            ('gender', 'x', 'posterior', 'hire'),
            (
                (profile_text(entry.group), profile_text(entry.x), rate_text(entry.posterior.to_fraction()),
                 fraction_text(hires[(tuple(entry.group), tuple(entry.x))]))
                for entry in report.posteriors
            ),
        )
        lines += ['', f"optimal policy: {ReportService._policy_text(report.policy)}", '']
        lines += ReportService._verdict_lines(report.verdicts)
        return '\n'.join(lines)

    @staticmethod
    def feasible_set(feasible: FeasibleSet) -> FeasibleSetSchema:
        return FeasibleSetSchema(
            tool_version=settings.PARITYLENS_VERSION,
            goal=feasible.goal.value,
            variant=feasible.variant.value,
            grid=feasible.grid,
            shape=feasible.shape.value,
            points=[
                FeasiblePointSchema(
                    d_m=RationalSchema.from_fraction(point.d_m),
                    d_f=RationalSchema.from_fraction(point.d_f),
                    exact=point.exact,
                )
                for point in feasible.points
            ],
            findings=sorted(finding.value for finding in feasible.findings),
        )

    @staticmethod
    def render_feasible_set(report: FeasibleSetSchema, limit: int = 20) -> str:
        lines = [
            f"paritylens {report.tool_version}  tolerance: {settings.PARITYLENS_FLOAT_TOLERANCE:g}",
            f"goal: {report.goal}  variant: {report.variant}  grid: {report.grid}x{report.grid}",
        ]
        if report.shape == 'empty':
            lines.append('feasible set: empty')
        else:
            lines.append(f"feasible set: {report.shape} ({len(report.points)} points)")
            for point in report.points[:limit]:
                marker = '' if point.exact else '  (bisection)'
                lines.append(
                    f"  d_m = {rate_text(point.d_m.to_fraction())}  d_f = {rate_text(point.d_f.to_fraction())}{marker}"
                )
            if len(report.points) > limit:
                lines.append(f"  ... {len(report.points) - limit} more")
        lines.append(f"findings: {', '.join(report.findings) if report.findings else 'none'}")
        return '\n'.join(lines)

    @staticmethod
    def simulation_report(
        dataset: Dataset,
        seed: int,
        rates: ModelRates,
        output: Optional[str] = None,
    ) -> SimulationReportSchema:
        return SimulationReportSchema(
            tool_version=settings.PARITYLENS_VERSION,
            n=dataset.n,
            seed=seed,
            output=output,
            groups=[ReportService.group_rates(confusion) for confusion in MetricsService.confusion_by_group(dataset)],
            model_rates=[ReportService.gender_rates(gender, rates[gender]) for gender in Gender],
        )

    @staticmethod
    def render_simulation(report: SimulationReportSchema) -> str:
        lines = [
            f"paritylens {report.tool_version}  simulated records: {report.n}  seed: {report.seed}",
        ]
        if report.output:
            lines.append(f"written to {report.output}")
        lines += ['', 'empirical rates:']
        lines += _table(
            ('group', 'n', 'tp', 'fp', 'fn', 'tn', *RATE_NAMES),
            (
                (profile_text(row.group), row.n_group, row.tp, row.fp, row.fn, row.tn,
                 *(ReportService._rate_cell(getattr(row, name)) for name in RATE_NAMES))
                for row in report.groups
            ),
        )
        lines += ['', 'closed-form rates:', *ReportService._gender_rate_lines(report.model_rates)]
        return '\n'.join(lines)

    @staticmethod
    def job_status(job: AnalysisJob) -> JobStatusSchema:
        return JobStatusSchema(
            job_id=str(job.job_id),
            kind=job.kind,
            status=job.status,
            progress=job.progress,
            result=job.result_data,
            error_message=job.error_message,
        )

    @staticmethod
    def render_job_status(report: JobStatusSchema) -> str:
        lines = [
            f"job {report.job_id}  kind: {report.kind}",
            f"status: {report.status}  progress: {report.progress}%",
        ]
        if report.error_message:
            lines.append(f"error: {report.error_message}")
        if report.status == 'pending':
            lines.append(f"check progress with: manage.py job_status {report.job_id}")
        return '\n'.join(lines)
