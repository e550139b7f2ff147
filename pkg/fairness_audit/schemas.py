from fractions import Fraction
from typing import Annotated, List, Literal, Optional

from ninja import Schema
from pydantic import BeforeValidator, ConfigDict, Field, field_validator


def parse_rational(value):
    """Read a JSON number or a string such as '0.3', '3/10' or '-2' as an exact Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("expected a number, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # repr keeps the shortest decimal form, so 0.3 becomes 3/10 rather than its binary expansion
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ZeroDivisionError:
            raise ValueError(f"{value!r} has a zero denominator") from None
    raise ValueError(f"cannot read {value!r} as a rational number")


RationalInput = Annotated[Fraction, BeforeValidator(parse_rational)]


# Common Schemas
class RationalSchema(Schema):
    num: int
    den: int

    @classmethod
    def from_fraction(cls, value: Fraction) -> "RationalSchema":
        return cls(num=value.numerator, den=value.denominator)

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, self.den)


class RateValueSchema(Schema):
    exact: Optional[RationalSchema] = None  # None means UNDEFINED
    decimal: Optional[str] = None


# Dataset file (JSON input/output)
class TraitSchema(Schema):
    name: str
    values: List[str] = []


class DatasetLayoutSchema(Schema):
    sensitive: List[TraitSchema]
    permissible: List[TraitSchema] = []
    outcome: str
    decision: str
    weight: Optional[str] = None


class DatasetRecordSchema(Schema):
    sensitive: List[str]
    permissible: List[str] = []
    outcome: int
    decision: int
    weight: int = 1


class DatasetFileSchema(Schema):
    model_config = ConfigDict(populate_by_name=True)

    layout: DatasetLayoutSchema = Field(alias='schema')
    records: List[DatasetRecordSchema]


# Scenario file (JSON or key-value)
class ScenarioFileSchema(Schema):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    variant: Literal['PREVALENCE', 'PRECISION']
    p_m: Optional[RationalInput] = None
    p_f: Optional[RationalInput] = None
    p_tilde: Optional[RationalInput] = None
    phi: Optional[RationalInput] = None
    phi_m: Optional[RationalInput] = None
    phi_f: Optional[RationalInput] = None
    B: RationalInput
    omega: RationalInput
    d_m: Optional[RationalInput] = None
    d_f: Optional[RationalInput] = None
    gender_split: Optional[RationalInput] = None  # share of women in the population

    @field_validator('variant', mode='before')
    @classmethod
    def normalize_variant(cls, value):
        return value.strip().upper() if isinstance(value, str) else value


# Metrics and verdicts
class GroupRatesSchema(Schema):
    group: List[str]
    n_group: int
    tp: int
    fp: int
    fn: int
    tn: int
    tpr: RateValueSchema
    tnr: RateValueSchema
    ppv: RateValueSchema
    npv: RateValueSchema
    base_rate: RateValueSchema
    hire_rate: RateValueSchema


class WitnessSchema(Schema):
    group_a: List[str]
    group_b: List[str]
    x: Optional[List[str]] = None
    value_a: Optional[RationalSchema] = None
    value_b: Optional[RationalSchema] = None
    kind: Literal['gap', 'undefined_mismatch']


class VerdictSchema(Schema):
    criterion: str
    satisfied: bool
    gap: RationalSchema
    witness: Optional[WitnessSchema] = None
    mode: Literal['exact', 'float']
    empirical: bool = False
    components: List['VerdictSchema'] = []


VerdictSchema.model_rebuild()


class CellPosteriorSchema(Schema):
    group: List[str]
    x: List[str]
    posterior: RationalSchema


class GroupBaseRateSchema(Schema):
    group: List[str]
    base_rate: RationalSchema


class CellSchema(Schema):
    group: List[str]
    x: List[str]


class TheoremConditionsSchema(Schema):
    perfect_predictor: bool
    equal_base_rates: bool
    posteriors: List[CellPosteriorSchema]
    base_rates: List[GroupBaseRateSchema]
    omitted_cells: List[CellSchema] = []


class DatasetSummarySchema(Schema):
    n: int
    groups: List[List[str]]
    sensitive: List[TraitSchema]
    permissible: List[TraitSchema]
    outcome: str
    decision: str


class AuditReportSchema(Schema):
    tool_version: str
    mode: Literal['exact', 'float']
    tolerance: Optional[float] = None
    dataset: DatasetSummarySchema
    groups: List[GroupRatesSchema]
    verdicts: List[VerdictSchema]
    theorem_conditions: TheoremConditionsSchema
    requested_criteria: List[str]
    all_satisfied: bool


# Impossibility verification
class EnumerationBoundsSchema(Schema):
    x_arity: int
    mass_denominator: int
    prob_denominator: int
    group_count: int


class MassEntrySchema(Schema):
    group: List[str]
    x: List[str]
    y: int
    mass: RationalSchema


class AlgorithmEntrySchema(Schema):
    group: List[str]
    x: List[str]
    hire_probability: RationalSchema


class CounterexampleSchema(Schema):
    distribution: List[MassEntrySchema]
    algorithm: List[AlgorithmEntrySchema]
    verdicts: List[VerdictSchema]
    conditions: TheoremConditionsSchema


class VerificationSummarySchema(Schema):
    tool_version: str
    bounds: EnumerationBoundsSchema
    distributions: int
    algorithms: int
    skipped_distributions: int
    examined: int
    satisfied_both: int
    perfect_predictor_count: int
    equal_base_rates_count: int
    identity_checks: int
    identity_failures: int
    counterexamples: List[CounterexampleSchema]
    convention_artifacts: List[CounterexampleSchema]


# Hiring model
class PolicySchema(Schema):
    d_m: RationalSchema
    d_f: RationalSchema


class GenderRatesSchema(Schema):
    gender: str
    tpr: RateValueSchema
    tnr: RateValueSchema
    ppv: RateValueSchema
    npv: RateValueSchema
    base_rate: RateValueSchema
    hire_rate: RateValueSchema


class ModelRatesReportSchema(Schema):
    tool_version: str
    variant: str
    degenerate: bool
    policy: PolicySchema
    rates: List[GenderRatesSchema]
    verdicts: List[VerdictSchema]


class OptimalReportSchema(Schema):
    tool_version: str
    variant: str
    threshold: RationalSchema
    posteriors: List[CellPosteriorSchema]
    policy: PolicySchema
    decision_rule: List[AlgorithmEntrySchema]
    verdicts: List[VerdictSchema]


class FeasiblePointSchema(Schema):
    d_m: RationalSchema
    d_f: RationalSchema
    exact: bool


class FeasibleSetSchema(Schema):
    tool_version: str
    goal: str
    variant: str
    grid: int
    shape: Literal['empty', 'points', 'curve', 'region']
    points: List[FeasiblePointSchema]
    findings: List[str]


class SimulationReportSchema(Schema):
    tool_version: str
    n: int
    seed: int
    output: Optional[str] = None
    groups: List[GroupRatesSchema]
    model_rates: List[GenderRatesSchema]


# Background jobs
class JobStatusSchema(Schema):
    job_id: str
    kind: str
    status: str
    progress: int
    result: Optional[dict] = None
    error_message: Optional[str] = None
