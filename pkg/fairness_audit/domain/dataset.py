"""
Decision datasets: trait vocabularies, records, empirical joints and algorithm tables
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Mapping, Optional

from ..exceptions import RecordValueError, SchemaError

# A profile is the tuple of category labels of one trait role, e.g. ('f',) or ('2',)
Profile = tuple[str, ...]


class TraitRole(str, Enum):
    SENSITIVE = 'sensitive'
    PERMISSIBLE = 'permissible'


@dataclass(frozen=True)
class TraitValue:
    id: int
    label: str


@dataclass(frozen=True)
class TraitDimension:
    """One categorical column; value ids are dense 0..k-1 in first-appearance order"""

    name: str
    role: TraitRole
    values: tuple[TraitValue, ...] = ()

    def __post_init__(self):
        labels = [value.label for value in self.values]
        if len(set(labels)) != len(labels):
            raise SchemaError(f"duplicate labels in trait '{self.name}'")
        if [value.id for value in self.values] != list(range(len(self.values))):
            raise SchemaError(f"trait '{self.name}' ids are not dense 0..k-1")

    @classmethod
    def from_labels(cls, name: str, role: TraitRole, labels) -> TraitDimension:
        return cls(name, role, tuple(TraitValue(i, label) for i, label in enumerate(labels)))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(value.label for value in self.values)

    def value(self, label: str) -> TraitValue:
        for candidate in self.values:
            if candidate.label == label:
                return candidate
        raise SchemaError(f"'{label}' is not in the vocabulary of trait '{self.name}'")


@dataclass(frozen=True)
class DatasetSchema:
    sensitive: tuple[TraitDimension, ...]
    permissible: tuple[TraitDimension, ...]
    outcome: str
    decision: str
    weight: Optional[str] = None

    def __post_init__(self):
        if not self.sensitive:
            raise SchemaError("at least one sensitive column is required")
        names = [dim.name for dim in self.sensitive + self.permissible]
        names += [self.outcome, self.decision] + ([self.weight] if self.weight else [])
        if len(set(names)) != len(names):
            raise SchemaError(f"a column is assigned more than one role: {names}")

    @property
    def column_names(self) -> list[str]:
        names = [dim.name for dim in self.sensitive + self.permissible]
        return names + [self.outcome, self.decision] + ([self.weight] if self.weight else [])


@dataclass(frozen=True)
class IndividualRecord:
    """One observation; weight is the multiplicity of identical rows"""

    sensitive: tuple[TraitValue, ...]
    permissible: tuple[TraitValue, ...]
    outcome: int
    decision: int
    weight: int = 1

    def __post_init__(self):
        if self.outcome not in (0, 1):
            raise RecordValueError(f"outcome must be 0 or 1, got {self.outcome!r}")
        if self.decision not in (0, 1):
            raise RecordValueError(f"decision must be 0 or 1, got {self.decision!r}")
        if self.weight < 1:
            raise RecordValueError(f"weight must be a positive integer, got {self.weight!r}")

    @property
    def group(self) -> Profile:
        return tuple(value.label for value in self.sensitive)

    @property
    def context(self) -> Profile:
        return tuple(value.label for value in self.permissible)


@dataclass(frozen=True)
class Dataset:
    schema: DatasetSchema
    records: tuple[IndividualRecord, ...]

    def __post_init__(self):
        arity = (len(self.schema.sensitive), len(self.schema.permissible))
        for index, record in enumerate(self.records):
            if (len(record.sensitive), len(record.permissible)) != arity:
                raise SchemaError(f"record {index} does not match the schema arity {arity}")

    @property
    def n(self) -> int:
        return sum(record.weight for record in self.records)

    @property
    def groups(self) -> tuple[Profile, ...]:
        """Observed sensitive profiles in vocabulary order"""
        return _ordered_profiles(record.sensitive for record in self.records)

    @property
    def contexts(self) -> tuple[Profile, ...]:
        """Observed permissible profiles in vocabulary order"""
        return _ordered_profiles(record.permissible for record in self.records)


def _ordered_profiles(profiles) -> tuple[Profile, ...]:
    distinct = sorted(set(profiles), key=lambda profile: tuple(value.id for value in profile))
    return tuple(tuple(value.label for value in profile) for profile in distinct)


@dataclass(frozen=True)
class JointDistribution:
    """Exact probability masses over (sensitive profile, permissible profile, outcome)"""

    masses: Mapping[tuple[Profile, Profile, int], Fraction]
    groups: tuple[Profile, ...]
    contexts: tuple[Profile, ...]

    def mass(self, group: Profile, context: Profile, outcome: int) -> Fraction:
        return self.masses.get((group, context, outcome), Fraction(0))

    def cell_mass(self, group: Profile, context: Profile) -> Fraction:
        return self.mass(group, context, 0) + self.mass(group, context, 1)

    def group_mass(self, group: Profile) -> Fraction:
        return sum((self.cell_mass(group, context) for context in self.contexts), Fraction(0))

    def total(self) -> Fraction:
        return sum(self.masses.values(), Fraction(0))

    def posterior(self, group: Profile, context: Profile) -> Optional[Fraction]:
        """P[y=1 | a, x]; None for a cell without mass"""
        cell = self.cell_mass(group, context)
        if cell == 0:
            return None
        return self.mass(group, context, 1) / cell

    def base_rate(self, group: Profile) -> Optional[Fraction]:
        """P[y=1 | a]; None for a group without mass"""
        total = self.group_mass(group)
        if total == 0:
            return None
        qualified = sum((self.mass(group, context, 1) for context in self.contexts), Fraction(0))
        return qualified / total

    def support(self) -> list[tuple[Profile, Profile]]:
        return [
            (group, context)
            for group in self.groups
            for context in self.contexts
            if self.cell_mass(group, context) > 0
        ]


@dataclass(frozen=True)
class RandomizedAlgorithm:
    """Hire probability for every (sensitive profile, permissible profile) cell"""

    table: Mapping[tuple[Profile, Profile], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        for cell, probability in self.table.items():
            if not 0 <= probability <= 1:
                raise RecordValueError(f"hire probability for {cell} is outside [0, 1]: {probability}")

    def hire_probability(self, group: Profile, context: Profile) -> Fraction:
        try:
            return self.table[(group, context)]
        except KeyError:
            raise SchemaError(f"algorithm has no entry for group {group} with traits {context}") from None

    @property
    def groups(self) -> tuple[Profile, ...]:
        return tuple(dict.fromkeys(group for group, _ in self.table))

    @property
    def contexts(self) -> tuple[Profile, ...]:
        return tuple(dict.fromkeys(context for _, context in self.table))

    def covers(self, joint: JointDistribution) -> bool:
        return all(cell in self.table for cell in joint.support())


@dataclass(frozen=True)
class ModelJoint:
    """A joint distribution over (a, x, y) paired with the algorithm deciding on it"""

    joint: JointDistribution
    algorithm: RandomizedAlgorithm


@dataclass(frozen=True)
class ColumnRoles:
    """Which input columns hold sensitive traits, permissible traits, y, δ and weights"""

    sensitive: tuple[str, ...]
    permissible: tuple[str, ...] = ()
    outcome: Optional[str] = None
    decision: Optional[str] = None
    weight: Optional[str] = None

    def __post_init__(self):
        if not self.sensitive:
            raise SchemaError("at least one sensitive column is required")
        if not self.outcome:
            raise SchemaError("exactly one outcome column is required")
        if not self.decision:
            raise SchemaError("exactly one decision column is required")
        names = [*self.sensitive, *self.permissible, self.outcome, self.decision] + ([self.weight] if self.weight else [])
        if len(set(names)) != len(names):
            raise SchemaError(f"a column is assigned more than one role: {names}")
