from .dataset import (
    ColumnRoles,
    Dataset,
    DatasetSchema,
    IndividualRecord,
    JointDistribution,
    ModelJoint,
    Profile,
    RandomizedAlgorithm,
    TraitDimension,
    TraitRole,
    TraitValue,
)
from .fairness import Criterion, FairnessVerdict, VerdictMode, Witness, WitnessKind
from .hiring import (
    EmployerPayoffs,
    FeasibilityFinding,
    FeasiblePoint,
    FeasibleSet,
    FeasibleShape,
    Gender,
    HiringPolicy,
    ModelRates,
    PhelpsianScenario,
    ScenarioVariant,
)
from .impossibility import (
    CounterexampleReport,
    EnumerationBounds,
    TheoremConditions,
    VerificationSummary,
)
from .metrics import RATE_NAMES, GroupConfusion, Rate, RateBundle, RateDecomposition

__all__ = [
    'RATE_NAMES',
    'ColumnRoles',
    'CounterexampleReport',
    'Criterion',
    'Dataset',
    'DatasetSchema',
    'EmployerPayoffs',
    'EnumerationBounds',
    'FairnessVerdict',
    'FeasibilityFinding',
    'FeasiblePoint',
    'FeasibleSet',
    'FeasibleShape',
    'Gender',
    'GroupConfusion',
    'HiringPolicy',
    'IndividualRecord',
    'JointDistribution',
    'ModelJoint',
    'ModelRates',
    'PhelpsianScenario',
    'Profile',
    'RandomizedAlgorithm',
    'Rate',
    'RateBundle',
    'RateDecomposition',
    'ScenarioVariant',
    'TheoremConditions',
    'TraitDimension',
    'TraitRole',
    'TraitValue',
    'VerdictMode',
    'VerificationSummary',
    'Witness',
    'WitnessKind',
]
