"""
Fairness criteria and witnessed verdicts
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from .dataset import Profile
from .metrics import Rate


class Criterion(str, Enum):
    ANTI_CLASSIFICATION = 'ANTI_CLASSIFICATION'
    POS_PRED_PARITY = 'POS_PRED_PARITY'
    NEG_PRED_PARITY = 'NEG_PRED_PARITY'
    PREDICTIVE_PARITY = 'PREDICTIVE_PARITY'
    POS_ERROR_BALANCE = 'POS_ERROR_BALANCE'
    NEG_ERROR_BALANCE = 'NEG_ERROR_BALANCE'
    ERROR_RATE_BALANCE = 'ERROR_RATE_BALANCE'
    DEMOGRAPHIC_PARITY = 'DEMOGRAPHIC_PARITY'
    COND_DEMOGRAPHIC_PARITY = 'COND_DEMOGRAPHIC_PARITY'

    @classmethod
    def parse(cls, text: str) -> Criterion:
        """Accept canonical names plus the short CLI spellings (erb, ppv, dp, ...)"""
        key = text.strip().upper().replace('-', '_')
        return cls(CRITERION_ALIASES.get(key, key))


CRITERION_ALIASES = {
    'AC': 'ANTI_CLASSIFICATION',
    'PPV': 'POS_PRED_PARITY',
    'NPV': 'NEG_PRED_PARITY',
    'PP': 'PREDICTIVE_PARITY',
    'TPR': 'POS_ERROR_BALANCE',
    'TNR': 'NEG_ERROR_BALANCE',
    'ERB': 'ERROR_RATE_BALANCE',
    'DP': 'DEMOGRAPHIC_PARITY',
    'CDP': 'COND_DEMOGRAPHIC_PARITY',
}


class VerdictMode(str, Enum):
    EXACT = 'exact'
    FLOAT = 'float'


class WitnessKind(str, Enum):
    GAP = 'gap'
    UNDEFINED_MISMATCH = 'undefined_mismatch'


@dataclass(frozen=True)
class Witness:
    group_a: Profile
    group_b: Profile
    value_a: Rate
    value_b: Rate
    kind: WitnessKind = WitnessKind.GAP
    context: Optional[Profile] = None


@dataclass(frozen=True)
class FairnessVerdict:
    """
    Outcome of one criterion. ``gap`` is the largest absolute difference between
    defined values; a one-sided UNDEFINED comparison is reported through the witness.
    Composite criteria keep their positive/negative parts in ``components``.
    """

    criterion: Criterion
    satisfied: bool
    gap: Fraction
    witness: Optional[Witness] = None
    mode: VerdictMode = VerdictMode.EXACT
    empirical: bool = False
    components: tuple[FairnessVerdict, ...] = ()

    def __post_init__(self):
        if self.satisfied == (self.witness is not None):
            raise ValueError("a verdict carries a witness exactly when it is violated")

    def component(self, criterion: Criterion) -> FairnessVerdict:
        for part in self.components:
            if part.criterion == criterion:
                return part
        raise KeyError(criterion)
