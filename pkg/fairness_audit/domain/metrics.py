"""
Confusion counts and predictive-performance rates per sensitive group
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .dataset import Profile

# An exact rate, or None when its denominator is zero (UNDEFINED)
Rate = Optional[Fraction]

RATE_NAMES = ('tpr', 'tnr', 'ppv', 'npv', 'base_rate', 'hire_rate')


@dataclass(frozen=True)
class GroupConfusion:
    group: Profile
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError(f"confusion counts must be non-negative: {self}")

    @property
    def n_group(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class RateBundle:
    tpr: Rate
    tnr: Rate
    ppv: Rate
    npv: Rate
    base_rate: Rate
    hire_rate: Rate

    def get(self, name: str) -> Rate:
        return getattr(self, name)


@dataclass(frozen=True)
class RateDecomposition:
    """
    The four joint masses P[y, δ | a] of one group and the rates recomputed from them
    """

    group: Profile
    true_positive: Fraction
    false_positive: Fraction
    false_negative: Fraction
    true_negative: Fraction
    ppv: Rate
    npv: Rate
    tpr: Rate
    tnr: Rate

    @property
    def total(self) -> Fraction:
        return self.true_positive + self.false_positive + self.false_negative + self.true_negative
