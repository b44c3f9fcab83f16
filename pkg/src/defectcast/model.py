"""Domain types for the causal model and the elementary defect measures.

A product entering a QA activity contains a number of defects (its defect
content).  The activity finds some of them and the rest slip through, so

    defect_content = defects_found + defects_slipped
    defect_density = defect_content / size
    effectiveness  = defects_found / defect_content

Influence factors drive how far a concrete release deviates from the
context best case; each factor is rated on a four-level ordinal scale.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .errors import MissingFactorError, UndefinedEffectivenessError


class Target(str, Enum):
    """What an influence factor (or an estimate) acts on."""

    DEFECT_CONTENT = "defect_content"
    EFFECTIVENESS = "effectiveness"


@dataclass(frozen=True)
class InfluenceFactor:
    """A named driver of defect content or QA effectiveness.

    ``levels`` holds exactly four ordered level descriptions: index 0 is
    the context best case (lowest defects-found impact), index 3 the
    worst.  A factor influencing both targets is represented by two
    entries sharing a name, one per target.
    """

    id: str
    name: str
    target: Target
    levels: tuple[str, str, str, str]
    description: str = ""

    def __post_init__(self):
        if len(self.levels) != 4:
            raise ValueError(
                f"factor {self.id!r} needs exactly 4 level descriptions, "
                f"got {len(self.levels)}"
            )
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "target", Target(self.target))


@dataclass(frozen=True)
class ExpertTriangle:
    """One expert's (min, most-likely, max) relative-increase estimate.

    Values are unitless fractions relative to the context best case:
    0.15 means "15% more defects".  They are nonnegative because the
    estimate is an increase over the best case.
    """

    expert: str
    factor_id: str
    target: Target
    minimum: float
    most_likely: float
    maximum: float

    def __post_init__(self):
        object.__setattr__(self, "target", Target(self.target))
        if not 0 <= self.minimum <= self.most_likely <= self.maximum:
            raise ValueError(
                f"triangle for factor {self.factor_id!r} by {self.expert!r} "
                f"must satisfy 0 <= min <= most_likely <= max, got "
                f"({self.minimum}, {self.most_likely}, {self.maximum})"
            )

    @property
    def mean(self) -> float:
        return (self.minimum + self.most_likely + self.maximum) / 3.0


@dataclass(frozen=True)
class FactorRanking:
    """One expert's importance ranking of the factors for one target.

    Rank 1 marks the most important factor; ranks run from 1 to the
    number of factors for that target.
    """

    expert: str
    target: Target
    ranks: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "target", Target(self.target))
        object.__setattr__(self, "ranks", dict(self.ranks))


@dataclass(frozen=True)
class ReleaseRecord:
    """A historical release with its measurements and characterization.

    ``size`` is whatever size proxy the context uses (e.g. the number of
    relevant test cases).  ``levels`` maps factor id to the release's
    level on that factor's four-level scale.
    """

    id: str
    size: float
    defects_found: float
    defects_slipped: float
    levels: Mapping[str, int]
    excluded: bool = False
    note: str = ""

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError(f"release {self.id!r}: size must be positive")
        if self.defects_found < 0 or self.defects_slipped < 0:
            raise ValueError(f"release {self.id!r}: defect counts must be >= 0")
        for fid, lvl in self.levels.items():
            if not (isinstance(lvl, int) and 0 <= lvl <= 3):
                raise ValueError(
                    f"release {self.id!r}: level for factor {fid!r} must be "
                    f"an integer in [0, 3], got {lvl!r}"
                )
        object.__setattr__(self, "levels", dict(self.levels))


def defect_content(release: ReleaseRecord) -> float:
    """Defects in the product when the QA activity started (DF + DS)."""
    return release.defects_found + release.defects_slipped


def defect_density(release: ReleaseRecord) -> float:
    """Defect content per size unit."""
    return defect_content(release) / release.size


def effectiveness(release: ReleaseRecord) -> float:
    """Fraction of present defects the QA activity found.

    Raises UndefinedEffectivenessError for a defect-free release (0/0);
    such releases cannot contribute to effectiveness calibration.
    """
    dc = defect_content(release)
    if dc == 0:
        raise UndefinedEffectivenessError(
            f"release {release.id!r} has defect content 0"
        )
    return release.defects_found / dc


@dataclass(frozen=True)
class RankedFactor:
    factor_id: str
    mean_rank: float
    median_rank: float


def aggregate_rankings(
    rankings: Sequence[FactorRanking], target: Target
) -> list[RankedFactor]:
    """Combine per-expert rankings into one importance order.

    Factors are sorted ascending by mean rank; ties are broken by median
    rank and then by factor id, so the order is deterministic and
    invariant under permutation of the input rankings.
    """
    relevant = [r for r in rankings if r.target == target]
    if not relevant:
        return []
    factor_ids = set(relevant[0].ranks)
    for r in relevant:
        missing = factor_ids.symmetric_difference(r.ranks)
        if missing:
            raise MissingFactorError(
                f"ranking by {r.expert!r} disagrees on the factor set: "
                f"{sorted(missing)}"
            )
    k = len(factor_ids)
    for r in relevant:
        for fid, rank in r.ranks.items():
            if not (isinstance(rank, int) and 1 <= rank <= k):
                raise ValueError(
                    f"ranking by {r.expert!r}: rank for {fid!r} must be an "
                    f"integer in [1, {k}], got {rank!r}"
                )
    out = []
    for fid in factor_ids:
        values = [r.ranks[fid] for r in relevant]
        out.append(
            RankedFactor(
                factor_id=fid,
                mean_rank=statistics.fmean(values),
                median_rank=float(statistics.median(values)),
            )
        )
    out.sort(key=lambda f: (f.mean_rank, f.median_rank, f.factor_id))
    return out
