"""Calibration of context base values from historical releases.

Inverting the two model equations

    DC  = size * DD_base * (1 + DDIF)
    Eff = Eff_base * (1 + EIF)

on each historical release yields per-release base values; the context
values are the medians over the included releases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import NoUsableHistoryError, UndefinedEffectivenessError
from .model import (
    ExpertTriangle,
    InfluenceFactor,
    ReleaseRecord,
    Target,
    defect_content,
    defect_density,
    effectiveness,
)
from .sampling import (
    EngineOptions,
    POINT_ANALYTIC_MEAN,
    analytic_mean_increase,
    empirical_quantile,
    increase_distribution,
)


@dataclass(frozen=True)
class ReleaseCalibration:
    release_id: str
    ddif_point: float
    eif_point: float
    dd_base: float
    eff_base: float | None  # absent for defect-free releases (0/0)


@dataclass(frozen=True)
class CalibratedContext:
    per_release: Mapping[str, ReleaseCalibration]
    dd_base_median: float
    eff_base_median: float | None
    included_ids: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "per_release", dict(self.per_release))


def base_defect_density(release: ReleaseRecord, ddif_point: float) -> float:
    """DD_base implied by the release once its DDIF is factored out."""
    return defect_content(release) / (release.size * (1.0 + ddif_point))


def base_effectiveness(release: ReleaseRecord, eif_point: float) -> float:
    """Eff_base implied by the release once its EIF is factored out."""
    return effectiveness(release) / (1.0 + eif_point)


def calibrate(
    releases: Sequence[ReleaseRecord],
    dc_factors: Sequence[InfluenceFactor],
    eff_factors: Sequence[InfluenceFactor],
    triangles: Sequence[ExpertTriangle],
    options: EngineOptions = EngineOptions(),
) -> CalibratedContext:
    """Derive per-release base values and their context medians.

    Excluded releases are skipped entirely.  Releases with defect
    content 0 contribute to the defect-density side but carry no base
    effectiveness.  The median of an even-count list is the mean of the
    two central order statistics.
    """
    included = [r for r in releases if not r.excluded]
    if not included:
        raise NoUsableHistoryError("all releases are excluded")

    def increase_point(factors, levels, target):
        if not factors:
            return 0.0
        # The analytic-mean point needs no Monte Carlo draws; the value
        # is identical to increase_distribution(...).point.
        if options.point == POINT_ANALYTIC_MEAN:
            return analytic_mean_increase(factors, triangles, levels, target)
        return increase_distribution(factors, triangles, levels, target, options).point

    per_release: dict[str, ReleaseCalibration] = {}
    for release in included:
        ddif = increase_point(dc_factors, release.levels, Target.DEFECT_CONTENT)
        eif = increase_point(eff_factors, release.levels, Target.EFFECTIVENESS)
        eff_base = None
        if defect_content(release) > 0:
            eff_base = base_effectiveness(release, eif)
        per_release[release.id] = ReleaseCalibration(
            release_id=release.id,
            ddif_point=ddif,
            eif_point=eif,
            dd_base=base_defect_density(release, ddif),
            eff_base=eff_base,
        )
    ordered = sorted(per_release.values(), key=lambda c: c.release_id)
    dd_median = float(np.median([c.dd_base for c in ordered]))
    eff_values = [c.eff_base for c in ordered if c.eff_base is not None]
    eff_median = float(np.median(eff_values)) if eff_values else None
    return CalibratedContext(
        per_release=per_release,
        dd_base_median=dd_median,
        eff_base_median=eff_median,
        included_ids=tuple(c.release_id for c in ordered),
    )


@dataclass(frozen=True)
class DescriptiveStats:
    per_release: Mapping[str, dict]
    flagged: tuple[tuple[str, str, str], ...]  # (release_id, measure, reason)

    def __post_init__(self):
        object.__setattr__(self, "per_release", dict(self.per_release))


def _iqr_flags(values: dict[str, float], measure: str):
    if len(values) < 2:
        return
    ordered = np.sort(np.array(list(values.values())))
    q1 = empirical_quantile(ordered, 0.25)
    q3 = empirical_quantile(ordered, 0.75)
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    for rid in sorted(values):
        v = values[rid]
        if v < lo:
            yield (rid, measure, f"below Q1 - 1.5*IQR ({v:.6g} < {lo:.6g})")
        elif v > hi:
            yield (rid, measure, f"above Q3 + 1.5*IQR ({v:.6g} > {hi:.6g})")


def descriptive_stats(releases: Sequence[ReleaseRecord]) -> DescriptiveStats:
    """Per-release defect density and effectiveness with outlier flags.

    Values outside the 1.5*IQR fences (nearest-rank quartiles) are
    flagged.  Flags are advisory only: whether to exclude a release
    stays a judgment call for whoever knows the history.
    """
    per_release: dict[str, dict] = {}
    dd_values: dict[str, float] = {}
    eff_values: dict[str, float] = {}
    for r in releases:
        dd = defect_density(r)
        try:
            eff = effectiveness(r)
        except UndefinedEffectivenessError:
            eff = None
        per_release[r.id] = {"defect_density": dd, "effectiveness": eff}
        dd_values[r.id] = dd
        if eff is not None:
            eff_values[r.id] = eff
    flagged = list(_iqr_flags(dd_values, "defect_density"))
    flagged += list(_iqr_flags(eff_values, "effectiveness"))
    return DescriptiveStats(per_release=per_release, flagged=tuple(flagged))
