"""Model validation: accuracy metrics, cross-validation, baselines,
the exact one-sided Wilcoxon signed-rank test, the factor-count
ablation, and the growing-history simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .bundle import ContextBundle
from .calibration import calibrate
from .errors import (
    AllZeroDifferencesError,
    InsufficientHistoryError,
    NoUsableHistoryError,
    ZeroActualError,
)
from .model import (
    ReleaseRecord,
    Target,
    defect_content,
    defect_density,
    effectiveness,
)
from .prediction import (
    NewReleaseSpec,
    predict_defect_content,
    predict_effectiveness,
)
from .sampling import EngineOptions

MODEL_INFLUENCE_FACTOR = "influence_factor"
MODEL_DC_MEDIAN = "dc_median"
MODEL_DD_MEDIAN = "dd_median"
MODEL_EFF_MEDIAN = "eff_median"

DEFAULT_PRED_THRESHOLDS = (0.25,)

# Mid-rank grouping of |differences| rounds to this many decimals so that
# values equal up to float noise (e.g. 0.30 - 0.20 vs 0.10) tie properly.
_RANK_DECIMALS = 12


@dataclass(frozen=True)
class AccuracyCase:
    release_id: str
    predicted: float
    actual: float
    re: float
    mre: float


@dataclass(frozen=True)
class AccuracyReport:
    model_name: str
    cases: tuple[AccuracyCase, ...]
    mmre: float
    pred: Mapping[float, float]

    def __post_init__(self):
        object.__setattr__(self, "pred", dict(self.pred))

    def mres(self) -> dict[str, float]:
        return {c.release_id: c.mre for c in self.cases}


def accuracy_metrics(
    cases: Sequence[tuple[float, float]],
    thresholds: Sequence[float] = DEFAULT_PRED_THRESHOLDS,
    ids: Sequence[str] | None = None,
    model_name: str = "",
) -> AccuracyReport:
    """Relative-error metrics for (predicted, actual) pairs.

    RE = (predicted - actual) / actual, MRE = |RE|, MMRE is the mean
    MRE, and Pred(q) counts MREs at or below q (boundary inclusive,
    with a relative float guard so an MRE of exactly q counts).
    """
    if not cases:
        raise ValueError("no cases")
    if ids is None:
        ids = [str(i) for i in range(len(cases))]
    out = []
    for rid, (predicted, actual) in zip(ids, cases):
        if actual == 0:
            raise ZeroActualError(f"case {rid!r} has actual value 0")
        re = (predicted - actual) / actual
        out.append(
            AccuracyCase(
                release_id=rid, predicted=predicted, actual=actual,
                re=re, mre=abs(re),
            )
        )
    mres = np.array([c.mre for c in out])
    pred = {
        q: float(np.count_nonzero(mres <= q * (1 + 1e-9) + 1e-12) / len(out))
        for q in thresholds
    }
    return AccuracyReport(
        model_name=model_name,
        cases=tuple(out),
        mmre=float(mres.mean()),
        pred=pred,
    )


def summarize_mres(
    mres: Sequence[float],
    thresholds: Sequence[float] = DEFAULT_PRED_THRESHOLDS,
    ids: Sequence[str] | None = None,
    model_name: str = "",
) -> AccuracyReport:
    """Accuracy report from already-computed MRE values.

    Routes through accuracy_metrics with actual = 1, so an MRE of m is
    represented exactly by the pair (1 + m, 1)."""
    return accuracy_metrics(
        [(1.0 + m, 1.0) for m in mres], thresholds, ids, model_name
    )


def baseline_predict(
    history: Sequence[ReleaseRecord], kind: str, new_size: float | None = None
) -> float:
    """Purely data-based prediction from historical medians."""
    if not history:
        raise NoUsableHistoryError("empty history")
    if kind == MODEL_DC_MEDIAN:
        return float(np.median([defect_content(r) for r in history]))
    if kind == MODEL_DD_MEDIAN:
        if new_size is None or new_size <= 0:
            raise ValueError("dd_median needs a positive new_size")
        return float(np.median([defect_density(r) for r in history])) * new_size
    if kind == MODEL_EFF_MEDIAN:
        values = [effectiveness(r) for r in history if defect_content(r) > 0]
        if not values:
            raise NoUsableHistoryError("no release with defined effectiveness")
        return float(np.median(values))
    raise ValueError(f"unknown baseline {kind!r}")


def _actual(release: ReleaseRecord, target: Target) -> float:
    if target == Target.DEFECT_CONTENT:
        return defect_content(release)
    return effectiveness(release)


def loocv(
    bundle: ContextBundle,
    model: str,
    target: Target = Target.DEFECT_CONTENT,
    options: EngineOptions = EngineOptions(),
    active_ids: Sequence[str] | None = None,
    thresholds: Sequence[float] = DEFAULT_PRED_THRESHOLDS,
) -> AccuracyReport:
    """Leave-one-out cross-validation of one model.

    Each included release is predicted from a model calibrated on all
    other included releases; its own measurements never enter its fold.
    The expert triangles are fold-independent (elicitation does not
    depend on the measurement history).  For the effectiveness target,
    defect-free releases are skipped (their actual value is undefined).
    """
    releases = bundle.included_releases()
    if target == Target.EFFECTIVENESS:
        releases = [r for r in releases if defect_content(r) > 0]
    if len(releases) < 2:
        raise InsufficientHistoryError("leave-one-out needs >= 2 usable releases")
    active = bundle.resolve_active(target, active_ids)
    cases, ids = [], []
    for release in releases:
        rest = [r for r in releases if r.id != release.id]
        if model == MODEL_INFLUENCE_FACTOR:
            spec = NewReleaseSpec(size=release.size, levels=release.levels)
            if target == Target.DEFECT_CONTENT:
                ctx = calibrate(rest, active, [], bundle.quantifications, options)
                predicted = predict_defect_content(
                    ctx, spec, active, bundle.quantifications, options
                ).point
            else:
                ctx = calibrate(rest, [], active, bundle.quantifications, options)
                predicted = predict_effectiveness(
                    ctx, spec, active, bundle.quantifications, options
                ).point
        else:
            predicted = baseline_predict(rest, model, new_size=release.size)
        cases.append((predicted, _actual(release, target)))
        ids.append(release.id)
    return accuracy_metrics(cases, thresholds, ids, model_name=model)


@dataclass(frozen=True)
class WilcoxonResult:
    w_plus: float
    w_minus: float
    n_effective: int
    p_one_sided: float
    method: str  # exact_enumeration | normal_approximation


def _exact_count_le(doubled_ranks: np.ndarray, doubled_w: int) -> int:
    # Subset-sum distribution of the negative-rank sum over all 2^n
    # equally likely sign assignments, on the doubled-rank integer grid.
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled_ranks:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    return int(counts[: min(doubled_w, total) + 1].sum())


def wilcoxon_one_sided(
    pairs: Sequence[tuple[float, float]], exact_limit: int = 20
) -> WilcoxonResult:
    """One-sided Wilcoxon matched-pairs signed-rank test.

    Differences are d = mre_b - mre_a; the alternative is that model A
    is the more accurate one (d tends positive), so the p-value is the
    null probability of a negative-rank sum at or below the observed
    one.  Zero differences are dropped, tied magnitudes get mid-ranks.
    Exact enumeration of all 2^n sign assignments up to n = exact_limit,
    normal approximation with continuity and tie correction beyond.
    """
    d = np.array([b - a for a, b in pairs], dtype=float)
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        raise AllZeroDifferencesError("every paired difference is zero")
    magnitudes = np.round(np.abs(d), _RANK_DECIMALS)
    ranks = rankdata(magnitudes)
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    if n <= exact_limit:
        doubled = np.rint(2 * ranks).astype(np.int64)
        count = _exact_count_le(doubled, int(round(2 * w_minus)))
        p = count / 2.0**n
        method = "exact_enumeration"
    else:
        mu = n * (n + 1) / 4.0
        var = n * (n + 1) * (2 * n + 1) / 24.0
        _, tie_counts = np.unique(magnitudes, return_counts=True)
        var -= float(((tie_counts**3 - tie_counts) / 48.0).sum())
        z = (w_minus - mu + 0.5) / math.sqrt(var)
        p = 0.5 * math.erfc(-z / math.sqrt(2.0))
        method = "normal_approximation"
    p = min(max(p, math.ulp(0.0)), 1.0)
    return WilcoxonResult(
        w_plus=w_plus,
        w_minus=w_minus,
        n_effective=n,
        p_one_sided=p,
        method=method,
    )


def ablation_curve(
    bundle: ContextBundle,
    target: Target,
    ranked_ids: Sequence[str],
    ks: Sequence[int],
    options: EngineOptions = EngineOptions(),
) -> dict[int, AccuracyReport]:
    """Cross-validation accuracy using only the top-k ranked factors.

    k = 0 means no factor is active, which reduces exactly to the
    data-only median-density (or median-effectiveness) model.
    """
    out = {}
    for k in ks:
        if not 0 <= k <= len(ranked_ids):
            raise ValueError(f"k={k} outside [0, {len(ranked_ids)}]")
        out[k] = loocv(
            bundle,
            MODEL_INFLUENCE_FACTOR,
            target,
            options,
            active_ids=list(ranked_ids[:k]),
        )
    return out


@dataclass(frozen=True)
class HistoryStep:
    history_size: int
    predicted_release_id: str
    predicted: float
    actual: float
    mre: float


def history_simulation(
    bundle: ContextBundle,
    start_m: int = 4,
    target: Target = Target.DEFECT_CONTENT,
    options: EngineOptions = EngineOptions(),
    active_ids: Sequence[str] | None = None,
) -> list[HistoryStep]:
    """Simulate model building with a growing release history.

    Starting from the first ``start_m`` included releases (in
    chronological = input order), each next release is predicted and
    then folded into the history.  Excluded releases are skipped both
    as history and as prediction targets.
    """
    if start_m < 2:
        raise ValueError("start_m must be >= 2")
    releases = bundle.included_releases()
    if target == Target.EFFECTIVENESS:
        releases = [r for r in releases if defect_content(r) > 0]
    if len(releases) <= start_m:
        raise InsufficientHistoryError(
            f"history simulation needs more than {start_m} usable releases"
        )
    active = bundle.resolve_active(target, active_ids)
    steps = []
    for m in range(start_m, len(releases)):
        history = releases[:m]
        nxt = releases[m]
        spec = NewReleaseSpec(size=nxt.size, levels=nxt.levels)
        if target == Target.DEFECT_CONTENT:
            ctx = calibrate(history, active, [], bundle.quantifications, options)
            predicted = predict_defect_content(
                ctx, spec, active, bundle.quantifications, options
            ).point
        else:
            ctx = calibrate(history, [], active, bundle.quantifications, options)
            predicted = predict_effectiveness(
                ctx, spec, active, bundle.quantifications, options
            ).point
        actual = _actual(nxt, target)
        if actual == 0:
            raise ZeroActualError(f"release {nxt.id!r} has actual value 0")
        steps.append(
            HistoryStep(
                history_size=m,
                predicted_release_id=nxt.id,
                predicted=predicted,
                actual=actual,
                mre=abs(predicted - actual) / actual,
            )
        )
    return steps
