"""Monte Carlo engine for the increase-factor distributions.

The project-specific increase factor (for defect density or for
effectiveness) is built in three steps:

1. per factor, the experts' triangular estimates are combined into one
   distribution as an equal-weight mixture;
2. the mixture is scaled by ``level / 3`` for the release's concrete
   level on the factor's four-level scale (level descriptions are chosen
   so the impact grows linearly over the levels);
3. the scaled per-factor draws are summed across factors.

Each factor samples from its own RNG stream, derived deterministically
from (seed, target, factor id), so results do not depend on factor
declaration order and factors can be sampled in parallel.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    EmptyDistributionError,
    MissingLevelError,
    MissingQuantificationError,
)
from .model import ExpertTriangle, InfluenceFactor, Target

POINT_ANALYTIC_MEAN = "analytic-mean"
POINT_MC_MEDIAN = "mc-median"


@dataclass(frozen=True)
class EngineOptions:
    """Sampling configuration shared by calibration and prediction."""

    n_samples: int = 10_000
    seed: int = 0
    point: str = POINT_ANALYTIC_MEAN

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.point not in (POINT_ANALYTIC_MEAN, POINT_MC_MEDIAN):
            raise ValueError(f"unknown point strategy {self.point!r}")


@dataclass(frozen=True)
class EmpiricalDistribution:
    """A deterministic Monte Carlo sample set."""

    samples: np.ndarray
    seed: int

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def n(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class IncreaseResult:
    """DDIF or EIF distribution for one release characterization."""

    target: Target
    distribution: EmpiricalDistribution
    analytic_mean: float
    point: float


def triangle_inverse_cdf(tri: ExpertTriangle, u):
    """Inverse CDF of the triangular distribution at u (scalar or array)."""
    a, m, b = tri.minimum, tri.most_likely, tri.maximum
    u = np.asarray(u, dtype=float)
    if b == a:
        return np.full_like(u, a) if u.ndim else float(a)
    c = (m - a) / (b - a)
    left = a + np.sqrt(np.clip(u, 0, None) * (b - a) * (m - a))
    right = b - np.sqrt(np.clip(1 - u, 0, None) * (b - a) * (b - m))
    out = np.where(u < c, left, right)
    return out if u.ndim else float(out)


def sample_triangle(tri: ExpertTriangle, u: float) -> float:
    """One inverse-CDF draw from an expert triangle, u in [0, 1)."""
    return triangle_inverse_cdf(tri, u)


def triangle_variance(tri: ExpertTriangle) -> float:
    a, m, b = tri.minimum, tri.most_likely, tri.maximum
    return (a * a + m * m + b * b - a * m - a * b - m * b) / 18.0


def expert_mixture_sample(
    triangles: Sequence[ExpertTriangle], rng: np.random.Generator
) -> float:
    """Draw one value from the equal-weight mixture of expert triangles."""
    if not triangles:
        raise MissingQuantificationError("no triangles to sample from")
    tri = triangles[int(rng.integers(0, len(triangles)))]
    return sample_triangle(tri, float(rng.random()))


def _factor_rng(seed: int, target: Target, factor_id: str) -> np.random.Generator:
    # Stable across runs and processes: the stream depends only on
    # (seed, target, factor_id), never on iteration order.
    digest = hashlib.sha256(f"{target.value}:{factor_id}".encode()).digest()
    key = int.from_bytes(digest[:16], "big")
    return np.random.default_rng(np.random.SeedSequence([seed, key]))


def _mixture_samples(
    triangles: Sequence[ExpertTriangle], n: int, rng: np.random.Generator
) -> np.ndarray:
    idx = rng.integers(0, len(triangles), size=n)
    u = rng.random(n)
    out = np.empty(n)
    for j, tri in enumerate(triangles):
        mask = idx == j
        if mask.any():
            out[mask] = triangle_inverse_cdf(tri, u[mask])
    return out


def _triangles_by_factor(
    factors: Sequence[InfluenceFactor],
    triangles: Sequence[ExpertTriangle],
    target: Target,
) -> dict[str, list[ExpertTriangle]]:
    grouped: dict[str, list[ExpertTriangle]] = {f.id: [] for f in factors}
    for tri in triangles:
        if tri.target == target and tri.factor_id in grouped:
            grouped[tri.factor_id].append(tri)
    for fid, tris in grouped.items():
        if not tris:
            raise MissingQuantificationError(
                f"factor {fid!r} has no impact estimate for target "
                f"{target.value!r}"
            )
    return grouped


def analytic_mean_increase(
    factors: Sequence[InfluenceFactor],
    triangles: Sequence[ExpertTriangle],
    levels: Mapping[str, int],
    target: Target,
) -> float:
    """Deterministic companion of the Monte Carlo path.

    Sum over active factors of (level/3) times the mean triangle mean
    (a+m+b)/3, averaged uniformly over the factor's experts.
    """
    grouped = _triangles_by_factor(factors, triangles, target)
    total = 0.0
    for factor in sorted(factors, key=lambda f: f.id):
        if factor.id not in levels:
            raise MissingLevelError(f"no level for factor {factor.id!r}")
        weight = levels[factor.id] / 3.0
        tris = grouped[factor.id]
        total += weight * (sum(t.mean for t in tris) / len(tris))
    return total


def increase_distribution(
    factors: Sequence[InfluenceFactor],
    triangles: Sequence[ExpertTriangle],
    levels: Mapping[str, int],
    target: Target,
    options: EngineOptions = EngineOptions(),
) -> IncreaseResult:
    """Build the DDIF or EIF distribution for one characterization.

    Each sample is the sum over active factors of (level/3) times an
    independent expert-mixture draw.  Identical (inputs, seed, n) yield
    bit-identical sample lists.
    """
    grouped = _triangles_by_factor(factors, triangles, target)
    n = options.n_samples
    samples = np.zeros(n)
    for factor in sorted(factors, key=lambda f: f.id):
        if factor.id not in levels:
            raise MissingLevelError(f"no level for factor {factor.id!r}")
        weight = levels[factor.id] / 3.0
        if weight == 0.0:
            continue  # own RNG stream, skipping cannot shift other factors
        rng = _factor_rng(options.seed, target, factor.id)
        samples += weight * _mixture_samples(grouped[factor.id], n, rng)
    mean = analytic_mean_increase(factors, triangles, levels, target)
    dist = EmpiricalDistribution(samples=samples, seed=options.seed)
    if options.point == POINT_ANALYTIC_MEAN:
        point = mean
    else:
        point = empirical_quantile(np.sort(samples), 0.5)
    return IncreaseResult(
        target=target, distribution=dist, analytic_mean=mean, point=point
    )


def empirical_quantile(sorted_samples: np.ndarray, p: float) -> float:
    """Nearest-rank quantile of an ascending-sorted sample array."""
    n = len(sorted_samples)
    if n == 0:
        raise EmptyDistributionError("no samples")
    k = math.ceil(p * n) - 1
    return float(sorted_samples[min(max(k, 0), n - 1)])


def quantiles(dist: EmpiricalDistribution, probs: Sequence[float]) -> list[float]:
    """Nearest-rank order statistics; monotone nondecreasing in probs."""
    if dist.n == 0:
        raise EmptyDistributionError("no samples")
    ordered = np.sort(dist.samples)
    return [empirical_quantile(ordered, p) for p in probs]
