from pathlib import Path

import pytest

from defectcast import (
    ExpertTriangle,
    InfluenceFactor,
    ReleaseRecord,
    Target,
    load_bundle,
)

EXAMPLE_BUNDLE = Path(__file__).parent.parent / "demos" / "data" / "example_bundle.json"

GENERIC_LEVELS = ("best", "mild", "clear", "worst")


def make_release(rid="R", size=100, found=40, slipped=10, levels=None, **kw):
    return ReleaseRecord(
        id=rid,
        size=size,
        defects_found=found,
        defects_slipped=slipped,
        levels=levels or {},
        **kw,
    )


def make_factor(fid="D1", target=Target.DEFECT_CONTENT):
    return InfluenceFactor(
        id=fid, name=f"factor {fid}", target=target, levels=GENERIC_LEVELS
    )


def make_triangle(fid="D1", a=0.10, m=0.15, b=0.25,
                  target=Target.DEFECT_CONTENT, expert="X1"):
    return ExpertTriangle(
        expert=expert, factor_id=fid, target=target,
        minimum=a, most_likely=m, maximum=b,
    )


def triangle_cdf(a, m, b, x):
    """Direct CDF of the triangular distribution, independent oracle."""
    if x <= a:
        return 0.0
    if x >= b:
        return 1.0
    if x < m:
        return (x - a) ** 2 / ((b - a) * (m - a))
    return 1.0 - (b - x) ** 2 / ((b - a) * (b - m))


@pytest.fixture
def example_bundle():
    return load_bundle(EXAMPLE_BUNDLE)


@pytest.fixture
def example_bundle_path():
    return EXAMPLE_BUNDLE
