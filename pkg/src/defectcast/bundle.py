"""On-disk context-bundle format, validation, and report serialization.

A context bundle is a single JSON document with the top-level keys
``factors``, ``quantifications``, ``rankings``, ``releases`` and
optionally ``active_factors``.  Release array order is chronological.
Triangle values are stored as fractions (0.15 means "15% more defects").
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .calibration import descriptive_stats
from .errors import BundleValidationError
from .model import (
    ExpertTriangle,
    FactorRanking,
    InfluenceFactor,
    ReleaseRecord,
    Target,
    aggregate_rankings,
)


@dataclass(frozen=True)
class ValidationIssue:
    entity: str
    field: str
    message: str


@dataclass(frozen=True)
class ContextBundle:
    """All inputs of one estimation context."""

    factors: tuple[InfluenceFactor, ...]
    quantifications: tuple[ExpertTriangle, ...]
    rankings: tuple[FactorRanking, ...] = ()
    releases: tuple[ReleaseRecord, ...] = ()
    active_factors: Mapping[str, tuple[str, ...]] | None = None
    warnings: tuple[str, ...] = ()

    def factors_for(self, target: Target) -> list[InfluenceFactor]:
        return [f for f in self.factors if f.target == target]

    def included_releases(self) -> list[ReleaseRecord]:
        return [r for r in self.releases if not r.excluded]

    def resolve_active(
        self, target: Target, override_ids: Sequence[str] | None = None
    ) -> list[InfluenceFactor]:
        """Active factors for a target.

        Priority: explicit override, then the bundle's ``active_factors``
        entry, then (for effectiveness) the two top-ranked factors when
        rankings exist, then all factors of the target.  The top-2
        effectiveness default exists because extra effectiveness factors
        did not improve accuracy in practice.
        """
        by_id = {f.id: f for f in self.factors_for(target)}
        if override_ids is not None:
            return [by_id[fid] for fid in override_ids]
        if self.active_factors and target.value in self.active_factors:
            return [by_id[fid] for fid in self.active_factors[target.value]]
        if target == Target.EFFECTIVENESS and self.rankings:
            ranked = aggregate_rankings(list(self.rankings), target)
            if ranked:
                return [by_id[rf.factor_id] for rf in ranked[:2]]
        return sorted(by_id.values(), key=lambda f: f.id)

    def with_excluded(self, ids: Sequence[str]) -> "ContextBundle":
        """Copy of the bundle with the given releases marked excluded."""
        ids = set(ids)
        releases = tuple(
            ReleaseRecord(
                id=r.id,
                size=r.size,
                defects_found=r.defects_found,
                defects_slipped=r.defects_slipped,
                levels=r.levels,
                excluded=r.excluded or r.id in ids,
                note=r.note,
            )
            for r in self.releases
        )
        return ContextBundle(
            factors=self.factors,
            quantifications=self.quantifications,
            rankings=self.rankings,
            releases=releases,
            active_factors=self.active_factors,
            warnings=self.warnings,
        )


def _build_bundle(raw: dict) -> tuple[ContextBundle | None, list[ValidationIssue]]:
    errors: list[ValidationIssue] = []
    factors: list[InfluenceFactor] = []
    for i, f in enumerate(raw.get("factors", [])):
        entity = f"factor:{f.get('id', f'#{i}')}"
        try:
            factors.append(
                InfluenceFactor(
                    id=str(f["id"]),
                    name=str(f.get("name", f["id"])),
                    target=Target(f["target"]),
                    levels=tuple(f["levels"]),
                    description=str(f.get("description", "")),
                )
            )
        except (KeyError, ValueError, TypeError) as exc:
            errors.append(ValidationIssue(entity, "levels/target", str(exc)))

    seen: set[tuple[str, str]] = set()
    for f in factors:
        key = (f.id, f.target.value)
        if key in seen:
            errors.append(
                ValidationIssue(f"factor:{f.id}", "id", "duplicate id for target")
            )
        seen.add(key)
    factor_ids = {f.id for f in factors}
    ids_by_target = {
        t: {f.id for f in factors if f.target == t} for t in Target
    }

    triangles: list[ExpertTriangle] = []
    for i, q in enumerate(raw.get("quantifications", [])):
        entity = f"quantification:{q.get('expert', '?')}/{q.get('factor_id', f'#{i}')}"
        try:
            tri = ExpertTriangle(
                expert=str(q["expert"]),
                factor_id=str(q["factor_id"]),
                target=Target(q["target"]),
                minimum=float(q["min"]),
                most_likely=float(q["most_likely"]),
                maximum=float(q["max"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            errors.append(ValidationIssue(entity, "min/most_likely/max", str(exc)))
            continue
        if tri.factor_id not in ids_by_target[tri.target]:
            errors.append(
                ValidationIssue(
                    entity, "factor_id",
                    f"unknown factor {tri.factor_id!r} for target {tri.target.value}",
                )
            )
        triangles.append(tri)

    rankings: list[FactorRanking] = []
    for i, r in enumerate(raw.get("rankings", [])):
        entity = f"ranking:{r.get('expert', f'#{i}')}"
        try:
            ranking = FactorRanking(
                expert=str(r["expert"]),
                target=Target(r["target"]),
                ranks={str(k): v for k, v in r["ranks"].items()},
            )
        except (KeyError, ValueError, TypeError, AttributeError) as exc:
            errors.append(ValidationIssue(entity, "ranks", str(exc)))
            continue
        for fid in ranking.ranks:
            if fid not in ids_by_target[ranking.target]:
                errors.append(
                    ValidationIssue(entity, "ranks", f"unknown factor {fid!r}")
                )
        rankings.append(ranking)

    releases: list[ReleaseRecord] = []
    release_ids: set[str] = set()
    for i, r in enumerate(raw.get("releases", [])):
        entity = f"release:{r.get('id', f'#{i}')}"
        try:
            rec = ReleaseRecord(
                id=str(r["id"]),
                size=float(r["size"]),
                defects_found=float(r["defects_found"]),
                defects_slipped=float(r["defects_slipped"]),
                levels={str(k): v for k, v in r.get("levels", {}).items()},
                excluded=bool(r.get("excluded", False)),
                note=str(r.get("note", "")),
            )
        except (KeyError, ValueError, TypeError, AttributeError) as exc:
            errors.append(ValidationIssue(entity, "measures/levels", str(exc)))
            continue
        if rec.id in release_ids:
            errors.append(ValidationIssue(entity, "id", "duplicate release id"))
        release_ids.add(rec.id)
        for fid in factor_ids:
            if fid not in rec.levels:
                errors.append(
                    ValidationIssue(entity, "levels", f"missing level for factor {fid!r}")
                )
        for fid in rec.levels:
            if fid not in factor_ids:
                errors.append(
                    ValidationIssue(entity, "levels", f"unknown factor {fid!r}")
                )
        releases.append(rec)

    for t in Target:
        quantified = {q.factor_id for q in triangles if q.target == t}
        for fid in sorted(ids_by_target[t] - quantified):
            errors.append(
                ValidationIssue(
                    f"factor:{fid}", "quantifications",
                    f"no impact estimate for target {t.value}",
                )
            )

    active_raw = raw.get("active_factors")
    active = None
    if active_raw is not None:
        active = {}
        for tname, fids in active_raw.items():
            try:
                t = Target(tname)
            except ValueError:
                errors.append(
                    ValidationIssue("active_factors", tname, "unknown target")
                )
                continue
            for fid in fids:
                if fid not in ids_by_target[t]:
                    errors.append(
                        ValidationIssue(
                            "active_factors", tname, f"unknown factor {fid!r}"
                        )
                    )
            active[t.value] = tuple(fids)

    if errors:
        return None, errors

    warnings: list[str] = []
    names_by_target = {
        t: {f.name for f in factors if f.target == t} for t in Target
    }
    for name in sorted(
        names_by_target[Target.DEFECT_CONTENT] & names_by_target[Target.EFFECTIVENESS]
    ):
        warnings.append(
            f"factor {name!r} influences both defect content and effectiveness; "
            "experts find these two contradicting influences hard to separate"
        )
    if releases:
        for rid, measure, reason in descriptive_stats(releases).flagged:
            warnings.append(f"release {rid!r}: {measure} outlier ({reason})")

    bundle = ContextBundle(
        factors=tuple(factors),
        quantifications=tuple(triangles),
        rankings=tuple(rankings),
        releases=tuple(releases),
        active_factors=active,
        warnings=tuple(warnings),
    )
    return bundle, []


def load_bundle(path: str | Path) -> ContextBundle:
    """Load and fully validate a context bundle.

    Raises BundleValidationError with the exhaustive issue list on any
    invariant violation; non-fatal findings end up in bundle.warnings.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise BundleValidationError(
                [ValidationIssue("document", "json", str(exc))]
            ) from exc
    bundle, errors = _build_bundle(raw)
    if errors:
        raise BundleValidationError(errors)
    return bundle


def bundle_to_payload(bundle: ContextBundle) -> dict:
    """JSON-ready dict for the bundle echo facility."""
    payload = {
        "factors": [
            {
                "id": f.id,
                "name": f.name,
                "description": f.description,
                "target": f.target.value,
                "levels": list(f.levels),
            }
            for f in bundle.factors
        ],
        "quantifications": [
            {
                "expert": q.expert,
                "factor_id": q.factor_id,
                "target": q.target.value,
                "min": q.minimum,
                "most_likely": q.most_likely,
                "max": q.maximum,
            }
            for q in bundle.quantifications
        ],
        "rankings": [
            {"expert": r.expert, "target": r.target.value, "ranks": dict(sorted(r.ranks.items()))}
            for r in bundle.rankings
        ],
        "releases": [
            {
                "id": r.id,
                "size": r.size,
                "defects_found": r.defects_found,
                "defects_slipped": r.defects_slipped,
                "levels": dict(sorted(r.levels.items())),
                "excluded": r.excluded,
                "note": r.note,
            }
            for r in bundle.releases
        ],
    }
    if bundle.active_factors is not None:
        payload["active_factors"] = {
            t: list(fids) for t, fids in sorted(bundle.active_factors.items())
        }
    return payload


def _round6(value):
    """Fix floats to 6 significant digits so output bytes are stable."""
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return float(f"{value:.6g}")
    if isinstance(value, dict):
        return {k: _round6(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round6(v) for v in value]
    return value


def report_to_payload(report) -> dict:
    """JSON-ready dict for any report object the package produces."""
    from .calibration import CalibratedContext, DescriptiveStats
    from .evaluation import AccuracyReport, WilcoxonResult
    from .prediction import Prediction

    if isinstance(report, AccuracyReport):
        return {
            "report": "accuracy",
            "model": report.model_name,
            "cases": [
                {
                    "release": c.release_id,
                    "predicted": c.predicted,
                    "actual": c.actual,
                    "re": c.re,
                    "mre": c.mre,
                }
                for c in report.cases
            ],
            "mmre": report.mmre,
            "pred": {f"{q:g}": v for q, v in sorted(report.pred.items())},
        }
    if isinstance(report, WilcoxonResult):
        return {
            "report": "wilcoxon",
            "w_plus": report.w_plus,
            "w_minus": report.w_minus,
            "n_effective": report.n_effective,
            "p_one_sided": report.p_one_sided,
            "method": report.method,
            "zero_differences": "dropped",
            "ties": "mid-ranks",
        }
    if isinstance(report, CalibratedContext):
        return {
            "report": "calibration",
            "per_release": {
                rid: {
                    "dd_base": c.dd_base,
                    "eff_base": c.eff_base,
                    "ddif_point": c.ddif_point,
                    "eif_point": c.eif_point,
                }
                for rid, c in sorted(report.per_release.items())
            },
            "dd_base_median": report.dd_base_median,
            "eff_base_median": report.eff_base_median,
            "included": list(report.included_ids),
        }
    if isinstance(report, Prediction):
        return {
            "report": "prediction",
            "target": report.target.value,
            "point": report.point,
            "quantiles": {f"{p:g}": v for p, v in sorted(report.quantiles.items())},
            "n_samples": report.n_samples,
            "seed": report.seed,
        }
    if isinstance(report, DescriptiveStats):
        return {
            "report": "descriptive",
            "per_release": {
                rid: dict(vals) for rid, vals in sorted(report.per_release.items())
            },
            "flagged": [list(f) for f in report.flagged],
        }
    if isinstance(report, dict):
        return {str(k): report[k] for k in report}
    raise TypeError(f"cannot serialize {type(report).__name__}")


def _payload_to_csv(payload: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    kind = payload.get("report")
    if kind == "accuracy":
        writer.writerow(["release", "predicted", "actual", "mre"])
        for c in payload["cases"]:
            writer.writerow([c["release"], c["predicted"], c["actual"], c["mre"]])
        writer.writerow(["MMRE", "", "", payload["mmre"]])
        for q, v in payload["pred"].items():
            writer.writerow([f"Pred({q})", "", "", v])
    elif kind == "prediction":
        writer.writerow(["quantity", "value"])
        writer.writerow(["target", payload["target"]])
        writer.writerow(["point", payload["point"]])
        for p, v in payload["quantiles"].items():
            writer.writerow([f"q{p}", v])
        writer.writerow(["seed", payload["seed"]])
        writer.writerow(["n_samples", payload["n_samples"]])
    else:
        writer.writerow(["key", "value"])
        for k, v in payload.items():
            writer.writerow([k, json.dumps(v, sort_keys=True)])
    return buf.getvalue()


def _payload_to_text(payload: dict) -> str:
    lines = []

    def emit(prefix, value):
        if isinstance(value, dict):
            for k, v in value.items():
                emit(f"{prefix}{k}.", v) if isinstance(v, (dict,)) else emit_leaf(
                    f"{prefix}{k}", v
                )
        else:
            emit_leaf(prefix.rstrip("."), value)

    def emit_leaf(key, value):
        if isinstance(value, dict):
            emit(key + ".", value)
        elif isinstance(value, list):
            lines.append(f"{key:<28} {json.dumps(value)}")
        else:
            lines.append(f"{key:<28} {value}")

    emit("", payload)
    return "\n".join(lines) + "\n"


def render_report(report, format: str = "json") -> str:
    """Serialize a report deterministically to the given format."""
    payload = _round6(report_to_payload(report))
    if format == "json":
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if format == "csv":
        return _payload_to_csv(payload)
    if format == "text":
        return _payload_to_text(payload)
    raise ValueError(f"unknown format {format!r}")


def write_report(report, format: str, path: str | Path) -> None:
    """Write a report; identical inputs produce byte-identical files."""
    text = render_report(report, format)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
