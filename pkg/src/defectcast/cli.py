"""Command-line interface.

Thin mapping onto the library: `check`, `rank`, `calibrate`, `predict`,
`crossval`, `ablate`, `historysim`.  Runs are reproducible by default
(seed 0, never time-based); every randomized command prints the
effective seed.  Exit codes: 0 success, 1 validation/data error, 2
usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bundle import load_bundle, render_report, write_report
from .errors import BundleValidationError, EstimationError
from .evaluation import (
    MODEL_DC_MEDIAN,
    MODEL_DD_MEDIAN,
    MODEL_EFF_MEDIAN,
    MODEL_INFLUENCE_FACTOR,
    ablation_curve,
    history_simulation,
    loocv,
    wilcoxon_one_sided,
)
from .calibration import calibrate, descriptive_stats
from .model import Target, aggregate_rankings, defect_content
from .prediction import (
    DEFAULT_QUANTILES,
    NewReleaseSpec,
    predict_defect_content,
    predict_defects_found,
    predict_effectiveness,
)
from .sampling import EngineOptions

_TARGETS = {"defect-content": Target.DEFECT_CONTENT, "effectiveness": Target.EFFECTIVENESS}
_MODELS = {
    "influence-factor": MODEL_INFLUENCE_FACTOR,
    "dc-median": MODEL_DC_MEDIAN,
    "dd-median": MODEL_DD_MEDIAN,
    "eff-median": MODEL_EFF_MEDIAN,
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--bundle", required=True, help="context bundle JSON file")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=10_000)
    parser.add_argument(
        "--point", choices=["analytic-mean", "mc-median"], default="analytic-mean"
    )
    parser.add_argument(
        "--exclude", default="", help="comma-separated release ids to exclude"
    )
    parser.add_argument(
        "--factors", default=None, help="comma-separated active-factor override"
    )
    parser.add_argument("--format", choices=["json", "csv", "text"], default="json")
    parser.add_argument("--out", default=None, help="write the report to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="defectcast",
        description="Hybrid defect-content and QA-effectiveness estimation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a bundle and show descriptive stats")
    _add_common(p)

    p = sub.add_parser("rank", help="aggregate the expert factor rankings")
    _add_common(p)
    p.add_argument("--target", choices=list(_TARGETS), required=True)

    p = sub.add_parser("calibrate", help="derive context base values")
    _add_common(p)

    p = sub.add_parser("predict", help="predict a new release")
    _add_common(p)
    p.add_argument("--size", type=float, default=None)
    p.add_argument(
        "--levels", default=None, help="inline characterization, e.g. D1=2,D2=0"
    )
    p.add_argument(
        "--spec", default=None, help='JSON file with {"size": ..., "levels": {...}}'
    )
    p.add_argument(
        "--quantiles",
        default=",".join(str(q) for q in DEFAULT_QUANTILES),
        help="comma-separated quantile probabilities",
    )

    p = sub.add_parser("crossval", help="leave-one-out model comparison")
    _add_common(p)
    p.add_argument("--target", choices=list(_TARGETS), default="defect-content")
    p.add_argument("--model", choices=list(_MODELS), default="influence-factor")
    p.add_argument("--baseline", choices=list(_MODELS), default=None)
    p.add_argument("--test", choices=["wilcoxon", "none"], default="none")

    p = sub.add_parser("ablate", help="accuracy with top-k ranked factors")
    _add_common(p)
    p.add_argument("--target", choices=list(_TARGETS), default="defect-content")
    p.add_argument("--ks", default="0,1,3,5", help="comma-separated factor counts")

    p = sub.add_parser("historysim", help="growing-history prediction simulation")
    _add_common(p)
    p.add_argument("--target", choices=list(_TARGETS), default="defect-content")
    p.add_argument("--start", type=int, default=4)

    return parser


def _parse_levels(text: str) -> dict[str, int]:
    levels = {}
    for item in text.split(","):
        key, _, value = item.partition("=")
        if not key or not value:
            raise ValueError(f"bad --levels entry {item!r}")
        levels[key.strip()] = int(value)
    return levels


def _emit(report, args) -> None:
    text = render_report(report, args.format)
    sys.stdout.write(text)
    if args.out:
        write_report(report, args.format, args.out)


def _run(args) -> int:
    options = EngineOptions(n_samples=args.samples, seed=args.seed, point=args.point)
    bundle = load_bundle(args.bundle)
    for warning in bundle.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if args.exclude:
        bundle = bundle.with_excluded(args.exclude.split(","))
    active_ids = args.factors.split(",") if args.factors else None
    print(f"seed: {options.seed}")

    if args.command == "check":
        _emit(descriptive_stats(bundle.releases), args)
        return 0

    target = _TARGETS[args.target] if getattr(args, "target", None) else None

    if args.command == "rank":
        ranked = aggregate_rankings(list(bundle.rankings), target)
        _emit(
            {
                "report": "ranking",
                "target": target.value,
                "order": [
                    {
                        "factor_id": rf.factor_id,
                        "mean_rank": rf.mean_rank,
                        "median_rank": rf.median_rank,
                    }
                    for rf in ranked
                ],
            },
            args,
        )
        return 0

    if args.command == "calibrate":
        ctx = calibrate(
            bundle.included_releases(),
            bundle.resolve_active(Target.DEFECT_CONTENT, active_ids),
            bundle.resolve_active(Target.EFFECTIVENESS, active_ids),
            bundle.quantifications,
            options,
        )
        _emit(ctx, args)
        return 0

    if args.command == "predict":
        if args.spec:
            with open(args.spec, encoding="utf-8") as fh:
                raw = json.load(fh)
            spec = NewReleaseSpec(size=float(raw["size"]), levels=raw["levels"])
        elif args.size is not None and args.levels is not None:
            spec = NewReleaseSpec(size=args.size, levels=_parse_levels(args.levels))
        else:
            print("predict needs --spec or both --size and --levels", file=sys.stderr)
            return 2
        probs = [float(q) for q in args.quantiles.split(",")]
        dc_active = bundle.resolve_active(Target.DEFECT_CONTENT, active_ids)
        eff_active = bundle.resolve_active(Target.EFFECTIVENESS, active_ids)
        ctx = calibrate(
            bundle.included_releases(), dc_active, eff_active,
            bundle.quantifications, options,
        )
        dc_pred = predict_defect_content(
            ctx, spec, dc_active, bundle.quantifications, options, probs
        )
        payload = {
            "report": "predictions",
            "defect_content": render_json_fragment(dc_pred),
            "seed": options.seed,
        }
        if ctx.eff_base_median is not None and all(
            f.id in spec.levels for f in eff_active
        ):
            eff_pred = predict_effectiveness(
                ctx, spec, eff_active, bundle.quantifications, options, probs
            )
            payload["effectiveness"] = render_json_fragment(eff_pred)
            payload["expected_defects_found"] = predict_defects_found(dc_pred, eff_pred)
        _emit(payload, args)
        return 0

    if args.command == "crossval":
        model = _MODELS[args.model]
        report = loocv(bundle, model, target, options, active_ids)
        payload = {"report": "crossval", "model": render_json_fragment(report)}
        if args.baseline:
            base_report = loocv(bundle, _MODELS[args.baseline], target, options, active_ids)
            payload["baseline"] = render_json_fragment(base_report)
            if args.test == "wilcoxon":
                model_mres = report.mres()
                base_mres = base_report.mres()
                pairs = [
                    (model_mres[rid], base_mres[rid]) for rid in sorted(model_mres)
                ]
                payload["wilcoxon"] = render_json_fragment(
                    wilcoxon_one_sided(pairs)
                )
        _emit(payload, args)
        return 0

    if args.command == "ablate":
        ranked = aggregate_rankings(list(bundle.rankings), target)
        order = [rf.factor_id for rf in ranked]
        ks = [int(k) for k in args.ks.split(",")]
        curve = ablation_curve(bundle, target, order, ks, options)
        _emit(
            {
                "report": "ablation",
                "target": target.value,
                "ranking_order": order,
                "mmre_by_k": {str(k): curve[k].mmre for k in sorted(curve)},
            },
            args,
        )
        return 0

    if args.command == "historysim":
        steps = history_simulation(bundle, args.start, target, options, active_ids)
        _emit(
            {
                "report": "history_simulation",
                "target": target.value,
                "start": args.start,
                "steps": [
                    {
                        "history_size": s.history_size,
                        "release": s.predicted_release_id,
                        "predicted": s.predicted,
                        "actual": s.actual,
                        "mre": s.mre,
                    }
                    for s in steps
                ],
            },
            args,
        )
        return 0

    raise AssertionError(f"unhandled command {args.command}")


def render_json_fragment(report):
    from .bundle import report_to_payload

    return report_to_payload(report)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except BundleValidationError as exc:
        print("bundle validation failed:", file=sys.stderr)
        for issue in exc.errors:
            print(f"  {issue.entity}.{issue.field}: {issue.message}", file=sys.stderr)
        return 1
    except (EstimationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
