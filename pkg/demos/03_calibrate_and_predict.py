"""Calibrate the context on the release history and predict a new release.

Calibration inverts DC = size * DD_base * (1 + DDIF) and
Eff = Eff_base * (1 + EIF) on every included release; the context base
values are the medians.  Prediction reapplies the equations with the
new release's size and characterization.
"""

from pathlib import Path

from defectcast import (
    EngineOptions,
    NewReleaseSpec,
    Target,
    calibrate,
    load_bundle,
    predict_defect_content,
    predict_defects_found,
    predict_effectiveness,
)

bundle = load_bundle(Path(__file__).parent / "data" / "example_bundle.json")
options = EngineOptions(seed=0)

dc_factors = bundle.resolve_active(Target.DEFECT_CONTENT)
eff_factors = bundle.resolve_active(Target.EFFECTIVENESS)  # defaults to top-2 ranked
print("Active factors:",
      [f.id for f in dc_factors], "+", [f.id for f in eff_factors])

ctx = calibrate(
    bundle.included_releases(), dc_factors, eff_factors,
    bundle.quantifications, options,
)
print("\nPer-release base values:")
for rid in ctx.included_ids:
    c = ctx.per_release[rid]
    print(f"  {rid}: DD_base={c.dd_base:.4f}  Eff_base={c.eff_base:.4f}  "
          f"(DDIF {c.ddif_point:.3f}, EIF {c.eif_point:.3f})")
print(f"Context medians: DD_base={ctx.dd_base_median:.4f}, "
      f"Eff_base={ctx.eff_base_median:.4f}")

# A planned release: 130 relevant test cases, fairly stable requirements
# but heavy interface work.
spec = NewReleaseSpec(
    size=130,
    levels={"D1": 1, "D2": 1, "D3": 3, "D4": 1, "D5": 0,
            "E1": 2, "E2": 2, "E3": 3, "E4": 2, "E5": 2},
)
dc_pred = predict_defect_content(ctx, spec, dc_factors, bundle.quantifications, options)
eff_pred = predict_effectiveness(ctx, spec, eff_factors, bundle.quantifications, options)

print(f"\nPredicted defect content: {dc_pred.point:.1f}")
for p, v in sorted(dc_pred.quantiles.items()):
    print(f"  q{p:<5g} {v:.1f}")
print(f"Predicted effectiveness: {eff_pred.point:.3f} (clipped at 1)")
for p, v in sorted(eff_pred.quantiles.items()):
    print(f"  q{p:<5g} {v:.3f}")
print(f"Expected defects found: {predict_defects_found(dc_pred, eff_pred):.1f}")
