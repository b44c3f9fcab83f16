import json

import pytest

from defectcast import (
    BundleValidationError,
    Target,
    bundle_to_payload,
    load_bundle,
    render_report,
    summarize_mres,
    write_report,
)
from defectcast.bundle import _build_bundle


MINIMAL = {
    "factors": [
        {
            "id": "D1",
            "name": "Interface changes",
            "target": "defect_content",
            "levels": ["none", "one complex", ">15% complex", ">25% complex"],
        }
    ],
    "quantifications": [
        {
            "expert": "X1",
            "factor_id": "D1",
            "target": "defect_content",
            "min": 0.10,
            "most_likely": 0.15,
            "max": 0.25,
        }
    ],
    "releases": [
        {
            "id": "A",
            "size": 100,
            "defects_found": 40,
            "defects_slipped": 10,
            "levels": {"D1": 2},
        }
    ],
}


def write_json(tmp_path, payload, name="bundle.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


class TestLoadBundle:
    def test_minimal_bundle_loads_clean(self, tmp_path):
        bundle = load_bundle(write_json(tmp_path, MINIMAL))
        assert len(bundle.factors) == 1
        assert bundle.releases[0].levels == {"D1": 2}
        assert bundle.warnings == ()

    def test_triangle_order_error_names_expert_and_factor(self, tmp_path):
        bad = json.loads(json.dumps(MINIMAL))
        bad["quantifications"][0]["most_likely"] = 0.05
        with pytest.raises(BundleValidationError) as exc:
            load_bundle(write_json(tmp_path, bad))
        issue = exc.value.errors[0]
        assert "X1" in issue.entity and "D1" in issue.entity

    def test_missing_level_is_reference_error(self, tmp_path):
        bad = json.loads(json.dumps(MINIMAL))
        bad["releases"][0]["levels"] = {}
        with pytest.raises(BundleValidationError) as exc:
            load_bundle(write_json(tmp_path, bad))
        assert any(
            "D1" in i.message and i.entity == "release:A" for i in exc.value.errors
        )

    def test_level_out_of_range(self, tmp_path):
        bad = json.loads(json.dumps(MINIMAL))
        bad["releases"][0]["levels"] = {"D1": 5}
        with pytest.raises(BundleValidationError):
            load_bundle(write_json(tmp_path, bad))

    def test_unquantified_factor_rejected(self, tmp_path):
        bad = json.loads(json.dumps(MINIMAL))
        bad["quantifications"] = []
        with pytest.raises(BundleValidationError) as exc:
            load_bundle(write_json(tmp_path, bad))
        assert any("no impact estimate" in i.message for i in exc.value.errors)

    def test_validation_is_exhaustive(self, tmp_path):
        bad = json.loads(json.dumps(MINIMAL))
        bad["quantifications"][0]["most_likely"] = 0.05
        bad["releases"][0]["levels"] = {"D1": 9}
        bad["releases"].append(dict(bad["releases"][0]))
        with pytest.raises(BundleValidationError) as exc:
            load_bundle(write_json(tmp_path, bad))
        assert len(exc.value.errors) >= 3

    def test_parse_error(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(BundleValidationError):
            load_bundle(path)

    def test_both_target_name_warns(self, tmp_path):
        doc = json.loads(json.dumps(MINIMAL))
        doc["factors"].append(
            {
                "id": "E1",
                "name": "Interface changes",
                "target": "effectiveness",
                "levels": ["a", "b", "c", "d"],
            }
        )
        doc["quantifications"].append(
            {
                "expert": "X1", "factor_id": "E1", "target": "effectiveness",
                "min": 0.0, "most_likely": 0.1, "max": 0.2,
            }
        )
        doc["releases"][0]["levels"]["E1"] = 1
        bundle = load_bundle(write_json(tmp_path, doc))
        assert any("both defect content and effectiveness" in w
                   for w in bundle.warnings)

    def test_outlier_release_warns(self, example_bundle):
        assert any("outlier" in w for w in example_bundle.warnings)


class TestRoundTrip:
    def test_echo_is_stable(self, tmp_path, example_bundle_path):
        first = load_bundle(example_bundle_path)
        echoed = write_json(tmp_path, bundle_to_payload(first), "echo.json")
        second = load_bundle(echoed)
        assert bundle_to_payload(first) == bundle_to_payload(second)
        assert first.releases == second.releases


class TestResolveActive:
    def test_effectiveness_defaults_to_top_two(self, example_bundle):
        active = example_bundle.resolve_active(Target.EFFECTIVENESS)
        assert [f.id for f in active] == ["E1", "E2"]

    def test_defect_content_defaults_to_all(self, example_bundle):
        active = example_bundle.resolve_active(Target.DEFECT_CONTENT)
        assert [f.id for f in active] == ["D1", "D2", "D3", "D4", "D5"]

    def test_override_wins(self, example_bundle):
        active = example_bundle.resolve_active(Target.DEFECT_CONTENT, ["D3"])
        assert [f.id for f in active] == ["D3"]


class TestWriteReport:
    def test_byte_identical_serialization(self, tmp_path):
        report = summarize_mres([0.1, 0.2, 0.3], ids=["A", "B", "C"],
                                model_name="demo")
        for fmt in ("json", "csv", "text"):
            p1, p2 = tmp_path / f"a.{fmt}", tmp_path / f"b.{fmt}"
            write_report(report, fmt, p1)
            write_report(report, fmt, p2)
            assert p1.read_bytes() == p2.read_bytes()

    def test_csv_accuracy_layout(self):
        report = summarize_mres([0.1], ids=["A"], model_name="demo")
        lines = render_report(report, "csv").splitlines()
        assert lines[0] == "release,predicted,actual,mre"
        assert lines[1].startswith("A,1.1,1")
        assert any(line.startswith("MMRE") for line in lines)
        assert any(line.startswith("Pred(0.25)") for line in lines)

    def test_json_prediction_keys(self):
        from defectcast import (
            EngineOptions,
            NewReleaseSpec,
            calibrate,
            predict_defect_content,
        )
        from conftest import make_factor, make_release, make_triangle

        factor = make_factor("D1")
        tri = make_triangle("D1")
        ctx = calibrate([make_release(levels={"D1": 1})], [factor], [], [tri])
        pred = predict_defect_content(
            ctx, NewReleaseSpec(size=100, levels={"D1": 1}), [factor], [tri],
            EngineOptions(n_samples=100),
        )
        payload = json.loads(render_report(pred, "json"))
        assert {"point", "quantiles", "seed", "n_samples"} <= payload.keys()

    def test_six_significant_digits(self):
        report = summarize_mres([1 / 3], ids=["A"])
        payload = json.loads(render_report(report, "json"))
        assert payload["mmre"] == 0.333333
