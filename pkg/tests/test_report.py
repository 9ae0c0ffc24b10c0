import json

import pytest

from xrqos.errors import UnknownKeyError
from xrqos.profiles import builtin_registry
from xrqos.report import report_to_csv, report_to_json, requirements_report


class TestRequirementsReport:
    def test_reproduces_summary_columns(self):
        result = requirements_report(builtin_registry(), ("quest2@72", "eye_like"))
        quest = result["profiles"]["quest2@72"]
        eye = result["profiles"]["eye_like"]
        assert quest["bitrates"][600.0].value_in("Mi") == pytest.approx(18.44, abs=0.01)
        assert eye["bitrates"][1.0].value_in("Ti") == pytest.approx(2.71, rel=0.005)
        assert quest["max_loss_rate"] == 7.2e-6
        assert eye["min_delivery_pct"] == pytest.approx(99.9999, abs=5e-7)

    def test_single_profile_single_factor(self):
        result = requirements_report(builtin_registry(), ("quest2@120",), factors=(1.0,))
        profile = result["profiles"]["quest2@120"]
        assert list(profile["bitrates"]) == [1.0]
        assert profile["refresh_hz"] == 120

    def test_unknown_key(self):
        with pytest.raises(UnknownKeyError):
            requirements_report(builtin_registry(), ("vive",))

    def test_key_order_is_preserved(self):
        result = requirements_report(builtin_registry(), ("eye_like", "quest2@72"))
        assert result["columns"] == ["eye_like", "quest2@72"]


class TestSerialization:
    def test_json_deterministic(self):
        registry = builtin_registry()
        first = report_to_json(requirements_report(registry, ("quest2@72", "eye_like")))
        second = report_to_json(requirements_report(registry, ("quest2@72", "eye_like")))
        assert first == second
        payload = json.loads(first)
        assert payload["profiles"]["quest2@72"]["bitrates"]["600.0"]["bps"] > 0

    def test_json_carries_raw_and_formatted(self):
        payload = json.loads(report_to_json(requirements_report(builtin_registry(), ("eye_like",))))
        cell = payload["profiles"]["eye_like"]["bitrates"]["600.0"]
        assert cell["bps"] == pytest.approx(2.978976e12 / 600, rel=1e-12)
        assert cell["binary"] == "4.62 Gibps"
        assert cell["decimal"] == "4.96 Gbps"

    def test_csv_deterministic_and_wide(self):
        registry = builtin_registry()
        first = report_to_csv(requirements_report(registry, ("quest2@72", "eye_like")))
        second = report_to_csv(requirements_report(registry, ("quest2@72", "eye_like")))
        assert first == second
        lines = first.splitlines()
        assert lines[0] == "requirement,quest2@72,eye_like"
        labels = [line.split(",")[0] for line in lines[1:]]
        assert "ppd" in labels
        assert "bitrate_bps_factor_600" in labels
