"""
End-to-end tests for the command-line pipeline and scenario validation
"""
import json
from fractions import Fraction

import pytest
from pydantic import ValidationError

from galine.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from galine.errors import ScenarioError
from galine.scenario import RunConfig, ScenarioModel, load_scenario
from galine.tests.conftest import CONFIG_PATH, SCENARIO_DIR


@pytest.fixture(autouse=True)
def small_samples(monkeypatch, tmp_path):
    """Keep exact-arithmetic suites short and the log file inside tmp_path"""
    for key in ("COCHAIN_SAMPLES", "COCYCLE_TRIPLES", "REDUCTION_PAIRS", "COMPOSITION_DRAWS"):
        monkeypatch.setenv(f"SAMPLING_{key}", "4")
    monkeypatch.setenv("LOGGING_FILE", str(tmp_path / "galine.log"))


def run(command, tmp_path, *extra, scenario="canonical.json"):
    argv = [command, "--config", str(CONFIG_PATH), "--out", str(tmp_path / "out")]
    if scenario is not None:
        argv += ["--scenario", str(SCENARIO_DIR / scenario)]
    return main(argv + list(extra))


def read_report(tmp_path, name):
    with open(tmp_path / "out" / name, "r", encoding="utf-8") as f:
        return json.load(f)


class TestCommands:
    """Exit codes and report files"""

    def test_verify_passes(self, tmp_path):
        assert run("verify", tmp_path, "--seed", "1") == EXIT_OK
        report = read_report(tmp_path, "verify_canonical.json")
        assert report["passed"]
        assert set(report["suites"]) == {"dd_zero", "cocycle", "reduction", "composition", "commutators"}

    def test_verify_general_spec(self, tmp_path):
        assert run("verify", tmp_path, "--suite", "cocycle,reduction", scenario="general.json") == EXIT_OK

    def test_composition_suite_reports_full_phase(self, tmp_path):
        assert run("verify", tmp_path, "--suite", "composition", scenario="general.json") == EXIT_OK
        checks = read_report(tmp_path, "verify_general.json")["suites"]["composition"]["checks"]
        gauge = next(c for c in checks if c["check"] == "gauge_composition_defect")
        assert gauge["samples"] == 4
        assert not gauge["violations"]

    def test_negative_control_fails(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SAMPLING_COCYCLE_TRIPLES", "50")
        code = run("verify", tmp_path, "--suite", "cocycle", "--negative-control")
        assert code == EXIT_FAIL
        report = read_report(tmp_path, "verify_canonical.json")
        checks = report["suites"]["cocycle"]["checks"]
        assert any(c["violations"] for c in checks)

    def test_cocycle_check(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SAMPLING_COCYCLE_TRIPLES", "20")
        assert run("cocycle-check", tmp_path, scenario="general.json") == EXIT_OK
        report = read_report(tmp_path, "cocycle_general.json")
        assert report["mass"] == "2"
        assert report["nontrivial_witness"] is not None

    def test_cocycle_check_massless(self, tmp_path):
        assert run("cocycle-check", tmp_path, scenario="massless.json") == EXIT_FAIL
        assert not read_report(tmp_path, "cocycle_massless.json")["embeddable"]

    def test_commutators(self, tmp_path):
        assert run("commutators", tmp_path) == EXIT_OK
        report = read_report(tmp_path, "commutators_report.json")
        assert report["acceleration_matches_frame"]
        assert report["bracket"]["match"]

    def test_report_merges(self, tmp_path):
        assert run("commutators", tmp_path) == EXIT_OK
        assert run("report", tmp_path, scenario=None) == EXIT_OK
        summary = read_report(tmp_path, "summary.json")
        assert summary["reports"] == {"commutators_report.json": True}

    def test_empty_report_fails(self, tmp_path):
        assert run("report", tmp_path, scenario=None) == EXIT_FAIL


class TestUsageErrors:
    """Configuration problems exit with 2"""

    def test_missing_scenario(self, tmp_path):
        assert run("verify", tmp_path, scenario=None) == EXIT_USAGE

    def test_unknown_suite(self, tmp_path):
        assert run("verify", tmp_path, "--suite", "dd_zero,bogus") == EXIT_USAGE

    def test_malformed_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        assert main(["verify", "--config", str(CONFIG_PATH), "--scenario", str(bad)]) == EXIT_USAGE

    def test_missing_scenario_file(self, tmp_path):
        assert run("verify", tmp_path, scenario="absent.json") == EXIT_USAGE

    def test_unknown_command(self):
        assert main(["frobnicate"]) == EXIT_USAGE

    def test_negative_seed(self, tmp_path):
        assert run("verify", tmp_path, "--seed", "-1") == EXIT_USAGE


class TestScenarioModel:
    """Validation of scenario files"""

    def test_bundled_scenarios_load(self):
        for path in sorted(SCENARIO_DIR.glob("*.json")):
            scenario = load_scenario(path)
            assert scenario.cocycle_spec().max_degree == scenario.spec.N

    def test_canonical_scenario(self):
        scenario = load_scenario(SCENARIO_DIR / "canonical.json")
        assert scenario.cocycle_spec().mass == 1
        assert scenario.frame_scenario().frame_accel == Fraction(1, 2)
        assert scenario.sweep[0].name == "beta1_gamma2"

    def test_extra_keys_rejected(self):
        with pytest.raises(ValidationError):
            ScenarioModel.model_validate({"spec": {"beta": [1], "gamma": [0, 1]}, "colour": "red"})
        with pytest.raises(ValidationError):
            ScenarioModel.model_validate({"spec": {"beta": [1], "gamma": [0, 1], "m": 1}})

    def test_bad_rational_rejected(self):
        with pytest.raises(ValidationError):
            ScenarioModel.model_validate({"spec": {"beta": ["1/0"], "gamma": [0, 1]}})
        with pytest.raises(ValidationError):
            ScenarioModel.model_validate({"spec": {"beta": [1], "gamma": ["one"]}})

    def test_frame_translation_default(self):
        scenario = ScenarioModel.model_validate({"spec": {"beta": [1], "gamma": [0, 1], "N": 4}, "frame": {"accel": "1/2"}})
        assert scenario.frame_translation(4).x.coeffs == (0, 0, Fraction(1, 2))

    def test_uniform_translation_passes_through(self):
        scenario = ScenarioModel.model_validate(
            {"spec": {"beta": [1], "gamma": [0, 1], "N": 4}, "frame": {"translation": [[0, 0, "3/4"], [], []]}}
        )
        assert scenario.frame_scenario().frame_accel == Fraction(3, 4)

    @pytest.mark.parametrize(
        "frame",
        [
            {"translation": [[0, 0, "1/2", 0, 24], [], []]},
            {"translation": [[0, 1], [], []]},
            {"translation": [[], [0, 0, 1], []]},
            {"accel": "1/2", "translation": [[0, 0, 1], [], []]},
        ],
    )
    def test_non_uniform_translation_rejected_for_grid(self, frame):
        scenario = ScenarioModel.model_validate({"spec": {"beta": [1], "gamma": [0, 1], "N": 4}, "frame": frame})
        with pytest.raises(ScenarioError):
            scenario.frame_scenario()
        assert scenario.generating_spec().frame == scenario.frame_translation(4)

    def test_evolve_rejects_quartic_frame(self, tmp_path):
        path = tmp_path / "quartic.json"
        data = json.loads((SCENARIO_DIR / "canonical.json").read_text(encoding="utf-8"))
        data["frame"] = {"translation": [[0, 0, "1/2", 0, 24], [], []]}
        data.pop("sweep", None)
        path.write_text(json.dumps(data), encoding="utf-8")
        assert main(["evolve", "--config", str(CONFIG_PATH), "--out", str(tmp_path / "out"), "--scenario", str(path)]) == EXIT_USAGE

    def test_run_config_defaults(self):
        run_config = RunConfig()
        assert run_config.suites == ["dd_zero", "cocycle", "reduction", "composition", "commutators"]
        with pytest.raises(ValidationError):
            RunConfig(tol=0.0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
