"""
Tests for configuration loading and report I/O
"""
import json
import math

import numpy as np
import pandas as pd
import pytest

from galine.config import Config, get_config, reset_config
from galine.tests.conftest import CONFIG_PATH
from galine.utils import load_json, save_csv, save_json


@pytest.fixture
def config():
    return Config(str(CONFIG_PATH))


class TestConfig:
    def test_dot_notation(self, config):
        assert config.get("sampling.cocycle_triples") == 50
        assert config.get("tolerances.accel") == pytest.approx(1e-3)

    def test_default_for_missing_key(self, config):
        assert config.get("sampling.missing", 7) == 7
        assert config.get("tolerances.accel.deeper", "x") == "x"

    def test_environment_override(self, config, monkeypatch):
        monkeypatch.setenv("TOLERANCES_ACCEL", "0.002")
        assert config.get("tolerances.accel") == pytest.approx(0.002)
        monkeypatch.setenv("SAMPLING_COCYCLE_TRIPLES", "10")
        assert config.get("sampling.cocycle_triples") == 10

    def test_section(self, config):
        assert "numeric_composition" in config.get_section("tolerances")
        assert config.get_section("absent") == {}

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            Config(str(tmp_path / "nope.yaml"))

    def test_singleton(self):
        reset_config()
        try:
            assert get_config(str(CONFIG_PATH)) is get_config()
        finally:
            reset_config()


class TestReportIO:
    def test_json_sorted_with_numpy_values(self, tmp_path):
        path = tmp_path / "reports" / "out.json"
        save_json({"b": np.float64(0.1), "a": np.array([1, 2]), "ok": np.bool_(True)}, str(path))
        text = path.read_text(encoding="utf-8")
        assert text.index('"a"') < text.index('"b"')
        data = load_json(str(path))
        assert data == {"a": [1, 2], "b": 0.1, "ok": True}

    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "series.csv"
        frame = pd.DataFrame({"b": [0.0, 0.5], "<X>": [1.0 / 3.0, 2.0]})
        save_csv(frame, str(path))
        loaded = pd.read_csv(path)
        assert list(loaded.columns) == ["b", "<X>"]
        assert math.isclose(loaded["<X>"][0], 1.0 / 3.0, rel_tol=0, abs_tol=1e-16)

    def test_json_is_valid_utf8(self, tmp_path):
        path = tmp_path / "unicode.json"
        save_json({"label": "ω(g₂,g₁)"}, str(path))
        assert json.loads(path.read_text(encoding="utf-8"))["label"] == "ω(g₂,g₁)"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
