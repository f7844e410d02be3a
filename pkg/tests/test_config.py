"""Tests for configuration loading."""

import json
import math
import os

import pytest

from traceforms.config import (
    Config,
    ConfigError,
    KatoConfig,
    MeasureConfig,
    deep_merge,
    find_config_file,
    load_config,
    load_env_config,
    parse_env_value,
)
from traceforms.numerics.kato import LebesgueInterval
from traceforms.numerics.kernels import KernelType
from traceforms.numerics.measures import AtomicMeasure, Direction, SphereFamilyMeasure


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in list(os.environ):
        if key.startswith("TRACEFORMS_"):
            monkeypatch.delenv(key)


class TestDefaults:
    def test_default_config(self):
        config = Config()
        assert config.kernel.type == KernelType.EXPONENTIAL_1D
        assert config.converge.k_max == 3
        assert config.graph1d.n == 10
        assert config.ball.ns == [2, 4, 8, 16, 32]
        assert config.kato.radii == [0.1, 0.01, 0.001]
        assert config.output.format == "json"

    def test_default_builds(self):
        config = Config()
        kernel = config.kernel.build()
        assert kernel.d == 1
        measure = config.measure.build()
        assert isinstance(measure, AtomicMeasure)
        assert measure.size == 1
        sequence = config.sequence.build()
        assert sequence.labels == tuple(range(31))
        assert sequence.direction == Direction.INCREASING

    def test_newtonian_defaults_to_three_dimensions(self):
        config = Config.model_validate({"kernel": {"type": "newtonian"}})
        assert config.kernel.build().d == 3

    def test_invalid_kernel_rejected(self):
        with pytest.raises(ValueError):
            Config.model_validate({"kernel": {"type": "riesz", "d": 1, "alpha": 1.5}})
        with pytest.raises(ValueError):
            Config.model_validate({"kernel": {"type": "newtonian", "d": 2}})


class TestSections:
    def test_sphere_measure(self):
        measure = MeasureConfig(family="spheres", radii=[1.0], masses=[4 * math.pi]).build()
        assert isinstance(measure, SphereFamilyMeasure)

    def test_interval_measure(self):
        measure = MeasureConfig(family="interval", interval=(0.0, 2.0)).build()
        assert measure == LebesgueInterval(0.0, 2.0)

    def test_weights_default_to_one(self):
        measure = MeasureConfig(points=[0.0, 1.0, 2.0]).build()
        assert measure.weights.tolist() == [1.0, 1.0, 1.0]

    def test_mismatched_weights(self):
        with pytest.raises(ConfigError):
            MeasureConfig(points=[0.0, 1.0], weights=[1.0]).build()

    def test_measure_path(self, tmp_path):
        path = tmp_path / "measure.json"
        path.write_text(json.dumps({"points": [0.0, 1.0], "weights": [2.0, 3.0]}))
        measure = MeasureConfig(path=str(path)).build()
        assert measure.weights.tolist() == [2.0, 3.0]

    def test_missing_measure_path(self, tmp_path):
        with pytest.raises(ValueError, match="not found"):
            MeasureConfig(path=str(tmp_path / "missing.json"))

    def test_kato_radii_must_decrease(self):
        with pytest.raises(ValueError):
            KatoConfig(radii=[0.01, 0.1])
        with pytest.raises(ValueError):
            KatoConfig(radii=[])

    def test_thinning_shell_sequence(self, sphere_config):
        sequence = sphere_config.sequence.build()
        assert sequence.direction == Direction.DECREASING
        assert sequence.labels == (2, 4, 8)

    def test_explicit_sequence(self):
        config = Config.model_validate(
            {
                "sequence": {
                    "kind": "explicit",
                    "terms": [{"points": [0.0]}],
                    "limit": {"points": [0.0, 1.0]},
                }
            }
        )
        sequence = config.sequence.build()
        assert sequence.limit.size == 2

    def test_explicit_sequence_needs_limit(self):
        config = Config.model_validate({"sequence": {"kind": "explicit", "terms": [{"points": [0.0]}]}})
        with pytest.raises(ConfigError):
            config.sequence.build()

    def test_grid_order(self):
        with pytest.raises(ValueError):
            Config.model_validate({"grid": {"lo": 1.0, "hi": 0.0}})


class TestConfigHash:
    def test_stable(self):
        assert Config().config_hash() == Config().config_hash()
        assert len(Config().config_hash()) == 64

    def test_changes_with_config(self):
        other = Config.model_validate({"converge": {"k_max": 4}})
        assert other.config_hash() != Config().config_hash()


class TestLoadConfig:
    def test_defaults_without_file(self):
        config = load_config(search=False)
        assert config == Config()

    def test_toml_file(self, tmp_path):
        path = tmp_path / "traceforms.toml"
        path.write_text("[converge]\nk_max = 5\n\n[graph1d]\ntol = 1e-6\n")
        config = load_config(path)
        assert config.converge.k_max == 5
        assert config.graph1d.tol == 1e-6

    def test_json_file(self, tmp_path):
        path = tmp_path / "traceforms.json"
        path.write_text(json.dumps({"ball": {"m": 2}}))
        assert load_config(path).ball.m == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "missing.toml")

    def test_unsupported_suffix(self, tmp_path):
        path = tmp_path / "traceforms.ini"
        path.write_text("[converge]\n")
        with pytest.raises(ConfigError, match="Unsupported"):
            load_config(path)

    def test_unparsable_file(self, tmp_path):
        path = tmp_path / "traceforms.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="Could not parse"):
            load_config(path)

    def test_invalid_values(self, tmp_path):
        path = tmp_path / "traceforms.json"
        path.write_text(json.dumps({"converge": {"k_max": 0}}))
        with pytest.raises(ConfigError, match="Invalid configuration"):
            load_config(path)

    def test_env_overrides_file(self, tmp_path, monkeypatch):
        path = tmp_path / "traceforms.json"
        path.write_text(json.dumps({"converge": {"k_max": 5}}))
        monkeypatch.setenv("TRACEFORMS_CONVERGE_K_MAX", "7")
        assert load_config(path).converge.k_max == 7

    def test_overrides_win(self, monkeypatch):
        monkeypatch.setenv("TRACEFORMS_CONVERGE_K_MAX", "7")
        config = load_config(search=False, overrides={"converge": {"k_max": 2}})
        assert config.converge.k_max == 2

    def test_env_list(self, monkeypatch):
        monkeypatch.setenv("TRACEFORMS_KATO_RADII", "0.1,0.01")
        assert load_env_config() == {"kato": {"radii": [0.1, 0.01]}}
        assert load_config(search=False).kato.radii == [0.1, 0.01]


class TestHelpers:
    @pytest.mark.parametrize(
        ("raw", "expected"),
        [
            ("true", True),
            ("off", False),
            ("none", None),
            ("42", 42),
            ("1e-6", 1e-6),
            ("1,2", [1, 2]),
            ("newtonian", "newtonian"),
        ],
    )
    def test_parse_env_value(self, raw, expected):
        assert parse_env_value(raw) == expected

    def test_deep_merge(self):
        base = {"converge": {"k_max": 3, "strict_rank": False}, "ball": {"m": 0}}
        merged = deep_merge(base, {"converge": {"k_max": 5}})
        assert merged == {"converge": {"k_max": 5, "strict_rank": False}, "ball": {"m": 0}}
        assert base["converge"]["k_max"] == 3

    def test_find_config_file(self, tmp_path):
        (tmp_path / ".traceforms.toml").write_text("")
        nested = tmp_path / "a" / "b"
        nested.mkdir(parents=True)
        assert find_config_file(nested) == (tmp_path / ".traceforms.toml").resolve()
