from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from hjb_growth.data_loader import load_config, load_path, load_value_grid, parse_config
from hjb_growth.errors import ConfigError

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

LOGAK = """
rho = 0.05

[model]
family = "log_ak"
gamma = 0.1

[grid]
n = 64
"""


def _write(tmp_path, text, name="model.toml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestParseConfig:
    def test_minimal(self):
        config = parse_config({"rho": 0.05, "model": {"family": "log_ak", "gamma": 0.1}})
        assert config.model.family == "log_ak"
        assert config.grid.size == 400
        assert config.grid.domain == pytest.approx((0.1, 10.0))
        assert config.a6 is None

    def test_family_default_domain(self):
        config = parse_config({"rho": 0.05, "model": {"family": "rck_cobb_douglas", "alpha": 0.3, "d": 0.05}})
        assert config.model.k_domain == (1.0, 10.0)

    def test_unknown_model_key_named(self):
        with pytest.raises(ConfigError, match="model.gama"):
            parse_config({"rho": 0.05, "model": {"family": "log_ak", "gama": 0.1}})

    def test_key_of_other_family_rejected(self):
        with pytest.raises(ConfigError, match="model.alpha"):
            parse_config({"rho": 0.05, "model": {"family": "log_ak", "gamma": 0.1, "alpha": 0.3}})

    def test_unknown_table_key(self):
        with pytest.raises(ConfigError, match="solve.tolerance"):
            parse_config({"rho": 0.05, "model": {"family": "log_ak", "gamma": 0.1},
                          "solve": {"tolerance": 1e-6}})

    def test_unknown_top_level(self):
        with pytest.raises(ConfigError, match="sigma"):
            parse_config({"rho": 0.05, "sigma": 1.0, "model": {"family": "log_ak", "gamma": 0.1}})

    def test_missing_rho(self):
        with pytest.raises(ConfigError, match="rho"):
            parse_config({"model": {"family": "log_ak", "gamma": 0.1}})

    def test_missing_family_key(self):
        with pytest.raises(ConfigError, match="model.gamma"):
            parse_config({"rho": 0.05, "model": {"family": "log_ak"}})

    def test_wrong_type(self):
        with pytest.raises(ConfigError, match="grid.n"):
            parse_config({"rho": 0.05, "model": {"family": "log_ak", "gamma": 0.1}, "grid": {"n": 40.5}})

    def test_invalid_model_parameters(self):
        with pytest.raises(ConfigError):
            parse_config({"rho": 0.05, "model": {"family": "log_ak", "gamma": 0.01}})

    def test_partial_upper_bound_params(self):
        with pytest.raises(ConfigError, match="assumption6"):
            parse_config({"rho": 0.05, "model": {"family": "log_ak", "gamma": 0.1},
                          "assumption6": {"k_star": 1.0}})

    def test_custom_family_imports_fields(self):
        config = parse_config({"rho": 0.05, "model": {
            "family": "custom", "utility": "hjb_growth.model:log_utility",
            "technology": "tests.test_data_loader:ak_technology", "d2": 1.0}})
        assert config.model.F(2.0, 0.1) == pytest.approx(0.1)

    def test_custom_family_bad_import(self):
        with pytest.raises(ConfigError, match="model.utility"):
            parse_config({"rho": 0.05, "model": {
                "family": "custom", "utility": "hjb_growth.model",
                "technology": "tests.test_data_loader:ak_technology"}})


def ak_technology():
    from hjb_growth.model import ScalarField2

    return ScalarField2(eval=lambda k, c: 0.1 * k - c, label="0.1k-c")


class TestLoadConfig:
    def test_hash_is_stable(self, tmp_path):
        path = _write(tmp_path, LOGAK)
        assert load_config(path).config_hash == load_config(path).config_hash
        assert load_config(path).grid.size == 64

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.toml")

    def test_malformed_toml(self, tmp_path):
        with pytest.raises(ConfigError, match="TOML"):
            load_config(_write(tmp_path, "rho = = 1"))

    def test_shipped_configs(self):
        for name in ("logak", "linear_rho1", "linear_rho2", "rck_cd", "ak_crra"):
            config = load_config(CONFIG_DIR / f"{name}.toml")
            assert config.model.rho > 0


class TestLoadArtifacts:
    def test_value_grid(self, tmp_path):
        k = np.geomspace(0.1, 10.0, 40)
        pd.DataFrame({"k": k, "V": np.log(k), "dV": 1.0 / k, "c_policy": 0.05 * k}).to_csv(
            tmp_path / "value.csv", index=False)
        grid = load_value_grid(tmp_path)
        assert grid.size == 40
        np.testing.assert_allclose(grid.policy, 0.05 * k)

    def test_value_grid_missing_columns(self, tmp_path):
        pd.DataFrame({"k": [1.0, 2.0], "V": [0.0, 1.0]}).to_csv(tmp_path / "value.csv", index=False)
        with pytest.raises(ConfigError, match="dV"):
            load_value_grid(tmp_path / "value.csv")

    def test_path(self, tmp_path):
        pd.DataFrame({"t": [0.0, 1.0], "k": [1.0, 1.1], "c": [0.05, 0.06]}).to_csv(
            tmp_path / "path.csv", index=False)
        path = load_path(tmp_path / "path.csv")
        assert len(path) == 2
        assert path.meta["kind"] == "csv"
