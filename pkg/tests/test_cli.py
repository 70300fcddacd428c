import json
from pathlib import Path

import pandas as pd
import pytest

from hjb_growth.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, run

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

SMALL_LOGAK = """
rho = 0.05

[model]
family = "log_ak"
gamma = 0.1

[grid]
k_lo = 0.1
k_hi = 10.0
n = 64

[integrator]
t_end = 40.0
"""


@pytest.fixture
def logak_config(tmp_path):
    path = tmp_path / "logak.toml"
    path.write_text(SMALL_LOGAK, encoding="utf-8")
    return path


def _json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


class TestUsage:
    def test_unknown_flag(self, tmp_path, logak_config):
        out = tmp_path / "run"
        assert run(["solve", "--config", str(logak_config), "--bogus", "--out", str(out)]) == EXIT_USAGE
        assert not out.exists()

    def test_missing_config_flag(self, tmp_path):
        assert run(["check", "--out", str(tmp_path / "run")]) == EXIT_USAGE

    def test_unknown_subcommand(self):
        assert run(["plot"]) == EXIT_USAGE

    def test_bad_config_writes_nothing(self, tmp_path):
        config = tmp_path / "bad.toml"
        config.write_text('rho = 0.05\n[model]\nfamily = "log_ak"\ngama = 0.1\n', encoding="utf-8")
        out = tmp_path / "run"
        assert run(["check", "--config", str(config), "--out", str(out)]) == EXIT_USAGE
        assert not out.exists()


class TestDemo:
    def test_counterexample(self, tmp_path):
        out = tmp_path / "fact1"
        assert run(["demo", "counterexample", "--rho", "1", "--out", str(out)]) == EXIT_OK
        report = _json(out / "counterexample.json")
        candidates = report["fact1"]["candidates"]
        assert [row["a"] for row in candidates] == [1.0, 2.0, 5.0]
        assert all(row["zero_residual"] for row in candidates)
        assert report["fact1"]["sublinear"]["residual"] == "inf"
        manifest = _json(out / "manifest.json")
        assert manifest["subcommand"] == "demo"
        assert manifest["outputs"] == ["counterexample.json"]

    def test_magic(self, tmp_path):
        out = tmp_path / "magic"
        assert run(["demo", "magic", "--out", str(out)]) == EXIT_OK
        assert _json(out / "magic.json")["passed"]

    def test_demo_hash_ignores_output_dir(self, tmp_path):
        run(["demo", "magic", "--out", str(tmp_path / "a")])
        run(["demo", "magic", "--out", str(tmp_path / "b")])
        assert _json(tmp_path / "a" / "manifest.json")["config_hash"] == \
            _json(tmp_path / "b" / "manifest.json")["config_hash"]


class TestCheck:
    def test_linear_model_fails_marginal_utility(self, tmp_path):
        out = tmp_path / "check"
        code = run(["check", "--config", str(CONFIG_DIR / "linear_rho1.toml"), "--out", str(out)])
        assert code == EXIT_FAILURE
        verdicts = {v["assumption"]: v["status"] for v in _json(out / "assumptions.json")["verdicts"]}
        assert [i for i, s in verdicts.items() if s == "fail"] == [4]

    def test_assumption_table(self, tmp_path):
        out = tmp_path / "check"
        run(["check", "--config", str(CONFIG_DIR / "linear_rho1.toml"), "--out", str(out)])
        table = pd.read_csv(out / "assumptions.csv")
        assert list(table.columns) == ["assumption", "status", "checks", "not_passed"]
        assert table["assumption"].tolist() == list(range(1, 8))
        assert table.loc[table["status"] == "fail", "assumption"].tolist() == [4]
        assert _json(out / "manifest.json")["outputs"] == ["assumptions.json", "assumptions.csv"]

    def test_log_ak_passes(self, tmp_path):
        out = tmp_path / "check"
        assert run(["check", "--config", str(CONFIG_DIR / "logak.toml"), "--out", str(out)]) == EXIT_OK


class TestSolveAndPath:
    def test_solve_outputs(self, tmp_path, logak_config):
        out = tmp_path / "solve"
        assert run(["solve", "--config", str(logak_config), "--out", str(out)]) == EXIT_OK
        table = pd.read_csv(out / "value.csv")
        assert list(table.columns) == ["k", "V", "dV", "c_policy", "residual"]
        assert len(table) == 64
        assert table["residual"].isna().sum() == 2
        certificate = _json(out / "certificate.json")
        assert certificate["in_class_V"]
        manifest = _json(out / "manifest.json")
        assert manifest["outputs"] == ["value.csv", "certificate.json"]
        assert len(manifest["config_hash"]) == 64

    def test_csv_is_deterministic(self, tmp_path, logak_config):
        for name in ("a", "b"):
            assert run(["solve", "--config", str(logak_config), "--out", str(tmp_path / name)]) == EXIT_OK
        assert (tmp_path / "a" / "value.csv").read_bytes() == (tmp_path / "b" / "value.csv").read_bytes()

    def test_path_reuses_solve_output(self, tmp_path, logak_config):
        solve_dir = tmp_path / "solve"
        run(["solve", "--config", str(logak_config), "--out", str(solve_dir)])
        out = tmp_path / "path"
        code = run(["path", "--config", str(logak_config), "--value-dir", str(solve_dir),
                    "--k0", "1.0", "--out", str(out)])
        assert code == EXIT_OK
        table = pd.read_csv(out / "path.csv")
        assert list(table.columns) == ["t", "k", "c", "discounted_utility_density"]
        report = _json(out / "path.json")
        assert report["termination"] == "completed"
        assert report["max_rel_error_vs_closed_form"]["capital"] < 0.1

    def test_path_range_exit(self, tmp_path, logak_config):
        out = tmp_path / "path"
        code = run(["path", "--config", str(logak_config), "--k0", "1.0", "--t-end", "100",
                    "--out", str(out)])
        assert code == EXIT_FAILURE

    def test_diagnose_short_path(self, tmp_path, logak_config):
        solve_dir = tmp_path / "solve"
        run(["solve", "--config", str(logak_config), "--out", str(solve_dir)])
        run(["path", "--config", str(logak_config), "--value-dir", str(solve_dir), "--out", str(solve_dir)])
        out = tmp_path / "diag"
        code = run(["diagnose", "--config", str(logak_config), "--path-csv", str(solve_dir / "path.csv"),
                    "--value-dir", str(solve_dir), "--out", str(out)])
        report = _json(out / "diagnostics.json")
        # horizon 40 terlalu pendek untuk toleransi transversality default
        assert code == EXIT_FAILURE
        assert not report["passed"]
        assert {v["name"] for v in report["verdicts"]} == {"euler_residual", "transversality", "hjb_along_path"}


class TestPolicyAndShoot:
    def test_policy(self, tmp_path, logak_config):
        out = tmp_path / "policy"
        assert run(["policy", "--config", str(logak_config), "--k", "2", "--p", "4", "--out", str(out)]) == EXIT_OK
        result = _json(out / "policy.json")
        assert result["c_star"] == pytest.approx(0.25, rel=1e-8)
        assert result["interior"]

    def test_policy_unbounded(self, tmp_path):
        out = tmp_path / "policy"
        code = run(["policy", "--config", str(CONFIG_DIR / "linear_rho1.toml"), "--k", "1", "--p", "0.5",
                    "--out", str(out)])
        assert code == EXIT_FAILURE

    def test_shoot_without_refinement(self, tmp_path):
        out = tmp_path / "shoot"
        code = run(["shoot", "--config", str(CONFIG_DIR / "rck_cd.toml"), "--c0", "1.0", "--no-refine",
                    "--out", str(out)])
        assert code == EXIT_OK
        report = _json(out / "shoot.json")
        assert [s["label"] for s in report["shots"]] == ["reference", "minus", "plus"]
        assert report["k_ss"] == pytest.approx(3.0 ** (1.0 / 0.7), rel=1e-8)
        assert not report["refined"]
        assert (out / "path.csv").exists()
