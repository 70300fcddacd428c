"""
Modul data_loader: membaca file konfigurasi model (TOML) dan artefak run
sebelumnya (value.csv, path.csv).

Key yang tidak dikenal selalu ditolak dengan nama key lengkap, mis.
``model.gama``, karena salah ketik pada rho atau gamma akan merusak semua
angka turunan.
"""

from __future__ import annotations

import hashlib
import importlib
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path as FilePath
from typing import Optional

import pandas as pd

from .errors import ConfigError, HJBGrowthError
from .hjb_solver import SolveConfig, ValueGrid
from .model import (
    Assumption6Params,
    ModelSpec,
    SamplingConfig,
    ScalarField2,
    default_c_cap,
    make_ak_crra,
    make_linear_counterexample,
    make_log_ak,
    make_rck_cobb_douglas,
)
from .ode import IntegratorConfig, Path

logger = logging.getLogger(__name__)

FAMILY_KEYS = {
    "log_ak": {"gamma": float},
    "ak_crra": {"gamma": float, "theta": float},
    "rck_cobb_douglas": {"alpha": float, "d": float, "theta": float},
    "linear_counterexample": {},
    "custom": {"utility": str, "technology": str, "d1": float, "d2": float},
}
FAMILY_REQUIRED = {
    "log_ak": ("gamma",),
    "ak_crra": ("gamma", "theta"),
    "rck_cobb_douglas": ("alpha", "d"),
    "linear_counterexample": (),
    "custom": ("utility", "technology"),
}
DEFAULT_K_DOMAIN = {
    "rck_cobb_douglas": (1.0, 10.0),
    "linear_counterexample": (0.01, 10.0),
}
TABLES = {
    "grid": {"k_lo": float, "k_hi": float, "n": int},
    "policy": {"c_cap": float, "tol": float},
    "solve": {"max_iters": int, "residual_tol": float, "relaxation": float, "scheme": str,
              "step": float, "upper_pad": float},
    "integrator": {"method": str, "step": float, "rtol": float, "atol": float, "t_end": float,
                   "samples": int},
    "sampling": {"n_k": int, "n_c": int, "n_pairs": int},
    "assumption6": {name: float for name in
                    ("k_star", "k_plus", "c_star", "gamma", "delta", "theta", "a", "b", "cc")},
}
TOP_LEVEL = {"rho": float, "seed": int}
DEFAULT_NODES = 400
DEFAULT_POLICY_TOL = 1e-10


@dataclass(frozen=True)
class RunConfig:
    """Konfigurasi run lengkap hasil parsing satu file model."""

    model: ModelSpec
    grid: ValueGrid
    solve: SolveConfig
    integrator: IntegratorConfig
    sampling: SamplingConfig
    a6: Optional[Assumption6Params]
    policy_tol: float
    config_hash: str
    source: str


def _check_type(dotted, value, expected):
    if expected is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif expected is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, expected)
    if not ok:
        raise ConfigError(f"{dotted}: tipe harus {expected.__name__}, diterima {type(value).__name__}")
    return expected(value)


def _check_table(prefix, table, schema):
    if not isinstance(table, dict):
        raise ConfigError(f"{prefix} harus berupa tabel")
    out = {}
    for key, value in table.items():
        dotted = f"{prefix}.{key}"
        if key not in schema:
            raise ConfigError(f"key tidak dikenal: {dotted}")
        out[key] = _check_type(dotted, value, schema[key])
    return out


def _import_field(dotted, target):
    module_name, _, attr = target.partition(":")
    if not module_name or not attr:
        raise ConfigError(f"{dotted} harus berbentuk 'module:attribute', diterima {target!r}")
    try:
        obj = getattr(importlib.import_module(module_name), attr)
    except (ImportError, AttributeError) as exc:
        raise ConfigError(f"{dotted}: tidak bisa mengimpor {target!r} ({exc})") from exc
    if callable(obj) and not isinstance(obj, ScalarField2):
        obj = obj()
    if not isinstance(obj, ScalarField2):
        raise ConfigError(f"{dotted}: {target!r} bukan ScalarField2")
    return obj


def parse_config(raw, *, config_hash="", source="<memory>"):
    """Validasi dict hasil tomllib dan bangun RunConfig."""
    unknown = [k for k in raw if k not in TOP_LEVEL and k != "model" and k not in TABLES]
    if unknown:
        raise ConfigError(f"key tidak dikenal: {unknown[0]}")
    if "rho" not in raw:
        raise ConfigError("key wajib hilang: rho")
    rho = _check_type("rho", raw["rho"], float)
    seed = _check_type("seed", raw["seed"], int) if "seed" in raw else 0

    model_table = raw.get("model")
    if not isinstance(model_table, dict) or "family" not in model_table:
        raise ConfigError("key wajib hilang: model.family")
    family = model_table["family"]
    if family not in FAMILY_KEYS:
        raise ConfigError(f"model.family tidak dikenal: {family!r}")
    params = _check_table("model", {k: v for k, v in model_table.items() if k != "family"},
                          FAMILY_KEYS[family])
    for key in FAMILY_REQUIRED[family]:
        if key not in params:
            raise ConfigError(f"key wajib hilang: model.{key}")

    tables = {name: _check_table(name, raw.get(name, {}), schema) for name, schema in TABLES.items()}
    k_lo_default, k_hi_default = DEFAULT_K_DOMAIN.get(family, (0.1, 10.0))
    grid_cfg = tables["grid"]
    k_domain = (grid_cfg.get("k_lo", k_lo_default), grid_cfg.get("k_hi", k_hi_default))
    n = grid_cfg.get("n", DEFAULT_NODES)
    c_cap = tables["policy"].get("c_cap")

    try:
        model = _build_model(family, rho, params, k_domain, c_cap, model_table)
        a6 = None
        if raw.get("assumption6") is not None:
            missing = [k for k in TABLES["assumption6"] if k not in tables["assumption6"]]
            if missing:
                raise ConfigError(f"key wajib hilang: assumption6.{missing[0]}")
            a6 = Assumption6Params(**tables["assumption6"]).validate(rho)
        grid = ValueGrid.template(k_domain[0], k_domain[1], n)
        solve = SolveConfig(**tables["solve"])
        integrator = IntegratorConfig(**tables["integrator"])
        sampling = SamplingConfig(seed=seed, **tables["sampling"])
    except ConfigError:
        raise
    except (HJBGrowthError, TypeError) as exc:
        raise ConfigError(f"konfigurasi tidak valid: {exc}") from exc

    return RunConfig(
        model=model, grid=grid, solve=solve, integrator=integrator, sampling=sampling, a6=a6,
        policy_tol=tables["policy"].get("tol", DEFAULT_POLICY_TOL),
        config_hash=config_hash, source=source,
    )


def _build_model(family, rho, params, k_domain, c_cap, model_table):
    if family == "log_ak":
        return make_log_ak(params["gamma"], rho, k_domain=k_domain, c_cap=c_cap)
    if family == "ak_crra":
        return make_ak_crra(params["gamma"], params["theta"], rho, k_domain=k_domain, c_cap=c_cap)
    if family == "rck_cobb_douglas":
        return make_rck_cobb_douglas(params["alpha"], params["d"], rho, params.get("theta", 1.0),
                                     k_domain=k_domain, c_cap=c_cap)
    if family == "linear_counterexample":
        return make_linear_counterexample(rho, k_domain=k_domain, c_cap=c_cap)
    utility = _import_field("model.utility", model_table["utility"])
    technology = _import_field("model.technology", model_table["technology"])
    return ModelSpec(
        rho=rho, utility=utility, technology=technology, k_domain=k_domain,
        c_cap=c_cap if c_cap is not None else default_c_cap(technology, k_domain[1]),
        d1=params.get("d1", 0.0), d2=params.get("d2", 0.0), label="custom",
        params={"family": "custom"},
    )


def load_config(filepath):
    """
    Baca file TOML model.

    Raises:
        ConfigError: file tidak ada, TOML rusak, key tidak dikenal/hilang atau tipe salah
    """
    path = FilePath(filepath)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"tidak bisa membaca konfigurasi {path}: {exc}") from exc
    try:
        raw = tomllib.loads(data.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"TOML tidak valid di {path}: {exc}") from exc
    config = parse_config(raw, config_hash=hashlib.sha256(data).hexdigest(), source=str(path))
    logger.info("konfigurasi %s: model %s, %d node", path, config.model.label, config.grid.size)
    return config


def load_value_grid(location):
    """ValueGrid dari value.csv (kolom k, V, dV, c_policy) atau direktori run yang memuatnya."""
    path = FilePath(location)
    if path.is_dir():
        path = path / "value.csv"
    try:
        df = pd.read_csv(path)
    except (OSError, pd.errors.ParserError) as exc:
        raise ConfigError(f"tidak bisa membaca {path}: {exc}") from exc
    missing = [col for col in ("k", "V", "dV") if col not in df.columns]
    if missing:
        raise ConfigError(f"{path}: kolom {missing} tidak ada")
    policy = df["c_policy"].to_numpy() if "c_policy" in df.columns else None
    return ValueGrid(df["k"].to_numpy(), df["V"].to_numpy(), df["dV"].to_numpy(), policy,
                     label=f"csv:{path}")


def load_path(filepath):
    """Path dari path.csv (kolom t, k, c)."""
    path = FilePath(filepath)
    try:
        df = pd.read_csv(path)
    except (OSError, pd.errors.ParserError) as exc:
        raise ConfigError(f"tidak bisa membaca {path}: {exc}") from exc
    missing = [col for col in ("t", "k", "c") if col not in df.columns]
    if missing:
        raise ConfigError(f"{path}: kolom {missing} tidak ada")
    return Path(df["t"].to_numpy(), df["k"].to_numpy(), df["c"].to_numpy(),
                {"kind": "csv", "source": str(path)})
