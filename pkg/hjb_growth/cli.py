"""
Modul cli: front end command-line.

Subcommand:
    check     pemeriksaan Asumsi 1-7              → assumptions.json, assumptions.csv
    solve     solve HJB + sertifikat kelas 𝒱      → value.csv, certificate.json
    policy    c*(p, k) untuk satu pasangan        → policy.json
    path      lintasan optimal dari V             → path.csv, path.json
    shoot     shooting sistem Euler (model RCK)   → shoot.json, path.csv
    diagnose  diagnostik lintasan                 → diagnostics.json
    demo      counterexample | magic              → counterexample.json / magic.json

Setiap run menulis manifest.json ke direktori --out. Semua file ditulis atomik
(file sementara lalu rename).

Exit code: 0 sukses, 1 kegagalan model/asumsi/sertifikat, 2 kesalahan pemakaian.

Contoh:
    python -m hjb_growth solve --config configs/logak.toml --out runs/logak
    python -m hjb_growth path --config configs/logak.toml --value-dir runs/logak --out runs/logak
    python -m hjb_growth demo counterexample --rho 1 --out runs/fact1
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
import tempfile
import time
from dataclasses import replace
from pathlib import Path as FilePath

import numpy as np

from . import __version__
from .data_loader import load_config, load_path, load_value_grid
from .dataset_builder import build_assumption_table, build_path_table, build_value_table
from .diagnostics import PathDiagnostics, counterexample_suite, magic_of_capital_demo
from .errors import ConfigError, HJBGrowthError
from .hjb_solver import HJBSolver
from .model import check_assumptions
from .ode import (
    COMPLETED,
    euler_shooting,
    euler_steady_state,
    log_ak_path,
    optimal_path,
    payoff,
    refine_saddle_consumption,
)
from .policy import maximize_hamiltonian, solve_policy_batch

logger = logging.getLogger(__name__)

# Configuration defaults
DEFAULT_OUT_ROOT = FilePath("runs")
DEFAULT_PERTURB = 1e-3
CSV_FLOAT_FORMAT = "%.15g"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
SUBCOMMANDS = ("check", "solve", "policy", "path", "shoot", "diagnose", "demo")
DEMOS = ("counterexample", "magic")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


# ═══════════════════════════════════════════════════════════════════════════
# OUTPUT
# ═══════════════════════════════════════════════════════════════════════════

def _jsonable(obj):
    """Ubah hasil numpy/dataclass menjadi nilai JSON; NaN → null, ±inf → "inf"/"-inf"."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


class RunWriter:
    """Menulis artefak satu run secara atomik dan mencatatnya untuk manifest."""

    def __init__(self, out_dir, subcommand, config_hash):
        self.out_dir = FilePath(out_dir)
        self.subcommand = subcommand
        self.config_hash = config_hash
        self.outputs = []
        self.started = time.perf_counter()

    def _write_text(self, name, text):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.out_dir, prefix=f".{name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, self.out_dir / name)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        if name not in self.outputs:
            self.outputs.append(name)
        logger.info("ditulis: %s", self.out_dir / name)

    def write_json(self, name, payload):
        self._write_text(name, json.dumps(_jsonable(payload), indent=2, ensure_ascii=False) + "\n")

    def write_csv(self, name, df):
        self._write_text(name, df.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"))

    def finish(self):
        manifest = {
            "config_hash": self.config_hash,
            "tool_version": __version__,
            "subcommand": self.subcommand,
            "outputs": list(self.outputs),
            "wall_time_ms": int(round(1000.0 * (time.perf_counter() - self.started))),
        }
        self.write_json("manifest.json", manifest)
        return manifest


# ═══════════════════════════════════════════════════════════════════════════
# HELPER
# ═══════════════════════════════════════════════════════════════════════════

def _solve(config):
    solver = HJBSolver(config.model, config.grid, config.solve, a6=config.a6)
    value, certificate = solver.run_all()
    return value, certificate, solver.get_summary()


def _value_for(config, value_dir):
    """ValueGrid dari run solve sebelumnya, atau solve ulang bila tidak ada."""
    if value_dir is not None:
        logger.info("memakai value.csv dari %s tanpa solve ulang", value_dir)
        return load_value_grid(value_dir)
    value, certificate, _ = _solve(config)
    if not certificate.in_class_V:
        logger.warning("V hasil solve tidak lulus sertifikat kelas 𝒱")
    return value


def _default_k0(model):
    """k_ss/2 untuk model RCK dengan steady state, selain itu titik tengah geometris domain."""
    if model.rck is not None:
        k_ss = euler_steady_state(model)
        if k_ss is not None and model.k_lo <= 0.5 * k_ss <= model.k_hi:
            return 0.5 * k_ss
    return math.sqrt(model.k_lo * model.k_hi)


# ═══════════════════════════════════════════════════════════════════════════
# SUBCOMMAND
# ═══════════════════════════════════════════════════════════════════════════

def cmd_check(args, config, writer):
    report = check_assumptions(config.model, config.sampling, config.a6)
    report.print_summary()
    writer.write_json("assumptions.json", {"model": config.model.label, **report.to_dict()})
    writer.write_csv("assumptions.csv", build_assumption_table(report))
    return EXIT_FAILURE if report.any_failed else EXIT_OK


def cmd_solve(args, config, writer):
    value, certificate, summary = _solve(config)
    certificate.print_summary()
    writer.write_csv("value.csv", build_value_table(value, certificate))
    writer.write_json("certificate.json", {"solver": summary, **certificate.to_dict()})
    return EXIT_OK if certificate.in_class_V else EXIT_FAILURE


def cmd_policy(args, config, writer):
    result = maximize_hamiltonian(config.model, args.k, args.p, tol=config.policy_tol)
    print(f"c*(p={args.p:g}, k={args.k:g}) = {result.c_star:.12g}  "
          f"({'interior' if result.interior else 'corner'})")
    writer.write_json("policy.json", {"k": args.k, "p": args.p, **result.to_dict()})
    return EXIT_OK


def cmd_path(args, config, writer):
    model = config.model
    V = _value_for(config, args.value_dir)
    k0 = args.k0 if args.k0 is not None else _default_k0(model)
    cfg = config.integrator
    if args.t_end is not None:
        cfg = replace(cfg, t_end=args.t_end)
    path = optimal_path(model, V, k0, cfg)
    estimate = payoff(model, path)
    report = {"k_bar": k0, "value_at_k_bar": float(V.value(k0)), "payoff": estimate.to_dict(),
              **path.summary()}
    if model.family == "log_ak":
        exact = log_ak_path(model, k0, path.times)
        report["max_rel_error_vs_closed_form"] = {
            "capital": float(np.max(np.abs(path.capital / exact.capital - 1.0))),
            "consumption": float(np.max(np.abs(path.consumption / exact.consumption - 1.0))),
        }
    print(f"lintasan optimal dari k̄={k0:g}: {path.termination} pada t={path.t_final:g}, "
          f"k(T)={path.capital[-1]:.6g}, payoff={estimate.total:.6g}")
    writer.write_csv("path.csv", build_path_table(model, path))
    writer.write_json("path.json", report)
    return EXIT_OK


def cmd_shoot(args, config, writer):
    model = config.model
    k_ss = euler_steady_state(model)
    k0 = args.k0 if args.k0 is not None else _default_k0(model)
    if args.c0 is not None:
        c_policy = args.c0
    else:
        V = _value_for(config, args.value_dir)
        p = max(float(V.deriv(k0)), np.finfo(float).tiny)
        c_policy = float(solve_policy_batch(model, k0, p, tol=config.policy_tol).c_star)
    c0 = c_policy if args.no_refine else refine_saddle_consumption(model, k0, c_policy)

    shots = []
    main = None
    for label, factor in (("reference", 1.0), ("minus", 1.0 - args.perturb), ("plus", 1.0 + args.perturb)):
        path = euler_shooting(model, k0, c0 * factor)
        shots.append({"label": label, "c0": c0 * factor, **path.summary()})
        if main is None:
            main = path

    print("\n" + "=" * 70)
    print(f"SHOOTING EULER dari k̄={k0:g}, k_ss={k_ss}")
    print("=" * 70)
    for shot in shots:
        mark = "✓" if shot["termination"] == COMPLETED else "✗"
        print(f"  {mark} {shot['label']:<9} c0={shot['c0']:.12g}: {shot['termination']} "
              f"pada t={shot['t_final']:g}")
    print("=" * 70)

    writer.write_csv("path.csv", build_path_table(model, main))
    writer.write_json("shoot.json", {
        "k_bar": k0, "k_ss": k_ss, "c0_policy": c_policy, "c0": c0,
        "refined": not args.no_refine, "perturb": args.perturb, "shots": shots,
    })
    return EXIT_OK


def cmd_diagnose(args, config, writer):
    model = config.model
    V = None
    if args.value_dir is not None or args.path_csv is None:
        V = _value_for(config, args.value_dir)
    if args.path_csv is not None:
        path = load_path(args.path_csv)
    else:
        path = optimal_path(model, V, _default_k0(model), config.integrator)
    report = PathDiagnostics(model, path, V).run_all()
    report.print_summary()
    writer.write_json("diagnostics.json", {"model": model.label, **report.to_dict()})
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_demo(args, writer):
    if args.demo == "counterexample":
        report = counterexample_suite(args.k_bar, rho_fact1=args.rho)
        name = "counterexample.json"
    else:
        report = magic_of_capital_demo()
        name = "magic.json"
    report.print_summary()
    writer.write_json(name, report.to_dict())
    return EXIT_OK if report.passed else EXIT_FAILURE


COMMANDS = {
    "check": cmd_check,
    "solve": cmd_solve,
    "policy": cmd_policy,
    "path": cmd_path,
    "shoot": cmd_shoot,
    "diagnose": cmd_diagnose,
}


# ═══════════════════════════════════════════════════════════════════════════
# PARSING ARGUMEN
# ═══════════════════════════════════════════════════════════════════════════

def build_parser():
    parser = argparse.ArgumentParser(
        prog="hjb_growth",
        description="Solver HJB untuk akumulasi kapital optimal dan diagnostiknya.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="{" + ",".join(SUBCOMMANDS) + "}")

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, type=FilePath, help="File model TOML")
        p.add_argument("--out", type=FilePath, default=None,
                       help="Direktori output (default: runs/<subcommand>)")
        p.add_argument("--verbose", action="store_true", help="Log level INFO ke stderr")
        return p

    common(sub.add_parser("check", help="Pemeriksaan Asumsi 1-7 pada sampel"))
    common(sub.add_parser("solve", help="Solve HJB dan sertifikat kelas 𝒱"))

    p = common(sub.add_parser("policy", help="Maximisasi Hamiltonian untuk satu (k, p)"))
    p.add_argument("--k", type=float, required=True, help="Kapital k > 0")
    p.add_argument("--p", type=float, required=True, help="Shadow price p > 0")

    p = common(sub.add_parser("path", help="Lintasan optimal dari V"))
    p.add_argument("--k0", type=float, default=None, help="Kapital awal (default k_ss/2 atau tengah domain)")
    p.add_argument("--t-end", type=float, default=None, help="Horizon integrasi (override integrator.t_end)")
    p.add_argument("--value-dir", type=FilePath, default=None, help="Direktori run solve berisi value.csv")

    p = common(sub.add_parser("shoot", help="Shooting sistem Euler (model RCK)"))
    p.add_argument("--k0", type=float, default=None, help="Kapital awal (default k_ss/2)")
    p.add_argument("--c0", type=float, default=None, help="Konsumsi awal (default dari policy V)")
    p.add_argument("--perturb", type=float, default=DEFAULT_PERTURB,
                   help="Perturbasi relatif c0 untuk shot pembanding (default 1e-3)")
    p.add_argument("--no-refine", action="store_true", help="Jangan bisection c0 ke saddle path")
    p.add_argument("--value-dir", type=FilePath, default=None, help="Direktori run solve berisi value.csv")

    p = common(sub.add_parser("diagnose", help="Diagnostik Euler, transversality dan HJB sepanjang lintasan"))
    p.add_argument("--path-csv", type=FilePath, default=None, help="path.csv (kolom t, k, c)")
    p.add_argument("--value-dir", type=FilePath, default=None, help="Direktori run solve berisi value.csv")

    p = common(sub.add_parser("demo", help="Demo contoh tandingan / magic of capital"), needs_config=False)
    p.add_argument("demo", choices=DEMOS, help="Nama demo")
    p.add_argument("--rho", type=float, default=1.0, help="ρ untuk uji ketidaktunggalan (default 1)")
    p.add_argument("--k-bar", type=float, default=1.0, help="Kapital awal k̄ (default 1)")
    return parser


def _configure_logging(verbose):
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format=LOG_FORMAT,
                        stream=sys.stderr, force=True)


def _args_hash(args):
    canonical = json.dumps({k: str(v) for k, v in vars(args).items() if k not in ("out", "verbose")},
                           sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def run(argv=None):
    """Jalankan satu subcommand; mengembalikan exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    _configure_logging(args.verbose)
    out_dir = args.out if args.out is not None else DEFAULT_OUT_ROOT / args.subcommand

    writer = None
    try:
        if args.subcommand == "demo":
            writer = RunWriter(out_dir, "demo", _args_hash(args))
            code = cmd_demo(args, writer)
        else:
            config = load_config(args.config)
            writer = RunWriter(out_dir, args.subcommand, config.config_hash)
            code = COMMANDS[args.subcommand](args, config, writer)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HJBGrowthError as exc:
        logger.error("%s gagal: %s", args.subcommand, exc)
        print(f"✗ {type(exc).__name__}: {exc}", file=sys.stderr)
        code = EXIT_FAILURE
        if writer is None:
            return code
    writer.finish()
    return code


def main():
    sys.exit(run())
