"""
Modul diagnostics: residual Euler, transversality dan HJB sepanjang lintasan,
estimasi subgradien, serta reproduksi contoh tandingan linear dan contoh
"magic of capital".
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import FormMismatch, ModelDomainError, PreconditionError
from .hjb_solver import AnalyticValue, hjb_residual_profile
from .model import make_linear_counterexample, make_magic_of_capital
from .ode import Path, payoff

logger = logging.getLogger(__name__)

# Configuration defaults
EULER_TOL = 1e-3
TRANSVERSALITY_TOL_FACTOR = 1e-2
HJB_PATH_TOL_FACTOR = 1e-3
FACT1_A_VALUES = (1.0, 2.0, 5.0)
FACT2_FRACTIONS = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class SubgradientInterval:
    d_plus: float
    d_minus: float
    h_used: float

    @property
    def width(self):
        return self.d_minus - self.d_plus


def subgradient_interval(g: Callable[[float], float], x, h):
    """
    Estimasi [D₊g(x), D₋g(x)] untuk g konkaf satu dimensi.

    Beda satu sisi dihitung pada h, h/2, h/4 lalu diekstrapolasi Richardson
    dua tingkat. Pada kink eksak beda satu sisi tidak bergantung h sehingga
    ekstrapolasi tidak mengubahnya.

    Raises:
        PreconditionError: x - h <= 0
        ModelDomainError: g bernilai -∞ (atau non-finite) pada stensil
    """
    if not h > 0 or not x - h > 0:
        raise PreconditionError(f"subgradient_interval butuh h > 0 dan x - h > 0 (x={x}, h={h})")
    g0 = float(g(x))

    def sample(step):
        right, left = float(g(x + step)), float(g(x - step))
        if not (np.isfinite(g0) and np.isfinite(right) and np.isfinite(left)):
            raise ModelDomainError(f"g tidak finite pada stensil x={x}, h={step}")
        return (right - g0) / step, (g0 - left) / step

    plus, minus = zip(*(sample(h / 2 ** j) for j in range(3)))

    def richardson(d):
        first = (2.0 * d[1] - d[0], 2.0 * d[2] - d[1])
        return (4.0 * first[1] - first[0]) / 3.0

    return SubgradientInterval(d_plus=richardson(plus), d_minus=richardson(minus), h_used=float(h))


def _require_rck(model):
    if model.rck is None:
        raise FormMismatch(f"model {model.label} tidak berbentuk RCK (F = f(k) - dk - c, u = u(c))")
    return model.rck


def euler_residual(model, path):
    """
    d/dt u'(c(t)) - (ρ + d - f'(k(t)))·u'(c(t)) di sampel interior.

    Turunan waktu memakai beda pusat orde dua pada grid t tak seragam.

    Raises:
        FormMismatch: model tidak berbentuk RCK
        PreconditionError: kurang dari 3 sampel atau ada c <= 0
    """
    rck = _require_rck(model)
    if len(path) < 3:
        raise PreconditionError("euler_residual butuh minimal 3 sampel")
    if np.any(path.consumption <= 0):
        raise PreconditionError("euler_residual butuh c > 0 di semua sampel")
    marginal = np.asarray(rck.marginal_utility(path.consumption), dtype=float)
    d_marginal = np.gradient(marginal, path.times, edge_order=2)
    drift = (model.rho + rck.depreciation - np.asarray(rck.production_prime(path.capital))) * marginal
    return (d_marginal - drift)[1:-1]


@dataclass(frozen=True)
class CheckVerdict:
    """Hasil satu pemeriksaan beserta toleransi yang dipakai."""

    name: str
    passed: bool
    tol: float
    value: float = math.nan

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "tol": self.tol, "value": self.value}


def transversality_check(model, path, samples=None, tol=None):
    """
    e^{-ρT}·u'(c(T))·f(k(T)) pada titik T; lulus bila menurun dan nilai
    akhir < tol (default 1e-2·max(1, |nilai pertama|)).
    """
    rck = _require_rck(model)
    if samples is None:
        samples = path.t_final * np.array([0.25, 0.5, 0.75, 1.0])
    samples = np.asarray(samples, dtype=float)
    if np.any(samples < path.times[0]) or np.any(samples > path.t_final):
        raise PreconditionError("titik T transversality harus di dalam support lintasan")
    k_T = np.interp(samples, path.times, path.capital)
    c_T = np.interp(samples, path.times, path.consumption)
    values = np.exp(-model.rho * samples) * np.asarray(rck.marginal_utility(c_T)) \
        * np.asarray(rck.production(k_T))
    if tol is None:
        tol = TRANSVERSALITY_TOL_FACTOR * max(1.0, abs(float(values[0])))
    decreasing = bool(np.all(np.diff(values) <= 0))
    passed = decreasing and abs(float(values[-1])) < tol
    verdict = CheckVerdict("transversality", passed, float(tol), float(values[-1]))
    return verdict, tuple(zip(samples.tolist(), values.tolist()))


@dataclass(frozen=True, eq=False)
class DiagnosticsReport:
    euler_residual: np.ndarray
    euler_sup: float
    transversality_samples: tuple
    hjb_along_path: np.ndarray
    hjb_sup: float
    verdicts: tuple
    skipped: tuple = ()

    @property
    def passed(self):
        return all(v.passed for v in self.verdicts)

    def to_dict(self):
        return {
            "passed": self.passed,
            "euler_residual": {"sup": self.euler_sup, "series": self.euler_residual.tolist()},
            "transversality_samples": [{"T": t, "value": v} for t, v in self.transversality_samples],
            "hjb_along_path": {"sup": self.hjb_sup, "series": self.hjb_along_path.tolist()},
            "verdicts": [v.to_dict() for v in self.verdicts],
            "skipped": list(self.skipped),
        }

    def print_summary(self):
        print("\n" + "=" * 70)
        print("DIAGNOSTIK LINTASAN")
        print("=" * 70)
        for v in self.verdicts:
            print(f"  {'✓' if v.passed else '✗'} {v.name}: {v.value:.3e} (tol {v.tol:.1e})")
        for name in self.skipped:
            print(f"  ⚠ {name}: dilewati")
        print("=" * 70)


class PathDiagnostics:
    """
    Diagnostik untuk satu lintasan.

    Pemakaian:
        report = PathDiagnostics(model, path, V).run_all()
    """

    def __init__(self, model, path, V=None, *, euler_tol=EULER_TOL, transversality_tol=None,
                 hjb_tol=None, samples=None):
        self.model = model
        self.path = path
        self.V = V
        self.euler_tol = euler_tol
        self.transversality_tol = transversality_tol
        self.hjb_tol = hjb_tol
        self.samples = samples

        self.euler = np.array([])
        self.transversality = ()
        self.hjb = np.array([])
        self.verdicts = []
        self.skipped = []

    def compute_euler(self):
        try:
            self.euler = euler_residual(self.model, self.path)
        except (FormMismatch, PreconditionError) as exc:
            logger.info("residual Euler dilewati: %s", exc)
            self.skipped.append("euler_residual")
            return self
        rck = self.model.rck
        marginal = np.asarray(rck.marginal_utility(self.path.consumption), dtype=float)
        scale = float(np.max(np.abs(marginal)))
        sup = float(np.max(np.abs(self.euler))) if self.euler.size else 0.0
        self.verdicts.append(CheckVerdict("euler_residual", sup <= self.euler_tol * scale,
                                          self.euler_tol * scale, sup))
        return self

    def compute_transversality(self):
        try:
            verdict, self.transversality = transversality_check(
                self.model, self.path, self.samples, self.transversality_tol)
        except FormMismatch as exc:
            logger.info("transversality dilewati: %s", exc)
            self.skipped.append("transversality")
            return self
        self.verdicts.append(verdict)
        return self

    def compute_hjb_along_path(self):
        if self.V is None:
            self.skipped.append("hjb_along_path")
            return self
        self.hjb = hjb_residual_profile(self.model, self.V, self.path.capital)
        sup = float(np.max(np.abs(self.hjb)))
        rho_v = self.model.rho * np.abs(np.asarray(self.V.value(self.path.capital), dtype=float))
        tol = self.hjb_tol if self.hjb_tol is not None else \
            HJB_PATH_TOL_FACTOR * max(1.0, float(np.max(rho_v)))
        self.verdicts.append(CheckVerdict("hjb_along_path", sup <= tol, float(tol), sup))
        return self

    def get_report(self):
        return DiagnosticsReport(
            euler_residual=self.euler,
            euler_sup=float(np.max(np.abs(self.euler))) if self.euler.size else math.nan,
            transversality_samples=tuple(self.transversality),
            hjb_along_path=self.hjb,
            hjb_sup=float(np.max(np.abs(self.hjb))) if self.hjb.size else math.nan,
            verdicts=tuple(self.verdicts),
            skipped=tuple(self.skipped),
        )

    def run_all(self):
        (self.compute_euler()
             .compute_transversality()
             .compute_hjb_along_path())
        return self.get_report()


# ═══════════════════════════════════════════════════════════════════════════
# CONTOH TANDINGAN LINEAR
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class CounterexampleReport:
    k_bar: float
    rho_fact1: float
    rho_fact2: float
    fact1: tuple          # (a, max |residual|, semua node nol?)
    fact1_sublinear: tuple    # (a < 1, residual): sup tak terbatas
    fact2: tuple          # (s, payoff)
    fact2_bound_ok: bool
    forced_pair: tuple    # (k terkecil, V'(k) = 2vk)
    contradiction: bool

    @property
    def fact1_ok(self):
        return all(ok for _, _, ok in self.fact1)

    @property
    def passed(self):
        return self.fact1_ok and self.fact2_bound_ok and self.contradiction

    def to_dict(self):
        return {
            "k_bar": self.k_bar,
            "passed": self.passed,
            "fact1": {
                "rho": self.rho_fact1,
                "candidates": [{"a": a, "max_abs_residual": r, "zero_residual": ok}
                               for a, r, ok in self.fact1],
                "sublinear": {"a": self.fact1_sublinear[0], "residual": self.fact1_sublinear[1]},
            },
            "fact2": {
                "rho": self.rho_fact2,
                "paths": [{"fraction": s, "payoff": v} for s, v in self.fact2],
                "bound": [0.0, self.k_bar],
                "bound_ok": self.fact2_bound_ok,
            },
            "forced_solution": {
                "k": self.forced_pair[0], "dV": self.forced_pair[1],
                "contradiction": self.contradiction,
            },
        }

    def print_summary(self):
        print("\n" + "=" * 70)
        print(f"CONTOH TANDINGAN LINEAR (k̄ = {self.k_bar:g})")
        print("=" * 70)
        print(f"Solusi HJB V = a·k untuk ρ = {self.rho_fact1:g}:")
        for a, r, ok in self.fact1:
            print(f"  {'✓' if ok else '✗'} a = {a:g}: max |residual| = {r:.2e}")
        print(f"  a = {self.fact1_sublinear[0]:g}: residual = {self.fact1_sublinear[1]} (sup tak terbatas)")
        print(f"\nPayoff lintasan konsumsi konstan untuk ρ = {self.rho_fact2:g}:")
        for s, v in self.fact2:
            print(f"  c = {s:.2f}·k̄ → payoff {v:.10f}")
        print(f"  {'✓' if self.fact2_bound_ok else '✗'} semua payoff di [0, k̄]")
        k, dv = self.forced_pair
        print(f"\nSolusi paksa V = v·k²: V'({k:g}) = {dv:g}")
        print(f"  {'✓' if self.contradiction else '✗'} V' < 1 (kontradiksi dengan V' >= 1)")
        print("=" * 70)


class CounterexampleSuite:
    """
    Reproduksi numerik contoh tandingan u(c) = c, F(k,c) = k - c.

    - V = a·k menyelesaikan HJB untuk setiap a >= 1 saat ρ = 1 (tidak tunggal)
    - payoff lintasan konsumsi konstan saat ρ = 2 berada di [0, k̄]
    - solusi paksa V = v·k² punya V' < 1 untuk k kecil
    """

    def __init__(self, k_bar, rho_fact1=1.0, rho_fact2=2.0, *, a_values=FACT1_A_VALUES,
                 fractions=FACT2_FRACTIONS, v=1.0):
        if not k_bar > 0:
            raise PreconditionError(f"k_bar harus positif, diterima {k_bar}")
        self.k_bar = float(k_bar)
        self.rho_fact1 = rho_fact1
        self.rho_fact2 = rho_fact2
        self.a_values = tuple(a_values)
        self.fractions = tuple(fractions)
        self.v = v
        self.nodes = np.geomspace(0.01 * self.k_bar, 10.0 * self.k_bar, 50)

        self.fact1 = ()
        self.fact1_sublinear = ()
        self.fact2 = ()
        self.forced_pair = ()

    def run_fact1(self):
        model = make_linear_counterexample(self.rho_fact1, k_domain=(self.nodes[0], self.nodes[-1]))
        rows = []
        for a in self.a_values:
            V = AnalyticValue(lambda k, a=a: a * k, lambda k, a=a: a + 0.0 * k, label=f"{a:g}k")
            res = hjb_residual_profile(model, V, self.nodes)
            ok = bool(np.all(np.abs(res) <= 1e-12 * a * self.nodes))
            rows.append((a, float(np.max(np.abs(res))), ok))
        self.fact1 = tuple(rows)
        sublinear = AnalyticValue(lambda k: 0.5 * k, lambda k: 0.5 + 0.0 * k, label="0.5k")
        self.fact1_sublinear = (0.5, float(hjb_residual_profile(model, sublinear, self.nodes[:1])[0]))
        return self

    def run_fact2(self):
        model = make_linear_counterexample(self.rho_fact2, k_domain=(self.nodes[0], self.nodes[-1]))
        times = np.linspace(0.0, 30.0, 3001)
        rows = []
        for s in self.fractions:
            c = s * self.k_bar
            # k̇ = k - c diselesaikan tertutup
            capital = c + (self.k_bar - c) * np.exp(times)
            path = Path(times, capital, np.full_like(times, c), {"kind": "constant_fraction"})
            rows.append((s, float(payoff(model, path).total)))
        self.fact2 = tuple(rows)
        return self

    def run_forced_solution(self):
        k_min = float(self.nodes[0])
        self.forced_pair = (k_min, 2.0 * self.v * k_min)
        return self

    def get_report(self):
        payoffs = [v for _, v in self.fact2]
        bound_ok = all(0.0 <= v <= self.k_bar + 1e-9 for v in payoffs) and any(v > 0 for v in payoffs)
        return CounterexampleReport(
            k_bar=self.k_bar, rho_fact1=self.rho_fact1, rho_fact2=self.rho_fact2,
            fact1=self.fact1, fact1_sublinear=self.fact1_sublinear, fact2=self.fact2,
            fact2_bound_ok=bound_ok, forced_pair=self.forced_pair,
            contradiction=self.forced_pair[1] < 1.0,
        )

    def run_all(self):
        (self.run_fact1()
             .run_fact2()
             .run_forced_solution())
        report = self.get_report()
        logger.info("suite contoh tandingan k̄=%g: passed=%s", self.k_bar, report.passed)
        return report


def counterexample_suite(k_bar, rho_fact1=1.0, rho_fact2=2.0):
    return CounterexampleSuite(k_bar, rho_fact1, rho_fact2).run_all()


# ═══════════════════════════════════════════════════════════════════════════
# MAGIC OF CAPITAL
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class MagicReport:
    payoff: float
    lower_bound: float
    reference: float
    admissibility: tuple = field(default=())   # (t, k̇ - F(k,c))

    @property
    def margin(self):
        return self.payoff - self.lower_bound

    @property
    def passed(self):
        admissible = all(abs(r) <= 1e-12 * max(1.0, t) for t, r in self.admissibility)
        return admissible and self.margin > 1.0 and abs(self.payoff - self.reference) <= 1e-3

    def to_dict(self):
        return {
            "payoff": self.payoff,
            "lower_bound": self.lower_bound,
            "reference": self.reference,
            "margin": self.margin,
            "admissibility_residual": [{"t": t, "residual": r} for t, r in self.admissibility],
            "passed": self.passed,
        }

    def print_summary(self):
        print("\n" + "=" * 70)
        print("MAGIC OF CAPITAL: k(t) = t²/16, c(t) = t/8, k(0) = 0")
        print("=" * 70)
        for t, r in self.admissibility:
            print(f"  t = {t:g}: k̇ - F(k,c) = {r:.1e}")
        print(f"  payoff           : {self.payoff:.6f}")
        print(f"  referensi -√(8π) : {self.reference:.6f}")
        print(f"  batas bawah      : {self.lower_bound:.6f}")
        print(f"  {'✓' if self.passed else '✗'} payoff >= batas bawah (margin {self.margin:.3f})")
        print("=" * 70)


def magic_of_capital_demo(n=4000, t_max=60.0):
    """
    Lintasan layak dari k(0) = 0 dengan utility positif-tak-terbatas di
    c = 0: payoff-nya finite dan melampaui batas bawah -√32 - √8·e⁻¹.
    """
    model = make_magic_of_capital()
    times = np.concatenate([[0.0], np.geomspace(1e-10, t_max, n)])
    path = Path(times, times ** 2 / 16.0, times / 8.0, {"kind": "magic_of_capital"})

    checks = []
    for t in (0.1, 1.0, 10.0):
        k, c = t ** 2 / 16.0, t / 8.0
        checks.append((t, float(t / 8.0 - model.F(k, c))))

    estimate = payoff(model, path, quadrature="clamped_singular")
    return MagicReport(
        payoff=float(estimate.total),
        lower_bound=-math.sqrt(32.0) - math.sqrt(8.0) / math.e,
        reference=-math.sqrt(8.0) * float(gamma_fn(0.5)),
        admissibility=tuple(checks),
    )
