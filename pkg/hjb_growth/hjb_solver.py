"""
Modul hjb_solver: solver persamaan HJB

    ρV(k) = sup_{c≥0} { F(k,c)·V'(k) + u(c,k) }

dengan skema upwind implisit (atau eksplisit), residual HJB kandidat,
sertifikat kelas 𝒱 (naik, konkaf, growth condition), dan batas atas
analitik dari parameter Asumsi 6.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.sparse import diags, identity
from scipy.sparse.linalg import spsolve

from .errors import (
    DegenerateGrid,
    ModelDomainError,
    NonConvergence,
    PreconditionError,
    UnboundedHamiltonian,
)
from .model import check_assumptions, crra_array, default_c_cap, stationary_consumption
from .ode import CAPPED, IntegratorConfig, pure_accumulation_path
from .policy import DEFAULT_TOL, STATUS_UNBOUNDED, solve_policy_batch

logger = logging.getLogger(__name__)

# Configuration defaults
MIN_NODES = 32
DEFAULT_STEP = 1000.0
DEFAULT_UPPER_PAD = 100.0
UNBOUNDED_SWEEP_LIMIT = 5
STATIONARY_FALLBACK = 1e-3
TOL_CONCAVITY = 1e-8
GROWTH_TOL_FACTOR = 1e-4
GROWTH_STALL = 1e-3
HORIZON_FACTOR = 30.0
P_FLOOR = 1e-300

SCHEMES = ("upwind_implicit", "upwind_explicit")
INITIALIZATIONS = ("stationary", "assumption6", "grid")

SATISFIED = "satisfied"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"


# ═══════════════════════════════════════════════════════════════════════════
# TIPE NILAI
# ═══════════════════════════════════════════════════════════════════════════

def _tail_elasticity(k_edge, k_next, d_edge, d_next):
    """Elastisitas -dlog V'/dlog k dari dua turunan terluar, dipotong ke >= 0."""
    if not (d_edge > 0 and d_next > 0):
        return 0.0
    eta = -math.log(d_edge / d_next) / math.log(k_edge / k_next)
    return float(min(max(eta, 0.0), 50.0))


@dataclass(frozen=True, eq=False)
class ValueGrid:
    """
    Fungsi nilai tertabulasi pada grid kapital.

    value(k) adalah PCHIP dari nilai node, deriv(k) adalah PCHIP dari
    turunan node. Di luar rentang node keduanya memakai ekor
    berelastisitas konstan yang di-fit dari dua turunan terluar.
    """

    nodes: np.ndarray
    values: np.ndarray
    derivs: Optional[np.ndarray] = None
    policy: Optional[np.ndarray] = None
    label: str = ""

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2 or nodes.size != values.size:
            raise DegenerateGrid("nodes dan values harus array 1-D sama panjang (minimal 2)")
        if not np.all(nodes > 0) or not np.all(np.diff(nodes) > 0):
            raise DegenerateGrid("nodes harus positif dan strictly increasing")
        derivs = np.gradient(values, nodes) if self.derivs is None else np.asarray(self.derivs, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "derivs", derivs)
        if self.policy is not None:
            object.__setattr__(self, "policy", np.asarray(self.policy, dtype=float))

    @classmethod
    def template(cls, k_lo, k_hi, n, spacing="log"):
        """Grid kosong (nilai nol) untuk diisi solver."""
        if n < 2:
            raise DegenerateGrid("template butuh minimal 2 node")
        if spacing == "log":
            nodes = np.geomspace(k_lo, k_hi, n)
        elif spacing == "linear":
            nodes = np.linspace(k_lo, k_hi, n)
        else:
            raise PreconditionError(f"spacing tidak dikenal: {spacing!r}")
        return cls(nodes, np.zeros(n), np.zeros(n), label="template")

    @classmethod
    def from_function(cls, nodes, fn, dfn=None, label="function"):
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(fn(nodes), dtype=float) * np.ones_like(nodes)
        derivs = None if dfn is None else np.asarray(dfn(nodes), dtype=float) * np.ones_like(nodes)
        return cls(nodes, values, derivs, label=label)

    @property
    def domain(self):
        return float(self.nodes[0]), float(self.nodes[-1])

    @property
    def size(self):
        return int(self.nodes.size)

    @cached_property
    def _value_interp(self):
        return PchipInterpolator(self.nodes, self.values, extrapolate=False)

    @cached_property
    def _deriv_interp(self):
        return PchipInterpolator(self.nodes, self.derivs, extrapolate=False)

    @cached_property
    def _tails(self):
        n, d = self.nodes, self.derivs
        return (
            _tail_elasticity(n[0], n[1], d[0], d[1]),
            _tail_elasticity(n[-1], n[-2], d[-1], d[-2]),
        )

    def _evaluate(self, k, derivative):
        scalar = np.ndim(k) == 0
        k = np.atleast_1d(np.asarray(k, dtype=float))
        interp = self._deriv_interp if derivative else self._value_interp
        out = np.asarray(interp(k), dtype=float)
        eta_lo, eta_hi = self._tails
        for mask, idx, eta in ((k < self.nodes[0], 0, eta_lo), (k > self.nodes[-1], -1, eta_hi)):
            if mask.any():
                k_edge, v_edge, d_edge = self.nodes[idx], self.values[idx], self.derivs[idx]
                x = k[mask] / k_edge
                with np.errstate(divide="ignore"):
                    if derivative:
                        out[mask] = d_edge * np.power(x, -eta)
                    else:
                        out[mask] = v_edge + d_edge * k_edge * crra_array(eta, x)
        return float(out[0]) if scalar else out

    def value(self, k):
        return self._evaluate(k, derivative=False)

    def deriv(self, k):
        return self._evaluate(k, derivative=True)

    def slopes(self):
        return np.diff(self.values) / np.diff(self.nodes)


@dataclass(frozen=True)
class AnalyticValue:
    """Kandidat fungsi nilai dengan oracle nilai dan turunan tertutup."""

    value_fn: Callable
    deriv_fn: Callable
    label: str = "analytic"
    domain: Optional[tuple] = None

    def value(self, k):
        out = np.asarray(self.value_fn(np.asarray(k, dtype=float)), dtype=float)
        return float(out) if out.ndim == 0 else out

    def deriv(self, k):
        k = np.asarray(k, dtype=float)
        out = np.asarray(self.deriv_fn(k), dtype=float) * np.ones_like(k)
        return float(out) if out.ndim == 0 else out


def closed_form_value(model):
    """
    Fungsi nilai tertutup untuk log-AK dan AK-CRRA.

    log-AK : V(k) = ρ⁻¹ log k + ρ⁻¹[log ρ + γρ⁻¹ - 1]
    AK-CRRA: V(k) = m^{-θ}k^{1-θ}/(1-θ) - 1/(ρ(1-θ)),  m = (ρ - (1-θ)γ)/θ
    """
    family = model.family
    rho = model.rho
    if family == "log_ak":
        gamma = model.params["gamma"]
        const = (math.log(rho) + gamma / rho - 1.0) / rho
        return AnalyticValue(lambda k: np.log(k) / rho + const, lambda k: 1.0 / (rho * k),
                             label="log_ak_closed_form", domain=model.k_domain)
    if family == "ak_crra":
        gamma, theta = model.params["gamma"], model.params["theta"]
        m = (rho - (1.0 - theta) * gamma) / theta
        scale = m ** (-theta)
        return AnalyticValue(
            lambda k: scale * np.power(k, 1.0 - theta) / (1.0 - theta) - 1.0 / (rho * (1.0 - theta)),
            lambda k: scale * np.power(k, -theta),
            label="ak_crra_closed_form", domain=model.k_domain,
        )
    raise PreconditionError(f"tidak ada fungsi nilai tertutup untuk keluarga {family!r}")


# ═══════════════════════════════════════════════════════════════════════════
# RESIDUAL
# ═══════════════════════════════════════════════════════════════════════════

def hjb_residual_profile(model, V, nodes, *, c_cap=None, tol=DEFAULT_TOL):
    """sup_c H(c; V'(k)) - ρV(k) di setiap node; +∞ bila sup tak terbatas."""
    nodes = np.asarray(nodes, dtype=float)
    p = np.asarray(V.deriv(nodes), dtype=float) * np.ones_like(nodes)
    values = np.asarray(V.value(nodes), dtype=float) * np.ones_like(nodes)
    positive = p > 0
    out = np.full(nodes.shape, np.inf)
    if positive.any():
        batch = solve_policy_batch(model, nodes[positive], p[positive], tol=tol, c_cap=c_cap)
        out[positive] = np.where(
            batch.status == STATUS_UNBOUNDED, np.inf,
            batch.h_value - model.rho * values[positive],
        )
    return out


def hjb_residual(model, V, k):
    """
    Residual HJB kandidat V di k.

    Mengembalikan +∞ bila sup Hamiltonian tak terbatas (mis. V'(k) < 1
    pada contoh linear), bukan melempar error.
    """
    return float(hjb_residual_profile(model, V, np.array([k]))[0])


# ═══════════════════════════════════════════════════════════════════════════
# SERTIFIKAT
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class GrowthCheck:
    status: str
    horizon: float
    growth_tol: float
    samples: tuple = ()

    def to_dict(self):
        return {
            "status": self.status,
            "horizon": self.horizon,
            "growth_tol": self.growth_tol,
            "samples": [
                {"k_bar": k_bar, "T": [t for t, _ in series], "magnitude": [m for _, m in series],
                 "status": status}
                for k_bar, series, status in self.samples
            ],
        }


@dataclass(frozen=True, eq=False)
class CertificateReport:
    in_class_V: bool
    increasing: bool
    concave: bool
    growth_condition: GrowthCheck
    max_abs_residual: float
    residual_profile: np.ndarray = field(default_factory=lambda: np.array([]))
    residual_nodes: np.ndarray = field(default_factory=lambda: np.array([]))
    tol_concavity: float = TOL_CONCAVITY

    def to_dict(self):
        return {
            "in_class_V": self.in_class_V,
            "increasing": self.increasing,
            "concave": self.concave,
            "tol_concavity": self.tol_concavity,
            "growth_condition": self.growth_condition.to_dict(),
            "max_abs_residual": self.max_abs_residual,
            "residual_profile": {
                "k": self.residual_nodes.tolist(),
                "residual": self.residual_profile.tolist(),
            },
        }

    def print_summary(self):
        mark = {True: "✓", False: "✗"}
        print("\n" + "=" * 70)
        print("SERTIFIKAT KELAS 𝒱")
        print("=" * 70)
        print(f"  {mark[self.increasing]} V strictly increasing")
        print(f"  {mark[self.concave]} V konkaf (tol {self.tol_concavity:g})")
        gc_mark = {SATISFIED: "✓", VIOLATED: "✗", INCONCLUSIVE: "⚠"}[self.growth_condition.status]
        print(f"  {gc_mark} growth condition: {self.growth_condition.status} "
              f"(horizon {self.growth_condition.horizon:g})")
        print(f"  max |residual HJB| = {self.max_abs_residual:.3e}")
        print(f"  {'✓' if self.in_class_V else '✗'} in_class_V = {self.in_class_V}")
        print("=" * 70)


def _classify_growth(magnitudes, growth_tol):
    m_q, m_h, m_f = magnitudes
    if not np.all(np.isfinite(magnitudes)):
        return INCONCLUSIVE
    decreasing = m_f < m_h < m_q or m_f == m_h == m_q == 0
    if decreasing and m_f < growth_tol:
        return SATISFIED
    if m_f >= (1.0 - GROWTH_STALL) * m_h and m_f >= growth_tol:
        return VIOLATED
    return INCONCLUSIVE


def growth_condition(model, V, horizon=None, *, growth_tol=None, cfg=None):
    """
    Cek e^{-ρT}·V(k⁺(T, k̄)) → 0 pada T ∈ {H/4, H/2, H} untuk
    k̄ ∈ {k_lo, tengah geometris, k_hi}.
    """
    horizon = float(horizon if horizon is not None else HORIZON_FACTOR / model.rho)
    if not horizon > 0:
        raise PreconditionError("horizon harus positif")
    k_lo, k_hi = V.domain if getattr(V, "domain", None) else model.k_domain
    mid = math.sqrt(k_lo * k_hi)
    if growth_tol is None:
        growth_tol = GROWTH_TOL_FACTOR * max(1.0, abs(float(V.value(mid))))
    base = cfg or IntegratorConfig()
    integrator = IntegratorConfig(method="rk45_adaptive", rtol=base.rtol, atol=base.atol,
                                  t_end=horizon, samples=5, k_floor=base.k_floor)
    checkpoints = (horizon / 4.0, horizon / 2.0, horizon)

    samples = []
    for k_bar in (k_lo, mid, k_hi):
        path = pure_accumulation_path(model, k_bar, integrator)
        series = []
        for T in checkpoints:
            idx = np.flatnonzero(np.isclose(path.times, T, rtol=1e-12, atol=1e-12))
            if idx.size == 0 or path.termination == CAPPED and path.times[-1] < T:
                series.append((T, math.inf))
                continue
            k_T = float(path.capital[idx[0]])
            series.append((T, abs(math.exp(-model.rho * T) * float(V.value(k_T)))))
        status = _classify_growth(np.array([m for _, m in series]), growth_tol)
        samples.append((float(k_bar), tuple(series), status))

    statuses = [s for _, _, s in samples]
    if VIOLATED in statuses:
        status = VIOLATED
    elif all(s == SATISFIED for s in statuses):
        status = SATISFIED
    else:
        status = INCONCLUSIVE
    logger.info("growth condition (H=%g): %s", horizon, status)
    return GrowthCheck(status=status, horizon=horizon, growth_tol=float(growth_tol), samples=tuple(samples))


def check_class_V(model, V, horizon=None, *, growth_tol=None, tol_concavity=TOL_CONCAVITY,
                  cfg=None, c_cap=None):
    """
    Sertifikat keanggotaan kelas 𝒱: naik strict, konkaf diskret, dan
    growth condition terpenuhi. Residual HJB node interior ikut dilaporkan.
    """
    slopes = V.slopes()
    increasing = bool(np.all(np.diff(V.values) > 0))
    scale = max(float(np.max(np.abs(slopes))), np.finfo(float).tiny)
    concave = bool(np.all(np.diff(slopes) <= tol_concavity * scale))
    growth = growth_condition(model, V, horizon, growth_tol=growth_tol, cfg=cfg)
    interior = V.nodes[1:-1]
    residual = hjb_residual_profile(model, V, interior, c_cap=c_cap)
    max_abs = float(np.max(np.abs(residual))) if residual.size else 0.0
    return CertificateReport(
        in_class_V=increasing and concave and growth.status == SATISFIED,
        increasing=increasing, concave=concave, growth_condition=growth,
        max_abs_residual=max_abs, residual_profile=residual, residual_nodes=interior,
        tol_concavity=tol_concavity,
    )


# ═══════════════════════════════════════════════════════════════════════════
# BATAS ATAS ASUMSI 6
# ═══════════════════════════════════════════════════════════════════════════

def assumption6_upper_bound(model, a6, k_bar):
    """
    Batas atas analitik a·V₃(k̄) + b·V₄(k̄) + C/ρ untuk V̄(k̄).

    k̂ = k̄ - k* + (δc* + F(k*,c*))/γ,  C* = (ρ - (1-θ)γ)/(θδ)·k̂
    V₄ hanya dievaluasi bila b > 0.

    Raises:
        PreconditionError: parameter melanggar TL
        ModelDomainError: C* <= 0 atau k̂ <= 0
    """
    a6.validate(model.rho)
    scalar = np.ndim(k_bar) == 0
    k_bar = np.atleast_1d(np.asarray(k_bar, dtype=float))
    if np.any(k_bar <= 0):
        raise ModelDomainError("k_bar harus positif")
    rho, theta, gamma = model.rho, a6.theta, a6.gamma
    margin = a6.growth_margin(rho)
    f_star = float(model.F(a6.k_star, a6.c_star))
    k_hat = k_bar - a6.k_star + (a6.delta * a6.c_star + f_star) / gamma
    c_star = margin / (theta * a6.delta) * k_hat
    if np.any(c_star <= 0):
        raise ModelDomainError(f"C* harus positif, diperoleh min {float(np.min(c_star)):.6g}")

    log_branch = abs(theta - 1.0) < 1e-12
    if log_branch:
        v3 = np.log(c_star) / rho + (gamma - rho) / rho ** 2
    else:
        v3 = np.power(c_star, 1.0 - theta) * theta / ((1.0 - theta) * margin) - 1.0 / (rho * (1.0 - theta))
    bound = a6.a * v3 + a6.cc / rho
    if a6.b > 0:
        if np.any(k_hat <= 0):
            raise ModelDomainError("argumen V₄ harus positif")
        if log_branch:
            v4 = np.log(k_hat) / rho + gamma / rho ** 2
        else:
            v4 = np.power(k_hat, 1.0 - theta) / ((1.0 - theta) * margin) - 1.0 / (rho * (1.0 - theta))
        bound = bound + a6.b * v4
    return float(bound[0]) if scalar else bound


# ═══════════════════════════════════════════════════════════════════════════
# SOLVER
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class SolveConfig:
    max_iters: int = 500
    residual_tol: float = 1e-7
    relaxation: float = 1.0
    scheme: str = "upwind_implicit"
    step: float = DEFAULT_STEP
    upper_pad: float = DEFAULT_UPPER_PAD

    def __post_init__(self):
        if self.max_iters < 1:
            raise PreconditionError("max_iters minimal 1")
        if not self.residual_tol > 0:
            raise PreconditionError("residual_tol harus positif")
        if not 0 < self.relaxation <= 1:
            raise PreconditionError("relaxation harus di (0, 1]")
        if self.scheme not in SCHEMES:
            raise PreconditionError(f"scheme harus salah satu dari {SCHEMES}")
        if not self.step > 0:
            raise PreconditionError("step harus positif")
        if not self.upper_pad >= 1:
            raise PreconditionError("upper_pad minimal 1")


class HJBSolver:
    """
    Solver HJB dengan skema upwind.

    Grid komputasi diperpanjang secara geometris di atas k_hi selama F(k,0)
    positif dan naik; di node teratas tidak pernah dipakai beda maju, di k_lo
    tidak pernah dipakai beda mundur. ValueGrid hasil hanya memuat node
    pengguna.

    Pemakaian:
        solver = HJBSolver(model, ValueGrid.template(0.1, 10, 400))
        value, certificate = solver.run_all()
    """

    def __init__(self, model, grid, cfg=None, *, initial="stationary", a6=None, horizon=None):
        if initial not in INITIALIZATIONS:
            raise PreconditionError(f"initial harus salah satu dari {INITIALIZATIONS}")
        self.model = model
        self.grid = grid
        self.cfg = cfg or SolveConfig()
        self.initial = initial
        self.a6 = a6
        self.horizon = horizon

        self.k = None
        self.n_user = None
        self.c_cap = None
        self.c0 = None
        self.p0 = None
        self.V = None
        self.iterations = 0
        self.max_residual = math.inf
        self.history = []
        self._policy = None
        self._drift_deriv = None
        self._residual = None
        self.value_grid = None
        self.certificate = None

    def build_grid(self):
        """Validasi node pengguna dan perpanjang grid di atas k_hi."""
        nodes = np.asarray(self.grid.nodes, dtype=float)
        if nodes.size < MIN_NODES:
            raise DegenerateGrid(f"grid butuh minimal {MIN_NODES} node, diterima {nodes.size}")
        if not np.all(nodes > 0) or not np.all(np.diff(nodes) > 0):
            raise DegenerateGrid("node grid harus positif dan strictly increasing")
        F = self.model.F
        if not float(F(nodes[0], 0.0)) > 0:
            raise DegenerateGrid(f"F(k_lo, 0) <= 0 di k_lo={nodes[0]:g}: tidak ada arah drift yang layak")

        ratio = nodes[-1] / nodes[-2]
        limit = nodes[-1] * self.cfg.upper_pad
        extra = []
        k_prev, f_prev = nodes[-1], float(F(nodes[-1], 0.0))
        while k_prev * ratio <= limit * (1.0 + 1e-12):
            k_next = k_prev * ratio
            f_next = float(F(k_next, 0.0))
            if not (f_prev > 0 and f_next > f_prev):
                break
            extra.append(k_next)
            k_prev, f_prev = k_next, f_next

        self.k = np.concatenate([nodes, extra])
        self.n_user = nodes.size
        self.c_cap = max(self.model.c_cap, default_c_cap(self.model.technology, self.k[-1]))
        self.c0 = np.asarray(stationary_consumption(self.model, self.k), dtype=float)
        has_c0 = np.isfinite(self.c0)
        self.p0 = np.full(self.k.shape, np.nan)
        if has_c0.any():
            kk, cc = self.k[has_c0], self.c0[has_c0]
            self.p0[has_c0] = self.model.utility.partial_x(cc, kk) / -self.model.technology.partial_y(kk, cc)
        logger.info("grid komputasi: %d node pengguna + %d node perpanjangan sampai k=%g, c_cap=%g",
                    self.n_user, len(extra), self.k[-1], self.c_cap)
        return self

    def check_preconditions(self):
        """Asumsi 1-5 pada sampel; pelanggaran Asumsi 4 dilaporkan sebagai UnboundedHamiltonian."""
        report = check_assumptions(self.model)
        failing = report.failing()
        if 4 in failing:
            raise UnboundedHamiltonian(
                "Asumsi 4 dilanggar (∂u/∂c tidak menurun/divergen): sup Hamiltonian bisa tak "
                f"terbatas, solusi HJB tidak tunggal; witness {report.verdict(4).witness}",
                max_residual=math.inf, iterations=0,
            )
        others = [i for i in failing if i in (1, 2, 3, 5)]
        if others:
            raise PreconditionError(f"asumsi {others} gagal pada sampel; solve_hjb dibatalkan")
        return self

    def initialize(self):
        """V₀ dari konsumsi stasioner, batas atas Asumsi 6, atau nilai grid yang diberikan."""
        k = self.k
        if self.initial == "stationary":
            c = np.where(np.isfinite(self.c0), self.c0, STATIONARY_FALLBACK * self.c_cap)
            V0 = np.maximum.accumulate(self.model.u(c, k) / self.model.rho)
        elif self.initial == "assumption6":
            if self.a6 is None:
                raise PreconditionError("inisialisasi assumption6 butuh parameter Asumsi 6")
            V0 = assumption6_upper_bound(self.model, self.a6, k)
        else:
            V0 = np.asarray(self.grid.value(k), dtype=float)
        if not np.all(np.isfinite(V0)):
            raise PreconditionError("nilai awal V₀ tidak finite")
        self.V = np.asarray(V0, dtype=float)
        return self

    def _upwind(self, V):
        """Policy upwind, matriks generator A dan residual u + AV - ρV untuk V saat ini."""
        model, k = self.model, self.k
        n = k.size
        h = np.diff(k)
        slope = np.diff(V) / h
        p_f = np.empty(n)
        p_b = np.empty(n)
        p_f[:-1], p_f[-1] = slope, slope[-1]
        p_b[1:], p_b[0] = slope, slope[0]

        batch = solve_policy_batch(
            model, np.concatenate([k, k]), np.maximum(np.concatenate([p_f, p_b]), P_FLOOR),
            c_cap=self.c_cap,
        )
        c_f, c_b = batch.c_star[:n], batch.c_star[n:]
        unb_f, unb_b = batch.unbounded[:n], batch.unbounded[n:]
        s_f, s_b = model.F(k, c_f), model.F(k, c_b)

        use_f = s_f > 0
        use_f[-1] = False
        use_b = (s_b < 0) & ~use_f
        use_b[0] = False
        use_0 = ~(use_f | use_b) & np.isfinite(self.c0)
        use_b |= ~(use_f | use_b | use_0)

        c = np.where(use_f, c_f, np.where(use_b, c_b, self.c0))
        p = np.where(use_f, p_f, np.where(use_b, p_b, self.p0))
        flagged = (use_f & unb_f) | (use_b & unb_b)

        upper = np.where(use_f, s_f, 0.0)[:-1] / h
        lower = np.where(use_b, -s_b, 0.0)[1:] / h
        diag = np.zeros(n)
        diag[:-1] -= upper
        diag[1:] -= lower
        A = diags([lower, diag, upper], [-1, 0, 1], format="csc")

        util = model.u(c, k)
        residual = util + A @ V - model.rho * V
        return c, p, util, A, residual, flagged

    def iterate(self):
        """
        Sweep sampai residual maksimum < residual_tol pada dua sweep berturut-turut.

        Raises:
            UnboundedHamiltonian: node tak terbatas bertahan > 5 sweep
            NonConvergence: max_iters habis atau V menjadi non-finite
        """
        if self.V is None:
            raise ValueError("Jalankan initialize() terlebih dahulu")
        cfg, rho = self.cfg, self.model.rho
        n = self.k.size
        eye = identity(n, format="csc")
        below, streak = 0, 0
        for it in range(1, cfg.max_iters + 1):
            c, p, util, A, residual, flagged = self._upwind(self.V)
            self.iterations = it
            self.max_residual = float(np.max(np.abs(residual)))
            self.history.append(self.max_residual)
            logger.debug("sweep %d: max residual %.3e, node tak terbatas %d",
                         it, self.max_residual, int(flagged.sum()))

            streak = streak + 1 if flagged.any() else 0
            if streak > UNBOUNDED_SWEEP_LIMIT:
                raise UnboundedHamiltonian(
                    f"sup Hamiltonian tak terbatas di {int(flagged.sum())} node selama {streak} sweep "
                    "(gejala pelanggaran Asumsi 4)",
                    max_residual=math.inf, iterations=it,
                )
            if not np.isfinite(self.max_residual):
                raise NonConvergence("residual non-finite saat iterasi", max_residual=self.max_residual,
                                     iterations=it)

            below = below + 1 if self.max_residual < cfg.residual_tol and not flagged.any() else 0
            if below >= 2:
                self._policy, self._drift_deriv, self._residual = c, p, residual
                logger.info("HJB konvergen setelah %d sweep (max residual %.3e)", it, self.max_residual)
                return self

            if cfg.scheme == "upwind_implicit":
                B = (1.0 / cfg.step + rho) * eye - A
                V_new = spsolve(B, util + self.V / cfg.step)
            else:
                dt = 0.9 / (rho + float(np.max(np.abs(A.diagonal()))))
                V_new = self.V + dt * residual
            self.V = (1.0 - cfg.relaxation) * self.V + cfg.relaxation * V_new
            if not np.all(np.isfinite(self.V)):
                raise NonConvergence("V menjadi non-finite", max_residual=self.max_residual, iterations=it)

        raise NonConvergence(
            f"HJB tidak konvergen setelah {cfg.max_iters} sweep (max residual {self.max_residual:.3e})",
            max_residual=self.max_residual, iterations=cfg.max_iters,
        )

    def get_value_grid(self):
        if self._policy is None:
            raise ValueError("Jalankan iterate() terlebih dahulu")
        if self.value_grid is None:
            m = self.n_user
            self.value_grid = ValueGrid(
                self.k[:m], self.V[:m], self._drift_deriv[:m], self._policy[:m],
                label=f"hjb:{self.model.label}",
            )
        return self.value_grid

    def get_certificate(self):
        if self.certificate is None:
            self.certificate = check_class_V(self.model, self.get_value_grid(), self.horizon,
                                             c_cap=self.c_cap)
        return self.certificate

    def get_summary(self):
        return {
            "model": self.model.label,
            "scheme": self.cfg.scheme,
            "iterations": self.iterations,
            "max_residual": self.max_residual,
            "user_nodes": self.n_user,
            "computational_nodes": int(self.k.size) if self.k is not None else 0,
            "c_cap": self.c_cap,
        }

    def run_all(self):
        """Pipeline lengkap: prasyarat → grid → inisialisasi → iterasi → sertifikat."""
        (self.check_preconditions()
             .build_grid()
             .initialize()
             .iterate())
        return self.get_value_grid(), self.get_certificate()


def solve_hjb(model, grid, cfg=None, *, initial="stationary", a6=None, horizon=None):
    """Selesaikan HJB pada grid; mengembalikan (ValueGrid, CertificateReport)."""
    return HJBSolver(model, grid, cfg, initial=initial, a6=a6, horizon=horizon).run_all()
