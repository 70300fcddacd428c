"""
Modul ode: lintasan kapital.

- pure_accumulation_path : k̇ = F(k, 0)
- optimal_path           : k̇ = F(k, c*(V'(k), k)), ODE satu dimensi yang stabil
- euler_shooting         : sistem Euler dua dimensi (k, c), semistabil
- payoff                 : ∫ e^{-ρt} u(c, k) dt dengan estimasi ekor terpisah
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp, trapezoid
from scipy.optimize import brentq

from .errors import (
    FormMismatch,
    PayoffUndefined,
    PreconditionError,
    RangeExit,
    SaddleBracketError,
    StepFailure,
)
from .policy import solve_policy_batch

logger = logging.getLogger(__name__)

# Configuration defaults
K_FLOOR_FACTOR = 1e-8
DIVERGENCE_FACTOR = 1e6
STEADY_STATE_BAND = 0.05
ACCUMULATION_CAP = 1e250
SHOOT_STEP = 0.05
SHOOT_T_END = 100.0

METHODS = ("rk4_fixed", "rk45_adaptive")
QUADRATURES = ("trapezoid", "clamped_singular")

COMPLETED = "completed"
K_COLLAPSED = "k_collapsed"
DIVERGED = "diverged"
CAPPED = "capped"
RANGE_EXIT = "range_exit"


@dataclass(frozen=True)
class IntegratorConfig:
    """Pengaturan integrator; k_floor None berarti 1e-8·k̄."""

    method: str = "rk45_adaptive"
    step: float = SHOOT_STEP
    rtol: float = 1e-9
    atol: float = 1e-12
    t_end: float = SHOOT_T_END
    k_floor: Optional[float] = None
    samples: int = 401

    def __post_init__(self):
        if self.method not in METHODS:
            raise PreconditionError(f"method harus salah satu dari {METHODS}, diterima {self.method!r}")
        if not self.t_end > 0:
            raise PreconditionError("t_end harus positif")
        if not self.step > 0 or not self.rtol > 0 or not self.atol > 0:
            raise PreconditionError("step, rtol dan atol harus positif")
        if self.k_floor is not None and not self.k_floor > 0:
            raise PreconditionError("k_floor harus positif")
        if self.samples < 2:
            raise PreconditionError("samples minimal 2")

    def floor_for(self, k_bar):
        return self.k_floor if self.k_floor is not None else K_FLOOR_FACTOR * k_bar


@dataclass(frozen=True, eq=False)
class Path:
    times: np.ndarray
    capital: np.ndarray
    consumption: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("times", "capital", "consumption"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (self.times.size == self.capital.size == self.consumption.size):
            raise PreconditionError("times, capital dan consumption harus sama panjang")
        if self.times.size and self.times[0] != 0:
            raise PreconditionError("times[0] harus 0")

    def __len__(self):
        return int(self.times.size)

    @property
    def termination(self):
        return self.meta.get("termination", COMPLETED)

    @property
    def t_final(self):
        return float(self.times[-1])

    def summary(self):
        return {
            "termination": self.termination,
            "t_final": self.t_final,
            "k_final": float(self.capital[-1]),
            "c_final": float(self.consumption[-1]),
            "k_min": float(np.min(self.capital)),
            "samples": len(self),
            **{k: v for k, v in self.meta.items() if k != "termination"},
        }


@dataclass(frozen=True)
class _Guard:
    """Kondisi berhenti: terpicu saat fn(t, y) melewati nol searah ``direction``."""

    reason: str
    fn: Callable
    direction: int = -1


# ═══════════════════════════════════════════════════════════════════════════
# INTEGRATOR
# ═══════════════════════════════════════════════════════════════════════════

def _rk4_step(rhs, t, y, h):
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _crossed(guard, before, after):
    if guard.direction < 0:
        return before > 0 and not after > 0
    return before < 0 and not after < 0


def _integrate(rhs, y0, cfg, guards=()):
    """
    Integrasi y' = rhs(t, y) pada [0, cfg.t_end].

    Returns:
        (times, states, reason, stats)
    """
    y0 = np.asarray(y0, dtype=float)
    if cfg.method == "rk45_adaptive":
        events = []
        for g in guards:
            def event(t, y, _fn=g.fn):
                return _fn(t, y)
            event.terminal = True
            event.direction = g.direction
            events.append(event)
        t_eval = np.linspace(0.0, cfg.t_end, cfg.samples)
        sol = solve_ivp(rhs, (0.0, cfg.t_end), y0, method="RK45", t_eval=t_eval,
                        rtol=cfg.rtol, atol=cfg.atol, events=events or None)
        if sol.status == -1:
            raise StepFailure(f"solve_ivp gagal: {sol.message}")
        times, states = sol.t, sol.y.T
        reason = COMPLETED
        if sol.status == 1:
            for g, t_ev, y_ev in zip(guards, sol.t_events, sol.y_events):
                if len(t_ev):
                    reason = g.reason
                    times = np.append(times, t_ev[0])
                    states = np.vstack([states, y_ev[0]])
                    break
        return times, states, reason, {"nfev": int(sol.nfev), "steps": int(times.size - 1)}

    n_steps = int(math.ceil(cfg.t_end / cfg.step - 1e-12))
    times, states = [0.0], [y0]
    t, y = 0.0, y0
    reason = COMPLETED
    levels = [g.fn(t, y) for g in guards]
    for _ in range(n_steps):
        h = min(cfg.step, cfg.t_end - t)
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            y_next = _rk4_step(rhs, t, y, h)
        t_next = t + h
        if not np.all(np.isfinite(y_next)):
            with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
                slope = rhs(t, y)
            if np.isfinite(slope[0]) and slope[0] < 0:
                reason = K_COLLAPSED
                break
            raise StepFailure(f"state non-finite pada t={t_next:.6g}")
        t, y = t_next, y_next
        times.append(t)
        states.append(y)
        hit = None
        for i, g in enumerate(guards):
            level = g.fn(t, y)
            if hit is None and _crossed(g, levels[i], level):
                hit = g.reason
            levels[i] = level
        if hit is not None:
            reason = hit
            break
    return np.asarray(times), np.vstack(states), reason, {"steps": len(times) - 1}


# ═══════════════════════════════════════════════════════════════════════════
# LINTASAN
# ═══════════════════════════════════════════════════════════════════════════

def pure_accumulation_path(model, k_bar, cfg=None):
    """
    Lintasan akumulasi murni k⁺(t, k̄): konsumsi nol.

    Berhenti dengan alasan k_collapsed bila k < k_floor, atau capped bila
    k melewati 1e250.
    """
    if not k_bar > 0:
        raise PreconditionError(f"k_bar harus positif, diterima {k_bar}")
    cfg = cfg or IntegratorConfig()
    floor = cfg.floor_for(k_bar)

    def rhs(t, y):
        return np.array([float(model.F(y[0], 0.0))])

    guards = (
        _Guard(K_COLLAPSED, lambda t, y: y[0] - floor, -1),
        _Guard(CAPPED, lambda t, y: ACCUMULATION_CAP - y[0], -1),
    )
    times, states, reason, stats = _integrate(rhs, [k_bar], cfg, guards)
    if reason == K_COLLAPSED:
        logger.warning("lintasan akumulasi murni dari k̄=%g jatuh di bawah k_floor", k_bar)
    capital = states[:, 0]
    return Path(times, capital, np.zeros_like(capital),
                {"kind": "pure_accumulation", "method": cfg.method, "termination": reason, **stats})


def optimal_path(model, V, k_bar, cfg=None, *, c_cap=None):
    """
    Lintasan optimal dari ODE k̇ = F(k, c*(V'(k), k)).

    Raises:
        RangeExit: k keluar dari domain node V
        StepFailure: integrator gagal
    """
    k_lo, k_hi = getattr(V, "domain", None) or model.k_domain
    if not k_lo <= k_bar <= k_hi:
        raise RangeExit(f"k_bar={k_bar} di luar rentang node [{k_lo}, {k_hi}]", t=0.0, k=k_bar)
    cfg = cfg or IntegratorConfig()

    def policy(k):
        p = np.maximum(np.asarray(V.deriv(k), dtype=float), np.finfo(float).tiny)
        return solve_policy_batch(model, k, p, c_cap=c_cap).c_star

    def rhs(t, y):
        c = float(policy(y[0]))
        return np.array([float(model.F(y[0], c))])

    guards = (
        _Guard(RANGE_EXIT, lambda t, y: y[0] - k_lo, -1),
        _Guard(RANGE_EXIT, lambda t, y: k_hi - y[0], -1),
    )
    times, states, reason, stats = _integrate(rhs, [k_bar], cfg, guards)
    capital = states[:, 0]
    if reason == RANGE_EXIT:
        raise RangeExit(
            f"lintasan optimal keluar dari [{k_lo:g}, {k_hi:g}] pada t={times[-1]:.4g}; "
            "perlebar grid atau perpendek t_end",
            t=float(times[-1]), k=float(capital[-1]),
        )
    if reason == K_COLLAPSED:
        raise StepFailure("integrasi lintasan optimal gagal (state non-finite)")
    consumption = np.asarray(policy(capital), dtype=float)
    return Path(times, capital, consumption,
                {"kind": "optimal", "method": cfg.method, "termination": reason, **stats})


def fixed_policy_path(model, k_bar, consumption, cfg=None):
    """Lintasan untuk aturan konsumsi tetap c(t, k) sebagai pembanding."""
    if not k_bar > 0:
        raise PreconditionError(f"k_bar harus positif, diterima {k_bar}")
    cfg = cfg or IntegratorConfig()
    floor = cfg.floor_for(k_bar)

    def rhs(t, y):
        return np.array([float(model.F(y[0], consumption(t, y[0])))])

    guards = (_Guard(K_COLLAPSED, lambda t, y: y[0] - floor, -1),)
    times, states, reason, stats = _integrate(rhs, [k_bar], cfg, guards)
    capital = states[:, 0]
    c = np.array([consumption(t, k) for t, k in zip(times, capital)], dtype=float)
    return Path(times, capital, c, {"kind": "fixed_policy", "method": cfg.method,
                                    "termination": reason, **stats})


def log_ak_path(model, k_bar, times):
    """Lintasan optimal tertutup untuk log-AK: k̄e^{(γ-ρ)t}, ρk̄e^{(γ-ρ)t}."""
    if model.family != "log_ak":
        raise PreconditionError(f"log_ak_path butuh model log_ak, diterima {model.family}")
    times = np.asarray(times, dtype=float)
    gamma, rho = model.params["gamma"], model.rho
    capital = k_bar * np.exp((gamma - rho) * times)
    return Path(times, capital, rho * capital, {"kind": "closed_form", "termination": COMPLETED})


def discounted_utility(model, path):
    """e^{-ρt}·u(c(t), k(t)) di setiap sampel."""
    with np.errstate(invalid="ignore"):
        return np.exp(-model.rho * path.times) * model.u(path.consumption, path.capital)


# ═══════════════════════════════════════════════════════════════════════════
# SHOOTING
# ═══════════════════════════════════════════════════════════════════════════

def _require_rck(model):
    if model.rck is None:
        raise FormMismatch(f"model {model.label} tidak berbentuk RCK (F = f(k) - dk - c, u = u(c))")
    return model.rck


def euler_steady_state(model):
    """Akar f'(k) = ρ + d, atau None bila tidak ada di sekitar domain."""
    rck = _require_rck(model)
    target = model.rho + rck.depreciation

    def gap(k):
        return float(rck.production_prime(np.asarray(k, dtype=float))) - target

    ks = np.geomspace(model.k_lo * 1e-3, model.k_hi * 1e3, 400)
    vals = np.array([gap(k) for k in ks])
    flips = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    if flips.size == 0:
        return None
    i = int(flips[0])
    return float(brentq(gap, ks[i], ks[i + 1], xtol=1e-14, rtol=1e-14))


def euler_shooting(model, k_bar, c0, cfg=None):
    """
    Shooting sistem Euler (k, c) dari (k̄, c0).

    k̇ = f(k) - dk - c,   ċ = (ρ + d - f'(k))·u'(c)/u''(c)

    Alasan berhenti: completed, k_collapsed (k < k_floor), atau diverged
    (k atau c melewati 1e6·k̄, atau k naik melewati (1+0.05)·k_ss).
    """
    rck = _require_rck(model)
    if not k_bar > 0 or not c0 > 0:
        raise PreconditionError("euler_shooting butuh k_bar > 0 dan c0 > 0")
    cfg = cfg or IntegratorConfig(method="rk4_fixed", step=SHOOT_STEP, t_end=SHOOT_T_END)
    floor = cfg.floor_for(k_bar)
    cap = DIVERGENCE_FACTOR * k_bar
    rho, d = model.rho, rck.depreciation

    def rhs(t, y):
        k, c = y
        k_arr, c_arr = np.asarray(k), np.asarray(c)
        k_dot = float(rck.production(k_arr)) - d * k - c
        c_dot = (rho + d - float(rck.production_prime(k_arr))) * float(rck.marginal_utility(c_arr)) \
            / float(rck.utility_curvature(c_arr))
        return np.array([k_dot, c_dot])

    guards = [
        _Guard(K_COLLAPSED, lambda t, y: y[0] - floor, -1),
        _Guard(DIVERGED, lambda t, y: cap - y[0], -1),
        _Guard(DIVERGED, lambda t, y: cap - y[1], -1),
    ]
    k_ss = euler_steady_state(model)
    if k_ss is not None and k_bar < (1.0 + STEADY_STATE_BAND) * k_ss:
        band = (1.0 + STEADY_STATE_BAND) * k_ss
        guards.append(_Guard(DIVERGED, lambda t, y: y[0] - band, +1))

    times, states, reason, stats = _integrate(rhs, [k_bar, c0], cfg, tuple(guards))
    logger.debug("shot c0=%.15g: %s pada t=%.4g", c0, reason, times[-1])
    return Path(times, states[:, 0], states[:, 1],
                {"kind": "euler_shooting", "method": cfg.method, "termination": reason,
                 "c0": float(c0), "k_ss": k_ss, **stats})


def refine_saddle_consumption(model, k_bar, c_guess, cfg=None, *, width=0.05, max_iter=80):
    """
    Bisection pada hasil shooting untuk mendekati saddle path.

    k_collapsed berarti c0 terlalu tinggi, diverged berarti terlalu rendah.
    Shot percobaan memakai horizon 2·t_end.
    """
    cfg = cfg or IntegratorConfig(method="rk4_fixed", step=SHOOT_STEP, t_end=SHOOT_T_END)
    trial = replace(cfg, t_end=2.0 * cfg.t_end)

    def outcome(c0):
        return euler_shooting(model, k_bar, c0, trial).termination

    lo = hi = None
    for _ in range(5):
        lo_c = max(c_guess * (1.0 - width), 1e-12 * c_guess)
        hi_c = c_guess * (1.0 + width)
        if outcome(lo_c) == DIVERGED and outcome(hi_c) == K_COLLAPSED:
            lo, hi = lo_c, hi_c
            break
        width *= 2.0
    if lo is None:
        raise SaddleBracketError(
            f"tidak ada bracket diverged/k_collapsed di sekitar c0={c_guess:g} (lebar terakhir {width / 2:g})"
        )

    for i in range(max_iter):
        mid = 0.5 * (lo + hi)
        result = outcome(mid)
        if result == COMPLETED:
            logger.info("saddle c0=%.15g ditemukan setelah %d bisection", mid, i + 1)
            return mid
        if result == K_COLLAPSED:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 4.0 * np.finfo(float).eps * hi:
            break
    return 0.5 * (lo + hi)


# ═══════════════════════════════════════════════════════════════════════════
# PAYOFF
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class PayoffEstimate:
    """Integral pada support lintasan, estimasi ekor, dan metode kuadratur."""

    value: float
    tail: float
    quadrature: str

    @property
    def total(self):
        if not np.isfinite(self.value):
            return self.value
        return self.value + self.tail

    def to_dict(self):
        return {"payoff": self.value, "tail": self.tail, "total": self.total,
                "quadrature": self.quadrature}


def _singular_first_panel(rho, t, u):
    """∫₀^{t1} e^{-ρt} A t^β dt dengan A, β dari dua sampel terdekat."""
    t1, t2, u1, u2 = t[1], t[2], u[1], u[2]
    if not (np.isfinite(u1) and np.isfinite(u2)) or u1 * u2 <= 0 or t1 <= 0:
        return None
    beta = math.log(u2 / u1) / math.log(t2 / t1)
    if beta <= -1.0:
        return -math.inf if u1 < 0 else math.inf
    amp = u1 / t1 ** beta
    return amp * t1 ** (beta + 1.0) * (1.0 / (beta + 1.0) - rho * t1 / (beta + 2.0))


def payoff(model, path, quadrature="trapezoid"):
    """
    ∫₀^T e^{-ρt} u(c, k) dt atas sampel lintasan.

    clamped_singular menangani u → -∞ di t = 0 yang masih integrable
    (mis. u ~ -t^{-1/2}) lewat fit power-law pada panel pertama.

    Raises:
        PayoffUndefined: bagian positif dan negatif sama-sama divergen
    """
    if quadrature not in QUADRATURES:
        raise PreconditionError(f"quadrature harus salah satu dari {QUADRATURES}")
    if len(path) < 2:
        raise PreconditionError("payoff butuh minimal 2 sampel lintasan")
    rho = model.rho
    t = path.times
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.asarray(model.u(path.consumption, path.capital), dtype=float)
    disc = np.exp(-rho * t)

    head = 0.0
    start = 0
    if quadrature == "clamped_singular" and len(path) >= 3 and not np.isfinite(u[0]):
        fitted = _singular_first_panel(rho, t, u)
        if fitted is not None:
            head, start = fitted, 1

    dens = disc[start:] * u[start:]
    tt = t[start:]
    with np.errstate(invalid="ignore"):
        positive = trapezoid(np.where(dens > 0, dens, 0.0), tt) + max(head, 0.0)
        negative = trapezoid(np.where(dens < 0, dens, 0.0), tt) + min(head, 0.0)
    if np.isposinf(positive) and np.isneginf(negative):
        raise PayoffUndefined("bagian positif dan negatif integral payoff sama-sama divergen")
    value = float(positive + negative)

    tail = 0.0
    u_T, u_prev = u[-1], u[-2]
    if np.isfinite(u_T) and np.isfinite(u_prev) and t[-1] > t[-2]:
        slope = (u_T - u_prev) / (t[-1] - t[-2])
        tail = float(math.exp(-rho * t[-1]) * (u_T / rho + slope / rho ** 2))
    return PayoffEstimate(value=value, tail=tail, quadrature=quadrature)
