"""
Modul model: primitif masalah akumulasi kapital (rho, u, F), keluarga model
builtin, dan pemeriksaan Asumsi 1-7 secara numerik berbasis sampling.

Masalah yang dimodelkan:

    max  ∫₀^∞ e^{-ρt} u(c(t), k(t)) dt
    s.t. k̇(t) = F(k(t), c(t)),  k(0) = k̄,  k ≥ 0, c ≥ 0
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ModelDomainError, PreconditionError

logger = logging.getLogger(__name__)

# |θ-1| di bawah nilai ini memakai cabang log
LOG_BRANCH_TOL = 1e-12
FD_REL_STEP = 1e-6

PASS = "pass"
FAIL = "fail"
UNKNOWN = "unknown"


# ═══════════════════════════════════════════════════════════════════════════
# CRRA
# ═══════════════════════════════════════════════════════════════════════════

def crra_array(theta, x):
    """
    Versi vektor dari u_θ(x) dengan nilai extended-real.

    u_θ(x) = (x^(1-θ) - 1) / (1-θ)   untuk θ ≠ 1
    u_θ(x) = log x                   untuk θ = 1

    Di x = 0 hasilnya -∞ (θ ≥ 1) atau -1/(1-θ) (θ < 1). Dihitung lewat
    expm1 supaya kontinu di θ = 1 tanpa cancellation.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if abs(theta - 1.0) < LOG_BRANCH_TOL:
            return np.log(x)
        return np.expm1((1.0 - theta) * np.log(x)) / (1.0 - theta)


def crra_eval(theta, x):
    """
    Fungsi CRRA skalar u_θ(x).

    Raises:
        PreconditionError: theta <= 0
        ModelDomainError: x < 0, atau x = 0 dengan theta >= 1 (nilainya -∞)
    """
    if theta <= 0:
        raise PreconditionError(f"theta harus positif, diterima {theta}")
    if x < 0 or (x == 0 and theta >= 1):
        raise ModelDomainError(f"crra_eval tidak terdefinisi untuk x={x} dengan theta={theta}")
    return float(crra_array(theta, x))


def crra_marginal(theta, x):
    with np.errstate(divide="ignore"):
        return np.power(np.asarray(x, dtype=float), -theta)


# ═══════════════════════════════════════════════════════════════════════════
# TIPE DOMAIN
# ═══════════════════════════════════════════════════════════════════════════

def _broadcast(x, y):
    return np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


def _as_shape(value, shape):
    return np.array(np.broadcast_to(np.asarray(value, dtype=float), shape))


@dataclass(frozen=True)
class ScalarField2:
    """
    Fungsi dua variabel G(x, y) dengan oracle turunan parsial opsional.

    Utility memakai urutan argumen (c, k), technology memakai (k, c).
    Callable harus menerima numpy array (broadcast) dan boleh mengembalikan
    -∞ di batas domain.
    """

    eval: Callable[..., np.ndarray]
    d_dx: Optional[Callable[..., np.ndarray]] = None
    d_dy: Optional[Callable[..., np.ndarray]] = None
    label: str = "field"

    def __call__(self, x, y):
        x, y = _broadcast(x, y)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return _as_shape(self.eval(x, y), x.shape)

    def partial_x(self, x, y):
        x, y = _broadcast(x, y)
        if self.d_dx is None:
            return central_difference(self, x, y, axis=0)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return _as_shape(self.d_dx(x, y), x.shape)

    def partial_y(self, x, y):
        x, y = _broadcast(x, y)
        if self.d_dy is None:
            return central_difference(self, x, y, axis=1)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return _as_shape(self.d_dy(x, y), x.shape)

    @property
    def has_analytic_partials(self):
        return self.d_dx is not None and self.d_dy is not None


def central_difference(fld, x, y, axis=0, rel_step=FD_REL_STEP):
    """
    Turunan parsial numerik dari ScalarField2.

    Beda pusat bila stensil tetap di kuadran positif, beda maju bila tidak.
    """
    x, y = _broadcast(x, y)
    base = x if axis == 0 else y
    h = rel_step * np.maximum(np.abs(base), 1e-3)

    def shifted(delta):
        if axis == 0:
            return fld(x + delta, y)
        return fld(x, y + delta)

    central = base - h > 0
    with np.errstate(invalid="ignore"):
        forward = (shifted(h) - fld(x, y)) / h
        centred = (shifted(h) - shifted(-h)) / (2.0 * h)
    return np.where(central, centred, forward)


def one_sided_differences(fn, x, h):
    """Pasangan (D₊, D₋) dari fungsi satu variabel pada langkah h."""
    with np.errstate(invalid="ignore"):
        f0 = fn(x)
        return (fn(x + h) - f0) / h, (f0 - fn(x - h)) / h


@dataclass(frozen=True)
class RCKForm:
    """
    Struktur RCK: F(k,c) = f(k) - d·k - c dengan utility u(c).

    Dibutuhkan oleh euler_shooting, euler_residual dan transversality_check.
    """

    production: Callable[[np.ndarray], np.ndarray]
    production_prime: Callable[[np.ndarray], np.ndarray]
    depreciation: float
    marginal_utility: Callable[[np.ndarray], np.ndarray]
    utility_curvature: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ModelSpec:
    """
    Primitif model (ρ, u, F) beserta batas domain komputasi.

    rho tidak divalidasi di sini: ρ ≤ 0 tetap bisa dibangun supaya
    check_assumptions bisa melaporkan Asumsi 1 gagal.
    """

    rho: float
    utility: ScalarField2
    technology: ScalarField2
    k_domain: tuple
    c_cap: float
    d1: float = 0.0
    d2: float = 0.0
    label: str = "custom"
    rck: Optional[RCKForm] = field(default=None, compare=False)
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        k_lo, k_hi = (float(v) for v in self.k_domain)
        object.__setattr__(self, "k_domain", (k_lo, k_hi))
        if not 0 < k_lo < k_hi:
            raise PreconditionError(f"k_domain harus 0 < k_lo < k_hi, diterima {self.k_domain}")
        if not self.c_cap > 0:
            raise PreconditionError(f"c_cap harus positif, diterima {self.c_cap}")
        if self.d1 < 0 or self.d2 < 0:
            raise PreconditionError("d1 dan d2 harus nonnegatif")
        try:
            f00 = float(self.technology(0.0, 0.0))
        except (ArithmeticError, ValueError):
            f00 = float("nan")
        if np.isfinite(f00) and abs(f00) > 1e-12:
            raise ModelDomainError(f"technology(0,0) harus 0, diperoleh {f00}")

    @property
    def k_lo(self):
        return self.k_domain[0]

    @property
    def k_hi(self):
        return self.k_domain[1]

    @property
    def family(self):
        return self.params.get("family", "custom")

    def u(self, c, k):
        return self.utility(c, k)

    def F(self, k, c):
        return self.technology(k, c)


@dataclass(frozen=True)
class Assumption6Params:
    """Parameter (k*, k⁺, c*, γ, δ, θ, a, b, C) untuk batas atas analitik."""

    k_star: float
    k_plus: float
    c_star: float
    gamma: float
    delta: float
    theta: float
    a: float
    b: float
    cc: float

    def __post_init__(self):
        for name in ("k_star", "k_plus", "gamma", "delta", "theta", "a"):
            if not getattr(self, name) > 0:
                raise PreconditionError(f"assumption6.{name} harus positif")
        if self.c_star < 0 or self.b < 0:
            raise PreconditionError("assumption6.c_star dan assumption6.b harus nonnegatif")

    def growth_margin(self, rho):
        """ρ - (1-θ)γ, harus positif (kondisi TL)."""
        return rho - (1.0 - self.theta) * self.gamma

    def validate(self, rho):
        if not self.growth_margin(rho) > 0:
            raise PreconditionError(
                f"rho - (1-theta)*gamma = {self.growth_margin(rho):.6g} harus positif"
            )
        return self


@dataclass(frozen=True)
class SamplingConfig:
    n_k: int = 16
    n_c: int = 16
    n_pairs: int = 256
    seed: int = 0

    def __post_init__(self):
        if self.n_k < 8 or self.n_c < 8:
            raise PreconditionError("sampling butuh minimal 8 titik per sumbu")


# ═══════════════════════════════════════════════════════════════════════════
# KELUARGA BUILTIN
# ═══════════════════════════════════════════════════════════════════════════

def log_utility():
    return ScalarField2(
        eval=lambda c, k: np.log(c),
        d_dx=lambda c, k: 1.0 / c,
        d_dy=lambda c, k: np.zeros_like(k),
        label="log(c)",
    )


def crra_utility(theta):
    if abs(theta - 1.0) < LOG_BRANCH_TOL:
        return log_utility()
    return ScalarField2(
        eval=lambda c, k: crra_array(theta, c),
        d_dx=lambda c, k: crra_marginal(theta, c),
        d_dy=lambda c, k: np.zeros_like(k),
        label=f"crra(theta={theta:g})",
    )


def linear_utility():
    return ScalarField2(
        eval=lambda c, k: c,
        d_dx=lambda c, k: np.ones_like(c),
        d_dy=lambda c, k: np.zeros_like(k),
        label="c",
    )


def ces_utility(r, A):
    """
    u(c,k) = (c^r + k^r)^(A/r): utility yang bergantung pada kapital,
    sehingga c*(p,k) ikut bergantung pada k.
    """
    def base(c, k):
        return np.power(c, r) + np.power(k, r)

    return ScalarField2(
        eval=lambda c, k: np.power(base(c, k), A / r),
        d_dx=lambda c, k: A * np.power(base(c, k), A / r - 1.0) * np.power(c, r - 1.0),
        d_dy=lambda c, k: A * np.power(base(c, k), A / r - 1.0) * np.power(k, r - 1.0),
        label=f"ces(r={r:g},A={A:g})",
    )


def default_c_cap(technology, k_hi):
    """
    c_cap terkecil berbentuk 2^j dengan F(k_hi, c_cap) < -|F(k_hi, 0)|,
    minimal k_hi.
    """
    target = -abs(float(technology(k_hi, 0.0)))
    c = 1.0
    for _ in range(200):
        if float(technology(k_hi, c)) < target:
            break
        c *= 2.0
    return max(c, float(k_hi))


def _numeric_derivative(fn):
    def derivative(k):
        k = np.asarray(k, dtype=float)
        h = FD_REL_STEP * np.maximum(np.abs(k), 1e-3)
        return np.where(
            k - h > 0,
            (fn(k + h) - fn(np.maximum(k - h, 0.0))) / (2.0 * h),
            (fn(k + h) - fn(k)) / h,
        )
    return derivative


def make_ak(gamma, utility, rho, *, k_domain=(0.1, 10.0), c_cap=None, label="ak",
            params=None, rck=None):
    """Teknologi AK F(k,c) = γk - c dengan utility sembarang."""
    if not gamma > 0:
        raise PreconditionError("gamma harus positif")
    technology = ScalarField2(
        eval=lambda k, c: gamma * k - c,
        d_dx=lambda k, c: np.full_like(k, gamma),
        d_dy=lambda k, c: -np.ones_like(c),
        label=f"{gamma:g}k-c",
    )
    if c_cap is None:
        c_cap = default_c_cap(technology, k_domain[1])
    return ModelSpec(
        rho=rho, utility=utility, technology=technology, k_domain=k_domain,
        c_cap=c_cap, d1=0.0, d2=1.0, label=label, rck=rck,
        params=dict(params or {"family": "custom", "gamma": gamma}),
    )


def make_log_ak(gamma, rho, *, k_domain=(0.1, 10.0), c_cap=None):
    """
    Model AK logaritmik: u(c,k) = log c, F(k,c) = γk - c, dengan γ > ρ > 0.

    Nilai fungsi terbatas hanya bila γ > ρ.
    """
    if not rho > 0:
        raise PreconditionError(f"rho harus positif, diterima {rho}")
    if not gamma > rho:
        raise PreconditionError(f"log-AK butuh gamma > rho (gamma={gamma}, rho={rho})")
    return make_ak_crra(gamma, 1.0, rho, k_domain=k_domain, c_cap=c_cap)


def make_ak_crra(gamma, theta, rho, *, k_domain=(0.1, 10.0), c_cap=None):
    """AK dengan utility CRRA u_θ(c); butuh ρ - (1-θ)γ > 0."""
    if not rho > 0 or not theta > 0:
        raise PreconditionError("rho dan theta harus positif")
    if not rho - (1.0 - theta) * gamma > 0:
        raise PreconditionError(
            f"ak_crra butuh rho - (1-theta)*gamma > 0 (gamma={gamma}, theta={theta}, rho={rho})"
        )
    log_branch = abs(theta - 1.0) < LOG_BRANCH_TOL
    rck = RCKForm(
        production=lambda k: gamma * np.asarray(k, dtype=float),
        production_prime=lambda k: np.full_like(np.asarray(k, dtype=float), gamma),
        depreciation=0.0,
        marginal_utility=lambda c: crra_marginal(theta, c),
        utility_curvature=lambda c: -theta * np.power(np.asarray(c, dtype=float), -theta - 1.0),
    )
    family = "log_ak" if log_branch else "ak_crra"
    return make_ak(
        gamma, crra_utility(theta), rho, k_domain=k_domain, c_cap=c_cap,
        label=f"{family}(gamma={gamma:g},theta={theta:g},rho={rho:g})",
        params={"family": family, "gamma": gamma, "theta": 1.0 if log_branch else theta},
        rck=rck,
    )


def make_rck(f, d, u, *, rho, f_prime=None, u_second=None, k_domain=(0.1, 10.0),
             c_cap=None, label="rck", params=None):
    """
    Model Ramsey-Cass-Koopmans: F(k,c) = f(k) - d·k - c.

    Syarat f(0) = 0 dan f nondecreasing diperiksa pada sampel domain.
    """
    if not rho > 0:
        raise PreconditionError(f"rho harus positif, diterima {rho}")
    if d < 0:
        raise PreconditionError("depresiasi d harus nonnegatif")
    f0 = float(f(np.asarray(0.0)))
    if abs(f0) > 1e-12:
        raise PreconditionError(f"f(0) harus 0, diperoleh {f0}")
    ks = np.geomspace(k_domain[0], k_domain[1], 64)
    if np.any(np.diff(f(ks)) < 0):
        raise PreconditionError("f harus nondecreasing pada domain sampel")

    fp = f_prime if f_prime is not None else _numeric_derivative(f)
    technology = ScalarField2(
        eval=lambda k, c: f(k) - d * k - c,
        d_dx=lambda k, c: fp(k) - d,
        d_dy=lambda k, c: -np.ones_like(c),
        label=f"f(k)-{d:g}k-c",
    )

    def marginal(c):
        c = np.asarray(c, dtype=float)
        return u.partial_x(c, np.ones_like(c))

    curvature = u_second if u_second is not None else _numeric_derivative(marginal)
    if c_cap is None:
        c_cap = default_c_cap(technology, k_domain[1])
    return ModelSpec(
        rho=rho, utility=u, technology=technology, k_domain=k_domain, c_cap=c_cap,
        d1=float(d), d2=1.0, label=label,
        rck=RCKForm(f, fp, float(d), marginal, curvature),
        params=dict(params or {"family": "custom"}),
    )


def make_rck_cobb_douglas(alpha, d, rho, theta=1.0, *, k_domain=(1.0, 10.0), c_cap=None):
    """RCK dengan f(k) = k^α dan utility CRRA u_θ(c)."""
    if not 0 < alpha < 1:
        raise PreconditionError("alpha harus di (0, 1)")
    return make_rck(
        lambda k: np.power(k, alpha), d, crra_utility(theta), rho=rho,
        f_prime=lambda k: alpha * np.power(k, alpha - 1.0),
        u_second=lambda c: -theta * np.power(c, -theta - 1.0),
        k_domain=k_domain, c_cap=c_cap,
        label=f"rck_cobb_douglas(alpha={alpha:g},d={d:g},rho={rho:g})",
        params={"family": "rck_cobb_douglas", "alpha": alpha, "d": d, "theta": theta},
    )


def make_linear_counterexample(rho, *, k_domain=(0.01, 10.0), c_cap=None):
    """u(c,k) = c, F(k,c) = k - c: model dengan HJB yang punya banyak solusi."""
    if not rho > 0:
        raise PreconditionError(f"rho harus positif, diterima {rho}")
    return make_rck(
        lambda k: np.asarray(k, dtype=float), 0.0, linear_utility(), rho=rho,
        f_prime=lambda k: np.ones_like(np.asarray(k, dtype=float)),
        u_second=lambda c: np.zeros_like(np.asarray(c, dtype=float)),
        k_domain=k_domain, c_cap=c_cap,
        label=f"linear_counterexample(rho={rho:g})",
        params={"family": "linear_counterexample"},
    )


def make_magic_of_capital(*, k_domain=(0.01, 10.0)):
    """ρ = 1, F(k,c) = √k - c, u(c) = -1/√c (u(0) = -∞)."""
    utility = ScalarField2(
        eval=lambda c, k: -1.0 / np.sqrt(c),
        d_dx=lambda c, k: 0.5 * np.power(c, -1.5),
        d_dy=lambda c, k: np.zeros_like(k),
        label="-1/sqrt(c)",
    )
    return make_rck(
        np.sqrt, 0.0, utility, rho=1.0,
        f_prime=lambda k: 0.5 / np.sqrt(k),
        u_second=lambda c: -0.75 * np.power(c, -2.5),
        k_domain=k_domain, label="magic_of_capital",
        params={"family": "magic_of_capital"},
    )


def stationary_consumption(model, k):
    """
    c₀(k) yang menyelesaikan F(k, c) = 0, NaN bila F(k, 0) ≤ 0.

    F menurun di c, jadi cukup bisection setelah batas atas digandakan.
    """
    scalar = np.ndim(k) == 0
    k = np.atleast_1d(np.asarray(k, dtype=float))
    out = np.full(k.shape, np.nan)
    f0 = model.F(k, 0.0)
    ok = np.isfinite(f0) & (f0 > 0)
    if ok.any():
        kk = k[ok]
        lo = np.zeros(kk.shape)
        hi = np.maximum(f0[ok], 1e-12)
        for _ in range(200):
            still = model.F(kk, hi) >= 0
            if not still.any():
                break
            hi = np.where(still, 2.0 * hi, hi)
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            pos = model.F(kk, mid) > 0
            lo = np.where(pos, mid, lo)
            hi = np.where(pos, hi, mid)
        out[ok] = 0.5 * (lo + hi)
    return float(out[0]) if scalar else out


# ═══════════════════════════════════════════════════════════════════════════
# PEMERIKSAAN ASUMSI
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class Verdict:
    assumption: int
    status: str
    witness: Optional[dict] = field(default=None, compare=False)
    checks: tuple = ()
    evidence: dict = field(default_factory=dict, compare=False)

    def to_dict(self):
        return {
            "assumption": self.assumption,
            "status": self.status,
            "witness": self.witness,
            "checks": [{"name": n, "status": s} for n, s in self.checks],
            "evidence": self.evidence,
        }


@dataclass(frozen=True)
class AssumptionReport:
    verdicts: tuple
    sample_count: int

    def status(self, assumption):
        for v in self.verdicts:
            if v.assumption == assumption:
                return v.status
        raise KeyError(assumption)

    def verdict(self, assumption):
        for v in self.verdicts:
            if v.assumption == assumption:
                return v
        raise KeyError(assumption)

    def failing(self):
        return [v.assumption for v in self.verdicts if v.status == FAIL]

    @property
    def any_failed(self):
        return bool(self.failing())

    def to_dict(self):
        return {
            "sample_count": self.sample_count,
            "verdicts": [v.to_dict() for v in self.verdicts],
        }

    def print_summary(self):
        marks = {PASS: "✓", FAIL: "✗", UNKNOWN: "⚠"}
        print("\n" + "=" * 70)
        print(f"PEMERIKSAAN ASUMSI ({self.sample_count} titik sampel)")
        print("=" * 70)
        for v in self.verdicts:
            print(f"  {marks[v.status]} Asumsi {v.assumption}: {v.status}")
            for name, status in v.checks:
                if status != PASS:
                    print(f"      - {name}: {status}")
            if v.witness:
                print(f"      witness: {v.witness}")
        print("=" * 70)


def _combine(statuses):
    if FAIL in statuses:
        return FAIL
    if UNKNOWN in statuses:
        return UNKNOWN
    return PASS


class AssumptionChecker:
    """
    Memeriksa Asumsi 1-7 pada grid sampel [k_lo, k_hi] × (0, c_cap].

    Klausa universal gagal bila ada witness tandingan pada sampel; klausa
    eksistensial lulus bila ada witness, selain itu unknown; kondisi limit
    (Inada) selalu unknown dengan bukti tren.
    """

    CONCAVITY_TOL = 1e-10
    FD_SLACK = 1e-5

    def __init__(self, model, sampling=None, a6=None):
        self.model = model
        self.sampling = sampling or SamplingConfig()
        self.a6 = a6
        self.k_samples = None
        self.c_samples = None
        self._checks = {i: [] for i in range(1, 8)}
        self._witness = {}
        self._evidence = {i: {} for i in range(1, 8)}

    # ── helper ──────────────────────────────────────────────────────────

    def _record(self, assumption, name, status, witness=None):
        self._checks[assumption].append((name, status))
        if status == FAIL and assumption not in self._witness and witness is not None:
            self._witness[assumption] = witness

    def _universal(self, assumption, name, ok, points, inequality):
        ok = np.asarray(ok, dtype=bool)
        if ok.all():
            self._record(assumption, name, PASS)
            return
        idx = int(np.flatnonzero(~ok.ravel())[0])
        point = {
            key: float(np.broadcast_to(val, ok.shape).ravel()[idx]) for key, val in points.items()
        }
        self._record(assumption, name, FAIL, {"point": point, "inequality": inequality})

    def _existential(self, assumption, name, ok, points, inequality):
        ok = np.asarray(ok, dtype=bool)
        if ok.any():
            idx = int(np.flatnonzero(ok.ravel())[0])
            self._evidence[assumption][name] = {
                key: float(np.broadcast_to(val, ok.shape).ravel()[idx]) for key, val in points.items()
            }
            self._record(assumption, name, PASS)
        else:
            self._evidence[assumption][name] = f"tidak ada witness pada sampel untuk {inequality}"
            self._record(assumption, name, UNKNOWN)

    def _midpoint_concavity(self, assumption, name, fn, xs, ys):
        rng = np.random.default_rng(self.sampling.seed + assumption)
        flat_x, flat_y = xs.ravel(), ys.ravel()
        i = rng.integers(0, flat_x.size, self.sampling.n_pairs)
        j = rng.integers(0, flat_x.size, self.sampling.n_pairs)
        f1, f2 = fn(flat_x[i], flat_y[i]), fn(flat_x[j], flat_y[j])
        fm = fn(0.5 * (flat_x[i] + flat_x[j]), 0.5 * (flat_y[i] + flat_y[j]))
        finite = np.isfinite(f1) & np.isfinite(f2) & np.isfinite(fm)
        scale = max(1.0, float(np.max(np.abs(np.where(finite, f1, 0.0)))))
        ok = ~finite | (fm >= 0.5 * (f1 + f2) - self.CONCAVITY_TOL * scale)
        self._universal(
            assumption, name, ok,
            {"x1": flat_x[i], "y1": flat_y[i], "x2": flat_x[j], "y2": flat_y[j]},
            "G((p1+p2)/2) >= (G(p1)+G(p2))/2",
        )

    # ── tahapan ─────────────────────────────────────────────────────────

    def build_samples(self):
        k_lo, k_hi = self.model.k_domain
        self.k_samples = np.geomspace(k_lo, k_hi, self.sampling.n_k)
        self.c_samples = np.geomspace(self.model.c_cap * 1e-4, self.model.c_cap, self.sampling.n_c)
        # baris = c, kolom = k
        self.C, self.K = np.meshgrid(self.c_samples, self.k_samples, indexing="ij")
        return self

    def check_discount(self):
        """Asumsi 1: ρ > 0."""
        self._universal(1, "rho > 0", self.model.rho > 0, {"rho": self.model.rho}, "rho > 0")
        return self

    def check_utility(self):
        """Asumsi 2: u kontinu, konkaf, nondecreasing, naik di c, u(c,0) > -∞ untuk suatu c."""
        u, C, K = self.model.utility, self.C, self.K
        U = u(C, K)
        scale = max(1.0, float(np.max(np.abs(U[np.isfinite(U)]), initial=0.0)))
        self._universal(2, "u finite on positive quadrant", np.isfinite(U), {"c": C, "k": K},
                        "u(c,k) > -inf")
        self._midpoint_concavity(2, "u concave", u, C, K)
        with np.errstate(invalid="ignore"):
            dk = np.diff(U, axis=1)
            dc = np.diff(U, axis=0)
        self._universal(2, "u nondecreasing in k", ~(dk < -self.CONCAVITY_TOL * scale),
                        {"c": C[:, 1:], "k": K[:, 1:]}, "u(c,k2) >= u(c,k1) for k2 > k1")
        self._universal(2, "u increasing in c", dc > 0, {"c": C[1:, :], "k": K[1:, :]},
                        "u(c2,k) > u(c1,k) for c2 > c1")
        U0 = u(self.c_samples, 0.0)
        self._existential(2, "u(c,0) > -inf for some c", np.isfinite(U0),
                          {"c": self.c_samples}, "u(c,0) > -inf")
        return self

    def check_technology(self):
        """Asumsi 3: F konkaf, F(0,0) = 0, turun di c, F > -d1·k - d2·c, dan F(k,c) > F(0,c) untuk suatu k."""
        m, C, K = self.model, self.C, self.K
        Fv = m.F(K, C)
        scale = max(1.0, float(np.max(np.abs(Fv[np.isfinite(Fv)]), initial=0.0)))
        self._universal(3, "F finite on positive quadrant", np.isfinite(Fv), {"k": K, "c": C},
                        "F(k,c) finite")
        self._midpoint_concavity(3, "F concave", m.technology, K, C)
        f00 = float(m.F(0.0, 0.0))
        if np.isfinite(f00):
            self._universal(3, "F(0,0) = 0", abs(f00) <= 1e-12, {"F00": f00}, "F(0,0) = 0")
        else:
            self._record(3, "F(0,0) = 0", UNKNOWN)
        self._universal(3, "F decreasing in c", np.diff(Fv, axis=0) < 0,
                        {"k": K[1:, :], "c": C[1:, :]}, "F(k,c2) < F(k,c1) for c2 > c1")
        lower = -m.d1 * K - m.d2 * C
        self._universal(3, "F > -d1 k - d2 c", Fv > lower, {"k": K, "c": C},
                        "F(k,c) > -d1*k - d2*c")
        F0c = m.F(0.0, self.c_samples)
        if not np.all(np.isfinite(F0c)):
            self._record(3, "exists k: F(k,c) > F(0,c)", UNKNOWN)
        else:
            found = np.any(Fv > F0c[:, None], axis=1)
            if found.all():
                self._record(3, "exists k: F(k,c) > F(0,c)", PASS)
            else:
                c_bad = float(self.c_samples[np.flatnonzero(~found)[0]])
                self._evidence[3]["exists k: F(k,c) > F(0,c)"] = {"c_without_witness": c_bad}
                self._record(3, "exists k: F(k,c) > F(0,c)", UNKNOWN)
        return self

    def check_marginal_utility(self):
        """Asumsi 4: ∂u/∂c turun, → +∞ saat c → 0, → 0 saat c → ∞; ∂u/∂k terbatas."""
        u, C, K = self.model.utility, self.C, self.K
        Uc = u.partial_x(C, K)
        self._universal(4, "du/dc decreasing in c", np.diff(Uc, axis=0) < 0,
                        {"c": C[1:, :], "k": K[1:, :]}, "du/dc(c2,k) < du/dc(c1,k) for c2 > c1")
        Uk = u.partial_y(C, K)
        self._universal(4, "du/dk bounded on samples", np.isfinite(Uk), {"c": C, "k": K},
                        "|du/dk| < inf")

        k_mid = float(np.sqrt(self.model.k_lo * self.model.k_hi))
        decades = self.model.c_cap * np.power(10.0, np.arange(-6, 4))
        trend = u.partial_x(decades, np.full_like(decades, k_mid))
        self._evidence[4]["du/dc decades"] = {
            "k": k_mid, "c": decades.tolist(), "du_dc": trend.tolist(),
        }
        with np.errstate(invalid="ignore"):
            rising_to_zero = np.all(np.diff(trend[:4]) < 0)
            falling_to_inf = np.all(np.diff(trend[-4:]) < 0)
        self._record(4, "du/dc -> +inf as c -> 0", UNKNOWN if rising_to_zero else FAIL,
                     {"point": {"c": float(decades[0]), "k": k_mid},
                      "inequality": "du/dc tidak naik saat c mengecil"})
        self._record(4, "du/dc -> 0 as c -> inf", UNKNOWN if falling_to_inf else FAIL,
                     {"point": {"c": float(decades[-1]), "k": k_mid},
                      "inequality": "du/dc tidak turun saat c membesar"})
        return self

    def check_technology_smoothness(self):
        """Asumsi 5: F kontinu terdiferensial di c (tidak ada kink)."""
        m, C, K = self.model, self.C, self.K
        h = FD_REL_STEP * C
        d_plus, d_minus = one_sided_differences(lambda c: m.F(K, c), C, h)
        ok = np.abs(d_plus - d_minus) <= 1e-4 * np.maximum(1.0, np.abs(d_plus))
        self._universal(5, "dF/dc continuous in c", ok & np.isfinite(d_plus),
                        {"k": K, "c": C}, "D+F = D-F in c")
        return self

    def check_upper_bound_params(self):
        """Asumsi 6: parameter (k*, k⁺, c*, γ, δ, θ, a, b, C) untuk batas atas."""
        if self.a6 is None:
            self._evidence[6]["note"] = "parameter Asumsi 6 tidak diberikan"
            self._record(6, "parameters supplied", UNKNOWN)
            return self
        m, p = self.model, self.a6
        slack = self.FD_SLACK * max(1.0, abs(p.gamma), abs(p.delta))
        f_star = float(m.F(p.k_star, p.c_star))
        self._universal(6, "FL", f_star > 0, {"k_star": p.k_star, "c_star": p.c_star},
                        "F(k*,c*) > 0")

        hk = FD_REL_STEP * max(1.0, p.k_star)
        dk_plus, dk_minus = one_sided_differences(lambda k: float(m.F(k, p.c_star)), p.k_star, hk)
        self._universal(6, "SL gamma in dF/dk", (dk_plus <= p.gamma + slack) and (p.gamma <= dk_minus + slack),
                        {"D_plus": dk_plus, "D_minus": dk_minus, "gamma": p.gamma},
                        "D+F <= gamma <= D-F (k)")
        hc = FD_REL_STEP * max(1.0, p.c_star)
        dc_plus = (float(m.F(p.k_star, p.c_star + hc)) - f_star) / hc
        ok_c = dc_plus <= -p.delta + slack
        if p.c_star > hc:
            dc_minus = (f_star - float(m.F(p.k_star, p.c_star - hc))) / hc
            ok_c = ok_c and (-p.delta <= dc_minus + slack)
        self._universal(6, "SL -delta in dF/dc", ok_c, {"D_plus": dc_plus, "delta": p.delta},
                        "D+F <= -delta <= D-F (c)")

        C, K = self.C, self.K
        majorant = p.gamma * (K - p.k_star) - p.delta * (C - p.c_star) + f_star
        Fv = m.F(K, C)
        scale = max(1.0, float(np.max(np.abs(Fv))))
        self._universal(6, "SL supergradient inequality", Fv <= majorant + slack * scale,
                        {"k": K, "c": C}, "F(k,c) <= gamma(k-k*) - delta(c-c*) + F(k*,c*)")

        hp = FD_REL_STEP * max(1.0, p.k_plus)
        d_plus_kp = (float(m.F(p.k_plus + hp, 0.0)) - float(m.F(p.k_plus, 0.0))) / hp
        self._universal(6, "SL 0 < D+F(k+,0) <= gamma", 0 < d_plus_kp <= p.gamma + slack,
                        {"k_plus": p.k_plus, "D_plus": d_plus_kp}, "0 < D+F(k+,0) <= gamma")
        self._universal(6, "TL", p.growth_margin(m.rho) > 0,
                        {"rho": m.rho, "theta": p.theta, "gamma": p.gamma}, "rho - (1-theta)gamma > 0")

        U = m.u(C, K)
        bound = p.a * crra_array(p.theta, C) + p.cc
        if p.b > 0:
            bound = bound + p.b * crra_array(p.theta, K)
        scale_u = max(1.0, float(np.max(np.abs(U[np.isfinite(U)]), initial=0.0)))
        self._universal(6, "FFL", U <= bound + 1e-10 * scale_u, {"c": C, "k": K},
                        "u(c,k) <= a u_theta(c) + b u_theta(k) + C")
        return self

    def check_interior_growth(self):
        """Asumsi 7: ∂F/∂c, ∂u/∂c mulus di k, dan ada k dengan inf_c D₊F(k,c) > ρ."""
        m, C, K = self.model, self.C, self.K
        h = 1e-5 * K
        for name, fn in (
            ("dF/dc C1 in k", lambda k: m.technology.partial_y(k, C)),
            ("du/dc C1 in k", lambda k: m.utility.partial_x(C, k)),
        ):
            d_plus, d_minus = one_sided_differences(fn, K, h)
            ok = np.abs(d_plus - d_minus) <= 1e-3 * np.maximum(1.0, np.maximum(np.abs(d_plus), np.abs(d_minus)))
            self._universal(7, name, ok & np.isfinite(d_plus), {"k": K, "c": C}, "D+ = D- in k")

        hk = FD_REL_STEP * K
        dk_plus = (m.F(K + hk, C) - m.F(K, C)) / hk
        inf_over_c = np.min(dk_plus, axis=0)
        self._existential(7, "exists k: inf_c D+F(k,c) > rho", inf_over_c > m.rho,
                          {"k": self.k_samples, "inf_D_plus": inf_over_c}, "inf_c D+F(k,c) > rho")
        return self

    def get_report(self):
        verdicts = []
        for i in range(1, 8):
            checks = tuple(self._checks[i])
            status = _combine([s for _, s in checks]) if checks else UNKNOWN
            verdicts.append(Verdict(
                assumption=i, status=status,
                witness=self._witness.get(i) if status == FAIL else None,
                checks=checks, evidence=self._evidence[i],
            ))
        count = 0 if self.k_samples is None else self.k_samples.size * self.c_samples.size
        return AssumptionReport(verdicts=tuple(verdicts), sample_count=int(count))

    def run_all(self):
        (self.build_samples()
             .check_discount()
             .check_utility()
             .check_technology()
             .check_marginal_utility()
             .check_technology_smoothness()
             .check_upper_bound_params()
             .check_interior_growth())
        report = self.get_report()
        logger.info("Asumsi %s: %s", self.model.label,
                    {v.assumption: v.status for v in report.verdicts})
        return report


def check_assumptions(model, grid=None, a6=None):
    """Laporan Asumsi 1-7 untuk model pada konfigurasi sampling ``grid``."""
    return AssumptionChecker(model, grid, a6).run_all()
