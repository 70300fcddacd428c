"""
Hierarki exception untuk hjb_growth.

Semua error turunan dari HJBGrowthError supaya CLI bisa memetakan kegagalan
model (exit 1) dan kegagalan konfigurasi (exit 2) dengan satu ``except``.
"""


class HJBGrowthError(Exception):
    """Root semua error paket ini."""


class ModelDomainError(HJBGrowthError, ValueError):
    """Argumen di luar domain fungsi (mis. log dari bilangan non-positif)."""


class PreconditionError(HJBGrowthError, ValueError):
    """Prasyarat operasi tidak terpenuhi."""


class ConfigError(HJBGrowthError, ValueError):
    """File konfigurasi tidak valid (key tidak dikenal, tipe salah, key wajib hilang)."""


class BracketFailure(HJBGrowthError):
    """Turunan FOC tidak berganti tanda pada (c_eps, c_cap] setelah dua kali ekspansi."""

    def __init__(self, message, k=None, p=None):
        super().__init__(message)
        self.k = k
        self.p = p


class NonConvergence(HJBGrowthError):
    """Iterasi HJB tidak mencapai residual_tol."""

    def __init__(self, message, max_residual=float("nan"), iterations=0):
        super().__init__(message)
        self.max_residual = max_residual
        self.iterations = iterations


class UnboundedHamiltonian(NonConvergence):
    """Supremum Hamiltonian tak terbatas di suatu node (gejala pelanggaran Asumsi 4)."""


class DegenerateGrid(HJBGrowthError):
    """Grid kapital tidak bisa dipakai oleh skema upwind."""


class StepFailure(HJBGrowthError):
    """Integrator ODE gagal mengambil langkah."""


class RangeExit(HJBGrowthError):
    """Lintasan keluar dari rentang node ValueGrid."""

    def __init__(self, message, t=None, k=None):
        super().__init__(message)
        self.t = t
        self.k = k


class FormMismatch(HJBGrowthError):
    """Operasi butuh model berbentuk RCK (F = f(k) - dk - c, u = u(c))."""


class SaddleBracketError(HJBGrowthError):
    """Bisection shooting tidak menemukan bracket collapse/diverge di sekitar tebakan."""


class PayoffUndefined(HJBGrowthError):
    """Bagian positif dan negatif integral payoff sama-sama divergen."""
