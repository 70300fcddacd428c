"""
Modul policy: maximizer Hamiltonian c*(p, k).

Untuk p > 0 fungsi g(c) = F(k,c)·p + u(c,k) strictly concave di c, jadi
maximizer dicari lewat bisection pada turunan FOC p·∂F/∂c + ∂u/∂c.
Semua node diproses sekaligus secara vektor; batch besar bisa dibagi ke
thread pool (HJB_GROWTH_THREADS).
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import BracketFailure, PreconditionError

logger = logging.getLogger(__name__)

# Configuration defaults
DEFAULT_TOL = 1e-10
C_EPS_FACTOR = 1e-12
MAX_BRACKET_EXPANSIONS = 2
NEAR_CORNER_FACTOR = 10.0
MAX_BISECTIONS = 400
PARALLEL_MIN_BATCH = 256
THREADS_ENV = "HJB_GROWTH_THREADS"

STATUS_INTERIOR = 0
STATUS_CORNER = 1
STATUS_UNBOUNDED = 2


@dataclass(frozen=True)
class PolicyResult:
    c_star: float
    h_value: float
    foc_residual: float
    iterations: int
    interior: bool = True
    near_corner: bool = False

    def to_dict(self):
        return {
            "c_star": self.c_star,
            "h_value": self.h_value,
            "foc_residual": self.foc_residual,
            "iterations": self.iterations,
            "interior": self.interior,
            "near_corner": self.near_corner,
        }


@dataclass(frozen=True, eq=False)
class PolicyBatch:
    """Hasil maximisasi untuk banyak pasangan (k, p) sekaligus."""

    c_star: np.ndarray
    h_value: np.ndarray
    foc_residual: np.ndarray
    status: np.ndarray
    iterations: int
    c_eps: float

    @property
    def unbounded(self):
        return self.status == STATUS_UNBOUNDED

    @property
    def corner(self):
        return self.status == STATUS_CORNER

    def result(self, i):
        c = float(self.c_star.ravel()[i])
        return PolicyResult(
            c_star=c,
            h_value=float(self.h_value.ravel()[i]),
            foc_residual=float(self.foc_residual.ravel()[i]),
            iterations=self.iterations,
            interior=bool(self.status.ravel()[i] == STATUS_INTERIOR),
            near_corner=c < NEAR_CORNER_FACTOR * self.c_eps,
        )


def hamiltonian(model, k, c, p):
    """F(k,c)·p + u(c,k); bernilai -∞ bila u(c,k) = -∞."""
    return float(hamiltonian_array(model, k, c, p))


def hamiltonian_array(model, k, c, p):
    with np.errstate(invalid="ignore"):
        return model.F(k, c) * np.asarray(p, dtype=float) + model.u(c, k)


def foc_derivative(model, k, c, p):
    """Turunan g terhadap c: p·∂F/∂c(k,c) + ∂u/∂c(c,k)."""
    return np.asarray(p, dtype=float) * model.technology.partial_y(k, c) + model.utility.partial_x(c, k)


def _thread_count():
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("%s=%r bukan integer, memakai 1 thread", THREADS_ENV, raw)
        return 1


def _solve_chunk(model, k, p, tol, c_cap, c_eps):
    n = k.size
    g_lo = foc_derivative(model, k, c_eps, p)
    corner = ~(g_lo > 0)

    hi = np.full(n, float(c_cap))
    g_hi = foc_derivative(model, k, hi, p)
    need = ~corner & ~(g_hi <= 0)
    for _ in range(MAX_BRACKET_EXPANSIONS):
        if not need.any():
            break
        hi = np.where(need, 2.0 * hi, hi)
        g_hi[need] = foc_derivative(model, k[need], hi[need], p[need])
        need = ~corner & ~(g_hi <= 0)
    unbounded = need

    lo = np.full(n, float(c_eps))
    c = np.where(corner, c_eps, hi)
    done = corner | unbounded
    iterations = 0
    while not done.all() and iterations < MAX_BISECTIONS:
        iterations += 1
        j = np.flatnonzero(~done)
        a, b = lo[j], hi[j]
        # geometris selama bracket masih lebar beberapa orde
        mid = np.where(b > 4.0 * a, np.sqrt(a * b), 0.5 * (a + b))
        g = foc_derivative(model, k[j], mid, p[j])
        up = g > 0
        lo[j] = np.where(up, mid, a)
        hi[j] = np.where(up, b, mid)
        hit = np.abs(g) <= tol
        narrow = hi[j] - lo[j] <= 4.0 * np.finfo(float).eps * hi[j]
        c[j] = np.where(hit, mid, 0.5 * (lo[j] + hi[j]))
        done[j] = hit | narrow

    status = np.where(unbounded, STATUS_UNBOUNDED, np.where(corner, STATUS_CORNER, STATUS_INTERIOR))
    h_value = hamiltonian_array(model, k, c, p)
    if corner.any():
        h_zero = hamiltonian_array(model, k[corner], 0.0, p[corner])
        h_zero = np.where(np.isfinite(h_zero), h_zero, -np.inf)
        h_value[corner] = np.maximum(h_value[corner], h_zero)
    h_value[unbounded] = np.inf
    foc_residual = np.abs(foc_derivative(model, k, c, p))
    return c, h_value, foc_residual, status, iterations


def solve_policy_batch(model, k, p, *, tol=DEFAULT_TOL, c_cap=None):
    """
    Maximizer Hamiltonian untuk setiap pasangan (k, p).

    Args:
        model: ModelSpec
        k, p: array (broadcast) node kapital dan harga bayangan, p > 0
        tol: toleransi residual FOC
        c_cap: batas atas bracket (default model.c_cap)

    Returns:
        PolicyBatch dengan status 0 (interior), 1 (corner di c_eps) atau
        2 (sup tak terbatas; c_star diisi batas bracket yang sudah diekspansi)
    """
    k, p = np.broadcast_arrays(np.asarray(k, dtype=float), np.asarray(p, dtype=float))
    shape = k.shape
    k, p = k.ravel().copy(), p.ravel().copy()
    c_cap = float(model.c_cap if c_cap is None else c_cap)
    c_eps = C_EPS_FACTOR * c_cap

    threads = _thread_count()
    if threads > 1 and k.size >= PARALLEL_MIN_BATCH:
        chunks = np.array_split(np.arange(k.size), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda idx: _solve_chunk(model, k[idx], p[idx], tol, c_cap, c_eps), chunks))
        c = np.concatenate([part[0] for part in parts])
        h = np.concatenate([part[1] for part in parts])
        res = np.concatenate([part[2] for part in parts])
        status = np.concatenate([part[3] for part in parts])
        iterations = max(part[4] for part in parts)
    else:
        c, h, res, status, iterations = _solve_chunk(model, k, p, tol, c_cap, c_eps)

    return PolicyBatch(
        c_star=c.reshape(shape), h_value=h.reshape(shape), foc_residual=res.reshape(shape),
        status=status.reshape(shape), iterations=iterations, c_eps=c_eps,
    )


def maximize_hamiltonian(model, k, p, tol=DEFAULT_TOL):
    """
    c*(p, k) untuk satu node.

    Raises:
        PreconditionError: k <= 0 atau p <= 0
        BracketFailure: turunan FOC tetap positif setelah c_cap digandakan dua kali
    """
    if not k > 0 or not p > 0:
        raise PreconditionError(f"maximize_hamiltonian butuh k > 0 dan p > 0 (k={k}, p={p})")
    batch = solve_policy_batch(model, k, p, tol=tol)
    if batch.unbounded.ravel()[0]:
        raise BracketFailure(
            f"sup Hamiltonian tak terbatas di k={k}, p={p}: turunan FOC positif sampai "
            f"{4 * model.c_cap:g} (Asumsi 4 dilanggar atau c_cap terlalu kecil)",
            k=k, p=p,
        )
    return batch.result(0)


def policy_independence_check(model, p, k_samples, tol=1e-8):
    """True bila c*(p, k) praktis tidak bergantung pada k di sampel."""
    ks = np.unique(np.asarray(k_samples, dtype=float))
    if ks.size < 3:
        raise PreconditionError("policy_independence_check butuh minimal 3 nilai k berbeda")
    batch = solve_policy_batch(model, ks, p)
    spread = float(np.ptp(batch.c_star))
    logger.debug("spread c* pada p=%g: %.3e", p, spread)
    return spread <= tol
