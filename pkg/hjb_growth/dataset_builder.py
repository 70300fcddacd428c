import numpy as np
import pandas as pd

from .ode import discounted_utility


def build_value_table(value_grid, certificate=None):
    """
    Tabel value.csv: k, V, dV, c_policy, residual.

    Residual hanya terdefinisi di node interior; node batas diisi NaN.
    """
    n = value_grid.size
    residual = np.full(n, np.nan)
    if certificate is not None and certificate.residual_profile.size == n - 2:
        residual[1:-1] = certificate.residual_profile
    policy = value_grid.policy if value_grid.policy is not None else np.full(n, np.nan)
    return pd.DataFrame({
        "k": value_grid.nodes,
        "V": value_grid.values,
        "dV": value_grid.derivs,
        "c_policy": policy,
        "residual": residual,
    })


def build_path_table(model, path):
    """Tabel path.csv: t, k, c, discounted_utility_density."""
    return pd.DataFrame({
        "t": path.times,
        "k": path.capital,
        "c": path.consumption,
        "discounted_utility_density": discounted_utility(model, path),
    })


def build_assumption_table(report):
    """Satu baris per asumsi: status, jumlah sub-check, dan sub-check yang tidak lulus."""
    rows = []
    for v in report.verdicts:
        rows.append({
            "assumption": v.assumption,
            "status": v.status,
            "checks": len(v.checks),
            "not_passed": ", ".join(name for name, status in v.checks if status != "pass"),
        })
    return pd.DataFrame(rows, columns=["assumption", "status", "checks", "not_passed"])
