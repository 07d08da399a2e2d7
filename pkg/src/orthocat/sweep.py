"""Configuration-driven thermodynamic-limit sweeps: per-N Anderson metrics at
fixed density, a least-squares slope against log N, and machine-readable CSV
and JSON outputs.

Per-N computations are pure functions of the configuration, so rows can be
distributed over a process pool; collection is keyed by N and the output
order is fixed regardless of scheduling.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    ConfigurationError,
    Potential,
    build_grid,
    gaussian_truncated,
    square_well,
    table_potential,
)
from .metrics import AndersonResult, anderson_result
from .operators import gamma_matrix, smallness_report
from .scattering import gamma_gkm, gamma_scattering

__all__ = [
    "SweepConfig",
    "SweepRow",
    "SweepResult",
    "potential_from_spec",
    "load_config",
    "config_digest",
    "run_sweep",
    "write_csv",
    "write_json",
    "CSV_HEADER",
]

CSV_HEADER = "N,L,I,lnD,defect_norm,M,status"

_WORKERS_ENV = "ORTHOCAT_WORKERS"


@dataclass(frozen=True)
class SweepConfig:
    potential: dict
    rho: float
    n_list: tuple
    nodes_per_wavelength: int = 16
    nodes_per_panel: int = 12
    eigen_tol: float = 1e-10
    fit_fraction: float = 0.5
    workers: int = 1
    csv_path: str | None = None
    json_path: str | None = None

    def __post_init__(self):
        if self.rho <= 0:
            raise ConfigurationError("rho must be positive")
        if len(self.n_list) == 0 or any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ConfigurationError("N list must be non-empty and strictly increasing")
        if not 0.0 < self.eigen_tol < 1.0:
            raise ConfigurationError("tolerances must lie in (0, 1)")
        if not 0.0 < self.fit_fraction <= 1.0:
            raise ConfigurationError("fit fraction must lie in (0, 1]")

    @property
    def nu(self) -> float:
        return (math.pi * self.rho) ** 2


def potential_from_spec(spec: dict) -> Potential:
    """Build a potential from a flat key-value mapping (config file or CLI)."""
    family = spec.get("family")
    try:
        if family == "square_well":
            return square_well(float(spec["v0"]), float(spec["a"]))
        if family == "gaussian_truncated":
            return gaussian_truncated(float(spec["v0"]), float(spec["sigma"]), float(spec["a"]))
        if family == "table":
            xs = [float(t) for t in str(spec["abscissae"]).split(",")]
            vals = [float(t) for t in str(spec["values"]).split(",")]
            return table_potential(xs, vals)
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"bad potential spec {spec}: {exc}") from exc
    raise ConfigurationError(f"unknown potential family {family!r}")


def load_config(path: str) -> SweepConfig:
    """Parse a sectioned key-value config file ([potential], [sweep], [grid],
    [tolerances], [output])."""
    import configparser

    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigurationError(f"config file not found: {path}")
    if "potential" not in parser or "sweep" not in parser:
        raise ConfigurationError("config needs [potential] and [sweep] sections")

    pot = dict(parser["potential"])
    sweep = parser["sweep"]
    grid = parser["grid"] if "grid" in parser else {}
    tols = parser["tolerances"] if "tolerances" in parser else {}
    out = parser["output"] if "output" in parser else {}
    try:
        n_list = tuple(int(t) for t in sweep["n_list"].split(","))
        cfg = SweepConfig(
            potential=pot,
            rho=float(sweep["rho"]),
            n_list=n_list,
            nodes_per_wavelength=int(grid.get("nodes_per_wavelength", 16)),
            nodes_per_panel=int(grid.get("nodes_per_panel", 12)),
            eigen_tol=float(tols.get("eigen_tol", 1e-10)),
            fit_fraction=float(sweep.get("fit_fraction", 0.5)),
            workers=int(sweep.get("workers", 1)),
            csv_path=out.get("csv"),
            json_path=out.get("json"),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"malformed config {path}: {exc}") from exc
    potential_from_spec(cfg.potential)  # validate eagerly
    return cfg


def config_digest(config: SweepConfig) -> str:
    """Stable hash of the resolved configuration for output stamping."""
    payload = {
        "potential": {k: str(v) for k, v in sorted(config.potential.items())},
        "rho": config.rho,
        "n_list": list(config.n_list),
        "nodes_per_wavelength": config.nodes_per_wavelength,
        "nodes_per_panel": config.nodes_per_panel,
        "eigen_tol": config.eigen_tol,
        "fit_fraction": config.fit_fraction,
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class SweepRow:
    n: int
    L: float
    anderson: float
    log_transition: float
    defect: float
    m: int
    status: str


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    gamma_fit: float
    intercept: float
    gamma_scattering: float
    gamma_matrix: float
    gamma_gkm: float
    gamma_matrix_convergence: float
    smallness: dict
    digest: str
    grid_params: dict
    residuals: tuple
    fit_window: tuple


def _run_row(config: SweepConfig, n: int) -> SweepRow:
    V = potential_from_spec(config.potential)
    L = (n + 0.5) / (2.0 * config.rho)
    grid = build_grid(
        L,
        math.sqrt(config.nu),
        support=(-V.a, V.a),
        nodes_per_wavelength=config.nodes_per_wavelength,
        nodes_per_panel=config.nodes_per_panel,
    )
    res: AndersonResult = anderson_result(n, V, L, grid, tol=config.eigen_tol)
    return SweepRow(
        n, L, res.anderson_integral, res.log_transition, res.defect_norm, res.m, "ok"
    )


def _safe_row(config: SweepConfig, n: int) -> SweepRow:
    try:
        return _run_row(config, n)
    except Exception:
        L = (n + 0.5) / (2.0 * config.rho)
        return SweepRow(n, L, math.nan, math.nan, math.nan, -1, "failed")


def run_sweep(config: SweepConfig) -> SweepResult:
    """Execute the sweep, fit the Anderson integral against log N over the
    configured upper window, and attach the three analytic gamma values."""
    workers = int(os.environ.get(_WORKERS_ENV, config.workers))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {n: pool.submit(_safe_row, config, n) for n in config.n_list}
            rows = [futures[n].result() for n in config.n_list]
    else:
        rows = [_safe_row(config, n) for n in config.n_list]

    good = [r for r in rows if r.status == "ok"]
    if len(good) < 3:
        raise RuntimeError(f"fit needs at least 3 successful rows, got {len(good)}")
    n_window = max(3, int(math.ceil(config.fit_fraction * len(good))))
    window = good[-n_window:]
    logs = np.log([r.n for r in window])
    vals = np.array([r.anderson for r in window])
    slope, intercept = np.polyfit(logs, vals, 1)

    V = potential_from_spec(config.potential)
    nu = config.nu
    g_scatter = gamma_scattering(V, nu)
    g_gkm = gamma_gkm(V, nu)

    def grid_for(npw):
        a = V.a
        L_ref = max(2.0 * a, (config.n_list[0] + 0.5) / (2.0 * config.rho))
        return build_grid(L_ref, math.sqrt(nu), support=(-a, a),
                          nodes_per_wavelength=npw,
                          nodes_per_panel=config.nodes_per_panel)

    g_matrix = gamma_matrix(nu, V, grid_for(config.nodes_per_wavelength))
    g_matrix_fine = gamma_matrix(nu, V, grid_for(2 * config.nodes_per_wavelength))
    residuals = tuple(r.anderson - g_scatter * math.log(r.n) for r in good)

    return SweepResult(
        rows=tuple(rows),
        gamma_fit=float(slope),
        intercept=float(intercept),
        gamma_scattering=g_scatter,
        gamma_matrix=g_matrix,
        gamma_gkm=g_gkm,
        gamma_matrix_convergence=abs(g_matrix - g_matrix_fine),
        smallness=smallness_report(V, nu).as_dict(),
        digest=config_digest(config),
        grid_params={
            "nodes_per_wavelength": config.nodes_per_wavelength,
            "nodes_per_panel": config.nodes_per_panel,
        },
        residuals=residuals,
        fit_window=tuple(r.n for r in window),
    )


def write_csv(result: SweepResult, path: str):
    """Rows ordered by N under the fixed header; floats as shortest
    round-trip decimals so reruns are byte-identical."""
    lines = [CSV_HEADER]
    for r in sorted(result.rows, key=lambda r: r.n):
        lines.append(
            f"{r.n},{r.L!r},{r.anderson!r},{r.log_transition!r},{r.defect!r},{r.m},{r.status}"
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(result: SweepResult, path: str):
    payload = summary_dict(result)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def summary_dict(result: SweepResult) -> dict:
    flagged = result.gamma_matrix_convergence > 0 and (
        abs(result.gamma_matrix - result.gamma_scattering)
        > 10.0 * result.gamma_matrix_convergence
    )
    return {
        "config_hash": result.digest,
        "grid": result.grid_params,
        "smallness": result.smallness,
        "gamma_fit": result.gamma_fit,
        "intercept": result.intercept,
        "gamma_scattering": result.gamma_scattering,
        "gamma_matrix": result.gamma_matrix,
        "gamma_gkm": result.gamma_gkm,
        "gamma_route_discrepancy": {
            "matrix_vs_scattering": abs(result.gamma_matrix - result.gamma_scattering),
            "gkm_vs_scattering": abs(result.gamma_gkm - result.gamma_scattering),
            "matrix_route_flagged": bool(flagged),
        },
        "fit_window": list(result.fit_window),
        "residuals_vs_gamma_scattering": list(result.residuals),
        "rows": [
            {
                "N": r.n,
                "L": r.L,
                "I": r.anderson,
                "lnD": r.log_transition,
                "defect_norm": r.defect,
                "M": r.m,
                "status": r.status,
            }
            for r in result.rows
        ],
    }
