"""Shared domain objects: compactly supported potentials, composite quadrature
grids, thermodynamic system configuration, and basic integral utilities.

All quantities use natural units (hbar = 2m = 1), so the kinetic operator is
-d^2/dx^2, energies are squared wavenumbers, and lengths are inverse
wavenumbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "ConfigurationError",
    "Potential",
    "square_well",
    "gaussian_truncated",
    "table_potential",
    "scale_potential",
    "PotentialNorms",
    "potential_norms",
    "Grid",
    "build_grid",
    "support_quadrature",
    "inner_product",
    "v_transform",
    "SystemConfig",
]


class ConfigurationError(ValueError):
    """Requested parameters violate a documented precondition."""


_FAMILIES = ("square_well", "gaussian_truncated", "table")


@dataclass(frozen=True)
class Potential:
    """Real-valued potential that vanishes identically outside [-a, a].

    ``family`` selects the functional form, ``params`` holds the
    family-specific parameters as a flat tuple:

    * ``square_well``:         params = (v0,), V(x) = v0 on the support
    * ``gaussian_truncated``:  params = (v0, sigma), V(x) = v0 exp(-x^2/2 sigma^2)
    * ``table``:               params = (xs, values), linear interpolation

    Instances are immutable and safe to share between parallel workers.
    """

    family: str
    a: float
    params: tuple

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ConfigurationError(f"unknown potential family {self.family!r}")
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ConfigurationError("support half-width must be positive and finite")

    def __call__(self, x):
        """Evaluate V(x); exact zero for |x| > a."""
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) <= self.a
        if self.family == "square_well":
            (v0,) = self.params
            values = np.full_like(x, v0)
        elif self.family == "gaussian_truncated":
            v0, sigma = self.params
            values = v0 * np.exp(-0.5 * (x / sigma) ** 2)
        else:
            xs, vals = self.params
            values = np.interp(x, xs, vals, left=0.0, right=0.0)
        out = np.where(inside, values, 0.0)
        return out if out.ndim else float(out)

    @property
    def sup_abs(self) -> float:
        """Exact sup |V|, available in closed form for every family."""
        if self.family == "square_well":
            return abs(self.params[0])
        if self.family == "gaussian_truncated":
            return abs(self.params[0])
        return float(np.max(np.abs(self.params[1])))

    def knots(self) -> np.ndarray:
        """Interior abscissae where V is not smooth (table breakpoints)."""
        if self.family == "table":
            xs = np.asarray(self.params[0])
            return xs[(xs > -self.a) & (xs < self.a)]
        return np.empty(0)


def square_well(v0: float, a: float) -> Potential:
    """Constant well/barrier of height v0 on [-a, a]."""
    return Potential("square_well", float(a), (float(v0),))


def gaussian_truncated(v0: float, sigma: float, a: float) -> Potential:
    """Gaussian bump v0 exp(-x^2 / 2 sigma^2) cut off at |x| = a."""
    if sigma <= 0:
        raise ConfigurationError("sigma must be positive")
    return Potential("gaussian_truncated", float(a), (float(v0), float(sigma)))


def table_potential(xs, values) -> Potential:
    """Piecewise-linear potential through the given (x, V) samples."""
    xs = np.asarray(xs, dtype=float)
    values = np.asarray(values, dtype=float)
    if xs.ndim != 1 or xs.shape != values.shape or xs.size < 2:
        raise ConfigurationError("table potential needs matching 1-d abscissae/values")
    if np.any(np.diff(xs) <= 0):
        raise ConfigurationError("table abscissae must be strictly increasing")
    a = max(abs(xs[0]), abs(xs[-1]))
    return Potential("table", float(a), (tuple(xs), tuple(values)))


def scale_potential(V: Potential, c: float) -> Potential:
    """The potential c*V with the same support."""
    if V.family == "square_well":
        return square_well(c * V.params[0], V.a)
    if V.family == "gaussian_truncated":
        return gaussian_truncated(c * V.params[0], V.params[1], V.a)
    xs, vals = V.params
    return table_potential(xs, [c * v for v in vals])


@dataclass(frozen=True)
class Grid:
    """Composite Gauss-Legendre quadrature on [-L, L].

    ``nodes`` are strictly increasing and interior to their panels, so no node
    coincides with a panel boundary (in particular not with the box endpoints
    or the support edges of a potential).
    """

    nodes: np.ndarray
    weights: np.ndarray
    panel_boundaries: np.ndarray

    def __post_init__(self):
        for arr in (self.nodes, self.weights, self.panel_boundaries):
            arr.flags.writeable = False
        if np.any(np.diff(self.nodes) <= 0):
            raise ConfigurationError("grid nodes must be strictly increasing")
        if np.any(self.weights <= 0):
            raise ConfigurationError("grid weights must be positive")

    @property
    def half_length(self) -> float:
        return float(self.panel_boundaries[-1])

    @property
    def size(self) -> int:
        return self.nodes.size

    def integrate(self, values) -> complex:
        return np.dot(self.weights, values)


@lru_cache(maxsize=8)
def _gauss_rule(n: int):
    return np.polynomial.legendre.leggauss(n)


def _panelize(breaks, widths, nodes_per_panel):
    """Fill each region between consecutive breakpoints with Gauss panels."""
    t, wt = _gauss_rule(nodes_per_panel)
    nodes, weights, bounds = [], [], [breaks[0]]
    for lo, hi, width in zip(breaks[:-1], breaks[1:], widths):
        n_panels = max(1, int(math.ceil((hi - lo) / width - 1e-12)))
        edges = np.linspace(lo, hi, n_panels + 1)
        for p_lo, p_hi in zip(edges[:-1], edges[1:]):
            half = 0.5 * (p_hi - p_lo)
            nodes.append(0.5 * (p_lo + p_hi) + half * t)
            weights.append(half * wt)
            bounds.append(p_hi)
    return (
        np.concatenate(nodes),
        np.concatenate(weights),
        np.asarray(bounds, dtype=float),
    )


def build_grid(
    L: float,
    wavenumber_hint: float,
    support=None,
    nodes_per_wavelength: int = 16,
    nodes_per_panel: int = 12,
) -> Grid:
    """Composite Gauss-Legendre grid on [-L, L] resolving oscillations at the
    given wavenumber.

    Panel boundaries always include the support endpoints and the origin.  On
    the support the panel width is half of one nodes_per_wavelength-th of the
    hint wavelength: kernels restricted there carry |x-y| kinks and potential
    jumps, and the extra subdivision keeps Nystrom norms stable to 1e-6 under
    density doubling.  Outside, where every integrand is smooth trigonometry,
    panels are nodes_per_panel times the base width, which still places
    nodes_per_wavelength quadrature nodes on each oscillation.
    """
    if L <= 0:
        raise ConfigurationError("box half-length must be positive")
    if wavenumber_hint <= 0:
        raise ConfigurationError("wavenumber hint must be positive")
    if nodes_per_wavelength < 8:
        raise ConfigurationError("need at least 8 nodes per wavelength")
    if support is None:
        support = (-L, L)
    lo, hi = float(support[0]), float(support[1])
    if lo < -L - 1e-12 or hi > L + 1e-12 or lo >= hi:
        raise ConfigurationError(f"support [{lo}, {hi}] not inside [-{L}, {L}]")
    lo, hi = max(lo, -L), min(hi, L)

    wavelength = 2.0 * math.pi / wavenumber_hint
    fine = 0.5 * wavelength / nodes_per_wavelength
    coarse = nodes_per_panel * wavelength / nodes_per_wavelength

    breaks = np.array(sorted({-L, lo, 0.0, hi, L}))
    breaks = breaks[np.r_[True, np.diff(breaks) > 1e-12 * max(1.0, L)]]
    widths = [
        fine if (b0 >= lo - 1e-12 and b1 <= hi + 1e-12) else coarse
        for b0, b1 in zip(breaks[:-1], breaks[1:])
    ]
    nodes, weights, bounds = _panelize(breaks, widths, nodes_per_panel)
    return Grid(nodes, weights, bounds)


def support_quadrature(V: Potential, nodes_per_panel: int = 12, panels: int = 16) -> Grid:
    """Quadrature covering exactly the support of V, with panel boundaries at
    the table breakpoints so piecewise-smooth families integrate cleanly."""
    breaks = np.unique(np.concatenate([[-V.a, 0.0, V.a], V.knots()]))
    width = 2.0 * V.a / panels
    nodes, weights, bounds = _panelize(breaks, [width] * (len(breaks) - 1), nodes_per_panel)
    return Grid(nodes, weights, bounds)


@dataclass(frozen=True)
class PotentialNorms:
    """Integral and sup norms of a potential used by the operator bounds."""

    l1: float        # ||V||_1
    linf: float      # ||V||_inf
    x1_l1: float     # ||X V||_1
    x2_l1: float     # ||X^2 V||_1
    l1_plus: float   # ||max(V, 0)||_1
    linf_minus: float  # ||min(V, 0)||_inf


def potential_norms(V: Potential, grid: Grid | None = None) -> PotentialNorms:
    """Quadrature norms of V; sup norms combine dense sampling with the
    family's exact maximum."""
    if grid is None:
        grid = support_quadrature(V)
    x, w = grid.nodes, grid.weights
    v = V(x)
    av = np.abs(v)
    l1 = float(w @ av)
    x1 = float(w @ (np.abs(x) * av))
    x2 = float(w @ (x * x * av))
    l1p = float(w @ np.clip(v, 0.0, None))

    xs = np.linspace(-V.a, V.a, 4 * max(grid.size, 64) + 1)
    vs = V(xs)
    linf = max(float(np.max(np.abs(vs))), V.sup_abs)
    linf_minus = float(np.max(-np.clip(vs, None, 0.0)))
    if V.family == "square_well" and V.params[0] < 0:
        linf_minus = abs(V.params[0])
    elif V.family == "gaussian_truncated" and V.params[0] < 0:
        linf_minus = abs(V.params[0])
    elif V.family == "table":
        linf_minus = max(linf_minus, float(np.max(-np.clip(V.params[1], None, 0.0))))
    return PotentialNorms(l1, linf, x1, x2, l1p, linf_minus)


def inner_product(f, g, grid: Grid):
    """L^2 scalar product sum(w * conj(f) * g); anti-linear in the first slot."""
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != (grid.size,) or g.shape != (grid.size,):
        raise ValueError(
            f"sample length mismatch: f {f.shape}, g {g.shape}, grid {grid.size}"
        )
    return np.sum(grid.weights * np.conj(f) * g)


def v_transform(V: Potential, L: float, s: float, grid: Grid) -> float:
    """Exponentially weighted absolute integral of V over [-L, L],
    integral of |V(x)| e^{s |x|} dx."""
    if s < 0:
        raise ValueError("the transform is defined for s >= 0")
    x, w = grid.nodes, grid.weights
    mask = np.abs(x) <= L
    return float(np.sum(w[mask] * np.abs(V(x[mask])) * np.exp(s * np.abs(x[mask]))))


@dataclass(frozen=True)
class SystemConfig:
    """Thermodynamic-limit bookkeeping at fixed density.

    The box half-length is tied to the particle count through
    L = (N + 1/2) / (2 rho), which keeps the Fermi energy nu = pi^2 rho^2
    constant along a sweep.
    """

    rho: float
    N: int

    def __post_init__(self):
        if self.rho <= 0:
            raise ConfigurationError("density must be positive")
        if self.N < 1:
            raise ConfigurationError("particle count must be at least 1")

    @property
    def L(self) -> float:
        return (self.N + 0.5) / (2.0 * self.rho)

    @property
    def nu(self) -> float:
        return (math.pi * self.rho) ** 2
