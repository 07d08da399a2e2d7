"""Exact objects of the free Dirichlet problem -u'' = z u on [-L, L]:
spectra, Green function, commutator and boundary (delta) kernels, the
truncated resolvent and its Laplace-transform decomposition.

Everything here is closed form or one-dimensional quadrature; no potential
enters.  Kernels are evaluated in exponentially rescaled form so they remain
finite for complex energies far from the real axis even when L is large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .core import _gauss_rule

__all__ = [
    "NearSpectrumError",
    "FreeEigenpair",
    "free_eigenpair",
    "free_eigenvalue",
    "free_eigenvalues",
    "free_eigenfunction",
    "free_eigenfunction_matrix",
    "fermi_energy",
    "FermiContourPoint",
    "fermi_contour_point",
    "green_kernel",
    "commutator_kernel",
    "delta_term_kernel",
    "truncated_resolvent_direct",
    "TruncatedResolventParts",
    "truncated_resolvent_decomposed",
    "kappa_n",
    "kappa_tilde_n",
    "tau",
]


class NearSpectrumError(ValueError):
    """The requested energy is too close to a Dirichlet eigenvalue."""


def free_eigenvalue(j: int, L: float) -> float:
    """j-th Dirichlet eigenvalue (pi j / 2L)^2, j >= 1."""
    if j < 1:
        raise ValueError("eigenvalue index starts at 1")
    return (math.pi * j / (2.0 * L)) ** 2


@dataclass(frozen=True)
class FreeEigenpair:
    """Index, energy, and parity branch (even j -> sine, odd j -> cosine)."""

    j: int
    energy: float
    parity: str

    def eigenfunction(self, L: float, x):
        return free_eigenfunction(self.j, L, x)


def free_eigenpair(j: int, L: float) -> FreeEigenpair:
    return FreeEigenpair(j, free_eigenvalue(j, L), "even" if j % 2 == 0 else "odd")


def free_eigenvalues(L: float, jmax: int) -> np.ndarray:
    j = np.arange(1, jmax + 1)
    return (math.pi * j / (2.0 * L)) ** 2


def free_eigenfunction(j: int, L: float, x):
    """Normalized eigenfunction: sin(pi j x / 2L)/sqrt(L) for even j,
    cos(pi j x / 2L)/sqrt(L) for odd j."""
    x = np.asarray(x, dtype=float)
    arg = math.pi * j / (2.0 * L) * x
    out = (np.sin(arg) if j % 2 == 0 else np.cos(arg)) / math.sqrt(L)
    return out if out.ndim else float(out)


def free_eigenfunction_matrix(n: int, L: float, x) -> np.ndarray:
    """Rows j = 1..n of the eigenfunctions sampled at the points x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    j = np.arange(1, n + 1)
    arg = (math.pi / (2.0 * L)) * np.outer(j, x)
    out = np.where((j % 2 == 0)[:, None], np.sin(arg), np.cos(arg))
    return out / math.sqrt(L)


def fermi_energy(N: int, L: float) -> float:
    """Separating energy [pi (N + 1/2) / 2L]^2, halfway in wavenumber between
    the N-th and (N+1)-st eigenvalue."""
    return (math.pi * (N + 0.5) / (2.0 * L)) ** 2


@dataclass(frozen=True)
class FermiContourPoint:
    """Point z = (sqrt(nu) + i s)^2 on the parabola separating occupied from
    unoccupied spectrum, with the parametrization derivative dz/ds."""

    s: float
    z: complex
    dz_ds: complex


def fermi_contour_point(nu: float, s: float) -> FermiContourPoint:
    root = math.sqrt(nu) + 1j * s
    return FermiContourPoint(s, root * root, 2j * root)


def _sqrt_energy(z) -> complex:
    """Principal square root; on the contour this matches sqrt(nu) + i s, and
    every kernel below is an even function of the root, so the branch is
    inert."""
    return np.sqrt(np.asarray(z, dtype=complex))


def _scaled_sin(w):
    """sin(w) * exp(-|Im w|), overflow-free for any |Im w|."""
    wr, wi = np.real(w), np.imag(w)
    m = np.abs(wi)
    return (np.exp(1j * wr - (m + wi)) - np.exp(-1j * wr - (m - wi))) / 2j


def _scaled_cos(w):
    """cos(w) * exp(-|Im w|)."""
    wr, wi = np.real(w), np.imag(w)
    m = np.abs(wi)
    return (np.exp(1j * wr - (m + wi)) + np.exp(-1j * wr - (m - wi))) / 2.0


def _check_off_spectrum(rz: complex, L: float):
    # W(z) = sqrt(z) sin(2 L sqrt(z)) can only be small near the real axis.
    im = abs(np.imag(2.0 * L * rz))
    w_scaled = np.abs(_scaled_sin(2.0 * L * rz))
    if im < 1.0 and np.any(w_scaled * max(abs(rz), 1e-300) < 1e-14 * abs(rz)):
        raise NearSpectrumError(f"energy too close to the Dirichlet spectrum (|sin 2L sqrt(z)| ~ {w_scaled})")


def green_kernel(z, x, y, L: float):
    """Dirichlet Green function sin(sqrt(z)(min+L)) sin(sqrt(z)(max-L)) / W(z)
    with W(z) = sqrt(z) sin(2 L sqrt(z)); symmetric in (x, y)."""
    rz = complex(_sqrt_energy(z))
    _check_off_spectrum(rz, L)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    num = _scaled_sin(rz * (lo + L)) * _scaled_sin(rz * (hi - L))
    den = rz * _scaled_sin(2.0 * L * rz)
    # net exponent -|Im rz| |x - y| <= 0, restored after the scaled division
    expo = abs(np.imag(rz)) * ((lo + L) + (L - hi) - 2.0 * L)
    out = num / den * np.exp(expo)
    return out if out.ndim else complex(out)


def commutator_kernel(z, x, y, L: float):
    """Kernel of the position-gradient commutator correction to the squared
    resolvent; two-branch closed form, symmetric in (x, y)."""
    rz = complex(_sqrt_energy(z))
    _check_off_spectrum(rz, L)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    term = hi * _scaled_cos(rz * (hi - L)) * _scaled_sin(rz * (lo + L)) + lo * _scaled_sin(
        rz * (hi - L)
    ) * _scaled_cos(rz * (lo + L))
    den = 2.0 * _scaled_sin(2.0 * L * rz)
    expo = abs(np.imag(rz)) * ((lo + L) + (L - hi) - 2.0 * L)
    out = term / den * np.exp(expo)
    return out if out.ndim else complex(out)


def delta_term_kernel(z, x, y, L: float):
    """Rank-two boundary kernel
    (L/4) [sin(sqrt(z) x) sin(sqrt(z) y) / sin^2(sqrt(z) L)
           + cos(sqrt(z) x) cos(sqrt(z) y) / cos^2(sqrt(z) L)].
    """
    rz = complex(_sqrt_energy(z))
    im = abs(np.imag(L * rz))
    sL = _scaled_sin(L * rz)
    cL = _scaled_cos(L * rz)
    if im < 1.0 and min(abs(sL), abs(cL)) < 1e-14:
        raise NearSpectrumError("sin(L sqrt(z)) or cos(L sqrt(z)) vanishes")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    aim = abs(np.imag(rz))
    expo = aim * (np.abs(x) + np.abs(y) - 2.0 * L)
    p_s = _scaled_sin(rz * x) * _scaled_sin(rz * y)
    p_c = _scaled_cos(rz * x) * _scaled_cos(rz * y)
    out = 0.25 * L * (p_s / sL**2 + p_c / cL**2) * np.exp(expo)
    return out if out.ndim else complex(out)


def truncated_resolvent_direct(n: int, z, x, y, L: float):
    """Spectral sum over the first n modes, sum_j phi_j(x) phi_j(y)/(z - lambda_j);
    broadcasts (x, y) elementwise like the kernel routines."""
    xb, yb = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = xb.shape
    if n == 0:
        out = np.zeros(shape, dtype=complex)
        return out if shape else 0j
    lam = free_eigenvalues(L, n)
    px = free_eigenfunction_matrix(n, L, xb.ravel())
    py = free_eigenfunction_matrix(n, L, yb.ravel())
    vals = np.einsum("j,jp,jp->p", 1.0 / (complex(z) - lam), px, py)
    return vals.reshape(shape) if shape else complex(vals[0])


def _kappa_integrand_factory(zeta: float, M: float, tilde: bool):
    # both forms use only decaying exponentials, so they stay finite for any v
    if tilde:
        def f(v):
            return (math.exp(-(zeta - M + 0.5) * v) + math.exp(-(zeta + M + 0.5) * v)) / (
                1.0 + math.exp(-v)
            )
    else:
        def f(v):
            if v < 1e-300:
                return 2.0 * M
            return (
                math.exp(-(zeta - M + 0.5) * v)
                * math.expm1(-2.0 * M * v)
                / math.expm1(-v)
            )
    return f


def _kappa_integral(zeta: float, M: float, tilde: bool = False) -> float:
    val, _err = quad(
        _kappa_integrand_factory(zeta, M, tilde), 0.0, np.inf,
        epsabs=1e-13, epsrel=1e-12, limit=300,
    )
    return val


def kappa_n(N: int) -> float:
    """Laplace constant integral_0^inf e^{-(N+1/2)t} sinh((N+1/2)t)/sinh(t/2) dt;
    grows like log(4N+3) with a remainder in [0, 2]."""
    if N < 1:
        raise ValueError("index starts at 1")
    M = N + 0.5
    return _kappa_integral(M, M, tilde=False)


def kappa_tilde_n(N: int) -> float:
    """Companion constant with cosh ratios; bounded by 4 for all N."""
    if N < 1:
        raise ValueError("index starts at 1")
    M = N + 0.5
    return _kappa_integral(M, M, tilde=True)


def _sine_ratio(u, M: float):
    """sin(M u)/sin(u/2), analytic on |u| < 2 pi (value 2M at u = 0)."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 1e-150
    safe = np.where(small, 1.0, u)
    out = np.sin(M * safe) / np.sin(0.5 * safe)
    return np.where(small, 2.0 * M, out)


def _cosine_ratio(u, M: float, sin_Mpi: float):
    """cos(M u)/cos(u/2) through its sine form around u = pi, which stays
    well-conditioned at the removable point u = pi (M half-integer)."""
    d = np.asarray(u, dtype=float) - math.pi
    small = np.abs(d) < 1e-150
    safe = np.where(small, 1.0, d)
    out = sin_Mpi * np.sin(M * safe) / np.sin(0.5 * safe)
    return np.where(small, sin_Mpi * 2.0 * M, out)


def _oscillatory_panel_integral(f, A: float, max_freq: float, nodes_per_panel: int = 12):
    """Oriented integral of f over [0, A] on panels short enough that the
    fastest oscillation covers at most half a period per panel."""
    if A == 0.0:
        return 0.0
    width = math.pi / (2.0 * max(max_freq, 1.0))
    n_panels = max(1, int(math.ceil(abs(A) / width)))
    t, wt = _gauss_rule(nodes_per_panel)
    edges = np.linspace(0.0, A, n_panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        u = 0.5 * (lo + hi) + half * t
        total += half * np.dot(wt, f(u))
    return total


@dataclass(frozen=True)
class TruncatedResolventParts:
    """Pieces of the Laplace decomposition of the truncated resolvent kernel at
    real energy above the retained modes."""

    kappa: float
    kappa_tilde: float
    s0: float
    s0_tilde: float
    s1: float
    s1_tilde: float
    value: float


def truncated_resolvent_decomposed(n: int, z: float, x: float, y: float, L: float) -> TruncatedResolventParts:
    """Closed-form decomposition of the truncated resolvent kernel: constants
    from Laplace integrals times plane-wave kernels, minus finite oscillatory
    corrections.  Requires real z with sqrt(z) > pi n / 2L."""
    z = float(z)
    if not (z > 0 and math.sqrt(z) > math.pi * n / (2.0 * L)):
        raise ValueError("decomposition needs real z with sqrt(z) > pi n / 2L")
    rz = math.sqrt(z)
    zeta = 2.0 * L * rz / math.pi
    M = n + 0.5
    sin_Mpi = math.sin(M * math.pi)

    kappa = _kappa_integral(zeta, M, tilde=False)
    kappa_t = _kappa_integral(zeta, M, tilde=True)
    s0 = math.cos(rz * (x - y)) / (2.0 * math.pi * rz)
    s0_t = math.cos(rz * (x + y)) / (2.0 * math.pi * rz)

    a_minus = math.pi * (x - y) / (2.0 * L)
    a_plus = math.pi * (x + y) / (2.0 * L)
    max_freq = zeta + M

    def f_minus(u):
        return np.sin(zeta * (u - a_minus)) * _sine_ratio(u, M)

    def f_plus(u):
        return np.sin(zeta * (u - a_plus)) * _cosine_ratio(u, M, sin_Mpi)

    s1 = _oscillatory_panel_integral(f_minus, a_minus, max_freq) / (2.0 * math.pi * rz)
    s1_t = _oscillatory_panel_integral(f_plus, a_plus, max_freq) / (2.0 * math.pi * rz)

    sign = -1.0 if n % 2 else 1.0
    value = kappa * s0 - s1 - sign * (kappa_t * s0_t - s1_t)
    return TruncatedResolventParts(kappa, kappa_t, s0, s0_t, s1, s1_t, value)


def tau(s):
    """Unimodular factor (cosh s - i sinh s)/(cosh s + i sinh s); equals 1 at
    s = 0 and tends to -i as s -> +inf."""
    s_arr = np.asarray(s, dtype=float)
    th = np.tanh(s_arr)
    out = (1.0 - 1j * th) / (1.0 + 1j * th)
    return np.asarray(out) if s_arr.ndim else complex(out)
