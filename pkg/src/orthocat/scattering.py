"""Transmission and reflection coefficients for compactly supported
potentials, the 2x2 S-matrix, and the two scattering-side routes to the
orthogonality exponent gamma(nu).

Conventions (Deift-Trubowitz): for incidence from the left the wave is
e^{ikx} + r1 e^{-ikx} on the left of the support and t e^{ikx} on the right;
for incidence from the right, e^{-ikx} + r2 e^{ikx} on the right and
t e^{-ikx} on the left.  The transmission coefficient is direction
independent; the matching below computes it from both sides and folds the
difference into the reported unitarity defect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Potential
from .odes import adaptive_ivp

__all__ = [
    "ScatteringData",
    "scattering_coefficients",
    "s_matrix",
    "gamma_scattering",
    "gamma_gkm",
]

_PI2 = math.pi**2


@dataclass(frozen=True)
class ScatteringData:
    k: float
    t: complex
    r1: complex
    r2: complex
    unitarity_defect: float

    @property
    def matrix(self) -> np.ndarray:
        """S-matrix [[t, r2], [r1, t]]."""
        return np.array([[self.t, self.r2], [self.r1, self.t]])


def _transfer_matrix(V: Potential, k: float, tol: float) -> np.ndarray:
    """Map (u, u') at -a to (u, u') at +a for -u'' + V u = k^2 u."""
    a = V.a

    def rhs(x, y):
        return (y[2], y[3], (V(x) - k * k) * y[0], (V(x) - k * k) * y[1])

    # columns: solution with u(-a)=1, u'(-a)=0 and with u(-a)=0, u'(-a)=1
    sol = adaptive_ivp(rhs, -a, a, [1.0, 0.0, 0.0, 1.0], rtol=tol, atol=tol)
    u1, u2, du1, du2 = sol.y[:, -1]
    return np.array([[u1, u2], [du1, du2]])


def scattering_coefficients(V: Potential, k: float, tol: float = 1e-12) -> ScatteringData:
    """Scattering data at wavenumber k > 0 by integrating across the support
    and matching to plane waves at +-a."""
    if k <= 0:
        raise ValueError("wavenumber must be positive")
    a = V.a
    M = _transfer_matrix(V, k, tol)
    e_p = complex(np.exp(1j * k * a))
    e_m = complex(np.exp(-1j * k * a))

    wave_p = np.array([e_p, 1j * k * e_p])        # e^{ikx} data at x = +a
    wave_m_at_a = np.array([e_m, -1j * k * e_m])  # e^{-ikx} data at x = +a
    in_left = M @ np.array([e_m, 1j * k * e_m])   # e^{ikx} propagated from -a
    refl_left = M @ np.array([e_p, -1j * k * e_p])

    # left incidence: in_left + r1 * refl_left = t * wave_p
    A = np.column_stack([refl_left, -wave_p])
    r1, t = np.linalg.solve(A, -in_left)

    # right incidence: t2 * M @ (e^{-ikx} at -a) = e^{-ikx} + r2 e^{ikx} at +a
    through = M @ np.array([e_p, -1j * k * e_p])
    B = np.column_stack([through, -wave_p])
    t2, r2 = np.linalg.solve(B, wave_m_at_a)

    defect = max(
        abs(abs(t) ** 2 + abs(r1) ** 2 - 1.0),
        abs(abs(t) ** 2 + abs(r2) ** 2 - 1.0),
        abs(t - t2),
    )
    return ScatteringData(k, complex(t), complex(r1), complex(r2), float(defect))


def s_matrix(V: Potential, nu: float, tol: float = 1e-12) -> np.ndarray:
    """S-matrix at energy nu (wavenumber sqrt(nu))."""
    return scattering_coefficients(V, math.sqrt(nu), tol).matrix


def gamma_scattering(V: Potential, nu: float, tol: float = 1e-12) -> float:
    """gamma(nu) = (1 - Re t(sqrt(nu))) / pi^2; nonnegative since |t| <= 1."""
    if nu <= 0:
        raise ValueError("energy must be positive")
    t = scattering_coefficients(V, math.sqrt(nu), tol).t
    g = (1.0 - t.real) / _PI2
    if g < -1e-10:
        raise RuntimeError(f"transmission coefficient above unit modulus: t = {t}")
    return max(g, 0.0)


def gamma_gkm(V: Potential, nu: float, tol: float = 1e-12) -> float:
    """gamma through the S-matrix trace, tr[(S-1)^*(S-1)] / (2 pi)^2; equal to
    the transmission form by unitarity."""
    if nu <= 0:
        raise ValueError("energy must be positive")
    S = s_matrix(V, nu, tol)
    E = S - np.eye(2)
    g = float(np.trace(E.conj().T @ E).real) / (4.0 * _PI2)
    return max(g, 0.0)
