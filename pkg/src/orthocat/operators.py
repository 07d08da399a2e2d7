"""Nystrom discretization of the sandwiched operator calculus: the
Birman-Schwinger operator, its resolvent inverse, the 2x2 reduction that
yields the matrix route to gamma(nu), the contour representation of the
Anderson integral, and a numerical audit of the operator-norm inequalities.

All integral operators are sandwiched between sqrt(|V|) factors, so every
matrix lives on the quadrature nodes inside the support of V.  Matrices are
stored unweighted (kernel values times the sqrt(|V|) factors); composition
with the quadrature is explicit.  Operator norms in L^2 are spectral norms of
the symmetrized matrix D_sqrt(w) K D_sqrt(w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Grid, Potential, potential_norms
from .free import (
    fermi_contour_point,
    fermi_energy,
    free_eigenfunction_matrix,
    free_eigenvalues,
    green_kernel,
)
from . import metrics as _metrics
from .core import _gauss_rule

__all__ = [
    "NystromOperator",
    "SignOperator",
    "sign_operator",
    "SmallnessReport",
    "smallness_report",
    "birman_schwinger",
    "OmegaOperator",
    "omega_operator",
    "PhiHat",
    "phi_hat",
    "gamma_matrix",
    "contour_anderson",
    "AuditItem",
    "bounds_audit",
]


@dataclass(frozen=True)
class NystromOperator:
    """Dense sandwiched integral operator sqrt(|V|) K sqrt(|V|) on the
    support nodes; ``kernel`` excludes quadrature weights."""

    nodes: np.ndarray
    weights: np.ndarray
    kernel: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        """Collocation matrix kernel * w_j, the discrete action on samples."""
        return self.kernel * self.weights[None, :]

    @property
    def symmetrized(self) -> np.ndarray:
        sw = np.sqrt(self.weights)
        return sw[:, None] * self.kernel * sw[None, :]

    def norm(self) -> float:
        """L^2 operator norm (largest singular value of the symmetrization)."""
        return float(np.linalg.norm(self.symmetrized, 2))

    def apply(self, f: np.ndarray) -> np.ndarray:
        return self.matrix @ f


@dataclass(frozen=True)
class SignOperator:
    """Diagonal unitary J = sign(V) on the support nodes, with sign(0) := +1."""

    diagonal: np.ndarray


def _support(V: Potential, grid: Grid):
    mask = np.abs(grid.nodes) <= V.a
    return grid.nodes[mask], grid.weights[mask]


def sign_operator(V: Potential, nodes: np.ndarray) -> SignOperator:
    return SignOperator(np.where(V(nodes) < 0.0, -1.0, 1.0))


@dataclass(frozen=True)
class SmallnessReport:
    """Dimensionless coupling measures controlling the Neumann-series
    invertibility guarantees; each must be < 1 for the associated bound."""

    q_omega: float   # 4 ||V||_1 / sqrt(nu)
    q_inf: float     # (3/2) ||V||_1 / sqrt(nu)
    q_phi: float     # (1/2) ||V||_1 / sqrt(nu)
    z_cond: float    # ||V||_1 C_phi / sqrt(nu)

    @property
    def c_omega(self) -> float:
        return 1.0 / (1.0 - self.q_omega) if self.q_omega < 1.0 else math.inf

    @property
    def all_satisfied(self) -> bool:
        return max(self.q_omega, self.q_inf, self.q_phi, self.z_cond) < 1.0

    def as_dict(self) -> dict:
        return {
            "q_omega": self.q_omega,
            "q_inf": self.q_inf,
            "q_phi": self.q_phi,
            "z_cond": self.z_cond,
        }


def smallness_report(V: Potential, nu: float) -> SmallnessReport:
    l1 = potential_norms(V).l1
    root = math.sqrt(nu)
    q_phi = 0.5 * l1 / root
    c_phi = 1.0 / (1.0 - q_phi) if q_phi < 1.0 else math.inf
    return SmallnessReport(4.0 * l1 / root, 1.5 * l1 / root, q_phi, l1 * c_phi / root)


def birman_schwinger(z, V: Potential, grid: Grid, L: float | None = None) -> NystromOperator:
    """sqrt(|V|) R(z) sqrt(|V|) on the support nodes."""
    if L is None:
        L = grid.half_length
    x, w = _support(V, grid)
    sq = np.sqrt(np.abs(V(x)))
    kern = green_kernel(z, x[:, None], x[None, :], L)
    return NystromOperator(x, w, sq[:, None] * kern * sq[None, :])


@dataclass(frozen=True)
class OmegaOperator:
    """Inverse (1 - sqrt(|V|) R(z) sqrt(|V|) J)^{-1} with conditioning and
    smallness diagnostics attached."""

    nodes: np.ndarray
    weights: np.ndarray
    matrix: np.ndarray
    sign: np.ndarray
    condition: float
    norm: float
    smallness: SmallnessReport


def omega_operator(z, V: Potential, grid: Grid, L: float | None = None,
                   nu: float | None = None) -> OmegaOperator:
    """Resolvent inverse of the Birman-Schwinger operator at z.

    When the coupling measure q_omega is below one the returned norm is
    checked against its Neumann bound 1/(1 - q_omega); a violation would
    indicate a corrupted discretization rather than an unlucky potential.
    """
    bs = birman_schwinger(z, V, grid, L)
    J = sign_operator(V, bs.nodes).diagonal
    system = np.eye(bs.nodes.size, dtype=complex) - bs.matrix * J[None, :]
    cond = float(np.linalg.cond(system))
    try:
        omega = np.linalg.solve(system, np.eye(bs.nodes.size, dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(
            f"Birman-Schwinger system singular at z = {z}; "
            "z may coincide with a perturbed eigenvalue"
        ) from exc
    sw = np.sqrt(bs.weights)
    norm = float(np.linalg.norm(sw[:, None] * omega / sw[None, :], 2))
    if nu is None:
        nu = abs(complex(z))
    rep = smallness_report(V, nu)
    if rep.q_omega < 1.0 and norm > rep.c_omega * (1.0 + 1e-8):
        raise RuntimeError(
            f"Neumann bound violated: |Omega| = {norm} > {rep.c_omega}"
        )
    return OmegaOperator(bs.nodes, bs.weights, omega, J, cond, norm, rep)


def _omega_vectors(V: Potential, nu: float, x: np.ndarray):
    """Trigonometric vectors sqrt(|V|) sin(sqrt(nu) x), sqrt(|V|) cos(sqrt(nu) x)."""
    sq = np.sqrt(np.abs(V(x)))
    root = math.sqrt(nu)
    return sq * np.sin(root * x), sq * np.cos(root * x)


@dataclass(frozen=True)
class PhiHat:
    """2x2 reduction of the whole-line comparison operator onto the sine and
    cosine directions; self-adjoint, and the only input to the matrix route
    for gamma."""

    nu: float
    matrix: np.ndarray
    condition: float
    smallness: SmallnessReport


def phi_hat(nu: float, V: Potential, grid: Grid) -> PhiHat:
    """Assemble the 2x2 matrix of weighted inner products
    (omega_a, J Phi omega_b) where Phi inverts 1 - sqrt(|V|) K sqrt(|V|) J
    and K has the kernel sin(sqrt(nu)|x-y|) / (2 sqrt(nu)).

    Everything lives on the support of V, so the result does not depend on
    the box size.
    """
    if nu <= 0:
        raise ValueError("energy must be positive")
    x, w = _support(V, grid)
    root = math.sqrt(nu)
    sq = np.sqrt(np.abs(V(x)))
    kern = np.sin(root * np.abs(x[:, None] - x[None, :])) / (2.0 * root)
    k_v = sq[:, None] * kern * sq[None, :]
    J = sign_operator(V, x).diagonal
    system = np.eye(x.size) - k_v * (w * J)[None, :]
    cond = float(np.linalg.cond(system))
    om_s, om_c = _omega_vectors(V, nu, x)
    try:
        sols = np.linalg.solve(system, np.column_stack([om_s, om_c]))
    except np.linalg.LinAlgError as exc:
        raise RuntimeError("comparison operator not invertible at this energy") from exc
    wj = w * J
    mat = np.column_stack([om_s, om_c]).T @ (wj[:, None] * sols)
    asym = np.abs(mat - mat.T).max()
    if asym > 1e-8 * max(1.0, np.abs(mat).max()):
        raise RuntimeError(f"lost self-adjointness of the 2x2 reduction: {asym}")
    mat = 0.5 * (mat + mat.T)
    return PhiHat(nu, mat, cond, smallness_report(V, nu))


def gamma_matrix(nu: float, V: Potential, grid: Grid) -> float:
    """Orthogonality exponent from the 2x2 reduction,
    gamma = tr[(1 + F^2/4nu)^{-1} F^2] / (4 pi^2 nu) with F the phi_hat matrix."""
    F = phi_hat(nu, V, grid).matrix
    F2 = F @ F
    resolv = np.linalg.solve(np.eye(2) + F2 / (4.0 * nu), F2)
    g = float(np.trace(resolv)) / (4.0 * math.pi**2 * nu)
    if g < -1e-12:
        raise RuntimeError(f"negative gamma from a self-adjoint reduction: {g}")
    return max(g, 0.0)


def _middle_kernel_rank(L: float, nu_abs: float, tol: float) -> int:
    """Number of modes so the squared-resolvent spectral tail, weighted by the
    delocalization factor 1/L, stays below tol."""
    c = (math.pi / (2.0 * L)) ** 2
    j_energy = math.ceil(2.0 * L / math.pi * math.sqrt(2.0 * nu_abs))
    j_tail = math.ceil((4.0 / (3.0 * c * c * L * tol)) ** (1.0 / 3.0))
    return max(j_energy, j_tail, 8)


def contour_anderson(
    N: int,
    V: Potential,
    L: float,
    grid: Grid,
    s_cut: float | None = None,
    tol: float = 1e-6,
    nodes_per_panel: int = 12,
) -> float:
    """Anderson integral through its contour representation,
    (1/2 pi i) * integral over the Fermi parabola of tr[P_N R T R^2 T] dz.

    The trace is evaluated mode by mode below the Fermi energy; the squared
    resolvent in the middle is expanded over free modes with an explicit tail
    bound <= tol.  The contour is truncated at |s| = s_cut where the
    integrand has decayed like exp(-2(L-a)s), and folded onto s >= 0 by
    conjugation symmetry.
    """
    nu = fermi_energy(N, L)
    root = math.sqrt(nu)
    if s_cut is None:
        s_cut = max(10.0 / L, 5.0)

    x, w = _support(V, grid)
    sq = np.sqrt(np.abs(V(x)))
    J = sign_operator(V, x).diagonal
    lam_low = free_eigenvalues(L, N)
    v_mat = sq[:, None] * free_eigenfunction_matrix(N, L, x).T  # (n, N)

    nu_far = nu + s_cut * s_cut
    j_max = _middle_kernel_rank(L, nu_far, tol)
    lam_all = free_eigenvalues(L, j_max)
    phi_all = free_eigenfunction_matrix(j_max, L, x)  # (j_max, n)
    phi_v = sq[None, :] * phi_all

    decay = 2.0 * max(L - V.a, 0.5 * L)
    width = min(0.5, 2.0 / decay)
    n_panels = max(4, int(math.ceil(s_cut / width)))
    t_ref, w_ref = _gauss_rule(nodes_per_panel)
    edges = np.linspace(0.0, s_cut, n_panels + 1)

    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        for ts, ws in zip(t_ref, w_ref):
            s = 0.5 * (lo + hi) + half * ts
            z = fermi_contour_point(nu, s).z
            kern = green_kernel(z, x[:, None], x[None, :], L)
            k_v = sq[:, None] * kern * sq[None, :]
            system = np.eye(x.size, dtype=complex) - k_v * (w * J)[None, :]
            u = np.linalg.solve(system, v_mat)          # Omega sqrt|V| phi_j
            g = J[:, None] * u
            coef2 = 1.0 / (z - lam_all) ** 2
            k2_v = (phi_v.T * coef2) @ phi_v            # sqrt|V| R^2 sqrt|V|
            h = k2_v @ (w[:, None] * g)
            p = np.linalg.solve(system, h)
            quad_forms = np.einsum("ij,i,ij->j", v_mat, w * J, p)
            trace = np.sum(quad_forms / (z - lam_low))
            total += half * ws * (2.0 / math.pi) * ((root + 1j * s) * trace).real
    return float(total)


@dataclass(frozen=True)
class AuditItem:
    name: str
    lhs: float
    rhs: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + 1e-12) + 1e-12

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


def _sandwich_norm(kern, V, x, w) -> float:
    sq = np.sqrt(np.abs(V(x)))
    sw = np.sqrt(w)
    m = (sw * sq)[:, None] * kern * (sq * sw)[None, :]
    return float(np.linalg.norm(m, 2))


def bounds_audit(
    V: Potential,
    N: int,
    L: float,
    grid: Grid,
    s_samples=(0.0, 0.1, 1.0, 5.0),
    result=None,
) -> list[AuditItem]:
    """Numerical check of the operator-norm inequalities on sampled contour
    points, plus the overlap-determinant inequality and the discrete sum
    estimate.  Violations are reported, not raised."""
    nu = fermi_energy(N, L)
    root = math.sqrt(nu)
    norms = potential_norms(V)
    x, w = _support(V, grid)
    items: list[AuditItem] = []

    for s in s_samples:
        z = fermi_contour_point(nu, s).z
        arg = L * (root + 1j * s)
        envelope = 4.0 * math.exp(-2.0 * L * abs(s))
        sin2 = abs(np.sin(arg)) ** 2 if L * abs(s) < 300 else math.inf
        cos2 = abs(np.cos(arg)) ** 2 if L * abs(s) < 300 else math.inf
        items.append(AuditItem(f"inverse_sine_bound[s={s}]", 1.0 / sin2, envelope))
        items.append(AuditItem(f"inverse_cosine_bound[s={s}]", 1.0 / cos2, envelope))

        bs_norm = birman_schwinger(z, V, grid, L).norm()
        items.append(
            AuditItem(
                f"birman_schwinger_norm[s={s}]",
                bs_norm,
                4.0 * norms.l1 / math.sqrt(nu + s * s),
            )
        )

        lam = free_eigenvalues(L, N)
        phi = free_eigenfunction_matrix(N, L, x)
        kern_sn = (phi.T / (z - lam)) @ phi
        items.append(
            AuditItem(
                f"truncated_resolvent_norm[s={s}]",
                _sandwich_norm(kern_sn, V, x, w),
                8.0 / math.pi * norms.l1 * math.log(N + 1.0) / math.sqrt(nu + s * s),
            )
        )

    kern_g = np.sin(root * np.abs(x[:, None] - x[None, :]))
    items.append(AuditItem("plane_wave_kernel_norm", _sandwich_norm(kern_g, V, x, w), norms.l1))

    if result is None:
        result = _metrics.anderson_result(N, V, L, grid)
    items.append(
        AuditItem(
            "overlap_vs_anderson_exponential",
            result.log_transition,
            -result.anderson_integral + 1e-10,
        )
    )

    worst = -math.inf
    for n in range(1, 501):
        j = np.arange(1, n + 1)
        lhs = float(np.sum(1.0 / (n + 0.5 - j)))
        worst = max(worst, lhs - 4.0 * math.log(n + 1.0))
    items.append(AuditItem("half_integer_sum_estimate", worst, 0.0))
    return items
