"""Ground-state overlap matrix between the free and perturbed Dirichlet
problems, the Anderson integral, the transition probability, and the
determinant sandwich bounds.

The transition probability decays like a power of N and underflows quickly,
so every determinant is carried in log space: the pivoted LU of the overlap
matrix gives log|det A| directly and all inequalities are compared on
logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor

from .core import Grid, Potential, potential_norms
from .free import fermi_energy, free_eigenfunction_matrix
from .perturbed import count_below, eigenpairs

__all__ = [
    "OverlapMatrix",
    "overlap_matrix",
    "anderson_integral",
    "log_transition_probability",
    "transition_probability",
    "defect_norm",
    "AndersonResult",
    "anderson_result",
    "DetBoundsReport",
    "det_bounds",
]


@dataclass(frozen=True)
class OverlapMatrix:
    """Entries A[j, k] = (phi_j, psi_k) for the first n modes of each basis."""

    n: int
    matrix: np.ndarray


def overlap_matrix(
    n: int,
    V: Potential,
    L: float,
    grid: Grid,
    tol: float = 1e-10,
    pairs=None,
    n_perturbed: int | None = None,
) -> OverlapMatrix:
    """Overlap matrix by quadrature of phi_j * psi_k on the grid.

    ``pairs`` can supply precomputed perturbed eigenfunction samples (rows of
    shape (m, grid.size)); ``n_perturbed`` widens the perturbed basis beyond n
    columns, which the tail-sum diagnostics use.
    """
    m = n_perturbed or n
    if pairs is None:
        _, psi = eigenpairs(m, V, L, grid, tol=tol)
    else:
        psi = np.asarray(pairs)
        if psi.shape[0] < m:
            raise ValueError(f"need {m} perturbed rows, got {psi.shape[0]}")
    phi = free_eigenfunction_matrix(n, L, grid.nodes)
    a = (phi * grid.weights[None, :]) @ psi[:m].T
    return OverlapMatrix(n, a)


def anderson_integral(overlap: OverlapMatrix) -> float:
    """N minus the squared Frobenius norm of the N x N overlap block; the
    infinite tail over unoccupied perturbed modes is eliminated by
    completeness of the perturbed basis."""
    a = overlap.matrix[:, : overlap.n]
    return float(overlap.n - np.einsum("jk,jk->", a, a))


def log_transition_probability(overlap: OverlapMatrix) -> float:
    """log of |det A|^2 via pivoted LU; -inf if the matrix is numerically
    singular."""
    a = overlap.matrix[:, : overlap.n]
    lu, _piv = lu_factor(a, check_finite=False)
    diag = np.abs(np.diag(lu))
    if np.any(diag == 0.0):
        return -math.inf
    return 2.0 * float(np.sum(np.log(diag)))


def transition_probability(overlap: OverlapMatrix) -> float:
    """|det A|^2; may underflow to zero for large N, in which case the log
    form remains meaningful."""
    return math.exp(log_transition_probability(overlap))


def defect_norm(overlap: OverlapMatrix) -> float:
    """Spectral norm of 1 - A A^T (symmetric, so an eigenvalue computation)."""
    a = overlap.matrix[:, : overlap.n]
    gap = np.eye(overlap.n) - a @ a.T
    return float(np.max(np.abs(np.linalg.eigvalsh(gap))))


@dataclass(frozen=True)
class AndersonResult:
    """One (N, rho) instance: the Anderson integral, the overlap determinant
    in linear and log form, the projection defect, and the perturbed count
    below the Fermi energy."""

    n: int
    m: int
    anderson_integral: float
    log_transition: float
    transition: float
    defect_norm: float


def anderson_result(n: int, V: Potential, L: float, grid: Grid,
                    tol: float = 1e-10) -> AndersonResult:
    ov = overlap_matrix(n, V, L, grid, tol=tol)
    log_d = log_transition_probability(ov)
    return AndersonResult(
        n=n,
        m=count_below(fermi_energy(n, L), V, L),
        anderson_integral=anderson_integral(ov),
        log_transition=log_d,
        transition=math.exp(log_d) if log_d > -700 else 0.0,
        defect_norm=defect_norm(ov),
    )


@dataclass(frozen=True)
class DetBoundsReport:
    """Sandwich exp[-(1-defect)^{-1} I] <= D <= exp(-I) in log space, plus the
    a-priori bound on the projection defect for weak coupling."""

    log_value: float
    log_upper: float
    log_lower: float          # -inf when the defect reaches 1
    defect: float
    weak_coupling_bound: float      # 16 C_Omega ||V||_1 / sqrt(nu); inf unless q_Omega < 1
    q_omega: float

    @property
    def lower_defined(self) -> bool:
        return self.defect < 1.0

    @property
    def sandwich_holds(self) -> bool:
        upper_ok = self.log_value <= self.log_upper + 1e-10
        lower_ok = (not self.lower_defined) or (self.log_lower <= self.log_value + 1e-10)
        return upper_ok and lower_ok

    @property
    def defect_bound_holds(self) -> bool:
        return not math.isfinite(self.weak_coupling_bound) or self.defect <= self.weak_coupling_bound


def det_bounds(n: int, V: Potential, L: float, grid: Grid,
               result: AndersonResult | None = None) -> DetBoundsReport:
    if result is None:
        result = anderson_result(n, V, L, grid)
    nu = fermi_energy(n, L)
    l1 = potential_norms(V).l1
    q_omega = 4.0 * l1 / math.sqrt(nu)
    if q_omega < 1.0:
        weak_coupling_bound = 16.0 * l1 / ((1.0 - q_omega) * math.sqrt(nu))
    else:
        weak_coupling_bound = math.inf
    defect = result.defect_norm
    log_lower = (
        -result.anderson_integral / (1.0 - defect) if defect < 1.0 else -math.inf
    )
    return DetBoundsReport(
        log_value=result.log_transition,
        log_upper=-result.anderson_integral,
        log_lower=log_lower,
        defect=defect,
        weak_coupling_bound=weak_coupling_bound,
        q_omega=q_omega,
    )
