import cmath
import math

import numpy as np
import pytest

from orthocat.core import scale_potential, square_well
from orthocat.scattering import (
    gamma_gkm,
    gamma_scattering,
    s_matrix,
    scattering_coefficients,
)

NU = math.pi**2


def closed_form_transmission(v0, a, k):
    """Textbook transfer-matrix result for a rectangular well/barrier."""
    kappa = cmath.sqrt(k * k - v0)
    return cmath.exp(-2j * k * a) / (
        cmath.cos(2 * kappa * a) - 0.5j * (kappa / k + k / kappa) * cmath.sin(2 * kappa * a)
    )


class TestScatteringCoefficients:
    def test_no_scatterer(self):
        sd = scattering_coefficients(square_well(0.0, 1.0), math.pi)
        assert abs(sd.t - 1.0) < 1e-10
        assert abs(sd.r1) < 1e-10
        assert abs(sd.r2) < 1e-10

    @pytest.mark.parametrize("v0", [-0.5, 0.5, -2.0, 3.0])
    def test_square_well_transmission_probability(self, v0):
        k = math.pi
        sd = scattering_coefficients(square_well(v0, 1.0), k)
        kappa = math.sqrt(k * k - v0)
        expected = 1.0 / (1.0 + v0**2 * math.sin(2 * kappa) ** 2 / (4 * k * k * kappa * kappa))
        assert abs(abs(sd.t) ** 2 - expected) < 1e-8

    @pytest.mark.parametrize("v0", [-0.5, 0.5])
    def test_square_well_complex_amplitude(self, v0):
        k = math.pi
        sd = scattering_coefficients(square_well(v0, 1.0), k)
        assert abs(sd.t - closed_form_transmission(v0, 1.0, k)) < 1e-8

    def test_unitarity_gaussian(self, gauss_bump):
        for k in (1.0, math.pi, 5.5):
            sd = scattering_coefficients(gauss_bump, k)
            assert sd.unitarity_defect <= 1e-10

    def test_transmission_below_unity(self, table_mixed):
        for k in (0.7, 2.0, math.pi):
            sd = scattering_coefficients(table_mixed, k)
            assert abs(sd.t) <= 1.0 + 1e-10

    def test_wavenumber_continuity(self, well_attractive):
        ks = np.linspace(2.5, 3.5, 21)
        ts = np.array([scattering_coefficients(well_attractive, k).t for k in ks])
        diffs = np.abs(np.diff(ts)) / np.diff(ks)
        assert np.max(diffs) < 2.0  # derivative stays bounded on the mesh

    def test_invalid_wavenumber(self, well_attractive):
        with pytest.raises(ValueError):
            scattering_coefficients(well_attractive, 0.0)


class TestGammaRoutes:
    def test_zero_potential(self):
        V = square_well(0.0, 1.0)
        assert gamma_scattering(V, NU) < 1e-12
        assert gamma_gkm(V, NU) < 1e-12

    def test_nonnegative_on_corpus(self, well_attractive, well_repulsive, gauss_bump, table_mixed):
        for V in (well_attractive, well_repulsive, gauss_bump, table_mixed):
            assert gamma_scattering(V, NU) >= 0.0

    def test_gkm_equals_scattering(self, well_attractive, well_repulsive, gauss_bump, table_mixed):
        # unitarity identity: tr[(S-1)*(S-1)] = 4(1 - Re t)
        for V in (well_attractive, well_repulsive, gauss_bump, table_mixed):
            assert abs(gamma_gkm(V, NU) - gamma_scattering(V, NU)) <= 1e-10

    def test_square_well_value_against_closed_form(self):
        V = square_well(-0.5, 1.0)
        t = closed_form_transmission(-0.5, 1.0, math.pi)
        expected = (1.0 - t.real) / math.pi**2
        assert abs(gamma_scattering(V, NU) - expected) < 1e-8

    def test_symmetric_potential_trace_expansion(self, gauss_bump):
        # symmetric V: r1 = r2 and the trace reduces to
        # (|1 - t|^2 + |r1|^2) / (2 pi^2)
        sd = scattering_coefficients(gauss_bump, math.sqrt(NU))
        assert abs(sd.r1 - sd.r2) < 1e-9
        expanded = (abs(1.0 - sd.t) ** 2 + abs(sd.r1) ** 2) / (2.0 * math.pi**2)
        assert gamma_gkm(gauss_bump, NU) == pytest.approx(expanded, abs=1e-11)

    def test_born_scaling(self, well_attractive):
        # gamma(cV) = O(c^2): the ratio gamma/c^2 converges as c halves
        ratios = []
        for c in (0.2, 0.1, 0.05):
            ratios.append(gamma_scattering(scale_potential(well_attractive, c), NU) / c**2)
        assert abs(ratios[2] - ratios[1]) < abs(ratios[1] - ratios[0])
        assert abs(ratios[1] - ratios[0]) < 0.05 * ratios[0]


class TestSMatrix:
    def test_structure(self, well_attractive):
        S = s_matrix(well_attractive, NU)
        sd = scattering_coefficients(well_attractive, math.sqrt(NU))
        assert S[0, 0] == S[1, 1] == sd.t
        assert S[0, 1] == sd.r2
        assert S[1, 0] == sd.r1

    def test_unitary(self, well_repulsive, table_mixed):
        for V in (well_repulsive, table_mixed):
            S = s_matrix(V, NU)
            assert np.max(np.abs(S.conj().T @ S - np.eye(2))) < 1e-10
