import math

import numpy as np
import pytest
import scipy.linalg

from qforge.eigensolver import (
    BoundaryLeakageError,
    ChargeCutoffError,
    PhaseGrid,
    default_grid,
    diagonalize,
    extrapolated_energies,
    flux_curvature,
    flux_curvature_fd,
    hamiltonian_tridiagonal,
    matrix_element_n,
    matrix_element_phi,
    omega01,
    potential_minimum,
    transmon_diagonalize,
)
from qforge.qubit_model import REFERENCE_ENERGIES, CircuitEnergies

UNIMON2 = CircuitEnergies(5.4, 7.1, 0.78)
FLUXONIUM = CircuitEnergies(6.27, 0.80, 1.41)


@pytest.fixture(scope="module")
def reference():
    return diagonalize(REFERENCE_ENERGIES, k=4)


def test_matches_dense_oracle():
    c = UNIMON2
    grid = PhaseGrid(-8.0, 8.0, 1201)
    diag, off = hamiltonian_tridiagonal(c, grid)
    ref = scipy.linalg.eigh_tridiagonal(diag, off, select="i", select_range=(0, 3), eigvals_only=True)
    got = diagonalize(c, grid, k=4).energies
    np.testing.assert_allclose(got, ref, rtol=1e-12, atol=1e-10)


@pytest.mark.parametrize("e_l, e_c", [(10.0, 0.5), (2.0, 1.5)])
def test_harmonic_levels(e_l, e_c):
    c = CircuitEnergies(0.0, e_l, e_c)
    s = diagonalize(c, k=4)
    w = math.sqrt(8 * e_c * e_l)
    np.testing.assert_allclose(np.diff(s.energies), w, rtol=1e-6)
    assert s.energies[0] == pytest.approx(0.5 * w, rel=1e-6)


def test_orthonormal(reference):
    gram = reference.states @ reference.states.T * reference.grid.step
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-8)


def test_parity_at_sweet_spot(reference):
    assert potential_minimum(REFERENCE_ENERGIES) == 0.0
    for n, psi in enumerate(reference.states):
        np.testing.assert_allclose(psi[::-1], (-1) ** n * psi, atol=1e-8)
    assert matrix_element_phi(reference, 0, 2) < 1e-8
    assert matrix_element_phi(reference, 0, 1) > 0.1


def test_grid_convergence(reference):
    fine = diagonalize(REFERENCE_ENERGIES, reference.grid.refined(2), k=3)
    assert abs(fine.f01 - reference.f01) / reference.f01 < 1e-6
    assert abs(fine.f12 - reference.f12) / reference.f12 < 1e-6
    assert matrix_element_phi(fine, 0, 1) == pytest.approx(matrix_element_phi(reference, 0, 1), rel=1e-6)


def test_reference_device_frequency(reference):
    assert reference.f01 == pytest.approx(4.488, rel=2e-3)


def test_extrapolation_beats_raw_grid():
    c = CircuitEnergies(0.0, 10.0, 0.5)
    e = extrapolated_energies(c, k=3)
    w = math.sqrt(40.0)
    np.testing.assert_allclose(np.diff(e), w, rtol=1e-9)


@pytest.mark.parametrize("c", [REFERENCE_ENERGIES, UNIMON2, CircuitEnergies(1.0, 20.0, 2.0)])
def test_commutator_identity(c):
    s = diagonalize(c, k=3)
    lhs = matrix_element_n(s, 0, 1)
    rhs = s.f01 * matrix_element_phi(s, 0, 1) / (8 * c.e_c)
    assert lhs == pytest.approx(rhs, rel=1e-5)


def test_curvature_matches_finite_difference():
    k = flux_curvature(REFERENCE_ENERGIES)
    assert k > 0
    assert k == pytest.approx(flux_curvature_fd(REFERENCE_ENERGIES), rel=0.01)


def test_curvature_zero_without_junction():
    assert flux_curvature(CircuitEnergies(0.0, 5.0, 1.0)) == 0.0


def test_curvature_requires_sweet_spot():
    with pytest.raises(ValueError):
        flux_curvature(REFERENCE_ENERGIES.with_phi(3.0))


def test_relative_curvature_falls_with_impedance():
    from qforge.design_space import DesignPoint, design_to_energies

    values = []
    for z in (300.0, 1000.0, 3000.0):
        c = design_to_energies(DesignPoint(4.5, 0.7, z))
        s = diagonalize(c, k=3)
        values.append(flux_curvature(c, s) / omega01(s))
    assert values[0] > values[1] > values[2]


def test_flux_symmetry():
    a = diagonalize(REFERENCE_ENERGIES.with_phi(math.pi + 0.1), k=3)
    b = diagonalize(REFERENCE_ENERGIES.with_phi(math.pi - 0.1), k=3)
    np.testing.assert_allclose(a.energies, b.energies, rtol=1e-9)


def test_boundary_leakage_detected():
    with pytest.raises(BoundaryLeakageError):
        diagonalize(CircuitEnergies(0.0, 0.5, 2.0), PhaseGrid(-1.0, 1.0, 1001), k=3)


def test_rejects_bad_k_and_transmon_limit():
    with pytest.raises(ValueError):
        diagonalize(REFERENCE_ENERGIES, k=0)
    with pytest.raises(ValueError):
        default_grid(CircuitEnergies(14.0, 0.0, 0.2))


def test_fluxonium_alpha_exceeds_frequency():
    s = diagonalize(FLUXONIUM, k=3)
    assert 0.1 < s.f01 < 1.0
    assert s.alpha > s.f01


def test_transmon_asymptotics():
    e_c = 0.2
    e_j = 200 * e_c
    t = transmon_diagonalize(e_j, e_c)
    assert t.f01 == pytest.approx(math.sqrt(8 * e_j * e_c) - e_c, rel=2e-3)
    assert t.alpha == pytest.approx(-e_c, rel=0.1)


def test_transmon_without_junction():
    t = transmon_diagonalize(0.0, 0.3)
    assert t.f01 == pytest.approx(4 * 0.3, rel=1e-12)


def test_transmon_charge_dispersion():
    a = transmon_diagonalize(14.0, 0.195, n_g=0.0)
    b = transmon_diagonalize(14.0, 0.195, n_g=0.5)
    assert abs(a.f01 - b.f01) / a.f01 < 1e-4


def test_transmon_validation():
    with pytest.raises(ValueError):
        transmon_diagonalize(1.0, 0.2, cutoff=10)
    with pytest.raises(ChargeCutoffError):
        transmon_diagonalize(1e6, 1e-3, cutoff=30)
