import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from qforge.qubit_model import REFERENCE_ENERGIES, CircuitEnergies, DimensionlessPotential, to_dimensionless
from qforge.variational import (
    LEVELS,
    ansatz_value,
    ansatz_widths,
    branch_argument,
    cubic_residual,
    dimensionless_spectrum,
    septic_polynomials,
    septic_residual,
    septic_root_theta2,
    theta_root,
    variational_energies,
)

coef = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


def test_quartic_only_example():
    assert theta_root(0, DimensionlessPotential(0.0, 8.0)) == pytest.approx(1.0, rel=1e-14)


def test_quadratic_only_example():
    for n in LEVELS:
        assert theta_root(n, DimensionlessPotential(2.0, 0.0)) == pytest.approx(1.0, rel=1e-14)


@settings(max_examples=200)
@given(coef, coef)
def test_roots_solve_cubics(eps2, eps4):
    p = DimensionlessPotential(eps2, eps4)
    for n in LEVELS:
        t = theta_root(n, p)
        assert t > 0
        scale = t**3 + 0.5 * eps2 * t + eps4
        assert abs(cubic_residual(t, n, p)) <= 1e-12 * scale


@given(coef, coef)
def test_widths_increase_with_level(eps2, eps4):
    w = ansatz_widths(DimensionlessPotential(eps2, eps4))
    assert w.theta0 < w.theta1 < w.theta2


def test_branch_continuity():
    # eps4 chosen so that the level-0 branch argument equals one
    eps2 = 3.0
    eps4 = 8.0 * eps2**1.5 / (3.0 * math.sqrt(6.0))
    p = DimensionlessPotential(eps2, eps4)
    assert branch_argument(0, p) == pytest.approx(1.0, rel=1e-14)
    below = theta_root(0, DimensionlessPotential(eps2, eps4 * (1 - 1e-10)))
    above = theta_root(0, DimensionlessPotential(eps2, eps4 * (1 + 1e-10)))
    assert above - below == pytest.approx(0.0, abs=1e-8)


def test_zero_eps2_limit_is_continuous():
    eps4 = 5.0
    assert theta_root(2, DimensionlessPotential(1e-12, eps4)) == pytest.approx(
        theta_root(2, DimensionlessPotential(0.0, eps4)), rel=1e-8
    )


def test_invalid_level():
    with pytest.raises(ValueError):
        theta_root(3, DimensionlessPotential(1.0, 1.0))


def test_septic_polynomials_equal_widths():
    p0, p1, p2 = septic_polynomials(1.0, 1.0)
    assert p1 / p0 == pytest.approx(1.0)
    assert p2 / p0 == pytest.approx(7.0)


@pytest.mark.parametrize("eps2, eps4", [(0.0, 24.0), (1.0, 24.0), (10.0, 3.0), (0.2, 500.0)])
def test_septic_root(eps2, eps4):
    p = DimensionlessPotential(eps2, eps4)
    w = ansatz_widths(p)
    t2 = septic_root_theta2(w.theta0, p)
    p0, _, p2 = septic_polynomials(w.theta0, t2)
    assert abs(septic_residual(t2, w.theta0, p)) < 1e-10 * t2**3 * p0
    # the cubic is an approximation of the septic at the few-percent level
    assert t2 == pytest.approx(w.theta2, rel=0.05)
    assert t2 > w.theta0


def _quad(f):
    return quad(f, -np.inf, np.inf, limit=400, epsabs=1e-13, epsrel=1e-12)[0]


@pytest.mark.parametrize("c", [REFERENCE_ENERGIES, CircuitEnergies(5.4, 7.1, 0.78), CircuitEnergies(1.0, 30.0, 2.0)])
def test_trial_states_normalized_and_orthogonal(c):
    w = ansatz_widths(to_dimensionless(c))
    for n in LEVELS:
        assert _quad(lambda x: ansatz_value(n, w, x) ** 2) == pytest.approx(1.0, abs=1e-10)
    assert _quad(lambda x: ansatz_value(0, w, x) * ansatz_value(2, w, x)) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("c", [REFERENCE_ENERGIES, CircuitEnergies(2.4, 3.2, 1.4), CircuitEnergies(1.0, 30.0, 2.0)])
def test_energies_match_expectation_values(c):
    """Closed forms agree with direct quadrature of the cosine Hamiltonian."""
    v = variational_energies(c)
    h = 1e-5
    for n, e in zip(LEVELS, (v.e0, v.e1, v.e2)):
        def psi(x):
            return float(ansatz_value(n, v.widths, x))

        def integrand(x):
            d = (psi(x + h) - psi(x - h)) / (2 * h)
            pot = 0.5 * c.e_l * x**2 - c.e_j * math.cos(x - c.phi_diff)
            return 4 * c.e_c * d**2 + pot * psi(x) ** 2

        assert _quad(integrand) == pytest.approx(e, rel=1e-8, abs=1e-8)


@pytest.mark.parametrize("e_l, e_c", [(10.0, 0.5), (3.0, 2.0)])
def test_harmonic_limit_exact(e_l, e_c):
    v = variational_energies(CircuitEnergies(0.0, e_l, e_c))
    w = math.sqrt(8 * e_c * e_l)
    assert v.e0 == pytest.approx(0.5 * w, rel=1e-13)
    assert v.f01 == pytest.approx(w, rel=1e-13)
    assert v.f12 == pytest.approx(w, rel=1e-13)
    assert v.alpha == pytest.approx(0.0, abs=1e-12 * w)


def test_reference_device_frequency():
    v = variational_energies(REFERENCE_ENERGIES)
    assert v.f01 == pytest.approx(4.488, rel=0.01)
    assert v.alpha > 0


def test_dimensionless_spectrum_scaling():
    c = REFERENCE_ENERGIES
    v = variational_energies(c)
    u = dimensionless_spectrum(to_dimensionless(c))
    assert u.f01 * 4 * c.e_c == pytest.approx(v.f01, rel=1e-12)
    assert u.alpha * 4 * c.e_c == pytest.approx(v.alpha, rel=1e-10)


def test_rejects_off_sweet_spot():
    with pytest.raises(ValueError, match="phi_diff"):
        variational_energies(REFERENCE_ENERGIES.with_phi(3.0))


def test_rejects_double_well():
    with pytest.raises(ValueError, match="double-well"):
        variational_energies(CircuitEnergies(6.27, 0.8, 1.41))
