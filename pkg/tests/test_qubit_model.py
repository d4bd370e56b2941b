import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qforge import qubit_model
from qforge.qubit_model import (
    R_K,
    REFERENCE_ENERGIES,
    CircuitEnergies,
    DimensionlessPotential,
    NoiseEnvironment,
    cpw_characteristic_impedance,
    ec_over_el,
    from_dimensionless,
    impedance,
    to_dimensionless,
)

positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


def test_reference_device_dimensionless():
    p = to_dimensionless(REFERENCE_ENERGIES)
    assert p.eps2 == pytest.approx(6.2 / 1.188)
    assert p.eps4 == pytest.approx(19.0 / 1.188)
    assert p.eps2 == pytest.approx(5.2189, abs=1e-4)
    assert p.eps4 == pytest.approx(15.9933, abs=1e-4)


@pytest.mark.parametrize("ej, el, ec, expected", [(0, 4, 1, (1.0, 0.0)), (4, 4, 1, (0.0, 1.0))])
def test_dimensionless_limits(ej, el, ec, expected):
    p = to_dimensionless(CircuitEnergies(ej, el, ec))
    assert (p.eps2, p.eps4) == expected


def test_double_well_rejected():
    with pytest.raises(ValueError, match="double-well"):
        to_dimensionless(CircuitEnergies(6.27, 0.8, 1.41))


@pytest.mark.parametrize(
    "kwargs",
    [dict(e_j=-1, e_l=1, e_c=1), dict(e_j=1, e_l=-1, e_c=1), dict(e_j=1, e_l=1, e_c=0), dict(e_j=1, e_l=1, e_c=1, phi_diff=math.inf)],
)
def test_energies_validation(kwargs):
    with pytest.raises(ValueError):
        CircuitEnergies(**kwargs)


def test_potential_validation():
    with pytest.raises(ValueError):
        DimensionlessPotential(0.0, 0.0)
    with pytest.raises(ValueError):
        DimensionlessPotential(-1.0, 1.0)


@pytest.mark.parametrize("field", ["a_phi", "q_diel", "temperature", "omega_ir", "nu"])
def test_noise_must_be_positive(field):
    with pytest.raises(ValueError):
        NoiseEnvironment(**{field: 0.0})


def test_noise_defaults():
    env = NoiseEnvironment()
    assert env.omega_ir == 1e3 and env.nu == 1.0
    assert env.replace(q_diel=1e7).q_diel == 1e7


def test_impedance_examples():
    assert impedance(REFERENCE_ENERGIES) == pytest.approx(315.0, rel=5e-3)
    assert impedance(CircuitEnergies(6.27, 0.80, 1.41)) == pytest.approx(3900.0, rel=0.02)
    assert impedance(CircuitEnergies(0.0, 2.0, 1.0)) == pytest.approx(R_K / (4 * math.pi))
    assert R_K / (4 * math.pi) == pytest.approx(2054.1, abs=0.1)


def test_impedance_requires_inductor():
    with pytest.raises(ValueError):
        impedance(CircuitEnergies(14.0, 0.0, 0.195))


def test_impedance_tracks_constant(monkeypatch):
    monkeypatch.setattr(qubit_model, "R_K", 2 * R_K)
    assert impedance(REFERENCE_ENERGIES) == pytest.approx(2 * 315.37, rel=1e-3)


def test_cpw_impedance():
    assert cpw_characteristic_impedance(math.sqrt(12.0)) == pytest.approx(1.0)
    assert cpw_characteristic_impedance(315.0) == pytest.approx(315.0 / math.sqrt(12.0))


@given(positive, positive, positive, st.floats(min_value=1e-2, max_value=1e2))
def test_scale_invariance(e_j, extra, e_c, factor):
    c = CircuitEnergies(e_j, e_j + extra, e_c)
    p, q = to_dimensionless(c), to_dimensionless(c.scaled(factor))
    # eps2 is a difference, so compare on the scale of the larger coefficient
    assert q.eps2 == pytest.approx(p.eps2, rel=1e-12, abs=1e-12 * p.eps4)
    assert q.eps4 == pytest.approx(p.eps4, rel=1e-12)
    assert impedance(c.scaled(factor)) == pytest.approx(impedance(c), rel=1e-12)


@given(st.floats(0, 1e3), st.floats(1e-3, 1e3), st.floats(1e-2, 10))
def test_round_trip(eps2, eps4, e_c):
    p = DimensionlessPotential(eps2, eps4)
    q = to_dimensionless(from_dimensionless(p, e_c))
    assert q.eps2 == pytest.approx(eps2, rel=1e-13, abs=1e-13 * eps4)
    assert q.eps4 == pytest.approx(eps4, rel=1e-13)


def test_ec_over_el_inverts_impedance():
    for z in np.geomspace(100, 5000, 7):
        c = CircuitEnergies(0.0, 1.0, ec_over_el(z))
        assert impedance(c) == pytest.approx(z, rel=1e-13)
