"""Circuit parameter records and unit conversions.

Conventions used throughout the package:

* energies are stored as E/h in GHz;
* angular frequencies (rad/s) only appear at the coherence-model boundary;
* magnetic flux is measured in units of the flux quantum;
* the external phase bias ``phi_diff`` is in radians, sweet spot at pi.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import scipy.constants as sc

R_K = 25812.807  # von Klitzing constant, ohm
GHZ = 1e9
H_PLANCK = sc.h
HBAR = sc.hbar
K_B = sc.k

SWEET_SPOT = math.pi


@dataclass(frozen=True)
class CircuitEnergies:
    """Single-mode Hamiltonian ``4 E_C n^2 + E_L phi^2 / 2 - E_J cos(phi - phi_diff)``.

    Energies are E/h in GHz. ``e_l = 0`` is the transmon-like limit and
    ``e_l < e_j`` a double-well (fluxonium-like) circuit; the variational
    routines reject the latter at their call sites.
    """

    e_j: float
    e_l: float
    e_c: float
    phi_diff: float = SWEET_SPOT

    def __post_init__(self) -> None:
        if not (self.e_j >= 0.0 and self.e_l >= 0.0):
            raise ValueError(f"e_j and e_l must be non-negative, got e_j={self.e_j}, e_l={self.e_l}")
        if not self.e_c > 0.0:
            raise ValueError(f"e_c must be positive, got {self.e_c}")
        if not math.isfinite(self.phi_diff):
            raise ValueError("phi_diff must be finite")

    def with_phi(self, phi_diff: float) -> "CircuitEnergies":
        return CircuitEnergies(self.e_j, self.e_l, self.e_c, phi_diff)

    def scaled(self, factor: float) -> "CircuitEnergies":
        return CircuitEnergies(self.e_j * factor, self.e_l * factor, self.e_c * factor, self.phi_diff)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DimensionlessPotential:
    """Quadratic and quartic coefficients of the potential rescaled by ``4 E_C``."""

    eps2: float
    eps4: float

    def __post_init__(self) -> None:
        if not (self.eps2 >= 0.0 and self.eps4 >= 0.0):
            raise ValueError(
                f"eps2 and eps4 must be non-negative (single-well regime), got ({self.eps2}, {self.eps4})"
            )
        if self.eps2 == 0.0 and self.eps4 == 0.0:
            raise ValueError("eps2 and eps4 cannot both vanish (degenerate potential)")


@dataclass(frozen=True)
class NoiseEnvironment:
    """Noise and control parameters entering the coherence model.

    Attributes
    ----------
    a_phi:
        1/f flux-noise amplitude at 1 Hz, in units of the flux quantum
    q_diel:
        dielectric quality factor
    temperature:
        bath temperature in kelvin
    omega_ir:
        infrared cutoff of the 1/f spectrum in rad/s
    nu:
        pulse-shape factor of the gate duration ``2 pi nu / |alpha|``
    """

    a_phi: float = 15.0e-6
    q_diel: float = 3.5e5
    temperature: float = 0.025
    omega_ir: float = 1.0e3
    nu: float = 1.0

    def __post_init__(self) -> None:
        for name in ("a_phi", "q_diel", "temperature", "omega_ir", "nu"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be strictly positive and finite, got {value}")

    def replace(self, **changes) -> "NoiseEnvironment":
        return NoiseEnvironment(**{**asdict(self), **changes})

    def to_dict(self) -> dict:
        return asdict(self)


# Noise and device parameters of the measured first-generation unimon.
REFERENCE_ENERGIES = CircuitEnergies(e_j=19.0, e_l=25.2, e_c=0.297)
REFERENCE_NOISE = NoiseEnvironment(a_phi=15.0e-6, q_diel=3.5e5, temperature=0.025)
REFERENCE_F01 = 4.488


def to_dimensionless(c: CircuitEnergies) -> DimensionlessPotential:
    """Return ``(eps2, eps4) = ((E_L - E_J) / 4E_C, E_J / 4E_C)``.

    Raises ``ValueError`` in the double-well regime ``e_l < e_j``.
    """
    if c.e_l < c.e_j:
        raise ValueError(
            f"double-well regime (e_l={c.e_l} < e_j={c.e_j}) is outside the single-well approximation"
        )
    scale = 4.0 * c.e_c
    return DimensionlessPotential((c.e_l - c.e_j) / scale, c.e_j / scale)


def from_dimensionless(p: DimensionlessPotential, e_c: float, phi_diff: float = SWEET_SPOT) -> CircuitEnergies:
    """Inverse of :func:`to_dimensionless` for a given charging energy."""
    return CircuitEnergies(
        e_j=4.0 * e_c * p.eps4, e_l=4.0 * e_c * (p.eps2 + p.eps4), e_c=e_c, phi_diff=phi_diff
    )


def impedance(c: CircuitEnergies, r_k: float | None = None) -> float:
    """Qubit mode impedance ``(R_K / 4 pi) sqrt(2 E_C / E_L)`` in ohms."""
    r_k = R_K if r_k is None else r_k
    if not c.e_l > 0.0:
        raise ValueError("impedance is undefined without an inductive shunt (e_l = 0)")
    return r_k / (4.0 * math.pi) * math.sqrt(2.0 * c.e_c / c.e_l)


def ec_over_el(z: float, r_k: float | None = None) -> float:
    """Ratio ``E_C / E_L`` fixed by a mode impedance ``z`` in ohms."""
    r_k = R_K if r_k is None else r_k
    if not z > 0.0:
        raise ValueError(f"impedance must be positive, got {z}")
    return 0.5 * (4.0 * math.pi * z / r_k) ** 2


def cpw_characteristic_impedance(z: float) -> float:
    """Characteristic impedance of a CPW with a central junction, ``Z / sqrt(12)``."""
    if not z > 0.0:
        raise ValueError(f"impedance must be positive, got {z}")
    return z / math.sqrt(12.0)


def flux_to_phase(flux: float) -> float:
    """External flux in units of the flux quantum to phase bias in radians."""
    return 2.0 * math.pi * flux


def phase_to_flux(phi: float) -> float:
    return phi / (2.0 * math.pi)


def ghz_to_angular(f_ghz: float) -> float:
    """Frequency in GHz to angular frequency in rad/s."""
    return 2.0 * math.pi * GHZ * f_ghz
