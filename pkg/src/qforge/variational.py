"""Closed-form variational spectrum of a single-well qubit at its sweet spot.

The three lowest states are approximated by harmonic-oscillator-like trial
functions with free Gaussian widths ``theta_n``. Minimizing the energy of the
quartic-truncated Hamiltonian

    H2 = -d^2/dphi^2 + eps2 phi^2 / 2 + eps4 phi^4 / 24

gives depressed cubics ``theta^3 - (eps2 / 2) theta - (2n + 3) eps4 / 24 = 0``
(exact for n = 0, 1; the n = 2 cubic approximates a septic that also carries
the orthogonality constraint to the ground state). Energies are expectation
values of the full cosine Hamiltonian evaluated with those widths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .qubit_model import (
    SWEET_SPOT,
    CircuitEnergies,
    DimensionlessPotential,
    to_dimensionless,
)

LEVELS = (0, 1, 2)


@dataclass(frozen=True)
class AnsatzWidths:
    theta0: float
    theta1: float
    theta2: float

    def __post_init__(self) -> None:
        for name in ("theta0", "theta1", "theta2"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")

    def __getitem__(self, level: int) -> float:
        return (self.theta0, self.theta1, self.theta2)[level]


@dataclass(frozen=True)
class VariationalSpectrum:
    """Variational energies in GHz and the derived transition frequencies."""

    e0: float
    e1: float
    e2: float
    widths: AnsatzWidths

    @property
    def f01(self) -> float:
        return self.e1 - self.e0

    @property
    def f12(self) -> float:
        return self.e2 - self.e1

    @property
    def alpha(self) -> float:
        """Anharmonicity alpha / 2 pi in GHz."""
        return self.e2 - 2.0 * self.e1 + self.e0


def _check_level(level: int) -> None:
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}, got {level}")


def branch_argument(level: int, p: DimensionlessPotential) -> float:
    """Argument ``(2n + 3) sqrt(6) eps4 / (8 eps2^(3/2))`` selecting the root branch."""
    _check_level(level)
    if p.eps2 == 0.0:
        return math.inf
    return (2 * level + 3) * math.sqrt(6.0) / 8.0 * p.eps4 / p.eps2**1.5


def theta_root(level: int, p: DimensionlessPotential) -> float:
    """Positive real root of ``theta^3 - (eps2/2) theta - (2n+3) eps4 / 24 = 0``.

    The trigonometric branch applies when the branch argument is at most one,
    the hyperbolic branch above it, and ``eps2 = 0`` has its own closed form.
    """
    _check_level(level)
    if p.eps2 == 0.0:
        return 0.5 * ((2 * level + 3) * p.eps4 / 3.0) ** (1.0 / 3.0)
    x = branch_argument(level, p)
    prefactor = math.sqrt(6.0 * p.eps2) / 3.0
    if x <= 1.0:
        return prefactor * math.cos(math.acos(x) / 3.0)
    return prefactor * math.cosh(math.acosh(x) / 3.0)


def cubic_residual(theta: float, level: int, p: DimensionlessPotential) -> float:
    return theta**3 - 0.5 * p.eps2 * theta - (2 * level + 3) / 24.0 * p.eps4


def ansatz_widths(p: DimensionlessPotential) -> AnsatzWidths:
    return AnsatzWidths(*(theta_root(n, p) for n in LEVELS))


def septic_polynomials(theta0: float, theta2: float) -> tuple[float, float, float]:
    """Polynomial factors ``(p0, p1, p2)`` of the exact second-state width condition."""
    t0, t2 = theta0, theta2
    p0 = (t0 + 3 * t2) * (7 * t0**3 + 15 * t0**2 * t2 + 5 * t0 * t2**2 + 5 * t2**3)
    p1 = (3 * t0 + t2) * (5 * t0**3 + 5 * t0**2 * t2 + 15 * t0 * t2**2 + 7 * t2**3)
    p2 = 105 * t0**4 + 180 * t0**3 * t2 + 310 * t0**2 * t2**2 + 244 * t0 * t2**3 + 57 * t2**4
    return p0, p1, p2


def septic_residual(theta2: float, theta0: float, p: DimensionlessPotential) -> float:
    p0, p1, p2 = septic_polynomials(theta0, theta2)
    return theta2**3 * p0 - 0.5 * p.eps2 * theta2 * p1 - p.eps4 / 24.0 * p2


def septic_root_theta2(theta0: float, p: DimensionlessPotential) -> float:
    """Solve the full septic width condition for ``theta2`` by bracketed root finding.

    Used only to validate the cubic approximation of :func:`theta_root` at
    level 2.
    """
    if not theta0 > 0.0:
        raise ValueError(f"theta0 must be positive, got {theta0}")
    lo, hi = 0.5 * theta0, 4.0 * theta0
    # scale out theta0^7 so the residual stays O(1) over wide parameter ranges
    scale = theta0**7

    def g(t: float) -> float:
        return septic_residual(t, theta0, p) / scale

    while g(lo) > 0.0 and lo > 1e-9:
        lo *= 0.5
    while g(hi) < 0.0 and hi < 1e9:
        hi *= 2.0
    if not (g(lo) <= 0.0 <= g(hi)):
        raise RuntimeError(f"no sign change of the septic residual in [{lo:.3e}, {hi:.3e}]")
    return brentq(g, lo, hi, xtol=1e-15 * theta0, rtol=4 * np.finfo(float).eps, maxiter=500)


def energy_coefficients(theta0: float, theta2: float) -> tuple[float, float, float, float]:
    """Exact rational coefficients ``A, B, C, D`` of the second-excited-state energy."""
    t0, t2 = theta0, theta2
    den = 3 * t0**2 + 2 * t0 * t2 + 3 * t2**2
    a = (7 * t0**2 + 18 * t0 * t2 + 15 * t2**2) / den
    b = (15 * t0**2 + 18 * t0 * t2 + 7 * t2**2) / den
    c = (3 * t0**2 + 4 * t0 * t2 + t2**2) / den
    d = (t0 + t2) ** 2 / (4.0 * den)
    return a, b, c, d


def _energies(c: CircuitEnergies, w: AnsatzWidths) -> tuple[float, float, float]:
    t0, t1, t2 = w.theta0, w.theta1, w.theta2
    e0 = 2 * t0 * c.e_c + c.e_l / (4 * t0) + math.exp(-1 / (4 * t0)) * c.e_j
    e1 = 6 * t1 * c.e_c + 3 * c.e_l / (4 * t1) + (1 - 1 / (2 * t1)) * math.exp(-1 / (4 * t1)) * c.e_j
    a, b, cc, d = energy_coefficients(t0, t2)
    e2 = (
        2 * a * t2 * c.e_c
        + b * c.e_l / (4 * t2)
        + (1 - cc / t2 + d / t2**2) * math.exp(-1 / (4 * t2)) * c.e_j
    )
    return e0, e1, e2


def variational_energies(c: CircuitEnergies, *, atol_phi: float = 1e-12) -> VariationalSpectrum:
    """Closed-form estimates of the three lowest energies of ``c`` at the sweet spot.

    Raises
    ------
    ValueError
        if ``c`` is not biased at ``phi_diff = pi`` or lies in the double-well regime
    """
    if abs(c.phi_diff - SWEET_SPOT) > atol_phi:
        raise ValueError(f"variational estimate requires phi_diff = pi, got {c.phi_diff}")
    widths = ansatz_widths(to_dimensionless(c))
    return VariationalSpectrum(*_energies(c, widths), widths=widths)


def dimensionless_spectrum(p: DimensionlessPotential) -> VariationalSpectrum:
    """Variational spectrum of ``H1`` itself (energies in units of ``4 E_C``)."""
    c = CircuitEnergies(e_j=p.eps4, e_l=p.eps2 + p.eps4, e_c=0.25)
    return variational_energies(c)


def ansatz_value(level: int, widths: AnsatzWidths, phi):
    """Normalized trial wavefunction of ``level`` evaluated at ``phi``."""
    _check_level(level)
    phi = np.asarray(phi, dtype=float)
    t = widths[level]
    norm = (t / math.pi) ** 0.25
    envelope = np.exp(-0.5 * t * phi**2)
    if level == 0:
        return norm * envelope
    if level == 1:
        return norm * math.sqrt(2 * t) * phi * envelope
    t0 = widths.theta0
    lam = t0 + t
    den = math.sqrt(3 * t0**2 + 2 * t0 * t + 3 * t**2)
    return norm * 2 * t * (lam * phi**2 - 1) / den * envelope
