"""Numerical reference spectra of the single-mode circuit Hamiltonian.

The phase-basis Hamiltonian ``-4 E_C d^2/dphi^2 + E_L phi^2 / 2 - E_J cos(phi - phi_diff)``
is discretized with a three-point stencil and Dirichlet boundaries, which
keeps it symmetric tridiagonal for every bias. With that discretization the
commutator ``[H, phi] = -8 i E_C n`` holds exactly when ``n`` is the central
difference, so charge matrix elements obey the identity to rounding.

The transmon is handled separately in the integer charge basis.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .qubit_model import SWEET_SPOT, CircuitEnergies, GHZ
from .tridiag import EigensolverError, lowest_eigenpairs

MAX_LEVELS = 12
MIN_POINTS = 201
MAX_POINTS = 400_001
HALF_WIDTH = 12.0
# phase step in units of the zero-point width 1/sqrt(theta); sets the
# stencil error of the lowest levels near 1e-7 relative
STEP_PER_WIDTH = 0.0014
TAIL_TOL = 1e-8


class BoundaryLeakageError(EigensolverError):
    """An eigenstate does not decay before the edge of the phase grid."""


class ChargeCutoffError(EigensolverError):
    """The charge basis is too small for the requested transmon levels."""


@dataclass(frozen=True)
class PhaseGrid:
    phi_min: float
    phi_max: float
    n_points: int

    def __post_init__(self) -> None:
        if not self.phi_min < self.phi_max:
            raise ValueError(f"phi_min must be below phi_max, got [{self.phi_min}, {self.phi_max}]")
        if self.n_points < MIN_POINTS:
            raise ValueError(f"n_points must be at least {MIN_POINTS}, got {self.n_points}")

    @property
    def step(self) -> float:
        return (self.phi_max - self.phi_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.phi_min, self.phi_max, self.n_points)

    def refined(self, factor: int = 2) -> "PhaseGrid":
        """Same interval with the spacing divided by ``factor``."""
        return PhaseGrid(self.phi_min, self.phi_max, factor * (self.n_points - 1) + 1)


@dataclass(frozen=True)
class Spectrum:
    """Lowest eigenpairs on a phase grid.

    ``states[i]`` is normalized so that ``sum(states[i]**2) * grid.step == 1``.
    """

    energies: np.ndarray
    states: np.ndarray
    grid: PhaseGrid
    circuit: CircuitEnergies | None = None

    def __post_init__(self) -> None:
        self.energies.setflags(write=False)
        self.states.setflags(write=False)

    @property
    def levels(self) -> int:
        return len(self.energies)

    @property
    def f01(self) -> float:
        return float(self.energies[1] - self.energies[0])

    @property
    def f12(self) -> float:
        return float(self.energies[2] - self.energies[1])

    @property
    def alpha(self) -> float:
        return float(self.energies[2] - 2 * self.energies[1] + self.energies[0])


@dataclass(frozen=True)
class ChargeSpectrum:
    energies: np.ndarray
    states: np.ndarray
    charges: np.ndarray = field(repr=False)

    @property
    def f01(self) -> float:
        return float(self.energies[1] - self.energies[0])

    @property
    def alpha(self) -> float:
        return float(self.energies[2] - 2 * self.energies[1] + self.energies[0])


def potential(c: CircuitEnergies, phi):
    return 0.5 * c.e_l * np.square(phi) - c.e_j * np.cos(np.asarray(phi) - c.phi_diff)


def _is_even_bias(phi_diff: float) -> bool:
    r = math.remainder(phi_diff, math.pi)
    return abs(r) < 1e-12


def potential_minimum(c: CircuitEnergies) -> float:
    """Location of the global potential minimum.

    Potentials that are even in phi (bias 0 or pi) return 0 so that the grid
    stays mirror-symmetric, even when the minimum itself is a double well.
    """
    if _is_even_bias(c.phi_diff) or c.e_j == 0.0:
        return 0.0
    reach = min(c.e_j / c.e_l, 8 * math.pi) + 0.5
    coarse = np.linspace(-reach, reach, 4001)
    i = int(np.argmin(potential(c, coarse)))
    dx = coarse[1] - coarse[0]
    res = minimize_scalar(
        lambda x: float(potential(c, x)),
        bounds=(coarse[i] - dx, coarse[i] + dx),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(res.x)


def _width_scales(c: CircuitEnergies, mu: float) -> tuple[float, float]:
    # inverse squared zero-point widths from the local well and from the shunt
    curvature = c.e_l + c.e_j * math.cos(mu - c.phi_diff)
    eps2 = max(curvature, 0.0) / (4 * c.e_c)
    eps4 = abs(c.e_j * math.cos(mu - c.phi_diff)) / (4 * c.e_c)
    local = max(math.sqrt(eps2 / 2), (eps4 / 8) ** (1 / 3), 1e-6)
    shunt = math.sqrt(c.e_l / (8 * c.e_c))
    return min(local, shunt), max(local, shunt)


def default_grid(c: CircuitEnergies) -> PhaseGrid:
    """Grid centered on the potential minimum, sized by the zero-point width.

    The half-width is ``max(12, 10 / sqrt(theta_min))`` and the step
    ``0.0014 / sqrt(theta_max)``, where the thetas are inverse squared widths
    estimated from the local well curvature/quartic term and from the shunt.
    """
    if not c.e_l > 0.0:
        raise ValueError("phase-basis diagonalization needs e_l > 0; use transmon_diagonalize")
    mu = potential_minimum(c)
    theta_min, theta_max = _width_scales(c, mu)
    half = max(HALF_WIDTH, 10.0 / math.sqrt(theta_min))
    step = STEP_PER_WIDTH / math.sqrt(theta_max)
    n = int(math.ceil(2 * half / step)) + 1
    n = min(max(n | 1, MIN_POINTS), MAX_POINTS)
    return PhaseGrid(mu - half, mu + half, n)


def hamiltonian_tridiagonal(c: CircuitEnergies, grid: PhaseGrid) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the discretized Hamiltonian in GHz."""
    phi = grid.points
    h = grid.step
    kinetic = 4.0 * c.e_c / h**2
    diag = 2.0 * kinetic + potential(c, phi)
    off = np.full(grid.n_points - 1, -kinetic)
    return diag, off


def diagonalize(c: CircuitEnergies, grid: PhaseGrid | None = None, k: int = 4) -> Spectrum:
    """Lowest ``k`` eigenpairs of the circuit Hamiltonian on a phase grid.

    Raises
    ------
    BoundaryLeakageError
        if any computed state exceeds ``1e-8`` at the grid edges
    EigensolverError
        if bisection or inverse iteration fails
    """
    if not 1 <= k <= MAX_LEVELS:
        raise ValueError(f"k must lie in [1, {MAX_LEVELS}], got {k}")
    if grid is None:
        grid = default_grid(c)
    diag, off = hamiltonian_tridiagonal(c, grid)
    values, vectors = lowest_eigenpairs(diag, off, k)
    states = vectors / math.sqrt(grid.step)
    edge = np.max(np.abs(states[:, [0, 1, -2, -1]]), axis=1)
    if np.any(edge > TAIL_TOL):
        worst = int(np.argmax(edge))
        raise BoundaryLeakageError(
            f"state {worst} reaches {edge[worst]:.2e} at the grid edge of "
            f"[{grid.phi_min:.3f}, {grid.phi_max:.3f}]; widen the grid"
        )
    return Spectrum(values, states, grid, c)


def extrapolated_energies(
    c: CircuitEnergies, k: int = 3, grid: PhaseGrid | None = None, coarsen: int = 4
) -> np.ndarray:
    """Lowest ``k`` energies with the O(h^2) stencil error removed.

    Richardson extrapolation ``(4 E(h/2) - E(h)) / 3`` over a grid ``coarsen``
    times coarser than the default and its halving. Needed wherever small
    differences of energies matter, e.g. the anharmonicity of a nearly
    harmonic circuit.
    """
    if grid is None:
        fine = default_grid(c)
        n = max((fine.n_points - 1) // (2 * coarsen) * 2 + 1, MIN_POINTS)
        grid = PhaseGrid(fine.phi_min, fine.phi_max, n)
    coarse = diagonalize(c, grid, k).energies
    fine_e = diagonalize(c, grid.refined(2), k).energies
    return (4.0 * fine_e - coarse) / 3.0


def transmon_diagonalize(
    e_j: float, e_c: float, n_g: float = 0.0, cutoff: int = 30, k: int = 4
) -> ChargeSpectrum:
    """Lowest ``k`` levels of ``4 E_C (n - n_g)^2 - E_J cos(phi)`` in the charge basis."""
    if cutoff < 30:
        raise ValueError(f"cutoff must be at least 30, got {cutoff}")
    if not 1 <= k <= 6:
        raise ValueError(f"k must lie in [1, 6], got {k}")
    if e_j < 0 or not e_c > 0:
        raise ValueError("need e_j >= 0 and e_c > 0")
    charges = np.arange(-cutoff, cutoff + 1, dtype=float)
    diag = 4.0 * e_c * (charges - n_g) ** 2
    off = np.full(len(charges) - 1, -0.5 * e_j)
    values, vectors = lowest_eigenpairs(diag, off, k)
    top = np.max(vectors[:, [0, -1]] ** 2)
    if top > 1e-10:
        raise ChargeCutoffError(f"top charge-state population {top:.2e} exceeds 1e-10; raise cutoff")
    return ChargeSpectrum(values, vectors, charges)


def matrix_element_phi(s: Spectrum, i: int, j: int) -> float:
    """``|<i| phi |j>|`` by grid quadrature."""
    phi = s.grid.points
    return abs(float(np.dot(s.states[i] * phi, s.states[j]) * s.grid.step))


def _central_difference(psi: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(psi)
    d[1:-1] = psi[2:] - psi[:-2]
    d[0] = psi[1]
    d[-1] = -psi[-2]
    return d / (2 * h)


def matrix_element_n(s: Spectrum, i: int, j: int) -> float:
    """``|<i| n |j>|`` with ``n = -i d/dphi`` as a central difference."""
    h = s.grid.step
    return abs(float(np.dot(s.states[i], _central_difference(s.states[j], h)) * h))


def phase_matrix(s: Spectrum, levels: int | None = None) -> np.ndarray:
    m = s.levels if levels is None else levels
    weighted = s.states[:m] * s.grid.points
    return weighted @ s.states[:m].T * s.grid.step


def flux_curvature(c: CircuitEnergies, spectrum: Spectrum | None = None) -> float:
    """Second flux derivative of ``omega01`` at the sweet spot, in rad/s per flux quantum squared.

    Second-order perturbation theory in the bias, truncated to the three
    lowest states. The bias couples through ``E_L phi``, so

        d^2 E_n / d phi_diff^2 = 2 E_L^2 sum_m |<m|phi|n>|^2 / (E_n - E_m)

    and ``phi_diff = 2 pi Phi / Phi_0`` adds a factor ``4 pi^2``.
    """
    if abs(c.phi_diff - SWEET_SPOT) > 1e-12:
        raise ValueError(f"flux curvature is evaluated at phi_diff = pi, got {c.phi_diff}")
    if c.e_j == 0.0:
        return 0.0
    if spectrum is None:
        spectrum = diagonalize(c, k=3)
    e = spectrum.energies[:3]
    x = phase_matrix(spectrum, 3) ** 2
    shift1 = x[0, 1] / (e[1] - e[0]) + x[2, 1] / (e[1] - e[2])
    shift0 = x[1, 0] / (e[0] - e[1]) + x[2, 0] / (e[0] - e[2])
    d2f_dphi2 = 2.0 * c.e_l**2 * (shift1 - shift0)  # GHz per rad^2
    return 4.0 * math.pi**2 * 2.0 * math.pi * GHZ * d2f_dphi2


def _f01_at(c: CircuitEnergies, phi_diff: float, grid: PhaseGrid) -> float:
    return diagonalize(c.with_phi(phi_diff), grid, k=2).f01


def flux_curvature_fd(c: CircuitEnergies, h: float = 1e-2, grid: PhaseGrid | None = None) -> float:
    """Finite-difference oracle for :func:`flux_curvature`.

    Central second difference of ``omega01`` around ``phi_diff = pi`` with all
    evaluations on one fixed grid. A ``RuntimeWarning`` is issued if the
    estimate with step ``h / 2`` differs by more than 10 %.
    """
    if not 1e-4 <= h <= 1e-1:
        raise ValueError(f"step must lie in [1e-4, 1e-1], got {h}")
    if c.e_j == 0.0:
        return 0.0
    c = c.with_phi(SWEET_SPOT)
    if grid is None:
        grid = default_grid(c)
    f0 = _f01_at(c, SWEET_SPOT, grid)

    def second_difference(step: float) -> float:
        fp = _f01_at(c, SWEET_SPOT + step, grid)
        fm = _f01_at(c, SWEET_SPOT - step, grid)
        return (fp - 2 * f0 + fm) / step**2

    coarse = second_difference(h)
    fine = second_difference(h / 2)
    if abs(coarse - fine) > 0.1 * max(abs(coarse), abs(fine)):
        warnings.warn(
            f"finite-difference curvature unstable: {coarse:.4e} (h={h}) vs {fine:.4e} (h={h / 2})",
            RuntimeWarning,
            stacklevel=2,
        )
    return 4.0 * math.pi**2 * 2.0 * math.pi * GHZ * coarse


def omega01(spectrum: Spectrum | ChargeSpectrum) -> float:
    """Qubit angular frequency in rad/s."""
    return 2.0 * math.pi * GHZ * spectrum.f01
