"""Side-by-side flux profiles and coherence budgets of unimon, transmon and fluxonium."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import coherence
from .eigensolver import (
    ChargeSpectrum,
    PhaseGrid,
    default_grid,
    diagonalize,
    matrix_element_n,
    matrix_element_phi,
    transmon_diagonalize,
)
from .fidelity import gate_speed_limit
from .qubit_model import GHZ, CircuitEnergies, NoiseEnvironment, impedance

KINDS = ("unimon", "fluxonium", "transmon")
COMPARE_Q = 1e6
COMPARE_T = 0.030
FD_STEP = 1e-3  # flux quanta

# quality factors reported for each platform, marked on the Q_diel axis
MARKER_Q = {"unimon": 3.5e5, "transmon": 9e6, "fluxonium": 3e6}


@dataclass(frozen=True)
class QubitSpec:
    name: str
    kind: str
    env: NoiseEnvironment
    energies: CircuitEnergies | None = None
    e_j_max: float | None = None  # transmon only, GHz
    e_c: float | None = None  # transmon only, GHz
    n_g: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "transmon":
            if self.energies is not None:
                raise ValueError("a transmon carries no inductive energy; give e_j_max and e_c")
            if self.e_j_max is None or self.e_c is None:
                raise ValueError("a transmon needs e_j_max and e_c")
        elif self.energies is None:
            raise ValueError(f"{self.kind} needs circuit energies")

    @property
    def sweet_spot(self) -> float:
        """Optimal flux bias in flux quanta."""
        return 0.0 if self.kind == "transmon" else 0.5

    @property
    def impedance(self) -> float | None:
        if self.energies is None:
            return None
        return impedance(self.energies)

    def with_n_g(self, n_g: float) -> "QubitSpec":
        return QubitSpec(self.name, self.kind, self.env, self.energies, self.e_j_max, self.e_c, n_g)

    def with_env(self, env: NoiseEnvironment) -> "QubitSpec":
        return QubitSpec(self.name, self.kind, env, self.energies, self.e_j_max, self.e_c, self.n_g)

    def to_dict(self) -> dict:
        out = {"name": self.name, "kind": self.kind, "noise": self.env.to_dict(), "n_g": self.n_g}
        if self.energies is not None:
            out["energies_GHz"] = self.energies.to_dict()
            out["z_ohm"] = self.impedance
        else:
            out["e_j_max_GHz"] = self.e_j_max
            out["e_c_GHz"] = self.e_c
        return out


def _env(a_phi_micro: float) -> NoiseEnvironment:
    return NoiseEnvironment(a_phi=a_phi_micro * 1e-6, q_diel=COMPARE_Q, temperature=COMPARE_T)


def builtin_specs() -> dict[str, QubitSpec]:
    """The five comparison qubits, keyed by name."""
    specs = [
        QubitSpec("unimon1", "unimon", _env(15.0), CircuitEnergies(19.0, 25.2, 0.30)),
        QubitSpec("unimon2", "unimon", _env(9.1), CircuitEnergies(5.4, 7.1, 0.78)),
        QubitSpec("unimon3", "unimon", _env(6.8), CircuitEnergies(2.4, 3.2, 1.4)),
        QubitSpec("transmon", "transmon", _env(1.5), e_j_max=14.0, e_c=0.195),
        QubitSpec("fluxonium", "fluxonium", _env(2.0), CircuitEnergies(6.27, 0.80, 1.41)),
    ]
    return {s.name: s for s in specs}


# --- per-point evaluation ---------------------------------------------------


@dataclass(frozen=True)
class PointSpectrum:
    f01: float  # GHz
    alpha: float  # GHz
    phi01: float
    n01: float


def transmon_e_j(q: QubitSpec, flux: float) -> float:
    """Symmetric-SQUID Josephson energy ``E_J,max |cos(pi Phi / Phi_0)|``."""
    return q.e_j_max * abs(math.cos(math.pi * flux))


def charge_matrix_element(s: ChargeSpectrum, i: int, j: int) -> float:
    return abs(float(np.dot(s.states[i] * s.charges, s.states[j])))


def profile_grid(q: QubitSpec, fluxes) -> PhaseGrid:
    """One phase grid, mirror-symmetric about zero, valid at every flux point."""
    c = q.energies
    grids = [default_grid(c.with_phi(2 * math.pi * f)) for f in fluxes]
    reach = max(max(abs(g.phi_min), abs(g.phi_max)) for g in grids)
    step = min(g.step for g in grids)
    n = int(math.ceil(2 * reach / step)) + 1
    return PhaseGrid(-reach, reach, n | 1)


def _point(q: QubitSpec, flux: float, grid: PhaseGrid | None) -> PointSpectrum:
    if q.kind == "transmon":
        s = transmon_diagonalize(transmon_e_j(q, flux), q.e_c, q.n_g, k=3)
        return PointSpectrum(s.f01, s.alpha, math.nan, charge_matrix_element(s, 0, 1))
    s = diagonalize(q.energies.with_phi(2 * math.pi * flux), grid, k=3)
    return PointSpectrum(s.f01, s.alpha, matrix_element_phi(s, 0, 1), matrix_element_n(s, 0, 1))


def _f01(q: QubitSpec, flux: float, grid: PhaseGrid | None) -> float:
    if q.kind == "transmon":
        return transmon_diagonalize(transmon_e_j(q, flux), q.e_c, q.n_g, k=2).f01
    return diagonalize(q.energies.with_phi(2 * math.pi * flux), grid, k=2).f01


def _c_equivalent(q: QubitSpec) -> CircuitEnergies:
    # the relaxation formulas only read e_l and e_c; a transmon has no e_l
    if q.kind == "transmon":
        return CircuitEnergies(e_j=q.e_j_max, e_l=0.0, e_c=q.e_c)
    return q.energies


def _relaxation(q: QubitSpec, p: PointSpectrum, env: NoiseEnvironment) -> coherence.RelaxationBreakdown:
    w = 2 * math.pi * GHZ * p.f01
    c = _c_equivalent(q)
    flux = 0.0 if q.kind == "transmon" else coherence.gamma1_flux(c, env, p.phi01, w)
    return coherence.RelaxationBreakdown(flux, coherence.gamma1_diel(c, env, p.n01, w))


def _derivatives(q: QubitSpec, flux: float, grid: PhaseGrid | None, f0: float) -> tuple[float, float]:
    """First and second flux derivatives of omega01 (rad/s per Phi0^k)."""
    fp = _f01(q, flux + FD_STEP, grid)
    fm = _f01(q, flux - FD_STEP, grid)
    scale = 2 * math.pi * GHZ
    return scale * (fp - fm) / (2 * FD_STEP), scale * (fp - 2 * f0 + fm) / FD_STEP**2


# --- flux profiles -----------------------------------------------------------


@dataclass(frozen=True)
class FluxPoint:
    flux: float
    f01: float
    alpha: float
    t_g_lim: float
    t1_diel: float
    t1_flux: float
    t_phi_first: float
    t_phi_second: float
    first_order_flag: str = ""


@dataclass(frozen=True)
class FluxProfile:
    spec: QubitSpec
    points: tuple[FluxPoint, ...]

    def __post_init__(self) -> None:
        f = self.flux
        if len(f) > 1 and not np.all(np.diff(f) > 0):
            raise ValueError("flux grid must be strictly increasing")

    @property
    def flux(self) -> np.ndarray:
        return np.array([p.flux for p in self.points])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points], dtype=float)


def _flux_point(q: QubitSpec, flux: float, grid: PhaseGrid | None, slope_scale: float) -> FluxPoint:
    p = _point(q, flux, grid)
    relax = _relaxation(q, p, q.env)
    slope, curvature = _derivatives(q, flux, grid, p.f01)
    try:
        t_lim = gate_speed_limit(2 * math.pi * GHZ * p.f01, 2 * math.pi * GHZ * p.alpha)
    except ValueError:
        t_lim = math.inf
    first = coherence.first_order_dephasing_time(slope, q.env, slope_scale=slope_scale)
    second = coherence.DephasingModel(curvature, q.env.a_phi).t_phi_tilde
    return FluxPoint(
        flux, p.f01, p.alpha, t_lim, relax.t1_diel, relax.t1_flux, first.t_phi, second, first.reason
    )


def _slope_scale(q: QubitSpec) -> float:
    # typical slope magnitude: a full f01 swing per flux quantum
    return 2 * math.pi * GHZ * max(_f01(q, q.sweet_spot, None), 1e-3)


def flux_profile(q: QubitSpec, fluxes, grid: PhaseGrid | None = None) -> FluxProfile:
    """Spectrum, gate speed limit and coherence times along a flux sweep.

    Unimon and fluxonium are biased through ``phi_diff = 2 pi Phi / Phi_0`` and
    solved on one shared phase grid; the transmon is tuned through a symmetric
    SQUID and solved in the charge basis.
    """
    fluxes = np.asarray(fluxes, dtype=float)
    if q.kind != "transmon" and grid is None:
        grid = profile_grid(q, np.concatenate([fluxes - FD_STEP, fluxes + FD_STEP]))
    scale = _slope_scale(q)
    return FluxProfile(q, tuple(_flux_point(q, float(f), grid, scale) for f in fluxes))


# --- relaxation ---------------------------------------------------------------


@dataclass(frozen=True)
class RelaxationRow:
    flux: float
    f01: float
    q_diel: float
    t1_flux: float
    t1_diel: float

    @property
    def t1(self) -> float:
        return 1.0 / (1.0 / self.t1_flux + 1.0 / self.t1_diel)


def sweet_spot_relaxation(q: QubitSpec) -> coherence.RelaxationBreakdown:
    return _relaxation(q, _point(q, q.sweet_spot, None), q.env)


def relaxation_profile(q: QubitSpec, axis: str, values=None) -> list[RelaxationRow]:
    """T1 decomposition along the frequency axis (via flux) or the Q_diel axis.

    For ``axis="frequency"`` the values are flux points whose own f01 forms the
    abscissa; by default the sweep runs from the sweet spot over half a flux
    quantum. For ``axis="q_diel"`` the values are quality factors applied at
    the sweet spot.
    """
    if axis == "frequency":
        if values is None:
            start = q.sweet_spot
            values = start + np.linspace(0.0, 0.45, 46) * (1 if start == 0.0 else -1)
            values = np.sort(values)
        prof = flux_profile(q, values)
        return [RelaxationRow(p.flux, p.f01, q.env.q_diel, p.t1_flux, p.t1_diel) for p in prof.points]
    if axis == "q_diel":
        if values is None:
            values = np.geomspace(1e5, 1e8, 31)
        p = _point(q, q.sweet_spot, None)
        rows = []
        for qd in values:
            relax = _relaxation(q, p, q.env.replace(q_diel=float(qd)))
            rows.append(RelaxationRow(q.sweet_spot, p.f01, float(qd), relax.t1_flux, relax.t1_diel))
        return rows
    raise ValueError(f"axis must be 'frequency' or 'q_diel', got {axis!r}")


# --- dephasing ----------------------------------------------------------------


@dataclass(frozen=True)
class DephasingRow:
    offset: float
    t_phi_first: float
    t_phi_second: float
    first_order_flag: str


def dephasing_vs_offset(q: QubitSpec, offsets) -> list[DephasingRow]:
    """First- and second-order flux-noise dephasing times away from the sweet spot."""
    offsets = np.asarray(offsets, dtype=float)
    if np.any(np.abs(offsets) > 0.05):
        raise ValueError("offsets must satisfy |offset| <= 0.05 flux quanta")
    prof = flux_profile(q, q.sweet_spot + np.sort(offsets))
    order = np.argsort(offsets, kind="stable")
    rows: list[DephasingRow] = [None] * len(offsets)  # type: ignore[list-item]
    for rank, i in enumerate(order):
        p = prof.points[rank]
        rows[i] = DephasingRow(float(offsets[i]), p.t_phi_first, p.t_phi_second, p.first_order_flag)
    return rows


def manifest(specs) -> dict:
    """Provenance record of the qubits used in a comparison run."""
    return {
        "qubits": [s.to_dict() for s in specs],
        "marker_q_diel": dict(MARKER_Q),
        "transmon_tuning": "E_J(Phi) = E_J,max |cos(pi Phi / Phi0)|",
    }


__all__ = [
    "MARKER_Q",
    "DephasingRow",
    "FluxPoint",
    "FluxProfile",
    "QubitSpec",
    "RelaxationRow",
    "builtin_specs",
    "dephasing_vs_offset",
    "flux_profile",
    "manifest",
    "relaxation_profile",
    "sweet_spot_relaxation",
]
