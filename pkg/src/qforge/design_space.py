"""Design coordinates (f01, E_J/E_L, Z), their inverse mapping, and grid sweeps."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import coherence
from .coherence import EnvelopeDomainError
from .eigensolver import (
    Spectrum,
    default_grid,
    diagonalize,
    flux_curvature,
    matrix_element_n,
    matrix_element_phi,
    omega01,
)
from .fidelity import average_gate_infidelity, gate_duration
from .qubit_model import GHZ, CircuitEnergies, DimensionlessPotential, NoiseEnvironment, ec_over_el
from .variational import dimensionless_spectrum

Z_MIN, Z_MAX = 100.0, 5000.0
F01_TOL = 1e-4  # GHz
MAX_SECANT = 15


class DesignConvergenceError(RuntimeError):
    def __init__(self, message: str, trace: list[tuple[float, float]]):
        super().__init__(f"{message}; secant trace (e_l, f01): {trace}")
        self.trace = trace


@dataclass(frozen=True)
class DesignPoint:
    f01: float  # GHz
    ratio: float  # E_J / E_L
    z: float  # ohm

    def __post_init__(self) -> None:
        if not self.f01 > 0:
            raise ValueError(f"f01 must be positive, got {self.f01}")
        if not 0.0 <= self.ratio <= 1.0:
            raise ValueError(f"ratio must lie in [0, 1], got {self.ratio}")
        if not Z_MIN <= self.z <= Z_MAX:
            raise ValueError(f"z must lie in [{Z_MIN}, {Z_MAX}] ohm, got {self.z}")


def design_potential(ratio: float, z: float) -> DimensionlessPotential:
    """(eps2, eps4) fixed by the energy ratio and the mode impedance alone."""
    q = ec_over_el(z)
    return DimensionlessPotential((1.0 - ratio) / (4.0 * q), ratio / (4.0 * q))


def _unit_circuit(ratio: float, z: float, e_l: float) -> CircuitEnergies:
    return CircuitEnergies(e_j=ratio * e_l, e_l=e_l, e_c=ec_over_el(z) * e_l)


def analytic_seed(d: DesignPoint) -> CircuitEnergies:
    """Energies whose variational f01 equals the target exactly.

    The variational f01 in units of ``4 E_C`` depends only on (eps2, eps4),
    so the target fixes the overall energy scale linearly.
    """
    g = dimensionless_spectrum(design_potential(d.ratio, d.z)).f01
    e_l = d.f01 / (4.0 * ec_over_el(d.z) * g)
    return _unit_circuit(d.ratio, d.z, e_l)


def _refine(d: DesignPoint, seed: CircuitEnergies, k: int) -> tuple[CircuitEnergies, Spectrum]:
    grid = default_grid(seed)  # depends on energy ratios only

    def evaluate(e_l: float) -> tuple[CircuitEnergies, Spectrum]:
        c = _unit_circuit(d.ratio, d.z, e_l)
        return c, diagonalize(c, grid, k)

    trace: list[tuple[float, float]] = []
    x0 = seed.e_l
    c0, s0 = evaluate(x0)
    r0 = s0.f01 - d.f01
    trace.append((x0, s0.f01))
    if abs(r0) < F01_TOL:
        return c0, s0
    # first step is the secant through the origin (f01 vanishes with the scale)
    x1 = x0 * d.f01 / s0.f01
    for _ in range(MAX_SECANT):
        c1, s1 = evaluate(x1)
        r1 = s1.f01 - d.f01
        trace.append((x1, s1.f01))
        if abs(r1) < F01_TOL:
            return c1, s1
        if r1 == r0:
            break
        x0, r0, x1 = x1, r1, x1 - r1 * (x1 - x0) / (r1 - r0)
        if not x1 > 0:
            break
    raise DesignConvergenceError(f"could not reach f01 = {d.f01} GHz within {F01_TOL} GHz", trace)


def design_to_energies(d: DesignPoint, refine: bool = True) -> CircuitEnergies:
    """Map a design point to circuit energies.

    With ``refine`` a secant iteration on ``E_L`` (ratios held fixed) drives
    the numerically diagonalized f01 to the target within 1e-4 GHz.
    """
    seed = analytic_seed(d)
    if not refine:
        return seed
    return _refine(d, seed, 2)[0]


def design_spectrum(d: DesignPoint, k: int = 3) -> tuple[CircuitEnergies, Spectrum]:
    """Refined energies together with the spectrum computed at them."""
    return _refine(d, analytic_seed(d), k)


# --- sweeps -----------------------------------------------------------------

FLAG_HARMONIC = "zero_anharmonicity"
FLAG_FLUX_INSENSITIVE = "flux_insensitive"
FLAG_ENVELOPE = "envelope_domain"
FLAG_SOLVER = "solver_failure"


@dataclass(frozen=True)
class SweepCell:
    ratio: float
    z: float
    f01_target: float
    energies: CircuitEnergies | None
    f01: float
    alpha: float
    kappa: float
    gamma1_flux: float
    gamma1_diel: float
    t_phi: float
    infidelity: float
    flags: tuple[str, ...] = ()

    @property
    def t1(self) -> float:
        total = self.gamma1_flux + self.gamma1_diel
        return math.inf if total == 0 else 1.0 / total

    @property
    def coherence_ratio(self) -> float:
        """``T~phi / T1``; infinite for flux-insensitive cells."""
        return self.t_phi / self.t1


def evaluate_cell(
    f01: float, ratio: float, z: float, env: NoiseEnvironment, envelope_mode: str = "strict"
) -> SweepCell:
    """All sweep metrics at one design point; failures become flags."""
    nan = math.nan
    try:
        c, s = design_spectrum(DesignPoint(f01, ratio, z))
    except Exception as exc:  # noqa: BLE001 - recorded as a flag
        return SweepCell(ratio, z, f01, None, nan, nan, nan, nan, nan, nan, nan, (FLAG_SOLVER, type(exc).__name__))

    flags: list[str] = []
    phi01 = matrix_element_phi(s, 0, 1)
    n01 = matrix_element_n(s, 0, 1)
    w01 = omega01(s)
    relax = coherence.relaxation(c, env, phi01, n01, w01)
    kappa = flux_curvature(c, s)
    t_phi = coherence.DephasingModel(kappa, env.a_phi).t_phi_tilde
    if ratio == 0.0 or kappa == 0.0:
        flags.append(FLAG_FLUX_INSENSITIVE)
    alpha = 0.0 if ratio == 0.0 else s.alpha

    infidelity = nan
    if alpha == 0.0:
        flags.append(FLAG_HARMONIC)
    else:
        gate = gate_duration(2 * math.pi * GHZ * alpha, env.nu)
        try:
            env_re = coherence.dephasing_envelope(gate.t_g, kappa, env).real
        except EnvelopeDomainError:
            flags.append(FLAG_ENVELOPE)
            env_re = None
            if envelope_mode == "plot":
                edge = coherence.envelope_time_limit(kappa, env) * (1 - 1e-12)
                env_re = coherence.dephasing_envelope(edge, kappa, env).real
        if env_re is not None:
            infidelity = average_gate_infidelity(relax.gamma1_total, gate.t_g, env_re)
    return SweepCell(
        ratio, z, f01, c, s.f01, alpha, kappa, relax.gamma1_flux, relax.gamma1_diel, t_phi, infidelity, tuple(flags)
    )


def default_axes(n_ratio: int = 11, n_z: int = 11) -> tuple[np.ndarray, np.ndarray]:
    """Ratios linear on [0, 1], impedances logarithmic on [100, 5000] ohm."""
    return np.linspace(0.0, 1.0, n_ratio), np.geomspace(Z_MIN, Z_MAX, n_z)


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("QFORGE_THREADS", "1"))
    return max(1, int(threads))


@dataclass(frozen=True)
class SweepResult:
    f01: float
    ratios: np.ndarray
    zs: np.ndarray
    cells: tuple[SweepCell, ...]  # row-major: ratio outer, z inner
    env: NoiseEnvironment
    metric: str = "infidelity"
    envelope_mode: str = "strict"
    config: dict = field(default_factory=dict)

    def cell(self, i: int, j: int) -> SweepCell:
        return self.cells[i * len(self.zs) + j]

    def grid(self, attr: str) -> np.ndarray:
        values = [getattr(c, attr) for c in self.cells]
        return np.asarray(values, dtype=float).reshape(len(self.ratios), len(self.zs))

    def flagged(self) -> list[SweepCell]:
        return [c for c in self.cells if c.flags]

    def metric_grid(self) -> np.ndarray:
        return self.grid("infidelity" if self.metric == "infidelity" else "coherence_ratio")

    def to_csv(self) -> str:
        return sweep_csv(self)


def run_sweep(
    f01: float,
    ratios,
    zs,
    env: NoiseEnvironment,
    *,
    metric: str = "infidelity",
    envelope_mode: str = "strict",
    threads: int | None = None,
    config: dict | None = None,
) -> SweepResult:
    """Evaluate every (ratio, z) cell; results are assembled in grid order."""
    if metric not in ("infidelity", "coherence-ratio"):
        raise ValueError(f"unknown metric {metric!r}")
    if envelope_mode not in ("strict", "plot"):
        raise ValueError(f"unknown envelope mode {envelope_mode!r}")
    ratios = np.asarray(ratios, dtype=float)
    zs = np.asarray(zs, dtype=float)
    points = [(float(r), float(z)) for r in ratios for z in zs]

    def work(point):
        return evaluate_cell(f01, point[0], point[1], env, envelope_mode)

    n_threads = resolve_threads(threads)
    if n_threads == 1:
        cells = [work(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            cells = list(pool.map(work, points))
    return SweepResult(f01, ratios, zs, tuple(cells), env, metric, envelope_mode, dict(config or {}))


def sweep_infidelity(f01: float, n_ratio: int, n_z: int, env: NoiseEnvironment, **kwargs) -> SweepResult:
    ratios, zs = default_axes(n_ratio, n_z)
    return run_sweep(f01, ratios, zs, env, metric="infidelity", **kwargs)


def sweep_coherence_ratio(f01: float, n_ratio: int, n_z: int, env: NoiseEnvironment, **kwargs) -> SweepResult:
    ratios, zs = default_axes(n_ratio, n_z)
    return run_sweep(f01, ratios, zs, env, metric="coherence-ratio", **kwargs)


def optimum_trace(r: SweepResult) -> list[tuple[float, float, float]]:
    """Per-ratio minimum of the infidelity over impedance (ties go to the smaller z)."""
    values = r.grid("infidelity")
    trace = []
    for i, ratio in enumerate(r.ratios):
        row = values[i]
        if np.all(np.isnan(row)):
            continue
        j = int(np.nanargmin(row))
        trace.append((float(ratio), float(r.zs[j]), float(row[j])))
    return trace


def global_optimum(r: SweepResult) -> tuple[float, float, float] | None:
    trace = optimum_trace(r)
    if not trace:
        return None
    return min(trace, key=lambda t: (t[2], t[1]))


CSV_COLUMNS = (
    "ratio",
    "z_ohm",
    "f01_GHz",
    "e_j_GHz",
    "e_l_GHz",
    "e_c_GHz",
    "alpha_GHz",
    "kappa_rad_per_s_per_phi0sq",
    "gamma1_flux_per_s",
    "gamma1_diel_per_s",
    "t1_s",
    "t_phi_s",
    "t_phi_over_t1",
    "infidelity",
    "flags",
)


def fmt(x: float) -> str:
    """17 significant digits, round-trip exact."""
    return format(float(x), ".17g")


def sweep_rows(r: SweepResult) -> list[list[str]]:
    rows = []
    for c in r.cells:
        e = c.energies
        ej, el, ec = (e.e_j, e.e_l, e.e_c) if e is not None else (math.nan,) * 3
        rows.append(
            [
                fmt(c.ratio),
                fmt(c.z),
                fmt(c.f01),
                fmt(ej),
                fmt(el),
                fmt(ec),
                fmt(c.alpha),
                fmt(c.kappa),
                fmt(c.gamma1_flux),
                fmt(c.gamma1_diel),
                fmt(c.t1),
                fmt(c.t_phi),
                fmt(c.coherence_ratio),
                fmt(c.infidelity),
                ";".join(c.flags),
            ]
        )
    return rows


def write_csv(header, rows, comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def sweep_csv(r: SweepResult, comment: str | None = None) -> str:
    return write_csv(CSV_COLUMNS, sweep_rows(r), comment)


def sweep_summary(r: SweepResult) -> dict:
    best = global_optimum(r)
    return {
        "f01_GHz": r.f01,
        "metric": r.metric,
        "envelope_mode": r.envelope_mode,
        "grid": {"ratios": [float(x) for x in r.ratios], "z_ohm": [float(z) for z in r.zs]},
        "noise": r.env.to_dict(),
        "optimum_trace": [{"ratio": a, "z_ohm": b, "infidelity": c} for a, b, c in optimum_trace(r)],
        "global_optimum": None if best is None else {"ratio": best[0], "z_ohm": best[1], "infidelity": best[2]},
        "flagged_cells": [
            {"ratio": c.ratio, "z_ohm": c.z, "flags": list(c.flags)} for c in r.flagged()
        ],
        "config": r.config,
    }


# --- relaxation-time studies -------------------------------------------------


@dataclass(frozen=True)
class T1Row:
    f01: float
    a_phi: float
    q_diel: float
    gamma1_flux: float
    gamma1_diel: float

    @property
    def t1(self) -> float:
        return 1.0 / (self.gamma1_flux + self.gamma1_diel)

    @property
    def t1_flux(self) -> float:
        return math.inf if self.gamma1_flux == 0 else 1.0 / self.gamma1_flux

    @property
    def t1_diel(self) -> float:
        return math.inf if self.gamma1_diel == 0 else 1.0 / self.gamma1_diel


def _t1_row(c: CircuitEnergies, s: Spectrum, env: NoiseEnvironment) -> T1Row:
    relax = coherence.relaxation(c, env, matrix_element_phi(s, 0, 1), matrix_element_n(s, 0, 1), omega01(s))
    return T1Row(s.f01, env.a_phi, env.q_diel, relax.gamma1_flux, relax.gamma1_diel)


def t1_vs_frequency(ratio: float, z: float, env: NoiseEnvironment, f01_list) -> list[T1Row]:
    """Relaxation time along a frequency sweep at fixed (E_J/E_L, Z)."""
    rows = []
    for f in f01_list:
        c, s = design_spectrum(DesignPoint(float(f), ratio, z), k=2)
        rows.append(_t1_row(c, s, env))
    return rows


def t1_noise_grid(
    a_phi_list, q_diel_list, *, f01: float = 1.0, ratio: float = 1.0, z: float = 1000.0, temperature: float = 0.025
) -> list[T1Row]:
    """Relaxation time over a grid of flux-noise amplitudes and quality factors."""
    c, s = design_spectrum(DesignPoint(f01, ratio, z), k=2)
    rows = []
    for a in a_phi_list:
        for q in q_diel_list:
            env = NoiseEnvironment(a_phi=float(a), q_diel=float(q), temperature=temperature)
            rows.append(_t1_row(c, s, env))
    return rows


def loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


__all__ = [
    "DesignPoint",
    "SweepCell",
    "SweepResult",
    "T1Row",
    "analytic_seed",
    "design_potential",
    "design_spectrum",
    "design_to_energies",
    "evaluate_cell",
    "global_optimum",
    "loglog_slope",
    "optimum_trace",
    "run_sweep",
    "sweep_coherence_ratio",
    "sweep_infidelity",
    "t1_noise_grid",
    "t1_vs_frequency",
]
