"""Acceptance criteria shared by ``qforge validate`` and the test suite.

Each check returns a :class:`CriterionResult` with the measured quantities
and the tolerance it was held to. Checks never relax their bounds.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import qubit_model
from .compare import builtin_specs, flux_profile, sweet_spot_relaxation
from .design_space import (
    default_axes,
    global_optimum,
    loglog_slope,
    optimum_trace,
    run_sweep,
    sweep_csv,
    sweep_infidelity,
    t1_noise_grid,
    t1_vs_frequency,
)
from .eigensolver import (
    diagonalize,
    extrapolated_energies,
    flux_curvature,
    flux_curvature_fd,
    matrix_element_n,
    matrix_element_phi,
)
from .qubit_model import (
    REFERENCE_ENERGIES,
    REFERENCE_F01,
    REFERENCE_NOISE,
    CircuitEnergies,
    DimensionlessPotential,
    ec_over_el,
)
from .variational import (
    ansatz_widths,
    dimensionless_spectrum,
    septic_root_theta2,
    variational_energies,
)

SEED = 20240611


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    tolerance: str = ""
    elapsed: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        shown = ", ".join(f"{k}={_short(v)}" for k, v in self.measured.items())
        return f"[{status}] {self.number:2d} {self.title}: {shown} (need {self.tolerance}; {self.elapsed:.1f} s)"

    def to_dict(self) -> dict:
        return asdict(self)


def _short(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(str(_short(x)) for x in v) + "]"
    return v


def warm_up() -> None:
    """Compile and cache the numba kernels so timed checks measure steady state."""
    diagonalize(CircuitEnergies(1.0, 2.0, 0.5), k=3)


def _h1_circuit(eps2: float, eps4: float) -> CircuitEnergies:
    return CircuitEnergies(e_j=eps4, e_l=eps2 + eps4, e_c=0.25)


def _random_single_well(rng: np.random.Generator) -> CircuitEnergies:
    ratio = rng.uniform(0.0, 1.0)
    z = math.exp(rng.uniform(math.log(100.0), math.log(5000.0)))
    e_l = rng.uniform(1.0, 30.0)
    return CircuitEnergies(e_j=ratio * e_l, e_l=e_l, e_c=ec_over_el(z) * e_l)


# --- individual criteria ------------------------------------------------------


def criterion_1() -> CriterionResult:
    t = time.perf_counter()
    f01 = diagonalize(REFERENCE_ENERGIES, k=2).f01
    z = qubit_model.impedance(REFERENCE_ENERGIES)
    elapsed = time.perf_counter() - t
    err_f = abs(f01 - REFERENCE_F01) / REFERENCE_F01
    err_z = abs(z - 315.0) / 315.0
    ok = err_f <= 0.01 and err_z <= 0.005 and elapsed < 1.0
    return CriterionResult(
        1,
        "Reference device frequency and impedance",
        ok,
        {"f01_GHz": f01, "f01_rel_err": err_f, "z_ohm": z, "z_rel_err": err_z, "runtime_s": elapsed},
        "f01 within 1% of 4.488 GHz, Z within 0.5% of 315 ohm, < 1 s",
        elapsed,
    )


def variational_error_map(eps2_axis, eps4_axis) -> dict[str, np.ndarray]:
    """Relative variational errors of f01, f12 and alpha against grid-extrapolated numerics."""
    shape = (len(eps2_axis), len(eps4_axis))
    out = {k: np.empty(shape) for k in ("f01", "f12", "alpha")}
    for i, e2 in enumerate(eps2_axis):
        for j, e4 in enumerate(eps4_axis):
            var = dimensionless_spectrum(DimensionlessPotential(e2, e4))
            e = extrapolated_energies(_h1_circuit(e2, e4), k=3)
            num = {"f01": e[1] - e[0], "f12": e[2] - e[1], "alpha": e[2] - 2 * e[1] + e[0]}
            for key in out:
                out[key][i, j] = abs(getattr(var, key) - num[key]) / abs(num[key])
    return out


def criterion_2() -> CriterionResult:
    t = time.perf_counter()
    axis = np.geomspace(1e-2, 1e3, 10)
    err = variational_error_map(axis, axis)
    elapsed = time.perf_counter() - t
    worst = {k: float(v.max()) for k, v in err.items()}
    ok = worst["f01"] <= 0.02 and worst["f12"] <= 0.02 and worst["alpha"] <= 0.05 and elapsed < 30.0
    i, j = np.unravel_index(np.argmax(err["alpha"]), err["alpha"].shape)
    measured = {
        "max_f01_err": worst["f01"],
        "max_f12_err": worst["f12"],
        "max_alpha_err": worst["alpha"],
        "worst_eps": [float(axis[i]), float(axis[j])],
        "runtime_s": elapsed,
    }
    return CriterionResult(
        2, "Variational accuracy envelope", ok, measured, "f01, f12 <= 2%, alpha <= 5%, < 30 s", elapsed
    )


def criterion_3() -> CriterionResult:
    # points with eps4 / eps2 >= 1e4 inside the [1e-2, 1e3] parameter square
    t = time.perf_counter()
    ratios_var, ratios_num = [], []
    for e2 in np.geomspace(1e-2, 1e-1, 3):
        for e4 in np.geomspace(1e4 * e2, 1e3, 3):
            var = dimensionless_spectrum(DimensionlessPotential(e2, e4))
            ratios_var.append(var.alpha / var.f01)
            e = extrapolated_energies(_h1_circuit(e2, e4), k=3)
            ratios_num.append((e[2] - 2 * e[1] + e[0]) / (e[1] - e[0]))
    elapsed = time.perf_counter() - t
    values = ratios_var + ratios_num
    ok = all(0.30 <= r <= 0.36 for r in values)
    return CriterionResult(
        3,
        "Anharmonicity ceiling",
        ok,
        {
            "variational_min": min(ratios_var),
            "variational_max": max(ratios_var),
            "numeric_min": min(ratios_num),
            "numeric_max": max(ratios_num),
        },
        "alpha/f01 in [0.30, 0.36] for eps4/eps2 >= 1e4",
        elapsed,
    )


def criterion_4() -> CriterionResult:
    t = time.perf_counter()
    axis = np.geomspace(1e-6, 1e6, 25)
    ratio_min, ratio_max, worst = math.inf, -math.inf, 0.0
    for e2 in axis:
        for e4 in axis:
            p = DimensionlessPotential(e2, e4)
            w = ansatz_widths(p)
            r = w.theta2 / w.theta0
            ratio_min, ratio_max = min(ratio_min, r), max(ratio_max, r)
            exact = septic_root_theta2(w.theta0, p)
            worst = max(worst, abs(w.theta2 - exact) / exact)
    elapsed = time.perf_counter() - t
    ok = ratio_min >= 1.0 and ratio_max < 2.0 and worst <= 0.01
    return CriterionResult(
        4,
        "Width inequality and septic agreement",
        ok,
        {"theta2_over_theta0_min": ratio_min, "theta2_over_theta0_max": ratio_max, "max_septic_dev": worst},
        "1 <= theta2/theta0 < 2, septic within 1%",
        elapsed,
    )


def criterion_5(n: int = 200) -> CriterionResult:
    t = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst0 = worst1 = math.inf
    violations = 0
    for _ in range(n):
        c = _random_single_well(rng)
        var = variational_energies(c)
        num = diagonalize(c, k=2).energies
        d0, d1 = var.e0 - num[0], var.e1 - num[1]
        worst0, worst1 = min(worst0, d0), min(worst1, d1)
        violations += (d0 < -1e-9) + (d1 < -1e-9)
    elapsed = time.perf_counter() - t
    return CriterionResult(
        5,
        "Variational upper bound",
        violations == 0,
        {"samples": n, "violations": violations, "min_E0_gap_GHz": worst0, "min_E1_gap_GHz": worst1},
        "E_var >= E_num - 1e-9 GHz",
        elapsed,
    )


def criterion_6(n: int = 41, threads: int | None = None) -> CriterionResult:
    t = time.perf_counter()
    r = sweep_infidelity(4.5, n, n, REFERENCE_NOISE, threads=threads)
    elapsed = time.perf_counter() - t
    ratio, z, value = global_optimum(r)
    trace = optimum_trace(r)
    z_opts = [tz for _, tz, _ in trace]
    ok = (
        1e-5 <= value <= 4e-5
        and ratio >= 0.95
        and 700.0 <= z <= 1500.0
        and all(1000.0 <= tz <= 4000.0 for tz in z_opts)
        and elapsed < 300.0
    )
    return CriterionResult(
        6,
        "Infidelity optimum at 4.5 GHz",
        ok,
        {
            "min_infidelity": value,
            "ratio": ratio,
            "z_ohm": z,
            "trace_z_min": min(z_opts),
            "trace_z_max": max(z_opts),
            "grid": f"{n}x{n}",
            "runtime_s": elapsed,
        },
        "min in [1e-5, 4e-5] at ratio >= 0.95, z in [0.7, 1.5] kOhm; trace z in [1, 4] kOhm; < 300 s",
        elapsed,
    )


def criterion_7() -> CriterionResult:
    t = time.perf_counter()
    fit_f = np.linspace(2.0, 6.0, 9)
    fit = t1_vs_frequency(0.754, 315.0, REFERENCE_NOISE, fit_f)
    slope = loglog_slope([r.f01 for r in fit], [r.t1 for r in fit])
    low_f = np.geomspace(0.1, 1.0, 10)
    low = t1_vs_frequency(0.754, 315.0, REFERENCE_NOISE, low_f)
    local = np.gradient(np.log([r.t1 for r in low]), np.log([r.f01 for r in low]))
    elapsed = time.perf_counter() - t
    ok = abs(slope + 1.0) <= 0.15 and bool(np.any(np.abs(local) < 0.8))
    return CriterionResult(
        7,
        "T1 frequency scaling",
        ok,
        {"slope_2_6GHz": slope, "min_abs_local_slope_below_1GHz": float(np.min(np.abs(local)))},
        "slope -1 +/- 0.15 over 2-6 GHz; |slope| < 0.8 somewhere below 1 GHz",
        elapsed,
    )


def criterion_8() -> CriterionResult:
    t = time.perf_counter()
    row = t1_noise_grid([15e-6], [1e7], f01=1.0, ratio=1.0, z=1000.0, temperature=0.025)[0]
    elapsed = time.perf_counter() - t
    return CriterionResult(
        8,
        "T1 at the optimal design",
        row.t1 >= 1e-3,
        {"t1_s": row.t1, "t1_flux_s": row.t1_flux, "t1_diel_s": row.t1_diel},
        "T1 >= 1 ms",
        elapsed,
    )


def criterion_9() -> CriterionResult:
    t = time.perf_counter()
    targets = {"unimon1": (80e-6, 0.2), "unimon2": (1e-3, 0.2), "unimon3": (5.6e-3, 0.2), "fluxonium": (10e-3, 0.3)}
    specs = builtin_specs()
    measured, ok = {}, True
    for name, (target, tol) in targets.items():
        value = sweet_spot_relaxation(specs[name]).t1_flux
        measured[f"{name}_t1_flux_s"] = value
        ok &= abs(value - target) <= tol * target
    return CriterionResult(
        9,
        "Flux-noise-limited sweet-spot T1",
        ok,
        measured,
        "80 us, 1 ms, 5.6 ms (+/-20%); fluxonium 10 ms (+/-30%)",
        time.perf_counter() - t,
    )


def criterion_10() -> CriterionResult:
    t = time.perf_counter()
    specs = builtin_specs()
    u = flux_profile(specs["unimon2"], [0.5]).points[0]
    tr = flux_profile(specs["transmon"], [0.0]).points[0]
    ok = (
        abs(u.f01 - 4.5) <= 0.2
        and abs(u.alpha - 0.8) <= 0.1
        and abs(tr.f01 - 4.5) <= 0.15
        and 0.18 <= abs(tr.alpha) <= 0.25
    )
    return CriterionResult(
        10,
        "Comparison spot values",
        ok,
        {"unimon2_f01_GHz": u.f01, "unimon2_alpha_GHz": u.alpha, "transmon_f01_GHz": tr.f01, "transmon_alpha_GHz": tr.alpha},
        "unimon2 4.5+/-0.2, 0.8+/-0.1 GHz; transmon 4.5+/-0.15 GHz, |alpha| in [0.18, 0.25] GHz",
        time.perf_counter() - t,
    )


def criterion_11() -> CriterionResult:
    t = time.perf_counter()
    rng = np.random.default_rng(SEED + 11)

    comm = 0.0
    for _ in range(100):
        c = _random_single_well(rng)
        s = diagonalize(c, k=2)
        lhs = matrix_element_n(s, 0, 1)
        rhs = s.f01 * matrix_element_phi(s, 0, 1) / (8 * c.e_c)
        comm = max(comm, abs(lhs - rhs) / rhs)

    harm = 0.0
    for _ in range(20):
        e_l = rng.uniform(1.0, 30.0)
        z = math.exp(rng.uniform(math.log(100.0), math.log(5000.0)))
        c = CircuitEnergies(0.0, e_l, ec_over_el(z) * e_l)
        w = math.sqrt(8 * c.e_l * c.e_c)
        phi_zpf = (2 * c.e_c / c.e_l) ** 0.25
        s = diagonalize(c, k=3)
        var = variational_energies(c)
        harm = max(
            harm,
            abs(s.f01 - w) / w,
            abs(s.f12 - w) / w,
            abs(matrix_element_phi(s, 0, 1) - phi_zpf) / phi_zpf,
            abs(matrix_element_n(s, 0, 1) - 0.5 / phi_zpf) / (0.5 / phi_zpf),
            abs(var.f01 - w) / w,
            abs(var.f12 - w) / w,
        )

    kap = 0.0
    for _ in range(50):
        c = _random_single_well(rng)
        if c.e_j == 0.0:
            continue
        pert = flux_curvature(c)
        fd = flux_curvature_fd(c)
        kap = max(kap, abs(pert - fd) / abs(fd))
    elapsed = time.perf_counter() - t
    ok = comm <= 1e-4 and harm <= 1e-6 and kap <= 0.05
    return CriterionResult(
        11,
        "Oracle identities",
        ok,
        {"commutator_rel_err": comm, "harmonic_rel_err": harm, "kappa_rel_err": kap},
        "commutator 1e-4, harmonic 1e-6, kappa 5%",
        elapsed,
    )


def criterion_12() -> CriterionResult:
    t = time.perf_counter()
    ratios, zs = default_axes(11, 11)
    a = sweep_csv(run_sweep(4.5, ratios, zs, REFERENCE_NOISE, threads=1))
    b = sweep_csv(run_sweep(4.5, ratios, zs, REFERENCE_NOISE, threads=1))
    c = sweep_csv(run_sweep(4.5, ratios, zs, REFERENCE_NOISE, threads=3))
    elapsed = time.perf_counter() - t
    return CriterionResult(
        12,
        "Sweep determinism",
        a == b == c,
        {"repeat_identical": a == b, "threaded_identical": a == c, "bytes": len(a.encode())},
        "byte-identical CSV",
        elapsed,
    )


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
    12: criterion_12,
}


def run(numbers=None, report: Callable[[str], None] | None = print) -> list[CriterionResult]:
    warm_up()
    results = []
    for k in numbers or sorted(CRITERIA):
        result = CRITERIA[k]()
        if report is not None:
            report(result.line())
        results.append(result)
    return results


__all__ = ["CRITERIA", "CriterionResult", "run", "variational_error_map", "warm_up"]
