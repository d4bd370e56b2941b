"""Command-line entry point: ``qforge <command> [options]``."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, acceptance, coherence, compare, design_space
from .eigensolver import (
    BoundaryLeakageError,
    ChargeCutoffError,
    diagonalize,
    extrapolated_energies,
    flux_curvature,
    matrix_element_n,
    matrix_element_phi,
    omega01,
)
from .fidelity import PipelineError, infidelity_at
from .qubit_model import SWEET_SPOT, REFERENCE_NOISE, CircuitEnergies, NoiseEnvironment
from .tridiag import EigensolverError
from .variational import variational_energies

CONFIG_SCHEMA = 1
EXIT_FAILED = 1
EXIT_VALIDATION = 2
EXIT_SOLVER = 3

SOLVER_ERRORS = (EigensolverError, BoundaryLeakageError, ChargeCutoffError, design_space.DesignConvergenceError)

# built-in defaults; a config file overrides these, explicit flags override both
DEFAULTS = {
    "phi_diff": SWEET_SPOT,
    "a_phi": REFERENCE_NOISE.a_phi,
    "q_diel": REFERENCE_NOISE.q_diel,
    "temperature": REFERENCE_NOISE.temperature,
    "omega_ir": REFERENCE_NOISE.omega_ir,
    "nu": REFERENCE_NOISE.nu,
    "f01": 4.5,
    "method": "both",
    "metric": "infidelity",
    "n_ratio": 11,
    "n_z": 11,
    "panel": "abc",
    "qubit": None,
    "ng": None,
    "n_flux": 101,
    "out": None,
    "threads": None,
    "strict_envelope": False,
    "json": False,
    "only": None,
}


# design-frequency flags are optional for the single-circuit commands
COMMAND_DEFAULTS = {"coherence": {"f01": None}, "fidelity": {"f01": None}}


class ConfigError(ValueError):
    pass


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON run configuration (flags override its values)")
    p.add_argument("--out", type=Path, help="directory for CSV/JSON outputs")
    p.add_argument("--threads", type=int, help="worker threads (default: $QFORGE_THREADS or 1)")
    p.add_argument("--strict-envelope", action="store_true", default=None, help="fail on envelope-domain violations")
    p.add_argument("--json", action="store_true", default=None, help="print a JSON report")


def _add_energies(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ej", type=float, help="Josephson energy E_J/h in GHz")
    p.add_argument("--el", type=float, help="inductive energy E_L/h in GHz")
    p.add_argument("--ec", type=float, help="charging energy E_C/h in GHz")
    p.add_argument("--phi-diff", type=float, help="bias phase in rad (default pi)")


def _add_noise(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a-phi", type=float, help="1/f flux-noise amplitude in flux quanta")
    p.add_argument("--q-diel", type=float, help="dielectric quality factor")
    p.add_argument("--temperature", type=float, help="bath temperature in K")
    p.add_argument("--omega-ir", type=float, help="infrared cutoff in rad/s")
    p.add_argument("--nu", type=float, help="gate-time multiplier")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qforge", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="numerical and variational spectrum of one circuit")
    _add_energies(p)
    p.add_argument("--method", choices=["both", "numeric", "variational"], help="which spectra to report")
    _add_common(p)

    p = sub.add_parser("sweep", help="design-space sweep at fixed qubit frequency")
    p.add_argument("--f01", type=float, help="target qubit frequency in GHz")
    p.add_argument("--metric", choices=["infidelity", "coherence-ratio"])
    p.add_argument("--n-ratio", type=int, help="points along E_J/E_L")
    p.add_argument("--n-z", type=int, help="points along the impedance axis")
    _add_noise(p)
    _add_common(p)

    p = sub.add_parser("compare", help="unimon / transmon / fluxonium comparison")
    p.add_argument("--panel", choices=["abc", "d", "e", "f", "all"])
    p.add_argument("--qubit", choices=sorted(compare.builtin_specs()), help="restrict to one qubit")
    p.add_argument("--ng", type=float, help="transmon offset charge")
    p.add_argument("--n-flux", type=int, help="flux points for panels a-c")
    _add_common(p)

    for name, text in (("coherence", "relaxation and dephasing budget"), ("fidelity", "average gate infidelity")):
        p = sub.add_parser(name, help=text)
        _add_energies(p)
        p.add_argument("--f01", type=float, help="design frequency in GHz (with --ratio and --z)")
        p.add_argument("--ratio", type=float, help="design E_J/E_L")
        p.add_argument("--z", type=float, help="design impedance in ohm")
        _add_noise(p)
        _add_common(p)

    p = sub.add_parser("validate", help="run the acceptance criteria")
    p.add_argument("--only", type=int, nargs="+", help="criterion numbers to run")
    _add_common(p)
    return parser


# --- configuration ------------------------------------------------------------


def load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    version = data.pop("schema_version", CONFIG_SCHEMA)
    if version != CONFIG_SCHEMA:
        raise ConfigError(f"unsupported config schema_version {version}; expected {CONFIG_SCHEMA}")
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve(args: argparse.Namespace) -> dict:
    """Merge built-in defaults, the config file and explicit flags."""
    file_values = load_config(args.config)
    flags = {k: v for k, v in vars(args).items() if k not in ("config", "command")}
    unknown = set(file_values) - set(flags)
    if unknown:
        raise ConfigError(f"unknown config keys for '{args.command}': {sorted(unknown)}")
    defaults = {**DEFAULTS, **COMMAND_DEFAULTS.get(args.command, {})}
    cfg = {}
    for key, value in flags.items():
        if value is not None:
            cfg[key] = value
        elif key in file_values:
            cfg[key] = file_values[key]
        else:
            cfg[key] = defaults.get(key)
    return cfg


# execution details that must not change the content of outputs
NON_SEMANTIC = ("out", "threads", "json")


def _echo(cfg: dict) -> dict:
    out = {"command_version": __version__, "schema_version": CONFIG_SCHEMA}
    for k, v in sorted(cfg.items()):
        if k in NON_SEMANTIC:
            continue
        out[k] = str(v) if isinstance(v, Path) else v
    return out


def _env(cfg: dict) -> NoiseEnvironment:
    return NoiseEnvironment(
        a_phi=cfg["a_phi"], q_diel=cfg["q_diel"], temperature=cfg["temperature"], omega_ir=cfg["omega_ir"], nu=cfg["nu"]
    )


def _energies(cfg: dict) -> CircuitEnergies:
    missing = [k for k in ("ej", "el", "ec") if cfg.get(k) is None]
    if missing:
        raise ConfigError(f"missing energies: {', '.join('--' + m for m in missing)}")
    return CircuitEnergies(cfg["ej"], cfg["el"], cfg["ec"], cfg["phi_diff"])


def _circuit_or_design(cfg: dict) -> tuple[CircuitEnergies, dict]:
    if cfg.get("f01") is not None:
        if cfg.get("ratio") is None or cfg.get("z") is None:
            raise ConfigError("a design point needs --f01, --ratio and --z")
        d = design_space.DesignPoint(cfg["f01"], cfg["ratio"], cfg["z"])
        c = design_space.design_to_energies(d)
        return c, {"f01_GHz": d.f01, "ratio": d.ratio, "z_ohm": d.z}
    return _energies(cfg), {}


# --- output helpers -------------------------------------------------------------


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.floating):
        return _clean(float(x))
    return x


def _dump(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True)


def _outdir(cfg: dict) -> Path | None:
    out = cfg.get("out")
    if out is None:
        return None
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write(directory: Path, name: str, text: str) -> Path:
    target = directory / name
    target.write_text(text)
    return target


def _report(cfg: dict, report: dict, name: str, lines: list[str]) -> None:
    out = _outdir(cfg)
    if out is not None:
        _write(out, name, _dump({"config": _echo(cfg), **report}) + "\n")
    if cfg["json"]:
        print(_dump(report))
    else:
        print("\n".join(lines))


def _rel(a: float, b: float, floor: float) -> float:
    """Relative deviation, NaN when the reference is numerically zero."""
    if abs(b) <= floor:
        return math.nan
    return (a - b) / abs(b)


# --- commands -------------------------------------------------------------------


def cmd_spectrum(cfg: dict) -> int:
    c = _energies(cfg)
    method = cfg["method"]
    report: dict = {"energies_GHz": c.to_dict()}
    lines = []
    num = var = None
    if method in ("both", "numeric"):
        e = extrapolated_energies(c, k=3)
        num = {"f01_GHz": e[1] - e[0], "f12_GHz": e[2] - e[1], "alpha_GHz": e[2] - 2 * e[1] + e[0]}
        report["numeric"] = num
        lines.append(
            f"numeric      f01 = {num['f01_GHz']:.6f} GHz  f12 = {num['f12_GHz']:.6f} GHz  alpha = {num['alpha_GHz']:.6f} GHz"
        )
    if method in ("both", "variational"):
        if abs(c.phi_diff - SWEET_SPOT) < 1e-12 and c.e_l >= c.e_j:
            v = variational_energies(c)
            var = {"f01_GHz": v.f01, "f12_GHz": v.f12, "alpha_GHz": v.alpha}
            report["variational"] = var
            lines.append(f"variational  f01 = {v.f01:.6f} GHz  f12 = {v.f12:.6f} GHz  alpha = {v.alpha:.6f} GHz")
        elif method == "variational":
            raise ConfigError("the variational spectrum needs phi_diff = pi and E_L >= E_J")
        else:
            lines.append("variational  not applicable (needs phi_diff = pi and E_L >= E_J)")
    if num is not None and var is not None:
        floor = 1e-7 * num["f01_GHz"]
        dev = {k.replace("_GHz", "_rel_dev"): _rel(var[k], num[k], floor) for k in var}
        report["relative_deviation"] = dev
        lines.append(
            "deviation    "
            + "  ".join(
                f"{k.split('_')[0]} = " + ("n/a" if math.isnan(val) else f"{val:+.3%}") for k, val in dev.items()
            )
        )
    _report(cfg, report, "spectrum.json", lines)
    return 0


def _sweep_name(cfg: dict) -> str:
    return f"sweep_{cfg['metric'].replace('-', '_')}_f01_{cfg['f01']:g}GHz"


def cmd_sweep(cfg: dict) -> int:
    env = _env(cfg)
    mode = "strict" if cfg["strict_envelope"] else "plot"
    ratios, zs = design_space.default_axes(cfg["n_ratio"], cfg["n_z"])
    r = design_space.run_sweep(
        cfg["f01"], ratios, zs, env, metric=cfg["metric"], envelope_mode=mode, threads=cfg["threads"], config=_echo(cfg)
    )
    summary = design_space.sweep_summary(r)
    summary["version"] = __version__
    echo = json.dumps(_clean(_echo(cfg)), sort_keys=True)
    out = _outdir(cfg)
    if out is not None:
        name = _sweep_name(cfg)
        _write(out, name + ".csv", design_space.sweep_csv(r, comment=f"config {echo}"))
        _write(out, name + ".json", _dump(summary) + "\n")
    if cfg["json"]:
        print(_dump(summary))
    else:
        best = summary["global_optimum"]
        if best is not None:
            print(f"global optimum: infidelity {best['infidelity']:.4e} at ratio {best['ratio']:.3f}, z {best['z_ohm']:.1f} ohm")
        for row in summary["optimum_trace"]:
            print(f"  ratio {row['ratio']:.3f}  z_opt {row['z_ohm']:8.1f} ohm  infidelity {row['infidelity']:.4e}")
        if out is None:
            sys.stdout.write(design_space.sweep_csv(r, comment=f"config {echo}"))
    flagged = r.flagged()
    if flagged:
        print(f"{len(flagged)} flagged cell(s):", file=sys.stderr)
        for c in flagged:
            print(f"  ratio={c.ratio:.4g} z={c.z:.4g} ohm: {';'.join(c.flags)}", file=sys.stderr)
    envelope_failures = [c for c in flagged if design_space.FLAG_ENVELOPE in c.flags]
    solver_failures = [c for c in flagged if design_space.FLAG_SOLVER in c.flags]
    if solver_failures or (mode == "strict" and envelope_failures):
        return EXIT_SOLVER
    return 0


PROFILE_COLUMNS = (
    "flux_phi0",
    "f01_GHz",
    "alpha_GHz",
    "t_g_lim_s",
    "t1_diel_s",
    "t1_flux_s",
    "t_phi_first_s",
    "t_phi_second_s",
    "first_order_flag",
)


def _specs(cfg: dict) -> list[compare.QubitSpec]:
    specs = compare.builtin_specs()
    chosen = [specs[cfg["qubit"]]] if cfg["qubit"] else list(specs.values())
    if cfg["ng"] is not None:
        if any(s.kind != "transmon" for s in chosen) and cfg["qubit"] is not None:
            raise ConfigError("--ng applies to the transmon only")
        chosen = [s.with_n_g(cfg["ng"]) if s.kind == "transmon" else s for s in chosen]
    return chosen


def cmd_compare(cfg: dict) -> int:
    fmt = design_space.fmt
    specs = _specs(cfg)
    panels = ("abc", "d", "e", "f") if cfg["panel"] == "all" else (cfg["panel"],)
    echo = json.dumps(_clean(_echo(cfg)), sort_keys=True)
    outputs: dict[str, str] = {}
    for panel in panels:
        for q in specs:
            if panel == "abc":
                prof = compare.flux_profile(q, np.linspace(0.0, 1.0, cfg["n_flux"]))
                rows = [
                    [fmt(p.flux), fmt(p.f01), fmt(p.alpha), fmt(p.t_g_lim), fmt(p.t1_diel), fmt(p.t1_flux),
                     fmt(p.t_phi_first), fmt(p.t_phi_second), p.first_order_flag]
                    for p in prof.points
                ]
                header = PROFILE_COLUMNS
            elif panel == "d":
                rel = compare.relaxation_profile(q, "frequency")
                header = ("flux_phi0", "f01_GHz", "q_diel", "t1_flux_s", "t1_diel_s", "t1_s")
                rows = [[fmt(r.flux), fmt(r.f01), fmt(r.q_diel), fmt(r.t1_flux), fmt(r.t1_diel), fmt(r.t1)] for r in rel]
            elif panel == "e":
                marker = compare.MARKER_Q[q.kind]
                rel = compare.relaxation_profile(q, "q_diel", sorted(set(np.geomspace(1e5, 1e8, 31)) | {marker}))
                header = ("q_diel", "f01_GHz", "t1_flux_s", "t1_diel_s", "t1_s", "marker")
                rows = [
                    [fmt(r.q_diel), fmt(r.f01), fmt(r.t1_flux), fmt(r.t1_diel), fmt(r.t1), "1" if r.q_diel == marker else ""]
                    for r in rel
                ]
            else:
                deph = compare.dephasing_vs_offset(q, np.linspace(-0.05, 0.05, 41))
                header = ("offset_phi0", "t_phi_first_s", "t_phi_second_s", "first_order_flag")
                rows = [[fmt(d.offset), fmt(d.t_phi_first), fmt(d.t_phi_second), d.first_order_flag] for d in deph]
            outputs[f"compare_{panel}_{q.name}.csv"] = design_space.write_csv(header, rows, comment=f"config {echo}")
    man = compare.manifest(specs)
    man["panels"] = list(panels)
    man["files"] = sorted(outputs)
    man["version"] = __version__
    out = _outdir(cfg)
    if out is not None:
        for name, text in outputs.items():
            _write(out, name, text)
        _write(out, "compare_manifest.json", _dump({"config": _echo(cfg), **man}) + "\n")
    if cfg["json"]:
        print(_dump(man))
    else:
        for q in specs:
            relax = compare.sweet_spot_relaxation(q)
            prof = compare.flux_profile(q, [q.sweet_spot]).points[0]
            print(
                f"{q.name:10s} f01 = {prof.f01:7.4f} GHz  alpha = {prof.alpha:+7.4f} GHz  "
                f"T1_flux = {relax.t1_flux:.3e} s  T1_diel = {relax.t1_diel:.3e} s"
            )
        if out is None:
            for name, text in outputs.items():
                print(f"== {name}")
                sys.stdout.write(text)
    return 0


def _budget(c: CircuitEnergies, env: NoiseEnvironment) -> dict:
    s = diagonalize(c, k=3)
    phi01, n01, w = matrix_element_phi(s, 0, 1), matrix_element_n(s, 0, 1), omega01(s)
    relax = coherence.relaxation(c, env, phi01, n01, w)
    kappa = flux_curvature(c, s)
    model = coherence.DephasingModel(kappa, env.a_phi)
    return {
        "energies_GHz": c.to_dict(),
        "f01_GHz": s.f01,
        "alpha_GHz": s.alpha,
        "phi01": phi01,
        "n01": n01,
        "gamma1_flux_per_s": relax.gamma1_flux,
        "gamma1_diel_per_s": relax.gamma1_diel,
        "t1_s": relax.t1,
        "t1_flux_s": relax.t1_flux,
        "t1_diel_s": relax.t1_diel,
        "kappa_rad_per_s_per_phi0sq": kappa,
        "dephasing_quasirate_per_s": model.quasirate,
        "t_phi_tilde_s": model.t_phi_tilde,
    }


def cmd_coherence(cfg: dict) -> int:
    c, design = _circuit_or_design(cfg)
    if abs(c.phi_diff - SWEET_SPOT) > 1e-12:
        raise ConfigError("coherence budget is evaluated at the sweet spot phi_diff = pi")
    report = _budget(c, _env(cfg))
    if design:
        report["design"] = design
    lines = [f"{k:28s} {v:.6g}" for k, v in report.items() if isinstance(v, float)]
    _report(cfg, report, "coherence.json", lines)
    return 0


def cmd_fidelity(cfg: dict) -> int:
    c, design = _circuit_or_design(cfg)
    b = infidelity_at(c, _env(cfg))
    report = {
        "energies_GHz": c.to_dict(),
        "infidelity": b.infidelity,
        "f01_GHz": b.f01,
        "alpha_GHz": b.alpha,
        "gate_time_s": b.gate.t_g,
        "t1_s": b.relaxation.t1,
        "t_phi_tilde_s": b.dephasing.t_phi_tilde,
        "kappa_rad_per_s_per_phi0sq": b.kappa,
        "envelope_real": b.envelope.real,
    }
    if design:
        report["design"] = design
    lines = [f"{k:28s} {v:.6g}" for k, v in report.items() if isinstance(v, float)]
    _report(cfg, report, "fidelity.json", lines)
    return 0


def cmd_validate(cfg: dict) -> int:
    numbers = cfg["only"]
    if numbers:
        bad = [n for n in numbers if n not in acceptance.CRITERIA]
        if bad:
            raise ConfigError(f"unknown criteria {bad}; choose from 1-{len(acceptance.CRITERIA)}")
    results = acceptance.run(numbers, report=None if cfg["json"] else print)
    payload = {"version": __version__, "passed": all(r.passed for r in results), "criteria": [r.to_dict() for r in results]}
    out = _outdir(cfg)
    if out is not None:
        _write(out, "validate.json", _dump(payload) + "\n")
    if cfg["json"]:
        print(_dump(payload))
    else:
        print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return 0 if payload["passed"] else EXIT_FAILED


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "coherence": cmd_coherence,
    "fidelity": cmd_fidelity,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        if cfg.get("threads") is None and os.environ.get("QFORGE_THREADS"):
            cfg["threads"] = int(os.environ["QFORGE_THREADS"])
        return COMMANDS[args.command](cfg)
    except SOLVER_ERRORS as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except PipelineError as exc:
        code = EXIT_VALIDATION if isinstance(exc.cause, ValueError) and not isinstance(exc.cause, SOLVER_ERRORS) else EXIT_SOLVER
        print(f"error in {exc.stage}: {exc.cause}", file=sys.stderr)
        return code
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
