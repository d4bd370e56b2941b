"""Decoherence-limited single-qubit gate error."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import coherence
from .coherence import DephasingModel, EnvelopeDomainError, RelaxationBreakdown
from .eigensolver import (
    Spectrum,
    diagonalize,
    flux_curvature,
    matrix_element_n,
    matrix_element_phi,
    omega01,
)
from .qubit_model import GHZ, SWEET_SPOT, CircuitEnergies, NoiseEnvironment


class ZeroAnharmonicityError(ValueError):
    """A harmonic spectrum cannot host a qubit."""


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class GatePlan:
    t_g: float
    nu: float
    limiting_scale: str  # "anharmonicity" or "frequency"


def gate_duration(alpha: float, nu: float = 1.0) -> GatePlan:
    """Gate time ``2 pi nu / |alpha|`` for an anharmonicity in rad/s."""
    if alpha == 0.0 or not math.isfinite(alpha):
        raise ZeroAnharmonicityError("zero anharmonicity: the spectrum is harmonic")
    return GatePlan(2.0 * math.pi * nu / abs(alpha), nu, "anharmonicity")


def gate_speed_limit(omega01: float, alpha: float) -> float:
    """Speed limit ``2 pi / min(omega01, |alpha|)`` of microwave gates, in seconds."""
    if not (omega01 > 0 and alpha != 0):
        raise ValueError("need omega01 > 0 and a non-zero anharmonicity")
    return 2.0 * math.pi / min(omega01, abs(alpha))


def average_gate_infidelity(gamma1: float, t_g: float, envelope_re: float) -> float:
    r"""``1 - [3 + exp(-G1 t) + 2 exp(-G1 t / 2) Re f(t)] / 6``."""
    if gamma1 < 0 or not t_g > 0:
        raise ValueError("need gamma1 >= 0 and t_g > 0")
    if abs(envelope_re) > 1.0 + 1e-12:
        raise ValueError(f"|Re f| must not exceed 1, got {envelope_re}")
    x = gamma1 * t_g
    # expm1 keeps precision when the error is tiny
    decay = -math.expm1(-x)
    half = -math.expm1(-0.5 * x)
    return (decay + 2.0 * (1.0 - (1.0 - half) * envelope_re)) / 6.0


@dataclass(frozen=True)
class InfidelityBreakdown:
    infidelity: float
    f01: float  # GHz
    alpha: float  # GHz, alpha / 2 pi
    relaxation: RelaxationBreakdown
    dephasing: DephasingModel
    gate: GatePlan
    envelope: complex
    phi01: float
    n01: float

    @property
    def kappa(self) -> float:
        return self.dephasing.kappa


def infidelity_at(
    c: CircuitEnergies, env: NoiseEnvironment, spectrum: Spectrum | None = None
) -> InfidelityBreakdown:
    """Average gate infidelity of a sweet-spot design under ``env``.

    Stages: diagonalization, matrix elements, relaxation rates, flux
    curvature, gate duration, dephasing envelope. A failure is re-raised as
    :class:`PipelineError` naming the stage.
    """
    if abs(c.phi_diff - SWEET_SPOT) > 1e-12:
        raise ValueError("infidelity is evaluated at the sweet spot phi_diff = pi")
    if c.e_l < c.e_j:
        raise ValueError("infidelity pipeline expects a single-well design (e_l >= e_j)")

    stage = "diagonalize"
    try:
        s = spectrum if spectrum is not None else diagonalize(c, k=3)
        stage = "matrix elements"
        phi01 = matrix_element_phi(s, 0, 1)
        n01 = matrix_element_n(s, 0, 1)
        w01 = omega01(s)
        stage = "relaxation"
        relax = coherence.relaxation(c, env, phi01, n01, w01)
        stage = "flux curvature"
        kappa = flux_curvature(c, s)
        stage = "gate duration"
        # without a junction the spectrum is exactly harmonic; the grid only leaves stencil residue
        alpha = 0.0 if c.e_j == 0.0 else s.alpha
        gate = gate_duration(2.0 * math.pi * GHZ * alpha, env.nu)
        stage = "dephasing envelope"
        f = coherence.dephasing_envelope(gate.t_g, kappa, env)
    except (ZeroAnharmonicityError, EnvelopeDomainError) as exc:
        raise PipelineError(stage, exc) from exc
    except Exception as exc:  # solver failures carry their own type
        raise PipelineError(stage, exc) from exc

    value = average_gate_infidelity(relax.gamma1_total, gate.t_g, f.real)
    return InfidelityBreakdown(
        infidelity=value,
        f01=s.f01,
        alpha=s.alpha,
        relaxation=relax,
        dephasing=DephasingModel(kappa, env.a_phi),
        gate=gate,
        envelope=f,
        phi01=phi01,
        n01=n01,
    )
