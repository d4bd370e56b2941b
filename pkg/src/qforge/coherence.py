"""Relaxation and dephasing from 1/f flux noise and dielectric loss.

All rates are computed in SI units. Energies enter as E/h in GHz and are
converted to joules here; angular frequencies are rad/s; the flux-noise
amplitude is in units of the flux quantum, so ``A_Phi / Phi_0`` is just
``a_phi``.

With those conventions

    mu  = 8 pi^3 a_phi^2 / hbar^2          [J^-2 s^-2]
    eta = 16 / (hbar Q_diel)               [J^-1 s^-1]

so that ``mu E_L^2 / omega01`` and ``eta E_C`` are rates in 1/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .qubit_model import GHZ, H_PLANCK, HBAR, K_B, CircuitEnergies, NoiseEnvironment


class EnvelopeDomainError(ValueError):
    """The short-time dephasing envelope was evaluated outside its validity range."""


def _joules(e_ghz: float) -> float:
    return e_ghz * GHZ * H_PLANCK


def mu_from_psd(a_phi: float) -> float:
    """Flux-noise relaxation prefactor in J^-2 s^-2 for an amplitude in flux quanta."""
    if a_phi < 0:
        raise ValueError(f"a_phi must be non-negative, got {a_phi}")
    return 8.0 * math.pi**3 * a_phi**2 / HBAR**2


def eta_from_q(q_diel: float) -> float:
    """Dielectric relaxation prefactor in J^-1 s^-1; infinite Q gives zero."""
    if not q_diel > 0:
        raise ValueError(f"q_diel must be positive, got {q_diel}")
    return 16.0 / (HBAR * q_diel)


def thermal_factor(omega: float, temperature: float) -> float:
    """``coth(hbar omega / 2 k_B T)``; exactly 1 at zero temperature."""
    if temperature == 0.0:
        return 1.0
    x = HBAR * omega / (2.0 * K_B * temperature)
    if x > 20.0:
        return 1.0 + 2.0 * math.exp(-2.0 * x)
    return 1.0 / math.tanh(x)


@dataclass(frozen=True)
class RelaxationBreakdown:
    gamma1_flux: float
    gamma1_diel: float

    @property
    def gamma1_total(self) -> float:
        return self.gamma1_flux + self.gamma1_diel

    @property
    def t1(self) -> float:
        total = self.gamma1_total
        return math.inf if total == 0.0 else 1.0 / total

    @property
    def t1_flux(self) -> float:
        return math.inf if self.gamma1_flux == 0.0 else 1.0 / self.gamma1_flux

    @property
    def t1_diel(self) -> float:
        return math.inf if self.gamma1_diel == 0.0 else 1.0 / self.gamma1_diel


def gamma1_flux(c: CircuitEnergies, env: NoiseEnvironment, phi01: float, omega01: float) -> float:
    """1/f flux-noise relaxation rate ``mu E_L^2 |<0|phi|1>|^2 / omega01`` in 1/s."""
    if not omega01 > 0:
        raise ValueError(f"omega01 must be positive, got {omega01}")
    return mu_from_psd(env.a_phi) * _joules(c.e_l) ** 2 * phi01**2 / omega01


def gamma1_diel(c: CircuitEnergies, env: NoiseEnvironment, n01: float, omega01: float) -> float:
    """Dielectric relaxation rate ``eta E_C |<0|n|1>|^2 coth(hbar omega01 / 2 k_B T)`` in 1/s."""
    if not omega01 > 0:
        raise ValueError(f"omega01 must be positive, got {omega01}")
    return eta_from_q(env.q_diel) * _joules(c.e_c) * n01**2 * thermal_factor(omega01, env.temperature)


def relaxation(
    c: CircuitEnergies, env: NoiseEnvironment, phi01: float, n01: float, omega01: float
) -> RelaxationBreakdown:
    return RelaxationBreakdown(gamma1_flux(c, env, phi01, omega01), gamma1_diel(c, env, n01, omega01))


@dataclass(frozen=True)
class DephasingModel:
    kappa: float
    a_phi: float

    @property
    def quasirate(self) -> float:
        return pure_dephasing_quasirate(self.kappa, self.a_phi)

    @property
    def t_phi_tilde(self) -> float:
        rate = self.quasirate
        return math.inf if rate == 0.0 else 1.0 / rate


def pure_dephasing_quasirate(kappa: float, a_phi: float) -> float:
    """Quasirate ``2 |kappa| A^2`` of the quadratic-coupling envelope, in 1/s."""
    return 2.0 * abs(kappa) * a_phi**2


def envelope_time_limit(kappa: float, env: NoiseEnvironment) -> float:
    """Upper end of the envelope's validity domain in seconds."""
    bound = 1.0 / env.omega_ir
    if kappa != 0.0:
        bound = min(bound, 2.0 / (abs(kappa) * env.a_phi**2))
    return bound


def dephasing_envelope(t: float, kappa: float, env: NoiseEnvironment) -> complex:
    """Short-time envelope ``[1 - 2 i kappa A^2 t ln(1 / omega_ir t)]^(-1/2)``.

    Raises
    ------
    EnvelopeDomainError
        unless ``0 < t < 2 / (kappa A^2)`` and ``omega_ir t < 1``
    """
    if not t > 0:
        raise EnvelopeDomainError(f"time must be positive, got {t}")
    if env.omega_ir * t >= 1.0:
        raise EnvelopeDomainError(f"omega_ir * t = {env.omega_ir * t:.3g} must stay below 1")
    if kappa != 0.0 and t >= 2.0 / (abs(kappa) * env.a_phi**2):
        raise EnvelopeDomainError(
            f"t = {t:.3e} s exceeds the short-time limit {2.0 / (abs(kappa) * env.a_phi**2):.3e} s"
        )
    phase = 2.0 * kappa * env.a_phi**2 * t * math.log(1.0 / (env.omega_ir * t))
    return complex(1.0, -phase) ** -0.5


@dataclass(frozen=True)
class FirstOrderDephasing:
    t_phi: float
    iterations: int
    flagged: bool
    reason: str = ""


def first_order_dephasing_time(
    d_omega_d_phi: float,
    env: NoiseEnvironment,
    t_scale: float | None = None,
    *,
    slope_scale: float | None = None,
    max_iter: int = 20,
    rtol: float = 1e-3,
) -> FirstOrderDephasing:
    """Dephasing time from the linear flux sensitivity ``d omega01 / d Phi`` (rad/s per flux quantum).

    Solves ``T = 1 / (A |slope| sqrt(2 ln(1 / (omega_ir T))))`` by fixed-point
    iteration starting from ``t_scale``. A vanishing slope, or one below
    ``1e-3 * slope_scale``, is flagged and reported as an infinite time since
    the second-order term then dominates.
    """
    slope = abs(d_omega_d_phi) * env.a_phi
    if slope == 0.0:
        return FirstOrderDephasing(math.inf, 0, True, "zero slope")
    if slope_scale is not None and abs(d_omega_d_phi) < 1e-3 * abs(slope_scale):
        return FirstOrderDephasing(math.inf, 0, True, "slope negligible")
    t = t_scale if t_scale is not None else 1.0 / slope
    cap = 1.0 / (math.e * env.omega_ir)
    for it in range(1, max_iter + 1):
        t_eval = min(t, cap)  # keep the log at least 1
        t_new = 1.0 / (slope * math.sqrt(2.0 * math.log(1.0 / (env.omega_ir * t_eval))))
        if abs(t_new - t) <= rtol * t_new:
            t = t_new
            break
        t = t_new
    else:
        return FirstOrderDephasing(t, max_iter, True, "fixed point not converged")
    if t >= cap:
        return FirstOrderDephasing(t, it, True, "beyond infrared cutoff")
    return FirstOrderDephasing(t, it, False)
