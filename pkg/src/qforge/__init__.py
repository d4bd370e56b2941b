"""Spectrum, coherence and gate-error modelling for single-mode inductively shunted qubits."""

__version__ = "0.1.0"

from .qubit_model import CircuitEnergies, DimensionlessPotential, NoiseEnvironment  # noqa: E402

__all__ = ["CircuitEnergies", "DimensionlessPotential", "NoiseEnvironment", "__version__"]
