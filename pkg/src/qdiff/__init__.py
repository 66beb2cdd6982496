"""Principal eigenvalues, persistence and spreading speeds for KPP equations
with q-diffusion ``d/dx(D^(1-q) d/dx(D^q u))`` in periodic media."""

__version__ = "0.1.0"

from .eigen import KValue, k_value  # noqa: E402
from .fields import (Constant, CosineSquared, PeriodicField, Sampled, Sinusoid,  # noqa: E402
                     build_periodic_spline, parse_field, phase_shift, sqrt_harmonic_mean)
from .speed import SpeedResult, persistence, spreading_speed, stratonovich_speed  # noqa: E402

__all__ = [
    "Constant", "CosineSquared", "KValue", "PeriodicField", "Sampled", "Sinusoid", "SpeedResult",
    "build_periodic_spline", "k_value", "parse_field", "persistence", "phase_shift",
    "spreading_speed", "sqrt_harmonic_mean", "stratonovich_speed",
]
