"""Physical constants and default material parameters (SI units)."""

from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import epsilon_0 as VACUUM_PERMITTIVITY
from scipy.constants import hbar as HBAR
from scipy.constants import k as BOLTZMANN

# Silicon (crystalline), the default particle material.
SILICON_DENSITY = 2329.0          # kg / m^3
SILICON_PERMITTIVITY = 12.1       # relative, at 1550 nm
SILICON_SOUND_SPEED = 8433.0      # m / s, longitudinal

# Helium buffer gas.
HELIUM_MASS = 6.6465e-27          # kg

__all__ = [
    "SPEED_OF_LIGHT",
    "VACUUM_PERMITTIVITY",
    "HBAR",
    "BOLTZMANN",
    "SILICON_DENSITY",
    "SILICON_PERMITTIVITY",
    "SILICON_SOUND_SPEED",
    "HELIUM_MASS",
]
