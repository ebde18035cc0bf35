"""Cavity cooling and rotational dynamics of levitated aspherical
nanoparticles in elliptically polarized optical tweezers.

The package covers the full pipeline: particle geometry and dielectric
response, tweezer/cavity field evaluation, forces and torques including
radiation reaction, equilibrium search and linearized normal-mode analysis
(steady-state phonon occupations, cooling rates, torque sensitivity),
stochastic trajectory integration with a compiled kernel, spectral
estimation, and rotational spin-up studies.
"""

__version__ = "0.1.0"

from .geometry import (  # noqa: F401
    Ellipsoid,
    MaterialResponse,
    Orientation,
    depolarization_factors,
    principal_susceptibilities,
    susceptibility_tensor,
)
