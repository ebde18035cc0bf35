"""Low-level stochastic integrator with selectable backend.

The time stepper advances the 17-component state vector (see
`dynamics.pack_state`) with a symmetric BAOAB-style splitting:

* B — half kick of momentum and body-frame angular momentum by the optical
  force and torque (evaluated once per step, cached across the step
  boundary);
* A — half drift: free translation, exact axis-split free-top rotation
  (five single-axis sub-rotations that preserve |J| exactly), and a
  Crank-Nicolson half step of the driven cavity equation with the
  effective detuning/linewidth matrices frozen at the current
  configuration;
* O — full-step Ornstein-Uhlenbeck update of the mechanical momenta
  (exact damping factor and stationary-variance-exact kick combining gas
  and recoil diffusion) plus the cavity shot-noise kick whose variance is
  matched to the Crank-Nicolson decay factor, so the discrete stationary
  cavity variance is exact at the reference working point.

Two interchangeable backends implement the identical algorithm: a compiled
extension (``nanorotor._kernel``, built from Cython) and a pure-Python
mirror (``nanorotor._kernel_py``).  The compiled one is preferred when
importable; setting the environment variable ``NANOROTOR_FORCE_PYTHON=1``
forces the pure-Python path.  Both consume pre-generated standard-normal
noise blocks of shape (steps, 10) — three translational kicks, three
body-frame angular-momentum kicks, and two (Re, Im) pairs for the cavity
modes — so trajectories can be compared across backends on shared noise.

Parameter-vector layout (``pack_params``), all float64::

     0      particle mass [kg]
     1:4    principal moments of inertia (I_a, I_b, I_c) [kg m^2]
     4:7    principal susceptibilities (chi_a, chi_b, chi_c)
     7      tweezer amplitude eps (dimensionless)
     8      tweezer wavenumber k [1/m]
     9      Rayleigh range z_R [m]
    10:12   focal waists (w_x, w_y) [m]
    12:14   (cos psi, sin psi)
    14:17   e_t1   major polarization axis
    17:20   e_t2   minor polarization axis
    20:23   e_1    in-plane cavity polarization
    23:26   e_2    out-of-plane cavity polarization
    26:29   e_c    cavity standing-wave axis
    29      cavity phase phi
    30      bare detuning Delta [rad/s]
    31      bare linewidth kappa [rad/s]
    32      coupling frequency u0 [rad/s]
    33      Rayleigh scattering rate gamma_sc [rad/s]
    34      potential prefactor (eps0 V / 2) * scale^2 [J]
    35      radiation prefactor (eps0 k^3 V^2 / 12 pi) * scale^2 [J]
    36:42   OU damping rate per DOF (x, y, z, J_a, J_b, J_c) [1/s]
    42:48   momentum / angular-momentum diffusion per DOF
    48:50   cavity per-quadrature diffusion D_b,j [1/s]
    50:52   reference detunings (Delta_eff diagonal) [rad/s]
    52:54   reference linewidths (kappa_eff diagonal) [rad/s]
"""

from __future__ import annotations

import importlib
import math
import os

import numpy as np

from .dynamics import OpticalSetup
from .errors import IntegrationError

__all__ = [
    "N_PARAMS",
    "NOISE_WIDTH",
    "STATE_WIDTH",
    "advance",
    "backend_name",
    "pack_params",
    "step_context",
    "suggest_timestep",
]

N_PARAMS = 54
STATE_WIDTH = 17
NOISE_WIDTH = 10

_FORCE_PYTHON = "NANOROTOR_FORCE_PYTHON"


def _load_backend():
    if os.environ.get(_FORCE_PYTHON, "") not in ("", "0"):
        return importlib.import_module("nanorotor._kernel_py"), "python"
    try:
        return importlib.import_module("nanorotor._kernel"), "compiled"
    except ImportError:
        return importlib.import_module("nanorotor._kernel_py"), "python"


_BACKEND, _BACKEND_NAME = _load_backend()


def backend_name() -> str:
    """Name of the active stepping backend: "compiled" or "python"."""
    return _BACKEND_NAME


def pack_params(setup: OpticalSetup, gamma=None, diffusion=None,
                cavity_diffusion=None, cavity_reference=None) -> np.ndarray:
    """Flatten setup constants and noise coefficients for the stepper.

    Parameters
    ----------
    gamma : (6,) array, optional
        OU damping rates for (p_x, p_y, p_z, J_a, J_b, J_c); zero disables
        damping.
    diffusion : (6,) array, optional
        Momentum (angular-momentum) diffusion coefficients in the same
        order; together with `gamma` they define the exact OU kick.
    cavity_diffusion : (2,) array, optional
        Per-quadrature diffusion of the two cavity amplitudes.
    cavity_reference : ((2,), (2,)) pair, optional
        Diagonal (detunings, linewidths) of the effective cavity matrices
        at the working point; they set the stationary-variance-matched
        noise-kick amplitude.  Defaults to the bare (Delta, kappa).
    """
    tw, cav, basis = setup.tweezer, setup.cavity, setup.basis
    if tw.amplitude is None:
        raise ValueError("tweezer amplitude must be fixed (OpticalSetup.build)")
    from .fields import field_scale

    scale2 = field_scale(tw, cav) ** 2
    volume = setup.material.volume
    from .constants import VACUUM_PERMITTIVITY

    p = np.zeros(N_PARAMS)
    p[0] = setup.material.mass
    p[1:4] = setup.material.moments_of_inertia
    p[4:7] = setup.material.susceptibilities
    p[7] = tw.amplitude
    p[8] = tw.wavenumber
    p[9] = tw.rayleigh_range
    p[10] = tw.waist_x
    p[11] = tw.waist_y
    p[12] = math.cos(tw.psi)
    p[13] = math.sin(tw.psi)
    p[14:17] = basis.e_t1
    p[17:20] = basis.e_t2
    p[20:23] = basis.e_1
    p[23:26] = basis.e_2
    p[26:29] = basis.e_c
    p[29] = cav.phi
    p[30] = cav.detuning
    p[31] = cav.linewidth
    p[32] = setup.constants.u0
    p[33] = setup.constants.gamma_sc
    p[34] = 0.5 * VACUUM_PERMITTIVITY * volume * scale2
    p[35] = (VACUUM_PERMITTIVITY * tw.wavenumber**3 * volume**2
             / (12.0 * math.pi)) * scale2
    p[36:42] = 0.0 if gamma is None else np.asarray(gamma, dtype=float)
    p[42:48] = 0.0 if diffusion is None else np.asarray(diffusion, dtype=float)
    p[48:50] = (0.0 if cavity_diffusion is None
                else np.asarray(cavity_diffusion, dtype=float))
    if cavity_reference is None:
        p[50:52] = cav.detuning
        p[52:54] = cav.linewidth
    else:
        p[50:52] = np.asarray(cavity_reference[0], dtype=float)
        p[52:54] = np.asarray(cavity_reference[1], dtype=float)
    if np.any(p[36:50] < 0.0):
        raise ValueError("damping and diffusion coefficients must be >= 0")
    return p


def step_context(params: np.ndarray, dt: float) -> np.ndarray:
    """Precompute the per-step noise coefficients for a fixed dt.

    Returns a (14,) array: exact OU decay factors c_i = exp(-gamma_i dt)
    [6], OU kick amplitudes s_i [6], and cavity kick amplitudes per
    quadrature [2].  The cavity amplitude is chosen so that the discrete
    stationary variance under the Crank-Nicolson decay equals D_b/kappa
    exactly at the reference working point.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    params = np.asarray(params, dtype=float)
    gamma = params[36:42]
    diff = params[42:48]
    ctx = np.zeros(14)
    for i in range(6):
        g = gamma[i]
        c = math.exp(-g * dt)
        ctx[i] = c
        if diff[i] == 0.0:
            ctx[6 + i] = 0.0
        elif g * dt < 1e-10:
            ctx[6 + i] = math.sqrt(2.0 * diff[i] * dt)
        else:
            ctx[6 + i] = math.sqrt(diff[i] * (1.0 - c * c) / g)
    for j in range(2):
        d_b = params[48 + j]
        if d_b == 0.0:
            continue
        a = complex(-params[52 + j], params[50 + j])  # i Delta - kappa
        phi_half = (1.0 + 0.25 * dt * a) / (1.0 - 0.25 * dt * a)
        mag2 = abs(phi_half) ** 2
        kappa = params[52 + j]
        # kick between the two half decays: Var_ss = mag2 sigma^2/(1-mag2^2)
        ctx[12 + j] = math.sqrt(d_b * (1.0 - mag2 * mag2)
                                / (kappa * mag2))
    return ctx


def suggest_timestep(frequencies, linewidth=0.0, detuning=0.0,
                     samples_per_period: float = 20.0) -> float:
    """Largest dt resolving every rate: 2 pi / (samples * max rate)."""
    rates = [abs(linewidth), abs(detuning)]
    rates.extend(abs(f) for f in np.atleast_1d(frequencies))
    top = max(rates)
    if top <= 0:
        raise ValueError("at least one positive rate is required")
    return 2.0 * math.pi / (samples_per_period * top)


def advance(params, y, dt, noise, record_every=1, phase=0, out=None,
            evaluate_fields=True, conservative=False):
    """Advance the state through len(noise) steps, recording periodically.

    Parameters
    ----------
    params : (N_PARAMS,) float64
        Packed constants from `pack_params`.
    y : (17,) float64
        State vector, updated in place.
    dt : float
        Time step.
    noise : (n, 10) float64
        Standard-normal draws, one row per step (pass zeros for a
        deterministic run).
    record_every : int
        Record the state after every this-many steps.
    phase : int
        Number of steps already taken since the last record (carries the
        recording grid across chunked calls).
    out : (m, 17) float64, optional
        Preallocated record buffer; allocated when omitted.
    evaluate_fields : bool
        When False the optical force, torque and cavity evolution are
        skipped entirely (free flight plus noise); used by the free-top
        and thermostat paths.
    conservative : bool
        When True the non-conservative radiation force/torque are dropped
        and the cavity amplitudes are frozen (pure trap Hamiltonian).

    Returns
    -------
    (records, n_recorded, new_phase, max_spin)
        `records` is `out` (or the allocation) with `n_recorded` valid
        rows; `max_spin` is the largest |J_i|/I_i angular rate seen.

    Raises
    ------
    IntegrationError
        If any state component becomes non-finite (the step size is too
        large for the current dynamics).
    """
    params = np.ascontiguousarray(params, dtype=float)
    if params.shape != (N_PARAMS,):
        raise ValueError(f"params must have shape ({N_PARAMS},)")
    y = np.asarray(y, dtype=float)
    if y.shape != (STATE_WIDTH,):
        raise ValueError(f"state must have shape ({STATE_WIDTH},)")
    noise = np.ascontiguousarray(noise, dtype=float)
    if noise.ndim != 2 or noise.shape[1] != NOISE_WIDTH:
        raise ValueError(f"noise must have shape (n, {NOISE_WIDTH})")
    n = noise.shape[0]
    record_every = int(record_every)
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    capacity = n // record_every + 1
    if out is None:
        out = np.empty((capacity, STATE_WIDTH))
    ctx = step_context(params, dt)
    status, n_rec, new_phase, max_spin = _BACKEND.advance_chunk(
        params, y, float(dt), ctx, noise, record_every, int(phase), out,
        bool(evaluate_fields), bool(conservative))
    if status != 0:
        raise IntegrationError(
            f"state became non-finite after step {status} of the current "
            "chunk; reduce the time step")
    return out, n_rec, new_phase, max_spin
