"""Time-domain stochastic simulation and spectral analysis.

The deterministic flow (trap plus two cavity modes) is integrated by the
symmetric splitting implemented in `nanorotor.kernel`: velocity-Verlet half
kicks around exact drift substeps (free translation, axis-split rigid-body
rotation, Crank-Nicolson cavity update with midpoint-frozen coefficients),
with damping and diffusion applied as an exact Ornstein-Uhlenbeck update
between the drift halves.

The noise model combines
  * gas collisions: per-DOF damping with matching diffusion
    (fluctuation-dissipation at the gas temperature),
  * photon recoil: white momentum / angular-momentum diffusion equivalent to
    the per-mode heating rates, D_q = hbar m_q omega_q xi_q (which collapses
    to a mode-independent constant per coordinate), and
  * cavity input noise: complex white noise on each cavity amplitude, of
    vacuum strength at scale 1 (stationary |db|^2 = 1/2 per dark mode),
    with a configurable scale.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, signal

from . import kernel
from .constants import BOLTZMANN, HBAR, SILICON_PERMITTIVITY, SILICON_SOUND_SPEED
from .dynamics import (
    MechanicalState,
    OpticalSetup,
    equations_of_motion,
    pack_state,
    stability_check,
    steady_cavity_amplitude,
    unpack_state,
)
from .errors import InsufficientDataError, NumericalError, PhysicsError, UnstableTrapError
from .fields import TweezerConfig
from .geometry import rotation_matrix
from .linear import (
    Environment,
    LinearModel,
    analyze,
    find_equilibrium,
    gas_damping_rate,
    harmonic_expansion,
    mass_matrix,
    potential_gradient,
)

__all__ = [
    "NoiseModel",
    "Trajectory",
    "SpectrumResult",
    "ScanPoint",
    "SpinupResult",
    "build_noise_model",
    "stationary_state",
    "integrate_trajectory",
    "mode_occupations",
    "estimate_psd",
    "ellipticity_scan",
    "confinement_ratio",
    "switched_setup",
    "spinup_temperature",
    "spinup_simulation",
]

BURN_IN_FRACTION = 0.2
CONFINEMENT_TOLERANCE = 1e-6
LIBRATIONAL_LABELS = ("alpha'", "beta'", "gamma'")


# ---------------------------------------------------------------------------
# noise model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseModel:
    """Damping and diffusion coefficients for the stochastic integrator.

    The six mechanical channels are ordered (p_x, p_y, p_z) in the space
    frame followed by (J_a, J_b, J_c) in the body frame; at the trap
    orientation the body axes coincide with the Euler directions
    (alpha, beta, gamma), which is where the librational recoil formulas
    live.  ``cavity_diffusion`` is per quadrature; ``cavity_detuning`` /
    ``cavity_linewidth`` fix the reference dynamics used to normalize the
    discrete noise kick (stationary quadrature variance = D / kappa).
    """

    damping: np.ndarray
    diffusion: np.ndarray
    cavity_diffusion: np.ndarray
    cavity_detuning: np.ndarray
    cavity_linewidth: np.ndarray
    shot_noise_scale: float

    def __post_init__(self):
        for name in ("damping", "diffusion", "cavity_diffusion",
                     "cavity_detuning", "cavity_linewidth"):
            object.__setattr__(self, name,
                               np.asarray(getattr(self, name), dtype=float))
        if self.damping.shape != (6,) or self.diffusion.shape != (6,):
            raise ValueError("mechanical coefficients must have shape (6,)")
        if np.any(self.damping < 0) or np.any(self.diffusion < 0):
            raise ValueError("damping and diffusion must be non-negative")
        if np.any(self.cavity_diffusion < 0):
            raise ValueError("cavity diffusion must be non-negative")
        if np.any(self.cavity_linewidth <= 0):
            raise ValueError("cavity reference linewidth must be positive")


def _recoil_diffusion(setup: OpticalSetup) -> np.ndarray:
    """White-noise momentum diffusion equivalent to the recoil heating rates.

    D_q = hbar m_q omega_q xi_q with xi_q the per-mode recoil rate; the
    zero-point factor cancels the mode mass and frequency, leaving
    D = (hbar^2/2) gamma_sc eps^2 (k^2 T_q / 5) for translations and
    (hbar^2/2) gamma_sc eps^2 L_q for librations.
    """
    tw = setup.tweezer
    gamma_eps2 = setup.constants.gamma_sc * tw.amplitude**2
    k = tw.wavenumber
    chi_a, chi_b, chi_c = setup.material.susceptibilities
    cos2 = math.cos(tw.psi) ** 2
    sin2 = math.sin(tw.psi) ** 2
    mix = chi_c**2 * cos2 + chi_b**2 * sin2
    u = 5.0 * (1.0 - 1.0 / (k * tw.rayleigh_range)) ** 2
    factors = np.array([
        (k**2 / 5.0) * (2.0 * mix - chi_c**2 * cos2),
        (k**2 / 5.0) * (2.0 * mix - chi_b**2 * sin2),
        (k**2 / 5.0) * (2.0 + u) * mix,
        (chi_b - chi_c) ** 2,
        (chi_c - chi_a) ** 2 * (1.0 - sin2),
        (chi_a - chi_b) ** 2 * (1.0 - cos2),
    ])
    return 0.5 * HBAR**2 * gamma_eps2 * factors


def build_noise_model(setup: OpticalSetup, environment: Environment,
                      model: LinearModel | None = None,
                      shot_noise_scale: float = 1.0) -> NoiseModel:
    """Assemble gas + recoil + cavity-input noise for one operating point.

    When a linearized model is given, the cavity reference rates are the
    effective (particle-dressed) detunings and linewidths at its
    equilibrium; otherwise the bare cavity values are used.
    """
    gamma_gas = gas_damping_rate(setup.material, environment)
    factor = environment.translational_gas_factor
    damping = gamma_gas * np.array([factor, factor, factor, 1.0, 1.0, 1.0])
    inert = np.concatenate([np.full(3, setup.material.mass),
                            setup.material.moments_of_inertia])
    gas_diffusion = damping * inert * (BOLTZMANN * environment.gas_temperature)
    diffusion = gas_diffusion + _recoil_diffusion(setup)
    if model is not None:
        detuning = np.array(model.detunings, dtype=float)
        linewidth = np.array(model.linewidths, dtype=float)
    else:
        detuning = np.full(2, setup.cavity.detuning)
        linewidth = np.full(2, setup.cavity.linewidth)
    cavity_diffusion = shot_noise_scale**2 * linewidth / 4.0
    return NoiseModel(damping=damping, diffusion=diffusion,
                      cavity_diffusion=cavity_diffusion,
                      cavity_detuning=detuning, cavity_linewidth=linewidth,
                      shot_noise_scale=float(shot_noise_scale))


def _zero_noise(setup: OpticalSetup) -> NoiseModel:
    return NoiseModel(damping=np.zeros(6), diffusion=np.zeros(6),
                      cavity_diffusion=np.zeros(2),
                      cavity_detuning=np.full(2, setup.cavity.detuning),
                      cavity_linewidth=np.full(2, setup.cavity.linewidth),
                      shot_noise_scale=0.0)


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

def _coordinate_state(setup: OpticalSetup, coordinates, cavity) -> np.ndarray:
    from .geometry import Orientation

    state = MechanicalState(
        position=np.asarray(coordinates[:3], dtype=float),
        momentum=np.zeros(3),
        orientation=Orientation.from_euler(*coordinates[3:6]),
        angular_momentum=np.zeros(3),
        cavity=np.asarray(cavity, dtype=complex))
    return pack_state(state)


def stationary_state(setup: OpticalSetup, coordinates=None) -> np.ndarray:
    """Fixed point of the deterministic dynamics as a packed state vector.

    The trap-potential minimum with slaved cavity amplitudes is not an
    exact fixed point: the non-conservative scattering force pushes the
    particle slightly down-beam and exerts a weak static torque, which
    would otherwise launch a large coherent oscillation at the start of a
    simulation.  This solves the full force/torque balance near the given
    coordinates (defaults to the trap minimum); bounds keep the solution
    inside the same potential well.
    """
    if coordinates is None:
        coordinates = find_equilibrium(setup).coordinates
    guess = np.asarray(coordinates, dtype=float)

    def residual(coords):
        rot = rotation_matrix(*coords[3:6])
        b = steady_cavity_amplitude(setup, coords[:3], rot)
        y = _coordinate_state(setup, coords, b)
        rhs = equations_of_motion(setup, y)
        return np.concatenate([rhs[3:6], rhs[10:13]])

    scale = np.array([1e-9] * 3 + [1e-3] * 3)
    window = np.array([5e-7] * 3 + [0.2] * 3)
    result = optimize.least_squares(
        residual, guess, bounds=(guess - window, guess + window),
        x_scale=scale, xtol=1e-15, ftol=1e-15, gtol=None)
    before = np.max(np.abs(residual(guess)))
    after = np.max(np.abs(residual(result.x)))
    if after > 1e-6 * before and after > 0:
        raise PhysicsError("no stationary point found near the requested "
                           "coordinates")
    rot = rotation_matrix(*result.x[3:6])
    b = steady_cavity_amplitude(setup, result.x[:3], rot)
    return _coordinate_state(setup, result.x, b)


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled stochastic trajectory.

    ``states`` holds one 17-component state row per sample (see
    `nanorotor.dynamics.pack_state`), starting with the initial state at
    t = 0; ``dt`` is the sample spacing and ``step_dt`` the integrator step.
    """

    times: np.ndarray
    states: np.ndarray
    dt: float
    step_dt: float
    seed: int
    noise: NoiseModel
    setup: OpticalSetup

    def __len__(self):
        return self.states.shape[0]

    def cavity(self, channel: int) -> np.ndarray:
        """Complex amplitude series of cavity mode 1 or 2."""
        if channel not in (1, 2):
            raise ValueError("channel must be 1 or 2")
        base = 13 + 2 * (channel - 1)
        return self.states[:, base] + 1j * self.states[:, base + 1]

    def mechanical_state(self, index: int) -> MechanicalState:
        return unpack_state(self.states[index], time=self.times[index])


def integrate_trajectory(initial, setup: OpticalSetup,
                         noise: NoiseModel | None, dt: float, duration: float,
                         seed: int = 0, *, record_every: int = 1,
                         model: LinearModel | None = None,
                         fields: bool = True, conservative: bool = False,
                         require_stability: bool = True,
                         chunk_steps: int = 1 << 16) -> Trajectory:
    """Integrate the full nonlinear stochastic dynamics.

    The step must resolve the fastest dynamical rate:
    dt <= 2 pi / (20 max(omega_Q, kappa, |Delta|)).  The mode frequencies
    are taken from ``model`` (computed on the fly for cooling scenarios when
    omitted).  ``fields=False`` integrates free flight plus damping only;
    ``conservative=True`` keeps only the potential force with frozen cavity
    amplitudes (thermostat checks).  Identical arguments and seed reproduce
    the trajectory bit for bit on one platform.
    """
    if require_stability and not stability_check(setup):
        raise UnstableTrapError(
            "cavity detuning does not satisfy the trapping condition; "
            "pass require_stability=False to integrate regardless")
    if isinstance(initial, MechanicalState):
        y = pack_state(initial)
    else:
        y = np.array(initial, dtype=float).copy()
        if y.shape != (kernel.STATE_WIDTH,):
            raise ValueError("initial state must be a MechanicalState or a "
                             f"({kernel.STATE_WIDTH},) vector")
    if dt <= 0 or duration <= 0:
        raise ValueError("dt and duration must be positive")

    rates = [setup.cavity.linewidth, abs(setup.cavity.detuning)]
    if fields:
        if model is None and require_stability:
            model = harmonic_expansion(setup, find_equilibrium(setup))
        if model is not None:
            rates.extend(mode.frequency for mode in model.modes)
            rates.extend(np.abs(model.detunings))
            rates.extend(model.linewidths)
    bound = 2.0 * math.pi / (20.0 * max(rates))
    if dt > bound * (1.0 + 1e-9):
        raise NumericalError(
            f"time step {dt:.3e} s does not resolve the fastest rate; "
            f"use dt <= {bound:.3e} s")

    n_steps = int(round(duration / dt))
    if n_steps < 1:
        raise ValueError("duration shorter than one step")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")

    if noise is None:
        noise = _zero_noise(setup)
    params = kernel.pack_params(
        setup, gamma=noise.damping, diffusion=noise.diffusion,
        cavity_diffusion=noise.cavity_diffusion,
        cavity_reference=(noise.cavity_detuning, noise.cavity_linewidth))

    n_records = n_steps // record_every
    states = np.empty((n_records + 1, kernel.STATE_WIDTH))
    states[0] = y
    rng = np.random.default_rng(seed)
    done = 0
    phase = 0
    row = 1
    while done < n_steps:
        m = min(chunk_steps, n_steps - done)
        draws = rng.standard_normal((m, kernel.NOISE_WIDTH))
        out, n_rec, phase, _ = kernel.advance(
            params, y, dt, draws, record_every=record_every, phase=phase,
            evaluate_fields=fields, conservative=conservative)
        states[row:row + n_rec] = out[:n_rec]
        row += n_rec
        done += m
    sample_dt = dt * record_every
    times = np.arange(n_records + 1) * sample_dt
    return Trajectory(times=times, states=states[:row], dt=sample_dt,
                      step_dt=dt, seed=int(seed), noise=noise, setup=setup)


# ---------------------------------------------------------------------------
# mode-resolved energies
# ---------------------------------------------------------------------------

def _euler_angles(states: np.ndarray) -> np.ndarray:
    """Vectorized intrinsic-ZYZ angles of the quaternion column block."""
    w, x, y, z = (states[:, 6], states[:, 7], states[:, 8], states[:, 9])
    r02 = 2.0 * (x * z + w * y)
    r12 = 2.0 * (y * z - w * x)
    r20 = 2.0 * (x * z - w * y)
    r21 = 2.0 * (y * z + w * x)
    r22 = 1.0 - 2.0 * (x * x + y * y)
    beta = np.arccos(np.clip(r22, -1.0, 1.0))
    alpha = np.arctan2(r12, r02)
    gamma = np.arctan2(r21, -r20)
    return np.column_stack([alpha, beta, gamma])


def generalized_motion(trajectory: Trajectory, model: LinearModel):
    """Displacements and velocities in the six generalized coordinates.

    Returns (dq, dqdot) relative to the model equilibrium, shape (n, 6).
    Euler angle series are unwrapped before differencing.
    """
    states = trajectory.states
    eq = model.equilibrium
    setup = trajectory.setup
    dr = states[:, 0:3] - eq.position
    euler = np.unwrap(_euler_angles(states), axis=0)
    dang = euler - eq.euler_angles
    dq = np.hstack([dr, dang])

    vel = states[:, 3:6] / setup.material.mass
    omega = states[:, 10:13] / setup.material.moments_of_inertia
    jac = np.empty((states.shape[0], 3, 3))
    sb, cb = np.sin(euler[:, 1]), np.cos(euler[:, 1])
    sg, cg = np.sin(euler[:, 2]), np.cos(euler[:, 2])
    jac[:, 0, 0] = -sb * cg
    jac[:, 0, 1] = sg
    jac[:, 0, 2] = 0.0
    jac[:, 1, 0] = sb * sg
    jac[:, 1, 1] = cg
    jac[:, 1, 2] = 0.0
    jac[:, 2, 0] = cb
    jac[:, 2, 1] = 0.0
    jac[:, 2, 2] = 1.0
    rates = np.linalg.solve(jac, omega[:, :, None])[:, :, 0]
    dqdot = np.hstack([vel, rates])
    return dq, dqdot


def mode_occupations(trajectory: Trajectory, model: LinearModel,
                     burn_in: float = BURN_IN_FRACTION) -> dict:
    """Average phonon proxy E_Q / (hbar omega_Q) - 1/2 per hybridized mode.

    Projects the trajectory onto the mass-orthonormal mode vectors and
    averages the fluctuation energy after discarding the burn-in; the sample
    mean is removed so static force offsets (radiation pressure) do not
    count as phonons.
    """
    start = int(burn_in * len(trajectory))
    dq, dqdot = generalized_motion(trajectory, model)
    dq = dq[start:]
    dqdot = dqdot[start:]
    out = {}
    for mode in model.modes:
        w = model.mass_matrix @ mode.vector
        pos = dq @ w
        vel = dqdot @ w
        pos -= pos.mean()
        vel -= vel.mean()
        energy = 0.5 * (np.mean(vel**2) + mode.frequency**2 * np.mean(pos**2))
        out[mode.label] = energy / (HBAR * mode.frequency) - 0.5
    return out


# ---------------------------------------------------------------------------
# spectral estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumResult:
    """Two-sided power spectral densities of the cavity amplitude channels.

    ``frequencies`` is in rad/s (ascending, negative to positive);
    ``psd[channel]`` is the density in 1/Hz.  ``variance_time`` and
    ``variance_spectrum`` record the Parseval check inputs per channel.
    """

    frequencies: np.ndarray
    psd: dict
    window: str
    segment_length: int
    segment_count: int
    overlap: float
    resolution: float
    variance_time: dict
    variance_spectrum: dict

    def channel(self, channel: int) -> np.ndarray:
        return self.psd[channel]


def estimate_psd(trajectory: Trajectory, channel: int | None = None,
                 window: str = "hann", segments: int = 8, *,
                 overlap: float = 0.5,
                 burn_in: float = BURN_IN_FRACTION) -> SpectrumResult:
    """Averaged-periodogram spectra of the cavity amplitude fluctuations.

    The stationary part of the trajectory (after ``burn_in``) is split into
    ``segments`` segment lengths with ``overlap`` fractional overlap; the
    global mean of each channel is subtracted (spectra are of delta-b).
    """
    if not 0.0 < overlap < 1.0:
        raise ValueError("overlap must lie in (0, 1)")
    start = int(burn_in * len(trajectory))
    n_used = len(trajectory) - start
    nperseg = n_used // segments
    if segments < 4 or nperseg < 16:
        raise InsufficientDataError(
            f"stationary span provides {n_used} samples for {segments} "
            "requested segments; at least 4 segments of 16 samples are "
            "needed")
    noverlap = int(overlap * nperseg)
    fs = 1.0 / trajectory.dt
    channels = (1, 2) if channel is None else (int(channel),)

    psd = {}
    var_time = {}
    var_spec = {}
    freqs = None
    for ch in channels:
        series = trajectory.cavity(ch)[start:]
        series = series - series.mean()
        f, spec = signal.welch(series, fs=fs, window=window, nperseg=nperseg,
                               noverlap=noverlap, detrend=False,
                               return_onesided=False, scaling="density")
        order = np.argsort(f)
        freqs = f[order]
        psd[ch] = spec[order]
        var_time[ch] = float(np.mean(np.abs(series) ** 2))
        var_spec[ch] = float(np.sum(spec) * fs / nperseg)
    step = nperseg - noverlap
    count = max(0, (n_used - noverlap) // step)
    return SpectrumResult(
        frequencies=2.0 * math.pi * freqs, psd=psd, window=window,
        segment_length=nperseg, segment_count=int(count), overlap=overlap,
        resolution=2.0 * math.pi * fs / nperseg,
        variance_time=var_time, variance_spectrum=var_spec)


# ---------------------------------------------------------------------------
# ellipticity scan
# ---------------------------------------------------------------------------

def _with_psi(setup: OpticalSetup, psi: float) -> OpticalSetup:
    tw = setup.tweezer
    rebuilt = TweezerConfig(power=tw.power, wavelength=tw.wavelength,
                            waist_x=tw.waist_x, waist_y=tw.waist_y,
                            psi=float(psi), zeta=tw.zeta)
    return OpticalSetup.build(setup.material, rebuilt, setup.cavity)


def confinement_ratio(setup: OpticalSetup) -> float:
    """Worst-to-best curvature ratio of the trap-only rotational potential.

    Eigenvalue ratio (min/max) of the mass-weighted rotational Hessian of
    the time-averaged tweezer potential (cavity dark) at the aligned
    orientation.  A ratio at or below `CONFINEMENT_TOLERANCE` means the
    polarization ellipse no longer confines one rotation direction, as
    happens for linear (gamma free) and circular (alpha free) polarization.
    """
    coords = np.array([0.0, 0.0, 0.0, -setup.tweezer.zeta, np.pi / 2, 0.0])
    dark = np.zeros(2, dtype=complex)
    step = 1e-5
    hess = np.empty((3, 3))
    for i in range(3):
        plus = coords.copy()
        minus = coords.copy()
        plus[3 + i] += step
        minus[3 + i] -= step
        gp = potential_gradient(setup, plus, dark)[3:6]
        gm = potential_gradient(setup, minus, dark)[3:6]
        hess[i] = (gp - gm) / (2.0 * step)
    hess = 0.5 * (hess + hess.T)
    inertia = mass_matrix(setup, coords)[3:, 3:]
    root = np.diag(1.0 / np.sqrt(np.diag(inertia)))
    vals = np.linalg.eigvalsh(root @ hess @ root)
    return float(vals[0] / vals[-1])


@dataclass(frozen=True)
class ScanPoint:
    """Linearized steady state at one polarization ellipticity."""

    psi: float
    stable: bool
    confinement_lost: bool
    confinement_ratio: float
    frequencies: dict | None
    occupations: dict | None
    max_occupation: float
    note: str = ""


def ellipticity_scan(setup: OpticalSetup, psi_values,
                     environment: Environment) -> tuple:
    """Steady-state occupations versus tweezer ellipticity.

    Each grid point is analyzed independently; loss of equilibrium or
    stability is reported in the point record rather than raised.  The
    trap-only confinement flag marks the linear- and circular-polarization
    endpoints where the time-averaged potential stops confining one
    rotation direction.
    """
    points = []
    for psi in np.atleast_1d(np.asarray(psi_values, dtype=float)):
        scan_setup = _with_psi(setup, psi)
        ratio = confinement_ratio(scan_setup)
        lost = not math.isfinite(ratio) or ratio <= CONFINEMENT_TOLERANCE
        try:
            report = analyze(scan_setup, environment)
        except PhysicsError as exc:
            points.append(ScanPoint(
                psi=float(psi), stable=False, confinement_lost=lost,
                confinement_ratio=ratio, frequencies=None, occupations=None,
                max_occupation=math.inf, note=str(exc)))
            continue
        occupations = dict(report.occupations)
        points.append(ScanPoint(
            psi=float(psi), stable=True, confinement_lost=lost,
            confinement_ratio=ratio, frequencies=dict(report.frequencies),
            occupations=occupations,
            max_occupation=float(max(occupations.values())),
            note="; ".join(report.warnings)))
    return tuple(points)


# ---------------------------------------------------------------------------
# rotational spin-up
# ---------------------------------------------------------------------------

def switched_setup(setup: OpticalSetup, *, psi: float = np.pi / 4,
                   power: float | None = None,
                   detuning: float | None = None) -> OpticalSetup:
    """Post-switch trap: new polarization ellipticity and cavity detuning.

    Models the spin-up protocol of switching the tweezer to circular
    polarization and moving the cavity far off resonance; the drive
    amplitude is re-derived for the new power.
    """
    tw = setup.tweezer
    rebuilt = TweezerConfig(
        power=tw.power if power is None else float(power),
        wavelength=tw.wavelength, waist_x=tw.waist_x, waist_y=tw.waist_y,
        psi=float(psi), zeta=tw.zeta)
    cavity = setup.cavity
    if detuning is not None:
        cavity = dataclasses.replace(cavity, detuning=float(detuning))
    return OpticalSetup.build(setup.material, rebuilt, cavity)


def spinup_temperature(report) -> float:
    """Angular-momentum-width temperature of a cooled steady state [K].

    Mean librational mode energy hbar omega (n + 1/2) / k_B over the three
    librational modes; infinite if any of them is uncooled.
    """
    energies = []
    for label in LIBRATIONAL_LABELS:
        n = report.occupations[label]
        omega = report.frequencies[label]
        energies.append(HBAR * omega * (n + 0.5) / BOLTZMANN)
    return float(np.mean(energies))


@dataclass(frozen=True)
class SpinupResult:
    """Rotation build-up after switching to circular polarization.

    ``rotation_rate`` is |omega_body| [rad/s] at each sample;
    ``tennis_time`` / ``stretching_time`` are the first crossing times of
    the respective thresholds (None if never crossed).  ``temperature`` is
    the angular-momentum-width temperature used for the tennis-racket flag
    (hbar omega_rot / k_B T >= 0.1).
    """

    times: np.ndarray
    rotation_rate: np.ndarray
    states: np.ndarray
    temperature: float
    tennis_threshold: float
    tennis_time: float | None
    stretching_threshold: float
    stretching_time: float | None
    seed: int
    stopped_early: bool

    @property
    def rotation_frequency(self) -> np.ndarray:
        """Rotation frequency in Hz (cycles per second)."""
        return self.rotation_rate / (2.0 * math.pi)

    @property
    def max_rotation(self) -> float:
        return float(self.rotation_rate.max())


def _first_crossing(times, values, threshold):
    hits = np.nonzero(values >= threshold)[0]
    return float(times[hits[0]]) if hits.size else None


def spinup_simulation(setup: OpticalSetup, initial, temperature: float,
                      noise: NoiseModel | None = None, *,
                      duration: float = 0.05, seed: int = 0,
                      mechanical_rate: float, samples: int = 2000,
                      samples_per_period: int = 20,
                      speed_of_sound: float = SILICON_SOUND_SPEED,
                      permittivity: float = SILICON_PERMITTIVITY,
                      stop_rotation: float | None = None) -> SpinupResult:
    """Integrate the rotational spin-up after the polarization switch.

    ``setup`` is the post-switch trap (see `switched_setup`); ``initial``
    the cooled pre-switch state; ``temperature`` the angular-momentum-width
    temperature of that state (see `spinup_temperature`).  The time step
    adapts to the growing rotation rate, keeping ``samples_per_period``
    steps per rotation period (or per trap period via ``mechanical_rate``,
    whichever is faster); the cavity rates are excluded because the cavity
    substep is unconditionally stable and far off resonance here.

    ``stop_rotation`` [rad/s] ends the run early once reached (the regime
    flags are then already decided), reported via ``stopped_early``.
    """
    if isinstance(initial, MechanicalState):
        y = pack_state(initial)
    else:
        y = np.array(initial, dtype=float).copy()
    if mechanical_rate <= 0:
        raise ValueError("mechanical_rate must be positive")
    if samples < 2:
        raise ValueError("samples must be at least 2")
    if noise is None:
        noise = _zero_noise(setup)
    params = kernel.pack_params(
        setup, gamma=noise.damping, diffusion=noise.diffusion,
        cavity_diffusion=noise.cavity_diffusion,
        cavity_reference=(noise.cavity_detuning, noise.cavity_linewidth))

    inertia = setup.material.moments_of_inertia
    rng = np.random.default_rng(seed)
    sample_dt = duration / samples
    spin = float(np.max(np.abs(y[10:13] / inertia)))
    previous = spin
    rows = [y.copy()]
    times = [0.0]
    stopped = False
    for index in range(samples):
        # predictive headroom: extrapolate the growth of the fastest spin
        rate = max(mechanical_rate,
                   spin + 2.0 * max(0.0, spin - previous))
        dt = 2.0 * math.pi / (samples_per_period * rate)
        n_steps = max(1, int(math.ceil(sample_dt / dt)))
        dt = sample_dt / n_steps
        draws = rng.standard_normal((n_steps, kernel.NOISE_WIDTH))
        _, _, _, max_spin = kernel.advance(params, y, dt, draws,
                                           record_every=n_steps)
        previous = spin
        spin = max_spin
        times.append((index + 1) * sample_dt)
        rows.append(y.copy())
        if stop_rotation is not None and max_spin >= stop_rotation:
            stopped = True
            break

    states = np.asarray(rows)
    omega_body = states[:, 10:13] / inertia
    rotation = np.linalg.norm(omega_body, axis=1)
    times = np.asarray(times)

    tennis_threshold = 0.1 * BOLTZMANN * temperature / HBAR
    l_c = setup.material.diameters[2]
    stretching_threshold = 2.0 * speed_of_sound / (permittivity * l_c)
    return SpinupResult(
        times=times, rotation_rate=rotation, states=states,
        temperature=float(temperature),
        tennis_threshold=float(tennis_threshold),
        tennis_time=_first_crossing(times, rotation, tennis_threshold),
        stretching_threshold=float(stretching_threshold),
        stretching_time=_first_crossing(times, rotation,
                                        stretching_threshold),
        seed=int(seed), stopped_early=stopped)
