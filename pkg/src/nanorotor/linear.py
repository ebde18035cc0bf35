"""Equilibrium, harmonic expansion and weak-coupling cooling analysis.

The pipeline: find the self-consistent equilibrium of mechanics plus cavity,
expand the optical potential to second order in the generalized coordinates
q = (x, y, z, alpha, beta, gamma), hybridize the two cavity-coupled blocks
S1 = {x, y, z, alpha} and S2 = {beta, gamma}, and evaluate Purcell
cooling/heating rates, photon-recoil and gas heating, steady-state
occupations, cooling timescales, torque sensitivity and coherence times.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg, optimize

from .constants import BOLTZMANN, HBAR, HELIUM_MASS, VACUUM_PERMITTIVITY
from .dynamics import (
    OpticalSetup,
    effective_detuning,
    effective_linewidth,
    gradient_force,
    optical_potential,
    optical_torque,
    stability_check,
    steady_cavity_amplitude,
)
from .errors import EquilibriumNotFoundError, PhysicsError, UnstableTrapError
from .fields import cavity_mode, field_scale, total_field
from .geometry import Orientation, euler_rate_jacobian

__all__ = [
    "COORDINATES",
    "BLOCKS",
    "Environment",
    "Equilibrium",
    "Mode",
    "CoolingRates",
    "LinearModel",
    "CoolingReport",
    "analyze",
    "cooling_rates",
    "cooling_timescales",
    "coherence_times",
    "find_equilibrium",
    "gas_damping_rate",
    "gas_heating_rates",
    "harmonic_expansion",
    "heating_rates",
    "hybridize",
    "mass_matrix",
    "potential_gradient",
    "rate_validity",
    "recoil_heating_rates",
    "steady_state_occupations",
    "torque_sensitivity",
]

COORDINATES = ("x", "y", "z", "alpha", "beta", "gamma")
#: cavity mode 1 couples to S1, mode 2 to S2 (indices into COORDINATES)
BLOCKS = ((0, 1, 2, 3), (4, 5))
#: modes below this angular frequency count as free ("r.t.") rotations
FREQUENCY_FLOOR = 2.0 * np.pi * 10.0
_CROSS_TOL = 1e-6


@dataclass(frozen=True)
class Environment:
    """Residual gas and the reference temperature for cooling timescales.

    Pressure in Pa; the translational drag of an aspherical particle differs
    from the librational one by a geometry factor of order unity, exposed as
    ``translational_gas_factor``.
    """

    pressure: float = 0.0
    gas_temperature: float = 300.0
    gas_mass: float = HELIUM_MASS
    translational_gas_factor: float = 1.0
    initial_temperature: float = 40.0

    def __post_init__(self):
        if self.pressure < 0:
            raise ValueError("pressure must be non-negative")
        if self.gas_temperature <= 0 or self.initial_temperature <= 0:
            raise ValueError("temperatures must be positive")


@dataclass(frozen=True)
class Equilibrium:
    """Joint rest configuration of mechanics and cavity amplitudes."""

    coordinates: np.ndarray
    cavity: np.ndarray
    residual: float
    potential: float

    @property
    def position(self):
        return self.coordinates[:3]

    @property
    def euler_angles(self):
        return self.coordinates[3:]

    def orientation(self) -> Orientation:
        return Orientation.from_euler(*self.coordinates[3:])


@dataclass(frozen=True)
class Mode:
    """One hybridized mechanical mode.

    ``vector`` is the mass-orthonormal eigenvector over the six generalized
    coordinates, ``dominant`` the index of its largest mass-weighted
    component, ``mass``/``zero_point`` the effective mass and zero-point
    amplitude of that dominant coordinate at the mode frequency, and
    ``coupling`` the optomechanical coupling g_Q to its block's cavity mode.
    """

    label: str
    block: int
    frequency: float
    coupling: complex
    vector: np.ndarray
    dominant: int
    mass: float
    zero_point: float


@dataclass(frozen=True)
class CoolingRates:
    """Anti-Stokes (minus) and Stokes (plus) scattering rates [1/s]."""

    minus: float
    plus: float

    @property
    def net(self):
        return self.minus - self.plus


@dataclass(frozen=True)
class LinearModel:
    """Second-order expansion of the potential about an equilibrium."""

    setup: OpticalSetup
    equilibrium: Equilibrium
    mass_matrix: np.ndarray
    hessian: np.ndarray
    mixed: np.ndarray
    detunings: np.ndarray
    linewidths: np.ndarray
    modes: tuple
    unconfined: tuple

    def mode(self, label: str) -> Mode:
        for mode in self.modes:
            if mode.label == label:
                return mode
        raise KeyError(label)

    @property
    def frequencies(self):
        return {mode.label: mode.frequency for mode in self.modes}


@dataclass(frozen=True)
class CoolingReport:
    """Full steady-state summary for one setup and environment.

    ``occupations`` covers all six primed mode labels and is ``inf`` for
    modes that are unconfined or not net cooled (reported as "r.t.").
    """

    environment: Environment
    equilibrium: Equilibrium
    model: LinearModel
    frequencies: dict
    occupations: dict
    rates: dict
    heating: dict
    timescales: dict
    coherence_times: dict
    torque_sensitivity: float | None
    validity: dict
    warnings: tuple

    def is_cooled(self, label: str) -> bool:
        return math.isfinite(self.occupations[label])


# ---------------------------------------------------------------------------
# gradients and finite differences
# ---------------------------------------------------------------------------

def _coordinate_scales(setup: OpticalSetup):
    tw = setup.tweezer
    return np.array([tw.waist_x, tw.waist_y, tw.rayleigh_range,
                     1.0, 1.0, 1.0])


def potential_gradient(setup: OpticalSetup, coordinates, cavity):
    """dV/d(x, y, z, alpha, beta, gamma) at fixed cavity amplitudes.

    The angular part maps the space-frame torque to Euler-angle generalized
    forces via the body-rate Jacobian.
    """
    coords = np.asarray(coordinates, dtype=float)
    ori = Orientation.from_euler(*coords[3:])
    force = gradient_force(setup, coords[:3], ori, cavity)
    torque_body = ori.as_matrix().T @ optical_torque(setup, coords[:3], ori,
                                                     cavity)
    bmat = euler_rate_jacobian(coords[4], coords[5])
    return -np.concatenate([force, bmat.T @ torque_body])


def _cavity_gradient(setup: OpticalSetup, coordinates, cavity):
    """Wirtinger derivatives dV/db_j (j = 1, 2) at fixed mechanics."""
    coords = np.asarray(coordinates, dtype=float)
    ori = Orientation.from_euler(*coords[3:])
    sample = total_field(coords[:3], cavity, setup.tweezer, setup.cavity,
                         setup.basis)
    chi = setup.chi_space(ori.as_matrix())
    f_c, _ = cavity_mode(coords[:3], setup.cavity, setup.tweezer.wavenumber)
    scale = field_scale(setup.tweezer, setup.cavity)
    pref = 0.25 * VACUUM_PERMITTIVITY * setup.material.volume
    ev = np.array([setup.basis.e_1, setup.basis.e_2])
    return -pref * scale * f_c * (ev @ (chi @ sample.E.conj()))


def _steady(setup: OpticalSetup, coords):
    return steady_cavity_amplitude(
        setup, coords[:3], Orientation.from_euler(*coords[3:]))


def mass_matrix(setup: OpticalSetup, coordinates):
    """Kinetic metric diag(m, m, m) + B^T I B in the generalized coordinates."""
    coords = np.asarray(coordinates, dtype=float)
    m = setup.material.mass
    bmat = euler_rate_jacobian(coords[4], coords[5])
    out = np.zeros((6, 6))
    out[:3, :3] = m * np.eye(3)
    out[3:, 3:] = bmat.T @ np.diag(setup.material.moments_of_inertia) @ bmat
    return out


def _differentiate(func, coords, steps):
    """Richardson-extrapolated fourth-order derivative of a vector function:
    returns J[k, i] = d func_k / d coords_i."""
    cols = []
    for i, h in enumerate(steps):
        e = np.zeros(len(coords))
        e[i] = 1.0

        def central(step):
            return (-func(coords + 2 * step * e) + 8 * func(coords + step * e)
                    - 8 * func(coords - step * e)
                    + func(coords - 2 * step * e)) / (12 * step)

        cols.append((16.0 * central(h / 2) - central(h)) / 15.0)
    return np.stack(cols, axis=-1)


# ---------------------------------------------------------------------------
# equilibrium
# ---------------------------------------------------------------------------

def find_equilibrium(setup: OpticalSetup,
                     initial_coordinates=None) -> Equilibrium:
    """Solve for the trap rest configuration with the cavity slaved to it.

    The trap is defined by the tweezer: the rest configuration is the
    stationary point of the tweezer trapping potential (force and torque
    balance below 1e-12 in natural units, i.e. trap depth per coordinate
    scale), and the cavity amplitudes are the steady state (db/dt = 0) in
    that configuration.  The weak intracavity fields also exert static
    forces; their effect on the rest point is a small displacement that is
    deliberately not folded back into the expansion point, because the
    linear model treats the particle-cavity interaction consistently at
    linear response about the trap configuration.  (Chasing the joint
    static balance instead would drag the expansion point down the
    standing-wave phase, outside the regime the weak-coupling analysis
    describes.)

    Raises
    ------
    UnstableTrapError
        If the detuning violates the confinement condition or the
        stationary point is a saddle (e.g. no orientational trapping).
    EquilibriumNotFoundError
        If the root search stalls.
    """
    if not stability_check(setup):
        bound = setup.constants.u0 * setup.material.susceptibilities[2]
        raise UnstableTrapError(
            "no confining time-averaged potential: detuning "
            f"{setup.cavity.detuning:.6g} rad/s is not below "
            f"U0 chi_c = {bound:.6g} rad/s")

    scales = _coordinate_scales(setup)
    if initial_coordinates is None:
        seed = np.array([0.0, 0.0, 0.0, -setup.tweezer.zeta, np.pi / 2, 0.0])
    else:
        seed = np.asarray(initial_coordinates, dtype=float).copy()

    dark = np.zeros(2, dtype=complex)

    def value(coords):
        return optical_potential(
            setup, coords[:3], Orientation.from_euler(*coords[3:]), dark)

    depth = abs(value(seed))
    if depth == 0.0:
        raise EquilibriumNotFoundError(
            "tweezer potential vanishes at the seed configuration")
    force_scale = depth / scales

    def curvature(coords, i, rel=1e-3):
        e = np.zeros(6)
        e[i] = rel * scales[i]
        return ((value(coords + e) - 2.0 * value(coords)
                 + value(coords - e)) / (rel * scales[i]) ** 2)

    # Exact continuous symmetries (sphere rotations, the free spin of a
    # symmetric top about its figure axis, and the in-plane rotation at
    # circular polarization) leave flat directions that must be excluded
    # from the root search; the full potential picks them up again in the
    # harmonic expansion if the cavity confines them.
    curv = np.array([curvature(seed, i) for i in range(6)])
    active = np.flatnonzero(np.abs(curv) * scales**2 > 1e-9 * depth)

    def residual(u):
        coords = seed.copy()
        coords[active] += u * scales[active]
        return (potential_gradient(setup, coords, dark) / force_scale)[active]

    coords = seed.copy()
    if active.size:
        sol = optimize.root(residual, np.zeros(active.size), method="hybr",
                            tol=1e-14)
        coords[active] += sol.x * scales[active]

    natural = np.abs(potential_gradient(setup, coords, dark)) / force_scale
    worst = float(natural.max())
    if worst >= 1e-12:
        raise EquilibriumNotFoundError(
            f"force balance stalled at residual {worst:.3e} (natural units)")

    for i in active:
        c = curvature(coords, i)
        if c < 0 and abs(c) * scales[i] ** 2 > 1e-9 * depth:
            raise UnstableTrapError(
                f"equilibrium is a saddle along {COORDINATES[i]}")

    b = _steady(setup, coords)
    return Equilibrium(
        coordinates=coords, cavity=b, residual=worst,
        potential=optical_potential(
            setup, coords[:3], Orientation.from_euler(*coords[3:]), b))


# ---------------------------------------------------------------------------
# harmonic expansion
# ---------------------------------------------------------------------------

def hybridize(hessian, mass):
    """Normal modes of the quadratic form (1/2) dq^T H dq with kinetic
    metric M: returns (frequencies, columns) with columns^T M columns = 1."""
    try:
        vals, vecs = linalg.eigh(np.asarray(hessian, dtype=float),
                                 np.asarray(mass, dtype=float))
    except linalg.LinAlgError as exc:
        raise PhysicsError("kinetic metric is not positive definite") from exc
    if np.any(vals <= 0.0):
        raise PhysicsError(
            "harmonic expansion has a non-positive curvature "
            "(dark or unstable mode combination)")
    return np.sqrt(vals), vecs


def _assign_labels(mass_sub, vectors):
    """Match each mode column to its dominant coordinate by mass-weighted
    overlap (greedy, largest overlaps first)."""
    chol = np.linalg.cholesky(mass_sub)
    overlaps = np.abs(chol.T @ vectors)
    n = vectors.shape[1]
    pairs = sorted(((overlaps[c, k], c, k)
                    for c in range(n) for k in range(n)),
                   key=lambda t: (-t[0], t[2]))
    coord_of = {}
    used = set()
    for _, c, k in pairs:
        if k not in coord_of and c not in used:
            coord_of[k] = c
            used.add(c)
    return coord_of


def harmonic_expansion(setup: OpticalSetup,
                       equilibrium: Equilibrium) -> LinearModel:
    """Second-order expansion of the optical potential at fixed cavity
    amplitudes, block-checked and hybridized.

    Mechanical and optomechanical cross couplings between the two
    polarization blocks must vanish (they do so by symmetry); values above
    1e-6 of the local scale raise, values below are zeroed.
    """
    coords0 = equilibrium.coordinates
    b = equilibrium.cavity
    scales = _coordinate_scales(setup)
    mass = mass_matrix(setup, coords0)

    def stacked(coords):
        grad = potential_gradient(setup, coords, b)
        wirt = _cavity_gradient(setup, coords, b)
        return np.concatenate([grad, wirt.real, wirt.imag])

    jac = _differentiate(stacked, coords0, 1e-3 * scales)
    hess = 0.5 * (jac[:6] + jac[:6].T)
    mixed = jac[6:8] + 1j * jac[8:10]

    energy = abs(equilibrium.potential)
    hnorm = hess * np.outer(scales, scales) / energy

    omega2 = np.diag(hess) / np.diag(mass)
    confined = omega2 > FREQUENCY_FLOOR**2
    unconfined = tuple(COORDINATES[i] for i in np.flatnonzero(~confined))

    hess = hess.copy()
    for i in np.flatnonzero(~confined):
        row = np.abs(hnorm[i]).copy()
        row[i] = 0.0
        if row.max() > 1e-8:
            raise PhysicsError(
                f"free coordinate {COORDINATES[i]} couples to the confined "
                "ones; harmonic analysis is not applicable")
        hess[i, :] = 0.0
        hess[:, i] = 0.0
        mixed[:, i] = 0.0

    for i in BLOCKS[0]:
        for j in BLOCKS[1]:
            if confined[i] and confined[j]:
                bound = _CROSS_TOL * math.sqrt(hess[i, i] * hess[j, j])
                if abs(hess[i, j]) > bound:
                    raise PhysicsError(
                        "polarization blocks mix: |H["
                        f"{COORDINATES[i]},{COORDINATES[j]}]| exceeds 1e-6 "
                        "of the geometric mean of the diagonals")
            hess[i, j] = 0.0
            hess[j, i] = 0.0

    # optomechanical couplings must follow the same block pattern
    zp = np.zeros(6)
    idx_conf = np.flatnonzero(confined)
    zp[idx_conf] = np.sqrt(HBAR / (2.0 * np.diag(mass)[idx_conf]
                                   * np.sqrt(omega2[idx_conf])))
    gnorm = np.abs(mixed) * zp / HBAR
    for j, block in enumerate(BLOCKS):
        inside = [q for q in block if confined[q]]
        ref = gnorm[j, inside].max() if inside else 0.0
        for q in range(6):
            if q in block:
                continue
            if confined[q] and ref > 0 and gnorm[j, q] > _CROSS_TOL * ref:
                raise PhysicsError(
                    f"cavity mode {j + 1} couples to {COORDINATES[q]} "
                    "outside its polarization block")
            mixed[j, q] = 0.0
        # inside the block, clip couplings at the differentiation noise
        # floor so symmetry-dark coordinates classify as uncooled instead
        # of inheriting an absurd occupation from a ~1e-15 residual
        for q in block:
            if gnorm[j, q] <= 1e-12 * ref:
                mixed[j, q] = 0.0

    modes = []
    for j, block in enumerate(BLOCKS):
        idx = [q for q in block if confined[q]]
        if not idx:
            continue
        freqs, vecs = hybridize(hess[np.ix_(idx, idx)],
                                mass[np.ix_(idx, idx)])
        coord_of = _assign_labels(mass[np.ix_(idx, idx)], vecs)
        for k, freq in enumerate(freqs):
            vector = np.zeros(6)
            vector[idx] = vecs[:, k]
            dominant = idx[coord_of[k]]
            m_eff = mass[dominant, dominant]
            coupling = (-math.sqrt(HBAR / (2.0 * freq)) / HBAR
                        * np.dot(vector, mixed[j]))
            modes.append(Mode(
                label=COORDINATES[dominant] + "'",
                block=j + 1,
                frequency=float(freq),
                coupling=complex(coupling),
                vector=vector,
                dominant=dominant,
                mass=float(m_eff),
                zero_point=math.sqrt(HBAR / (2.0 * m_eff * freq)),
            ))
    modes.sort(key=lambda m: m.dominant)

    r0, ori0 = coords0[:3], Orientation.from_euler(*coords0[3:])
    detunings = np.diag(effective_detuning(setup, r0, ori0)).copy()
    linewidths = np.diag(effective_linewidth(setup, r0, ori0)).copy()

    return LinearModel(setup=setup, equilibrium=equilibrium,
                       mass_matrix=mass, hessian=hess, mixed=mixed,
                       detunings=detunings, linewidths=linewidths,
                       modes=tuple(modes), unconfined=unconfined)


# ---------------------------------------------------------------------------
# heating rates
# ---------------------------------------------------------------------------

def gas_damping_rate(material, environment: Environment) -> float:
    """Specular-collision gas damping 5 p l_b^2 sqrt(2 pi mu) / (6 m sqrt(kB Tg))."""
    l_b = material.diameters[1]
    return (5.0 * environment.pressure * l_b**2
            * math.sqrt(2.0 * math.pi * environment.gas_mass)
            / (6.0 * material.mass
               * math.sqrt(BOLTZMANN * environment.gas_temperature)))


def recoil_heating_rates(model: LinearModel) -> dict:
    """Photon-recoil heating [phonons/s] per hybridized mode.

    Translations: xi = (gamma_sc eps^2 / 5) k^2 q_zp^2 [(chi_c^2 cos^2 psi +
    chi_b^2 sin^2 psi)(2 + u delta_zq) - chi_c^2 cos^2 psi delta_xq -
    chi_b^2 sin^2 psi delta_yq] with u = 5 (1 - 1/k z_R)^2.  Librations:
    xi = gamma_sc eps^2 q_zp^2 dchi_q^2 [1 - sin^2 psi delta_beta_q -
    cos^2 psi delta_gamma_q] with dchi_alpha = |chi_b - chi_c| cyclic.
    """
    setup = model.setup
    tw = setup.tweezer
    gamma_eps2 = setup.constants.gamma_sc * tw.amplitude**2
    k = tw.wavenumber
    chi_a, chi_b, chi_c = setup.material.susceptibilities
    cos2 = math.cos(tw.psi) ** 2
    sin2 = math.sin(tw.psi) ** 2
    mix = chi_c**2 * cos2 + chi_b**2 * sin2
    u = 5.0 * (1.0 - 1.0 / (k * tw.rayleigh_range)) ** 2

    trans_factor = {
        0: 2.0 * mix - chi_c**2 * cos2,
        1: 2.0 * mix - chi_b**2 * sin2,
        2: (2.0 + u) * mix,
    }
    libr_factor = {
        3: (chi_b - chi_c) ** 2,
        4: (chi_c - chi_a) ** 2 * (1.0 - sin2),
        5: (chi_a - chi_b) ** 2 * (1.0 - cos2),
    }

    out = {}
    for mode in model.modes:
        zp2 = mode.zero_point**2
        if mode.dominant < 3:
            out[mode.label] = (gamma_eps2 / 5.0) * k**2 * zp2 * \
                trans_factor[mode.dominant]
        else:
            out[mode.label] = gamma_eps2 * zp2 * libr_factor[mode.dominant]
    return out


def gas_heating_rates(model: LinearModel, environment: Environment) -> dict:
    """Collisional heating xi = gamma_gas kB Tg / (hbar omega) [phonons/s]."""
    gamma_gas = gas_damping_rate(model.setup.material, environment)
    kt = BOLTZMANN * environment.gas_temperature
    out = {}
    for mode in model.modes:
        factor = (environment.translational_gas_factor
                  if mode.dominant < 3 else 1.0)
        out[mode.label] = factor * gamma_gas * kt / (HBAR * mode.frequency)
    return out


def heating_rates(model: LinearModel, environment: Environment) -> dict:
    """Total heating: photon recoil plus residual gas."""
    recoil = recoil_heating_rates(model)
    gas = gas_heating_rates(model, environment)
    return {label: recoil[label] + gas[label] for label in recoil}


# ---------------------------------------------------------------------------
# cooling rates and steady state
# ---------------------------------------------------------------------------

def cooling_rates(model: LinearModel) -> dict:
    """Sideband scattering rates gamma_-+ = 2 |g|^2 kappa_j /
    [kappa_j^2 + (Delta_j +- omega)^2] per mode."""
    out = {}
    for mode in model.modes:
        kappa = model.linewidths[mode.block - 1]
        delta = model.detunings[mode.block - 1]
        g2 = abs(mode.coupling) ** 2
        out[mode.label] = CoolingRates(
            minus=2.0 * g2 * kappa / (kappa**2 + (delta + mode.frequency) ** 2),
            plus=2.0 * g2 * kappa / (kappa**2 + (delta - mode.frequency) ** 2),
        )
    return out


def rate_validity(model: LinearModel):
    """Weak-coupling validity flags per mode plus human-readable gripes.

    Checks gamma_-+ <= 0.1 kappa_j and, pairwise within a block,
    gamma_Q gamma_Q' <= 0.1 (omega_Q - omega_Q')^2 (dark-mode guard).
    """
    rates = cooling_rates(model)
    flags = {mode.label: True for mode in model.modes}
    gripes = []
    for mode in model.modes:
        kappa = model.linewidths[mode.block - 1]
        r = rates[mode.label]
        if max(r.minus, r.plus) > 0.1 * kappa:
            flags[mode.label] = False
            gripes.append(f"{mode.label}: scattering rate exceeds 10% of "
                          "the cavity linewidth")
    for i, mode in enumerate(model.modes):
        for other in model.modes[i + 1:]:
            if other.block != mode.block:
                continue
            sep = (mode.frequency - other.frequency) ** 2
            prod = rates[mode.label].minus * rates[other.label].minus
            if prod > 0.1 * sep:
                flags[mode.label] = False
                flags[other.label] = False
                gripes.append(
                    f"{mode.label}/{other.label}: near-degenerate pair, "
                    "rates are not additive")
    return flags, tuple(gripes)


def steady_state_occupations(model: LinearModel,
                             environment: Environment) -> dict:
    """n_Q = (gamma_+ + xi_Q) / (gamma_- - gamma_+); inf where the mode is
    unconfined or not net cooled (reported as "r.t.")."""
    rates = cooling_rates(model)
    xi = heating_rates(model, environment)
    out = {name + "'": math.inf for name in COORDINATES}
    for mode in model.modes:
        r = rates[mode.label]
        if r.net > 0.0:
            out[mode.label] = (r.plus + xi[mode.label]) / r.net
    return out


def cooling_timescales(model: LinearModel,
                       environment: Environment) -> dict:
    """Time to cool from the initial temperature to the steady state:
    ln[kB T0 / (hbar omega n)] / (gamma_- - gamma_+)."""
    rates = cooling_rates(model)
    xi = heating_rates(model, environment)
    kt0 = BOLTZMANN * environment.initial_temperature
    out = {}
    for mode in model.modes:
        r = rates[mode.label]
        if r.net <= 0.0:
            out[mode.label] = math.inf
            continue
        n = (r.plus + xi[mode.label]) / r.net
        argument = kt0 / (HBAR * mode.frequency * n)
        out[mode.label] = math.log(argument) / r.net if argument > 1.0 else 0.0
    return out


def coherence_times(model: LinearModel, environment: Environment) -> dict:
    """Single-phonon coherence time 1/xi_Q per confined mode."""
    return {label: 1.0 / xi
            for label, xi in heating_rates(model, environment).items()}


def torque_sensitivity(model: LinearModel,
                       environment: Environment) -> float | None:
    """Minimal detectable torque at 1 s, sqrt(4 hbar omega I xi), read off
    the gamma' libration (the channel-2 output is immune to center-of-mass
    noise); None when that mode is not confined."""
    try:
        mode = model.mode("gamma'")
    except KeyError:
        return None
    xi = heating_rates(model, environment)["gamma'"]
    return math.sqrt(4.0 * HBAR * mode.frequency * mode.mass * xi)


def analyze(setup: OpticalSetup,
            environment: Environment | None = None) -> CoolingReport:
    """Run the full chain: equilibrium, expansion, rates, steady state."""
    env = environment if environment is not None else Environment()
    equilibrium = find_equilibrium(setup)
    model = harmonic_expansion(setup, equilibrium)
    flags, gripes = rate_validity(model)
    for gripe in gripes:
        warnings.warn(gripe, UserWarning, stacklevel=2)
    return CoolingReport(
        environment=env,
        equilibrium=equilibrium,
        model=model,
        frequencies=model.frequencies,
        occupations=steady_state_occupations(model, env),
        rates=cooling_rates(model),
        heating=heating_rates(model, env),
        timescales=cooling_timescales(model, env),
        coherence_times=coherence_times(model, env),
        torque_sensitivity=torque_sensitivity(model, env),
        validity=flags,
        warnings=gripes,
    )
