"""Coupled particle-cavity dynamics.

Deterministic physics of a dielectric ellipsoid in the combined tweezer and
cavity field: optical potential, conservative gradient force/torque, the
non-conservative radiation-pressure force and torque (first order in the
Rayleigh scattering rate), the driven two-mode cavity with its effective
detuning/linewidth matrices, and the assembled equations of motion.

Orientational dynamics are formulated with body-frame angular momentum J
and quaternion kinematics dq/dt = (1/2) q * (0, I^⁻¹J), which stays regular
at all orientations.  Cavity amplitudes are classical complex numbers;
noise enters only in the stochastic layer.

State vector layout (17 floats, used by the integrators and the kernels)::

    y = [x, y, z, px, py, pz, qw, qx, qy, qz, Ja, Jb, Jc,
         Re b1, Im b1, Re b2, Im b2]
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import HBAR, VACUUM_PERMITTIVITY
from .errors import NumericalError
from .fields import (
    CavityConfig,
    PolarizationBasis,
    TweezerConfig,
    cavity_mode,
    field_scale,
    tweezer_mode,
)
from .geometry import (
    Ellipsoid,
    MaterialResponse,
    Orientation,
    quat_multiply,
    quat_to_matrix,
)

__all__ = [
    "OpticalConstants",
    "OpticalSetup",
    "MechanicalState",
    "optical_potential",
    "gradient_force",
    "radiation_force",
    "optical_torque",
    "radiation_torque",
    "cavity_drive",
    "effective_detuning",
    "effective_linewidth",
    "steady_cavity_amplitude",
    "stability_check",
    "equations_of_motion",
    "total_energy",
    "pack_state",
    "unpack_state",
]


@dataclass(frozen=True)
class OpticalConstants:
    """Cavity coupling frequency u0 < 0 and Rayleigh scattering rate
    gamma_sc > 0 (both rad/s)."""

    u0: float
    gamma_sc: float

    @classmethod
    def from_configs(cls, material: MaterialResponse, tweezer: TweezerConfig,
                     cavity: CavityConfig) -> "OpticalConstants":
        omega = tweezer.angular_frequency
        k = tweezer.wavenumber
        v = material.volume
        v_c = cavity.mode_volume
        return cls(u0=-omega * v / (2.0 * v_c),
                   gamma_sc=omega * k**3 * v**2 / (6.0 * np.pi * v_c))


@dataclass(frozen=True)
class OpticalSetup:
    """Immutable bundle of particle response and trap/cavity parameters."""

    material: MaterialResponse
    tweezer: TweezerConfig
    cavity: CavityConfig
    basis: PolarizationBasis
    constants: OpticalConstants

    @classmethod
    def build(cls, particle, tweezer: TweezerConfig,
              cavity: CavityConfig) -> "OpticalSetup":
        material = (particle if isinstance(particle, MaterialResponse)
                    else MaterialResponse.from_ellipsoid(particle))
        if tweezer.amplitude is None:
            tweezer = tweezer.with_amplitude(cavity)
        return cls(
            material=material,
            tweezer=tweezer,
            cavity=cavity,
            basis=PolarizationBasis.from_configs(tweezer, cavity),
            constants=OpticalConstants.from_configs(material, tweezer, cavity),
        )

    def chi_space(self, rotation):
        """Space-frame susceptibility tensor for a body-to-space matrix."""
        return (rotation * self.material.susceptibilities) @ rotation.T


@dataclass(frozen=True)
class MechanicalState:
    """Dynamical state: position R, momentum p, orientation, body-frame
    angular momentum J, complex cavity amplitudes b = (b1, b2), time."""

    position: np.ndarray
    momentum: np.ndarray
    orientation: Orientation
    angular_momentum: np.ndarray
    cavity: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position",
                           np.asarray(self.position, dtype=float))
        object.__setattr__(self, "momentum",
                           np.asarray(self.momentum, dtype=float))
        object.__setattr__(self, "angular_momentum",
                           np.asarray(self.angular_momentum, dtype=float))
        object.__setattr__(self, "cavity",
                           np.asarray(self.cavity, dtype=complex))
        vals = np.concatenate([self.position, self.momentum,
                               self.angular_momentum,
                               self.cavity.view(float)])
        if not np.all(np.isfinite(vals)):
            raise ValueError("state entries must be finite")


def pack_state(state: MechanicalState) -> np.ndarray:
    """Flatten a MechanicalState into the 17-component vector layout."""
    b = state.cavity
    return np.concatenate([
        state.position, state.momentum, state.orientation.quaternion,
        state.angular_momentum,
        [b[0].real, b[0].imag, b[1].real, b[1].imag],
    ])


def unpack_state(y, time=0.0) -> MechanicalState:
    """Inverse of `pack_state`; renormalizes the quaternion."""
    y = np.asarray(y, dtype=float)
    return MechanicalState(
        position=y[0:3].copy(), momentum=y[3:6].copy(),
        orientation=Orientation(y[6:10]),
        angular_momentum=y[10:13].copy(),
        cavity=np.array([y[13] + 1j * y[14], y[15] + 1j * y[16]]),
        time=time)


# ---------------------------------------------------------------------------
# field evaluation shared by all force/torque/cavity expressions
# ---------------------------------------------------------------------------

class _FieldPoint:
    """Total field, susceptibility, and standing-wave factors at one
    configuration (internal work object)."""

    __slots__ = ("E", "grad", "chi", "u", "f_t", "f_c", "grad_f_t",
                 "grad_f_c", "scale")

    def __init__(self, setup: OpticalSetup, r, rotation, b):
        tw, cav, basis = setup.tweezer, setup.cavity, setup.basis
        self.f_t, self.grad_f_t = tweezer_mode(r, tw)
        self.f_c, self.grad_f_c = cavity_mode(r, cav, tw.wavenumber)
        self.scale = field_scale(tw, cav)
        e_b = b[0] * basis.e_1 + b[1] * basis.e_2
        eps = tw.amplitude
        self.E = self.scale * (eps * basis.e_t * self.f_t + e_b * self.f_c)
        self.grad = self.scale * (eps * np.outer(self.grad_f_t, basis.e_t)
                                  + np.outer(self.grad_f_c, e_b))
        self.chi = setup.chi_space(rotation)
        self.u = self.chi @ self.E


def _rotation_of(orientation):
    if isinstance(orientation, Orientation):
        return orientation.as_matrix()
    arr = np.asarray(orientation, dtype=float)
    if arr.shape == (3, 3):
        return arr
    raise ValueError("orientation must be an Orientation or rotation matrix")


def _pot_prefactor(setup):
    return VACUUM_PERMITTIVITY * setup.material.volume / 2.0


def _rad_prefactor(setup):
    return (VACUUM_PERMITTIVITY * setup.tweezer.wavenumber**3
            * setup.material.volume**2 / (12.0 * np.pi))


# ---------------------------------------------------------------------------
# potential, forces, torques
# ---------------------------------------------------------------------------

def optical_potential(setup: OpticalSetup, r, orientation, b) -> float:
    """Conservative optical potential V = -(eps0 V/4) E* . chi E [J].

    The bilinear form is exactly real for the symmetric susceptibility; a
    residual imaginary part beyond 1e-12 relative indicates an internal
    inconsistency and raises.
    """
    fp = _FieldPoint(setup, r, _rotation_of(orientation), np.asarray(b, complex))
    val = np.conj(fp.E) @ fp.u * (-0.25 * VACUUM_PERMITTIVITY
                                  * setup.material.volume)
    if abs(val.imag) > 1e-12 * max(abs(val.real), 1e-300):
        raise NumericalError("optical potential has a non-real residue")
    return float(val.real)


def gradient_force(setup: OpticalSetup, r, orientation, b):
    """Conservative force -grad_R V = (eps0 V/2) Re[(d_k E)* . chi E] [N]."""
    fp = _FieldPoint(setup, r, _rotation_of(orientation), np.asarray(b, complex))
    return _pot_prefactor(setup) * np.real(np.conj(fp.grad) @ fp.u)


def radiation_force(setup: OpticalSetup, r, orientation, b):
    """Non-conservative radiation-pressure force [N].

    F_k = (eps0 k^3 V^2 / 12 pi) Im[(chi E)* . d_k(chi E)].
    """
    fp = _FieldPoint(setup, r, _rotation_of(orientation), np.asarray(b, complex))
    return _radiation_force_from_field(setup, fp.chi, fp.E, fp.grad)


def _radiation_force_from_field(setup, chi, E, grad):
    u = chi @ E
    return _rad_prefactor(setup) * np.imag((grad @ chi) @ np.conj(u))


def optical_torque(setup: OpticalSetup, r, orientation, b):
    """Conservative torque (eps0 V/2) Re[(chi E) x E*], space frame [N m].

    Equals minus the orientational gradient of the optical potential with
    respect to space-frame rotations.
    """
    fp = _FieldPoint(setup, r, _rotation_of(orientation), np.asarray(b, complex))
    return _pot_prefactor(setup) * np.real(np.cross(fp.u, np.conj(fp.E)))


def radiation_torque(setup: OpticalSetup, r, orientation, b):
    """Non-conservative radiation torque, space frame [N m].

    N = (eps0 k^3 V^2 / 12 pi) Im[(chi^2 E*) x E - (chi E*) x (chi E)];
    vanishes for spheres and for purely real (linear) fields.
    """
    fp = _FieldPoint(setup, r, _rotation_of(orientation), np.asarray(b, complex))
    term1 = np.imag(np.cross(np.conj(fp.chi @ fp.u), fp.E))
    term2 = np.imag(np.cross(np.conj(fp.u), fp.u))
    return _rad_prefactor(setup) * (term1 - term2)


# ---------------------------------------------------------------------------
# cavity dynamics
# ---------------------------------------------------------------------------

def _mode_overlaps(setup, r, rotation):
    """f_t, f_c and the 2x2/2-vector susceptibility contractions used by the
    cavity equations."""
    tw, cav, basis = setup.tweezer, setup.cavity, setup.basis
    f_t, _ = tweezer_mode(r, tw)
    f_c, _ = cavity_mode(r, cav, tw.wavenumber)
    chi = setup.chi_space(rotation)
    ev = np.array([basis.e_1, basis.e_2])
    chi_jj = ev @ chi @ ev.T
    chi2_jj = (ev @ chi) @ (chi @ ev.T)
    chi_jt = ev @ (chi @ basis.e_t)
    chi2_jt = (ev @ chi) @ (chi @ basis.e_t)
    return f_t, f_c, chi_jj, chi2_jj, chi_jt, chi2_jt


def effective_detuning(setup: OpticalSetup, r, orientation):
    """Orientation-dependent detuning matrix
    [Delta_eff]_jj' = Delta delta_jj' - U0 f_c^2 e_j . chi e_j' (symmetric)."""
    _, f_c, chi_jj, _, _, _ = _mode_overlaps(setup, r, _rotation_of(orientation))
    return (setup.cavity.detuning * np.eye(2)
            - setup.constants.u0 * f_c**2 * chi_jj)


def effective_linewidth(setup: OpticalSetup, r, orientation):
    """Effective linewidth matrix
    [kappa_eff]_jj' = kappa delta_jj' + (gamma_sc/2) f_c^2 e_j . chi^2 e_j';
    positive definite with eigenvalues >= kappa."""
    _, f_c, _, chi2_jj, _, _ = _mode_overlaps(setup, r, _rotation_of(orientation))
    return (setup.cavity.linewidth * np.eye(2)
            + 0.5 * setup.constants.gamma_sc * f_c**2 * chi2_jj)


def cavity_drive(setup: OpticalSetup, r, orientation):
    """Coherent-scattering drive eta of the two cavity modes [rad/s].

    eta_j = -eps f_c f_t e_j . (i U0 chi + gamma_sc chi^2 / 2) e_t.
    """
    f_t, f_c, _, _, chi_jt, chi2_jt = _mode_overlaps(
        setup, r, _rotation_of(orientation))
    eps = setup.tweezer.amplitude
    return -eps * f_c * f_t * (1j * setup.constants.u0 * chi_jt
                               + 0.5 * setup.constants.gamma_sc * chi2_jt)


def steady_cavity_amplitude(setup: OpticalSetup, r, orientation):
    """Fixed point of the cavity equation at frozen mechanics:
    b = -(i Delta_eff - kappa_eff)^-1 eta."""
    rot = _rotation_of(orientation)
    m = (1j * effective_detuning(setup, r, rot)
         - effective_linewidth(setup, r, rot))
    return np.linalg.solve(m, -cavity_drive(setup, r, rot))


def stability_check(setup: OpticalSetup) -> bool:
    """Red-detuning condition for a confining time-averaged potential:
    Delta < U0 chi_c (strict)."""
    chi_c = setup.material.susceptibilities[2]
    return bool(setup.cavity.detuning < setup.constants.u0 * chi_c)


# ---------------------------------------------------------------------------
# equations of motion and energy
# ---------------------------------------------------------------------------

def equations_of_motion(setup: OpticalSetup, y, t=0.0, conservative=False):
    """Deterministic time derivative of the 17-component state vector.

    With conservative=True the non-conservative pieces (radiation force and
    torque, cavity losses, and all Rayleigh-scattering terms) are dropped,
    leaving exactly the Hamiltonian flow of `total_energy`.
    """
    y = np.asarray(y, dtype=float)
    m = setup.material.mass
    inertia = setup.material.moments_of_inertia
    r = y[0:3]
    p = y[3:6]
    q = y[6:10]
    q = q / np.linalg.norm(q)
    J = y[10:13]
    b = np.array([y[13] + 1j * y[14], y[15] + 1j * y[16]])
    rot = quat_to_matrix(q)

    fp = _FieldPoint(setup, r, rot, b)
    pot_pref = _pot_prefactor(setup)
    force = pot_pref * np.real(np.conj(fp.grad) @ fp.u)
    torque = pot_pref * np.real(np.cross(fp.u, np.conj(fp.E)))
    if not conservative:
        rad_pref = _rad_prefactor(setup)
        force = force + rad_pref * np.imag((fp.grad @ fp.chi) @ np.conj(fp.u))
        torque = torque + rad_pref * (
            np.imag(np.cross(np.conj(fp.chi @ fp.u), fp.E))
            - np.imag(np.cross(np.conj(fp.u), fp.u)))

    omega_body = J / inertia
    dq = 0.5 * quat_multiply(q, np.array([0.0, *omega_body]))
    dJ = rot.T @ torque - np.cross(omega_body, J)

    basis = setup.basis
    ev = np.array([basis.e_1, basis.e_2])
    chi_jj = ev @ fp.chi @ ev.T
    delta_eff = setup.cavity.detuning * np.eye(2) \
        - setup.constants.u0 * fp.f_c**2 * chi_jj
    chi_jt = ev @ (fp.chi @ basis.e_t)
    eps = setup.tweezer.amplitude
    eta = -eps * fp.f_c * fp.f_t * 1j * setup.constants.u0 * chi_jt
    if conservative:
        db = 1j * delta_eff @ b + eta
    else:
        chi2_jj = (ev @ fp.chi) @ (fp.chi @ ev.T)
        kappa_eff = setup.cavity.linewidth * np.eye(2) \
            + 0.5 * setup.constants.gamma_sc * fp.f_c**2 * chi2_jj
        chi2_jt = (ev @ fp.chi) @ (fp.chi @ basis.e_t)
        eta = eta - eps * fp.f_c * fp.f_t \
            * 0.5 * setup.constants.gamma_sc * chi2_jt
        db = (1j * delta_eff - kappa_eff) @ b + eta

    return np.concatenate([
        p / m, force, dq, dJ,
        [db[0].real, db[0].imag, db[1].real, db[1].imag],
    ])


def total_energy(setup: OpticalSetup, y) -> float:
    """Conserved energy of the conservative flow [J]:

    |p|^2/2m + J . I^-1 J / 2 + V_opt(R, Omega, b) - hbar Delta |b|^2.
    """
    y = np.asarray(y, dtype=float)
    p = y[3:6]
    J = y[10:13]
    b = np.array([y[13] + 1j * y[14], y[15] + 1j * y[16]])
    q = y[6:10] / np.linalg.norm(y[6:10])
    kin = p @ p / (2.0 * setup.material.mass) \
        + 0.5 * np.sum(J**2 / setup.material.moments_of_inertia)
    pot = optical_potential(setup, y[0:3], quat_to_matrix(q), b)
    cav = -HBAR * setup.cavity.detuning * float(np.sum(np.abs(b) ** 2))
    return kin + pot + cav
