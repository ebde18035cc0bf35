"""Rigid-body geometry and dielectric response of ellipsoidal particles.

Conventions used throughout the package:

* Body axes are labelled a, b, c with diameters ``l_a <= l_b <= l_c``; the
  susceptibility is smallest along a and largest along the long axis c,
  while the moments of inertia order the opposite way (``I_a >= I_b >= I_c``).
* Euler angles are intrinsic ZYZ: ``R(alpha, beta, gamma) =
  R_z(alpha) R_y(beta) R_z(gamma)`` maps body vectors to space vectors, so
  the columns of R are the body axes expressed in the space frame.
* Orientations are stored as unit quaternions (scalar first).  Euler angles
  are an input/output chart only; nothing composes them directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import elliprd

from .constants import SILICON_DENSITY, SILICON_PERMITTIVITY

__all__ = [
    "Ellipsoid",
    "MaterialResponse",
    "Orientation",
    "depolarization_factors",
    "principal_susceptibilities",
    "rotation_matrix",
    "euler_from_matrix",
    "susceptibility_tensor",
    "euler_rate_jacobian",
    "quat_multiply",
    "quat_from_euler",
    "quat_to_matrix",
]


def depolarization_factors(diameters):
    """Electrostatic depolarization factors (L_a, L_b, L_c) of an ellipsoid.

    Evaluated through Carlson's symmetric integral R_D, which is uniformly
    accurate for arbitrary aspect ratio:

        L_a = (s_a s_b s_c / 3) R_D(s_b^2, s_c^2, s_a^2),   s_i = l_i / 2,

    and cyclically for b, c.  The three factors are positive and sum to one;
    a sphere gives exactly 1/3 each.

    Parameters
    ----------
    diameters : array_like, shape (3,)
        Principal diameters (l_a, l_b, l_c).  The result is scale invariant,
        so any consistent length unit works.

    Returns
    -------
    ndarray, shape (3,)
    """
    s = np.asarray(diameters, dtype=float) / 2.0
    if s.shape != (3,) or not np.all(s > 0):
        raise ValueError("diameters must be three positive lengths")
    s2 = s * s
    pref = s[0] * s[1] * s[2] / 3.0
    return np.array([
        pref * elliprd(s2[1], s2[2], s2[0]),
        pref * elliprd(s2[2], s2[0], s2[1]),
        pref * elliprd(s2[0], s2[1], s2[2]),
    ])


def principal_susceptibilities(diameters, permittivity=SILICON_PERMITTIVITY):
    """Principal values (chi_a, chi_b, chi_c) of the volume susceptibility.

    chi_i = (eps_r - 1) / (1 + L_i (eps_r - 1)) with the depolarization
    factors L_i; for a sphere all three reduce to the Clausius-Mossotti value
    3 (eps_r - 1) / (eps_r + 2).  The induced dipole of a small ellipsoid in
    a uniform field E is p = eps_0 V chi E in body coordinates.
    """
    L = depolarization_factors(diameters)
    x = float(permittivity) - 1.0
    return x / (1.0 + L * x)


@dataclass(frozen=True)
class Ellipsoid:
    """Homogeneous dielectric ellipsoid.

    Parameters
    ----------
    diameters : tuple of float
        Principal diameters (l_a, l_b, l_c) in metres, ascending.
    density : float
        Mass density in kg/m^3 (defaults to silicon).
    permittivity : float
        Relative permittivity at the trapping wavelength (> 1).
    """

    diameters: tuple
    density: float = SILICON_DENSITY
    permittivity: float = SILICON_PERMITTIVITY

    def __post_init__(self):
        d = tuple(float(x) for x in self.diameters)
        if len(d) != 3 or any(not np.isfinite(x) or x <= 0 for x in d):
            raise ValueError("diameters must be three positive lengths")
        if not d[0] <= d[1] <= d[2]:
            raise ValueError("diameters must ascend: l_a <= l_b <= l_c")
        object.__setattr__(self, "diameters", d)
        if self.density <= 0:
            raise ValueError("density must be positive")
        if self.permittivity <= 1.0:
            raise ValueError("relative permittivity must exceed 1")

    @property
    def volume(self):
        la, lb, lc = self.diameters
        return np.pi * la * lb * lc / 6.0

    @property
    def mass(self):
        return self.density * self.volume

    @property
    def moments_of_inertia(self):
        """Principal moments (I_a, I_b, I_c), ordered I_a >= I_b >= I_c."""
        la, lb, lc = self.diameters
        return self.mass / 20.0 * np.array([
            lb * lb + lc * lc,
            la * la + lc * lc,
            la * la + lb * lb,
        ])

    @property
    def is_sphere(self):
        la, lb, lc = self.diameters
        return lc - la <= 1e-12 * lc


@dataclass(frozen=True)
class MaterialResponse:
    """Mechanical and optical response coefficients of a particle.

    Attributes
    ----------
    volume, mass : float
        SI units.
    moments_of_inertia : ndarray, shape (3,)
        Principal body-frame moments (I_a, I_b, I_c).
    susceptibilities : ndarray, shape (3,)
        Principal volume susceptibilities (chi_a, chi_b, chi_c).
    diameters : ndarray, shape (3,)
        Principal diameters (l_a <= l_b <= l_c), kept for cross sections
        that depend on the geometric size (e.g. gas collisions).
    """

    volume: float
    mass: float
    moments_of_inertia: np.ndarray
    susceptibilities: np.ndarray
    diameters: np.ndarray

    @classmethod
    def from_ellipsoid(cls, particle: Ellipsoid) -> "MaterialResponse":
        return cls(
            volume=particle.volume,
            mass=particle.mass,
            moments_of_inertia=particle.moments_of_inertia,
            susceptibilities=principal_susceptibilities(
                particle.diameters, particle.permittivity),
            diameters=np.asarray(particle.diameters, dtype=float),
        )


# ---------------------------------------------------------------------------
# rotations
# ---------------------------------------------------------------------------

def rotation_matrix(alpha, beta, gamma):
    """Body-to-space rotation R = R_z(alpha) R_y(beta) R_z(gamma)."""
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    cg, sg = np.cos(gamma), np.sin(gamma)
    return np.array([
        [ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb],
        [sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb],
        [-sb * cg, sb * sg, cb],
    ])


def euler_from_matrix(R):
    """Intrinsic ZYZ angles (alpha, beta, gamma) of a rotation matrix.

    At the chart degeneracies beta = 0, pi only the combination
    alpha +/- gamma is defined; gamma = 0 is returned there by convention.
    """
    beta = np.arccos(np.clip(R[2, 2], -1.0, 1.0))
    if np.sin(beta) > 1e-9:
        alpha = np.arctan2(R[1, 2], R[0, 2])
        gamma = np.arctan2(R[2, 1], -R[2, 0])
    elif R[2, 2] > 0.0:   # beta ~ 0: R = R_z(alpha + gamma)
        alpha = np.arctan2(R[1, 0], R[0, 0])
        gamma = 0.0
    else:                 # beta ~ pi: R = R_z(alpha - gamma) R_y(pi)
        alpha = np.arctan2(-R[1, 0], -R[0, 0])
        gamma = 0.0
    return float(alpha), float(beta), float(gamma)


def quat_multiply(p, q):
    """Hamilton product of scalar-first quaternions."""
    pw, px, py, pz = p
    qw, qx, qy, qz = q
    return np.array([
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw,
    ])


def quat_from_euler(alpha, beta, gamma):
    """Unit quaternion of the intrinsic ZYZ rotation (alpha, beta, gamma)."""
    qa = np.array([np.cos(alpha / 2), 0.0, 0.0, np.sin(alpha / 2)])
    qb = np.array([np.cos(beta / 2), 0.0, np.sin(beta / 2), 0.0])
    qg = np.array([np.cos(gamma / 2), 0.0, 0.0, np.sin(gamma / 2)])
    return quat_multiply(quat_multiply(qa, qb), qg)


def quat_to_matrix(q):
    """Rotation matrix of a unit quaternion (w, x, y, z)."""
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


@dataclass(frozen=True)
class Orientation:
    """Rigid-body orientation stored as a unit quaternion (w, x, y, z).

    Construction normalizes the quaternion; Euler angles only appear at the
    border (`from_euler` / `to_euler`).
    """

    quaternion: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.quaternion, dtype=float)
        if q.shape != (4,):
            raise ValueError("quaternion needs four components (w, x, y, z)")
        n = np.linalg.norm(q)
        if not np.isfinite(n) or n < 1e-12:
            raise ValueError("quaternion must be finite and nonzero")
        object.__setattr__(self, "quaternion", q / n)

    @classmethod
    def identity(cls) -> "Orientation":
        return cls(np.array([1.0, 0.0, 0.0, 0.0]))

    @classmethod
    def from_euler(cls, alpha, beta, gamma) -> "Orientation":
        return cls(quat_from_euler(alpha, beta, gamma))

    def to_euler(self):
        return euler_from_matrix(self.as_matrix())

    def as_matrix(self):
        return quat_to_matrix(self.quaternion)

    def compose(self, other: "Orientation") -> "Orientation":
        """Orientation whose matrix is self @ other (other applied first)."""
        return Orientation(quat_multiply(self.quaternion, other.quaternion))

    def body_to_space(self, v):
        return self.as_matrix() @ np.asarray(v, dtype=float)

    def space_to_body(self, v):
        return self.as_matrix().T @ np.asarray(v, dtype=float)


def susceptibility_tensor(principal, orientation):
    """Space-frame susceptibility tensor chi(Omega) = R chi_0 R^T.

    Parameters
    ----------
    principal : array_like, shape (3,)
        Principal susceptibilities (chi_a, chi_b, chi_c).
    orientation : Orientation, (3, 3) rotation matrix, or ZYZ angle triple.
    """
    R = _as_rotation_matrix(orientation)
    return (R * np.asarray(principal, dtype=float)) @ R.T


def euler_rate_jacobian(beta, gamma):
    """Matrix B mapping ZYZ Euler rates to body angular velocity.

    omega_body = B @ (dalpha/dt, dbeta/dt, dgamma/dt).  Singular at the
    chart degeneracies beta = 0, pi.
    """
    sb, cb = np.sin(beta), np.cos(beta)
    sg, cg = np.sin(gamma), np.cos(gamma)
    return np.array([
        [-sb * cg, sg, 0.0],
        [sb * sg, cg, 0.0],
        [cb, 0.0, 1.0],
    ])


def _as_rotation_matrix(orientation):
    if isinstance(orientation, Orientation):
        return orientation.as_matrix()
    arr = np.asarray(orientation, dtype=float)
    if arr.shape == (3, 3):
        return arr
    if arr.shape == (3,):
        return rotation_matrix(*arr)
    raise ValueError("orientation must be an Orientation, 3x3 matrix, or "
                     "ZYZ angle triple")
