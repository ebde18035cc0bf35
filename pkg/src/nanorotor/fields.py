"""Tweezer and cavity optical fields.

Geometry: the tweezer propagates along +z with an elliptic Gaussian focus
(waists w_x, w_y) and is polarized in the x-y plane,
e_t = cos(psi) e_t1 + i sin(psi) e_t2 with ellipticity psi in [0, pi/4] and
in-plane rotation zeta.  The cavity supports two degenerate polarization
modes, e_1 = cos(theta) e_x - sin(theta) e_y in the plane and e_2 = e_z,
with standing-wave axis e_c = e_2 x e_1.  Complex field amplitudes carry
the photon normalization sqrt(2 hbar omega / eps0 V_c), so the tweezer
amplitude eps and the cavity amplitudes b = (b_1, b_2) are dimensionless.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .constants import HBAR, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY

__all__ = [
    "TweezerConfig",
    "CavityConfig",
    "PolarizationBasis",
    "FieldSample",
    "tweezer_mode",
    "cavity_mode",
    "tweezer_amplitude_from_power",
    "field_scale",
    "total_field",
]


@dataclass(frozen=True)
class TweezerConfig:
    """Optical tweezer parameters.

    Attributes
    ----------
    power : float
        Optical power in W.
    wavelength : float
        Vacuum wavelength in m (k = 2 pi / wavelength, omega = c k).
    waist_x, waist_y : float
        Focal waists in m.
    psi : float
        Polarization ellipticity, 0 (linear) to pi/4 (circular).
    zeta : float
        In-plane rotation of the polarization ellipse.
    amplitude : float or None
        Dimensionless drive amplitude eps; derived from the power once the
        cavity mode volume is known (see `with_amplitude`).
    rayleigh_range : float or None
        Override for z_R; defaults to the geometric-mean convention
        z_R = k w_x w_y / 2.
    """

    power: float
    wavelength: float
    waist_x: float
    waist_y: float
    psi: float
    zeta: float = 0.0
    amplitude: float | None = None
    rayleigh_range: float | None = None

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("power must be non-negative")
        if self.wavelength <= 0 or self.waist_x <= 0 or self.waist_y <= 0:
            raise ValueError("wavelength and waists must be positive")
        if not 0.0 <= self.psi <= np.pi / 4:
            raise ValueError("ellipticity psi must lie in [0, pi/4]")
        if self.rayleigh_range is None:
            object.__setattr__(
                self, "rayleigh_range",
                self.wavenumber * self.waist_x * self.waist_y / 2.0)
        elif self.rayleigh_range <= 0:
            raise ValueError("rayleigh_range must be positive")

    @property
    def wavenumber(self):
        return 2.0 * np.pi / self.wavelength

    @property
    def angular_frequency(self):
        return SPEED_OF_LIGHT * self.wavenumber

    def with_amplitude(self, cavity: "CavityConfig") -> "TweezerConfig":
        """Return a copy with the drive amplitude fixed from the power."""
        return replace(self, amplitude=tweezer_amplitude_from_power(self, cavity))


@dataclass(frozen=True)
class CavityConfig:
    """Two-mode cavity parameters.

    Attributes
    ----------
    length : float
        Mirror separation L in m.
    waist : float
        Cavity mode waist w_c in m.
    linewidth : float
        Amplitude decay rate kappa in rad/s.
    detuning : float
        Delta = omega_tweezer - omega_cavity in rad/s (negative: red).
    theta : float
        Angle of the in-plane mode polarization e_1 from the x axis (equals
        the angle between the cavity axis and the y axis).
    phi : float
        Standing-wave phase at the tweezer focus.
    """

    length: float
    waist: float
    linewidth: float
    detuning: float
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if self.length <= 0 or self.waist <= 0:
            raise ValueError("cavity length and waist must be positive")
        if self.linewidth <= 0:
            raise ValueError("cavity linewidth must be positive")

    @property
    def mode_volume(self):
        """Gaussian standing-wave mode volume pi w_c^2 L / 4."""
        return np.pi * self.waist**2 * self.length / 4.0

    @property
    def axis(self):
        """Standing-wave axis e_c = e_2 x e_1."""
        return np.array([np.sin(self.theta), np.cos(self.theta), 0.0])


@dataclass(frozen=True)
class PolarizationBasis:
    """Unit polarization vectors of the tweezer and the two cavity modes.

    e_t is the (complex) tweezer polarization; e_t1/e_t2 its major/minor
    axes; e_1 (in plane) and e_2 = e_z the cavity mode polarizations; e_c
    the cavity axis.
    """

    e_t: np.ndarray
    e_t1: np.ndarray
    e_t2: np.ndarray
    e_1: np.ndarray
    e_2: np.ndarray
    e_c: np.ndarray

    @classmethod
    def from_angles(cls, psi, zeta, theta) -> "PolarizationBasis":
        e_t1 = np.array([np.cos(zeta), -np.sin(zeta), 0.0])
        e_t2 = np.array([np.sin(zeta), np.cos(zeta), 0.0])
        e_1 = np.array([np.cos(theta), -np.sin(theta), 0.0])
        e_2 = np.array([0.0, 0.0, 1.0])
        return cls(
            e_t=np.cos(psi) * e_t1 + 1j * np.sin(psi) * e_t2,
            e_t1=e_t1, e_t2=e_t2, e_1=e_1, e_2=e_2,
            e_c=np.cross(e_2, e_1),
        )

    @classmethod
    def from_configs(cls, tweezer: TweezerConfig,
                     cavity: CavityConfig) -> "PolarizationBasis":
        return cls.from_angles(tweezer.psi, tweezer.zeta, cavity.theta)


@dataclass(frozen=True)
class FieldSample:
    """Electric field E and spatial gradient at one point.

    grad[k, i] = d E_i / d r_k (both complex); units V/m and V/m^2.
    """

    E: np.ndarray
    grad: np.ndarray


def tweezer_mode(r, tweezer: TweezerConfig):
    """Tweezer mode function f_t and its gradient at position r.

    f_t(r) = exp(i k z) exp[-(x^2/w_x^2 + y^2/w_y^2)/q] / q with
    q(z) = 1 + i z / z_R.  This compact complex-q form carries the
    transverse Gaussian with broadening r(z) = |q|, the Gouy phase
    arctan(z/z_R) and the wavefront-curvature phase, and is normalized to
    f_t(0) = 1.

    Returns
    -------
    (f, grad_f) : complex scalar and complex (3,) array with grad_f[k] = d f / d r_k.
    """
    x, y, z = np.asarray(r, dtype=float)
    k = tweezer.wavenumber
    zr = tweezer.rayleigh_range
    q = 1.0 + 1j * z / zr
    rho2 = (x / tweezer.waist_x) ** 2 + (y / tweezer.waist_y) ** 2
    f = np.exp(1j * k * z - rho2 / q) / q
    dlog = np.array([
        -2.0 * x / (tweezer.waist_x**2 * q),
        -2.0 * y / (tweezer.waist_y**2 * q),
        1j * (k - 1.0 / (zr * q) + rho2 / (zr * q * q)),
    ])
    return f, f * dlog


def cavity_mode(r, cavity: CavityConfig, wavenumber):
    """Standing-wave mode f_c = cos(k e_c . r + phi) and its gradient.

    The longitudinal profile is evaluated at the drive wavenumber; the
    transverse Gaussian envelope only sets the mode volume and is not
    resolved on the nanometre scale of the particle motion.
    """
    e_c = cavity.axis
    arg = wavenumber * np.dot(e_c, np.asarray(r, dtype=float)) + cavity.phi
    return np.cos(arg), -wavenumber * np.sin(arg) * e_c


def tweezer_amplitude_from_power(tweezer: TweezerConfig,
                                 cavity: CavityConfig):
    """Dimensionless tweezer amplitude eps for a given optical power.

    The focal intensity of the elliptic Gaussian fixes
    |E_0|^2 = 4 P / (pi eps0 c w_x w_y), and expressing the focal field in
    the photon-normalized units of the total field gives
    eps = sqrt(eps0 V_c |E_0|^2 / 2 hbar omega).
    """
    E0_sq = 4.0 * tweezer.power / (
        np.pi * VACUUM_PERMITTIVITY * SPEED_OF_LIGHT
        * tweezer.waist_x * tweezer.waist_y)
    return np.sqrt(VACUUM_PERMITTIVITY * cavity.mode_volume * E0_sq
                   / (2.0 * HBAR * tweezer.angular_frequency))


def field_scale(tweezer: TweezerConfig, cavity: CavityConfig):
    """Photon-normalization prefactor sqrt(2 hbar omega / eps0 V_c) [V/m]."""
    return np.sqrt(2.0 * HBAR * tweezer.angular_frequency
                   / (VACUUM_PERMITTIVITY * cavity.mode_volume))


def total_field(r, b, tweezer: TweezerConfig, cavity: CavityConfig,
                basis: PolarizationBasis | None = None) -> FieldSample:
    """Total drive + cavity field at position r for cavity amplitudes b.

    E(r) = sqrt(2 hbar omega / eps0 V_c) [eps e_t f_t(r) + sum_j b_j e_j f_c(r)],
    linear in (eps, b_1, b_2).  If the tweezer amplitude has not been fixed
    yet it is derived from the power on the fly.
    """
    if basis is None:
        basis = PolarizationBasis.from_configs(tweezer, cavity)
    eps = tweezer.amplitude
    if eps is None:
        eps = tweezer_amplitude_from_power(tweezer, cavity)
    b = np.asarray(b, dtype=complex)
    scale = field_scale(tweezer, cavity)
    f_t, grad_f_t = tweezer_mode(r, tweezer)
    f_c, grad_f_c = cavity_mode(r, cavity, tweezer.wavenumber)
    e_b = b[0] * basis.e_1 + b[1] * basis.e_2
    E = scale * (eps * basis.e_t * f_t + e_b * f_c)
    grad = scale * (eps * np.outer(grad_f_t, basis.e_t)
                    + np.outer(grad_f_c, e_b))
    return FieldSample(E=E, grad=grad)
