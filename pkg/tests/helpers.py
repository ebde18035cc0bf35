"""Shared numerical oracles for the test suite.

Everything here deliberately takes a *different* route from the production
code (adaptive quadrature instead of Carlson symmetric integrals, scipy
Rotation objects instead of explicit quaternion algebra, dense Lyapunov
solves instead of rate formulas) so that agreement between the two is an
actual check and not a tautology.
"""

import numpy as np
from scipy import integrate

NM = 1e-9
UM = 1e-6
MBAR = 100.0  # Pa

# The four benchmark parameter sets used throughout the suite (1550 nm
# tweezer, psi = pi/6, zeta = 0, helium at 1e-9 mbar and 300 K; frequencies
# are angular rates in rad/s).
ROW1 = dict(
    diameters=(70 * NM, 70 * NM, 70 * NM),
    power=0.5, wavelength=1.55 * UM, waist_x=1.6 * UM, waist_y=1.3 * UM,
    psi=np.pi / 6, zeta=0.0,
    cavity_length=3e-3, cavity_waist=40 * UM,
    kappa=3e5, detuning=-5e5, theta=np.pi / 4, phi=3 * np.pi / 8,
    pressure=1e-9 * MBAR, gas_temperature=300.0,
)
ROW2 = dict(ROW1, diameters=(25 * NM, 40 * NM, 100 * NM),
            power=0.1, kappa=2e6, detuning=-1.1e7, theta=np.pi / 2, phi=0.0)
ROW3 = dict(ROW1, diameters=(25 * NM, 40 * NM, 100 * NM))
ROW4 = dict(
    diameters=(69 * NM, 70 * NM, 71 * NM),
    power=0.1, wavelength=1.55 * UM, waist_x=800 * NM, waist_y=650 * NM,
    psi=np.pi / 6, zeta=0.0,
    cavity_length=1.5e-3, cavity_waist=30 * UM,
    kappa=6e5, detuning=-1.8e6, theta=np.pi / 4, phi=3 * np.pi / 8,
    pressure=1e-9 * MBAR, gas_temperature=300.0,
)


def make_setup(row=None, **overrides):
    """Build an OpticalSetup from a benchmark row dict (default: row 1)."""
    from nanorotor.dynamics import OpticalSetup
    from nanorotor.fields import CavityConfig, TweezerConfig
    from nanorotor.geometry import Ellipsoid

    p = dict(row or ROW1)
    p.update(overrides)
    particle = Ellipsoid(p["diameters"])
    tweezer = TweezerConfig(power=p["power"], wavelength=p["wavelength"],
                            waist_x=p["waist_x"], waist_y=p["waist_y"],
                            psi=p["psi"], zeta=p["zeta"])
    cavity = CavityConfig(length=p["cavity_length"], waist=p["cavity_waist"],
                          linewidth=p["kappa"], detuning=p["detuning"],
                          theta=p["theta"], phi=p["phi"])
    return OpticalSetup.build(particle, tweezer, cavity)


def trap_orientation(zeta=0.0):
    """Orientation at the tweezer minimum: c along the major polarization
    axis, b along the minor one, a along -z."""
    from nanorotor.geometry import Orientation

    return Orientation.from_euler(-zeta, np.pi / 2, 0.0)


def depolarization_quadrature(diameters):
    """Depolarization factors by adaptive quadrature.

    Uses the substitution t = s_c^2 tan^2(u) to map [0, inf) onto a finite
    interval:

        L_i = (s_a s_b s_c / 2) * Int_0^inf dt / [(t + s_i^2) sqrt(prod_j (t + s_j^2))]
    """
    s = np.asarray(diameters, dtype=float) / 2.0
    sa, sb, sc = s
    out = []
    for i in range(3):
        si2 = s[i] ** 2

        def integrand(u):
            t = sc**2 * np.tan(u) ** 2
            jac = 2.0 * sc**2 * np.tan(u) / np.cos(u) ** 2
            denom = (t + si2) * np.sqrt((t + sa**2) * (t + sb**2) * (t + sc**2))
            return jac / denom

        val, _ = integrate.quad(integrand, 0.0, np.pi / 2, epsabs=0.0,
                                epsrel=1e-13, limit=400)
        out.append(0.5 * sa * sb * sc * val)
    return np.array(out)


# ---------------------------------------------------------------------------
# linearized-dynamics oracle
# ---------------------------------------------------------------------------

def _embedded_state(setup, coords, velocities, b):
    """Pack generalized coordinates/velocities into the 17-float state."""
    from nanorotor.dynamics import MechanicalState, pack_state
    from nanorotor.geometry import Orientation, euler_rate_jacobian

    coords = np.asarray(coords, dtype=float)
    velocities = np.asarray(velocities, dtype=float)
    omega_body = euler_rate_jacobian(coords[4], coords[5]) @ velocities[3:]
    state = MechanicalState(
        position=coords[:3],
        momentum=setup.material.mass * velocities[:3],
        orientation=Orientation.from_euler(*coords[3:]),
        angular_momentum=setup.material.moments_of_inertia * omega_body,
        cavity=np.asarray(b, dtype=complex),
    )
    return pack_state(state)


def _reduced_derivative(setup, coords0, b0, u):
    """Time derivative of u = [dq, dq_dot, Re db1, Im db1, Re db2, Im db2].

    Evaluates the full nonlinear vector field and maps the body-frame
    angular-momentum derivative back to Euler-angle accelerations.  Valid
    for linearization about a resting configuration (the Coriolis-type
    dB/dt term is second order in the velocities there).
    """
    from nanorotor.dynamics import equations_of_motion
    from nanorotor.geometry import euler_rate_jacobian

    coords = coords0 + u[:6]
    vel = u[6:12]
    b = np.array([b0[0] + u[12] + 1j * u[13],
                  b0[1] + u[14] + 1j * u[15]])
    y = _embedded_state(setup, coords, vel, b)
    yd = equations_of_motion(setup, y)
    inertia = setup.material.moments_of_inertia
    binv = np.linalg.inv(euler_rate_jacobian(coords[4], coords[5]))
    acc = np.concatenate([yd[3:6] / setup.material.mass,
                          binv @ (yd[10:13] / inertia)])
    return np.concatenate([vel, acc, yd[13:17]])


def linearized_drift(setup, coordinates, cavity):
    """16x16 drift matrix of the dynamics about a mechanical configuration,
    by fourth-order finite differences of the full vector field."""
    coords0 = np.asarray(coordinates, dtype=float)
    b0 = np.asarray(cavity, dtype=complex)
    tw = setup.tweezer
    lin = np.array([tw.waist_x, tw.waist_y, tw.rayleigh_range])
    coord_scale = np.concatenate([lin, np.ones(3)]) * 1e-4
    scales = np.concatenate([coord_scale, coord_scale * 1e6,
                             np.full(4, 1e-4 * max(1.0, np.abs(b0).max()))])

    def f(u):
        return _reduced_derivative(setup, coords0, b0, u)

    a = np.zeros((16, 16))
    for j in range(16):
        e = np.zeros(16)
        e[j] = scales[j]
        a[:, j] = (-f(2 * e) + 8 * f(e) - 8 * f(-e) + f(-2 * e)) / (12 * scales[j])
    return a


def linear_noise_matrix(model, heating, modes):
    """Noise-intensity matrix D (in dC/dt = A C + C A^T + D) for the reduced
    state: per-mode momentum diffusion matched to the heating rates
    [phonons/s] plus half-quantum shot noise on the cavity quadratures."""
    from nanorotor.constants import HBAR

    mass = model.mass_matrix
    d = np.zeros((16, 16))
    for mode in modes:
        i = mode.dominant
        d[6 + i, 6 + i] += (2.0 * HBAR * mode.frequency * heating[mode.label]
                            / mass[i, i])
    for j in (0, 1):
        d[12 + 2 * j, 12 + 2 * j] = model.linewidths[j] / 2.0
        d[13 + 2 * j, 13 + 2 * j] = model.linewidths[j] / 2.0
    return d


def zero_point_scale(model):
    """Per-state-variable zero-point scales used to nondimensionalize the
    16-dimensional linear system (covariance entries span ~20 decades)."""
    from nanorotor.constants import HBAR

    mass = model.mass_matrix
    scale = np.ones(16)
    for m in model.modes:
        z = np.sqrt(HBAR / (2.0 * mass[m.dominant, m.dominant]
                            * m.frequency))
        scale[m.dominant] = z
        scale[6 + m.dominant] = z * m.frequency
    return scale


def modal_energies(model, sigma, modes):
    """Occupations of the given modes from a 16x16 state covariance."""
    from nanorotor.constants import HBAR

    out = {}
    for mode in modes:
        w = model.mass_matrix @ mode.vector
        qq = w @ sigma[:6, :6] @ w
        vv = w @ sigma[6:12, 6:12] @ w
        energy = 0.5 * (vv + mode.frequency**2 * qq)
        out[mode.label] = energy / (HBAR * mode.frequency) - 0.5
    return out


def lyapunov_occupations(setup, model, heating, labels=None):
    """Steady-state occupations from the exact covariance of the linearized
    dynamics: solve A S + S A^T + D = 0 with momentum diffusion matched to
    the given per-mode heating rates [phonons/s] and half-quantum shot noise
    on the cavity quadratures, then read off the modal energies.

    When ``labels`` is given, only those modes are kept and the remaining
    mechanical coordinates are sliced out of the drift (dark or flat
    coordinates have no damping, which would make the Lyapunov equation
    singular).  The slice is verified: the kept block must not be driven by
    the dropped coordinates.

    Independent of the weak-coupling rate formulas under test.
    """
    from scipy.linalg import solve_continuous_lyapunov

    eq = model.equilibrium
    a = linearized_drift(setup, eq.coordinates, eq.cavity)

    modes = [m for m in model.modes if labels is None or m.label in labels]
    coords = [m.dominant for m in modes]
    keep = coords + [6 + i for i in coords] + [12, 13, 14, 15]

    d = linear_noise_matrix(model, heating, modes)
    scale = zero_point_scale(model)
    s_inv = 1.0 / scale
    a_t = a * np.outer(s_inv, scale)
    d_t = d * np.outer(s_inv, s_inv)

    if len(keep) < 16:
        drop = [i for i in range(16) if i not in keep]
        cross = np.abs(a_t[np.ix_(keep, drop)]).max()
        body = np.abs(a_t[np.ix_(keep, keep)]).max()
        assert cross <= 1e-6 * body, (
            "kept modes are driven by sliced-out coordinates")
    a_t = a_t[np.ix_(keep, keep)]
    d_t = d_t[np.ix_(keep, keep)]

    sig = np.zeros((16, 16))
    sig[np.ix_(keep, keep)] = solve_continuous_lyapunov(a_t, -d_t)
    sigma = sig * np.outer(scale, scale)
    return modal_energies(model, sigma, modes)


def sampled_linear_occupations(setup, model, heating, *, samples=5_000_000,
                               interval=3e-5, burn=10_000, seed=12345,
                               chunk=100_000):
    """Occupations from *sampling* the linearized SDE with exact Gaussian
    transitions.

    The 16-dimensional system du = A u dt + noise (same drift and noise
    intensity as `lyapunov_occupations`) is discretized without stepping
    error: the transition matrix exp(A h) and the process covariance
    Q_h = Int_0^h exp(As) D exp(A^T s) ds come from one block matrix
    exponential, so the only deviation from the Lyapunov covariance is
    statistical.  Requires every mode damped (drift Hurwitz).
    """
    from scipy.linalg import cholesky, expm, solve_discrete_lyapunov

    eq = model.equilibrium
    a = linearized_drift(setup, eq.coordinates, eq.cavity)
    modes = list(model.modes)
    d = linear_noise_matrix(model, heating, modes)
    scale = zero_point_scale(model)
    s_inv = 1.0 / scale
    a_t = a * np.outer(s_inv, scale)
    d_t = d * np.outer(s_inv, s_inv)

    block = np.zeros((32, 32))
    block[:16, :16] = -a_t * interval
    block[:16, 16:] = d_t * interval
    block[16:, 16:] = a_t.T * interval
    e = expm(block)
    phi = e[16:, 16:].T
    q_h = phi @ e[:16, 16:]
    q_h = 0.5 * (q_h + q_h.T)

    # internal consistency: the discrete chain's stationary covariance must
    # reproduce the continuous Lyapunov solution
    from scipy.linalg import solve_continuous_lyapunov
    sig_c = solve_continuous_lyapunov(a_t, -d_t)
    sig_d = solve_discrete_lyapunov(phi, q_h)
    assert np.max(np.abs(sig_d - sig_c)) <= 1e-6 * np.max(np.abs(sig_c))

    jitter = 1e-12 * np.trace(q_h) / 16.0
    root = cholesky(q_h + jitter * np.eye(16), lower=True)
    rng = np.random.default_rng(seed)
    x = np.zeros(16)
    second = np.zeros((16, 16))
    kept = 0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        kicks = rng.standard_normal((m, 16)) @ root.T
        states = np.empty((m, 16))
        for i in range(m):
            x = phi @ x + kicks[i]
            states[i] = x
        skip = min(m, max(0, burn - done))
        if skip < m:
            second += states[skip:].T @ states[skip:]
            kept += m - skip
        done += m
    sigma = (second / kept) * np.outer(scale, scale)
    return modal_energies(model, sigma, modes)
