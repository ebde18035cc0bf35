"""Pure-Python stepping backend.

Operation-for-operation mirror of the compiled extension; see
`nanorotor.kernel` for the algorithm and the parameter layout.  This module
is selected automatically when the extension is unavailable or when
``NANOROTOR_FORCE_PYTHON=1`` is set.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

__all__ = ["advance_chunk"]

# axis sequence and weights of the symmetric free-top splitting
_TOP_AXES = (0, 1, 2, 1, 0)
_TOP_WEIGHTS = (0.5, 0.5, 1.0, 0.5, 0.5)


def _quat_to_matrix(q):
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def _free_top(q, J, inertia, h):
    """Exact axis-split free-top step: J in the body frame, attitude q.

    Each substep is the exact flow of one axis term J_i^2/2I_i: J rotates
    about the body axis i by -theta while the attitude picks up the same
    axis rotation by +theta; |J| is preserved exactly.
    """
    for axis, w in zip(_TOP_AXES, _TOP_WEIGHTS):
        theta = (J[axis] / inertia[axis]) * (h * w)
        ch = math.cos(0.5 * theta)
        sh = math.sin(0.5 * theta)
        c = 1.0 - 2.0 * sh * sh
        s = 2.0 * sh * ch
        j = (axis + 1) % 3
        k = (axis + 2) % 3
        jj, jk = J[j], J[k]
        J[j] = c * jj + s * jk
        J[k] = -s * jj + c * jk
        d = [ch, 0.0, 0.0, 0.0]
        d[1 + axis] = sh
        qw, qx, qy, qz = q
        dw, dx, dy, dz = d
        q[0] = qw * dw - qx * dx - qy * dy - qz * dz
        q[1] = qw * dx + qx * dw + qy * dz - qz * dy
        q[2] = qw * dy - qx * dz + qy * dw + qz * dx
        q[3] = qw * dz + qx * dy - qy * dx + qz * dw


class _Evaluator:
    """Field, force and cavity-coefficient evaluation for one parameter set."""

    def __init__(self, params, conservative):
        self.chi0 = params[4:7].copy()
        self.eps = params[7]
        self.k = params[8]
        self.zr = params[9]
        self.wx = params[10]
        self.wy = params[11]
        e_t1 = params[14:17]
        e_t2 = params[17:20]
        self.e_t = params[12] * e_t1 + 1j * params[13] * e_t2
        self.e_1 = params[20:23].copy()
        self.e_2 = params[23:26].copy()
        self.e_c = params[26:29].copy()
        self.phi_c = params[29]
        self.delta = params[30]
        self.kappa = params[31]
        self.u0 = params[32]
        self.g_sc = params[33]
        self.pp = params[34]
        self.rp = params[35]
        self.ev = np.vstack([self.e_1, self.e_2])
        self.conservative = conservative

    def _modes(self, r):
        x, y, z = r
        q = 1.0 + 1j * z / self.zr
        rho2 = (x / self.wx) ** 2 + (y / self.wy) ** 2
        f_t = cmath.exp(1j * self.k * z - rho2 / q) / q
        dlog = np.array([
            -2.0 * x / (self.wx**2 * q),
            -2.0 * y / (self.wy**2 * q),
            1j * (self.k - 1.0 / (self.zr * q) + rho2 / (self.zr * q * q)),
        ])
        arg = self.k * (self.e_c @ r) + self.phi_c
        return f_t, f_t * dlog, math.cos(arg), -self.k * math.sin(arg) * self.e_c

    def cavity_coefficients(self, r, rot):
        """(M, eta): db/dt = M b + eta at frozen mechanics."""
        f_t, _, f_c, _ = self._modes(r)
        chi = (rot * self.chi0) @ rot.T
        ev = self.ev
        chi_jj = ev @ chi @ ev.T
        chi2_jj = (ev @ chi) @ (chi @ ev.T)
        chi_jt = ev @ (chi @ self.e_t)
        chi2_jt = (ev @ chi) @ (chi @ self.e_t)
        delta_eff = self.delta * np.eye(2) - self.u0 * f_c**2 * chi_jj
        kappa_eff = self.kappa * np.eye(2) + 0.5 * self.g_sc * f_c**2 * chi2_jj
        eta = -self.eps * f_c * f_t * (1j * self.u0 * chi_jt
                                       + 0.5 * self.g_sc * chi2_jt)
        return 1j * delta_eff - kappa_eff, eta

    def forces(self, r, rot, b):
        """Force [N] and body-frame torque [N m] at one configuration."""
        f_t, grad_f_t, f_c, grad_f_c = self._modes(r)
        chi = (rot * self.chi0) @ rot.T
        e_b = b[0] * self.e_1 + b[1] * self.e_2
        E = self.eps * self.e_t * f_t + e_b * f_c
        grad = (self.eps * np.outer(grad_f_t, self.e_t)
                + np.outer(grad_f_c, e_b))
        u = chi @ E
        force = self.pp * np.real(np.conj(grad) @ u)
        torque = self.pp * np.real(np.cross(u, np.conj(E)))
        if not self.conservative:
            force = force + self.rp * np.imag((grad @ chi) @ np.conj(u))
            torque = torque + self.rp * (
                np.imag(np.cross(np.conj(chi @ u), E))
                - np.imag(np.cross(np.conj(u), u)))
        return force, rot.T @ torque


def _cn_half(m_mat, eta, b, h):
    """Crank-Nicolson step of db/dt = M b + eta over h, frozen coefficients."""
    rhs = b + 0.5 * h * (m_mat @ b) + h * eta
    a = np.eye(2) - 0.5 * h * m_mat
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    b[0] = (a[1, 1] * rhs[0] - a[0, 1] * rhs[1]) / det
    b[1] = (a[0, 0] * rhs[1] - a[1, 0] * rhs[0]) / det


def advance_chunk(params, y, dt, ctx, noise, record_every, phase, out,
                  evaluate_fields, conservative):
    """Run len(noise) BAOAB steps; see `nanorotor.kernel.advance`."""
    mass = params[0]
    inertia = params[1:4].copy()
    ou_c = ctx[0:6]
    ou_s = ctx[6:12]
    bsig = ctx[12:14]

    r = y[0:3]
    p = y[3:6]
    q = y[6:10]
    J = y[10:13]
    b = np.array([y[13] + 1j * y[14], y[15] + 1j * y[16]])

    ev = _Evaluator(params, conservative)
    half = 0.5 * dt
    n_rec = 0
    max_spin = float(np.max(np.abs(J / inertia)))
    cavity_on = evaluate_fields and not conservative

    if evaluate_fields:
        rot = _quat_to_matrix(q)
        force, torque_b = ev.forces(r, rot, b)

    for step in range(noise.shape[0]):
        if evaluate_fields:
            p += half * force
            J += half * torque_b

        r += half * (p / mass)
        _free_top(q, J, inertia, half)
        if cavity_on:
            # midpoint-frozen coefficients keep the step time-symmetric
            rot = _quat_to_matrix(q)
            m_mat, eta = ev.cavity_coefficients(r, rot)
            _cn_half(m_mat, eta, b, half)

        xi = noise[step]
        for i in range(3):
            p[i] = ou_c[i] * p[i] + ou_s[i] * xi[i]
            J[i] = ou_c[3 + i] * J[i] + ou_s[3 + i] * xi[3 + i]
        b[0] += bsig[0] * (xi[6] + 1j * xi[7])
        b[1] += bsig[1] * (xi[8] + 1j * xi[9])

        if cavity_on:
            _cn_half(m_mat, eta, b, half)
        r += half * (p / mass)
        _free_top(q, J, inertia, half)
        norm = math.sqrt(q[0]**2 + q[1]**2 + q[2]**2 + q[3]**2)
        q /= norm

        if evaluate_fields:
            rot = _quat_to_matrix(q)
            force, torque_b = ev.forces(r, rot, b)
            p += half * force
            J += half * torque_b

        spin = float(np.max(np.abs(J / inertia)))
        if spin > max_spin:
            max_spin = spin

        phase += 1
        if phase >= record_every:
            phase = 0
            y[13] = b[0].real
            y[14] = b[0].imag
            y[15] = b[1].real
            y[16] = b[1].imag
            if not np.all(np.isfinite(y)):
                return step + 1, n_rec, phase, max_spin
            out[n_rec] = y
            n_rec += 1

    y[13] = b[0].real
    y[14] = b[0].imag
    y[15] = b[1].real
    y[16] = b[1].imag
    if not np.all(np.isfinite(y)):
        return noise.shape[0], n_rec, phase, max_spin
    return 0, n_rec, phase, max_spin
