# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled stepping backend.

Operation-for-operation mirror of `nanorotor._kernel_py`; see
`nanorotor.kernel` for the algorithm and the parameter layout.
"""

from libc.math cimport cos, exp, fabs, isfinite, sin, sqrt

ctypedef double complex cplx


cdef struct KP:
    double mass
    double inertia[3]
    double chi0[3]
    double eps, k, zr, wx, wy
    cplx et[3]
    double e1[3]
    double e2[3]
    double ec[3]
    double phi, delta, kappa, u0, gsc, pp, rp
    bint conservative


cdef void _rot_from_quat(const double* q, double* R) noexcept nogil:
    cdef double w = q[0], x = q[1], y = q[2], z = q[3]
    R[0] = 1.0 - 2.0 * (y * y + z * z)
    R[1] = 2.0 * (x * y - w * z)
    R[2] = 2.0 * (x * z + w * y)
    R[3] = 2.0 * (x * y + w * z)
    R[4] = 1.0 - 2.0 * (x * x + z * z)
    R[5] = 2.0 * (y * z - w * x)
    R[6] = 2.0 * (x * z - w * y)
    R[7] = 2.0 * (y * z + w * x)
    R[8] = 1.0 - 2.0 * (x * x + y * y)


cdef void _chi_space(const KP* P, const double* R, double* chi) noexcept nogil:
    # chi = R diag(chi0) R^T
    cdef int a, b, m
    cdef double s
    for a in range(3):
        for b in range(3):
            s = 0.0
            for m in range(3):
                s += R[3 * a + m] * P.chi0[m] * R[3 * b + m]
            chi[3 * a + b] = s


cdef void _modes(const KP* P, const double* r, cplx* f_t, cplx* grad_t,
                 double* f_c, double* grad_c) noexcept nogil:
    cdef cplx q = 1.0 + 1j * (r[2] / P.zr)
    cdef double rho2 = (r[0] / P.wx) ** 2 + (r[1] / P.wy) ** 2
    cdef cplx w = 1j * (P.k * r[2]) - rho2 / q
    cdef double ex = exp(w.real)
    f_t[0] = (ex * cos(w.imag) + 1j * (ex * sin(w.imag))) / q
    cdef cplx iq = 1.0 / q
    grad_t[0] = f_t[0] * ((-2.0 * r[0] / (P.wx * P.wx)) * iq)
    grad_t[1] = f_t[0] * ((-2.0 * r[1] / (P.wy * P.wy)) * iq)
    grad_t[2] = f_t[0] * (1j * (P.k - iq / P.zr + rho2 * iq * iq / P.zr))
    cdef double arg = (P.k * (P.ec[0] * r[0] + P.ec[1] * r[1]
                              + P.ec[2] * r[2]) + P.phi)
    f_c[0] = cos(arg)
    cdef double ms = -P.k * sin(arg)
    grad_c[0] = ms * P.ec[0]
    grad_c[1] = ms * P.ec[1]
    grad_c[2] = ms * P.ec[2]


cdef void _cavity_coeffs(const KP* P, const double* r, const double* chi,
                         cplx* M, cplx* eta) noexcept nogil:
    cdef cplx f_t
    cdef cplx grad_t[3]
    cdef double f_c
    cdef double grad_c[3]
    _modes(P, r, &f_t, grad_t, &f_c, grad_c)

    cdef double v1[3]
    cdef double v2[3]
    cdef cplx vt[3]
    cdef int a, m
    for a in range(3):
        v1[a] = 0.0
        v2[a] = 0.0
        vt[a] = 0.0
        for m in range(3):
            v1[a] += chi[3 * a + m] * P.e1[m]
            v2[a] += chi[3 * a + m] * P.e2[m]
            vt[a] += chi[3 * a + m] * P.et[m]

    cdef double c11 = 0.0, c12 = 0.0, c21 = 0.0, c22 = 0.0
    cdef double d11 = 0.0, d12 = 0.0, d21 = 0.0, d22 = 0.0
    cdef cplx t1 = 0.0, t2 = 0.0, s1 = 0.0, s2 = 0.0
    for m in range(3):
        c11 += P.e1[m] * v1[m]
        c12 += P.e1[m] * v2[m]
        c21 += P.e2[m] * v1[m]
        c22 += P.e2[m] * v2[m]
        d11 += v1[m] * v1[m]
        d12 += v1[m] * v2[m]
        d21 += v2[m] * v1[m]
        d22 += v2[m] * v2[m]
        t1 += P.e1[m] * vt[m]
        t2 += P.e2[m] * vt[m]
        s1 += v1[m] * vt[m]
        s2 += v2[m] * vt[m]

    cdef double fc2 = f_c * f_c
    M[0] = 1j * (P.delta - P.u0 * fc2 * c11) - (P.kappa + 0.5 * P.gsc * fc2 * d11)
    M[1] = 1j * (-P.u0 * fc2 * c12) - (0.5 * P.gsc * fc2 * d12)
    M[2] = 1j * (-P.u0 * fc2 * c21) - (0.5 * P.gsc * fc2 * d21)
    M[3] = 1j * (P.delta - P.u0 * fc2 * c22) - (P.kappa + 0.5 * P.gsc * fc2 * d22)
    cdef cplx pref = -P.eps * f_c * f_t
    eta[0] = pref * (1j * (P.u0 * t1) + 0.5 * P.gsc * s1)
    eta[1] = pref * (1j * (P.u0 * t2) + 0.5 * P.gsc * s2)


cdef void _forces(const KP* P, const double* r, const double* R,
                  const double* chi, const cplx* b, double* force,
                  double* torque_b) noexcept nogil:
    cdef cplx f_t
    cdef cplx grad_t[3]
    cdef double f_c
    cdef double grad_c[3]
    _modes(P, r, &f_t, grad_t, &f_c, grad_c)

    cdef cplx e_b[3]
    cdef cplx E[3]
    cdef cplx grad[9]
    cdef cplx u[3]
    cdef int a, jc, m
    for jc in range(3):
        e_b[jc] = b[0] * P.e1[jc] + b[1] * P.e2[jc]
        E[jc] = P.eps * P.et[jc] * f_t + e_b[jc] * f_c
    for a in range(3):
        for jc in range(3):
            grad[3 * a + jc] = P.eps * grad_t[a] * P.et[jc] + grad_c[a] * e_b[jc]
    for jc in range(3):
        u[jc] = 0.0
        for m in range(3):
            u[jc] += chi[3 * jc + m] * E[m]

    cdef cplx acc
    cdef cplx tq0, tq1, tq2
    cdef double tq[3]
    for a in range(3):
        acc = 0.0
        for jc in range(3):
            acc += grad[3 * a + jc].conjugate() * u[jc]
        force[a] = P.pp * acc.real
    tq0 = u[1] * E[2].conjugate() - u[2] * E[1].conjugate()
    tq1 = u[2] * E[0].conjugate() - u[0] * E[2].conjugate()
    tq2 = u[0] * E[1].conjugate() - u[1] * E[0].conjugate()
    tq[0] = P.pp * tq0.real
    tq[1] = P.pp * tq1.real
    tq[2] = P.pp * tq2.real

    cdef cplx gc[9]
    cdef cplx cu[3]
    if not P.conservative:
        for a in range(3):
            for jc in range(3):
                gc[3 * a + jc] = 0.0
                for m in range(3):
                    gc[3 * a + jc] += grad[3 * a + m] * chi[3 * m + jc]
        for a in range(3):
            acc = 0.0
            for jc in range(3):
                acc += gc[3 * a + jc] * u[jc].conjugate()
            force[a] += P.rp * acc.imag
        for jc in range(3):
            cu[jc] = 0.0
            for m in range(3):
                cu[jc] += chi[3 * jc + m] * u[m]
        tq0 = (cu[1].conjugate() * E[2] - cu[2].conjugate() * E[1]
               - (u[1].conjugate() * u[2] - u[2].conjugate() * u[1]))
        tq1 = (cu[2].conjugate() * E[0] - cu[0].conjugate() * E[2]
               - (u[2].conjugate() * u[0] - u[0].conjugate() * u[2]))
        tq2 = (cu[0].conjugate() * E[1] - cu[1].conjugate() * E[0]
               - (u[0].conjugate() * u[1] - u[1].conjugate() * u[0]))
        tq[0] += P.rp * tq0.imag
        tq[1] += P.rp * tq1.imag
        tq[2] += P.rp * tq2.imag

    for m in range(3):
        torque_b[m] = R[m] * tq[0] + R[3 + m] * tq[1] + R[6 + m] * tq[2]


cdef void _free_top(double* q, double* J, const double* inertia,
                    double h) noexcept nogil:
    cdef int axes[5]
    cdef double ws[5]
    axes[0] = 0; axes[1] = 1; axes[2] = 2; axes[3] = 1; axes[4] = 0
    ws[0] = 0.5; ws[1] = 0.5; ws[2] = 1.0; ws[3] = 0.5; ws[4] = 0.5
    cdef int idx, axis, jj, kk
    cdef double theta, c, s, ch, sh, Jj, Jk
    cdef double dw, dx, dy, dz, qw, qx, qy, qz
    for idx in range(5):
        axis = axes[idx]
        theta = (J[axis] / inertia[axis]) * (h * ws[idx])
        ch = cos(0.5 * theta)
        sh = sin(0.5 * theta)
        c = 1.0 - 2.0 * sh * sh
        s = 2.0 * sh * ch
        jj = (axis + 1) % 3
        kk = (axis + 2) % 3
        Jj = J[jj]
        Jk = J[kk]
        J[jj] = c * Jj + s * Jk
        J[kk] = -s * Jj + c * Jk
        dw = ch; dx = 0.0; dy = 0.0; dz = 0.0
        if axis == 0:
            dx = sh
        elif axis == 1:
            dy = sh
        else:
            dz = sh
        qw = q[0]; qx = q[1]; qy = q[2]; qz = q[3]
        q[0] = qw * dw - qx * dx - qy * dy - qz * dz
        q[1] = qw * dx + qx * dw + qy * dz - qz * dy
        q[2] = qw * dy - qx * dz + qy * dw + qz * dx
        q[3] = qw * dz + qx * dy - qy * dx + qz * dw


cdef void _cn_half(const cplx* M, const cplx* eta, cplx* b,
                   double h) noexcept nogil:
    cdef cplx r0 = b[0] + 0.5 * h * (M[0] * b[0] + M[1] * b[1]) + h * eta[0]
    cdef cplx r1 = b[1] + 0.5 * h * (M[2] * b[0] + M[3] * b[1]) + h * eta[1]
    cdef cplx a00 = 1.0 - 0.5 * h * M[0]
    cdef cplx a01 = -0.5 * h * M[1]
    cdef cplx a10 = -0.5 * h * M[2]
    cdef cplx a11 = 1.0 - 0.5 * h * M[3]
    cdef cplx det = a00 * a11 - a01 * a10
    b[0] = (a11 * r0 - a01 * r1) / det
    b[1] = (a00 * r1 - a10 * r0) / det


def advance_chunk(double[:] params, double[:] y, double dt, double[:] ctx,
                  double[:, :] noise, Py_ssize_t record_every,
                  Py_ssize_t phase, double[:, :] out, bint evaluate_fields,
                  bint conservative):
    """Run len(noise) BAOAB steps; see `nanorotor.kernel.advance`."""
    cdef KP P
    cdef int m
    P.mass = params[0]
    for m in range(3):
        P.inertia[m] = params[1 + m]
        P.chi0[m] = params[4 + m]
        P.et[m] = params[12] * params[14 + m] + 1j * (params[13] * params[17 + m])
        P.e1[m] = params[20 + m]
        P.e2[m] = params[23 + m]
        P.ec[m] = params[26 + m]
    P.eps = params[7]
    P.k = params[8]
    P.zr = params[9]
    P.wx = params[10]
    P.wy = params[11]
    P.phi = params[29]
    P.delta = params[30]
    P.kappa = params[31]
    P.u0 = params[32]
    P.gsc = params[33]
    P.pp = params[34]
    P.rp = params[35]
    P.conservative = conservative

    cdef double ou_c[6]
    cdef double ou_s[6]
    cdef double bsig[2]
    for m in range(6):
        ou_c[m] = ctx[m]
        ou_s[m] = ctx[6 + m]
    bsig[0] = ctx[12]
    bsig[1] = ctx[13]

    cdef double r[3]
    cdef double p[3]
    cdef double q[4]
    cdef double J[3]
    cdef cplx b[2]
    for m in range(3):
        r[m] = y[m]
        p[m] = y[3 + m]
        J[m] = y[10 + m]
    for m in range(4):
        q[m] = y[6 + m]
    b[0] = y[13] + 1j * y[14]
    b[1] = y[15] + 1j * y[16]

    cdef double half = 0.5 * dt
    cdef Py_ssize_t n = noise.shape[0]
    cdef Py_ssize_t n_rec = 0, step
    cdef Py_ssize_t status = 0
    cdef bint cavity_on = evaluate_fields and not conservative
    cdef bint bad, recorded
    cdef double max_spin = 0.0, spin, norm
    for m in range(3):
        spin = fabs(J[m] / P.inertia[m])
        if spin > max_spin:
            max_spin = spin

    cdef double R[9]
    cdef double chi[9]
    cdef double force[3]
    cdef double torque_b[3]
    cdef cplx M[4]
    cdef cplx eta[2]
    cdef int i

    with nogil:
        if evaluate_fields:
            _rot_from_quat(q, R)
            _chi_space(&P, R, chi)
            _forces(&P, r, R, chi, b, force, torque_b)

        for step in range(n):
            if evaluate_fields:
                for i in range(3):
                    p[i] += half * force[i]
                    J[i] += half * torque_b[i]

            for i in range(3):
                r[i] += half * (p[i] / P.mass)
            _free_top(q, J, P.inertia, half)
            if cavity_on:
                # midpoint-frozen coefficients keep the step time-symmetric
                _rot_from_quat(q, R)
                _chi_space(&P, R, chi)
                _cavity_coeffs(&P, r, chi, M, eta)
                _cn_half(M, eta, b, half)

            for i in range(3):
                p[i] = ou_c[i] * p[i] + ou_s[i] * noise[step, i]
                J[i] = ou_c[3 + i] * J[i] + ou_s[3 + i] * noise[step, 3 + i]
            b[0] = b[0] + bsig[0] * (noise[step, 6] + 1j * noise[step, 7])
            b[1] = b[1] + bsig[1] * (noise[step, 8] + 1j * noise[step, 9])

            if cavity_on:
                _cn_half(M, eta, b, half)
            for i in range(3):
                r[i] += half * (p[i] / P.mass)
            _free_top(q, J, P.inertia, half)
            norm = sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
            for i in range(4):
                q[i] /= norm

            if evaluate_fields:
                _rot_from_quat(q, R)
                _chi_space(&P, R, chi)
                _forces(&P, r, R, chi, b, force, torque_b)
                for i in range(3):
                    p[i] += half * force[i]
                    J[i] += half * torque_b[i]

            for i in range(3):
                spin = fabs(J[i] / P.inertia[i])
                if spin > max_spin:
                    max_spin = spin

            phase += 1
            if phase >= record_every:
                phase = 0
                bad = 0
                for i in range(3):
                    if not (isfinite(r[i]) and isfinite(p[i])
                            and isfinite(J[i])):
                        bad = 1
                for i in range(4):
                    if not isfinite(q[i]):
                        bad = 1
                if not (isfinite(b[0].real) and isfinite(b[0].imag)
                        and isfinite(b[1].real) and isfinite(b[1].imag)):
                    bad = 1
                for i in range(3):
                    y[i] = r[i]
                    y[3 + i] = p[i]
                    y[10 + i] = J[i]
                for i in range(4):
                    y[6 + i] = q[i]
                y[13] = b[0].real
                y[14] = b[0].imag
                y[15] = b[1].real
                y[16] = b[1].imag
                if bad:
                    status = step + 1
                    break
                for i in range(17):
                    out[n_rec, i] = y[i]
                n_rec += 1

    if status != 0:
        return status, n_rec, phase, max_spin

    for i in range(3):
        y[i] = r[i]
        y[3 + i] = p[i]
        y[10 + i] = J[i]
    for i in range(4):
        y[6 + i] = q[i]
    y[13] = b[0].real
    y[14] = b[0].imag
    y[15] = b[1].real
    y[16] = b[1].imag
    for i in range(17):
        if not isfinite(y[i]):
            return n, n_rec, phase, max_spin
    return 0, n_rec, phase, max_spin
