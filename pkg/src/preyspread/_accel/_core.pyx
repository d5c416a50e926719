# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: Heun field stepping and RK4 profile shooting.

Expression trees mirror preyspread._accel.fallback exactly (and the build
disables FP contraction), so compiled and fallback results agree bitwise on
the evolved fields.
"""

from libc.math cimport ceil, isfinite, fabs, NAN

import numpy as np


cdef inline double lap_at(const double* f, Py_ssize_t i, Py_ssize_t n,
                          int geom, double dim, double inv_dx2,
                          const double* drift) noexcept nogil:
    if i == 0:
        if geom == 1:
            return (2.0 * dim) * (f[1] - f[0]) * inv_dx2
        return (f[1] - 2.0 * f[0] + f[1]) * inv_dx2
    if i == n - 1:
        return (f[n - 2] - 2.0 * f[n - 1] + f[n - 2]) * inv_dx2
    if geom == 1:
        return (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv_dx2 + drift[i] * (f[i + 1] - f[i - 1])
    return (f[i - 1] - 2.0 * f[i] + f[i + 1]) * inv_dx2


cdef inline double kin_f(int code, double a, double b, double m, double mu,
                         double u, double v) noexcept nogil:
    if code == 0:
        return 1.0 - u - b * v
    return 1.0 - u - m * v / (b + u)


cdef inline double kin_g(int code, double a, double b, double m, double mu,
                         double u, double v) noexcept nogil:
    if code == 0:
        return (mu * b) * u - a
    return mu * m * u / (b + u) - a


def heun_step(double[::1] u, double[::1] v,
              double[::1] un, double[::1] vn,
              double[::1] u1, double[::1] v1,
              double[::1] k1u, double[::1] k1v,
              int geom, double dim, double inv_dx2, double[::1] drift,
              double d, double dt,
              int code, double a, double b, double m, double mu):
    """One Heun step for preset kinetics; writes the clamped fields into
    (un, vn) and returns (pre_u_min, pre_u_max, pre_v_min, clamp_l1, v_max,
    finite_flag)."""
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i
    cdef double half_dt = 0.5 * dt
    cdef const double* dr = &drift[0]
    cdef const double* up = &u[0]
    cdef const double* vp = &v[0]
    cdef const double* u1p
    cdef const double* v1p
    cdef double lap, k2u, k2v, x
    cdef double pre_u_min, pre_u_max, pre_v_min, clamp, v_max
    cdef int finite = 1

    with nogil:
        for i in range(n):
            lap = lap_at(up, i, n, geom, dim, inv_dx2, dr)
            k1u[i] = d * lap + u[i] * kin_f(code, a, b, m, mu, u[i], v[i])
            lap = lap_at(vp, i, n, geom, dim, inv_dx2, dr)
            k1v[i] = lap + v[i] * kin_g(code, a, b, m, mu, u[i], v[i])
        for i in range(n):
            u1[i] = u[i] + dt * k1u[i]
            v1[i] = v[i] + dt * k1v[i]
        u1p = &u1[0]
        v1p = &v1[0]
        for i in range(n):
            lap = lap_at(u1p, i, n, geom, dim, inv_dx2, dr)
            k2u = d * lap + u1[i] * kin_f(code, a, b, m, mu, u1[i], v1[i])
            lap = lap_at(v1p, i, n, geom, dim, inv_dx2, dr)
            k2v = lap + v1[i] * kin_g(code, a, b, m, mu, u1[i], v1[i])
            un[i] = u[i] + half_dt * (k1u[i] + k2u)
            vn[i] = v[i] + half_dt * (k1v[i] + k2v)

        pre_u_min = un[0]
        pre_u_max = un[0]
        pre_v_min = vn[0]
        clamp = 0.0
        v_max = -1.0
        for i in range(n):
            x = un[i]
            if not isfinite(x):
                finite = 0
            if x < pre_u_min:
                pre_u_min = x
            if x > pre_u_max:
                pre_u_max = x
            if x < 0.0:
                clamp += -x
                un[i] = 0.0
            elif x > 1.0:
                clamp += x - 1.0
                un[i] = 1.0
            x = vn[i]
            if not isfinite(x):
                finite = 0
            if x < pre_v_min:
                pre_v_min = x
            if x < 0.0:
                clamp += -x
                vn[i] = 0.0
            if vn[i] > v_max:
                v_max = vn[i]

    return pre_u_min, pre_u_max, pre_v_min, clamp, v_max, float(finite)


cdef inline double polyval(const double* cf, int nc, double q) noexcept nogil:
    cdef double r = cf[nc - 1]
    cdef int j
    for j in range(nc - 2, -1, -1):
        r = r * q + cf[j]
    return r


def shoot_poly(double[::1] coeffs, double d, double c, double alpha,
               double z_max, double dz, long stride):
    """Fixed-step RK4 shoot with polynomial reaction term.

    Same classification contract and arithmetic as fallback.shoot; returns
    (kind, b, rec) with rec an (n, 3) float array of (z, q, q')."""
    cdef int nc = coeffs.shape[0]
    cdef const double* cf = &coeffs[0]
    cdef double inv_d = 1.0 / d
    cdef double half_dz = 0.5 * dz
    cdef double dz6 = dz / 6.0
    cdef long n_steps = <long> ceil(z_max / dz - 1e-12)
    cdef double q = alpha
    cdef double w = 0.0
    cdef double b = NAN
    cdef int kind = 3  # INCONCLUSIVE
    cdef long k = 0
    cdef long n_rec = 0
    cdef double dq1, dw1, q2, w2, dq2, dw2, q3, w3, dq3, dw3, q4, w4, dq4, dw4
    cdef double q_new, w_new, z_new
    cdef long max_rec = n_steps / stride + 4

    rec_np = np.empty((max_rec, 3), dtype=np.float64)
    cdef double[:, ::1] rec = rec_np
    rec[0, 0] = 0.0
    rec[0, 1] = q
    rec[0, 2] = w
    n_rec = 1

    with nogil:
        for k in range(1, n_steps + 1):
            dq1 = w
            dw1 = -(c * w + q * polyval(cf, nc, q)) * inv_d
            q2 = q + half_dz * dq1
            w2 = w + half_dz * dw1
            dq2 = w2
            dw2 = -(c * w2 + q2 * polyval(cf, nc, q2)) * inv_d
            q3 = q + half_dz * dq2
            w3 = w + half_dz * dw2
            dq3 = w3
            dw3 = -(c * w3 + q3 * polyval(cf, nc, q3)) * inv_d
            q4 = q + dz * dq3
            w4 = w + dz * dw3
            dq4 = w4
            dw4 = -(c * w4 + q4 * polyval(cf, nc, q4)) * inv_d
            q_new = q + dz6 * (dq1 + 2.0 * (dq2 + dq3) + dq4)
            w_new = w + dz6 * (dw1 + 2.0 * (dw2 + dw3) + dw4)
            z_new = k * dz
            if (not isfinite(q_new)) or (not isfinite(w_new)) or fabs(q_new) > 2.0:
                kind = 4  # BLOWUP
                rec[n_rec, 0] = z_new
                rec[n_rec, 1] = q_new
                rec[n_rec, 2] = w_new
                n_rec += 1
                break
            if q_new <= 0.0:
                kind = 0  # HITS_ZERO
                b = (k - 1) * dz + dz * (q / (q - q_new))
                rec[n_rec, 0] = z_new
                rec[n_rec, 1] = q_new
                rec[n_rec, 2] = w_new
                n_rec += 1
                break
            if w_new > 1e-12 and q_new > 1e-12:
                kind = 1  # TURNS_BACK
                rec[n_rec, 0] = z_new
                rec[n_rec, 1] = q_new
                rec[n_rec, 2] = w_new
                n_rec += 1
                break
            q = q_new
            w = w_new
            if k % stride == 0 or k == n_steps:
                rec[n_rec, 0] = z_new
                rec[n_rec, 1] = q
                rec[n_rec, 2] = w
                n_rec += 1
        else:
            if fabs(q) + fabs(w) < 1e-6:
                kind = 2  # WAVE_LIKE

    return kind, (None if kind != 0 else b), rec_np[:n_rec].copy()
