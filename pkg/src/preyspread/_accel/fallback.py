"""Reference kernels: numpy field stepping and pure-Python profile shooting.

The compiled extension mirrors these operation for operation; expression
trees are kept identical on both sides so results agree bitwise.
"""

import math

import numpy as np

# shoot outcome codes shared with the compiled kernel
HITS_ZERO = 0
TURNS_BACK = 1
WAVE_LIKE = 2
INCONCLUSIVE = 3
BLOWUP = 4

WAVE_CONV_TOL = 1e-6
TURN_TOL = 1e-12


def laplacian_line(f, inv_dx2):
    lap = np.empty_like(f)
    lap[1:-1] = (f[:-2] - 2.0 * f[1:-1] + f[2:]) * inv_dx2
    lap[0] = (f[1] - 2.0 * f[0] + f[1]) * inv_dx2
    lap[-1] = (f[-2] - 2.0 * f[-1] + f[-2]) * inv_dx2
    return lap


def laplacian_radial(f, inv_dx2, dim, drift):
    # drift[i] = (dim-1)/(2*dx*r_i); the symmetric ghost makes the first
    # derivative vanish at both ends, and the origin uses the 2*dim limit
    lap = np.empty_like(f)
    lap[1:-1] = (f[:-2] - 2.0 * f[1:-1] + f[2:]) * inv_dx2 + drift[1:-1] * (f[2:] - f[:-2])
    lap[0] = (2.0 * dim) * (f[1] - f[0]) * inv_dx2
    lap[-1] = (f[-2] - 2.0 * f[-1] + f[-2]) * inv_dx2
    return lap


def heun_step(u, v, F, G, d, dt, geometry, dim, inv_dx2, drift):
    """One explicit trapezoidal step of the coupled system.

    Returns (u_new, v_new, stats) where stats =
    (pre_u_min, pre_u_max, pre_v_min, clamp_l1_raw, v_max_post); the clamp
    total is in field units (caller scales by dx*dt).
    """
    if geometry == "line":
        lap = lambda f: laplacian_line(f, inv_dx2)
    else:
        lap = lambda f: laplacian_radial(f, inv_dx2, dim, drift)
    half_dt = 0.5 * dt
    k1u = d * lap(u) + u * F(u, v)
    k1v = lap(v) + v * G(u, v)
    u1 = u + dt * k1u
    v1 = v + dt * k1v
    k2u = d * lap(u1) + u1 * F(u1, v1)
    k2v = lap(v1) + v1 * G(u1, v1)
    un = u + half_dt * (k1u + k2u)
    vn = v + half_dt * (k1v + k2v)
    pre_u_min = float(un.min())
    pre_u_max = float(un.max())
    pre_v_min = float(vn.min())
    uc = np.clip(un, 0.0, 1.0)
    vc = np.maximum(vn, 0.0)
    clamp = float(np.abs(uc - un).sum() + np.abs(vc - vn).sum())
    v_max = float(vc.max())
    finite = float(np.isfinite(un).all() and np.isfinite(vn).all())
    return uc, vc, (pre_u_min, pre_u_max, pre_v_min, clamp, v_max, finite)


def shoot(f, d, c, alpha, z_max, dz, stride):
    """Fixed-step RK4 integration of d*q'' + c*q' + q*f(q) = 0 from (alpha, 0).

    Returns (kind, b, rec) with rec an (n, 3) array of sampled (z, q, q').
    Classification: crossing q = 0 from above -> HITS_ZERO with b linearly
    interpolated; q' > 0 while q > 0 -> TURNS_BACK; |q| + |q'| small at
    z_max with q never leaving (0, alpha] -> WAVE_LIKE.  Convergence is
    judged only at z_max: near-critical spirals cross zero at exponentially
    small amplitudes, so an early exit would misclassify them.
    """
    inv_d = 1.0 / d
    half_dz = 0.5 * dz
    dz6 = dz / 6.0
    n_steps = int(math.ceil(z_max / dz - 1e-12))
    q = alpha
    w = 0.0
    rec_z = [0.0]
    rec_q = [q]
    rec_w = [w]
    kind = INCONCLUSIVE
    b = math.nan
    for k in range(1, n_steps + 1):
        dq1 = w
        dw1 = -(c * w + q * f(q)) * inv_d
        q2 = q + half_dz * dq1
        w2 = w + half_dz * dw1
        dq2 = w2
        dw2 = -(c * w2 + q2 * f(q2)) * inv_d
        q3 = q + half_dz * dq2
        w3 = w + half_dz * dw2
        dq3 = w3
        dw3 = -(c * w3 + q3 * f(q3)) * inv_d
        q4 = q + dz * dq3
        w4 = w + dz * dw3
        dq4 = w4
        dw4 = -(c * w4 + q4 * f(q4)) * inv_d
        q_new = q + dz6 * (dq1 + 2.0 * (dq2 + dq3) + dq4)
        w_new = w + dz6 * (dw1 + 2.0 * (dw2 + dw3) + dw4)
        z_new = k * dz
        if not (math.isfinite(q_new) and math.isfinite(w_new)) or abs(q_new) > 2.0:
            kind = BLOWUP
            rec_z.append(z_new)
            rec_q.append(q_new)
            rec_w.append(w_new)
            break
        if q_new <= 0.0:
            kind = HITS_ZERO
            b = (k - 1) * dz + dz * (q / (q - q_new))
            rec_z.append(z_new)
            rec_q.append(q_new)
            rec_w.append(w_new)
            break
        if w_new > TURN_TOL and q_new > TURN_TOL:
            kind = TURNS_BACK
            rec_z.append(z_new)
            rec_q.append(q_new)
            rec_w.append(w_new)
            break
        q, w = q_new, w_new
        if k % stride == 0 or k == n_steps:
            rec_z.append(z_new)
            rec_q.append(q)
            rec_w.append(w)
    else:
        if abs(q) + abs(w) < WAVE_CONV_TOL:
            kind = WAVE_LIKE
    rec = np.column_stack(
        (np.asarray(rec_z), np.asarray(rec_q), np.asarray(rec_w))
    )
    return kind, (None if kind != HITS_ZERO else b), rec
