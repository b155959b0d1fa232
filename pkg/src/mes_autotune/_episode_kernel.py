"""Fused scalar RK4 kernel for one closed-loop episode.

This is the hot path: a campaign is tens of episodes at 1e5 steps each, and
four controller+plant evaluations per step are far too slow in interpreted
numpy. The formulas here mirror controller.robust_control /
actuator.true_dynamics / trajectory.sample term by term (a consistency test
locks the two paths together); keep them in sync when editing either side.

Compiled with numba when available, otherwise runs as plain Python (identical
semantics, ~300x slower).
"""

from __future__ import annotations

import math

try:
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


# Status codes returned by the kernel.
OK = 0
NON_FINITE = 1          # NaN/Inf or geometric singularity b + x_a <= 0
CURRENT_SINGULAR = 2    # |i| < i_min


@njit(cache=True)
def _eval(
    t, xa, v, i,
    m, r_ohm, eta_n, x0s, k_n, a_c, b_c,
    kt, et,
    dkmax, demax,
    k1, k2, k3, kr,
    p31, p32, p33,
    c0, c1, c2, c3, c4, c5, tf_ref, xf_ref,
    i_min,
):
    """Controller + true plant at one (t, state); returns (code, derivatives, telemetry)."""
    gap = b_c + xa
    if gap <= 0.0 or not (math.isfinite(xa) and math.isfinite(v) and math.isfinite(i)):
        return NON_FINITE, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0, 0.0, 0.0, 0.0
    if abs(i) < i_min:
        return CURRENT_SINGULAR, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0, 0.0, 0.0, 0.0

    # Reference: quintic on [0, t_f] (with a few-ulp guard), hold after.
    if t > tf_ref * (1.0 + 1e-12):
        pr = xf_ref
        vr = 0.0
        ar = 0.0
        jr = 0.0
    else:
        tau = t / tf_ref
        pr = ((((c5 * tau + c4) * tau + c3) * tau + c2) * tau + c1) * tau + c0
        vr = ((((5.0 * c5 * tau + 4.0 * c4) * tau + 3.0 * c3) * tau + 2.0 * c2) * tau + c1) / tf_ref
        ar = (((20.0 * c5 * tau + 12.0 * c4) * tau + 6.0 * c3) * tau + 2.0 * c2) / (tf_ref * tf_ref)
        jr = ((60.0 * c5 * tau + 24.0 * c4) * tau + 6.0 * c3) / (tf_ref * tf_ref * tf_ref)

    emf = a_c * i * i / (2.0 * gap * gap)
    acc_nom = (k_n * (x0s - xa) - eta_n * v - emf) / m

    z1 = xa - pr
    z2 = v - vr
    z3 = acc_nom - ar

    vs = jr + k1 * z1 + k2 * z2 + k3 * z3
    bterm = -(k_n / m) * v - (eta_n / m) * acc_nom + r_ohm * i * i / (gap * m)
    aterm = -i / (m * gap)
    d2 = (dkmax * abs(v) + demax * abs(acc_nom)) / m
    grad3 = 2.0 * (p31 * z1 + p32 * z2 + p33 * z3)

    robust = -(grad3 * kr * d2) / aterm
    u = (vs - bterm) / aterm + robust
    ins = 1 if 1.0 - kr * abs(grad3) >= 0.0 else 0

    acc_true = (kt * (x0s - xa) - et * v - emf) / m
    di = (u - r_ohm * i + a_c * i * v / (gap * gap)) * gap / a_c

    return OK, v, acc_true, di, u, z1, z2, z3, ins, pr, vr, ar


@njit(cache=True)
def episode_kernel(
    m, r_ohm, eta_n, x0s, k_n, a_c, b_c,
    dk, de,
    dkmax, demax,
    k1, k2, k3, kr,
    p31, p32, p33,
    c0, c1, c2, c3, c4, c5, tf_ref, xf_ref,
    i_min,
    xa0, v0, i0,
    dt, n_steps,
    t_out, xa_out, v_out, i_out, xr_out, vr_out, ar_out, u_out,
    z1_out, z2_out, z3_out, ins_out,
):
    """Integrate one episode over the uniform grid t_k = k dt, k = 0..n_steps.

    All n_steps+1 grid points are recorded into the out arrays. Returns
    (status, n_valid, t_fail): n_valid grid records are usable; t_fail is the
    time of the failing evaluation (0.0 when status == OK).
    """
    kt = k_n + dk
    et = eta_n + de
    xa, v, i = xa0, v0, i0

    for k in range(n_steps + 1):
        t = k * dt if k < n_steps else tf_ref

        code, dxa, dv, di, u, z1, z2, z3, ins, pr, vr, ar = _eval(
            t, xa, v, i,
            m, r_ohm, eta_n, x0s, k_n, a_c, b_c, kt, et,
            dkmax, demax, k1, k2, k3, kr, p31, p32, p33,
            c0, c1, c2, c3, c4, c5, tf_ref, xf_ref, i_min,
        )
        if code != OK:
            return code, k, t
        t_out[k] = t
        xa_out[k] = xa
        v_out[k] = v
        i_out[k] = i
        xr_out[k] = pr
        vr_out[k] = vr
        ar_out[k] = ar
        u_out[k] = u
        z1_out[k] = z1
        z2_out[k] = z2
        z3_out[k] = z3
        ins_out[k] = ins
        if k == n_steps:
            break

        # Remaining three RK4 stages (the grid-point eval above is stage 1).
        h = 0.5 * dt
        code2, dxa2, dv2, di2, _, _, _, _, _, _, _, _ = _eval(
            t + h, xa + h * dxa, v + h * dv, i + h * di,
            m, r_ohm, eta_n, x0s, k_n, a_c, b_c, kt, et,
            dkmax, demax, k1, k2, k3, kr, p31, p32, p33,
            c0, c1, c2, c3, c4, c5, tf_ref, xf_ref, i_min,
        )
        if code2 != OK:
            return code2, k + 1, t + h
        code3, dxa3, dv3, di3, _, _, _, _, _, _, _, _ = _eval(
            t + h, xa + h * dxa2, v + h * dv2, i + h * di2,
            m, r_ohm, eta_n, x0s, k_n, a_c, b_c, kt, et,
            dkmax, demax, k1, k2, k3, kr, p31, p32, p33,
            c0, c1, c2, c3, c4, c5, tf_ref, xf_ref, i_min,
        )
        if code3 != OK:
            return code3, k + 1, t + h
        code4, dxa4, dv4, di4, _, _, _, _, _, _, _, _ = _eval(
            t + dt, xa + dt * dxa3, v + dt * dv3, i + dt * di3,
            m, r_ohm, eta_n, x0s, k_n, a_c, b_c, kt, et,
            dkmax, demax, k1, k2, k3, kr, p31, p32, p33,
            c0, c1, c2, c3, c4, c5, tf_ref, xf_ref, i_min,
        )
        if code4 != OK:
            return code4, k + 1, t + dt

        xa = xa + (dt / 6.0) * (dxa + 2.0 * dxa2 + 2.0 * dxa3 + dxa4)
        v = v + (dt / 6.0) * (dv + 2.0 * dv2 + 2.0 * dv3 + dv4)
        i = i + (dt / 6.0) * (di + 2.0 * di2 + 2.0 * di3 + di4)
        if not (math.isfinite(xa) and math.isfinite(v) and math.isfinite(i)):
            return NON_FINITE, k + 1, t + dt

    return OK, n_steps + 1, 0.0
