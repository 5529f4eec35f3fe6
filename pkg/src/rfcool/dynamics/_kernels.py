"""Compiled inner loops. Status codes: 0 ok, 1 gap closure, 2 non-finite state."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

OK = 0
GAP_CLOSED = 1
NON_FINITE = 2

MODE_ANALYTIC = 0
MODE_LAGGED = 1


@njit(cache=True)
def _envelope_rhs(mode, t, x, v, u, p):
    # p layout: see envelope._pack_params
    omega_c2 = p[0]
    gamma = p[1]
    drive_acc = p[2]
    drive_omega = p[3]
    acc = drive_acc * math.cos(drive_omega * t) if drive_acc != 0.0 else 0.0
    if mode == MODE_ANALYTIC:
        gamma_tot = p[4]
        omega_eff2 = p[5]
        return v, -gamma_tot * v - omega_eff2 * x + acc, 0.0
    ewh_4m = p[6]
    d0 = p[7]
    vmax2 = p[8]
    q = p[9]
    omega0 = p[10]
    c0 = p[11]
    ewh = p[12]
    omega_rf = p[13]
    tau = p[14]
    preload_acc = p[15]
    d = d0 - x
    cc_x = ewh / d
    omega0_x = omega0 * math.sqrt((c0 + ewh / d0) / (c0 + cc_x))
    det = 2.0 * q * (omega_rf - omega0_x) / omega0_x
    u_ss = vmax2 / (1.0 + det * det)
    a = -gamma * v - omega_c2 * x + ewh_4m * u / (d * d) - preload_acc + acc
    return v, a, (u_ss - u) / tau


@njit(cache=True)
def envelope_run(mode, state, t0, dt, p, kicks, out):
    """Advance ``state`` (x, v, u) over ``kicks.shape[0]`` steps.

    Deterministic flow is classical RK4; the stochastic velocity increment of
    each step is applied as two half kicks around it. ``out[k]`` receives the
    state after step k. Returns (status, steps_done).
    """
    x, v, u = state[0], state[1], state[2]
    d0 = p[7]
    h = dt
    n = kicks.shape[0]
    for k in range(n):
        t = t0 + k * h
        v += kicks[k, 0]
        k1x, k1v, k1u = _envelope_rhs(mode, t, x, v, u, p)
        k2x, k2v, k2u = _envelope_rhs(mode, t + 0.5 * h, x + 0.5 * h * k1x, v + 0.5 * h * k1v,
                                      u + 0.5 * h * k1u, p)
        k3x, k3v, k3u = _envelope_rhs(mode, t + 0.5 * h, x + 0.5 * h * k2x, v + 0.5 * h * k2v,
                                      u + 0.5 * h * k2u, p)
        k4x, k4v, k4u = _envelope_rhs(mode, t + h, x + h * k3x, v + h * k3v, u + h * k3u, p)
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v += kicks[k, 1]
        out[k, 0] = x
        out[k, 1] = v
        out[k, 2] = u
        if abs(x) >= d0:
            state[0], state[1], state[2] = x, v, u
            return GAP_CLOSED, k + 1
        if not (math.isfinite(x) and math.isfinite(v) and math.isfinite(u)):
            return NON_FINITE, k + 1
    state[0], state[1], state[2] = x, v, u
    return OK, n


@njit(cache=True)
def _fullscale_rhs(t, y, p, dy):
    # p layout: see fullscale._pack_params
    l0 = p[0]
    r = p[1]
    c0 = p[2]
    ewh = p[3]
    d0 = p[4]
    m = p[5]
    gamma = p[6]
    omega_c2 = p[7]
    vd = p[8]
    omega_d = p[9]
    t_off = p[10]
    frozen = p[11]
    preload = p[12]
    q, i, x, v = y[0], y[1], y[2], y[3]
    d = d0 - x
    cap = c0 + ewh / d
    drive = vd * math.cos(omega_d * t) if t < t_off else 0.0
    dy[0] = i
    dy[1] = (drive - r * i - q / cap) / l0
    if frozen != 0.0:
        dy[2] = 0.0
        dy[3] = 0.0
    else:
        # q^2/(2C^2) dC/dx with dC/dx = eps0 w h / d^2
        force = 0.5 * (q / cap) ** 2 * ewh / (d * d) - preload
        dy[2] = v
        dy[3] = -gamma * v - omega_c2 * x + force / m


_S3 = math.sqrt(3.0)
_A11 = 0.25
_A12 = 0.25 - _S3 / 6.0
_A21 = 0.25 + _S3 / 6.0
_A22 = 0.25
_C1 = 0.5 - _S3 / 6.0
_C2 = 0.5 + _S3 / 6.0


@njit(cache=True)
def fullscale_run(state, t0, dt, p, n_steps, out, max_iter, tol):
    """Two-stage Gauss-Legendre (order 4, symplectic) over ``n_steps``.

    Stage equations are solved by fixed-point iteration, warm-started from
    the previous step's stages. Returns (status, steps_done, worst_residual).
    """
    y = state.copy()
    k1 = np.zeros(4)
    k2 = np.zeros(4)
    y1 = np.zeros(4)
    y2 = np.zeros(4)
    n1 = np.zeros(4)
    n2 = np.zeros(4)
    _fullscale_rhs(t0, y, p, k1)
    k2[:] = k1
    d0 = p[4]
    worst = 0.0
    h = dt
    for k in range(n_steps):
        t = t0 + k * h
        resid = 0.0
        for it in range(max_iter):
            for j in range(4):
                y1[j] = y[j] + h * (_A11 * k1[j] + _A12 * k2[j])
                y2[j] = y[j] + h * (_A21 * k1[j] + _A22 * k2[j])
            _fullscale_rhs(t + _C1 * h, y1, p, n1)
            _fullscale_rhs(t + _C2 * h, y2, p, n2)
            resid = 0.0
            for j in range(4):
                scale = abs(n1[j]) + abs(n2[j]) + 1e-300
                e = (abs(n1[j] - k1[j]) + abs(n2[j] - k2[j])) / scale
                if e > resid:
                    resid = e
                k1[j] = n1[j]
                k2[j] = n2[j]
            if resid <= tol:
                break
        if resid > worst:
            worst = resid
        for j in range(4):
            y[j] += 0.5 * h * (k1[j] + k2[j])
            out[k, j] = y[j]
        if abs(y[2]) >= d0:
            state[:] = y
            return GAP_CLOSED, k + 1, worst
        if not (math.isfinite(y[0]) and math.isfinite(y[1]) and math.isfinite(y[3])):
            return NON_FINITE, k + 1, worst
    state[:] = y
    return OK, n_steps, worst
