"""Numba RK4 kernel for the five-state receiver network.

State order: c_a (HAL), c_t (HAC), c_o (HOL), c_g (HEXGlc), c_v (HEXVic), uM.
Air input order follows MOLECULES: HAL, HOL, HAC (mol/m^3).
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _rhs(y, u, alpha, beta, vmax, km, per_stage, hold, clamp_abs, dy):
    if per_stage:
        a_hal = alpha[0] * u[0] - beta[0] * y[0]
        a_hol = alpha[1] * u[1] - beta[1] * y[2]
        a_hac = alpha[2] * u[2] - beta[2] * y[1]
        if clamp_abs:
            a_hal = max(a_hal, 0.0)
            a_hol = max(a_hol, 0.0)
            a_hac = max(a_hac, 0.0)
    else:
        a_hal = hold[0]
        a_hol = hold[1]
        a_hac = hold[2]
    j_ao = vmax[0] * y[0] / (km[0] + y[0])
    j_to = vmax[1] * y[1] / (km[1] + y[1])
    j_og = vmax[2] * y[2] / (km[2] + y[2])
    j_gv = vmax[3] * y[3] / (km[3] + y[3])
    dy[0] = a_hal - j_ao
    dy[1] = a_hac - j_to
    dy[2] = a_hol + j_ao + j_to - j_og
    dy[3] = j_og - j_gv
    dy[4] = j_gv
    gross = abs(a_hal) + abs(a_hol) + abs(a_hac) + 2.0 * (abs(j_ao) + abs(j_to) + abs(j_og) + abs(j_gv))
    return a_hal + a_hol + a_hac, gross


@njit(cache=True)
def integrate(air, y0, alpha, beta, vmax, km, fs, substeps, per_stage, clamp_abs,
              store, c_v0, lin_threshold):
    """Integrate every receiver in ``air`` (n_rx, 3, N).

    Returns (states, absorption, alarm_idx, lin_idx, n_nonlinear, clamps,
    max_residual, bad_idx). ``states`` is (n_rx, 5, N + 1) when ``store`` else
    (n_rx, 5, 1) holding the final state. Index outputs are -1 when the event
    never happens. ``max_residual`` is the largest per-step mass-balance
    residual relative to the gross flow through that step.
    """
    n_rx = air.shape[0]
    n = air.shape[2]
    dt = 1.0 / (fs * substeps)
    n_keep = n + 1 if store else 1
    states = np.zeros((n_rx, 5, n_keep))
    absorption = np.zeros((n_rx, 3, n_keep))
    alarm_idx = np.full(n_rx, -1, dtype=np.int64)
    lin_idx = np.full(n_rx, -1, dtype=np.int64)
    n_nonlinear = np.zeros(n_rx, dtype=np.int64)
    clamps = np.zeros(n_rx, dtype=np.int64)
    max_residual = np.zeros(n_rx)
    bad_idx = np.full(n_rx, -1, dtype=np.int64)
    y = np.empty(5)
    yt = np.empty(5)
    k1 = np.empty(5)
    k2 = np.empty(5)
    k3 = np.empty(5)
    k4 = np.empty(5)
    u = np.empty(3)
    hold = np.empty(3)
    for r in range(n_rx):
        for i in range(5):
            y[i] = y0[i]
        for s in range(n + 1):
            # bookkeeping at sample time s (state before integrating sample s)
            rr = max(max(y[0] / km[0], y[1] / km[1]), max(y[2] / km[2], y[3] / km[3]))
            if rr > lin_threshold:
                n_nonlinear[r] += 1
                if lin_idx[r] < 0:
                    lin_idx[r] = s
            if alarm_idx[r] < 0 and y[4] >= c_v0:
                alarm_idx[r] = s
            ui = s if s < n else n - 1
            for i in range(3):
                u[i] = air[r, i, ui]
            if store:
                for i in range(5):
                    states[r, i, s] = y[i]
                absorption[r, 0, s] = alpha[0] * u[0] - beta[0] * y[0]
                absorption[r, 1, s] = alpha[1] * u[1] - beta[1] * y[2]
                absorption[r, 2, s] = alpha[2] * u[2] - beta[2] * y[1]
                if clamp_abs:
                    for i in range(3):
                        absorption[r, i, s] = max(absorption[r, i, s], 0.0)
            if s == n:
                break
            for _ in range(substeps):
                if not per_stage:
                    hold[0] = alpha[0] * u[0] - beta[0] * y[0]
                    hold[1] = alpha[1] * u[1] - beta[1] * y[2]
                    hold[2] = alpha[2] * u[2] - beta[2] * y[1]
                    if clamp_abs:
                        for i in range(3):
                            hold[i] = max(hold[i], 0.0)
                a1, g1 = _rhs(y, u, alpha, beta, vmax, km, per_stage, hold, clamp_abs, k1)
                for i in range(5):
                    yt[i] = y[i] + 0.5 * dt * k1[i]
                a2, g2 = _rhs(yt, u, alpha, beta, vmax, km, per_stage, hold, clamp_abs, k2)
                for i in range(5):
                    yt[i] = y[i] + 0.5 * dt * k2[i]
                a3, g3 = _rhs(yt, u, alpha, beta, vmax, km, per_stage, hold, clamp_abs, k3)
                for i in range(5):
                    yt[i] = y[i] + dt * k3[i]
                a4, g4 = _rhs(yt, u, alpha, beta, vmax, km, per_stage, hold, clamp_abs, k4)
                dsum = 0.0
                clamped = False
                for i in range(5):
                    inc = dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                    dsum += inc
                    y[i] += inc
                    if y[i] < 0.0:
                        y[i] = 0.0
                        clamped = True
                absorbed = dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
                gross = dt / 6.0 * (g1 + 2.0 * g2 + 2.0 * g3 + g4)
                if clamped:
                    clamps[r] += 1
                elif gross > 0.0:
                    res = abs(dsum - absorbed) / gross
                    if res > max_residual[r]:
                        max_residual[r] = res
            finite = True
            for i in range(5):
                if not np.isfinite(y[i]):
                    finite = False
            if not finite:
                bad_idx[r] = s + 1
                break
        if not store:
            for i in range(5):
                states[r, i, 0] = y[i]
    return states, absorption, alarm_idx, lin_idx, n_nonlinear, clamps, max_residual, bad_idx
