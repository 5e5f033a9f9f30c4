"""Numba kernels behind the channel superposition.

Sources are puffs released at integer sub-ticks ``u`` (time ``u * h``) with
mass ``m`` and release-time wind displacement ``(px, py)``. At observation
sample ``n`` (tick ``n * m_sub``) a puff sits at ``tx + W[n] - p`` and has
per-axis variance ``2 D tau``.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

INV_2PI_15 = 1.0 / (2.0 * math.pi) ** 1.5


@njit(cache=True)
def exact_traces(ticks, mass, px, py, h, m_sub, D, wx, wy, n_obs, rx, ry, dz):
    """Direct O(N * S) superposition for a list of receivers.

    ``rx, ry`` are receiver coordinates relative to the transmitter, ``dz``
    the per-receiver vertical offsets. Returns (n_rx, n_obs).
    """
    n_rx = rx.shape[0]
    out = np.zeros((n_rx, n_obs))
    n_src = ticks.shape[0]
    for n in range(n_obs):
        tick_now = n * m_sub
        for s in range(n_src):
            if ticks[s] >= tick_now:
                break
            tau = (tick_now - ticks[s]) * h
            var2 = 4.0 * D * tau
            pref = mass[s] * (math.pi * var2) ** -1.5
            ax = px[s] - wx[n]
            ay = py[s] - wy[n]
            for r in range(n_rx):
                dx = ax + rx[r]
                dy = ay + ry[r]
                out[r, n] += pref * math.exp(-(dx * dx + dy * dy + dz[r] * dz[r]) / var2)
    return out


@njit(cache=True)
def build_tree(ticks, mass, px, py):
    """Implicit binary tree over time-sorted sources (heap layout, root = 1)."""
    n_src = ticks.shape[0]
    size = 1
    while size < max(n_src, 1):
        size *= 2
    nn = 2 * size
    M = np.zeros(nn)
    tmin = np.full(nn, np.iinfo(np.int64).max, dtype=np.int64)
    tmax = np.full(nn, -1, dtype=np.int64)
    tmean = np.zeros(nn)
    mx = np.zeros(nn)
    my = np.zeros(nn)
    sxx = np.zeros(nn)
    syy = np.zeros(nn)
    sxy = np.zeros(nn)
    xlo = np.full(nn, np.inf)
    xhi = np.full(nn, -np.inf)
    ylo = np.full(nn, np.inf)
    yhi = np.full(nn, -np.inf)
    for i in range(n_src):
        k = size + i
        M[k] = mass[i]
        tmin[k] = ticks[i]
        tmax[k] = ticks[i]
        tmean[k] = ticks[i]
        mx[k] = px[i]
        my[k] = py[i]
        xlo[k] = px[i]
        xhi[k] = px[i]
        ylo[k] = py[i]
        yhi[k] = py[i]
    for k in range(size - 1, 0, -1):
        a = 2 * k
        b = a + 1
        ma = M[a]
        mb = M[b]
        mt = ma + mb
        if mt <= 0.0:
            continue
        M[k] = mt
        tmin[k] = min(tmin[a], tmin[b])
        tmax[k] = max(tmax[a], tmax[b])
        xlo[k] = min(xlo[a], xlo[b])
        xhi[k] = max(xhi[a], xhi[b])
        ylo[k] = min(ylo[a], ylo[b])
        yhi[k] = max(yhi[a], yhi[b])
        if ma <= 0.0:
            tmean[k] = tmean[b]; mx[k] = mx[b]; my[k] = my[b]
            sxx[k] = sxx[b]; syy[k] = syy[b]; sxy[k] = sxy[b]
            continue
        if mb <= 0.0:
            tmean[k] = tmean[a]; mx[k] = mx[a]; my[k] = my[a]
            sxx[k] = sxx[a]; syy[k] = syy[a]; sxy[k] = sxy[a]
            continue
        # pairwise (Chan) update of mean and second central moments
        w = ma * mb / mt
        dxm = mx[b] - mx[a]
        dym = my[b] - my[a]
        tmean[k] = (ma * tmean[a] + mb * tmean[b]) / mt
        mx[k] = mx[a] + dxm * mb / mt
        my[k] = my[a] + dym * mb / mt
        sxx[k] = sxx[a] + sxx[b] + dxm * dxm * w
        syy[k] = syy[a] + syy[b] + dym * dym * w
        sxy[k] = sxy[a] + sxy[b] + dxm * dym * w
    return size, M, tmin, tmax, tmean, mx, my, sxx, syy, sxy, xlo, xhi, ylo, yhi


@njit(cache=True)
def _window(xs, centre, half):
    lo = np.searchsorted(xs, -centre - half)
    hi = np.searchsorted(xs, -centre + half, side="right")
    return lo, hi


@njit(cache=True)
def _deposit(out, c, n, xs, ys, ax, ay, vxx, vyy, vxy, vzz, dz, amp, cut):
    det = vxx * vyy - vxy * vxy
    pref = amp * INV_2PI_15 / math.sqrt(det * vzz)
    zterm = dz * dz / vzz
    ix0, ix1 = _window(xs, ax, math.sqrt(2.0 * cut * vxx))
    if ix0 >= ix1:
        return
    iy0, iy1 = _window(ys, ay, math.sqrt(2.0 * cut * vyy))
    if iy0 >= iy1:
        return
    ixx = vyy / det
    iyy = vxx / det
    ixy = -vxy / det
    for j in range(iy0, iy1):
        dy = ay + ys[j]
        qy = iyy * dy * dy + zterm
        for i in range(ix0, ix1):
            dx = ax + xs[i]
            q = ixx * dx * dx + 2.0 * ixy * dx * dy + qy
            out[c, j, i, n] += pref * math.exp(-0.5 * q)


@njit(cache=True)
def _deposit_iso(out, c, n, xs, ys, ax, ay, v, dz, amp, ix0, ix1, iy0, iy1, fx, fy):
    pref = amp * INV_2PI_15 * v ** -1.5 * math.exp(-0.5 * dz * dz / v)
    for i in range(ix0, ix1):
        dx = ax + xs[i]
        fx[i] = math.exp(-0.5 * dx * dx / v)
    for j in range(iy0, iy1):
        dy = ay + ys[j]
        fy[j] = pref * math.exp(-0.5 * dy * dy / v)
    for j in range(iy0, iy1):
        for i in range(ix0, ix1):
            out[c, j, i, n] += fy[j] * fx[i]


@njit(cache=True)
def tree_traces(tree, h, m_sub, Ds, amps, wx, wy, n_obs, xs, ys, dz, cut, eps):
    """Tree-accelerated superposition onto a rectilinear receiver grid.

    ``xs``, ``ys`` (ascending) are receiver coordinates relative to the
    transmitter, ``dz`` the common vertical offset. A subtree is skipped when
    the Gaussian factor of every source in it is below ``exp(-cut)`` for every
    receiver; it is replaced by one moment-matched Gaussian when its time and
    spatial spread are small (ratio ``eps``) against the puff width. With
    ``eps = 0`` only the exact skip is applied.

    Several species may share one source tree (same release gate, different
    amplitude).
    Species ``c`` has diffusivity ``Ds[c]`` and source masses scaled by
    ``amps[c]``. Skipping uses the largest diffusivity and merging the
    smallest, so each species is treated at least as strictly as alone.
    Returns (n_species, ny, nx, n_obs).
    """
    size, M, tmin, tmax, tmean, mx, my, sxx, syy, sxy, xlo, xhi, ylo, yhi = tree
    n_c = Ds.shape[0]
    d_hi = Ds.max()
    d_lo = Ds.min()
    out = np.zeros((n_c, ys.shape[0], xs.shape[0], n_obs))
    fx = np.empty(xs.shape[0])
    fy = np.empty(ys.shape[0])
    stack = np.empty(256, dtype=np.int64)
    x0 = xs[0]
    x1 = xs[-1]
    y0 = ys[0]
    y1 = ys[-1]
    dz2 = dz * dz
    for n in range(n_obs):
        tick_now = n * m_sub
        cx = -wx[n]
        cy = -wy[n]
        top = 0
        stack[top] = 1
        top += 1
        while top > 0:
            top -= 1
            k = stack[top]
            if M[k] <= 0.0 or tmin[k] >= tick_now:
                continue
            if tmax[k] >= tick_now:
                stack[top] = 2 * k
                stack[top + 1] = 2 * k + 1
                top += 2
                continue
            tau_min = (tick_now - tmax[k]) * h
            tau_max = (tick_now - tmin[k]) * h
            lo = xlo[k] + cx + x0
            hi = xhi[k] + cx + x1
            ddx = lo if lo > 0.0 else (-hi if hi < 0.0 else 0.0)
            lo = ylo[k] + cy + y0
            hi = yhi[k] + cy + y1
            ddy = lo if lo > 0.0 else (-hi if hi < 0.0 else 0.0)
            d2 = ddx * ddx + ddy * ddy + dz2
            if d2 > cut * 4.0 * d_hi * tau_max:
                continue
            if k >= size:
                ax = mx[k] + cx
                ay = my[k] + cy
                half = math.sqrt(2.0 * cut * 2.0 * d_hi * tau_min)
                ix0, ix1 = _window(xs, ax, half)
                if ix0 >= ix1:
                    continue
                iy0, iy1 = _window(ys, ay, half)
                if iy0 >= iy1:
                    continue
                for c in range(n_c):
                    _deposit_iso(out, c, n, xs, ys, ax, ay, 2.0 * Ds[c] * tau_min, dz,
                                 amps[c] * M[k], ix0, ix1, iy0, iy1, fx, fy)
                continue
            if eps > 0.0:
                ext_t = (tmax[k] - tmin[k]) * h
                spread = max(sxx[k], syy[k]) / M[k]
                if ext_t <= eps * tau_min and spread <= eps * 2.0 * d_lo * tau_min:
                    tb = (tick_now - tmean[k]) * h
                    for c in range(n_c):
                        v = 2.0 * Ds[c] * tb
                        _deposit(out, c, n, xs, ys, mx[k] + cx, my[k] + cy,
                                 v + sxx[k] / M[k], v + syy[k] / M[k], sxy[k] / M[k], v,
                                 dz, amps[c] * M[k], cut)
                    continue
            if top + 2 > stack.shape[0]:
                grown = np.empty(2 * stack.shape[0], dtype=np.int64)
                grown[:top] = stack[:top]
                stack = grown
            stack[top] = 2 * k
            stack[top + 1] = 2 * k + 1
            top += 2
    return out
