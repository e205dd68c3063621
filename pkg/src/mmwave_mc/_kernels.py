"""Compiled inner loops for beamspace evaluation over flat ray arrays.

Both kernels evaluate the same closed-form UPA beam pattern as
:func:`mmwave_mc.channel.beam_pattern`; the numpy implementation there is the
reference these are tested against.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

_H = 0.5 * math.pi


@njit(cache=True, inline="always")
def _dir(sa, ca, sna, cna, sb, cb, snb, cnb, n):
    s = sa * cb - ca * sb
    if abs(s) < 1e-9:
        return n * (cna * cnb + sna * snb) / (ca * cb + sa * sb)
    return (sna * cnb - cna * snb) / s


@njit(cache=True, inline="always")
def _cis_pow(c, s, n):
    """``(cos(n a), sin(n a))`` from ``(cos a, sin a)`` by binary exponentiation."""
    rc, rs = 1.0, 0.0
    bc, bs = c, s
    while n > 0:
        if n & 1:
            rc, rs = rc * bc - rs * bs, rc * bs + rs * bc
        bc, bs = bc * bc - bs * bs, 2.0 * bc * bs
        n >>= 1
    return rc, rs


@njit(cache=True, inline="always")
def _axis_trig(a, n):
    ca, sa = math.cos(a), math.sin(a)
    cna, sna = _cis_pow(ca, sa, n)
    return sa, ca, sna, cna


@njit(cache=True)
def _beam_trig(cos_b, sin_b, rows, cols):
    """Per-beam ``sin/cos`` of ``a`` and ``n a`` for both array axes."""
    nb = cos_b.shape[0]
    out = np.empty((nb, 8))
    for b in range(nb):
        ax = _H * cos_b[b]
        ay = _H * sin_b[b]
        out[b, 0] = math.sin(ax)
        out[b, 1] = math.cos(ax)
        out[b, 2] = math.sin(rows * ax)
        out[b, 3] = math.cos(rows * ax)
        out[b, 4] = math.sin(ay)
        out[b, 5] = math.cos(ay)
        out[b, 6] = math.sin(cols * ay)
        out[b, 7] = math.cos(cols * ay)
    return out


@njit(cache=True, inline="always")
def _pattern_one(c, s, bt, rows, cols, norm):
    sa, ca, sna, cna = _axis_trig(_H * c, rows)
    sy, cy, sny, cny = _axis_trig(_H * s, cols)
    return (_dir(sa, ca, sna, cna, bt[0], bt[1], bt[2], bt[3], rows)
            * _dir(sy, cy, sny, cny, bt[4], bt[5], bt[6], bt[7], cols) / norm)


@njit(cache=True)
def beam_rows(starts, counts, ue_beam, power, phase, cos_aoa, sin_aoa, cos_aod, sin_aod,
              ue_cb_cos, ue_cb_sin, ue_dims, sc_cb_cos, sc_cb_sin, sc_dims):
    n_links = starts.shape[0]
    n_s = sc_cb_cos.shape[0]
    ur, uc = ue_dims[0], ue_dims[1]
    sr, sc = sc_dims[0], sc_dims[1]
    un = math.sqrt(ur * uc)
    sn = math.sqrt(sr * sc)
    ubt = _beam_trig(ue_cb_cos, ue_cb_sin, ur, uc)
    sbt = _beam_trig(sc_cb_cos, sc_cb_sin, sr, sc)
    out = np.zeros((n_links, n_s), dtype=np.complex128)
    for i in range(n_links):
        bt = ubt[ue_beam[i]]
        for p in range(starts[i], starts[i] + counts[i]):
            amp = math.sqrt(power[p]) * _pattern_one(cos_aoa[p], sin_aoa[p], bt, ur, uc, un)
            wr = amp * math.cos(phase[p])
            wi = amp * math.sin(phase[p])
            sa, ca, sna, cna = _axis_trig(_H * cos_aod[p], sr)
            sy, cy, sny, cny = _axis_trig(_H * sin_aod[p], sc)
            for b in range(n_s):
                t = sbt[b]
                f = (_dir(sa, ca, sna, cna, t[0], t[1], t[2], t[3], sr)
                     * _dir(sy, cy, sny, cny, t[4], t[5], t[6], t[7], sc) / sn)
                out[i, b] += complex(wr * f, wi * f)
    return out


@njit(cache=True)
def beamspace(starts, counts, power, phase, cos_aoa, sin_aoa, cos_aod, sin_aod,
              ue_cb_cos, ue_cb_sin, ue_dims, sc_cb_cos, sc_cb_sin, sc_dims):
    n_links = starts.shape[0]
    n_u = ue_cb_cos.shape[0]
    n_s = sc_cb_cos.shape[0]
    ur, uc = ue_dims[0], ue_dims[1]
    sr, sc = sc_dims[0], sc_dims[1]
    un = math.sqrt(ur * uc)
    sn = math.sqrt(sr * sc)
    ubt = _beam_trig(ue_cb_cos, ue_cb_sin, ur, uc)
    sbt = _beam_trig(sc_cb_cos, sc_cb_sin, sr, sc)
    out = np.zeros((n_links, n_u, n_s), dtype=np.complex128)
    fu = np.empty(n_u)
    fs = np.empty(n_s)
    for i in range(n_links):
        for p in range(starts[i], starts[i] + counts[i]):
            sa, ca, sna, cna = _axis_trig(_H * cos_aoa[p], ur)
            sy, cy, sny, cny = _axis_trig(_H * sin_aoa[p], uc)
            for u in range(n_u):
                t = ubt[u]
                fu[u] = (_dir(sa, ca, sna, cna, t[0], t[1], t[2], t[3], ur)
                         * _dir(sy, cy, sny, cny, t[4], t[5], t[6], t[7], uc) / un)
            sa, ca, sna, cna = _axis_trig(_H * cos_aod[p], sr)
            sy, cy, sny, cny = _axis_trig(_H * sin_aod[p], sc)
            for b in range(n_s):
                t = sbt[b]
                fs[b] = (_dir(sa, ca, sna, cna, t[0], t[1], t[2], t[3], sr)
                         * _dir(sy, cy, sny, cny, t[4], t[5], t[6], t[7], sc) / sn)
            g = math.sqrt(power[p])
            gr = g * math.cos(phase[p])
            gi = g * math.sin(phase[p])
            for u in range(n_u):
                wr = gr * fu[u]
                wi = gi * fu[u]
                for b in range(n_s):
                    out[i, u, b] += complex(wr * fs[b], wi * fs[b])
    return out


@njit(cache=True)
def refresh_rays(path_link, path_ue, cos_la, sin_la, cos_ld, sin_ld, cos_oa, sin_oa, cos_od, sin_od,
                 vel, k_doppler, cos_aoa, sin_aoa, cos_aod, sin_aod, doppler):
    """Re-point every ray from its link's line-of-sight angles and update its Doppler (in place).

    Uses ``cos(los + offset)`` expansions so that no per-ray trigonometry is needed.
    """
    for p in range(path_link.shape[0]):
        i = path_link[p]
        ca = cos_la[i] * cos_oa[p] - sin_la[i] * sin_oa[p]
        sa = sin_la[i] * cos_oa[p] + cos_la[i] * sin_oa[p]
        cos_aoa[p] = ca
        sin_aoa[p] = sa
        cos_aod[p] = cos_ld[i] * cos_od[p] - sin_ld[i] * sin_od[p]
        sin_aod[p] = sin_ld[i] * cos_od[p] + cos_ld[i] * sin_od[p]
        u = path_ue[p]
        doppler[p] = k_doppler * (vel[u, 0] * ca + vel[u, 1] * sa)


@njit(cache=True)
def advance_phase(phase, doppler, dt):
    two_pi = 2.0 * math.pi
    for p in range(phase.shape[0]):
        x = phase[p] + doppler[p] * dt
        phase[p] = x - two_pi * math.floor(x / two_pi)
