"""Statistical mmWave link model, UPA beamforming and the LTE legacy link.

The mmWave channel of a SCell-UE link is a sum of clusters, each made of
``subpaths_per_cluster`` rays.  Large-scale parameters (pathloss state,
cluster count, power fractions, angular offsets) are redrawn every ``T_H``;
small-scale evolution advances the ray phases by their Doppler shift and
re-points the rays from the current geometry.

Channel matrices are stored in the downlink orientation ``H`` of shape
``(n_ue, n_scell)``; the uplink sounding channel is taken as ``H^H`` so that
a direction pair measured in uplink has the same gain when used in downlink.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import IntEnum
from typing import Mapping, Sequence

import numpy as np

from . import _kernels

SPEED_OF_LIGHT = 299_792_458.0


class PathlossState(IntEnum):
    LOS = 0
    NLOS = 1
    OUTAGE = 2


@dataclass(frozen=True)
class ChannelConstants:
    """Pathloss, outage and cluster parameters of the 28 GHz statistical model."""

    alpha_los: float = 61.4
    beta_los: float = 2.0
    alpha_nlos: float = 72.0
    beta_nlos: float = 2.92
    a_out: float = 1.0 / 30.0  # 1/m
    b_out: float = 5.2
    a_los: float = 1.0 / 67.1  # 1/m
    cluster_poisson_mean: float = 1.9
    r_tau: float = 2.8
    zeta_db: float = 4.0
    angular_spread_deg: float = 10.0
    subpaths_per_cluster: int = 10

    def violations(self) -> list[str]:
        out = []
        if self.beta_los > self.beta_nlos:
            out.append("channel.beta_los must not exceed channel.beta_nlos")
        if self.a_out < 0 or self.a_los < 0:
            out.append("channel.a_out and channel.a_los must be >= 0")
        if self.subpaths_per_cluster < 1:
            out.append("channel.subpaths_per_cluster must be >= 1")
        if self.cluster_poisson_mean < 0:
            out.append("channel.cluster_poisson_mean must be >= 0")
        return out


# ---------------------------------------------------------------------------
# pathloss
# ---------------------------------------------------------------------------

def state_probabilities(d, constants: ChannelConstants):
    """Return ``(p_out, p_los, p_nlos)`` at distance ``d`` (m)."""
    d = np.asarray(d, dtype=float)
    p_out = np.maximum(0.0, 1.0 - np.exp(-constants.a_out * d + constants.b_out))
    p_los = (1.0 - p_out) * np.exp(-constants.a_los * d)
    p_nlos = 1.0 - p_out - p_los
    return p_out, p_los, p_nlos


def sample_pathloss_states(d, constants: ChannelConstants, rng: np.random.Generator) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be > 0")
    p_out, p_los, _ = state_probabilities(d, constants)
    u = rng.random(d.shape)
    states = np.full(d.shape, PathlossState.NLOS, dtype=np.int8)
    states[u < p_out + p_los] = PathlossState.LOS
    states[u < p_out] = PathlossState.OUTAGE
    return states


def sample_pathloss_state(d: float, constants: ChannelConstants, rng: np.random.Generator) -> PathlossState:
    return PathlossState(int(sample_pathloss_states(np.array([d]), constants, rng)[0]))


def mmwave_pathloss_db(state, d, constants: ChannelConstants):
    """``alpha + beta * 10 log10(d)`` for LoS/NLoS links; outage is rejected.

    ``state`` may be an array of states matching ``d``.
    """
    state = np.asarray(state)
    d = np.asarray(d, dtype=float)
    if np.any(state == PathlossState.OUTAGE):
        raise ValueError("pathloss is undefined in outage")
    if np.any(d <= 0):
        raise ValueError("distance must be > 0")
    los = state == PathlossState.LOS
    alpha = np.where(los, constants.alpha_los, constants.alpha_nlos)
    beta = np.where(los, constants.beta_los, constants.beta_nlos)
    pl = alpha + beta * 10.0 * np.log10(d)
    return float(pl) if pl.ndim == 0 else pl


# ---------------------------------------------------------------------------
# arrays and codebooks
# ---------------------------------------------------------------------------

def _centered(n: int) -> np.ndarray:
    return np.arange(n) - (n - 1) / 2.0


def steering_vector(dims: tuple[int, int], azimuth: float) -> np.ndarray:
    """Unit-norm response of a lambda/2 UPA lying in the horizontal plane.

    Element ``(m, n)`` sits at ``((m - cm) lambda/2, (n - cn) lambda/2)`` so a
    plane wave arriving in-plane from ``azimuth`` has phase
    ``pi * ((m - cm) cos az + (n - cn) sin az)``.  Elements are ordered
    row-major.
    """
    rows, cols = dims
    if rows < 1 or cols < 1:
        raise ValueError("array dims must be >= 1x1")
    phase = math.pi * (_centered(rows)[:, None] * math.cos(azimuth)
                       + _centered(cols)[None, :] * math.sin(azimuth))
    return np.exp(1j * phase).ravel() / math.sqrt(rows * cols)


def array_response(dims: tuple[int, int], azimuth: float) -> np.ndarray:
    """Unnormalized array response (unit-modulus entries)."""
    return steering_vector(dims, azimuth) * math.sqrt(dims[0] * dims[1])


def _dirichlet(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """``sin(n u) / sin(u)`` with ``u = a - b``, i.e. ``sum_k exp(j 2 u (k - (n-1)/2))`` over k < n.

    Expanded with angle-difference identities so that only ``a`` and ``b``
    need trigonometric evaluations, not every ``(a, b)`` combination.
    """
    sa, ca, sna, cna = np.sin(a), np.cos(a), np.sin(n * a), np.cos(n * a)
    sb, cb, snb, cnb = np.sin(b), np.cos(b), np.sin(n * b), np.cos(n * b)
    s = sa * cb - ca * sb
    num = sna * cnb - cna * snb
    small = np.abs(s) < 1e-9
    if np.any(small):
        # limit sin(n u)/sin(u) -> n cos(n u)/cos(u) near u = k pi
        lim = n * (cna * cnb + sna * snb) / (ca * cb + sa * sb)
        return np.where(small, lim, num / np.where(small, 1.0, s))
    return num / s


def _pattern(dims, cos_az, sin_az, cos_b, sin_b) -> np.ndarray:
    rows, cols = dims
    h = 0.5 * math.pi
    return (_dirichlet(h * cos_az, h * cos_b, rows) * _dirichlet(h * sin_az, h * sin_b, cols)
            / math.sqrt(rows * cols))


def beam_pattern(dims: tuple[int, int], beam_azimuths, azimuth) -> np.ndarray:
    """Real amplitude ``w_b^H a(az)`` of unit-norm beams against unnormalized responses.

    Broadcasts ``azimuth`` (shape ``S``) against ``beam_azimuths`` (shape ``B``)
    and returns an array of shape ``S + B``.  The value is real because the
    element grid is centered.
    """
    az = np.asarray(azimuth, dtype=float)[..., None]
    b = np.asarray(beam_azimuths, dtype=float)
    return _pattern(dims, np.cos(az), np.sin(az), np.cos(b), np.sin(b))


@dataclass(frozen=True)
class Codebook:
    dims: tuple[int, int]
    azimuths: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return len(self.azimuths)

    @property
    def weights(self) -> np.ndarray:
        """``(count, n_elements)`` matrix of unit-norm weight vectors."""
        return np.stack([steering_vector(self.dims, a) for a in self.azimuths])

    def pattern(self, azimuth) -> np.ndarray:
        return beam_pattern(self.dims, self.azimuths, azimuth)


def make_codebook(dims: tuple[int, int], count: int) -> Codebook:
    """``count`` beams uniformly spanning azimuth ``[0, 2 pi)``."""
    if count < 1:
        raise ValueError("codebook needs at least one direction")
    if count > dims[0] * dims[1]:
        raise ValueError(f"{count} directions exceed the {dims[0]}x{dims[1]} array")
    return Codebook(tuple(dims), 2.0 * math.pi * np.arange(count) / count)


def bf_gain(H: np.ndarray, w_tx: np.ndarray, w_rx: np.ndarray) -> float:
    """``|w_rx^H H w_tx|^2``."""
    H = np.asarray(H)
    if H.shape != (len(w_rx), len(w_tx)):
        raise ValueError(f"H is {H.shape}, weights are rx={len(w_rx)} tx={len(w_tx)}")
    return float(abs(np.vdot(w_rx, H @ w_tx)) ** 2)


# ---------------------------------------------------------------------------
# SINR / rate
# ---------------------------------------------------------------------------

def dbm_to_mw(x):
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


def noise_mw(bandwidth_hz: float, noise_psd_dbm_hz: float = -174.0, noise_figure_db: float = 0.0) -> float:
    return float(dbm_to_mw(noise_psd_dbm_hz + noise_figure_db + 10.0 * math.log10(bandwidth_hz)))


def sinr_db(signal_mw, interference_mw, noise):
    signal_mw = np.asarray(signal_mw, dtype=float)
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(signal_mw / (np.asarray(interference_mw, dtype=float) + noise))
    return float(out) if out.ndim == 0 else out


def shannon_rate(sinr, n_users, bandwidth_hz: float):
    """``(W / N) log2(1 + sinr)`` with ``sinr`` in dB; ``-inf`` dB gives 0."""
    n_users = np.asarray(n_users, dtype=float)
    if np.any(n_users < 1):
        raise ValueError("n_users must be >= 1")
    lin = 10.0 ** (np.asarray(sinr, dtype=float) / 10.0)
    out = bandwidth_hz / n_users * np.log2(1.0 + lin)
    return float(out) if out.ndim == 0 else out


def lte_plos(R):
    """LoS probability of the MCell-UE link, ``R`` in km."""
    R = np.asarray(R, dtype=float)
    if np.any(R <= 0):
        raise ValueError("R must be > 0")
    e = np.exp(-R / 0.063)
    p = np.minimum(0.018 / R, 1.0) * (1.0 - e) + e
    p = np.clip(p, 0.0, 1.0)
    return float(p) if p.ndim == 0 else p


def lte_pathloss_db(state, R):
    R = np.asarray(R, dtype=float)
    if np.any(R <= 0):
        raise ValueError("R must be > 0")
    los = np.asarray(state) == PathlossState.LOS
    pl = np.where(los, 103.4 + 24.2 * np.log10(R), 131.1 + 42.8 * np.log10(R))
    return float(pl) if pl.ndim == 0 else pl


def lte_snr(R, state, config) -> float:
    """Omnidirectional MCell-UE SNR in dB (``R`` in km)."""
    n = noise_mw(config.w_lte, config.noise_psd_dbm_hz, config.noise_figure_db)
    snr = config.p_tx_lte_dbm - lte_pathloss_db(state, R) - 10.0 * np.log10(n)
    return float(snr) if np.ndim(snr) == 0 else snr


# ---------------------------------------------------------------------------
# large-scale draws (shared by the single-link and field representations)
# ---------------------------------------------------------------------------

@dataclass
class _Paths:
    """Flat per-subpath arrays for a batch of links, grouped by link."""

    link: np.ndarray        # index into the batch
    cluster: np.ndarray     # cluster index within its link
    power: np.ndarray       # per-subpath power, sums to 1 per link
    aoa_offset: np.ndarray
    aod_offset: np.ndarray
    phase: np.ndarray


def _draw_paths(states: np.ndarray, constants: ChannelConstants, rng: np.random.Generator) -> _Paths:
    """Draw clusters and subpaths for every non-outage link in ``states``."""
    states = np.asarray(states)
    live = np.flatnonzero(states != PathlossState.OUTAGE)
    n_live = len(live)
    n_clusters = np.maximum(1, rng.poisson(constants.cluster_poisson_mean, n_live))
    total = int(n_clusters.sum())
    c_link = np.repeat(live, n_clusters)
    first = np.cumsum(n_clusters) - n_clusters
    c_index = np.arange(total) - np.repeat(first, n_clusters)

    u = rng.random(total)
    z = rng.normal(0.0, constants.zeta_db, total)
    raw = u ** (constants.r_tau - 1.0) * 10.0 ** (-0.1 * z)
    link_sum = np.zeros(len(states))
    np.add.at(link_sum, c_link, raw)
    frac = raw / link_sum[c_link]

    c_aoa = rng.uniform(-math.pi, math.pi, total)
    c_aod = rng.uniform(-math.pi, math.pi, total)
    direct = (c_index == 0) & (states[c_link] == PathlossState.LOS)
    c_aoa[direct] = 0.0
    c_aod[direct] = 0.0

    S = constants.subpaths_per_cluster
    spread = math.radians(constants.angular_spread_deg)
    n_paths = total * S
    return _Paths(
        link=np.repeat(c_link, S),
        cluster=np.repeat(c_index, S),
        power=np.repeat(frac / S, S),
        aoa_offset=np.repeat(c_aoa, S) + rng.normal(0.0, spread, n_paths),
        aod_offset=np.repeat(c_aod, S) + rng.normal(0.0, spread, n_paths),
        phase=rng.uniform(0.0, 2.0 * math.pi, n_paths),
    )


def _wrap(a):
    return np.mod(np.asarray(a) + math.pi, 2.0 * math.pi) - math.pi


def _geometry(ue_pos, sc_pos):
    """Distance and line-of-sight azimuths (at UE towards SCell, at SCell towards UE)."""
    delta = np.asarray(sc_pos, dtype=float) - np.asarray(ue_pos, dtype=float)
    dist = np.hypot(delta[..., 0], delta[..., 1])
    aoa = np.arctan2(delta[..., 1], delta[..., 0])
    return dist, aoa, _wrap(aoa + math.pi)


def _doppler(aoa, velocity, wavelength):
    """Angular Doppler (rad/s) of rays arriving from ``aoa`` at a UE moving with ``velocity``."""
    velocity = np.asarray(velocity, dtype=float)
    speed = np.hypot(velocity[..., 0], velocity[..., 1])
    heading = np.arctan2(velocity[..., 1], velocity[..., 0])
    return 2.0 * math.pi * speed / wavelength * np.cos(aoa - heading)


# ---------------------------------------------------------------------------
# single link
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinkChannel:
    """One SCell-UE link.  Ray arrays are empty when the link is in outage."""

    state: PathlossState
    distance: float
    ue_dims: tuple[int, int]
    scell_dims: tuple[int, int]
    scell_position: tuple[float, float]
    ue_position: tuple[float, float]
    los_aoa: float
    los_aod: float
    cluster: np.ndarray = field(repr=False)
    power: np.ndarray = field(repr=False)
    aoa_offset: np.ndarray = field(repr=False)
    aod_offset: np.ndarray = field(repr=False)
    phase: np.ndarray = field(repr=False)
    doppler: np.ndarray = field(repr=False)
    t: float = 0.0
    last_large_scale_update: float = 0.0

    @property
    def aoa(self) -> np.ndarray:
        return self.los_aoa + self.aoa_offset

    @property
    def aod(self) -> np.ndarray:
        return self.los_aod + self.aod_offset

    @property
    def gains(self) -> np.ndarray:
        return np.sqrt(self.power) * np.exp(1j * self.phase)

    @property
    def cluster_power_fractions(self) -> np.ndarray:
        if len(self.cluster) == 0:
            return np.zeros(0)
        return np.bincount(self.cluster, weights=self.power)

    @property
    def H(self) -> np.ndarray:
        """Downlink matrix ``sum_p g_p a_ue(aoa_p) a_scell(aod_p)^H``, shape ``(n_ue, n_scell)``."""
        n_rx = self.ue_dims[0] * self.ue_dims[1]
        n_tx = self.scell_dims[0] * self.scell_dims[1]
        H = np.zeros((n_rx, n_tx), dtype=complex)
        for g, a_in, a_out in zip(self.gains, self.aoa, self.aod):
            H += g * np.outer(array_response(self.ue_dims, a_in),
                              array_response(self.scell_dims, a_out).conj())
        return H

    def pathloss_db(self, constants: ChannelConstants) -> float:
        return mmwave_pathloss_db(self.state, self.distance, constants)

    def beamspace(self, ue_codebook: Codebook, scell_codebook: Codebook) -> np.ndarray:
        """``B[i, j] = w_ue_i^H H w_scell_j`` for every codebook pair."""
        f_ue = ue_codebook.pattern(self.aoa)          # (P, n_ue_dirs)
        f_sc = scell_codebook.pattern(self.aod)       # (P, n_sc_dirs)
        return (f_ue * self.gains[:, None]).T @ f_sc


def new_link(ue_position, scell_position, ue_velocity, constants: ChannelConstants, rng: np.random.Generator,
             *, ue_dims=(4, 4), scell_dims=(8, 8), wavelength: float = SPEED_OF_LIGHT / 28e9,
             t: float = 0.0) -> LinkChannel:
    dist, aoa, aod = _geometry(ue_position, scell_position)
    empty = np.zeros(0)
    link = LinkChannel(PathlossState.OUTAGE, float(max(dist, 1e-3)), tuple(ue_dims), tuple(scell_dims),
                       tuple(map(float, scell_position)), tuple(map(float, ue_position)),
                       float(aoa), float(aod), empty.astype(int), empty, empty, empty, empty, empty, t, t)
    return large_scale_resample(link, rng, ue_velocity=ue_velocity, constants=constants, wavelength=wavelength)


def large_scale_resample(link: LinkChannel, rng: np.random.Generator, *, ue_velocity=(0.0, 0.0),
                         constants: ChannelConstants = ChannelConstants(),
                         wavelength: float = SPEED_OF_LIGHT / 28e9) -> LinkChannel:
    """Redraw state, clusters, power fractions, angles and phases of ``link``."""
    state = sample_pathloss_states(np.array([link.distance]), constants, rng)
    paths = _draw_paths(state, constants, rng)
    aoa = link.los_aoa + paths.aoa_offset
    return replace(link, state=PathlossState(int(state[0])), cluster=paths.cluster, power=paths.power,
                   aoa_offset=paths.aoa_offset, aod_offset=paths.aod_offset, phase=paths.phase,
                   doppler=_doppler(aoa, ue_velocity, wavelength), last_large_scale_update=link.t)


def small_scale_update(link: LinkChannel, t: float, ue_position, ue_velocity,
                       wavelength: float = SPEED_OF_LIGHT / 28e9) -> LinkChannel:
    """Advance ray phases to time ``t`` and re-point rays from the new UE position.

    The pathloss state and cluster powers are kept.  Outage links only have
    their geometry refreshed.
    """
    dist, los_aoa, los_aod = _geometry(ue_position, link.scell_position)
    dt = t - link.t
    phase = np.mod(link.phase + link.doppler * dt, 2.0 * math.pi)
    doppler = _doppler(los_aoa + link.aoa_offset, ue_velocity, wavelength)
    return replace(link, distance=float(max(dist, 1e-3)), los_aoa=float(los_aoa), los_aod=float(los_aod),
                   ue_position=tuple(map(float, ue_position)), phase=phase, doppler=doppler, t=t)


def mmwave_sinr(target: int, links: Mapping[int, LinkChannel], beams: Mapping[int, tuple[np.ndarray, np.ndarray]],
                config, *, interference: bool = True, bandwidth: float | None = None) -> float:
    """SINR (dB) at a UE from SCell ``target`` given every SCell's link and beam pair.

    ``beams[k]`` is ``(w_scell, w_ue)`` as used on link ``k``.  Outage links
    contribute nothing; an outage target returns ``-inf``.
    """
    c = config.channel
    received = {}
    for k, link in links.items():
        if link.state == PathlossState.OUTAGE or k not in beams:
            continue
        w_tx, w_rx = beams[k]
        pl = link.pathloss_db(c)
        received[k] = float(dbm_to_mw(config.p_tx_mmw_dbm - pl)) * bf_gain(link.H, w_tx, w_rx)
    if target not in received:
        return -math.inf
    bw = config.w_mmw if bandwidth is None else bandwidth
    n = noise_mw(bw, config.noise_psd_dbm_hz, config.noise_figure_db)
    intf = sum(v for k, v in received.items() if k != target) if interference else 0.0
    return sinr_db(received[target], intf, n)


# ---------------------------------------------------------------------------
# all links of a deployment
# ---------------------------------------------------------------------------

class ChannelField:
    """Every UE-SCell link of a deployment, stored as flat ray arrays.

    Rays are grouped contiguously by link; ``link_ids`` holds the flat index
    ``ue * n_scell + scell`` of each live (non-outage) link and ``starts`` the
    offset of its first ray.
    """

    def __init__(self, n_ue: int, n_scell: int, constants: ChannelConstants, wavelength: float,
                 ue_codebook: Codebook, scell_codebook: Codebook):
        self.n_ue = n_ue
        self.n_scell = n_scell
        self.constants = constants
        self.wavelength = wavelength
        self.ue_codebook = ue_codebook
        self.scell_codebook = scell_codebook
        self.state = np.full((n_ue, n_scell), PathlossState.OUTAGE, dtype=np.int8)
        self.t = 0.0
        self._set_paths(np.zeros(0, dtype=int), _Paths(*(np.zeros(0),) * 6))

    def _set_paths(self, live_links: np.ndarray, paths: _Paths) -> None:
        self.link_ids = live_links
        self.path_link = np.searchsorted(live_links, paths.link).astype(np.int64)
        self.path_ue = (live_links // max(self.n_scell, 1))[self.path_link].astype(np.int64)
        self.path_cluster = paths.cluster.astype(int)
        self.power = paths.power
        self.aoa_offset = paths.aoa_offset
        self.aod_offset = paths.aod_offset
        self._cs_off = (np.cos(self.aoa_offset), np.sin(self.aoa_offset),
                        np.cos(self.aod_offset), np.sin(self.aod_offset))
        self.phase = np.array(paths.phase, dtype=float)
        n = len(self.phase)
        self.cos_aoa, self.sin_aoa = np.empty(n), np.empty(n)
        self.cos_aod, self.sin_aod = np.empty(n), np.empty(n)
        self.doppler = np.empty(n)
        counts = np.bincount(self.path_link, minlength=len(live_links))
        self.starts = (np.cumsum(counts) - counts).astype(np.int64)
        self.counts = counts.astype(np.int64)
        # flat index -> live position (or -1)
        self.live_index = np.full(self.n_ue * self.n_scell, -1, dtype=int)
        self.live_index[live_links] = np.arange(len(live_links))

    # geometry ---------------------------------------------------------
    def _refresh_geometry(self, ue_pos: np.ndarray, sc_pos: np.ndarray, ue_vel: np.ndarray) -> None:
        ue = self.link_ids // max(self.n_scell, 1)
        sc = self.link_ids % max(self.n_scell, 1)
        dist, aoa, aod = _geometry(ue_pos[ue], sc_pos[sc])
        self.distance = np.maximum(dist, 1e-3)
        self.los_aoa = aoa
        self.los_aod = aod
        live_state = self.state.ravel()[self.link_ids]
        self.pathloss_db = (mmwave_pathloss_db(live_state, self.distance, self.constants)
                            if len(self.link_ids) else np.zeros(0))
        _kernels.refresh_rays(self.path_link, self.path_ue, np.cos(aoa), np.sin(aoa), np.cos(aod), np.sin(aod),
                              *self._cs_off, np.ascontiguousarray(ue_vel, dtype=float),
                              2.0 * math.pi / self.wavelength, self.cos_aoa, self.sin_aoa,
                              self.cos_aod, self.sin_aod, self.doppler)

    @property
    def aoa(self) -> np.ndarray:
        return self.los_aoa[self.path_link] + self.aoa_offset

    @property
    def aod(self) -> np.ndarray:
        return self.los_aod[self.path_link] + self.aod_offset

    def resample(self, rng: np.random.Generator, ue_pos, sc_pos, ue_vel) -> None:
        ue_pos = np.asarray(ue_pos, dtype=float).reshape(-1, 2)
        sc_pos = np.asarray(sc_pos, dtype=float).reshape(-1, 2)
        dist, _, _ = _geometry(ue_pos[:, None, :], sc_pos[None, :, :])
        if dist.size:
            self.state = sample_pathloss_states(np.maximum(dist, 1e-3), self.constants, rng)
        flat = self.state.ravel()
        paths = _draw_paths(flat, self.constants, rng)
        self._set_paths(np.flatnonzero(flat != PathlossState.OUTAGE), paths)
        self._refresh_geometry(ue_pos, sc_pos, np.asarray(ue_vel, dtype=float).reshape(-1, 2))

    def advance(self, dt: float, ue_pos, sc_pos, ue_vel) -> None:
        """Small-scale step: phases move by Doppler * dt, rays re-pointed."""
        _kernels.advance_phase(self.phase, self.doppler, dt)
        self.t += dt
        self._refresh_geometry(np.asarray(ue_pos, dtype=float).reshape(-1, 2),
                               np.asarray(sc_pos, dtype=float).reshape(-1, 2),
                               np.asarray(ue_vel, dtype=float).reshape(-1, 2))

    # queries ------------------------------------------------------------
    @property
    def gains(self) -> np.ndarray:
        return np.sqrt(self.power) * np.exp(1j * self.phase)

    def gains_at(self, idx: np.ndarray) -> np.ndarray:
        return np.sqrt(self.power[idx]) * np.exp(1j * self.phase[idx])

    def live(self, ue: int, scell: int) -> int:
        return int(self.live_index[ue * self.n_scell + scell])

    def link(self, ue: int, scell: int, ue_pos, sc_pos) -> LinkChannel:
        """Extract one link as a :class:`LinkChannel` (geometry from the given positions)."""
        i = self.live(ue, scell)
        st = PathlossState(int(self.state[ue, scell]))
        dist, aoa, aod = _geometry(np.asarray(ue_pos[ue], float), np.asarray(sc_pos[scell], float))
        if i < 0:
            sl = slice(0, 0)
        else:
            sl = slice(self.starts[i], self.starts[i] + self.counts[i])
        return LinkChannel(st, float(max(dist, 1e-3)), self.ue_codebook.dims, self.scell_codebook.dims,
                           tuple(map(float, sc_pos[scell])), tuple(map(float, ue_pos[ue])),
                           float(aoa), float(aod), self.path_cluster[sl].copy(), self.power[sl].copy(),
                           self.aoa_offset[sl].copy(), self.aod_offset[sl].copy(), self.phase[sl].copy(),
                           self.doppler[sl].copy(), self.t, self.t)

    def _path_index(self, live_sel: np.ndarray):
        """Ray indices of the selected live links and segment starts within them."""
        counts = self.counts[live_sel]
        total = int(counts.sum())
        seg = np.cumsum(counts) - counts
        idx = np.arange(total) - np.repeat(seg, counts) + np.repeat(self.starts[live_sel], counts)
        return idx, seg, counts

    def _cb_args(self):
        u, c = self.ue_codebook, self.scell_codebook
        return (np.cos(u.azimuths), np.sin(u.azimuths), np.array(u.dims, dtype=np.int64),
                np.cos(c.azimuths), np.sin(c.azimuths), np.array(c.dims, dtype=np.int64))

    def beamspace(self, live_sel: np.ndarray | None = None, phase: np.ndarray | None = None) -> np.ndarray:
        """``(L, n_ue_dirs, n_scell_dirs)`` complex beamspace channels ``w_ue^H H w_scell``.

        ``phase`` optionally overrides the current ray phases.
        """
        if live_sel is None:
            live_sel = np.arange(len(self.link_ids))
        live_sel = np.asarray(live_sel, dtype=np.int64)
        return _kernels.beamspace(self.starts[live_sel], self.counts[live_sel], self.power,
                                  self.phase if phase is None else phase, self.cos_aoa, self.sin_aoa,
                                  self.cos_aod, self.sin_aod, *self._cb_args())

    def beam_rows(self, live_sel: np.ndarray, ue_beam: np.ndarray) -> np.ndarray:
        """``(L, n_scell_dirs)`` beamspace rows ``w_ue^H H w_scell_b`` for one UE beam per link."""
        live_sel = np.asarray(live_sel, dtype=np.int64)
        return _kernels.beam_rows(self.starts[live_sel], self.counts[live_sel],
                                  np.asarray(ue_beam, dtype=np.int64), self.power, self.phase,
                                  self.cos_aoa, self.sin_aoa, self.cos_aod, self.sin_aod, *self._cb_args())

    # numpy reference implementations --------------------------------------
    def beamspace_reference(self, live_sel: np.ndarray | None = None) -> np.ndarray:
        if live_sel is None:
            live_sel = np.arange(len(self.link_ids))
        live_sel = np.asarray(live_sel, dtype=int)
        n_u, n_s = self.ue_codebook.count, self.scell_codebook.count
        out = np.zeros((len(live_sel), n_u, n_s), dtype=complex)
        if len(live_sel) == 0:
            return out
        counts = self.counts[live_sel]
        for k in np.unique(counts):
            rows = np.flatnonzero(counts == k)
            idx = self.starts[live_sel[rows]][:, None] + np.arange(k)
            g = self.gains_at(idx)                                 # (n, k)
            f_ue = self.ue_codebook.pattern(self.aoa[idx])         # (n, k, n_u)
            f_sc = self.scell_codebook.pattern(self.aod[idx])      # (n, k, n_s)
            out[rows] = np.einsum("nku,nks->nus", f_ue * g[..., None], f_sc)
        return out

    def beam_rows_reference(self, live_sel: np.ndarray, ue_beam: np.ndarray) -> np.ndarray:
        live_sel = np.asarray(live_sel, dtype=int)
        n_s = self.scell_codebook.count
        if len(live_sel) == 0:
            return np.zeros((0, n_s), dtype=complex)
        idx, seg, counts = self._path_index(live_sel)
        beam_az = self.ue_codebook.azimuths[np.repeat(np.asarray(ue_beam, dtype=int), counts)]
        f_ue = _pattern_pointwise(self.ue_codebook.dims, beam_az, self.aoa[idx])
        w = self.gains_at(idx) * f_ue
        f_sc = self.scell_codebook.pattern(self.aod[idx])
        return np.add.reduceat(w[:, None] * f_sc, seg, axis=0)


def _pattern_pointwise(dims, beam_az, az) -> np.ndarray:
    """Elementwise ``w(beam_az)^H a(az)`` (no broadcasting over beams)."""
    return _pattern(dims, np.cos(az), np.sin(az), np.cos(beam_az), np.sin(beam_az))
