"""Directional sounding sweep, per-SCell report tables and the sweep delay/energy model."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .channel import Codebook, LinkChannel, PathlossState, dbm_to_mw, noise_mw


@dataclass(frozen=True, eq=False)
class RtEntry:
    """Best direction pair of one UE at one SCell.

    ``dir_sinr_db[i]`` is the best SINR reachable with UE direction ``i``
    (over every SCell direction) and ``dir_scell[i]`` the SCell direction
    achieving it; these feed the backup-beam search.
    """

    sinr_db: float
    d_ue: int
    d_scell: int
    dir_sinr_db: np.ndarray = field(default=None, repr=False)
    dir_scell: np.ndarray = field(default=None, repr=False)

    @property
    def pair(self) -> tuple[int, int]:
        return (self.d_ue, self.d_scell)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RtEntry):
            return NotImplemented
        same = (self.sinr_db, self.d_ue, self.d_scell) == (other.sinr_db, other.d_ue, other.d_scell)
        if self.dir_sinr_db is None or other.dir_sinr_db is None:
            return same and self.dir_sinr_db is other.dir_sinr_db
        return (same and np.array_equal(self.dir_sinr_db, other.dir_sinr_db)
                and np.array_equal(self.dir_scell, other.dir_scell))


@dataclass(frozen=True)
class ReportTable:
    """Per-SCell table of best SINR and direction pair per detected UE (absent UEs are omitted)."""

    scell_id: int
    timestamp: float
    entries: Mapping[int, RtEntry]

    def to_rows(self) -> list[tuple]:
        return [(self.timestamp, self.scell_id, ue, e.sinr_db, e.d_ue, e.d_scell)
                for ue, e in sorted(self.entries.items())]


def best_pairs(sinr_db: np.ndarray, gamma_out_db: float):
    """Row-major argmax over the last two axes of a ``(..., n_ue_dirs, n_scell_dirs)`` grid.

    Returns ``(best, d_ue, d_scell, present, dir_best, dir_scell)``.  Ties go
    to the lowest ``(d_ue, d_scell)`` in lexicographic order because
    ``argmax`` returns the first maximum of the flattened grid.
    """
    grid = np.asarray(sinr_db, dtype=float)
    n_u, n_s = grid.shape[-2:]
    flat = grid.reshape(grid.shape[:-2] + (n_u * n_s,))
    idx = np.argmax(flat, axis=-1)
    best = np.take_along_axis(flat, idx[..., None], axis=-1)[..., 0]
    dir_scell = np.argmax(grid, axis=-1)
    dir_best = np.take_along_axis(grid, dir_scell[..., None], axis=-1)[..., 0]
    present = best >= gamma_out_db
    return best, idx // n_s, idx % n_s, present, dir_best, dir_scell


def pair_sinr_grid(beamspace: np.ndarray, pathloss_db, config, interference_mw=0.0) -> np.ndarray:
    """Control-plane SINR (dB) of every direction pair from beamspace amplitudes.

    Noise is taken over ``config.w_sig`` (the narrowband sounding sub-signal).
    """
    pl = np.asarray(pathloss_db, dtype=float)[..., None, None]
    rx = dbm_to_mw(config.p_tx_mmw_dbm - pl) * np.abs(beamspace) ** 2
    n = noise_mw(config.w_sig, config.noise_psd_dbm_hz, config.noise_figure_db)
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(rx / (np.asarray(interference_mw, dtype=float) + n))


def run_sweep(scell_id: int, links: Mapping[int, LinkChannel], codebooks: tuple[Codebook, Codebook], config,
              timestamp: float = 0.0, interference_mw: Mapping[int, np.ndarray] | None = None) -> ReportTable:
    """Exhaustive search over every UE x SCell direction pair of each UE link of one SCell.

    ``links`` maps UE id to its link with ``scell_id``; ``codebooks`` is
    ``(ue_codebook, scell_codebook)``.  ``interference_mw`` optionally gives a
    per-UE array (broadcastable to the pair grid) added to the noise.  The
    measurement is deterministic; no randomness is consumed.
    """
    ue_cb, sc_cb = codebooks
    entries: dict[int, RtEntry] = {}
    for ue in sorted(links):
        link = links[ue]
        if link.state == PathlossState.OUTAGE:
            continue
        B = link.beamspace(ue_cb, sc_cb)
        intf = 0.0 if interference_mw is None else interference_mw.get(ue, 0.0)
        grid = pair_sinr_grid(B, link.pathloss_db(config.channel), config, intf)
        best, du, ds, present, dir_best, dir_sc = best_pairs(grid, config.gamma_out_db)
        if present:
            entries[ue] = RtEntry(float(best), int(du), int(ds), dir_best, dir_sc)
    return ReportTable(scell_id, timestamp, entries)


# ---------------------------------------------------------------------------
# delay and energy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepDelayModel:
    """Exhaustive sweep timing.

    ``receiver`` names the side that scans directions: ``"scell"`` for the
    uplink sweep, ``"ue"`` for the downlink one; ``L`` cannot exceed that
    side's direction count.
    """

    n_scell_dirs: int
    n_ue_dirs: int
    t_per: float
    L: int = 1
    receiver: str = "scell"

    @property
    def receiver_dirs(self) -> int:
        if self.receiver == "scell":
            return self.n_scell_dirs
        if self.receiver == "ue":
            return self.n_ue_dirs
        raise ValueError(f"receiver must be 'scell' or 'ue', got {self.receiver!r}")

    @property
    def scans(self) -> int:
        return self.n_scell_dirs * self.n_ue_dirs // self.L


def sweep_delay(model: SweepDelayModel) -> float:
    if model.L < 1:
        raise ValueError("L must be >= 1")
    if model.L > model.receiver_dirs:
        raise ValueError(f"L={model.L} exceeds the {model.receiver_dirs} receiver directions")
    return model.n_scell_dirs * model.n_ue_dirs * model.t_per / model.L


def sweep_energy(p_c: float, delay: float) -> float:
    if p_c < 0 or delay < 0:
        raise ValueError("power and delay must be >= 0")
    return p_c * delay


def uplink_delay_model(config) -> SweepDelayModel:
    """Uplink sweep: the SCell receives, digital SCells scan every direction at once."""
    L = config.n_scell_dirs if config.bf_mode_scell.value == "digital" else 1
    return SweepDelayModel(config.n_scell_dirs, config.n_ue_dirs, config.t_per, L, "scell")


def downlink_delay_model(config, ue_digital: bool = True) -> SweepDelayModel:
    """Downlink (standalone) sweep: the UE receives."""
    L = config.n_ue_dirs if ue_digital else 1
    return SweepDelayModel(config.n_scell_dirs, config.n_ue_dirs, config.t_per, L, "ue")


def delay_table(config) -> list[dict]:
    """Sweep delay for analog, uplink-digital and downlink-digital receivers."""
    rows = []
    for name, model in (
        ("analog", SweepDelayModel(config.n_scell_dirs, config.n_ue_dirs, config.t_per, 1, "scell")),
        ("ul_digital", SweepDelayModel(config.n_scell_dirs, config.n_ue_dirs, config.t_per, config.n_scell_dirs, "scell")),
        ("dl_digital", SweepDelayModel(config.n_scell_dirs, config.n_ue_dirs, config.t_per, config.n_ue_dirs, "ue")),
    ):
        rows.append({"scheme": name, "L": model.L, "delay_s": sweep_delay(model)})
    return rows


def energy_table(config) -> list[dict]:
    """Energy per sweep at the SCell and at the UE, uplink (MC) vs downlink (SA).

    Uplink: digital SCell receives for the uplink delay, analog UE transmits.
    Downlink: analog SCell transmits, digital UE receives for the downlink delay.
    """
    d_ul = sweep_delay(SweepDelayModel(config.n_scell_dirs, config.n_ue_dirs, config.t_per,
                                       config.n_scell_dirs, "scell"))
    d_dl = sweep_delay(downlink_delay_model(config, ue_digital=True))
    return [
        {"node": "scell", "scheme": "ul", "power_w": config.p_dbf_scell, "delay_s": d_ul,
         "energy_j": sweep_energy(config.p_dbf_scell, d_ul)},
        {"node": "scell", "scheme": "dl", "power_w": config.p_abf_scell, "delay_s": d_dl,
         "energy_j": sweep_energy(config.p_abf_scell, d_dl)},
        {"node": "ue", "scheme": "ul", "power_w": config.p_abf_ue, "delay_s": d_ul,
         "energy_j": sweep_energy(config.p_abf_ue, d_ul)},
        {"node": "ue", "scheme": "dl", "power_w": config.p_dbf_ue, "delay_s": d_dl,
         "energy_j": sweep_energy(config.p_dbf_ue, d_dl)},
    ]


def scan_offsets(n_ue_dirs: int, n_scell_dirs: int, L: int, t_per: float) -> np.ndarray:
    """Measurement time (relative to sweep start) of every direction pair.

    UE directions are held while the SCell scans its directions in groups of
    ``L``; scan ``s`` starts at ``s * t_per``.
    """
    if n_scell_dirs % L:
        raise ValueError("L must divide the SCell direction count for a time-smeared sweep")
    groups = n_scell_dirs // L
    s = np.arange(n_ue_dirs)[:, None] * groups + np.arange(n_scell_dirs)[None, :] // L
    return s * t_per
