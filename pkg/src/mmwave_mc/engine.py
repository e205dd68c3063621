"""Slotted simulation loop: mobility, channel evolution, sweeps, decisions, blockage and rate sampling."""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import channel as ch
from .controller import (Action, Association, BackupPair, RtHistory, Serving, assemble_crt, backup_beam,
                         decide_action, decide_attachment, detect_rlf)
from .metrics import jain_index, mean_stderr, stability
from .scenario import Deployment, Mode, NodeKind, RateShareMode, ScenarioConfig, deploy
from .sweep import ReportTable, RtEntry, best_pairs, pair_sinr_grid, scan_offsets, uplink_delay_model

# per-slot serving codes in MetricsTrace.serving
SERVE_MMWAVE = 0
SERVE_LTE = 1
SERVE_NONE = 2
SERVE_BLOCKED = 3
SERVE_BACKUP = 4

ACTION_CODES = {None: 0, Action.NOOP: 0, Action.BEAM_SWITCH: 1, Action.HANDOVER: 2,
                Action.FALLBACK_LTE: 3, Action.RECONNECT: 4}


@dataclass
class BlockageEvent:
    """Obstruction of one UE's serving direction pair during ``[t_arr, t_arr + t_b)``."""

    ue: int
    t_arr: float
    t_b: float
    scell: int = -1
    d_ue: int = -1
    d_scell: int = -1
    start_tick: int = 0
    end_tick: int = 0
    backup: BackupPair | None = None
    rlf_detected: bool = False

    @property
    def t_end(self) -> float:
        return self.t_arr + self.t_b


@dataclass(frozen=True)
class EventSchedule:
    slot: float
    h_ticks: int
    rt_ticks: int
    n_slots: int

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> "EventSchedule":
        v = [m for m in config.violations() if "slot" in m or "> 0" in m]
        if v:
            raise ValueError("invalid schedule: " + "; ".join(v))
        return cls(config.slot, config.h_ticks, config.rt_ticks, config.n_slots)

    def is_resample(self, k: int) -> bool:
        return k % self.h_ticks == 0

    def is_epoch(self, k: int) -> bool:
        return k % self.rt_ticks == 0


@dataclass
class MetricsTrace:
    """Per-slot samples of the tracked UEs, plus the decision and blockage logs."""

    t: np.ndarray
    ue_ids: np.ndarray
    rate: np.ndarray
    sinr: np.ndarray
    serving: np.ndarray
    action: np.ndarray
    decisions: list = field(default_factory=list)
    blockages: list = field(default_factory=list)
    n_ue: int = 0
    n_scell: int = 0
    seed: int = 0
    policy: str = ""

    @property
    def n_samples(self) -> int:
        return int(self.rate.size)

    @property
    def mean_rate(self) -> float:
        return float(np.mean(self.rate)) if self.rate.size else math.nan

    def stability(self):
        return stability(self.rate)

    @property
    def per_ue_mean(self) -> np.ndarray:
        return self.rate.mean(axis=0) if self.rate.size else np.zeros(0)

    def count(self, action: Action) -> int:
        return int(np.sum(self.action == ACTION_CODES[action]))

    def write_csv(self, path: str | Path) -> None:
        names = {SERVE_MMWAVE: "mmwave", SERVE_LTE: "lte", SERVE_NONE: "none", SERVE_BLOCKED: "blocked",
                 SERVE_BACKUP: "backup"}
        acts = {v: k.value for k, v in ACTION_CODES.items() if k not in (None, Action.NOOP)}
        acts[0] = ""
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["t", "ue", "rate_bps", "sinr_db", "serving", "action"])
            for k in range(len(self.t)):
                for j, ue in enumerate(self.ue_ids):
                    w.writerow([f"{self.t[k]:.6f}", int(ue), repr(float(self.rate[k, j])),
                                repr(float(self.sinr[k, j])), names[int(self.serving[k, j])],
                                acts[int(self.action[k, j])]])

    def write_decisions(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["t", "ue", "action", "from_cell", "to_cell", "d_ue", "d_scell", "policy"])
            for row in self.decisions:
                w.writerow(row)


def read_trace_rates(path: str | Path) -> np.ndarray:
    """Rate column of a trace CSV written by :meth:`MetricsTrace.write_csv`."""
    with open(path, newline="", encoding="utf-8") as f:
        return np.array([float(r["rate_bps"]) for r in csv.DictReader(f)])


def derive_seeds(seed: int, n: int) -> list[int]:
    """``n`` independent run seeds derived from a master seed."""
    return [int(c.generate_state(1, dtype=np.uint32)[0]) for c in np.random.SeedSequence(seed).spawn(n)]


def rng_streams(seed: int) -> dict[str, np.random.Generator]:
    """Independent generators so that mode or blockage changes leave the channel draws untouched."""
    names = ("deployment", "channel", "lte", "blockage")
    kids = np.random.SeedSequence(seed).spawn(len(names))
    return {n: np.random.default_rng(k) for n, k in zip(names, kids)}


class Simulation:
    """One run of the slotted loop.  Call :meth:`run` once."""

    def __init__(self, config: ScenarioConfig, deployment: Deployment | None = None):
        self.config = config
        self.schedule = EventSchedule.from_config(config)
        self.rngs = rng_streams(config.seed)
        self.deployment = deployment if deployment is not None else deploy(config, self.rngs["deployment"])
        dep = self.deployment
        self.ue_ids = np.array([n.id for n in dep.ues], dtype=int)
        self.sc_ids = np.array([n.id for n in dep.scells], dtype=int)
        self.U = len(self.ue_ids)
        self.S = len(self.sc_ids)
        self.ue_pos0 = dep.positions(NodeKind.UE)
        self.ue_vel = dep.velocities(NodeKind.UE)
        self.ue_pos = self.ue_pos0.copy()
        self.sc_pos = dep.positions(NodeKind.SCELL)
        self.ue_cb = ch.make_codebook(config.ant_ue, config.n_ue_dirs)
        self.sc_cb = ch.make_codebook(config.ant_scell, config.n_scell_dirs)
        self.field = ch.ChannelField(self.U, self.S, config.channel, config.wavelength, self.ue_cb, self.sc_cb)
        self.noise_data = ch.noise_mw(config.w_mmw, config.noise_psd_dbm_hz, config.noise_figure_db)
        self.p_tx_mw = float(ch.dbm_to_mw(config.p_tx_mmw_dbm))
        self.penalty = 10.0 ** (-config.suboptimal_penalty_db / 10.0)

        if config.track_radius is None:
            self.tracked = np.arange(self.U)
        else:
            self.tracked = np.flatnonzero(np.hypot(*self.ue_pos0.T) <= config.track_radius) if self.U else \
                np.zeros(0, dtype=int)
        self.track_col = np.full(self.U, -1, dtype=int)
        self.track_col[self.tracked] = np.arange(len(self.tracked))

        self.assoc: list[Association | None] = [None] * self.U
        self.kind = np.full(self.U, 2, dtype=np.int8)  # 0 scell, 1 lte, 2 unconnected
        self.a_sc = np.full(self.U, -1, dtype=int)
        self.a_du = np.zeros(self.U, dtype=int)
        self.a_ds = np.zeros(self.U, dtype=int)
        self.loads = np.zeros(self.S, dtype=int)
        self.beam_frac = np.zeros((self.S, config.n_scell_dirs))
        self.history = RtHistory(max(2, config.rt_history_len))
        self.lte_snr_db = np.zeros(self.U)
        self.active_block: dict[int, BlockageEvent] = {}
        self.pending: list[BlockageEvent] = []
        self.events: list[BlockageEvent] = []
        self.last_crt = None
        self._ran = False

    # ------------------------------------------------------------------
    # blockage
    # ------------------------------------------------------------------
    def inject_blockage(self, ue: int, t_arr: float, t_b: float) -> BlockageEvent | None:
        """Schedule a blockage of UE index ``ue``'s serving pair; ``t_b = 0`` is a no-op."""
        if t_b < 0:
            raise ValueError("t_b must be >= 0")
        if t_b == 0:
            return None
        slot = self.schedule.slot
        ev = BlockageEvent(ue, t_arr, t_b, start_tick=int(math.ceil(t_arr / slot - 1e-9)),
                           end_tick=int(math.ceil((t_arr + t_b) / slot - 1e-9)))
        for other in self.pending + list(self.active_block.values()):
            if other.ue == ue and ev.start_tick < other.end_tick and other.start_tick < ev.end_tick:
                raise ValueError(f"overlapping blockage on ue {ue}")
        if ev.end_tick <= ev.start_tick:
            return None
        self.pending.append(ev)
        return ev

    def _auto_blockages(self, k: int) -> None:
        cfg = self.config
        rng = self.rngs["blockage"]
        t0 = k * self.schedule.slot
        span = cfg.t_rt - cfg.blockage_duration if cfg.blockage_confined else cfg.t_rt
        draws = rng.uniform(0.0, span, len(self.tracked))
        for u, d in zip(self.tracked, draws):
            if self.kind[u] != 0 or self.field.state[u, self.a_sc[u]] == ch.PathlossState.OUTAGE:
                continue
            try:
                self.inject_blockage(int(u), t0 + float(d), cfg.blockage_duration)
            except ValueError:
                continue

    def _blockage_onsets(self, k: int) -> None:
        keep = []
        for ev in self.pending:
            if ev.start_tick > k:
                keep.append(ev)
                continue
            u = ev.ue
            if self.kind[u] != 0:
                continue
            ev.scell, ev.d_ue, ev.d_scell = int(self.a_sc[u]), int(self.a_du[u]), int(self.a_ds[u])
            ev.rlf_detected = detect_rlf(-math.inf, self.config)
            if self.config.backup_enabled and ev.rlf_detected:
                ev.backup = backup_beam(self.history, int(self.ue_ids[u]),
                                        (int(self.sc_ids[ev.scell]), ev.d_ue, ev.d_scell), self.config)
            self.active_block[u] = ev
            self.events.append(ev)
        self.pending = keep

    def _expire_blockages(self, k: int) -> None:
        for u in [u for u, ev in self.active_block.items() if ev.end_tick <= k]:
            del self.active_block[u]

    # ------------------------------------------------------------------
    # channel
    # ------------------------------------------------------------------
    def _resample(self) -> None:
        self.field.resample(self.rngs["channel"], self.ue_pos, self.sc_pos, self.ue_vel)
        r_km = np.maximum(np.hypot(*self.ue_pos.T) / 1000.0, 1e-3) if self.U else np.zeros(0)
        los = self.rngs["lte"].random(self.U) < (ch.lte_plos(r_km) if self.U else 0)
        state = np.where(los, ch.PathlossState.LOS, ch.PathlossState.NLOS)
        self.lte_snr_db = np.asarray(ch.lte_snr(r_km, state, self.config), dtype=float).reshape(-1)

    def _link_power_grid(self, live_sel: np.ndarray, dt: float = 0.0) -> np.ndarray:
        """``(L, n_ue_dirs, n_scell_dirs)`` received power (mW) of every direction pair."""
        f = self.field
        B = f.beamspace(live_sel, f.phase + f.doppler * dt if dt else None)
        pl = f.pathloss_db[live_sel]
        return ch.dbm_to_mw(self.config.p_tx_mmw_dbm - pl)[:, None, None] * np.abs(B) ** 2

    # ------------------------------------------------------------------
    # sweep and decisions
    # ------------------------------------------------------------------
    def _sweep(self, k: int):
        cfg = self.config
        f = self.field
        t = k * self.schedule.slot
        live = np.arange(len(f.link_ids))
        if cfg.time_smeared_sweep and len(live):
            L = uplink_delay_model(cfg).L
            offs = scan_offsets(cfg.n_ue_dirs, cfg.n_scell_dirs, L, cfg.t_per)
            power = np.zeros((len(live), cfg.n_ue_dirs, cfg.n_scell_dirs))
            for off in np.unique(offs):
                m = offs == off
                power[:, m] = self._link_power_grid(live, float(off))[:, m]
        else:
            power = self._link_power_grid(live)
        link_ue = f.link_ids // max(self.S, 1)
        link_sc = f.link_ids % max(self.S, 1)
        for u, ev in self.active_block.items():
            i = f.live(u, ev.scell)
            if i >= 0:
                power[i] *= self.penalty
                power[i, ev.d_ue, ev.d_scell] = 0.0
        intf = 0.0
        if cfg.control_interference and len(live):
            per_dir = power.mean(axis=2)                         # (L, n_ue_dirs)
            tot = np.zeros((self.U, cfg.n_ue_dirs))
            np.add.at(tot, link_ue, per_dir)
            intf = (tot[link_ue] - per_dir)[:, :, None]
        n = ch.noise_mw(cfg.w_sig, cfg.noise_psd_dbm_hz, cfg.noise_figure_db)
        with np.errstate(divide="ignore"):
            grid = 10.0 * np.log10(power / (intf + n))
        best, du, ds, present, dir_best, dir_sc = best_pairs(grid, cfg.gamma_out_db)

        entries: dict[int, dict[int, RtEntry]] = {int(s): {} for s in self.sc_ids}
        for i in np.flatnonzero(present):
            entries[int(self.sc_ids[link_sc[i]])][int(self.ue_ids[link_ue[i]])] = RtEntry(
                float(best[i]), int(du[i]), int(ds[i]), dir_best[i], dir_sc[i])
        rts = [ReportTable(s, t, entries[s]) for s in entries]
        return assemble_crt(rts, ue_ids=[int(x) for x in self.ue_ids], scell_ids=[int(s) for s in self.sc_ids],
                            timestamp=t)

    def _decide(self, k: int, action_row: np.ndarray, decisions: list) -> None:
        cfg = self.config
        crt = self._sweep(k)
        self.last_crt = crt
        prev = {int(self.ue_ids[u]): a for u, a in enumerate(self.assoc) if a is not None}
        new = decide_attachment(crt, cfg.policy, None, cfg, previous=prev)
        sc_index = {int(s): j for j, s in enumerate(self.sc_ids)}
        t = k * self.schedule.slot
        self.loads[:] = 0
        self.beam_frac[:] = 0.0
        for u, a in enumerate(new):
            old = self.assoc[u]
            act = decide_action(old, a) if old is not None else (
                Action.RECONNECT if a.serving is Serving.SCELL else Action.NOOP)
            if old is not None and act is Action.NOOP:
                a = Association(a.ue, a.serving, a.scell, a.d_ue, a.d_scell, old.since)
            self.assoc[u] = a
            if a.serving is Serving.SCELL:
                j = sc_index[a.scell]
                self.kind[u], self.a_sc[u], self.a_du[u], self.a_ds[u] = 0, j, a.d_ue, a.d_scell
                self.loads[j] += 1
                self.beam_frac[j, a.d_scell] += 1.0
            else:
                self.kind[u] = 1 if a.serving is Serving.LTE_FALLBACK else 2
                self.a_sc[u] = -1
            col = self.track_col[u]
            if col >= 0 and old is not None:
                action_row[col] = ACTION_CODES[act]
                if act is not Action.NOOP:
                    decisions.append((f"{t:.6f}", a.ue, act.value,
                                      "" if old.scell is None else old.scell,
                                      "" if a.scell is None else a.scell,
                                      "" if a.d_ue is None else a.d_ue,
                                      "" if a.d_scell is None else a.d_scell, cfg.policy.value))
        nz = self.loads > 0
        self.beam_frac[nz] /= self.loads[nz, None]
        self.history.push(crt, ues=[int(self.ue_ids[u]) for u in self.tracked])

    # ------------------------------------------------------------------
    # per-slot rates
    # ------------------------------------------------------------------
    def _effective_links(self):
        """Effective serving (scell index, d_ue, d_scell, load, code) of every tracked UE."""
        n = len(self.tracked)
        sc = np.full(n, -1, dtype=int)
        du = np.zeros(n, dtype=int)
        ds = np.zeros(n, dtype=int)
        load = np.ones(n, dtype=int)
        code = np.full(n, SERVE_NONE, dtype=np.int8)
        sc_index = {int(s): j for j, s in enumerate(self.sc_ids)}
        sole = self.config.rate_share_mode is RateShareMode.SOLE_USER
        for c, u in enumerate(self.tracked):
            if self.kind[u] != 0:
                code[c] = SERVE_LTE if self.kind[u] == 1 else SERVE_NONE
                continue
            s, a, b = self.a_sc[u], self.a_du[u], self.a_ds[u]
            ev = self.active_block.get(u)
            if ev is not None and (ev.scell, ev.d_ue, ev.d_scell) == (s, a, b):
                if ev.backup is None or not self.config.backup_enabled:
                    code[c] = SERVE_BLOCKED
                    continue
                j = sc_index[ev.backup.scell]
                sc[c], du[c], ds[c] = j, ev.backup.d_ue, ev.backup.d_scell
                load[c] = 1 if sole else max(1, self.loads[j] + (0 if j == s else 1))
                code[c] = SERVE_BACKUP
                continue
            sc[c], du[c], ds[c] = s, a, b
            load[c] = 1 if sole else max(1, self.loads[s])
            code[c] = SERVE_MMWAVE
        return sc, du, ds, load, code

    def _slot_rates(self):
        cfg = self.config
        f = self.field
        n = len(self.tracked)
        rate = np.zeros(n)
        sinr = np.full(n, np.nan)
        sc, du, ds, load, code = self._effective_links()
        on_mm = np.flatnonzero(sc >= 0)
        # serving link in outage: falls back to LTE (MC) or drops (SA)
        serv_live = np.full(n, -1, dtype=int)
        if len(on_mm):
            serv_live[on_mm] = f.live_index[self.tracked[on_mm] * self.S + sc[on_mm]]
        outage = (sc >= 0) & (serv_live < 0)
        mc = cfg.mode is Mode.MULTI_CONNECTIVITY
        code[outage] = SERVE_LTE if mc else SERVE_NONE
        if not mc:
            code[code == SERVE_LTE] = SERVE_NONE

        ok = np.flatnonzero(serv_live >= 0)
        if len(ok):
            ues = self.tracked[ok]
            # candidate links: every live link of these UEs towards the serving or an active SCell
            starts = np.searchsorted(f.link_ids, ues * self.S)
            ends = np.searchsorted(f.link_ids, (ues + 1) * self.S)
            cnt = ends - starts
            owner = np.repeat(np.arange(len(ok)), cnt)
            sel = np.concatenate([np.arange(a, b) for a, b in zip(starts, ends)]) if cnt.sum() else \
                np.zeros(0, dtype=int)
            lsc = f.link_ids[sel] % self.S
            keep = (self.loads[lsc] > 0) | (lsc == sc[ok][owner])
            sel, owner, lsc = sel[keep], owner[keep], lsc[keep]
            rows = f.beam_rows(sel, du[ok][owner])
            power = np.abs(rows) ** 2 * (self.p_tx_mw * 10.0 ** (-f.pathloss_db[sel] / 10.0))[:, None]
            for i, u in enumerate(ues):
                ev = self.active_block.get(u)
                if ev is None:
                    continue
                hit = np.flatnonzero((owner == i) & (lsc == ev.scell))
                power[hit] *= self.penalty
                if du[ok][i] == ev.d_ue:
                    power[hit, ev.d_scell] = 0.0
            is_serv = lsc == sc[ok][owner]
            sig = np.zeros(len(ok))
            sig[owner[is_serv]] = power[is_serv, ds[ok][owner[is_serv]]]
            other = ~is_serv
            intf = np.zeros(len(ok))
            np.add.at(intf, owner[other], np.sum(power[other] * self.beam_frac[lsc[other]], axis=1))
            with np.errstate(divide="ignore"):
                s_db = 10.0 * np.log10(sig / (intf + self.noise_data))
            sinr[ok] = s_db
            rate[ok] = cfg.w_mmw / load[ok] * np.log2(1.0 + sig / (intf + self.noise_data))

        # LTE sharing among every fallback UE of the MCell
        if mc and self.U:
            serv_state_out = np.zeros(self.U, dtype=bool)
            mm = np.flatnonzero(self.kind == 0)
            serv_state_out[mm] = self.field.live_index[mm * self.S + self.a_sc[mm]] < 0
            fb = (self.kind == 1) | serv_state_out
            # tracked UEs whose effective link differs from the association
            fb[self.tracked] = code == SERVE_LTE
            n_fb = int(fb.sum())
            lte = np.flatnonzero(code == SERVE_LTE)
            if n_fb and len(lte):
                snr = self.lte_snr_db[self.tracked[lte]]
                rate[lte] = ch.shannon_rate(snr, n_fb, cfg.w_lte)
        return rate, sinr, code

    # ------------------------------------------------------------------
    def run(self) -> MetricsTrace:
        if self._ran:
            raise RuntimeError("a Simulation runs once")
        self._ran = True
        cfg, sch = self.config, self.schedule
        n_t = len(self.tracked)
        rate = np.zeros((sch.n_slots, n_t))
        sinr = np.full((sch.n_slots, n_t), np.nan)
        serving = np.zeros((sch.n_slots, n_t), dtype=np.int8)
        action = np.zeros((sch.n_slots, n_t), dtype=np.int8)
        decisions: list = []
        for k in range(sch.n_slots):
            t = k * sch.slot
            if k > 0:
                self.ue_pos = self.ue_pos0 + self.ue_vel * t
                if sch.is_resample(k):
                    self._resample()
                else:
                    self.field.advance(sch.slot, self.ue_pos, self.sc_pos, self.ue_vel)
            else:
                self._resample()
            self._expire_blockages(k)
            if sch.is_epoch(k):
                self._decide(k, action[k], decisions)
                if cfg.blockage_enabled:
                    self._auto_blockages(k)
            self._blockage_onsets(k)
            rate[k], sinr[k], serving[k] = self._slot_rates()
        return MetricsTrace(np.arange(sch.n_slots) * sch.slot, self.ue_ids[self.tracked], rate, sinr, serving,
                            action, decisions, self.events, self.U, self.S, cfg.seed, cfg.policy.value)


def run(config: ScenarioConfig, deployment: Deployment | None = None) -> MetricsTrace:
    return Simulation(config, deployment).run()


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunSummary:
    seed: int
    n_ue: int
    n_scell: int
    n_samples: int
    mean_rate: float
    r_var: float
    jain: float
    handovers: int
    beam_switches: int
    fallback_fraction: float
    zero_fraction: float
    rate_sum: float
    rate_sumsq: float


def summarize(trace: MetricsTrace) -> RunSummary:
    n = trace.n_samples
    if n == 0:
        return RunSummary(trace.seed, trace.n_ue, trace.n_scell, 0, math.nan, math.nan, math.nan,
                          0, 0, math.nan, math.nan, 0.0, 0.0)
    st = trace.stability()
    return RunSummary(trace.seed, trace.n_ue, trace.n_scell, n, st.mean_rate,
                      st.r_var, jain_index(trace.per_ue_mean), trace.count(Action.HANDOVER),
                      trace.count(Action.BEAM_SWITCH), float(np.mean(trace.serving == SERVE_LTE)),
                      float(np.mean(trace.rate == 0)), float(np.sum(trace.rate)),
                      float(np.sum(trace.rate ** 2)))


@dataclass(frozen=True)
class AggregateReport:
    config_hash: str
    seeds: tuple[int, ...]
    runs: tuple[RunSummary, ...]

    def stat(self, name: str) -> tuple[float, float]:
        return mean_stderr([getattr(r, name) for r in self.runs])

    @property
    def n_samples(self) -> int:
        return sum(r.n_samples for r in self.runs)

    @property
    def pooled_mean_rate(self) -> float:
        n = self.n_samples
        return sum(r.rate_sum for r in self.runs) / n if n else math.nan

    @property
    def pooled_r_var(self) -> float:
        """Std over mean of every UE-slot sample of every run."""
        n = self.n_samples
        if n == 0:
            return math.nan
        m = self.pooled_mean_rate
        if m <= 0:
            return math.nan
        var = max(0.0, sum(r.rate_sumsq for r in self.runs) / n - m * m)
        return math.sqrt(var) / m

    def to_dict(self) -> dict:
        out = {"config_hash": self.config_hash, "seeds": list(self.seeds),
               "pooled_mean_rate": self.pooled_mean_rate, "pooled_r_var": self.pooled_r_var}
        for name in ("mean_rate", "r_var", "jain", "handovers", "beam_switches", "fallback_fraction"):
            m, s = self.stat(name)
            out[name] = {"mean": m, "stderr": s}
        out["runs"] = [r.__dict__ for r in self.runs]
        return out


def _run_summary(config: ScenarioConfig) -> RunSummary:
    return summarize(run(config))


def run_seeds(config: ScenarioConfig, seeds: Sequence[int], workers: int = 1) -> AggregateReport:
    cfgs = [config.with_(seed=int(s)) for s in seeds]
    if workers > 1 and len(cfgs) > 1:
        with ProcessPoolExecutor(workers) as ex:
            runs = list(ex.map(_run_summary, cfgs))
    else:
        runs = [_run_summary(c) for c in cfgs]
    return AggregateReport(config.config_hash(), tuple(int(s) for s in seeds), tuple(runs))


def run_montecarlo(config: ScenarioConfig, n_seeds: int, workers: int = 1) -> AggregateReport:
    """Independent runs on seeds derived from ``config.seed``."""
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    return run_seeds(config, derive_seeds(config.seed, n_seeds), workers)
