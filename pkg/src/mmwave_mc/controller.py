"""MCell logic: report-table assembly, attachment decisions, initial access and RLF recovery."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .scenario import AttachmentPolicy, Mode
from .sweep import ReportTable, RtEntry


# ---------------------------------------------------------------------------
# complete report table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompleteReportTable:
    """``rows[ue][scell]`` holds the entry reported by ``scell`` for ``ue``; absent pairs are missing."""

    timestamp: float
    ue_ids: tuple[int, ...]
    scell_ids: tuple[int, ...]
    rows: Mapping[int, Mapping[int, RtEntry]]

    def entry(self, ue: int, scell: int) -> RtEntry | None:
        return self.rows.get(ue, {}).get(scell)

    def sinr_matrix(self) -> np.ndarray:
        """``(n_ue, n_scell)`` SINR in dB, ``-inf`` where absent."""
        out = np.full((len(self.ue_ids), len(self.scell_ids)), -np.inf)
        col = {s: j for j, s in enumerate(self.scell_ids)}
        for i, ue in enumerate(self.ue_ids):
            for s, e in self.rows.get(ue, {}).items():
                out[i, col[s]] = e.sinr_db
        return out


def assemble_crt(rts: Sequence[ReportTable], ue_ids: Iterable[int] | None = None,
                 scell_ids: Iterable[int] | None = None, timestamp: float | None = None) -> CompleteReportTable:
    """Union of per-SCell report tables of one sweep epoch.

    Every UE in ``ue_ids`` gets a row (possibly empty).  A ``(ue, scell)`` pair
    reported twice is a protocol violation.
    """
    rows: dict[int, dict[int, RtEntry]] = {}
    stamps = {rt.timestamp for rt in rts}
    if len(stamps) > 1:
        raise ValueError(f"report tables span several epochs: {sorted(stamps)}")
    seen_scells = []
    for rt in rts:
        seen_scells.append(rt.scell_id)
        for ue, entry in rt.entries.items():
            row = rows.setdefault(ue, {})
            if rt.scell_id in row:
                raise ValueError(f"duplicate report for ue {ue} at scell {rt.scell_id}")
            row[rt.scell_id] = entry
    ues = sorted(set(rows) | set(ue_ids or ()))
    scells = sorted(set(seen_scells) | set(scell_ids or ()))
    for ue in ues:
        rows.setdefault(ue, {})
    if timestamp is None:
        timestamp = stamps.pop() if stamps else 0.0
    return CompleteReportTable(timestamp, tuple(ues), tuple(scells), rows)


# ---------------------------------------------------------------------------
# associations and decisions
# ---------------------------------------------------------------------------

class Serving(Enum):
    SCELL = "scell"
    LTE_FALLBACK = "lte_fallback"
    UNCONNECTED = "unconnected"


@dataclass(frozen=True)
class Association:
    ue: int
    serving: Serving
    scell: int | None = None
    d_ue: int | None = None
    d_scell: int | None = None
    since: float = 0.0

    @property
    def pair(self) -> tuple[int, int] | None:
        return None if self.d_ue is None else (self.d_ue, self.d_scell)


class Action(Enum):
    NOOP = "noop"
    BEAM_SWITCH = "beam_switch"
    HANDOVER = "handover"
    FALLBACK_LTE = "fallback_lte"
    RECONNECT = "reconnect"


def _mmwave_rate(sinr_db: float, users: int, bandwidth: float) -> float:
    return bandwidth / users * math.log2(1.0 + 10.0 ** (sinr_db / 10.0))


def decide_attachment(crt: CompleteReportTable, policy: AttachmentPolicy, loads: Mapping[int, int] | None,
                      config, previous: Mapping[int, Association] | None = None) -> list[Association]:
    """One association per CRT row.

    ``MAX_SINR`` takes the row argmax.  ``MAX_RATE`` takes the argmax of
    ``W / (load + 1) * log2(1 + sinr)``, visiting UEs in id order and adding
    each decision to the loads.  Ties go to the lowest SCell id.  With
    ``config.hysteresis_db > 0`` a UE keeps its previous SCell unless the
    winner beats it by the margin.  Rows without entries map to LTE fallback
    in multi-connectivity mode and to ``UNCONNECTED`` in standalone mode.
    """
    loads = {s: 0 for s in crt.scell_ids} | dict(loads or {})
    out = []
    hyst = getattr(config, "hysteresis_db", 0.0)
    for ue in crt.ue_ids:
        row = crt.rows.get(ue, {})
        if not row:
            kind = Serving.LTE_FALLBACK if config.mode is Mode.MULTI_CONNECTIVITY else Serving.UNCONNECTED
            out.append(Association(ue, kind, since=crt.timestamp))
            continue
        cands = sorted(row)
        if policy is AttachmentPolicy.MAX_SINR:
            score = {s: row[s].sinr_db for s in cands}
        elif policy is AttachmentPolicy.MAX_RATE:
            score = {s: _mmwave_rate(row[s].sinr_db, loads.get(s, 0) + 1, config.w_mmw) for s in cands}
        else:
            raise ValueError(f"unknown policy {policy}")
        best = cands[0]
        for s in cands[1:]:
            if score[s] > score[best]:
                best = s
        prev = previous.get(ue) if previous else None
        if hyst > 0 and prev is not None and prev.serving is Serving.SCELL and prev.scell in row \
                and prev.scell != best and row[best].sinr_db < row[prev.scell].sinr_db + hyst:
            best = prev.scell
        e = row[best]
        loads[best] = loads.get(best, 0) + 1
        out.append(Association(ue, Serving.SCELL, best, e.d_ue, e.d_scell, crt.timestamp))
    return out


def decide_action(prev: Association | None, new: Association) -> Action:
    if prev is None:
        return Action.RECONNECT if new.serving is Serving.SCELL else Action.NOOP
    if prev.ue != new.ue:
        raise ValueError("associations refer to different UEs")
    p_sc = prev.serving is Serving.SCELL
    n_sc = new.serving is Serving.SCELL
    if p_sc and n_sc:
        if prev.scell != new.scell:
            return Action.HANDOVER
        return Action.NOOP if prev.pair == new.pair else Action.BEAM_SWITCH
    if p_sc and not n_sc:
        return Action.FALLBACK_LTE
    if n_sc:
        return Action.RECONNECT
    return Action.NOOP


# ---------------------------------------------------------------------------
# initial access
# ---------------------------------------------------------------------------

class IaState(Enum):
    IDLE = "idle"
    LTE_SYNCED = "lte_synced"
    RAP_SWEEPING = "rap_sweeping"
    RT_FORWARDED = "rt_forwarded"
    DIRECTIONS_ASSIGNED = "directions_assigned"
    RAR_RECEIVED = "rar_received"
    CONNECTED = "connected"


class IaEvent(Enum):
    LTE_SYNC_DONE = "lte_sync_done"      # step 0
    RAP_SWEEP_START = "rap_sweep_start"  # step 1
    RT_FORWARD = "rt_forward"            # step 2
    DIRECTIONS = "directions"            # steps 3a/3b
    RAR = "rar"                          # step 4
    CRM_SENT = "crm_sent"                # step 5


IA_SEQUENCE = (IaState.IDLE, IaState.LTE_SYNCED, IaState.RAP_SWEEPING, IaState.RT_FORWARDED,
               IaState.DIRECTIONS_ASSIGNED, IaState.RAR_RECEIVED, IaState.CONNECTED)

_IA_TRANSITIONS = {
    (IaState.IDLE, IaEvent.LTE_SYNC_DONE): IaState.LTE_SYNCED,
    (IaState.LTE_SYNCED, IaEvent.RAP_SWEEP_START): IaState.RAP_SWEEPING,
    (IaState.RAP_SWEEPING, IaEvent.RT_FORWARD): IaState.RT_FORWARDED,
    (IaState.RT_FORWARDED, IaEvent.DIRECTIONS): IaState.DIRECTIONS_ASSIGNED,
    (IaState.DIRECTIONS_ASSIGNED, IaEvent.RAR): IaState.RAR_RECEIVED,
    (IaState.RAR_RECEIVED, IaEvent.CRM_SENT): IaState.CONNECTED,
}


@dataclass(frozen=True)
class IaSession:
    ue: int
    policy: AttachmentPolicy = AttachmentPolicy.MAX_SINR
    state: IaState = IaState.IDLE
    assignment: Association | None = None
    history: tuple[IaState, ...] = (IaState.IDLE,)
    errors: tuple[str, ...] = ()


def ia_step(session: IaSession, event: IaEvent, assignment: Association | None = None) -> IaSession:
    """Advance one step of the initial-access handshake.

    ``DIRECTIONS`` must carry the MCell's decision as ``assignment``.  An
    out-of-order event leaves the state unchanged and records an error.
    """
    nxt = _IA_TRANSITIONS.get((session.state, event))
    if nxt is None:
        msg = f"event {event.value} illegal in state {session.state.value}"
        return replace(session, errors=session.errors + (msg,))
    if event is IaEvent.DIRECTIONS:
        if assignment is None or assignment.serving is not Serving.SCELL or assignment.ue != session.ue:
            msg = "directions event needs an SCell assignment for this UE"
            return replace(session, errors=session.errors + (msg,))
        session = replace(session, assignment=assignment)
    return replace(session, state=nxt, history=session.history + (nxt,))


def run_initial_access(ue: int, policy: AttachmentPolicy, assignment: Association) -> IaSession:
    """Drive a session through the full handshake; stops after the RT is forwarded if no SCell was granted."""
    s = IaSession(ue, policy)
    for ev in (IaEvent.LTE_SYNC_DONE, IaEvent.RAP_SWEEP_START, IaEvent.RT_FORWARD):
        s = ia_step(s, ev)
    if assignment.serving is not Serving.SCELL:
        return s
    s = ia_step(s, IaEvent.DIRECTIONS, assignment)
    s = ia_step(s, IaEvent.RAR)
    return ia_step(s, IaEvent.CRM_SENT)


# ---------------------------------------------------------------------------
# radio-link failure
# ---------------------------------------------------------------------------

def detect_rlf(current_sinr_db: float, config) -> bool:
    return current_sinr_db < config.gamma_out_db


class RtHistory:
    """Per-UE ring buffer of the last ``k`` CRT rows, oldest first."""

    def __init__(self, k: int = 2):
        if k < 1:
            raise ValueError("history length must be >= 1")
        self.k = k
        self._rows: dict[int, deque] = {}

    def push(self, crt: CompleteReportTable, ues: Iterable[int] | None = None) -> None:
        for ue in (crt.ue_ids if ues is None else ues):
            buf = self._rows.setdefault(ue, deque(maxlen=self.k))
            if buf and buf[-1][0] > crt.timestamp:
                raise ValueError("history entries must be time-ordered")
            buf.append((crt.timestamp, dict(crt.rows.get(ue, {}))))

    def latest(self, ue: int) -> tuple[float, dict[int, RtEntry]] | None:
        buf = self._rows.get(ue)
        return buf[-1] if buf else None

    def rows(self, ue: int) -> list[tuple[float, dict[int, RtEntry]]]:
        return list(self._rows.get(ue, ()))


@dataclass(frozen=True)
class BackupPair:
    scell: int
    d_ue: int
    d_scell: int
    sinr_db: float


def backup_candidates(row: Mapping[int, RtEntry], blocked_d_ue: int) -> list[BackupPair]:
    """Every per-direction alternative of a CRT row with a UE direction other than the blocked one."""
    out = []
    for scell, e in row.items():
        if e.dir_sinr_db is None:
            if e.d_ue != blocked_d_ue:
                out.append(BackupPair(scell, e.d_ue, e.d_scell, e.sinr_db))
            continue
        for d in range(len(e.dir_sinr_db)):
            if d != blocked_d_ue:
                out.append(BackupPair(scell, d, int(e.dir_scell[d]), float(e.dir_sinr_db[d])))
    return out


def backup_beam(history: RtHistory, ue: int, blocked: tuple[int, int, int], config=None,
                cross_cell: bool | None = None) -> BackupPair | None:
    """Best pair from the latest CRT row whose UE direction differs from the blocked one.

    ``blocked`` is ``(scell, d_ue, d_scell)``.  Pairs on the serving SCell are
    preferred; other SCells are considered only when ``cross_cell`` (default
    taken from ``config.cross_cell_backup``) and the serving SCell offers
    nothing at or above ``gamma_out_db``.  Ties go to the lowest
    ``(scell, d_ue)``.
    """
    latest = history.latest(ue)
    if latest is None:
        return None
    gamma = config.gamma_out_db if config is not None else -math.inf
    if cross_cell is None:
        cross_cell = getattr(config, "cross_cell_backup", True)
    scell, d_ue, _ = blocked
    cands = [c for c in backup_candidates(latest[1], d_ue) if c.sinr_db >= gamma]
    key = lambda c: (-c.sinr_db, c.scell, c.d_ue)
    same = sorted((c for c in cands if c.scell == scell), key=key)
    if same:
        return same[0]
    if not cross_cell:
        return None
    other = sorted((c for c in cands if c.scell != scell), key=key)
    return other[0] if other else None
