import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mmwave_mc.controller import (IA_SEQUENCE, Action, Association, IaEvent, IaSession, IaState, RtHistory, Serving,
                                  assemble_crt, backup_beam, backup_candidates, decide_action, decide_attachment,
                                  detect_rlf, ia_step, run_initial_access)
from mmwave_mc.scenario import AttachmentPolicy, Mode, ScenarioConfig
from mmwave_mc.sweep import ReportTable, RtEntry


def crt_from(sinr: dict, t=0.0, ues=None):
    """Build a CRT from ``{scell: {ue: sinr_db}}``."""
    rts = [ReportTable(s, t, {u: RtEntry(v, 0, 0) for u, v in row.items()}) for s, row in sinr.items()]
    return assemble_crt(rts, ue_ids=ues)


# ---------------------------------------------------------------------------
# CRT assembly
# ---------------------------------------------------------------------------

def test_assemble_crt_union_and_empty_rows():
    crt = crt_from({1: {0: 5.0}, 2: {0: 7.0, 3: 1.0}}, ues=[0, 3, 4])
    assert crt.ue_ids == (0, 3, 4) and crt.scell_ids == (1, 2)
    assert crt.rows[4] == {}
    m = crt.sinr_matrix()
    assert m[0].tolist() == [5.0, 7.0]
    assert m[1, 0] == -np.inf and m[2].tolist() == [-np.inf, -np.inf]


def test_assemble_crt_rejects_duplicates_and_mixed_epochs():
    rt = ReportTable(1, 0.0, {0: RtEntry(1.0, 0, 0)})
    with pytest.raises(ValueError):
        assemble_crt([rt, rt])
    with pytest.raises(ValueError):
        assemble_crt([rt, ReportTable(2, 0.1, {})])


# ---------------------------------------------------------------------------
# attachment
# ---------------------------------------------------------------------------

def greedy_oracle(matrix, policy, w):
    """Plain-loop reference of the attachment rule on a dense matrix (NaN = absent)."""
    n_ue, n_sc = matrix.shape
    loads = [0] * n_sc
    out = []
    for i in range(n_ue):
        best, best_score = None, -math.inf
        for j in range(n_sc):
            if math.isnan(matrix[i, j]):
                continue
            if policy is AttachmentPolicy.MAX_SINR:
                score = matrix[i, j]
            else:
                score = w / (loads[j] + 1) * math.log2(1 + 10 ** (matrix[i, j] / 10))
            if score > best_score:
                best, best_score = j, score
        if best is not None:
            loads[best] += 1
        out.append(best)
    return out


@given(st.integers(0, 2**32 - 1), st.sampled_from(list(AttachmentPolicy)))
def test_attachment_matches_greedy_oracle(seed, policy):
    rng = np.random.default_rng(seed)
    n_ue, n_sc = int(rng.integers(1, 8)), int(rng.integers(1, 5))
    m = rng.uniform(-5, 40, (n_ue, n_sc))
    m[rng.random((n_ue, n_sc)) < 0.3] = np.nan
    crt = crt_from({j: {i: m[i, j] for i in range(n_ue) if not np.isnan(m[i, j])} for j in range(n_sc)},
                   ues=range(n_ue))
    cfg = ScenarioConfig()
    got = decide_attachment(crt, policy, None, cfg)
    want = greedy_oracle(m, policy, cfg.w_mmw)
    for a, w in zip(got, want):
        if w is None:
            assert a.serving is Serving.LTE_FALLBACK
        else:
            assert a.serving is Serving.SCELL and a.scell == w


def test_max_rate_spreads_load_that_max_sinr_piles_up():
    # both UEs see SCell 0 best, but sharing it halves the rate
    crt = crt_from({0: {0: 30.0, 1: 30.0}, 1: {0: 25.0, 1: 25.0}})
    cfg = ScenarioConfig()
    assert [a.scell for a in decide_attachment(crt, AttachmentPolicy.MAX_SINR, None, cfg)] == [0, 0]
    assert [a.scell for a in decide_attachment(crt, AttachmentPolicy.MAX_RATE, None, cfg)] == [0, 1]


def test_attachment_ties_go_to_lowest_scell_and_standalone_leaves_unconnected():
    cfg = ScenarioConfig()
    crt = crt_from({3: {0: 10.0}, 1: {0: 10.0}}, ues=[0, 1])
    a = decide_attachment(crt, AttachmentPolicy.MAX_SINR, None, cfg)
    assert a[0].scell == 1
    assert a[1].serving is Serving.LTE_FALLBACK
    sa = decide_attachment(crt, AttachmentPolicy.MAX_SINR, None, cfg.with_(mode=Mode.STANDALONE))
    assert sa[1].serving is Serving.UNCONNECTED


def test_hysteresis_keeps_previous_scell_within_margin():
    cfg = ScenarioConfig(hysteresis_db=3.0)
    crt = crt_from({0: {0: 10.0}, 1: {0: 12.0}})
    prev = {0: Association(0, Serving.SCELL, 0, 0, 0)}
    assert decide_attachment(crt, AttachmentPolicy.MAX_SINR, None, cfg, prev)[0].scell == 0
    crt = crt_from({0: {0: 10.0}, 1: {0: 14.0}})
    assert decide_attachment(crt, AttachmentPolicy.MAX_SINR, None, cfg, prev)[0].scell == 1


def test_decide_action_table():
    sc = lambda s, d=(0, 0): Association(0, Serving.SCELL, s, *d)
    lte = Association(0, Serving.LTE_FALLBACK)
    assert decide_action(sc(1), sc(1)) is Action.NOOP
    assert decide_action(sc(1), sc(1, (1, 0))) is Action.BEAM_SWITCH
    assert decide_action(sc(1), sc(2)) is Action.HANDOVER
    assert decide_action(sc(1), lte) is Action.FALLBACK_LTE
    assert decide_action(lte, sc(1)) is Action.RECONNECT
    assert decide_action(lte, lte) is Action.NOOP
    assert decide_action(None, sc(1)) is Action.RECONNECT
    with pytest.raises(ValueError):
        decide_action(sc(1), Association(5, Serving.SCELL, 1, 0, 0))


# ---------------------------------------------------------------------------
# initial access
# ---------------------------------------------------------------------------

def test_initial_access_walks_the_full_sequence():
    a = Association(4, Serving.SCELL, 2, 1, 3)
    s = run_initial_access(4, AttachmentPolicy.MAX_RATE, a)
    assert s.state is IaState.CONNECTED
    assert s.history == IA_SEQUENCE
    assert s.assignment == a and s.errors == ()


def test_initial_access_without_scell_stops_after_forwarding():
    s = run_initial_access(4, AttachmentPolicy.MAX_SINR, Association(4, Serving.LTE_FALLBACK))
    assert s.state is IaState.RT_FORWARDED
    assert s.assignment is None


def test_out_of_order_events_are_rejected():
    s = ia_step(IaSession(0), IaEvent.RAR)
    assert s.state is IaState.IDLE and len(s.errors) == 1
    s = IaSession(0, state=IaState.RT_FORWARDED)
    bad = ia_step(s, IaEvent.DIRECTIONS, Association(9, Serving.SCELL, 1, 0, 0))
    assert bad.state is IaState.RT_FORWARDED and bad.errors


# ---------------------------------------------------------------------------
# radio-link failure
# ---------------------------------------------------------------------------

def test_detect_rlf_is_strict():
    cfg = ScenarioConfig()
    assert not detect_rlf(cfg.gamma_out_db, cfg)
    assert detect_rlf(cfg.gamma_out_db - 1e-9, cfg)


def test_history_ring_buffer():
    h = RtHistory(2)
    for t in (0.0, 0.1, 0.2):
        h.push(crt_from({0: {0: t}}, t=t))
    assert [r[0] for r in h.rows(0)] == [0.1, 0.2]
    assert h.latest(0)[1][0].sinr_db == 0.2
    assert h.latest(7) is None
    with pytest.raises(ValueError):
        h.push(crt_from({0: {0: 1.0}}, t=0.05))
    with pytest.raises(ValueError):
        RtHistory(0)


def _entry(dirs, best_sc=0):
    dirs = np.asarray(dirs, dtype=float)
    d = int(np.argmax(dirs))
    return RtEntry(float(dirs[d]), d, best_sc, dirs, np.full(len(dirs), best_sc))


@given(st.lists(st.lists(st.floats(-20, 40), min_size=3, max_size=3), min_size=1, max_size=4),
       st.integers(0, 2), st.booleans())
def test_backup_beam_matches_sorted_filter(rows, blocked_d, cross):
    cfg = ScenarioConfig()
    row = {s: _entry(r, best_sc=s) for s, r in enumerate(rows)}
    h = RtHistory()
    h.push(assemble_crt([ReportTable(s, 0.0, {0: e}) for s, e in row.items()]))
    got = backup_beam(h, 0, (0, blocked_d, 0), cfg, cross_cell=cross)
    cands = [(v, s, d) for s, r in enumerate(rows) for d, v in enumerate(r)
             if d != blocked_d and v >= cfg.gamma_out_db]
    same = [c for c in cands if c[1] == 0]
    pool = same or (cands if cross else [])
    if not pool:
        assert got is None
        return
    v, s, d = sorted(pool, key=lambda c: (-c[0], c[1], c[2]))[0]
    assert (got.scell, got.d_ue, got.sinr_db) == (s, d, v)
    assert got.d_ue != blocked_d


def test_backup_candidates_without_direction_detail():
    row = {0: RtEntry(5.0, 1, 2), 1: RtEntry(4.0, 0, 0)}
    assert [(c.scell, c.d_ue) for c in backup_candidates(row, 1)] == [(1, 0)]
