import math

import numpy as np
import pytest

from mmwave_mc.controller import Action
from mmwave_mc.engine import (SERVE_BACKUP, SERVE_BLOCKED, SERVE_LTE, SERVE_MMWAVE, SERVE_NONE, EventSchedule,
                              Simulation, derive_seeds, read_trace_rates, run, run_montecarlo, summarize)
from mmwave_mc.scenario import AttachmentPolicy, Mode, ScenarioConfig

SMALL = dict(t_sim=0.6, slot=0.01, t_h=0.1, t_rt=0.2, area_radius=150.0, scell_density=70.0)


def small(**kw):
    return ScenarioConfig(**(SMALL | kw))


def test_runs_are_deterministic():
    a = run(small(seed=3))
    b = run(small(seed=3))
    assert np.array_equal(a.rate, b.rate)
    assert np.array_equal(a.serving, b.serving)
    assert a.decisions == b.decisions
    assert not np.array_equal(a.rate, run(small(seed=4)).rate)


def test_trace_shapes_and_codes():
    tr = run(small(seed=1))
    assert tr.rate.shape == (60, tr.n_ue) == tr.serving.shape
    assert np.all(tr.rate >= 0)
    assert set(np.unique(tr.serving)) <= {SERVE_MMWAVE, SERVE_LTE}
    assert np.all(np.isnan(tr.sinr[tr.serving == SERVE_LTE]))
    assert tr.count(Action.RECONNECT) == 0  # first decisions are not counted


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_multi_connectivity_dominates_standalone_slot_by_slot(seed):
    mc = run(small(seed=seed))
    sa = run(small(seed=seed, mode=Mode.STANDALONE))
    assert np.all(mc.rate >= sa.rate)
    on_mm = sa.serving == SERVE_MMWAVE
    assert np.array_equal(mc.rate[on_mm], sa.rate[on_mm])
    assert not np.any(sa.serving == SERVE_LTE)
    assert np.all(sa.rate[sa.serving == SERVE_NONE] == 0)


def test_max_rate_policy_runs_and_logs_policy():
    tr = run(small(seed=2, policy=AttachmentPolicy.MAX_RATE))
    assert tr.policy == "max_rate"
    assert all(d[-1] == "max_rate" for d in tr.decisions)


def test_blockage_without_backup_zeroes_exactly_the_blocked_slots():
    base = small(seed=5, t_h=0.2, blockage_duration=0.05, blockage_confined=True)
    clear = run(base)
    ob = run(base.with_(blockage_enabled=True, backup_enabled=False))
    wb = run(base.with_(blockage_enabled=True, backup_enabled=True))
    blocked = ob.serving == SERVE_BLOCKED
    assert blocked.any()
    assert np.all(ob.rate[blocked] == 0)
    assert np.array_equal(ob.rate[~blocked], clear.rate[~blocked])
    # the backup trace differs only on the blocked slots, where it never does worse
    assert np.array_equal(wb.rate[~blocked], clear.rate[~blocked])
    assert np.all(wb.rate[blocked] >= 0)
    assert np.any(wb.serving == SERVE_BACKUP)
    assert len(ob.blockages) == len(wb.blockages) > 0
    assert all(ev.rlf_detected for ev in ob.blockages)


def test_inject_blockage_rules():
    sim = Simulation(small(seed=0))
    assert sim.inject_blockage(0, 0.1, 0.0) is None
    ev = sim.inject_blockage(0, 0.1, 0.05)
    assert (ev.start_tick, ev.end_tick) == (10, 15)
    assert ev.t_end == pytest.approx(0.15)
    with pytest.raises(ValueError):
        sim.inject_blockage(0, 0.12, 0.05)
    sim.inject_blockage(0, 0.15, 0.05)
    with pytest.raises(ValueError):
        sim.inject_blockage(1, 0.3, -1.0)


def test_injected_blockage_hits_serving_pair():
    sim = Simulation(small(seed=0))
    u = 0
    sim.inject_blockage(u, 0.02, 0.05)
    tr = sim.run()
    ev = tr.blockages[0] if tr.blockages else None
    if ev is None:
        # the UE was not on an SCell at onset; nothing to block
        assert np.all(tr.serving[:, u] != SERVE_BLOCKED)
        return
    assert np.all(np.isin(tr.serving[2:7, u], (SERVE_BLOCKED, SERVE_BACKUP, SERVE_LTE)))


def test_zero_density_runs_with_no_samples():
    tr = run(small(scell_density=0.0))
    assert tr.n_samples == 0
    s = summarize(tr)
    assert s.n_samples == 0 and math.isnan(s.mean_rate)


def test_simulation_runs_once():
    sim = Simulation(small())
    sim.run()
    with pytest.raises(RuntimeError):
        sim.run()


def test_schedule_rejects_misaligned_timers():
    with pytest.raises(ValueError):
        EventSchedule.from_config(small(t_h=0.015))


def test_trace_csv_reproduces_mean_rate(tmp_path):
    tr = run(small(seed=7))
    tr.write_csv(tmp_path / "t.csv")
    tr.write_decisions(tmp_path / "d.csv")
    rates = read_trace_rates(tmp_path / "t.csv")
    assert rates.size == tr.n_samples
    assert rates.mean() == tr.mean_rate
    assert (tmp_path / "d.csv").read_text().startswith("t,ue,action")


def test_monte_carlo_aggregate():
    agg = run_montecarlo(small(seed=11), 3)
    assert agg.seeds == tuple(derive_seeds(11, 3))
    assert len(set(agg.seeds)) == 3
    m, se = agg.stat("mean_rate")
    assert m > 0 and se >= 0
    pooled = np.concatenate([run(small(seed=s)).rate.ravel() for s in agg.seeds])
    assert agg.pooled_mean_rate == pytest.approx(pooled.mean(), rel=1e-12)
    assert agg.pooled_r_var == pytest.approx(pooled.std() / pooled.mean(), rel=1e-9)
    with pytest.raises(ValueError):
        run_montecarlo(small(), 0)
