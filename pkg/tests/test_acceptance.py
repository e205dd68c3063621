"""End-to-end acceptance checks; each test prints one PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from mmwave_mc import channel as ch
from mmwave_mc.channel import PathlossState
from mmwave_mc.cli import main
from mmwave_mc.metrics import jain_index, theoretical_rate_gain
from mmwave_mc.presets import PRESETS, mode_comparison, rate_table_result, run_preset, stability_result
from mmwave_mc.sweep import run_sweep

from test_sweep import exhaustive_entry, random_instance


def _summary(result) -> str:
    failed = [c.line() for c in result.checks if not c.passed]
    return "; ".join(failed) if failed else f"{len(result.checks)} checks"


def test_sweep_delay_table(record):
    t0 = time.perf_counter()
    res = run_preset("delay_table")
    dt = time.perf_counter() - t0
    got = {r["scheme"]: r["delay_ms"] for r in res.rows}
    ok = got == {"analog": 25.6, "ul_digital": 1.6, "dl_digital": 3.2} and dt < 1.0
    assert record("delay table 25.6/1.6/3.2 ms", ok, f"{got}, {dt:.3f} s")


def test_blockage_rate_gain(record):
    t0 = time.perf_counter()
    res = run_preset("rlf_gain")
    dt = time.perf_counter() - t0
    worst = max(r["relative_error"] for r in res.rows)
    fewest = min(r["events"] for r in res.rows)
    ok = res.passed and dt < 120.0 and len(res.rows) == 9
    assert record("backup-beam rate gain matches closed form", ok,
                  f"max rel err {worst:.4f}, min events {fewest}, {dt:.0f} s; {_summary(res)}")


@pytest.fixture(scope="module")
def comparison():
    t0 = time.perf_counter()
    out = mode_comparison({}, PRESETS["rate_table"].default_seeds, 0, 1)
    return out, time.perf_counter() - t0


def test_multi_connectivity_rate(record, comparison):
    (base, seeds, comps), dt = comparison
    res = rate_table_result(base, seeds, comps)
    ok = res.passed and len(seeds) == 20 and dt < 300.0
    gaps = " ".join(f"{r['relative_gap']:.4f}" for r in res.rows)
    assert record("multi-connectivity rate >= standalone", ok, f"gaps {gaps}, {dt:.0f} s; {_summary(res)}")


def test_multi_connectivity_stability(record, comparison):
    (base, seeds, comps), dt = comparison
    res = stability_result(base, seeds, comps)
    ok = res.passed and dt < 300.0
    gaps = " ".join(f"{r['r_var_gap']:.4f}" for r in res.rows)
    assert record("multi-connectivity r_var <= standalone, gap shrinking", ok, f"gaps {gaps}; {_summary(res)}")


def test_handover_trends(record):
    t0 = time.perf_counter()
    trt = run_preset("handover_rate_vs_trt")
    dens = run_preset("handover_rate_vs_density")
    dt = time.perf_counter() - t0
    valid = all(r["t_rt"] >= r["t_h"] for r in trt.rows + dens.rows)
    ok = trt.passed and dens.passed and valid
    assert record("handover rate trends in t_rt, t_h and M", ok,
                  f"{len(trt.rows)}+{len(dens.rows)} points, {dt:.0f} s; {_summary(trt)}; {_summary(dens)}")


def test_initial_access_fairness(record):
    res = run_preset("ia_fairness")
    rate = " ".join(f"{r['jain']:.3f}" for r in res.rows if r["policy"] == "max_rate")
    sinr = " ".join(f"{r['jain']:.3f}" for r in res.rows if r["policy"] == "max_sinr")
    ok = res.passed and res.config.track_radius == 70.0
    assert record("max-rate access at least as fair as max-SINR", ok,
                  f"max_rate {rate} | max_sinr {sinr}; {_summary(res)}")


def test_formula_units(record):
    failures = []
    # sweep vs exhaustive search
    rng = np.random.default_rng(99)
    for _ in range(200):
        cfg, links, ue_cb, sc_cb = random_instance(rng)
        rt = run_sweep(0, links, (ue_cb, sc_cb), cfg)
        for ue, link in links.items():
            want = exhaustive_entry(link, ue_cb, sc_cb, cfg)
            got = rt.entries.get(ue)
            if (want is None) != (got is None) or (got is not None and (
                    abs(got.sinr_db - want.max()) > 1e-6 or abs(want[got.d_ue, got.d_scell] - want.max()) > 1e-6)):
                failures.append(f"sweep ue {ue}")
    # rank-1 beamforming gain
    for dims, ue_dims in (((8, 8), (4, 4)), ((4, 4), (2, 2)), ((3, 5), (1, 2))):
        for _ in range(20):
            a_tx, a_rx = rng.uniform(0, 2 * math.pi, 2)
            H = np.outer(ch.array_response(ue_dims, a_rx), ch.array_response(dims, a_tx).conj())
            g = ch.bf_gain(H, ch.steering_vector(dims, a_tx), ch.steering_vector(ue_dims, a_rx))
            if abs(g - dims[0] * dims[1] * ue_dims[0] * ue_dims[1]) > 1e-9:
                failures.append(f"bf gain {dims}x{ue_dims}")
    # fairness index
    for rates, want in (([2.0] * 5, 1.0), ([1.0, 0, 0, 0], 0.25), ([1.0, 2.0, 3.0], 6 / 7)):
        if abs(jain_index(rates) - want) > 1e-12:
            failures.append(f"jain {rates}")
    # LTE link
    if not np.all(np.asarray(ch.lte_plos(np.array([1e-4, 0.001, 0.01, 0.018]))) == 1.0):
        failures.append("lte_plos near field")
    if abs(ch.lte_pathloss_db(PathlossState.LOS, 1.0) - 103.4) > 1e-9:
        failures.append("lte los pathloss")
    if abs(ch.lte_pathloss_db(PathlossState.NLOS, 1.0) - 131.1) > 1e-9:
        failures.append("lte nlos pathloss")
    # blockage gain closed form
    for args, want in (((0.5, 1.0, 0.01, 0.1), 1.0555555555555556), ((1.0, 1.0, 0.05, 0.1), 2.0),
                       ((0.25, 1.0, 0.02, 0.2), 1.0277777777777777)):
        if abs(theoretical_rate_gain(*args).gain - want) > 1e-12:
            failures.append(f"gain {args}")
    assert record("formula unit suite", not failures, ", ".join(failures) or "all formulas match")


DETERMINISM_ARGS = {
    "delay_table": [],
    "energy_table": [],
    "rate_table": ["--seeds", "2", "--set", "t_sim=0.3", "--set", "scell_density=20"],
    "stability_vs_density": ["--seeds", "2", "--set", "t_sim=0.3", "--set", "scell_density=20"],
    "handover_rate_vs_trt": ["--seeds", "2", "--set", "t_sim=0.3", "--set", "t_h=0.1", "--set", "t_rt=0.1"],
    "handover_rate_vs_density": ["--seeds", "2", "--set", "t_sim=0.3", "--set", "t_h=0.1", "--set", "t_rt=0.1",
                                 "--set", "scell_density=20"],
    "ia_fairness": ["--seeds", "2", "--set", "t_sim=0.3", "--set", "scell_density=20"],
    "rlf_gain": ["--seeds", "1", "--set", "t_sim=0.3", "--set", "blockage_duration=0.02", "--set", "t_rt=0.1"],
}


def test_presets_are_byte_identical_across_runs(record, tmp_path):
    assert set(DETERMINISM_ARGS) == set(PRESETS)
    differ = []
    for name, extra in DETERMINISM_ARGS.items():
        outs = []
        for run in ("a", "b"):
            d = tmp_path / name / run
            code = main(["--preset", name, "--out", str(d), *extra])
            assert code in (0, 1), f"{name} exited {code}"
            outs.append(((d / f"{name}.csv").read_bytes(), (d / f"{name}.json").read_bytes()))
        if outs[0] != outs[1]:
            differ.append(name)
    assert record("preset outputs byte-identical across runs", not differ,
                  f"differing: {differ}" if differ else f"{len(DETERMINISM_ARGS)} presets")
