"""Experiment presets: parameter grids, Monte Carlo runs and the checks each experiment supports.

Every preset starts from a base :class:`ScenarioConfig` (the reduced runtime
profile below), applies user overrides, and sweeps its grid axes.  An override
of a grid axis key collapses that axis to the overridden value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from .controller import Serving, run_initial_access
from .engine import AggregateReport, Simulation, derive_seeds, run_seeds
from .metrics import compare_mc_sa, jain_index, mean_stderr, theoretical_rate_gain
from .scenario import AttachmentPolicy, Mode, ScenarioConfig, apply_overrides
from .sweep import delay_table, energy_table

SCHEMA = "mmwave-mc/1"

# Reduced runtime profile shared by the Monte Carlo presets: 10 ms slots, 2 s
# runs, a 250 m disk and every UE tracked.
TREND_BASE = dict(t_sim=2.0, slot=0.01, area_radius=250.0)

DENSITIES = (4.0, 10.0, 20.0, 40.0, 70.0, 90.0)
HANDOVER_T_H = (0.01, 0.05, 0.1)
HANDOVER_T_RT = (0.01, 0.05, 0.1, 0.5, 1.0)
HANDOVER_DENSITIES = (30.0, 50.0, 70.0, 100.0)
HANDOVER_PAIRS = ((0.01, 0.1), (0.01, 0.5), (0.1, 0.1), (0.1, 0.5))
IA_DENSITIES = (10.0, 20.0, 40.0, 70.0, 90.0)
RLF_T_B = (0.01, 0.02, 0.05)
RLF_T_RT = (0.1, 0.2, 0.5)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


@dataclass
class PresetResult:
    """Table rows (one per grid point) plus the JSON report of a preset run."""

    name: str
    columns: list[str]
    rows: list[dict]
    per_point: list[dict]
    checks: list[Check]
    config: ScenarioConfig | None = None
    seeds: tuple[int, ...] = ()
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def report(self) -> dict:
        return {
            "schema": SCHEMA,
            "experiment": self.name,
            "config_hash": None if self.config is None else self.config.config_hash(),
            "config": None if self.config is None else self.config.to_dict(),
            "seeds": list(self.seeds),
            "per_point": self.per_point,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
            **self.extra,
        }


# ---------------------------------------------------------------------------
# trend checks
# ---------------------------------------------------------------------------

def monotone_violations(values, increasing: bool, strict: bool = False) -> list[int]:
    """Indices ``i`` where the pair ``(values[i], values[i + 1])`` breaks the ordering."""
    out = []
    for i in range(len(values) - 1):
        a, b = values[i], values[i + 1]
        if increasing:
            bad = b <= a if strict else b < a
        else:
            bad = b >= a if strict else b > a
        if bad:
            out.append(i)
    return out


def tolerant_monotone(means, stderrs, increasing: bool) -> tuple[bool, str]:
    """At most one adjacent pair may break the ordering, and only by less than one standard error.

    The standard error of a pair is the larger of the two points' errors.
    """
    bad = monotone_violations(means, increasing)
    if not bad:
        return True, "monotone"
    worst = [(i, abs(means[i + 1] - means[i]), max(stderrs[i], stderrs[i + 1])) for i in bad]
    ok = len(bad) <= 1 and all(d <= s for _, d, s in worst)
    desc = ", ".join(f"pair {i}: |diff|={d:.4g} stderr={s:.4g}" for i, d, s in worst)
    return ok, desc


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _axis(overrides: Mapping[str, Any], base: ScenarioConfig, key: str, default) -> tuple:
    return (getattr(base, key),) if key in overrides else tuple(default)


def _seed_list(seed: int, n: int) -> list[int]:
    return derive_seeds(seed, n)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


# ---------------------------------------------------------------------------
# closed-form tables
# ---------------------------------------------------------------------------

def preset_delay_table(overrides, n_seeds, seed, workers) -> PresetResult:
    cfg = apply_overrides(ScenarioConfig(), overrides)
    rows = [dict(r, delay_ms=r["delay_s"] * 1e3) for r in delay_table(cfg)]
    per_point = [{"x": r["scheme"], "mean": r["delay_s"], "stderr": 0.0} for r in rows]
    checks = []
    if not overrides:
        want = {"analog": 25.6, "ul_digital": 1.6, "dl_digital": 3.2}
        for r in rows:
            got = round(r["delay_ms"], 9)
            checks.append(Check(f"delay {r['scheme']}", got == want[r["scheme"]],
                                f"{got} ms (expected {want[r['scheme']]} ms)"))
    return PresetResult("delay_table", ["scheme", "L", "delay_s", "delay_ms"], rows, per_point, checks, cfg)


def preset_energy_table(overrides, n_seeds, seed, workers) -> PresetResult:
    cfg = apply_overrides(ScenarioConfig(), overrides)
    rows = energy_table(cfg)
    per_point = [{"x": f"{r['node']}_{r['scheme']}", "mean": r["energy_j"], "stderr": 0.0} for r in rows]
    ul = {r["node"]: r["energy_j"] for r in rows if r["scheme"] == "ul"}
    dl = {r["node"]: r["energy_j"] for r in rows if r["scheme"] == "dl"}
    checks = [Check("uplink sweep costs more at the SCell", ul["scell"] > dl["scell"],
                    f"ul {ul['scell']:.4g} J, dl {dl['scell']:.4g} J"),
              Check("uplink sweep costs less at the UE", ul["ue"] < dl["ue"],
                    f"ul {ul['ue']:.4g} J, dl {dl['ue']:.4g} J, ratio {dl['ue'] / ul['ue']:.1f}")]
    return PresetResult("energy_table", ["node", "scheme", "power_w", "delay_s", "energy_j"], rows, per_point,
                        checks, cfg)


# ---------------------------------------------------------------------------
# multi-connectivity vs standalone
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModeComparison:
    density: float
    mc: AggregateReport
    sa: AggregateReport

    @property
    def report(self):
        return compare_mc_sa(self.mc, self.sa)


def mode_comparison(overrides, n_seeds, seed, workers) -> tuple[ScenarioConfig, list[int], list[ModeComparison]]:
    if "mode" in overrides:
        raise ValueError("this preset runs both modes; do not override mode")
    base = apply_overrides(ScenarioConfig(**TREND_BASE, t_h=0.1, t_rt=0.3), overrides)
    base.validate()
    seeds = _seed_list(seed, n_seeds)
    out = []
    for m in _axis(overrides, base, "scell_density", DENSITIES):
        cfg = base.with_(scell_density=m)
        mc = run_seeds(cfg.with_(mode=Mode.MULTI_CONNECTIVITY), seeds, workers)
        sa = run_seeds(cfg.with_(mode=Mode.STANDALONE), seeds, workers)
        out.append(ModeComparison(m, mc, sa))
    return base, seeds, out


def rate_table_result(base, seeds, comps: list[ModeComparison]) -> PresetResult:
    rows, per_point = [], []
    for c in comps:
        rep = c.report
        _, mc_s = c.mc.stat("mean_rate")
        _, sa_s = c.sa.stat("mean_rate")
        rows.append({"density": c.density, "mc_mean_rate": rep.mean_rate_mc, "mc_stderr": mc_s,
                     "sa_mean_rate": rep.mean_rate_sa, "sa_stderr": sa_s, "relative_gap": rep.rate_gap,
                     "seeds_mc_ahead": rep.rate_sign["positive"], "mc_fallback_fraction": c.mc.stat("fallback_fraction")[0]})
        per_point.append({"x": {"density": c.density, "mode": "mc"}, "mean": rep.mean_rate_mc, "stderr": mc_s})
        per_point.append({"x": {"density": c.density, "mode": "sa"}, "mean": rep.mean_rate_sa, "stderr": sa_s})
    checks = []
    for r in rows:
        strict = r["density"] <= 10
        ok = r["mc_mean_rate"] > r["sa_mean_rate"] if strict else r["mc_mean_rate"] >= r["sa_mean_rate"]
        checks.append(Check(f"mc {'>' if strict else '>='} sa at M={_fmt(r['density'])}", ok,
                            f"mc {r['mc_mean_rate'] / 1e6:.2f} Mbit/s, sa {r['sa_mean_rate'] / 1e6:.2f} Mbit/s"))
    gaps = [r["relative_gap"] for r in rows]
    bad = monotone_violations(gaps, increasing=False)
    checks.append(Check("relative gap nonincreasing in M", not bad, " ".join(f"{g:.4g}" for g in gaps)))
    return PresetResult("rate_table", list(rows[0]) if rows else [], rows, per_point, checks, base, tuple(seeds))


def stability_result(base, seeds, comps: list[ModeComparison]) -> PresetResult:
    rows, per_point = [], []
    for c in comps:
        rep = c.report
        rows.append({"density": c.density, "mc_r_var": rep.r_var_mc, "sa_r_var": rep.r_var_sa,
                     "r_var_gap": rep.r_var_sa - rep.r_var_mc, "seeds_mc_steadier": rep.r_var_sign["negative"]})
        _, mc_s = c.mc.stat("r_var")
        _, sa_s = c.sa.stat("r_var")
        per_point.append({"x": {"density": c.density, "mode": "mc"}, "mean": rep.r_var_mc, "stderr": mc_s})
        per_point.append({"x": {"density": c.density, "mode": "sa"}, "mean": rep.r_var_sa, "stderr": sa_s})
    checks = [Check(f"r_var mc <= sa at M={_fmt(r['density'])}", r["mc_r_var"] <= r["sa_r_var"],
                    f"mc {r['mc_r_var']:.4f}, sa {r['sa_r_var']:.4f}") for r in rows]
    gaps = [r["r_var_gap"] for r in rows]
    bad = monotone_violations(gaps, increasing=False)
    checks.append(Check("r_var gap shrinking in M", not bad, " ".join(f"{g:.4g}" for g in gaps)))
    return PresetResult("stability_vs_density", list(rows[0]) if rows else [], rows, per_point, checks, base,
                        tuple(seeds))


def preset_rate_table(overrides, n_seeds, seed, workers) -> PresetResult:
    return rate_table_result(*mode_comparison(overrides, n_seeds, seed, workers))


def preset_stability(overrides, n_seeds, seed, workers) -> PresetResult:
    return stability_result(*mode_comparison(overrides, n_seeds, seed, workers))


# ---------------------------------------------------------------------------
# handover and beam tracking
# ---------------------------------------------------------------------------

def _handover_base(overrides) -> ScenarioConfig:
    return apply_overrides(ScenarioConfig(**TREND_BASE, scell_density=70.0), overrides)


def _rate_point(cfg, seeds, workers) -> tuple[float, float]:
    return run_seeds(cfg, seeds, workers).stat("mean_rate")


def preset_handover_trt(overrides, n_seeds, seed, workers) -> PresetResult:
    base = _handover_base(overrides)
    seeds = _seed_list(seed, n_seeds)
    t_hs = _axis(overrides, base, "t_h", HANDOVER_T_H)
    t_rts = _axis(overrides, base, "t_rt", HANDOVER_T_RT)
    rows, per_point, skipped = [], [], []
    for th in t_hs:
        for trt in t_rts:
            cfg = base.with_(t_h=th, t_rt=trt)
            v = cfg.violations("handover")
            if v:
                skipped.append({"t_h": th, "t_rt": trt, "violations": v})
                continue
            m, s = _rate_point(cfg, seeds, workers)
            rows.append({"t_h": th, "t_rt": trt, "density": cfg.scell_density, "mean_rate": m, "stderr": s})
            per_point.append({"x": {"t_h": th, "t_rt": trt}, "mean": m, "stderr": s})
    checks = _handover_checks(rows, along="t_rt", fixed="t_h", increasing=False)
    checks += _handover_checks(rows, along="t_h", fixed="t_rt", increasing=True)
    if not rows:
        checks.append(Check("grid has valid points", False, "every point violates t_rt >= t_h"))
    return PresetResult("handover_rate_vs_trt", ["t_h", "t_rt", "density", "mean_rate", "stderr"], rows, per_point,
                        checks, base, tuple(seeds), {"skipped": skipped})


def preset_handover_density(overrides, n_seeds, seed, workers) -> PresetResult:
    base = _handover_base(overrides)
    seeds = _seed_list(seed, n_seeds)
    if "t_h" in overrides or "t_rt" in overrides:
        pairs = [(base.t_h, base.t_rt)]
    else:
        pairs = list(HANDOVER_PAIRS)
    rows, per_point, skipped = [], [], []
    for th, trt in pairs:
        for m in _axis(overrides, base, "scell_density", HANDOVER_DENSITIES):
            cfg = base.with_(t_h=th, t_rt=trt, scell_density=m)
            v = cfg.violations("handover")
            if v:
                skipped.append({"t_h": th, "t_rt": trt, "density": m, "violations": v})
                continue
            mean, s = _rate_point(cfg, seeds, workers)
            rows.append({"t_h": th, "t_rt": trt, "density": m, "mean_rate": mean, "stderr": s})
            per_point.append({"x": {"t_h": th, "t_rt": trt, "density": m}, "mean": mean, "stderr": s})
    checks = []
    for th, trt in pairs:
        pts = [r for r in rows if r["t_h"] == th and r["t_rt"] == trt]
        if len(pts) < 2:
            continue
        ok, desc = tolerant_monotone([r["mean_rate"] for r in pts], [r["stderr"] for r in pts], increasing=True)
        checks.append(Check(f"rate nondecreasing in M at t_h={_fmt(th)} t_rt={_fmt(trt)}", ok, desc))
    if not rows:
        checks.append(Check("grid has valid points", False, "every point violates t_rt >= t_h"))
    return PresetResult("handover_rate_vs_density", ["t_h", "t_rt", "density", "mean_rate", "stderr"], rows,
                        per_point, checks, base, tuple(seeds), {"skipped": skipped})


def _handover_checks(rows, along: str, fixed: str, increasing: bool) -> list[Check]:
    out = []
    for v in sorted({r[fixed] for r in rows}):
        pts = sorted((r for r in rows if r[fixed] == v), key=lambda r: r[along])
        if len(pts) < 2:
            continue
        ok, desc = tolerant_monotone([r["mean_rate"] for r in pts], [r["stderr"] for r in pts], increasing)
        word = "nondecreasing" if increasing else "nonincreasing"
        out.append(Check(f"rate {word} in {along} at {fixed}={_fmt(v)}", ok, desc))
    return out


# ---------------------------------------------------------------------------
# initial-access fairness
# ---------------------------------------------------------------------------

def ia_base(overrides) -> ScenarioConfig:
    """Accessing UEs (mean count ``ue_count``) are dropped inside ``R_C = track_radius``.

    The access decision is repeated at every ``t_rt`` on a freshly drawn
    large-scale channel; each decision contributes one rate sample per UE.
    """
    base = ScenarioConfig(**TREND_BASE, t_h=0.1, t_rt=0.1, track_radius=70.0, ue_radius=70.0, ue_count=30.0)
    return apply_overrides(base, overrides)


def ia_samples(cfg: ScenarioConfig, seeds) -> tuple[np.ndarray, list[float]]:
    """Per-(decision, UE) mean rates pooled over seeds, plus the per-seed Jain indices."""
    pooled, per_seed = [], []
    k = cfg.rt_ticks
    for s in seeds:
        sim = Simulation(cfg.with_(seed=int(s)))
        trace = sim.run()
        n = trace.rate.shape[0] // k * k
        if trace.rate.shape[1] == 0 or n == 0:
            continue
        r = trace.rate[:n].reshape(-1, k, trace.rate.shape[1]).mean(axis=1).ravel()
        for u in sim.tracked:
            a = sim.assoc[u]
            if a is not None and a.serving is Serving.SCELL:
                session = run_initial_access(a.ue, cfg.policy, a)
                if session.errors:
                    raise RuntimeError(f"initial access failed for ue {a.ue}: {session.errors}")
        pooled.append(r)
        if np.any(r > 0):
            per_seed.append(jain_index(r))
    return (np.concatenate(pooled) if pooled else np.zeros(0)), per_seed


def preset_ia_fairness(overrides, n_seeds, seed, workers) -> PresetResult:
    base = ia_base(overrides)
    seeds = _seed_list(seed, n_seeds)
    policies = _axis(overrides, base, "policy", tuple(AttachmentPolicy))
    rows, per_point = [], []
    for m in _axis(overrides, base, "scell_density", IA_DENSITIES):
        for pol in policies:
            cfg = base.with_(scell_density=m, policy=pol)
            rates, per_seed = ia_samples(cfg, seeds)
            j = jain_index(rates) if rates.size and np.any(rates > 0) else math.nan
            _, se = mean_stderr(per_seed)
            rows.append({"density": m, "policy": pol.value, "jain": j, "seed_jain_stderr": se,
                         "samples": int(rates.size), "mean_rate": float(np.mean(rates)) if rates.size else math.nan})
            per_point.append({"x": {"density": m, "policy": pol.value}, "mean": j, "stderr": se})
    checks = []
    by = {(r["density"], r["policy"]): r["jain"] for r in rows}
    dens = sorted({r["density"] for r in rows})
    pols = [p.value for p in policies]
    if {"max_rate", "max_sinr"} <= set(pols):
        for m in dens:
            a, b = by[m, "max_rate"], by[m, "max_sinr"]
            checks.append(Check(f"jain max_rate >= max_sinr at M={_fmt(m)}", a >= b, f"{a:.4f} vs {b:.4f}"))
    for p in pols:
        vals = [by[m, p] for m in dens]
        bad = monotone_violations(vals, increasing=True)
        checks.append(Check(f"jain {p} nondecreasing in M", not bad, " ".join(f"{v:.4f}" for v in vals)))
    return PresetResult("ia_fairness", ["density", "policy", "jain", "seed_jain_stderr", "samples", "mean_rate"],
                        rows, per_point, checks, base, tuple(seeds))


# ---------------------------------------------------------------------------
# radio-link-failure recovery
# ---------------------------------------------------------------------------

def rlf_base(overrides) -> ScenarioConfig:
    base = ScenarioConfig(**TREND_BASE, scell_density=70.0, blockage_enabled=True, blockage_confined=True)
    return apply_overrides(base, overrides)


@dataclass(frozen=True)
class RlfPoint:
    t_b: float
    t_rt: float
    events: int
    R: float               # unobstructed rate over the affected windows
    r: float               # rate on the backup pair during the blockage
    with_backup: float     # mean rate over the affected windows, backup enabled
    without_backup: float  # same, no recovery action

    @property
    def empirical_gain(self) -> float:
        return self.with_backup / self.without_backup if self.without_backup > 0 else 1.0

    @property
    def theoretical_gain(self) -> float:
        if self.events == 0 or self.R <= 0:
            return 1.0
        return theoretical_rate_gain(self.r, self.R, self.t_b, self.t_rt).gain


def rlf_point(cfg: ScenarioConfig, seeds) -> RlfPoint:
    """Three paired runs per seed: no blockage, blockage without backup, blockage with backup.

    Windows are the sweep epochs hit by a blockage; channel, mobility and
    blockage draws are shared across the three runs.
    """
    if cfg.blockage_duration == 0:
        return RlfPoint(0.0, cfg.t_rt, 0, math.nan, math.nan, math.nan, math.nan)
    k_rt = cfg.rt_ticks
    events = 0
    s_nb = s_wb = s_ob = s_r = 0.0
    n_win = n_blk = 0
    for s in seeds:
        c = cfg.with_(seed=int(s))
        nb = Simulation(c.with_(blockage_enabled=False)).run()
        ob = Simulation(c.with_(backup_enabled=False)).run()
        sim = Simulation(c)
        wb = sim.run()
        n_slots = wb.rate.shape[0]
        for ev in sim.events:
            col = sim.track_col[ev.ue]
            w0 = ev.start_tick // k_rt * k_rt
            w1 = w0 + k_rt
            if col < 0 or w1 > n_slots or ev.end_tick > w1:
                continue
            events += 1
            s_nb += float(np.sum(nb.rate[w0:w1, col]))
            s_wb += float(np.sum(wb.rate[w0:w1, col]))
            s_ob += float(np.sum(ob.rate[w0:w1, col]))
            s_r += float(np.sum(wb.rate[ev.start_tick:ev.end_tick, col]))
            n_win += k_rt
            n_blk += ev.end_tick - ev.start_tick
    if events == 0:
        return RlfPoint(cfg.blockage_duration, cfg.t_rt, 0, math.nan, math.nan, math.nan, math.nan)
    return RlfPoint(cfg.blockage_duration, cfg.t_rt, events, s_nb / n_win, s_r / n_blk, s_wb / n_win, s_ob / n_win)


def preset_rlf_gain(overrides, n_seeds, seed, workers) -> PresetResult:
    base = rlf_base(overrides)
    seeds = _seed_list(seed, n_seeds)
    t_bs = _axis(overrides, base, "blockage_duration", RLF_T_B)
    t_rts = _axis(overrides, base, "t_rt", RLF_T_RT)
    rows, per_point, skipped, pts = [], [], [], {}
    for tb in t_bs:
        for trt in t_rts:
            cfg = base.with_(blockage_duration=tb, t_rt=trt, t_h=trt)
            v = cfg.violations()
            if v:
                skipped.append({"t_b": tb, "t_rt": trt, "violations": v})
                continue
            p = rlf_point(cfg, seeds)
            pts[tb, trt] = p
            g_e, g_t = p.empirical_gain, p.theoretical_gain
            rel = abs(g_e - g_t) / g_t
            rows.append({"t_b": tb, "t_rt": trt, "events": p.events, "R": p.R, "r": p.r,
                         "rate_with_backup": p.with_backup, "rate_without_backup": p.without_backup,
                         "gain_empirical": g_e, "gain_theory": g_t, "relative_error": rel})
            per_point.append({"x": {"t_b": tb, "t_rt": trt}, "mean": g_e, "stderr": None})
    checks = []
    for r in rows:
        if r["t_b"] == 0:
            checks.append(Check(f"gain is 1 at t_b=0 t_rt={_fmt(r['t_rt'])}",
                                r["gain_empirical"] == 1.0 and r["gain_theory"] == 1.0, f"{r['gain_empirical']}"))
            continue
        tag = f"t_b={_fmt(r['t_b'])} t_rt={_fmt(r['t_rt'])}"
        checks.append(Check(f"events >= 500 at {tag}", r["events"] >= 500, str(r["events"])))
        checks.append(Check(f"gain within 5% at {tag}", r["relative_error"] <= 0.05,
                            f"empirical {r['gain_empirical']:.5f}, closed form {r['gain_theory']:.5f}"))
    live = {k: p for k, p in pts.items() if k[0] > 0 and p.events}
    for tb in sorted({k[0] for k in live}):
        g = [live[tb, t].empirical_gain for t in sorted(t for (b, t) in live if b == tb)]
        if len(g) > 1:
            checks.append(Check(f"gain decreasing in t_rt at t_b={_fmt(tb)}",
                                not monotone_violations(g, increasing=False, strict=True),
                                " ".join(f"{x:.5f}" for x in g)))
    for trt in sorted({k[1] for k in live}):
        g = [live[b, trt].empirical_gain for b in sorted(b for (b, t) in live if t == trt)]
        if len(g) > 1:
            checks.append(Check(f"gain increasing in t_b at t_rt={_fmt(trt)}",
                                not monotone_violations(g, increasing=True, strict=True),
                                " ".join(f"{x:.5f}" for x in g)))
    cols = ["t_b", "t_rt", "events", "R", "r", "rate_with_backup", "rate_without_backup", "gain_empirical",
            "gain_theory", "relative_error"]
    return PresetResult("rlf_gain", cols, rows, per_point, checks, base, tuple(seeds), {"skipped": skipped})


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    runner: Callable[..., PresetResult]
    default_seeds: int
    description: str

    def run(self, overrides: Mapping[str, Any] | None = None, n_seeds: int | None = None, seed: int = 0,
            workers: int = 1) -> PresetResult:
        n = self.default_seeds if n_seeds is None else n_seeds
        if n < 1:
            raise ValueError("need at least one seed")
        return self.runner(dict(overrides or {}), n, seed, workers)


PRESETS: dict[str, ExperimentPreset] = {p.name: p for p in (
    ExperimentPreset("delay_table", preset_delay_table, 1, "sweep delay per beamforming scheme"),
    ExperimentPreset("energy_table", preset_energy_table, 1, "sweep energy at SCell and UE, uplink vs downlink"),
    ExperimentPreset("rate_table", preset_rate_table, 20, "mean rate, multi-connectivity vs standalone, per density"),
    ExperimentPreset("stability_vs_density", preset_stability, 20, "rate std/mean, both modes, per density"),
    ExperimentPreset("handover_rate_vs_trt", preset_handover_trt, 20, "mean rate over the (t_h, t_rt) grid at M=70"),
    ExperimentPreset("handover_rate_vs_density", preset_handover_density, 20, "mean rate vs density per (t_h, t_rt)"),
    ExperimentPreset("ia_fairness", preset_ia_fairness, 20, "Jain index of access rates inside R_C per policy"),
    ExperimentPreset("rlf_gain", preset_rlf_gain, 3, "blockage rate gain with and without a backup beam pair"),
)}


def run_preset(name: str, overrides: Mapping[str, Any] | None = None, n_seeds: int | None = None, seed: int = 0,
               workers: int = 1) -> PresetResult:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return PRESETS[name].run(overrides, n_seeds, seed, workers)
