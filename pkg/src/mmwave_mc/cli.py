"""Command-line runner: presets, free-form config runs and config validation.

Exit status: 0 when every check passes, 1 on a failed check or invariant
violation, 2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .engine import AggregateReport, Simulation, derive_seeds, summarize
from .presets import PRESETS, SCHEMA, Check, run_preset
from .scenario import ConfigParseError, ScenarioConfig, apply_overrides, coerce_value, parse_overrides

PURPOSE = {"handover_rate_vs_trt": "handover", "handover_rate_vs_density": "handover"}


class UsageError(Exception):
    pass


def _clean(v: Any) -> Any:
    """JSON-safe copy: numpy scalars to Python, non-finite floats to ``None``."""
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _cell(v: Any) -> str:
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def write_csv(path: Path, columns: Sequence[str], rows: Sequence[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r.get(c)) for c in columns])


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def collect_overrides(config_path: str | None, sets: Sequence[str], mode: str | None) -> dict[str, str]:
    """Config-file keys, then ``--set`` pairs, then ``--mode``; later sources win."""
    out: dict[str, str] = {}
    if config_path:
        out.update(parse_overrides(Path(config_path).read_text(encoding="utf-8")))
    for item in sets:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        try:
            coerce_value(k, v)
        except (KeyError, ValueError, TypeError) as exc:
            raise UsageError(f"--set {item}: {exc.args[0] if exc.args else exc}") from None
        out[k] = v
    if mode:
        out["mode"] = mode
    return out


def validate_config(path: str | Path, purpose: str | None = None) -> list[str]:
    """Every violated invariant of the config file; parse errors raise :class:`ConfigParseError`."""
    overrides = parse_overrides(Path(path).read_text(encoding="utf-8"))
    return apply_overrides(ScenarioConfig(), overrides).violations(purpose)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_preset(name: str, overrides: dict, n_seeds: int | None, seed: int, out: Path, workers: int) -> int:
    try:
        result = run_preset(name, overrides, n_seeds, seed, workers)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / f"{name}.csv", result.columns, result.rows)
    write_json(out / f"{name}.json", result.report())
    for c in result.checks:
        print(c.line())
    print(f"{name}: {'PASS' if result.passed else 'FAIL'} ({sum(c.passed for c in result.checks)}/"
          f"{len(result.checks)} checks) -> {out}")
    return 0 if result.passed else 1


RUN_COLUMNS = ["seed", "n_ue", "n_scell", "n_samples", "mean_rate", "r_var", "jain", "handovers", "beam_switches",
               "fallback_fraction", "zero_fraction"]


def cmd_run(overrides: dict, n_seeds: int, seed: int, out: Path, trace: bool) -> int:
    try:
        config = apply_overrides(ScenarioConfig(), overrides)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None
    v = config.violations()
    if v:
        for m in v:
            print(f"violation: {m}", file=sys.stderr)
        return 1
    seeds = [seed] if n_seeds == 1 else derive_seeds(seed, n_seeds)
    out.mkdir(parents=True, exist_ok=True)
    runs = []
    for s in seeds:
        tr = Simulation(config.with_(seed=int(s))).run()
        runs.append(summarize(tr))
        if trace:
            tr.write_csv(out / f"trace_{s}.csv")
            tr.write_decisions(out / f"decisions_{s}.csv")
    agg = AggregateReport(config.config_hash(), tuple(int(s) for s in seeds), tuple(runs))
    write_csv(out / "run.csv", RUN_COLUMNS, [r.__dict__ for r in runs])
    m, se = agg.stat("mean_rate")
    checks = [Check("every run produced samples", all(r.n_samples > 0 for r in runs),
                    f"{sum(r.n_samples for r in runs)} samples")]
    payload = {"schema": SCHEMA, "experiment": "run", "config_hash": config.config_hash(),
               "config": config.to_dict(), "seeds": list(agg.seeds),
               "per_point": [{"x": {"seed": r.seed}, "mean": r.mean_rate, "stderr": None} for r in runs],
               "aggregate": agg.to_dict(),
               "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]}
    write_json(out / "run.json", payload)
    print(f"mean rate {m / 1e6:.3f} Mbit/s (stderr {se / 1e6:.3f}) over {len(seeds)} seed(s) -> {out}")
    for c in checks:
        print(c.line())
    return 0 if all(c.passed for c in checks) else 1


def cmd_validate(path: str, purpose: str | None) -> int:
    try:
        violations = validate_config(path, purpose)
    except ConfigParseError as exc:
        for line in str(exc).splitlines():
            print(f"{path}: {line}", file=sys.stderr)
        return 2
    for m in violations:
        print(f"violation: {m}")
    if not violations:
        print(f"{path}: valid")
    return 0 if not violations else 1


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mmwave-mc", description="mmWave multi-connectivity simulator")
    p.add_argument("--preset", help="experiment preset: " + ", ".join(PRESETS))
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--set", dest="sets", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key (repeatable)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--seeds", type=int, default=None, help="number of Monte Carlo seeds")
    p.add_argument("--out", default="out", help="output directory (default ./out)")
    p.add_argument("--mode", choices=("mc", "sa"), help="multi-connectivity or standalone")
    p.add_argument("--trace", action="store_true", help="dump per-slot traces (free-form runs)")
    p.add_argument("--workers", type=int, default=1, help="worker processes for Monte Carlo runs")
    p.add_argument("--validate", metavar="PATH", help="check a config file and exit")
    p.add_argument("--list", action="store_true", help="list presets and exit")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.list:
            for name, p in PRESETS.items():
                print(f"{name:26s} {p.description} (default seeds {p.default_seeds})")
            return 0
        if args.preset is not None and args.preset not in PRESETS:
            raise UsageError(f"unknown preset {args.preset!r}; choose from {', '.join(PRESETS)}")
        if args.validate:
            return cmd_validate(args.validate, PURPOSE.get(args.preset))
        if args.seeds is not None and args.seeds < 1:
            raise UsageError("--seeds must be >= 1")
        try:
            overrides = collect_overrides(args.config, args.sets, args.mode)
        except ConfigParseError as exc:
            for line in str(exc).splitlines():
                print(f"{args.config}: {line}", file=sys.stderr)
            return 2
        out = Path(args.out)
        if args.preset:
            if args.trace:
                raise UsageError("--trace applies to free-form runs only")
            return cmd_preset(args.preset, overrides, args.seeds, args.seed, out, args.workers)
        return cmd_run(overrides, args.seeds or 1, args.seed, out, args.trace)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"mmwave-mc: error: {exc}", file=sys.stderr)
        return 2
