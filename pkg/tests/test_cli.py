import csv
import json

import pytest

from mmwave_mc.cli import collect_overrides, main
from mmwave_mc.presets import PRESETS, monotone_violations, run_preset, tolerant_monotone


def test_monotone_violations():
    assert monotone_violations([1, 2, 2, 3], increasing=True) == []
    assert monotone_violations([1, 2, 2, 3], increasing=True, strict=True) == [1]
    assert monotone_violations([3, 1, 2], increasing=False) == [1]


def test_tolerant_monotone():
    assert tolerant_monotone([1.0, 2.0, 3.0], [0.1] * 3, True) == (True, "monotone")
    ok, _ = tolerant_monotone([1.0, 0.95, 3.0], [0.01, 0.1, 0.01], True)
    assert ok
    ok, _ = tolerant_monotone([1.0, 0.5, 3.0], [0.1, 0.1, 0.1], True)
    assert not ok
    ok, _ = tolerant_monotone([1.0, 0.95, 3.0, 2.95], [0.1] * 4, True)
    assert not ok


def test_rlf_with_zero_blockage_has_unit_gain():
    res = run_preset("rlf_gain", {"blockage_duration": "0", "t_rt": "0.1", "t_sim": "0.2"}, n_seeds=1)
    assert [r["gain_empirical"] for r in res.rows] == [1.0]
    assert [r["gain_theory"] for r in res.rows] == [1.0]
    assert res.passed


def test_comparison_presets_reject_mode_override():
    with pytest.raises(ValueError):
        run_preset("rate_table", {"mode": "sa"}, n_seeds=1)


def test_unknown_preset_raises():
    with pytest.raises(KeyError):
        run_preset("nope")


def test_collect_overrides_order(tmp_path):
    cfg = tmp_path / "a.cfg"
    cfg.write_text("t_h = 0.2\nseed = 4\n")
    got = collect_overrides(str(cfg), ["seed=9"], "sa")
    assert got == {"t_h": "0.2", "seed": "9", "mode": "sa"}


def test_cli_delay_table_outputs(tmp_path, capsys):
    assert main(["--preset", "delay_table", "--out", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "delay_table.csv")))
    assert [(r["scheme"], r["delay_ms"]) for r in rows] == [("analog", "25.6"), ("ul_digital", "1.6"),
                                                            ("dl_digital", "3.2")]
    rep = json.loads((tmp_path / "delay_table.json").read_text())
    assert rep["schema"] == "mmwave-mc/1" and rep["experiment"] == "delay_table"
    assert set(rep) >= {"config_hash", "config", "seeds", "per_point", "checks"}
    assert all(c["passed"] for c in rep["checks"])
    assert "PASS" in capsys.readouterr().out


def test_cli_free_run_with_trace(tmp_path):
    code = main(["--out", str(tmp_path), "--set", "t_sim=0.2", "--set", "area_radius=150", "--trace",
                 "--seed", "3"])
    assert code == 0
    assert (tmp_path / "trace_3.csv").exists() and (tmp_path / "decisions_3.csv").exists()
    rep = json.loads((tmp_path / "run.json").read_text())
    assert rep["seeds"] == [3]
    rows = list(csv.DictReader(open(tmp_path / "run.csv")))
    assert len(rows) == 1 and float(rows[0]["mean_rate"]) > 0


@pytest.mark.parametrize("argv", [
    ["--preset", "nope"],
    ["--set", "bogus=1"],
    ["--set", "novalue"],
    ["--seeds", "0"],
    ["--preset", "delay_table", "--trace"],
])
def test_cli_usage_errors_exit_2(tmp_path, argv):
    assert main(argv + ["--out", str(tmp_path)]) == 2


def test_cli_violation_exits_1(tmp_path):
    assert main(["--out", str(tmp_path), "--set", "t_sig=0.5"]) == 1


def test_validate(tmp_path, capsys):
    good = tmp_path / "good.cfg"
    good.write_text("t_h = 0.1\nt_rt = 0.3\n")
    assert main(["--validate", str(good)]) == 0
    ho = tmp_path / "ho.cfg"
    ho.write_text("t_h = 0.5\nt_rt = 0.1\n")
    assert main(["--validate", str(ho)]) == 0
    assert main(["--validate", str(ho), "--preset", "handover_rate_vs_trt"]) == 1
    assert "t_rt must be >= t_h" in capsys.readouterr().out
    bad = tmp_path / "bad.cfg"
    bad.write_text("t_h = 0.1\nbogus = 1\n")
    assert main(["--validate", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_list(capsys):
    assert main(["--list"]) == 0
    out = capsys.readouterr().out
    assert all(name in out for name in PRESETS)
