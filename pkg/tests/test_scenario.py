import numpy as np
import pytest
from hypothesis import given, strategies as st

from mmwave_mc.scenario import (AttachmentPolicy, ConfigParseError, Mode, NodeKind, ScenarioConfig, advance_ue,
                                apply_overrides, deploy, load_config, parse_config_text, parse_overrides,
                                save_config)


def test_defaults_are_valid():
    cfg = ScenarioConfig()
    assert cfg.violations() == []
    assert cfg.violations("handover") == []
    assert cfg.n_slots == 10_000
    assert cfg.h_ticks == 100 and cfg.rt_ticks == 300
    assert cfg.wavelength == pytest.approx(299_792_458.0 / 28e9)


def test_overhead_violation():
    cfg = ScenarioConfig(t_sig=300e-6)
    assert any("t_sig" in v for v in cfg.violations())
    with pytest.raises(ValueError):
        cfg.validate()


def test_handover_purpose_requires_trt_at_least_th():
    cfg = ScenarioConfig(t_h=0.2, t_rt=0.1)
    assert cfg.violations() == []
    assert cfg.violations("handover") == ["t_rt must be >= t_h for handover sweeps"]


def test_slot_must_divide_timers():
    assert any("slot must divide t_h" in v for v in ScenarioConfig(t_h=0.0105).violations())


def test_blockage_requires_long_sweep_period():
    cfg = ScenarioConfig(blockage_enabled=True, blockage_duration=0.2, t_rt=0.3)
    assert any("2 * blockage_duration" in v for v in cfg.violations())


def test_config_hash_is_stable():
    # frozen value: any change of defaults or of the serialization must be deliberate
    assert ScenarioConfig().config_hash() == "e4d4dd7c8c6317f7e88f9e60338ed6a1bbd859756ea0c0894713dd30510c3b19"
    assert ScenarioConfig(seed=1).config_hash() != ScenarioConfig().config_hash()
    assert len(ScenarioConfig().config_hash()) == 64


def test_text_round_trip(tmp_path):
    cfg = ScenarioConfig(scell_density=40.0, mode=Mode.STANDALONE, policy=AttachmentPolicy.MAX_RATE,
                         ant_ue=(2, 2), track_radius=70.0, seed=12)
    cfg = apply_overrides(cfg, {"channel.zeta_db": 3.5})
    path = tmp_path / "c.cfg"
    save_config(cfg, path)
    assert load_config(path) == cfg
    assert load_config(path).config_hash() == cfg.config_hash()


@given(st.floats(1.0, 200.0), st.integers(0, 2**31), st.sampled_from(["mc", "sa"]), st.booleans())
def test_override_round_trip(m, seed, mode, blockage):
    cfg = apply_overrides(ScenarioConfig(), {"scell_density": m, "seed": seed, "mode": mode,
                                             "blockage_enabled": blockage})
    assert parse_config_text(cfg.to_text()) == cfg


def test_parse_errors_carry_line_numbers():
    text = "t_h = 0.1\n# comment\nbogus = 3\nno equals sign\nspeed = fast\n"
    with pytest.raises(ConfigParseError) as e:
        parse_config_text(text)
    msg = str(e.value)
    assert "line 3" in msg and "line 4" in msg and "line 5" in msg
    assert "line 1" not in msg


def test_parse_overrides_keeps_only_listed_keys():
    assert parse_overrides("t_h = 0.2  # trailing\n\nmode = standalone\n") == {"t_h": "0.2", "mode": "standalone"}
    assert parse_config_text("mode = standalone").mode is Mode.STANDALONE


def test_tuple_and_none_values():
    cfg = parse_config_text("ant_ue = 2x4\ntrack_radius = none\nue_count = 12")
    assert cfg.ant_ue == (2, 4)
    assert cfg.track_radius is None
    assert cfg.ue_count == 12.0
    with pytest.raises(ConfigParseError):
        parse_config_text("seed = 1.5")


def test_deploy_is_deterministic_and_inside_the_disk():
    cfg = ScenarioConfig(area_radius=300.0, scell_density=70.0)
    a = deploy(cfg, 5)
    b = deploy(cfg, 5)
    assert a == b
    assert a.mcell.position == (0.0, 0.0)
    pos = a.positions(NodeKind.UE)
    assert np.all(np.hypot(*pos.T) <= 300.0 + 1e-9)
    assert np.all(np.hypot(*a.positions(NodeKind.SCELL).T) <= 300.0 + 1e-9)
    speeds = np.hypot(*a.velocities(NodeKind.UE).T)
    assert np.allclose(speeds, cfg.speed)


def test_deploy_counts_follow_their_means():
    cfg = ScenarioConfig(area_radius=300.0, scell_density=50.0)
    n_sc = [len(deploy(cfg, s).scells) for s in range(300)]
    assert np.mean(n_sc) == pytest.approx(50.0 * cfg.area_km2, rel=0.05)
    d = [deploy(cfg, s) for s in range(300)]
    ratio = sum(len(x.ues) for x in d) / sum(len(x.scells) for x in d)
    assert ratio == pytest.approx(cfg.users_per_cell, rel=0.05)


def test_ue_radius_and_count():
    cfg = ScenarioConfig(area_radius=300.0, ue_radius=70.0, ue_count=30.0)
    d = [deploy(cfg, s) for s in range(200)]
    assert np.mean([len(x.ues) for x in d]) == pytest.approx(30.0, rel=0.05)
    assert all(np.all(np.hypot(*x.positions(NodeKind.UE).T) <= 70.0 + 1e-9) for x in d if x.ues)


def test_zero_density_deploys_only_the_mcell():
    d = deploy(ScenarioConfig(scell_density=0.0), 0)
    assert len(d.scells) == 0 and len(d.ues) == 0


def test_advance_ue():
    d = deploy(ScenarioConfig(area_radius=200.0), 1)
    ue = d.ues[0]
    moved = advance_ue(ue, 0.5)
    assert moved.position == pytest.approx((ue.position[0] + 0.5 * ue.velocity[0],
                                            ue.position[1] + 0.5 * ue.velocity[1]))
    with pytest.raises(ValueError):
        advance_ue(d.mcell, 1.0)
    with pytest.raises(ValueError):
        advance_ue(ue, -1.0)
