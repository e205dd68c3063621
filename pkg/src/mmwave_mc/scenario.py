"""Scenario configuration, node deployment and UE mobility."""
from __future__ import annotations

import ast
import hashlib
import json
import math
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from .channel import ChannelConstants, SPEED_OF_LIGHT


class Mode(Enum):
    MULTI_CONNECTIVITY = "mc"
    STANDALONE = "sa"


class BfMode(Enum):
    ANALOG = "analog"
    DIGITAL = "digital"


class AttachmentPolicy(Enum):
    MAX_SINR = "max_sinr"
    MAX_RATE = "max_rate"


class RateShareMode(Enum):
    ACTUAL_LOAD = "actual_load"
    SOLE_USER = "sole_user"


class NodeKind(Enum):
    MCELL = "mcell"
    SCELL = "scell"
    UE = "ue"


_TOL = 1e-12


def _is_multiple(a: float, b: float) -> bool:
    """True when ``a`` is an integer multiple of ``b`` (relative tolerance)."""
    q = a / b
    return abs(q - round(q)) < 1e-9 * max(1.0, q)


@dataclass(frozen=True)
class ScenarioConfig:
    """All simulation parameters.  Defaults reproduce the reference parameter table."""

    # radio
    w_mmw: float = 1e9
    fc_mmw: float = 28e9
    p_tx_mmw_dbm: float = 30.0
    w_lte: float = 20e6
    fc_lte: float = 2e9
    p_tx_lte_dbm: float = 46.0
    gamma_out_db: float = -5.0
    noise_psd_dbm_hz: float = -174.0
    noise_figure_db: float = 0.0
    w_sig: float = 10e6
    # arrays and codebooks
    ant_scell: tuple[int, int] = (8, 8)
    ant_ue: tuple[int, int] = (4, 4)
    n_scell_dirs: int = 16
    n_ue_dirs: int = 8
    bf_mode_scell: BfMode = BfMode.DIGITAL
    bf_mode_ue: BfMode = BfMode.ANALOG
    # deployment and mobility
    scell_density: float = 70.0  # SCells per km^2
    users_per_cell: float = 10.0
    area_radius: float = 564.0
    ue_radius: float | None = None
    ue_count: float | None = None  # mean UE count; None means users_per_cell per deployed SCell
    track_radius: float | None = None
    speed: float = 20.0
    # timing
    t_sim: float = 10.0
    slot: float = 1e-3
    t_h: float = 0.1
    t_rt: float = 0.3
    t_sig: float = 10e-6
    t_per: float = 200e-6
    phi_ov: float = 0.05
    # control
    mode: Mode = Mode.MULTI_CONNECTIVITY
    policy: AttachmentPolicy = AttachmentPolicy.MAX_SINR
    hysteresis_db: float = 0.0
    rate_share_mode: RateShareMode = RateShareMode.ACTUAL_LOAD
    control_interference: bool = False
    time_smeared_sweep: bool = False
    # blockage and recovery
    blockage_enabled: bool = False
    blockage_duration: float = 0.05
    blockage_confined: bool = True
    backup_enabled: bool = True
    cross_cell_backup: bool = True
    suboptimal_penalty_db: float = 10.0
    rt_history_len: int = 2
    # circuit power (W) of the sweep energy model
    p_dbf_scell: float = 1092.3125
    p_abf_scell: float = 20.78125
    p_abf_ue: float = 17.9375
    p_dbf_ue: float = 273.09375
    seed: int = 0
    channel: ChannelConstants = field(default_factory=ChannelConstants)

    # derived -----------------------------------------------------------
    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.fc_mmw

    @property
    def n_slots(self) -> int:
        return int(math.floor(self.t_sim / self.slot + 1e-9))

    @property
    def h_ticks(self) -> int:
        return int(round(self.t_h / self.slot))

    @property
    def rt_ticks(self) -> int:
        return int(round(self.t_rt / self.slot))

    @property
    def area_km2(self) -> float:
        return math.pi * (self.area_radius / 1000.0) ** 2

    def with_(self, **kw) -> "ScenarioConfig":
        return replace(self, **kw)

    # validation --------------------------------------------------------
    def violations(self, purpose: str | None = None) -> list[str]:
        """Every violated invariant as a human-readable message.

        ``purpose="handover"`` additionally requires ``t_rt >= t_h``.
        """
        out: list[str] = []
        for name in ("t_sim", "slot", "t_h", "t_rt", "t_sig", "t_per", "w_mmw", "w_lte", "w_sig", "fc_mmw"):
            if not getattr(self, name) > 0:
                out.append(f"{name} must be > 0")
        if self.t_sig > self.t_per:
            out.append("t_sig must not exceed t_per")
        if self.t_per > 0 and abs(self.phi_ov - self.t_sig / self.t_per) > _TOL:
            out.append(f"phi_ov={self.phi_ov} differs from t_sig/t_per={self.t_sig / self.t_per if self.t_per else 'nan'}")
        if self.n_scell_dirs > self.ant_scell[0] * self.ant_scell[1]:
            out.append("n_scell_dirs exceeds the SCell array size")
        if self.n_ue_dirs > self.ant_ue[0] * self.ant_ue[1]:
            out.append("n_ue_dirs exceeds the UE array size")
        if min(self.n_scell_dirs, self.n_ue_dirs) < 1:
            out.append("direction counts must be >= 1")
        if min(*self.ant_scell, *self.ant_ue) < 1:
            out.append("array dims must be >= 1")
        if self.slot > 0 and self.t_h > 0 and not _is_multiple(self.t_h, self.slot):
            out.append("slot must divide t_h")
        if self.slot > 0 and self.t_rt > 0 and not _is_multiple(self.t_rt, self.slot):
            out.append("slot must divide t_rt")
        if purpose == "handover" and self.t_rt < self.t_h:
            out.append("t_rt must be >= t_h for handover sweeps")
        if self.area_radius <= 0:
            out.append("area_radius must be > 0")
        if self.scell_density < 0 or self.users_per_cell < 0:
            out.append("densities must be >= 0")
        if self.ue_count is not None and self.ue_count < 0:
            out.append("ue_count must be >= 0")
        if self.speed < 0:
            out.append("speed must be >= 0")
        if self.blockage_enabled:
            if self.blockage_duration < 0:
                out.append("blockage_duration must be >= 0")
            if self.t_rt < 2 * self.blockage_duration:
                out.append("blockage requires t_rt >= 2 * blockage_duration")
        if self.backup_enabled and self.rt_history_len < 2:
            out.append("rt_history_len must be >= 2 when backup is enabled")
        out.extend(self.channel.violations())
        return out

    def validate(self, purpose: str | None = None) -> "ScenarioConfig":
        v = self.violations(purpose)
        if v:
            raise ValueError("invalid scenario: " + "; ".join(v))
        return self

    # serialization -----------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "channel":
                for cf in fields(v):
                    out[f"channel.{cf.name}"] = getattr(v, cf.name)
            elif isinstance(v, Enum):
                out[f.name] = v.value
            elif isinstance(v, tuple):
                out[f.name] = list(v)
            else:
                out[f.name] = v
        return out

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def to_text(self) -> str:
        lines = []
        for k, v in self.to_dict().items():
            lines.append(f"{k} = {_format_value(v)}")
        return "\n".join(lines) + "\n"


_FIELD_TYPES = {f.name: f for f in fields(ScenarioConfig)}
_ENUMS = {"mode": Mode, "bf_mode_scell": BfMode, "bf_mode_ue": BfMode, "policy": AttachmentPolicy,
          "rate_share_mode": RateShareMode}
_ALIASES = {"mode": {"multiconnectivity": "mc", "multi_connectivity": "mc", "standalone": "sa"}}


def _format_value(v) -> str:
    if isinstance(v, list):
        return "x".join(str(x) for x in v)
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_scalar(text: str):
    t = text.strip()
    low = t.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", "null"):
        return None
    if "x" in low and all(p.strip().isdigit() for p in low.split("x")):
        return tuple(int(p) for p in low.split("x"))
    try:
        return ast.literal_eval(t)
    except (ValueError, SyntaxError):
        return t


def coerce_value(key: str, raw) -> Any:
    """Convert ``raw`` (string or Python value) to the type expected for ``key``."""
    value = _parse_scalar(raw) if isinstance(raw, str) else raw
    if key.startswith("channel."):
        name = key.split(".", 1)[1]
        cf = {f.name: f for f in fields(ChannelConstants)}
        if name not in cf:
            raise KeyError(f"unknown key {key!r}")
        default = getattr(ChannelConstants(), name)
        return type(default)(value)
    if key not in _FIELD_TYPES:
        raise KeyError(f"unknown key {key!r}")
    if key in _ENUMS:
        s = str(value).lower()
        s = _ALIASES.get(key, {}).get(s, s)
        return _ENUMS[key](s)
    default = getattr(ScenarioConfig(), key)
    if value is None:
        if key in ("ue_radius", "track_radius", "ue_count"):
            return None
        raise ValueError(f"{key} may not be none")
    if isinstance(default, tuple):
        if isinstance(value, (int,)):
            value = (value, value)
        return tuple(int(v) for v in value)
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ValueError(f"{key} expects true/false")
        return value
    if isinstance(default, int):
        if float(value) != int(value):
            raise ValueError(f"{key} expects an integer")
        return int(value)
    return float(value)


def apply_overrides(config: ScenarioConfig, overrides: dict[str, Any]) -> ScenarioConfig:
    top: dict[str, Any] = {}
    chan: dict[str, Any] = {}
    for k, raw in overrides.items():
        v = coerce_value(k, raw)
        if k.startswith("channel."):
            chan[k.split(".", 1)[1]] = v
        else:
            top[k] = v
    if chan:
        top["channel"] = replace(top.get("channel", config.channel), **chan)
    return replace(config, **top)


class ConfigParseError(ValueError):
    pass


def parse_overrides(text: str) -> dict[str, str]:
    """Raw ``key = value`` pairs of a config text; every bad line is reported with its number."""
    overrides: dict[str, str] = {}
    errors = []
    for n, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            errors.append(f"line {n}: expected 'key = value'")
            continue
        k, v = (s.strip() for s in body.split("=", 1))
        try:
            coerce_value(k, v)
        except (KeyError, ValueError, TypeError) as exc:
            errors.append(f"line {n}: {exc.args[0] if exc.args else exc}")
            continue
        overrides[k] = v
    if errors:
        raise ConfigParseError("\n".join(errors))
    return overrides


def parse_config_text(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Parse ``key = value`` lines (``#`` starts a comment) on top of ``base``."""
    return apply_overrides(base or ScenarioConfig(), parse_overrides(text))


def load_config(path: str | Path, base: ScenarioConfig | None = None) -> ScenarioConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"), base)


def save_config(config: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(config.to_text(), encoding="utf-8")


# ---------------------------------------------------------------------------
# nodes and deployment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Node:
    id: int
    kind: NodeKind
    position: tuple[float, float]
    velocity: tuple[float, float] = (0.0, 0.0)
    array_dims: tuple[int, int] | None = None


@dataclass(frozen=True)
class Deployment:
    nodes: tuple[Node, ...]
    area_radius: float
    rng_seed: int | None = None

    def of_kind(self, kind: NodeKind) -> list[Node]:
        return [n for n in self.nodes if n.kind is kind]

    @property
    def mcell(self) -> Node:
        (m,) = self.of_kind(NodeKind.MCELL)
        return m

    @property
    def scells(self) -> list[Node]:
        return self.of_kind(NodeKind.SCELL)

    @property
    def ues(self) -> list[Node]:
        return self.of_kind(NodeKind.UE)

    def positions(self, kind: NodeKind) -> np.ndarray:
        return np.array([n.position for n in self.of_kind(kind)], dtype=float).reshape(-1, 2)

    def velocities(self, kind: NodeKind = NodeKind.UE) -> np.ndarray:
        return np.array([n.velocity for n in self.of_kind(kind)], dtype=float).reshape(-1, 2)


def _uniform_disk(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(n))
    th = rng.uniform(0.0, 2.0 * math.pi, n)
    return np.column_stack((r * np.cos(th), r * np.sin(th)))


def deploy(config: ScenarioConfig, rng: np.random.Generator | int) -> Deployment:
    """PPP deployment in a disk: one MCell at the center, Poisson SCells and UEs."""
    if config.area_radius <= 0:
        raise ValueError("area_radius must be > 0")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    rng = np.random.default_rng(rng)
    n_sc = int(rng.poisson(config.scell_density * config.area_km2))
    if config.ue_count is None:
        n_ue = int(rng.poisson(config.users_per_cell * n_sc)) if n_sc else 0
    else:
        n_ue = int(rng.poisson(config.ue_count))
    sc_pos = _uniform_disk(rng, n_sc, config.area_radius)
    ue_r = config.area_radius if config.ue_radius is None else min(config.ue_radius, config.area_radius)
    ue_pos = _uniform_disk(rng, n_ue, ue_r)
    heading = rng.uniform(0.0, 2.0 * math.pi, n_ue)
    vel = config.speed * np.column_stack((np.cos(heading), np.sin(heading)))

    nodes = [Node(0, NodeKind.MCELL, (0.0, 0.0))]
    for p in sc_pos:
        nodes.append(Node(len(nodes), NodeKind.SCELL, (float(p[0]), float(p[1])), array_dims=tuple(config.ant_scell)))
    for p, v in zip(ue_pos, vel):
        nodes.append(Node(len(nodes), NodeKind.UE, (float(p[0]), float(p[1])), (float(v[0]), float(v[1])),
                          tuple(config.ant_ue)))
    return Deployment(tuple(nodes), float(config.area_radius), None if seed is None else int(seed))


def advance_ue(node: Node, dt: float) -> Node:
    """Straight-line motion; UEs may leave the deployment disk."""
    if node.kind is not NodeKind.UE:
        raise ValueError(f"node {node.id} is a {node.kind.value}, only UEs move")
    if dt < 0:
        raise ValueError("dt must be >= 0")
    x, y = node.position
    vx, vy = node.velocity
    return replace(node, position=(x + vx * dt, y + vy * dt))
