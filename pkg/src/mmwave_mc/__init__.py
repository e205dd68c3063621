"""Uplink multi-connectivity measurement and control for mmWave cellular networks."""

from .scenario import (AttachmentPolicy, BfMode, Deployment, Mode, Node, NodeKind, RateShareMode,
                       ScenarioConfig, advance_ue, deploy, load_config)
from .channel import ChannelConstants, LinkChannel, PathlossState
from .engine import MetricsTrace, run, run_montecarlo

__version__ = "0.1.0"
