"""Self-healing unstructured overlays under churn: generators, protocols,
a discrete-step simulator and the metrics used to compare them."""

from .analysis import MetricsRow
from .engine import Mode, ScenarioSpec, run
from .graph import GraphError, OverlayGraph
from .protocols import Protocol, ProtocolConfig
from .topology import Clustered, ScaleFreeACL, ScaleFreePA, Uniform

__all__ = [
    "Clustered",
    "GraphError",
    "MetricsRow",
    "Mode",
    "OverlayGraph",
    "Protocol",
    "ProtocolConfig",
    "ScaleFreeACL",
    "ScaleFreePA",
    "ScenarioSpec",
    "Uniform",
    "run",
]
