"""Agent and bake parameter defaults."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class AgentParams:
    radius: float = 0.25
    height: float = 1.6
    max_climb: float = 0.3
    max_slope_deg: float = 45.0


@dataclass(frozen=True)
class BakeSettings:
    cell_size: float = 0.1
    cell_height: float = 0.1
    edge_error: float = 0.05
