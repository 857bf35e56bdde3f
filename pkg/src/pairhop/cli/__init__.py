"""Config-driven command line runner."""

from __future__ import annotations

from .config import ExperimentConfig, load_config, parse_config
from .runner import plan, run, verify

__all__ = ["ExperimentConfig", "load_config", "parse_config", "plan", "run", "verify"]
