"""Scenario-driven runs.

This module contains:
- Scenario file schema, dotted overrides and validation
- Subcommand runner
- Run directory writers and manifest
"""

from quasispin.scenario.config import (
    SCHEMA_VERSION,
    ScenarioConfig,
    apply_overrides,
    load_config,
    read_raw,
    validate_config,
)
from quasispin.scenario.output import RunDirectory, RunManifest, config_hash
from quasispin.scenario.runner import Subcommand, build_scenario, run_scenario

__all__ = [
    # Config
    "SCHEMA_VERSION",
    "ScenarioConfig",
    "apply_overrides",
    "load_config",
    "read_raw",
    "validate_config",
    # Output
    "RunDirectory",
    "RunManifest",
    "config_hash",
    # Runner
    "Subcommand",
    "build_scenario",
    "run_scenario",
]
