"""Scenario files: JSON schema, dotted overrides and cross-field validation."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from quasispin.config import get_settings
from quasispin.physics.base import Boundary, ConfigError
from quasispin.physics.dynamics import PacketMode, WavePacketSpec
from quasispin.physics.lattice import LatticeSpec
from quasispin.physics.splitter import SplitterMode
from quasispin.studies.disorder import DisorderConfig, DisorderScope

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class LatticeSection(_Section):
    """Chain parameters."""

    n_sites: int = Field(default=1200, ge=4)
    hopping: float = Field(default=1.0, gt=0)
    mass: float = Field(default=0.2, ge=0)
    mean_onsite: float = 0.0
    lattice_constant: float = Field(default=1.0, gt=0)
    boundary: Boundary = Boundary.OPEN

    @field_validator("n_sites")
    @classmethod
    def validate_even(cls, v: int) -> int:
        """Bipartite chains need an even site count."""
        if v % 2:
            raise ValueError(f"n_sites must be even, got {v}")
        return v


class PacketSection(_Section):
    """Initial Gaussian packet."""

    width: float = Field(default=40.0, ge=2)
    kick: float = Field(default=0.5, gt=0, lt=np.pi)
    center: int = Field(default=300, ge=0)
    w_plus: float = 1 / np.sqrt(2)
    w_minus: float = 1 / np.sqrt(2)
    mode: PacketMode = PacketMode.BAND


class SplitterSection(_Section):
    """Splitter synthesis and placement; center defaults to the middle of the chain."""

    mode: SplitterMode = SplitterMode.ONE_SIDED
    rho: int = Field(default=40, ge=1)
    neighbor_order: int = Field(default=2, ge=1)
    v0: float = 2.0
    margin: int = Field(default=40, ge=0)
    center: int | None = None
    # Calibrate v0 in [0, v0] so the run reflects this much of the upper band
    target_r_plus: float | None = Field(default=None, gt=0, lt=1)


class RunSection(_Section):
    """Scattering run controls; kicks or rhos turn a scatter run into a sweep."""

    t_max: float | None = Field(default=None, gt=0)
    n_outputs: int = Field(default=400, ge=2)
    separation_widths: float = Field(default=3.0, gt=0)
    n_snapshots: int = Field(default=3, ge=1)
    kicks: list[float] = Field(default_factory=list)
    rhos: list[int] = Field(default_factory=list)


class ZittSection(_Section):
    """Zitterbewegung run: a packet centered in the clean chain, evolved for each mass.

    The default dimer state covers every momentum, so both spectral lines and
    the t^-1/2 tail show up; band and sublattice packets reuse the packet section.
    """

    t_max: float = Field(default=250.0, gt=0)
    dt: float = Field(default=0.05, gt=0)
    masses: list[float] = Field(default_factory=list)
    n_peaks: int = Field(default=4, ge=1)
    envelope_window: float = Field(default=1.0, gt=0, le=1)
    mode: PacketMode = PacketMode.DIMER
    t_transient: float = Field(default=40.0, ge=0)


class DisorderSection(_Section):
    """Hopping disorder sweep."""

    sigmas: list[float] = Field(default_factory=lambda: [0.0, 0.05, 0.1])
    n_realizations: int = Field(default=50, ge=1)
    scope: DisorderScope = DisorderScope.WHOLE_CHAIN
    correlated: bool = False


class HexamerSection(_Section):
    """Tilted-dimer ring with exponential overlaps."""

    xi: float = Field(default=0.3, gt=0)
    ring_radius: float = Field(default=1.0, gt=0)
    dimer_length: float = Field(default=0.6, gt=0)
    strength: float = 1.0
    theta_start: float = 0.0
    theta_stop: float = 90.0
    n_theta: int = Field(default=91, ge=2)


class OutputsSection(_Section):
    directory: Path | None = None


class ScenarioConfig(_Section):
    """One scenario file; every section has defaults."""

    schema_version: Literal[1] = SCHEMA_VERSION
    seed: int | None = None
    lattice: LatticeSection = Field(default_factory=LatticeSection)
    packet: PacketSection = Field(default_factory=PacketSection)
    splitter: SplitterSection = Field(default_factory=SplitterSection)
    run: RunSection = Field(default_factory=RunSection)
    zitt: ZittSection = Field(default_factory=ZittSection)
    disorder: DisorderSection | None = None
    hexamer: HexamerSection = Field(default_factory=HexamerSection)
    outputs: OutputsSection = Field(default_factory=OutputsSection)

    def lattice_spec(self, mass: float | None = None) -> LatticeSpec:
        section = self.lattice
        return LatticeSpec(
            n_sites=section.n_sites,
            hopping=section.hopping,
            mass=section.mass if mass is None else mass,
            mean_onsite=section.mean_onsite,
            lattice_constant=section.lattice_constant,
            boundary=section.boundary,
        )

    def packet_spec(self) -> WavePacketSpec:
        return WavePacketSpec(
            width=self.packet.width,
            kick=self.packet.kick,
            center=self.packet.center,
            band_weights=(self.packet.w_plus, self.packet.w_minus),
            mode=self.packet.mode,
        )

    def disorder_config(self, seed: int) -> DisorderConfig:
        section = self.disorder or DisorderSection()
        return DisorderConfig(
            sigma_delta=max(section.sigmas, default=0.0),
            n_realizations=section.n_realizations,
            seed=seed,
            scope=section.scope,
            correlated=section.correlated,
        )

    @property
    def splitter_center(self) -> int:
        if self.splitter.center is not None:
            return self.splitter.center
        half = self.lattice.n_sites // 2
        return half - half % 2

    def resolved(self) -> dict[str, Any]:
        """Plain JSON-compatible dict with every default filled in."""
        return self.model_dump(mode="json")


def read_raw(path: Path | str) -> dict[str, Any]:
    """Load a scenario file as a dict.

    Raises:
        ConfigError: If the file is unreadable or not a JSON object
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"Cannot read scenario file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Scenario file {path} is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"Scenario file {path} must hold a JSON object")
    return raw


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(raw: dict[str, Any], overrides: list[str]) -> dict[str, Any]:
    """Apply `section.field=value` overrides; values are read as JSON when possible.

    Raises:
        ConfigError: If an override is not of the form path=value
    """
    result = json.loads(json.dumps(raw))
    for override in overrides:
        path, sep, value = override.partition("=")
        if not sep or not path:
            raise ConfigError(f"Override {override!r} must look like section.field=value")
        keys = path.strip().split(".")
        node = result
        for key in keys[:-1]:
            child = node.get(key)
            if not isinstance(child, dict):
                child = {}
                node[key] = child
            node = child
        node[keys[-1]] = _parse_value(value.strip())
        logger.debug("Override %s = %r", path, node[keys[-1]])
    return result


def _format_errors(error: ValidationError) -> list[str]:
    return [
        f"{'.'.join(str(part) for part in item['loc']) or '<root>'}: {item['msg']}"
        for item in error.errors()
    ]


def window_size(config: ScenarioConfig) -> int:
    """Sites occupied by the synthesized splitter window."""
    size = 2 * config.splitter.rho + 2 * config.splitter.margin
    return max(size + (-size) % 4, 4)


def cross_field_violations(config: ScenarioConfig) -> list[str]:
    """Consistency checks that span sections."""
    violations = []
    n_sites = config.lattice.n_sites
    edge_sites = get_settings().edge_sites
    width = window_size(config)
    center = config.splitter_center
    start = center - width // 2

    if start % 2:
        violations.append(f"splitter.center: window would start on odd site {start}; use an even center")
    if start < edge_sites or start + width > n_sites - edge_sites:
        minimum = width + 2 * edge_sites
        minimum += minimum % 2
        violations.append(
            f"splitter: window of {width} sites around {center} does not fit with "
            f"{edge_sites} lead sites on each side (suggested minimum n_sites: {minimum})"
        )

    packet = config.packet
    if abs(packet.w_plus**2 + packet.w_minus**2 - 1.0) > 1e-10:
        violations.append("packet: w_plus^2 + w_minus^2 must equal 1")
    if not 0 <= packet.center < n_sites:
        violations.append(f"packet.center: {packet.center} outside 0..{n_sites - 1}")
    elif packet.center + 4 * packet.width > start:
        violations.append(
            f"packet: center {packet.center} +/- 4 widths overlaps the splitter window starting at {start}"
        )
    elif packet.center - 4 * packet.width < edge_sites:
        violations.append(f"packet: center {packet.center} - 4 widths reaches the edge strip")

    heaviest = max([config.lattice.mass, *config.zitt.masses])
    highest = 2.0 * np.sqrt(4.0 * config.lattice.hopping**2 + heaviest**2)
    if np.pi / config.zitt.dt <= highest:
        violations.append(f"zitt.dt: Nyquist {np.pi / config.zitt.dt:.3f} does not exceed {highest:.3f}")
    if any(m < 0 for m in config.zitt.masses):
        violations.append("zitt.masses: masses must be non-negative")
    if config.zitt.t_transient >= config.zitt.t_max:
        violations.append("zitt.t_transient: must be shorter than zitt.t_max")
    if config.splitter.target_r_plus is not None and config.splitter.v0 <= 0:
        violations.append("splitter.v0: calibration searches [0, v0] and needs v0 > 0")
    if config.hexamer.theta_stop <= config.hexamer.theta_start:
        violations.append("hexamer: theta_stop must exceed theta_start")
    return violations


def validate_config(raw: dict[str, Any]) -> list[str]:
    """Every violation of a raw scenario dict, without running anything."""
    try:
        config = ScenarioConfig.model_validate(raw)
    except ValidationError as e:
        return _format_errors(e)
    return cross_field_violations(config)


def load_config(raw: dict[str, Any]) -> ScenarioConfig:
    """Parse and validate a raw scenario dict.

    Raises:
        ConfigError: With the full violation list
    """
    violations = validate_config(raw)
    if violations:
        raise ConfigError(f"Scenario has {len(violations)} violation(s)", violations)
    return ScenarioConfig.model_validate(raw)
