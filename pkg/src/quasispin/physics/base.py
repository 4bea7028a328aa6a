"""Shared types and the exception hierarchy for the physics layer."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np


class Boundary(str, Enum):
    """Boundary condition of the chain."""

    PERIODIC = "periodic"
    OPEN = "open"


class QuasispinError(Exception):
    """Base exception for the library."""

    pass


class LatticeError(QuasispinError, ValueError):
    """Invalid lattice parameters or lattice-incompatible input."""

    pass


class DimensionError(QuasispinError, ValueError):
    """Operator or state dimensions do not match."""

    pass


class NotHermitianError(QuasispinError, ValueError):
    """A Hermitian operator was required."""

    pass


class QuadratureError(QuasispinError):
    """Quadrature did not converge to the requested tolerance."""

    def __init__(self, message: str, estimate: complex, error: float) -> None:
        self.estimate = estimate
        self.error = error
        super().__init__(message)


class SplitterError(QuasispinError, ValueError):
    """Splitter synthesis or embedding failed."""

    pass


class GaugeError(QuasispinError, ValueError):
    """The sign gauge is undefined for the supplied matrix."""

    pass


class PacketError(QuasispinError, ValueError):
    """Wave packet does not fit the lattice."""

    pass


class DynamicsError(QuasispinError):
    """A propagation run was aborted."""

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None) -> None:
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class EdgeContaminationError(DynamicsError):
    """Probability reached the lattice edges during a run."""

    pass


class SeparationError(DynamicsError):
    """Outgoing lobes never separated from the splitter."""

    pass


class TraceError(QuasispinError, ValueError):
    """A time trace is unsuitable for analysis."""

    pass


class AliasingError(TraceError):
    """Sampling is too coarse for the predicted frequencies."""

    pass


class FitError(TraceError):
    """Not enough features to fit."""

    pass


class ConfigError(QuasispinError):
    """Scenario configuration failed validation."""

    def __init__(self, message: str, violations: list[str] | None = None) -> None:
        self.violations = violations or []
        super().__init__(message)


NORM_TOL = 1e-8


@dataclass(frozen=True)
class WavePacket:
    """State vector over the site basis at a given time (units of hbar/Delta)."""

    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self) -> None:
        amplitudes = np.array(self.amplitudes, dtype=complex)
        if amplitudes.ndim != 1:
            raise DimensionError(f"Amplitudes must be a vector, got shape {amplitudes.shape}")
        if abs(np.linalg.norm(amplitudes) - 1.0) > NORM_TOL:
            raise PacketError(f"Wave packet is not normalized (norm={np.linalg.norm(amplitudes):.3e})")
        amplitudes.flags.writeable = False
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.shape[0])

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def _bandwidth(entries: np.ndarray, atol: float = 0.0) -> int:
    rows, cols = np.nonzero(np.abs(entries) > atol)
    if rows.size == 0:
        return 0
    return int(np.max(np.abs(rows - cols)))


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense operator over the site basis.

    Entries are frozen (read-only array) after construction so instances can
    be shared between threads.
    """

    entries: np.ndarray
    hermitian_flag: bool = False
    bandwidth: int | None = None
    label: str = ""
    meta: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionError(f"Operator must be square, got shape {entries.shape}")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)
        if self.hermitian_flag and not self.is_hermitian():
            raise NotHermitianError(f"Operator {self.label or '?'} is not Hermitian")
        if self.bandwidth is not None and _bandwidth(entries) > self.bandwidth:
            raise DimensionError(
                f"Nonzero entries exceed declared bandwidth {self.bandwidth}"
            )

    @classmethod
    def hermitian(cls, entries: np.ndarray, label: str = "", banded: bool = False) -> OperatorMatrix:
        """Build a Hermitian operator, optionally annotated with its bandwidth."""
        entries = np.asarray(entries, dtype=complex)
        return cls(
            entries=entries,
            hermitian_flag=True,
            bandwidth=_bandwidth(entries) if banded else None,
            label=label,
        )

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        """Check entries against their conjugate transpose."""
        return bool(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0) <= tol)

    def measured_bandwidth(self, atol: float = 0.0) -> int:
        """Max |row - col| over entries larger than atol."""
        return _bandwidth(self.entries, atol)

    def __matmul__(self, other: OperatorMatrix | np.ndarray) -> np.ndarray:
        if isinstance(other, OperatorMatrix):
            return self.entries @ other.entries
        return self.entries @ other

    def to_text(self) -> str:
        """Plain-text dense dump: one row per line, 're,im' pairs separated by spaces."""
        lines = [
            " ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row) for row in self.entries
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, label: str = "") -> OperatorMatrix:
        """Parse the format written by to_text."""
        rows = []
        for line in text.strip().splitlines():
            pairs = [item.split(",") for item in line.split()]
            rows.append([complex(float(re), float(im)) for re, im in pairs])
        return cls(entries=np.array(rows, dtype=complex), label=label)
