"""Real-space splitter potentials synthesized from FW-picture gates.

A gate V_FW acts on the FW sites; the real-space splitter is V = U G U^dagger.
Columns of U are written through the Bloch kernel

    I(x, s) = h * sum_K sqrt((E_K + s mu)/E_K) e^{iKx/2},   h = 4 pi / N,

summed over the N/2 dimer momenta K in [-pi, pi). For an upper FW site m
(even) and a lower FW site m (odd):

    <n|U|m> = I(n - m - 1, s_n) / (2 pi sqrt 2)           s_n = +1 on even n, -1 on odd n
    <n|U|m> = sigma_n I(n - m + 1, -s_n) / (2 pi sqrt 2)  sigma_n = +1 on even n, -1 on odd n

so each block <n|V|n'> is (1/8 pi^2) sum_m g_m I I*, with the series running
only over the gate support. The continuum integral i_integral is the
N -> infinity limit of the same kernel.
"""

from __future__ import annotations

import csv
import io
import logging
from collections.abc import Iterable
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import special

from quasispin.config import get_settings
from quasispin.physics.base import (
    Boundary,
    GaugeError,
    NotHermitianError,
    OperatorMatrix,
    QuadratureError,
    SplitterError,
)
from quasispin.physics.lattice import LatticeSpec, build_hamiltonian

logger = logging.getLogger(__name__)

MAX_QUADRATURE_POINTS = 1 << 16


class SplitterMode(str, Enum):
    """How the real-space splitter was obtained."""

    ONE_SIDED = "one_sided"
    SYMMETRIC = "symmetric"
    GEOMETRIC = "geometric"


class GateVariant(str, Enum):
    """Which FW components the gate acts on."""

    ONE_SIDED = "one_sided"  # (1 + sigma_3)/2 (x) V_FW
    SYMMETRIC = "symmetric"  # sigma_3 (x) V_FW


class AsymptoticRegime(str, Enum):
    HEAVY = "heavy"  # mu >> Delta
    LIGHT = "light"  # mu << Delta


@dataclass(frozen=True)
class FwGateProfile:
    """Gate energies per dimer index j (FW sites 2j and 2j+1)."""

    values: dict[int, float]

    def __post_init__(self) -> None:
        if not self.values:
            raise SplitterError("Gate profile must have non-empty support")
        indices = sorted(self.values)
        if indices[-1] - indices[0] + 1 != len(indices):
            raise SplitterError(f"Gate support must be contiguous, got {indices}")
        if not all(np.isfinite(v) for v in self.values.values()):
            raise SplitterError("Gate values must be finite")
        object.__setattr__(self, "values", {int(j): float(self.values[j]) for j in indices})

    @property
    def support(self) -> range:
        indices = list(self.values)
        return range(indices[0], indices[-1] + 1)

    @property
    def rho(self) -> int:
        return len(self.values)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(list(self.values), dtype=int), np.array(list(self.values.values()))


@dataclass(frozen=True)
class SplitterMatrix:
    """Real-space splitter potential over a window of sites."""

    v: OperatorMatrix
    mode: SplitterMode
    rho: int
    neighbor_order: int | None = None

    def __post_init__(self) -> None:
        if not self.v.hermitian_flag:
            raise NotHermitianError("Splitter potential must be flagged Hermitian")
        if self.mode is SplitterMode.GEOMETRIC:
            if self.neighbor_order is None:
                raise SplitterError("Geometric splitter needs a neighbor order")
            if np.any(np.diag(self.v.entries) != 0):
                raise SplitterError("Geometric splitter must have zero diagonal")
            if self.v.measured_bandwidth() > self.neighbor_order:
                raise SplitterError(
                    f"Geometric splitter bandwidth exceeds order {self.neighbor_order}"
                )

    @property
    def dim(self) -> int:
        return self.v.dim

    @classmethod
    def zero(cls, dim: int) -> SplitterMatrix:
        return cls(
            v=OperatorMatrix.hermitian(np.zeros((dim, dim)), label="V"),
            mode=SplitterMode.ONE_SIDED,
            rho=0,
        )


@dataclass(frozen=True)
class IIntegralTable:
    """Converged I_n^{s,s'} values for a fixed mass ratio."""

    values: dict[tuple[int, int, int], complex]
    mass_ratio: float
    quadrature_points: int
    errors: dict[tuple[int, int, int], float] = field(default_factory=dict, compare=False)

    def __getitem__(self, key: tuple[int, int, int]) -> complex:
        return self.values[key]


def band_weight(energy: np.ndarray, kinetic_sq: np.ndarray, mass: float, s: int) -> np.ndarray:
    """sqrt((E + s mu)/E), with E - mu written as kinetic_sq/(E + mu); 1 where E = 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        if s > 0:
            w = np.sqrt((energy + mass) / energy)
        else:
            w = np.sqrt(kinetic_sq / (energy * (energy + mass)))
    return np.where(energy == 0.0, 1.0, w)


def _dimer_energy(momenta: np.ndarray, mass: float, hopping: float) -> tuple[np.ndarray, np.ndarray]:
    kinetic_sq = 2.0 * hopping**2 * (1.0 + np.cos(momenta))
    return np.sqrt(kinetic_sq + mass**2), kinetic_sq


@lru_cache(maxsize=16)
def _legendre(points: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = special.roots_legendre(points)
    return np.pi * nodes, np.pi * weights


def _gauss_legendre(offset: float, s: int, mass: float, hopping: float, points: int) -> complex:
    momenta, weights = _legendre(points)
    energy, kinetic_sq = _dimer_energy(momenta, mass, hopping)
    integrand = band_weight(energy, kinetic_sq, mass, s) * np.exp(1j * momenta * offset)
    return complex(np.sum(weights * integrand))


def i_integral(
    n: int,
    s: int,
    s_prime: int,
    mass: float,
    hopping: float = 1.0,
    points: int | None = None,
    tol: float | None = None,
) -> complex:
    """I_n^{s,s'} = int_{-pi}^{pi} dK sqrt((E_K + s mu)/E_K) e^{iK(n - s'/2)}.

    Gauss-Legendre quadrature, doubling the node count until two successive
    estimates agree to tol.

    Raises:
        QuadratureError: If the estimate does not settle below MAX_QUADRATURE_POINTS
    """
    value, _, _ = _converged_i_integral(n, s, s_prime, mass, hopping, points, tol)
    return value


def _converged_i_integral(
    n: int,
    s: int,
    s_prime: int,
    mass: float,
    hopping: float,
    points: int | None,
    tol: float | None,
) -> tuple[complex, float, int]:
    if hopping <= 0:
        raise SplitterError(f"hopping must be positive, got {hopping}")
    settings = get_settings()
    points = points or settings.quadrature_points
    tol = tol if tol is not None else settings.quadrature_tol
    offset = n - 0.5 * s_prime

    previous = _gauss_legendre(offset, s, mass, hopping, points)
    while True:
        points *= 2
        current = _gauss_legendre(offset, s, mass, hopping, points)
        error = abs(current - previous)
        if error <= tol * max(1.0, abs(current)):
            logger.debug("I_%d^{%+d,%+d}: %d points, change %.2e", n, s, s_prime, points, error)
            return current, error, points
        if points >= MAX_QUADRATURE_POINTS:
            raise QuadratureError(
                f"I_{n}^({s},{s_prime}) did not converge with {points} points",
                estimate=current,
                error=error,
            )
        previous = current


def i_integral_table(
    n_values: Iterable[int],
    mass: float,
    hopping: float = 1.0,
    points: int | None = None,
) -> IIntegralTable:
    """All four (s, s') combinations for each n."""
    values: dict[tuple[int, int, int], complex] = {}
    errors: dict[tuple[int, int, int], float] = {}
    used = 0
    for n in n_values:
        for s in (1, -1):
            for s_prime in (1, -1):
                value, error, n_points = _converged_i_integral(n, s, s_prime, mass, hopping, points, None)
                values[(n, s, s_prime)] = value
                errors[(n, s, s_prime)] = error
                used = max(used, n_points)
    return IIntegralTable(values=values, mass_ratio=mass / hopping, quadrature_points=used, errors=errors)


def asymptotic_i_integral(n: int, s: int, s_prime: int, regime: AsymptoticRegime) -> float:
    """Closed forms of I_n^{s,s'} for mu >> Delta (heavy) and mu << Delta (light)."""
    base = 4.0 * s_prime * (-1) ** n / (s_prime - 2 * n)
    if AsymptoticRegime(regime) is AsymptoticRegime.HEAVY:
        return float(np.sqrt(1 + s) * base)
    return float(base)


def dimer_momenta(spec: LatticeSpec) -> np.ndarray:
    """The N/2 dimer momenta K = 2k of the periodic grid, wrapped into [-pi, pi)."""
    k = 2.0 * np.pi * np.arange(spec.n_dimers) / spec.n_sites
    return np.mod(2.0 * k + np.pi, 2.0 * np.pi) - np.pi


def bloch_kernel(spec: LatticeSpec, x: np.ndarray | int, s: int) -> np.ndarray:
    """Lattice I(x, s) = h sum_K sqrt((E_K + s mu)/E_K) e^{iKx/2} for integer x.

    Exact counterpart of i_integral on a periodic chain; I(2n - s', s) tends
    to I_n^{s,s'} as N grows.
    """
    x = np.asarray(x, dtype=float)
    momenta = dimer_momenta(spec)
    energy, kinetic_sq = _dimer_energy(momenta, spec.mass, spec.hopping)
    weights = band_weight(energy, kinetic_sq, spec.mass, s)
    phases = np.exp(0.5j * x[..., None] * momenta)
    step = 4.0 * np.pi / spec.n_sites
    return step * np.sum(weights * phases, axis=-1)


def fw_columns(spec: LatticeSpec, dimers: np.ndarray, upper: bool) -> np.ndarray:
    """Columns U|2j> (upper) or U|2j+1> (lower) for the given dimer indices, shape (N, len)."""
    n = np.arange(spec.n_sites)[:, None]
    even = n % 2 == 0
    x = n - 2 * dimers[None, :] - (1 if upper else 0)
    lowest = int(x.min())
    offsets = np.arange(lowest, int(x.max()) + 1)
    table = {s: bloch_kernel(spec, offsets, s) for s in (1, -1)}
    index = x - lowest
    norm = 1.0 / (2.0 * np.pi * np.sqrt(2.0))
    if upper:
        return norm * np.where(even, table[1][index], table[-1][index])
    return norm * np.where(even, table[-1][index], -table[1][index])


def uniform_gate(center: int, rho: int, v0: float = 2.0) -> FwGateProfile:
    """Barrier of height v0 over rho consecutive dimers centered on `center`."""
    if rho < 1:
        raise SplitterError(f"rho must be >= 1, got {rho}")
    start = center - rho // 2
    return FwGateProfile(values={j: v0 for j in range(start, start + rho)})


def _series_blocks(columns: np.ndarray, gate: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    even = columns[0::2]
    odd = columns[1::2]
    v11 = (even * gate) @ even.conj().T
    v21 = (odd * gate) @ even.conj().T
    v22 = (odd * gate) @ odd.conj().T
    return v11, v21, v22


def potential_blocks(
    gate: FwGateProfile,
    spec: LatticeSpec,
    variant: GateVariant = GateVariant.ONE_SIDED,
) -> SplitterMatrix:
    """Assemble V from the even/even, odd/even and odd/odd block series.

    Args:
        gate: FW-picture gate; dimer indices must lie inside the lattice
        spec: Synthesis lattice (treated as periodic)
        variant: Gate on the upper FW component only, or sigma_3 weighted on both

    Returns:
        Hermitian splitter matrix of dimension N

    Raises:
        SplitterError: If the gate support leaves the lattice
    """
    variant = GateVariant(variant)
    dimers, values = gate.as_arrays()
    if dimers.min() < 0 or dimers.max() >= spec.n_dimers:
        raise SplitterError(
            f"Gate support {dimers.min()}..{dimers.max()} outside 0..{spec.n_dimers - 1}"
        )

    v11, v21, v22 = _series_blocks(fw_columns(spec, dimers, upper=True), values)
    if variant is GateVariant.SYMMETRIC:
        l11, l21, l22 = _series_blocks(fw_columns(spec, dimers, upper=False), values)
        v11, v21, v22 = v11 - l11, v21 - l21, v22 - l22

    n = spec.n_sites
    v = np.zeros((n, n), dtype=complex)
    v[0::2, 0::2] = 0.5 * (v11 + v11.conj().T)
    v[1::2, 1::2] = 0.5 * (v22 + v22.conj().T)
    v[1::2, 0::2] = v21
    v[0::2, 1::2] = v21.conj().T

    logger.debug("Synthesized %s splitter: rho=%d, N=%d", variant.value, gate.rho, n)
    mode = SplitterMode.ONE_SIDED if variant is GateVariant.ONE_SIDED else SplitterMode.SYMMETRIC
    return SplitterMatrix(v=OperatorMatrix.hermitian(v, label="V"), mode=mode, rho=gate.rho)


def geometric_truncate(splitter: SplitterMatrix, neighbor_order: int) -> SplitterMatrix:
    """Drop the diagonal and every coupling beyond neighbor_order."""
    if neighbor_order < 1:
        raise SplitterError(f"neighbor_order must be >= 1, got {neighbor_order}")
    v = np.array(splitter.v.entries)
    rows, cols = np.indices(v.shape)
    distance = np.abs(rows - cols)
    v[(distance == 0) | (distance > neighbor_order)] = 0.0
    return SplitterMatrix(
        v=OperatorMatrix.hermitian(v, label="V_geo", banded=True),
        mode=SplitterMode.GEOMETRIC,
        rho=splitter.rho,
        neighbor_order=neighbor_order,
    )


def synthesize_splitter(
    spec: LatticeSpec,
    rho: int,
    v0: float = 2.0,
    mode: SplitterMode = SplitterMode.ONE_SIDED,
    neighbor_order: int = 2,
    margin: int = 40,
) -> SplitterMatrix:
    """Splitter window ready for embedding: gate centered in a periodic synthesis lattice.

    The window holds 2*rho + 2*margin sites rounded up to a multiple of 4, so
    its middle site is even and the gate center lines up with it.
    """
    mode = SplitterMode(mode)
    size = 2 * rho + 2 * margin
    size += (-size) % 4
    window = LatticeSpec(
        n_sites=max(size, 4),
        hopping=spec.hopping,
        mass=spec.mass,
        mean_onsite=spec.mean_onsite,
        lattice_constant=spec.lattice_constant,
        boundary=Boundary.PERIODIC,
    )
    gate = uniform_gate(window.n_sites // 4, rho, v0)
    variant = GateVariant.SYMMETRIC if mode is SplitterMode.SYMMETRIC else GateVariant.ONE_SIDED
    splitter = potential_blocks(gate, window, variant)
    if mode is SplitterMode.GEOMETRIC:
        splitter = geometric_truncate(splitter, neighbor_order)
    logger.info(
        "Splitter window: %d sites, rho=%d, v0=%.3g, mode=%s", window.n_sites, rho, v0, mode.value
    )
    return splitter


def sign_gauge(h: OperatorMatrix, atol: float = 1e-14) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Diagonal gauge making the first off-diagonal real and nonnegative.

    u_sign = diag(e^{i Delta_n}) with Delta_n = sum_{m<n} arg H_{m+1,m};
    returns (u_sign, u_sign^dagger h u_sign).

    Raises:
        NotHermitianError: If h is not Hermitian
        GaugeError: If a first off-diagonal element vanishes
    """
    if not h.is_hermitian(get_settings().hermitian_tol):
        raise NotHermitianError("sign_gauge requires a Hermitian matrix")
    lower = np.diagonal(h.entries, offset=-1)
    zero = np.flatnonzero(np.abs(lower) <= atol)
    if zero.size:
        raise GaugeError(f"First off-diagonal vanishes at ({zero[0] + 1},{zero[0]}); phase undefined")
    phases = np.concatenate([[0.0], np.cumsum(np.angle(lower))])
    u = np.diag(np.exp(1j * phases))
    gauged = u.conj().T @ h.entries @ u
    return (
        OperatorMatrix(entries=u, label="U_sign"),
        OperatorMatrix.hermitian(0.5 * (gauged + gauged.conj().T), label=h.label),
    )


def assemble_scattering_hamiltonian(
    spec: LatticeSpec,
    splitter: SplitterMatrix,
    center: int,
    min_lead: int | None = None,
) -> OperatorMatrix:
    """H_free of the chain plus the splitter window placed around `center`.

    Raises:
        SplitterError: If the window is misaligned with the sublattices or
            leaves less than min_lead sites on either side
    """
    min_lead = get_settings().edge_sites if min_lead is None else min_lead
    h = np.array(build_hamiltonian(spec).entries)
    width = splitter.dim
    start = center - width // 2
    if start % 2:
        raise SplitterError(f"Splitter window would start on odd site {start}; use an even center")
    if start < min_lead or start + width > spec.n_sites - min_lead:
        raise SplitterError(
            f"Splitter window {start}..{start + width - 1} leaves less than {min_lead} lead sites "
            f"(need n_sites >= {width + 2 * min_lead} centered)"
        )
    h[start : start + width, start : start + width] += splitter.v.entries
    logger.debug("Embedded %d-site splitter at %d..%d", width, start, start + width - 1)
    return OperatorMatrix(
        entries=h,
        hermitian_flag=True,
        label="H_total",
        meta={"window": (start, start + width)},
    )


def locality_profile(v: OperatorMatrix) -> np.ndarray:
    """Frobenius weight of each diagonal |n - n'| = d, d = 0..N-1."""
    n = v.dim
    return np.array([np.linalg.norm(np.diagonal(v.entries, offset=d)) for d in range(n)])


def captured_fraction(v: OperatorMatrix, neighbor_order: int) -> float:
    """Share of the off-diagonal Frobenius weight within neighbor_order."""
    profile = locality_profile(v)
    total = np.sum(profile[1:] ** 2)
    if total == 0:
        return 1.0
    return float(np.sum(profile[1 : neighbor_order + 1] ** 2) / total)


def export_csv(splitter: SplitterMatrix, path: Path | None = None, atol: float = 0.0) -> str:
    """Nonzero entries as CSV rows (row, col, re, im); written to path when given."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["row", "col", "re", "im"])
    entries = splitter.v.entries
    for row, col in zip(*np.nonzero(np.abs(entries) > atol), strict=True):
        z = entries[row, col]
        writer.writerow([int(row), int(col), repr(float(z.real)), repr(float(z.imag))])
    text = buffer.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
