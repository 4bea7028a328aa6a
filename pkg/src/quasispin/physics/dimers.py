"""Level inversion with triangular blocks and the six-site dimer ring.

Hexamer sites are numbered 1..6 in the public surface (0-based internally):
dimers are (1,2), (3,4), (5,6) with the odd sites on the inner triangle.
"""

from __future__ import annotations

import csv
import io
import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from quasispin.config import get_settings
from quasispin.physics.base import LatticeError, OperatorMatrix

logger = logging.getLogger(__name__)

INTRADIMER_BONDS = ((1, 2), (3, 4), (5, 6))
INNER_BONDS = ((1, 3), (1, 5), (3, 5))
OUTER_BONDS = ((1, 6), (2, 3), (4, 5))


@dataclass(frozen=True)
class TriangleBlock:
    """Three mutually coupled sites; sign=-1 flips the (1,3) coupling."""

    e0: float
    delta: float
    sign: int = 1

    def __post_init__(self) -> None:
        if self.delta <= 0:
            raise LatticeError(f"delta must be positive, got {self.delta}")
        if self.sign not in (1, -1):
            raise LatticeError(f"sign must be +1 or -1, got {self.sign}")


@dataclass(frozen=True)
class HexamerCouplings:
    """Intradimer d, inner-triangle f and outer g couplings."""

    d: float
    f: float
    g: float

    @property
    def strong_dimer(self) -> bool:
        return abs(self.d) >= abs(self.f) >= abs(self.g)


@dataclass(frozen=True)
class HexamerSweep:
    """Sorted levels per parameter value plus the singlet/doublet crossing report."""

    thetas: np.ndarray
    levels: np.ndarray
    gaps: np.ndarray
    crossings: list[float]
    labels: list[list[str]]


def triangle_matrix(block: TriangleBlock) -> OperatorMatrix:
    h = np.full((3, 3), block.delta, dtype=float)
    np.fill_diagonal(h, block.e0)
    h[0, 2] = h[2, 0] = block.sign * block.delta
    return OperatorMatrix.hermitian(h, label=f"H{'+' if block.sign > 0 else '-'}_block")


def block_unitary() -> OperatorMatrix:
    """U_block = diag(-1, 1, -1), with U H- U^dagger = 2 e0 - H+."""
    return OperatorMatrix(entries=np.diag([-1.0, 1.0, -1.0]), label="U_block")


def triangle_spectrum(block: TriangleBlock) -> np.ndarray:
    """Eigenvalues in ascending order."""
    return linalg.eigvalsh(triangle_matrix(block).entries.real)


def hexamer_hamiltonian(c: HexamerCouplings) -> OperatorMatrix:
    """6x6 ring of dimers; every pair outside the three bond families is screened (zero)."""
    h = np.zeros((6, 6))
    for value, bonds in ((c.d, INTRADIMER_BONDS), (c.f, INNER_BONDS), (c.g, OUTER_BONDS)):
        for i, j in bonds:
            h[i - 1, j - 1] = h[j - 1, i - 1] = value
    return OperatorMatrix.hermitian(h, label="H_hexamer", banded=True)


def c3_permutation() -> OperatorMatrix:
    """Cyclic relabeling 1->3->5->1, 2->4->6->2 as a permutation matrix."""
    p = np.zeros((6, 6))
    for site in range(6):
        p[(site + 2) % 6, site] = 1.0
    return OperatorMatrix(entries=p, label="C3")


def analytic_levels(c: HexamerCouplings) -> tuple[np.ndarray, np.ndarray]:
    """Singlets f +/- sqrt(f^2 + (d+g)^2) and doublets -f/2 +/- sqrt(f^2/4 + d^2 + g^2 - dg)."""
    singlet_root = np.sqrt(c.f**2 + (c.d + c.g) ** 2)
    doublet_root = np.sqrt(c.f**2 / 4 + c.d**2 + c.g**2 - c.d * c.g)
    singlets = np.array([c.f - singlet_root, c.f + singlet_root])
    doublets = np.array([-c.f / 2 - doublet_root, -c.f / 2 + doublet_root])
    return singlets, doublets


def symmetry_sectors(h: OperatorMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Levels in the C3-invariant sector (singlets) and in its complement (doublets)."""
    p = c3_permutation().entries
    commutator = np.max(np.abs(h.entries @ p - p @ h.entries))
    if commutator > 1e-10:
        logger.warning("Hamiltonian breaks C3 symmetry (|[H, P]| = %.2e)", commutator)
    trivial = (np.eye(6) + p + p @ p) / 3.0
    weights, basis = linalg.eigh(trivial)
    inside = basis[:, weights > 0.5]
    outside = basis[:, weights <= 0.5]
    singlets = linalg.eigvalsh(inside.conj().T @ h.entries @ inside)
    doublets = linalg.eigvalsh(outside.conj().T @ h.entries @ outside)
    return singlets, doublets


def degeneracy_pattern(eigenvalues: Sequence[float] | np.ndarray, tol: float) -> list[int]:
    """Cluster sizes of sorted eigenvalues; neighbors closer than tol share a cluster."""
    values = np.sort(np.asarray(eigenvalues, dtype=float))
    if values.size == 0:
        return []
    sizes = [1]
    for previous, current in zip(values[:-1], values[1:], strict=True):
        if current - previous < tol:
            sizes[-1] += 1
        else:
            sizes.append(1)
    return sizes


def degeneracy_labels(eigenvalues: np.ndarray, tol: float) -> list[str]:
    """Per-level label: S (singlet), D (doublet) or the cluster size."""
    names = {1: "S", 2: "D"}
    labels: list[str] = []
    for size in degeneracy_pattern(eigenvalues, tol):
        labels.extend([names.get(size, str(size))] * size)
    return labels


def degeneracy_tolerance(h: OperatorMatrix) -> float:
    return get_settings().degeneracy_rtol * max(float(np.linalg.norm(h.entries, 2)), 1e-300)


def crossing_gap(c: HexamerCouplings) -> float:
    """Lowest singlet minus lowest doublet; its sign change marks the diabolic point."""
    singlets, doublets = symmetry_sectors(hexamer_hamiltonian(c))
    return float(singlets.min() - doublets.min())


def spectrum_sweep(
    coupling_curve: Callable[[float], HexamerCouplings],
    thetas: Sequence[float] | np.ndarray,
) -> HexamerSweep:
    """Levels over a parameter grid and every sign change of the crossing gap.

    Crossings are located by linear interpolation between grid points. An
    empty crossing list is a valid outcome and is logged.
    """
    thetas = np.asarray(thetas, dtype=float)
    levels = []
    gaps = []
    labels = []
    asymmetry = 0.0
    for theta in thetas:
        couplings = coupling_curve(float(theta))
        h = hexamer_hamiltonian(couplings)
        eigenvalues = linalg.eigvalsh(h.entries.real)
        levels.append(eigenvalues)
        gaps.append(crossing_gap(couplings))
        labels.append(degeneracy_labels(eigenvalues, degeneracy_tolerance(h)))
        asymmetry = max(asymmetry, float(np.max(np.abs(eigenvalues + eigenvalues[::-1]))))

    gap_array = np.array(gaps)
    crossings = []
    for i in range(len(thetas) - 1):
        a, b = gap_array[i], gap_array[i + 1]
        if a == 0.0:
            crossings.append(float(thetas[i]))
        elif a * b < 0:
            crossings.append(float(thetas[i] - a * (thetas[i + 1] - thetas[i]) / (b - a)))
    if len(thetas) and gap_array[-1] == 0.0:
        crossings.append(float(thetas[-1]))

    if crossings:
        logger.info("Singlet/doublet crossing at theta = %s", ", ".join(f"{t:.3f}" for t in crossings))
    else:
        logger.warning("No level crossing on the %d-point grid", len(thetas))
    if asymmetry > 1e-9:
        logger.warning("Levels are not symmetric about zero (max |E_i + E_-i| = %.3e)", asymmetry)

    return HexamerSweep(
        thetas=thetas,
        levels=np.array(levels).reshape(len(thetas), 6),
        gaps=gap_array,
        crossings=crossings,
        labels=labels,
    )


def linear_coupling_curve(
    start: HexamerCouplings, end: HexamerCouplings
) -> Callable[[float], HexamerCouplings]:
    """Straight interpolation for theta in [0, 1]."""

    def curve(theta: float) -> HexamerCouplings:
        return HexamerCouplings(
            d=start.d + theta * (end.d - start.d),
            f=start.f + theta * (end.f - start.f),
            g=start.g + theta * (end.g - start.g),
        )

    return curve


def dimer_sites(theta_deg: float, ring_radius: float, dimer_length: float) -> np.ndarray:
    """Site positions (6, 2): dimer centers on a C3 ring, each dimer tilted by theta.

    theta = 0 points every dimer radially with the odd site inside.
    """
    theta = np.deg2rad(theta_deg)
    positions = np.zeros((6, 2))
    for j in range(3):
        angle = 2.0 * np.pi * j / 3.0
        center = ring_radius * np.array([np.cos(angle), np.sin(angle)])
        axis = np.array([np.cos(angle + theta), np.sin(angle + theta)])
        positions[2 * j] = center - 0.5 * dimer_length * axis
        positions[2 * j + 1] = center + 0.5 * dimer_length * axis
    return positions


def exponential_overlap_curve(
    xi: float,
    ring_radius: float = 1.0,
    dimer_length: float = 0.6,
    strength: float = 1.0,
) -> Callable[[float], HexamerCouplings]:
    """Couplings strength * exp(-r/xi) from the tilted-ring geometry, theta in degrees."""
    if xi <= 0:
        raise LatticeError(f"xi must be positive, got {xi}")

    def curve(theta_deg: float) -> HexamerCouplings:
        sites = dimer_sites(theta_deg, ring_radius, dimer_length)

        def coupling(i: int, j: int) -> float:
            return float(strength * np.exp(-np.linalg.norm(sites[i - 1] - sites[j - 1]) / xi))

        return HexamerCouplings(d=coupling(1, 2), f=coupling(1, 3), g=coupling(2, 3))

    return curve


def level_table_csv(sweep: HexamerSweep) -> str:
    """CSV text with columns theta, E1..E6, labels."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["theta", *(f"E{i}" for i in range(1, 7)), "labels"])
    for theta, levels, labels in zip(sweep.thetas, sweep.levels, sweep.labels, strict=True):
        writer.writerow([repr(float(theta)), *(repr(float(e)) for e in levels), "".join(labels)])
    return buffer.getvalue()
