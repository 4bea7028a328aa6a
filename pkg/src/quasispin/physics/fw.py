"""Exact lattice Foldy-Wouthuysen transform and band projectors.

The unitary is built in the plane-wave basis of each sublattice. With the
reduced momentum folded into [-pi/2, pi/2), dimer momentum phi = 2k lies in
[-pi, pi) and the half-phase e^{-i phi/2} is e^{-ik} on that branch:

    U |e_k> = e^{-ik} |k,+>      U |o_k> = e^{+ik} |k,->

so U^dagger H U is block diagonal with the upper band on the even sites.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy import linalg

from quasispin.physics.base import (
    Boundary,
    DimensionError,
    LatticeError,
    OperatorMatrix,
    WavePacket,
)
from quasispin.physics.lattice import (
    LatticeSpec,
    bloch_spinor,
    build_hamiltonian,
    half_angle_weights,
    k_grid,
    sublattice_potential,
)

logger = logging.getLogger(__name__)


class FwDirection(str, Enum):
    """Forward maps site amplitudes into the FW picture; inverse maps back."""

    FORWARD = "forward"
    INVERSE = "inverse"


@dataclass(frozen=True)
class FwOperators:
    """FW unitary, block-diagonal Hamiltonian and the half-angle operator functions."""

    u_fw: OperatorMatrix
    h_fw: OperatorMatrix
    cos_half_theta: OperatorMatrix
    sin_half_theta: OperatorMatrix
    cos_half_phi: OperatorMatrix
    sin_half_phi: OperatorMatrix

    @property
    def dim(self) -> int:
        return self.u_fw.dim


@dataclass(frozen=True)
class BandProjectors:
    """Projectors onto the upper (s=+1) and lower (s=-1) bands."""

    p_plus: OperatorMatrix
    p_minus: OperatorMatrix

    def for_band(self, s: int) -> OperatorMatrix:
        return self.p_plus if s > 0 else self.p_minus

    def band_weight(self, psi: np.ndarray, s: int) -> float:
        """<psi|P_s|psi> for a site-basis vector."""
        projected = self.for_band(s).entries @ psi
        return float(np.real(np.vdot(projected, projected)))


def folded_momenta(spec: LatticeSpec) -> np.ndarray:
    """Grid momenta mapped into [-pi/2, pi/2), where cos k >= 0."""
    k = k_grid(spec)
    return np.where(k < 0.5 * np.pi, k, k - np.pi)


def sublattice_plane_waves(spec: LatticeSpec, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Columns |e_k> and |o_k>: normalized e^{ikm} restricted to even/odd sites."""
    sites = np.arange(spec.n_sites)[:, None]
    waves = np.sqrt(2.0 / spec.n_sites) * np.exp(1j * sites * k[None, :])
    even = np.where(sites % 2 == 0, waves, 0.0)
    odd = np.where(sites % 2 == 1, waves, 0.0)
    return even, odd


def _check_fw_compatible(spec: LatticeSpec, onsite: np.ndarray | None) -> None:
    if spec.boundary is not Boundary.PERIODIC:
        raise LatticeError("FW construction requires periodic boundary")
    if onsite is None:
        return
    onsite = np.asarray(onsite, dtype=float)
    if onsite.shape != (spec.n_sites,) or not np.allclose(onsite, sublattice_potential(spec), atol=1e-12):
        raise LatticeError("FW construction requires the uniform bipartite potential E0 +/- mu")


def _plane_wave_function(even: np.ndarray, odd: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Operator diagonal in the plane-wave basis with the given eigenvalues on both sublattices."""
    return (even * values) @ even.conj().T + (odd * values) @ odd.conj().T


def build_fw(spec: LatticeSpec, onsite: np.ndarray | None = None) -> FwOperators:
    """Construct U_FW and H_FW = U^dagger H U for a periodic bipartite chain.

    Args:
        spec: Lattice parameters (periodic boundary)
        onsite: Optional onsite list; must equal the E0 +/- mu pattern

    Returns:
        FW operators; the even-site block of h_fw carries the upper band

    Raises:
        LatticeError: If the boundary is open or the potential is not bipartite
    """
    _check_fw_compatible(spec, onsite)

    k = folded_momenta(spec)
    even, odd = sublattice_plane_waves(spec, k)
    u_plus_up, u_minus_up = bloch_spinor(spec, k, 1)
    u_plus_dn, u_minus_dn = bloch_spinor(spec, k, -1)

    upper = (even * u_plus_up + odd * u_minus_up) * np.exp(-1j * k)
    lower = (even * u_plus_dn + odd * u_minus_dn) * np.exp(1j * k)
    bloch = np.hstack([upper, lower])
    plane = np.hstack([even, odd])
    u_fw = bloch @ plane.conj().T

    h = build_hamiltonian(spec).entries
    h_fw = u_fw.conj().T @ h @ u_fw
    h_fw = 0.5 * (h_fw + h_fw.conj().T)

    cos_theta, sin_theta = half_angle_weights(spec, k)
    logger.debug("Built FW transform for N=%d, mu=%.4g", spec.n_sites, spec.mass)

    return FwOperators(
        u_fw=OperatorMatrix(entries=u_fw, label="U_FW"),
        h_fw=OperatorMatrix.hermitian(h_fw, label="H_FW"),
        cos_half_theta=OperatorMatrix.hermitian(_plane_wave_function(even, odd, cos_theta), label="cos(theta/2)"),
        sin_half_theta=OperatorMatrix.hermitian(_plane_wave_function(even, odd, sin_theta), label="sin(theta/2)"),
        cos_half_phi=OperatorMatrix.hermitian(_plane_wave_function(even, odd, np.cos(k)), label="cos(phi/2)"),
        sin_half_phi=OperatorMatrix.hermitian(_plane_wave_function(even, odd, np.sin(k)), label="sin(phi/2)"),
    )


def band_projectors(spec: LatticeSpec, onsite: np.ndarray | None = None) -> BandProjectors:
    """P_s = sum_k |k,s><k,s| from the analytic Bloch states."""
    _check_fw_compatible(spec, onsite)

    k = folded_momenta(spec)
    even, odd = sublattice_plane_waves(spec, k)
    projectors = []
    for s in (1, -1):
        u_plus, u_minus = bloch_spinor(spec, k, s)
        states = even * u_plus + odd * u_minus
        p = states @ states.conj().T
        projectors.append(OperatorMatrix.hermitian(0.5 * (p + p.conj().T), label=f"P{'+' if s > 0 else '-'}"))
    return BandProjectors(p_plus=projectors[0], p_minus=projectors[1])


def projectors_from_fw(fw: FwOperators) -> BandProjectors:
    """P_s = U ((1 + s beta)/2) U^dagger; cross-check of the spectral form."""
    u = fw.u_fw.entries
    even_mask = (np.arange(fw.dim) % 2 == 0).astype(float)
    p_plus = (u * even_mask) @ u.conj().T
    p_minus = (u * (1.0 - even_mask)) @ u.conj().T
    return BandProjectors(
        p_plus=OperatorMatrix.hermitian(0.5 * (p_plus + p_plus.conj().T), label="P+"),
        p_minus=OperatorMatrix.hermitian(0.5 * (p_minus + p_minus.conj().T), label="P-"),
    )


def spectral_projectors(h: OperatorMatrix, e0: float = 0.0) -> BandProjectors:
    """Projectors onto eigenvectors of h above and below e0.

    Only meaningful when no eigenvalue sits at e0 (mu > 0 for the bipartite chain).
    """
    energies, vectors = linalg.eigh(h.entries)
    above = energies > e0
    upper = vectors[:, above]
    lower = vectors[:, ~above]
    return BandProjectors(
        p_plus=OperatorMatrix.hermitian(upper @ upper.conj().T, label="P+"),
        p_minus=OperatorMatrix.hermitian(lower @ lower.conj().T, label="P-"),
    )


def apply_fw(fw: FwOperators, state: WavePacket, direction: FwDirection = FwDirection.FORWARD) -> WavePacket:
    """Map a state into (forward, U^dagger psi) or out of (inverse, U psi) the FW picture.

    Raises:
        DimensionError: If the state does not match the operator size
    """
    if state.dim != fw.dim:
        raise DimensionError(f"State has {state.dim} sites, FW operators have {fw.dim}")
    u = fw.u_fw.entries
    if FwDirection(direction) is FwDirection.FORWARD:
        amplitudes = u.conj().T @ state.amplitudes
    else:
        amplitudes = u @ state.amplitudes
    return replace(state, amplitudes=amplitudes)
