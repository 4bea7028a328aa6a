"""Bipartite tight-binding chain in exact Dirac form.

Sites are labelled n = 0..N-1; even sites carry the upper quasispin
component, odd sites the lower one, and dimer j holds sites (2j, 2j+1).
The translation operator acts as T|n> = |n+1>.

Sign convention: Pi_2 = i(T^2 - T^dagger^2)/2, so a plane wave e^{ikn} has
Pi_2 eigenvalue sin 2k and H = Delta (alpha_1 Pi_1 + alpha_2 Pi_2) + mu beta + E0
holds exactly with [alpha_1, alpha_2] = 2i beta.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from quasispin.physics.base import Boundary, LatticeError, OperatorMatrix

logger = logging.getLogger(__name__)

MIN_SITES = 4
GRID_TOL = 1e-9


@dataclass(frozen=True)
class LatticeSpec:
    """Scalar parameters of the chain (energies in units of Delta)."""

    n_sites: int
    hopping: float = 1.0
    mass: float = 0.0
    mean_onsite: float = 0.0
    lattice_constant: float = 1.0
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self) -> None:
        if self.n_sites < MIN_SITES or self.n_sites % 2:
            raise LatticeError(f"n_sites must be even and >= {MIN_SITES}, got {self.n_sites}")
        if self.hopping <= 0:
            raise LatticeError(f"hopping must be positive, got {self.hopping}")
        if self.mass < 0:
            raise LatticeError(f"mass must be non-negative, got {self.mass}")
        if self.lattice_constant <= 0:
            raise LatticeError(f"lattice_constant must be positive, got {self.lattice_constant}")
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @property
    def n_dimers(self) -> int:
        return self.n_sites // 2

    def with_boundary(self, boundary: Boundary) -> LatticeSpec:
        """Same parameters, different boundary."""
        return LatticeSpec(
            n_sites=self.n_sites,
            hopping=self.hopping,
            mass=self.mass,
            mean_onsite=self.mean_onsite,
            lattice_constant=self.lattice_constant,
            boundary=boundary,
        )


@dataclass(frozen=True)
class BlochBand:
    """Analytic eigenpair data; spinor amplitudes normalized to 1 per dimer."""

    k: float
    s: int
    energy: float
    u_plus: complex
    u_minus: complex


@dataclass(frozen=True)
class DiracOperators:
    """Kinetic operators and Dirac matrices of the chain."""

    pi1: OperatorMatrix
    pi2: OperatorMatrix
    alpha1: OperatorMatrix
    alpha2: OperatorMatrix
    beta: OperatorMatrix
    exact: bool

    def assemble(self, spec: LatticeSpec) -> np.ndarray:
        """Delta (alpha . Pi) + mu beta + E0 as a dense array."""
        kinetic = self.alpha1 @ self.pi1 + self.alpha2 @ self.pi2
        return (
            spec.hopping * kinetic
            + spec.mass * self.beta.entries
            + spec.mean_onsite * np.eye(spec.n_sites)
        )


@dataclass(frozen=True)
class ConicalCheck:
    """Pi eigenvalues near the conical point against their expansion."""

    kappa: float
    p1: float
    p2: float
    p1_expansion: float
    p2_expansion: float
    bulk_residual: float = 0.0

    @property
    def error(self) -> float:
        return max(abs(self.p1 - self.p1_expansion), abs(self.p2 - self.p2_expansion))


def sublattice_potential(spec: LatticeSpec) -> np.ndarray:
    """Onsite energies E0 + mu on even sites and E0 - mu on odd sites."""
    signs = np.where(np.arange(spec.n_sites) % 2 == 0, 1.0, -1.0)
    return spec.mean_onsite + spec.mass * signs


def translation_operator(spec: LatticeSpec) -> OperatorMatrix:
    """T|n> = |n+1>; the last site wraps only under periodic boundary."""
    n = spec.n_sites
    t = np.zeros((n, n), dtype=complex)
    idx = np.arange(n - 1)
    t[idx + 1, idx] = 1.0
    if spec.boundary is Boundary.PERIODIC:
        t[0, n - 1] = 1.0
    return OperatorMatrix(entries=t, label="T")


def build_hamiltonian(spec: LatticeSpec, onsite: np.ndarray | list[float] | None = None) -> OperatorMatrix:
    """Nearest-neighbor Hamiltonian with hopping Delta and the given onsite energies.

    Args:
        spec: Lattice parameters
        onsite: Per-site energies; defaults to the bipartite E0 +/- mu pattern

    Returns:
        Hermitian banded operator

    Raises:
        LatticeError: If onsite has the wrong length
    """
    if onsite is None:
        onsite = sublattice_potential(spec)
    onsite = np.asarray(onsite, dtype=float)
    if onsite.shape != (spec.n_sites,):
        raise LatticeError(
            f"onsite length {onsite.shape[0] if onsite.ndim else 0} != n_sites {spec.n_sites}"
        )

    t = translation_operator(spec).entries
    h = spec.hopping * (t + t.conj().T) + np.diag(onsite)
    logger.debug("Built %dx%d Hamiltonian (%s)", spec.n_sites, spec.n_sites, spec.boundary.value)
    return OperatorMatrix(entries=h, hermitian_flag=True, label="H")


def build_dirac_operators(spec: LatticeSpec) -> DiracOperators:
    """Pi_1, Pi_2, alpha_1, alpha_2 and beta for the chain.

    Under open boundary the Dirac identity only holds in the bulk; the
    result is flagged with exact=False.
    """
    n = spec.n_sites
    t = translation_operator(spec).entries
    t2 = t @ t
    t2_dag = t2.conj().T
    eye = np.eye(n, dtype=complex)

    pi1 = eye + 0.5 * (t2 + t2_dag)
    pi2 = 0.5j * (t2 - t2_dag)

    # sigma_minus: even -> next odd site; sigma_plus = sigma_minus^dagger
    sigma_minus = np.zeros((n, n), dtype=complex)
    even = np.arange(0, n, 2)
    sigma_minus[even + 1, even] = 1.0
    sigma_plus = sigma_minus.conj().T

    alpha1 = sigma_minus + sigma_plus
    alpha2 = 1j * (sigma_minus - sigma_plus)
    beta = np.diag(np.where(np.arange(n) % 2 == 0, 1.0, -1.0)).astype(complex)

    exact = spec.boundary is Boundary.PERIODIC
    if not exact:
        logger.warning("Open boundary: Dirac form of H holds only away from the edges")

    return DiracOperators(
        pi1=OperatorMatrix(entries=pi1, hermitian_flag=True, label="Pi1"),
        pi2=OperatorMatrix(entries=pi2, hermitian_flag=True, label="Pi2"),
        alpha1=OperatorMatrix(entries=alpha1, hermitian_flag=True, label="alpha1"),
        alpha2=OperatorMatrix(entries=alpha2, hermitian_flag=True, label="alpha2"),
        beta=OperatorMatrix(entries=beta, hermitian_flag=True, label="beta"),
        exact=exact,
    )


def band_gap_energy(spec: LatticeSpec, k: float | np.ndarray) -> np.ndarray:
    """E_k = sqrt(4 Delta^2 cos^2 k + mu^2)."""
    k = np.asarray(k, dtype=float)
    return np.sqrt(4.0 * spec.hopping**2 * np.cos(k) ** 2 + spec.mass**2)


def dispersion(spec: LatticeSpec, k: float | np.ndarray, s: int) -> float | np.ndarray:
    """E_{k,s} = E0 + s sqrt(4 Delta^2 cos^2 k + mu^2)."""
    energy = spec.mean_onsite + s * band_gap_energy(spec, k)
    return float(energy) if np.ndim(energy) == 0 else energy


def k_grid(spec: LatticeSpec) -> np.ndarray:
    """Reduced-zone grid k_j = 2 pi j / N, j = 0..N/2-1."""
    return 2.0 * np.pi * np.arange(spec.n_dimers) / spec.n_sites


def half_angle_weights(spec: LatticeSpec, k: float | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """cos(theta/2) = sqrt((E+mu)/2E) and sin(theta/2) = sqrt((E-mu)/2E).

    E - mu is evaluated as 4 Delta^2 cos^2 k / (E + mu) to avoid cancellation;
    at the massless band touching (E = 0) both weights are 1/sqrt(2).
    """
    k = np.asarray(k, dtype=float)
    gap = band_gap_energy(spec, k)
    kinetic_sq = 4.0 * spec.hopping**2 * np.cos(k) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        cos_half = np.sqrt((gap + spec.mass) / (2.0 * gap))
        sin_half = np.sqrt(kinetic_sq / ((gap + spec.mass) * 2.0 * gap))
    touching = gap == 0.0
    cos_half = np.where(touching, np.sqrt(0.5), cos_half)
    sin_half = np.where(touching, np.sqrt(0.5), sin_half)
    return cos_half, sin_half


def bloch_spinor(spec: LatticeSpec, k: float | np.ndarray, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Spinor amplitudes (u+, u-) of band s in the site-phase convention.

    psi_m = e^{ikm} u+ on even m and e^{ikm} u- on odd m, with
    |u+|^2 + |u-|^2 = 1.
    """
    if s not in (1, -1):
        raise LatticeError(f"band sign must be +1 or -1, got {s}")
    c, w = half_angle_weights(spec, k)
    sign = np.where(np.cos(np.asarray(k, dtype=float)) >= 0.0, 1.0, -1.0)
    if s == 1:
        return c.astype(complex), (sign * w).astype(complex)
    return w.astype(complex), (-sign * c).astype(complex)


def _check_on_grid(spec: LatticeSpec, k: float) -> None:
    j = k * spec.n_sites / (2.0 * np.pi)
    if abs(j - round(j)) > GRID_TOL:
        raise LatticeError(f"k={k} is not on the periodic grid 2*pi*j/{spec.n_sites}")


def bloch_state(spec: LatticeSpec, k: float, s: int) -> tuple[BlochBand, np.ndarray]:
    """Analytic Bloch eigenpair and its normalized site-basis vector.

    Raises:
        LatticeError: If k is off the discrete grid under periodic boundary
    """
    if spec.boundary is Boundary.PERIODIC:
        _check_on_grid(spec, k)
    u_plus, u_minus = bloch_spinor(spec, k, s)
    sites = np.arange(spec.n_sites)
    amplitudes = np.where(sites % 2 == 0, complex(u_plus), complex(u_minus))
    vector = np.sqrt(2.0 / spec.n_sites) * np.exp(1j * k * sites) * amplitudes
    band = BlochBand(
        k=float(k),
        s=s,
        energy=float(dispersion(spec, k, s)),
        u_plus=complex(u_plus),
        u_minus=complex(u_minus),
    )
    return band, vector


def conical_expansion_check(spec: LatticeSpec, kappa: float) -> ConicalCheck:
    """Pi eigenvalues at k = pi/2 - kappa/2 read off the built operators.

    Pi_1 and Pi_2 of the periodic twin act on the plane wave e^{ikn}; away from
    the two wrap rows each entry is the wave times its eigenvalue, exactly
    1 - cos(kappa) and sin(kappa) for any k on or off the grid. The expansion
    is p1 ~ kappa^2/2 (Pi_1 is positive semidefinite) and p2 ~ kappa, both
    correct to O(kappa^3).
    """
    k = 0.5 * np.pi - 0.5 * kappa
    operators = build_dirac_operators(spec.with_boundary(Boundary.PERIODIC))
    wave = np.exp(1j * k * np.arange(spec.n_sites))
    bulk = slice(2, spec.n_sites - 2)
    eigenvalues = []
    residual = 0.0
    for operator in (operators.pi1, operators.pi2):
        image = (operator.entries @ wave)[bulk]
        value = float(np.mean(image / wave[bulk]).real)
        residual = max(residual, float(np.max(np.abs(image - value * wave[bulk]))))
        eigenvalues.append(value)
    return ConicalCheck(
        kappa=kappa,
        p1=eigenvalues[0],
        p2=eigenvalues[1],
        p1_expansion=0.5 * kappa**2,
        p2_expansion=kappa,
        bulk_residual=residual,
    )
