"""Wave packets, unitary propagation and band-resolved scattering observables."""

from __future__ import annotations

import logging
import time
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any

import numpy as np
from joblib import Parallel, delayed
from scipy import linalg, optimize

from quasispin.config import get_settings
from quasispin.physics.base import (
    DimensionError,
    DynamicsError,
    EdgeContaminationError,
    NotHermitianError,
    OperatorMatrix,
    PacketError,
    SeparationError,
    SplitterError,
    WavePacket,
)
from quasispin.physics.fw import BandProjectors
from quasispin.physics.lattice import LatticeSpec, band_gap_energy
from quasispin.physics.splitter import (
    SplitterMatrix,
    SplitterMode,
    assemble_scattering_hamiltonian,
    synthesize_splitter,
)

logger = logging.getLogger(__name__)

EDGE_PACKET_TOL = 1e-8
WINDOW_TOL = 0.01
TIME_BATCH = 256


class PacketMode(str, Enum):
    """How the initial state is prepared."""

    BAND = "band"  # band-projected Gaussians with opposite kicks
    SUBLATTICE = "sublattice"  # Gaussian on the even sublattice only (unpolarized)
    DIMER = "dimer"  # (|c> + i|c+1>)/sqrt(2) on one dimer; width and kick unused


class CollisionEstimate(str, Enum):
    """How the collision time is estimated."""

    LATTICE = "lattice"  # T_c = N / (2 Delta kick)
    GROUP_VELOCITY = "group_velocity"  # packet center to splitter at the kick group velocity


@dataclass(frozen=True)
class WavePacketSpec:
    """Gaussian packet parameters; band weights multiply the P+ and P- components."""

    width: float
    kick: float
    center: int
    band_weights: tuple[complex, complex] = (1 / np.sqrt(2), 1 / np.sqrt(2))
    mode: PacketMode = PacketMode.BAND

    def __post_init__(self) -> None:
        if self.width < 2:
            raise PacketError(f"width must be >= 2 sites, got {self.width}")
        if not 0 < self.kick < np.pi:
            raise PacketError(f"kick must lie in (0, pi), got {self.kick}")
        w_plus, w_minus = self.band_weights
        if abs(abs(w_plus) ** 2 + abs(w_minus) ** 2 - 1.0) > 1e-10:
            raise PacketError("band weights must satisfy |w+|^2 + |w-|^2 = 1")
        object.__setattr__(self, "mode", PacketMode(self.mode))

    @property
    def w_plus(self) -> complex:
        return complex(self.band_weights[0])

    @property
    def w_minus(self) -> complex:
        return complex(self.band_weights[1])


@dataclass(frozen=True)
class ScatteringResult:
    """Band-resolved reflection and transmission at the first separated output time."""

    r_plus: float
    t_plus: float
    r_minus: float
    t_minus: float
    partition_site: int
    collision_time: float
    arrival_time: float
    separation_time: float
    band_weight_initial: tuple[float, float]
    band_weight_final: tuple[float, float]
    diagnostics: dict[str, Any] = field(default_factory=dict, compare=False)
    trace: dict[str, np.ndarray] = field(default_factory=dict, compare=False, repr=False)
    snapshots: list[tuple[float, np.ndarray, np.ndarray, np.ndarray]] = field(
        default_factory=list, compare=False, repr=False
    )

    @property
    def band_weight_lost(self) -> tuple[float, float]:
        """Initial minus final band weight; R_s + T_s = 1 - lost_s / initial_s."""
        plus = self.band_weight_initial[0] - self.band_weight_final[0]
        minus = self.band_weight_initial[1] - self.band_weight_final[1]
        return plus, minus

    def summary(self) -> dict[str, float | int]:
        return {
            "r_plus": self.r_plus,
            "t_plus": self.t_plus,
            "r_minus": self.r_minus,
            "t_minus": self.t_minus,
            "partition_site": self.partition_site,
            "collision_time": self.collision_time,
            "arrival_time": self.arrival_time,
            "separation_time": self.separation_time,
            "band_weight_plus": self.band_weight_final[0],
            "band_weight_minus": self.band_weight_final[1],
            "band_weight_lost_plus": self.band_weight_lost[0],
            "band_weight_lost_minus": self.band_weight_lost[1],
        }


def position_operator(spec: LatticeSpec) -> OperatorMatrix:
    """Dimer position X|n> = a * floor(n/2) |n>; X|4> = 2a|4>."""
    positions = spec.lattice_constant * (np.arange(spec.n_sites) // 2)
    return OperatorMatrix(entries=np.diag(positions), hermitian_flag=True, label="X")


def position_expectation(psi: WavePacket, spec: LatticeSpec) -> float:
    """<X> = (a/2) sum_{n even} n (|psi_n|^2 + |psi_{n+1}|^2)."""
    if psi.dim != spec.n_sites:
        raise DimensionError(f"State has {psi.dim} sites, lattice has {spec.n_sites}")
    positions = spec.lattice_constant * (np.arange(spec.n_sites) // 2)
    return float(positions @ psi.probabilities)


def group_velocity(spec: LatticeSpec, k: float | np.ndarray, s: int) -> float | np.ndarray:
    """Velocity of <X> for band s at site momentum k: a dE/dK with K = 2k.

    Equals -s a Delta^2 sin(2k) / E_k; a packet moves 2/a times faster in sites.
    """
    k = np.asarray(k, dtype=float)
    gap = band_gap_energy(spec, k)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = -s * spec.lattice_constant * spec.hopping**2 * np.sin(2.0 * k) / gap
    v = np.where(gap == 0.0, 0.0, v)
    return float(v) if v.ndim == 0 else v


def _gaussian(spec: LatticeSpec, pspec: WavePacketSpec) -> np.ndarray:
    sites = np.arange(spec.n_sites)
    envelope = np.exp(-spec.lattice_constant * (sites - pspec.center) ** 2 / (4.0 * pspec.width**2))
    return envelope


def _check_fits(spec: LatticeSpec, pspec: WavePacketSpec) -> None:
    if not 0 <= pspec.center < spec.n_sites:
        raise PacketError(f"Packet center {pspec.center} outside 0..{spec.n_sites - 1}")
    density = _gaussian(spec, pspec) ** 2
    density /= density.sum()
    edge = max(density[0], density[-1])
    if edge > EDGE_PACKET_TOL:
        raise PacketError(
            f"Packet too wide for the lattice: edge probability {edge:.2e} "
            f"(width={pspec.width}, center={pspec.center}, n_sites={spec.n_sites})"
        )


def make_packet(
    spec: LatticeSpec,
    pspec: WavePacketSpec,
    projectors: BandProjectors | None = None,
) -> WavePacket:
    """Initial state at t = 0.

    Band mode: psi = w- P-(g e^{i kick n})/|.| + w+ P+(g e^{-i kick n})/|.|, so
    both components move toward larger n and <P+> = |w+|^2. Sublattice mode:
    g e^{i kick n} on the even sites. Dimer mode: (|c> + i|c+1>)/sqrt(2), an
    equal mixture of both bands at every momentum.

    Raises:
        PacketError: If the packet does not fit or projectors are missing in band mode
    """
    if pspec.mode is PacketMode.DIMER:
        if pspec.center % 2 or not 0 <= pspec.center < spec.n_sites - 1:
            raise PacketError(f"Dimer packet needs an even center inside the chain, got {pspec.center}")
        amplitudes = np.zeros(spec.n_sites, dtype=complex)
        amplitudes[pspec.center] = 1.0
        amplitudes[pspec.center + 1] = 1j
        return WavePacket(amplitudes=amplitudes / np.sqrt(2.0))

    _check_fits(spec, pspec)
    sites = np.arange(spec.n_sites)
    envelope = _gaussian(spec, pspec).astype(complex)

    if pspec.mode is PacketMode.SUBLATTICE:
        amplitudes = np.where(sites % 2 == 0, envelope * np.exp(1j * pspec.kick * sites), 0.0)
        return WavePacket(amplitudes=amplitudes / np.linalg.norm(amplitudes))

    if projectors is None:
        raise PacketError("Band-projected packets need band projectors")
    if projectors.p_plus.dim != spec.n_sites:
        raise DimensionError(f"Projectors have {projectors.p_plus.dim} sites, lattice has {spec.n_sites}")

    amplitudes = np.zeros(spec.n_sites, dtype=complex)
    for weight, projector, kick in (
        (pspec.w_minus, projectors.p_minus, pspec.kick),
        (pspec.w_plus, projectors.p_plus, -pspec.kick),
    ):
        if weight == 0:
            continue
        component = projector.entries @ (envelope * np.exp(1j * kick * sites))
        amplitudes += weight * component / np.linalg.norm(component)
    return WavePacket(amplitudes=amplitudes / np.linalg.norm(amplitudes))


def band_resolved_densities(
    psi: WavePacket, projectors: BandProjectors
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-site |psi|^2, |P+ psi|^2 and |P- psi|^2."""
    plus = projectors.p_plus.entries @ psi.amplitudes
    minus = projectors.p_minus.entries @ psi.amplitudes
    return psi.probabilities, np.abs(plus) ** 2, np.abs(minus) ** 2


class Propagator:
    """Exact evolution e^{-iHt} from a single dense eigendecomposition."""

    def __init__(self, h: OperatorMatrix) -> None:
        if not h.is_hermitian(get_settings().hermitian_tol):
            raise NotHermitianError(f"Cannot propagate non-Hermitian {h.label or 'operator'}")
        started = time.perf_counter()
        self.energies, self.vectors = linalg.eigh(h.entries)
        self.dim = h.dim
        logger.debug("eigh of %dx%d in %.3fs", h.dim, h.dim, time.perf_counter() - started)

    def coefficients(self, psi0: WavePacket) -> np.ndarray:
        if psi0.dim != self.dim:
            raise DimensionError(f"State has {psi0.dim} sites, Hamiltonian has {self.dim}")
        return self.vectors.conj().T @ psi0.amplitudes

    def iter_batches(
        self, psi0: WavePacket, times: Sequence[float] | np.ndarray
    ) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        """Yield (times, states) batches; states has shape (len(times), dim)."""
        coefficients = self.coefficients(psi0)
        times = np.asarray(times, dtype=float)
        for start in range(0, times.size, TIME_BATCH):
            batch = times[start : start + TIME_BATCH]
            phases = np.exp(-1j * np.outer(batch - psi0.time, self.energies))
            yield batch, (phases * coefficients) @ self.vectors.T

    def evolve(self, psi0: WavePacket, times: Sequence[float] | np.ndarray) -> np.ndarray:
        """All states at the given times, shape (len(times), dim)."""
        batches = [states for _, states in self.iter_batches(psi0, times)]
        return np.vstack(batches) if batches else np.zeros((0, self.dim), dtype=complex)

    def expectation(
        self, psi0: WavePacket, times: Sequence[float] | np.ndarray, diagonal: np.ndarray
    ) -> np.ndarray:
        """<psi(t)| diag(diagonal) |psi(t)> without keeping the states."""
        values = [np.abs(states) ** 2 @ diagonal for _, states in self.iter_batches(psi0, times)]
        return np.concatenate(values) if values else np.zeros(0)


def propagate(h: OperatorMatrix, psi0: WavePacket, times: Sequence[float]) -> list[WavePacket]:
    """psi(t) = sum_j e^{-iE_j t}|E_j><E_j|psi0> for each requested time.

    States are returned as computed; a norm that drifts from the initial one by
    more than the configured norm_tol aborts the run.

    Raises:
        NotHermitianError: If h is not Hermitian
        DynamicsError: If the norm drifts
    """
    norm_tol = get_settings().norm_tol
    norm0 = float(np.linalg.norm(psi0.amplitudes))
    propagator = Propagator(h)
    states = propagator.evolve(psi0, times)
    result = []
    for t, state in zip(times, states, strict=True):
        drift = abs(float(np.linalg.norm(state)) - norm0)
        if drift > norm_tol:
            raise DynamicsError(
                f"Norm drifted by {drift:.2e} at t={t:.2f}",
                diagnostics={"time": float(t), "norm_drift": drift},
            )
        result.append(WavePacket(amplitudes=state, time=float(t)))
    return result


def position_trace(
    h: OperatorMatrix, psi0: WavePacket, spec: LatticeSpec, times: Sequence[float] | np.ndarray
) -> np.ndarray:
    """<X(t)> over a time grid."""
    positions = spec.lattice_constant * (np.arange(spec.n_sites) // 2)
    return Propagator(h).expectation(psi0, times, positions)


def _lobe_center(probabilities: np.ndarray, sites: np.ndarray) -> float | None:
    total = probabilities.sum()
    if total < 1e-6:
        return None
    return float(sites @ probabilities / total)


def collision_time(
    spec: LatticeSpec,
    pspec: WavePacketSpec,
    splitter_center: int,
    estimate: CollisionEstimate = CollisionEstimate.LATTICE,
) -> float:
    """Collision time of the packet with the splitter.

    LATTICE gives the nominal T_c = N / (2 Delta kick) used to size runs.
    GROUP_VELOCITY gives the time for the packet center to reach
    splitter_center at the kick's group velocity.
    """
    estimate = CollisionEstimate(estimate)
    if estimate is CollisionEstimate.LATTICE:
        return spec.n_sites / (2.0 * spec.hopping * pspec.kick)
    site_speed = 2.0 * abs(group_velocity(spec, pspec.kick, -1)) / spec.lattice_constant
    if site_speed == 0:
        return float("inf")
    return abs(splitter_center - pspec.center) / site_speed


@dataclass(frozen=True)
class ScatteringScenario:
    """Everything a scattering run needs; the Hamiltonian can be swapped for a perturbed one."""

    spec: LatticeSpec
    splitter: SplitterMatrix
    pspec: WavePacketSpec
    projectors: BandProjectors
    splitter_center: int
    t_max: float | None = None
    n_outputs: int = 400
    separation_widths: float = 3.0

    def hamiltonian(self) -> OperatorMatrix:
        return assemble_scattering_hamiltonian(self.spec, self.splitter, self.splitter_center)

    def run(self, h: OperatorMatrix | None = None) -> ScatteringResult:
        return scatter(
            self.hamiltonian() if h is None else h,
            self.spec,
            self.pspec,
            self.projectors,
            self.splitter_center,
            gate_halfwidth=max(self.splitter.rho, 1),
            t_max=self.t_max,
            n_outputs=self.n_outputs,
            separation_widths=self.separation_widths,
        )


def scattering_run(
    spec: LatticeSpec,
    splitter: SplitterMatrix,
    pspec: WavePacketSpec,
    projectors: BandProjectors,
    splitter_center: int,
    t_max: float | None = None,
    n_outputs: int = 400,
    separation_widths: float = 3.0,
    n_snapshots: int = 3,
) -> ScatteringResult:
    """Scatter a packet off a splitter embedded at splitter_center and split the outcome by band."""
    h = assemble_scattering_hamiltonian(spec, splitter, splitter_center)
    return scatter(
        h,
        spec,
        pspec,
        projectors,
        splitter_center,
        gate_halfwidth=max(splitter.rho, 1),
        t_max=t_max,
        n_outputs=n_outputs,
        separation_widths=separation_widths,
        n_snapshots=n_snapshots,
    )


def scatter(
    h: OperatorMatrix,
    spec: LatticeSpec,
    pspec: WavePacketSpec,
    projectors: BandProjectors,
    partition: int,
    gate_halfwidth: int,
    t_max: float | None = None,
    n_outputs: int = 400,
    separation_widths: float = 3.0,
    n_snapshots: int = 3,
) -> ScatteringResult:
    """Propagate a packet under h and record band-resolved R and T.

    The run advances over an output grid up to t_max (default twice the
    nominal collision time N / (2 Delta kick)) and stops at the first time
    past the group-velocity arrival at the partition when less than 1% of the
    probability sits within gate_halfwidth sites of it and every occupied lobe
    is at least separation_widths * width sites away. R_s and T_s are
    normalized by the initial band weight <P_s>(0), which is |w_s|^2 for a
    band packet; weight that left band s shows up as R_s + T_s < 1.

    Raises:
        EdgeContaminationError: If the edge strips exceed the configured tolerance
        SeparationError: If the lobes never separate before t_max
    """
    settings = get_settings()
    splitter_center = partition
    psi0 = make_packet(spec, pspec, projectors)
    propagator = Propagator(h)

    t_collision = collision_time(spec, pspec, splitter_center)
    t_arrival = collision_time(spec, pspec, splitter_center, CollisionEstimate.GROUP_VELOCITY)
    initial_weights = (
        float(np.linalg.norm(projectors.p_plus.entries @ psi0.amplitudes) ** 2),
        float(np.linalg.norm(projectors.p_minus.entries @ psi0.amplitudes) ** 2),
    )
    if t_max is None:
        t_max = 2.0 * t_collision
    elif t_max < 2.0 * t_collision:
        logger.warning("t_max=%.1f is shorter than twice the collision time %.1f", t_max, t_collision)

    sites = np.arange(spec.n_sites)
    left = sites < splitter_center
    footprint = np.abs(sites - splitter_center) < gate_halfwidth
    edges = (sites < settings.edge_sites) | (sites >= spec.n_sites - settings.edge_sites)
    min_distance = separation_widths * pspec.width
    positions = spec.lattice_constant * (sites // 2)
    energy0 = float(np.real(np.vdot(psi0.amplitudes, h.entries @ psi0.amplitudes)))

    trace: dict[str, list[float]] = {key: [] for key in ("t", "x", "p_plus", "left_prob", "right_prob")}
    times = np.linspace(psi0.time, psi0.time + t_max, n_outputs + 1)
    snapshot_times = set(np.linspace(0, n_outputs, max(n_snapshots - 1, 1), dtype=int).tolist())
    snapshots: list[tuple[float, np.ndarray, np.ndarray, np.ndarray]] = []
    last: dict[str, float | None] = {}
    index = 0

    for batch_times, states in propagator.iter_batches(psi0, times):
        for t, state in zip(batch_times, states, strict=True):
            probabilities = np.abs(state) ** 2
            plus = projectors.p_plus.entries @ state
            minus = projectors.p_minus.entries @ state
            plus_density = np.abs(plus) ** 2
            minus_density = np.abs(minus) ** 2

            trace["t"].append(float(t))
            trace["x"].append(float(positions @ probabilities))
            trace["p_plus"].append(float(plus_density.sum()))
            trace["left_prob"].append(float(probabilities[left].sum()))
            trace["right_prob"].append(float(probabilities[~left].sum()))
            if index in snapshot_times:
                snapshots.append((float(t), probabilities, plus_density, minus_density))

            edge_probability = float(probabilities[edges].sum())
            if edge_probability > settings.edge_tol:
                raise EdgeContaminationError(
                    f"Edge probability {edge_probability:.2e} at t={t:.2f}",
                    diagnostics={"time": float(t), "edge_probability": edge_probability},
                )

            window_probability = float(probabilities[footprint].sum())
            left_center = _lobe_center(probabilities[left], sites[left])
            right_center = _lobe_center(probabilities[~left], sites[~left])
            last = {
                "time": float(t),
                "window_probability": window_probability,
                "left_center": left_center,
                "right_center": right_center,
            }
            separated = (
                window_probability < WINDOW_TOL
                and (left_center is None or splitter_center - left_center >= min_distance)
                and (right_center is None or right_center - splitter_center >= min_distance)
            )
            if t >= t_arrival and separated:
                snapshots.append((float(t), probabilities, plus_density, minus_density))
                result = _band_split(
                    plus_density,
                    minus_density,
                    left,
                    splitter_center,
                    initial_weights,
                    (t_collision, t_arrival, float(t)),
                )
                energy = float(np.real(np.vdot(state, h.entries @ state)))
                diagnostics = {
                    "norm_drift": float(abs(probabilities.sum() - 1.0)),
                    "energy_drift": abs(energy - energy0),
                    "window_probability": window_probability,
                }
                logger.info(
                    "Separated at t=%.1f: R+=%.4f T+=%.4f R-=%.4f T-=%.4f",
                    t, result.r_plus, result.t_plus, result.r_minus, result.t_minus,
                )
                return replace(
                    result,
                    diagnostics=diagnostics,
                    trace={key: np.array(values) for key, values in trace.items()},
                    snapshots=snapshots,
                )
            index += 1

    raise SeparationError(f"Lobes did not separate before t={t_max:.1f}", diagnostics=last)


def _band_split(
    plus_density: np.ndarray,
    minus_density: np.ndarray,
    left: np.ndarray,
    partition: int,
    initial_weights: tuple[float, float],
    times: tuple[float, float, float],
) -> ScatteringResult:
    coefficients = []
    weights = []
    for density, initial in zip((plus_density, minus_density), initial_weights, strict=True):
        weights.append(float(density.sum()))
        if initial < 1e-12:
            coefficients.extend([0.0, 0.0])
            continue
        coefficients.extend([float(density[left].sum()) / initial, float(density[~left].sum()) / initial])
    t_collision, t_arrival, t_separation = times
    return ScatteringResult(
        r_plus=coefficients[0],
        t_plus=coefficients[1],
        r_minus=coefficients[2],
        t_minus=coefficients[3],
        partition_site=partition,
        collision_time=t_collision,
        arrival_time=t_arrival,
        separation_time=t_separation,
        band_weight_initial=initial_weights,
        band_weight_final=(weights[0], weights[1]),
    )


def _safe_run(**kwargs: Any) -> ScatteringResult | None:
    try:
        return scattering_run(**kwargs)
    except DynamicsError as exc:
        logger.warning("Scattering run aborted: %s", exc)
        return None


def kappa_sweep(
    spec: LatticeSpec,
    splitter: SplitterMatrix,
    pspec: WavePacketSpec,
    projectors: BandProjectors,
    splitter_center: int,
    kicks: Sequence[float],
    n_jobs: int | None = None,
    **run_options: Any,
) -> list[tuple[float, ScatteringResult | None]]:
    """Scattering results for each kick at a fixed splitter; failed runs give None."""
    n_jobs = n_jobs or get_settings().n_jobs
    results = Parallel(n_jobs=n_jobs)(
        delayed(_safe_run)(
            spec=spec,
            splitter=splitter,
            pspec=replace(pspec, kick=float(kick)),
            projectors=projectors,
            splitter_center=splitter_center,
            **run_options,
        )
        for kick in kicks
    )
    return list(zip((float(k) for k in kicks), results, strict=True))


def rho_sweep(
    spec: LatticeSpec,
    pspec: WavePacketSpec,
    projectors: BandProjectors,
    splitter_center: int,
    rhos: Sequence[int],
    v0: float = 2.0,
    mode: SplitterMode = SplitterMode.ONE_SIDED,
    neighbor_order: int = 2,
    margin: int = 40,
    n_jobs: int | None = None,
    **run_options: Any,
) -> list[tuple[int, ScatteringResult | None]]:
    """Scattering results for each splitter range at a fixed packet."""
    n_jobs = n_jobs or get_settings().n_jobs
    splitters = [
        synthesize_splitter(spec, int(rho), v0, mode, neighbor_order, margin) for rho in rhos
    ]
    results = Parallel(n_jobs=n_jobs)(
        delayed(_safe_run)(
            spec=spec,
            splitter=splitter,
            pspec=pspec,
            projectors=projectors,
            splitter_center=splitter_center,
            **run_options,
        )
        for splitter in splitters
    )
    return list(zip((int(r) for r in rhos), results, strict=True))


def calibrate_gate_height(
    spec: LatticeSpec,
    pspec: WavePacketSpec,
    projectors: BandProjectors,
    splitter_center: int,
    rho: int,
    target_r_plus: float,
    mode: SplitterMode = SplitterMode.GEOMETRIC,
    neighbor_order: int = 2,
    margin: int = 40,
    bracket: tuple[float, float] = (0.0, 2.0),
    xtol: float = 1e-3,
    **run_options: Any,
) -> tuple[float, ScatteringResult]:
    """Gate height v0 whose splitter reflects target_r_plus of the upper band.

    Brent's method on R+(v0) - target over the bracket; every trial is a full
    scattering run, so the returned result is the run at the root.

    Raises:
        SplitterError: If the target is not bracketed
        DynamicsError: If a trial run aborts
    """
    runs: dict[float, ScatteringResult] = {}

    def run(v0: float) -> ScatteringResult:
        if v0 not in runs:
            splitter = synthesize_splitter(spec, rho, v0, mode, neighbor_order, margin)
            runs[v0] = scattering_run(
                spec=spec,
                splitter=splitter,
                pspec=pspec,
                projectors=projectors,
                splitter_center=splitter_center,
                **run_options,
            )
            logger.debug("v0=%.4f gives R+=%.4f", v0, runs[v0].r_plus)
        return runs[v0]

    def excess(v0: float) -> float:
        return run(v0).r_plus - target_r_plus

    low, high = bracket
    if excess(low) * excess(high) > 0:
        raise SplitterError(
            f"R+={target_r_plus} not bracketed by v0 in [{low}, {high}] "
            f"(R+ from {runs[low].r_plus:.4f} to {runs[high].r_plus:.4f})"
        )
    v0 = float(optimize.brentq(excess, low, high, xtol=xtol))
    logger.info("Calibrated v0=%.4f for R+=%.3f after %d runs", v0, target_r_plus, len(runs))
    return v0, run(v0)
