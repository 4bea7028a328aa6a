"""Zitterbewegung observables from position traces.

x_zitt is the ballistic-subtracted <X(t)>. For t >> 1/Delta it behaves as
t^{-1/2} [A cos(2 mu t + a) + B cos(2 sqrt(4 Delta^2 + mu^2) t + b)], the two
frequencies coming from the stationary points k = pi/2 and k = 0, pi of E_{k,s}.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from quasispin.physics.base import AliasingError, FitError, TraceError, WavePacket
from quasispin.physics.lattice import (
    LatticeSpec,
    band_gap_energy,
    bloch_spinor,
    bloch_state,
    k_grid,
)

logger = logging.getLogger(__name__)

MIN_SAMPLES = 200
MIN_SPAN = 50.0
TRANSIENT = 10.0
PEAK_RTOL = 0.02


@dataclass(frozen=True)
class ZittTrace:
    """Ballistic-subtracted position trace."""

    times: np.ndarray
    x_zitt: np.ndarray
    ballistic_slope: float
    ballistic_intercept: float


@dataclass(frozen=True)
class ZittFit:
    """Envelope and frequency fit results; unset parts stay at their defaults."""

    envelope_exponent: float | None = None
    envelope_prefactor: float | None = None
    envelope_amplitudes: tuple[float, ...] = ()
    frequencies: tuple[float, ...] = ()
    predicted: dict[str, float] = field(default_factory=dict)
    matched: dict[str, float | None] = field(default_factory=dict)
    fit_residual: float = float("nan")

    def merged(self, other: ZittFit) -> ZittFit:
        """Envelope fields from self, frequency fields from other."""
        return ZittFit(
            envelope_exponent=self.envelope_exponent,
            envelope_prefactor=self.envelope_prefactor,
            envelope_amplitudes=other.envelope_amplitudes,
            frequencies=other.frequencies,
            predicted=other.predicted,
            matched=other.matched,
            fit_residual=max(self.fit_residual, other.fit_residual)
            if not np.isnan(self.fit_residual)
            else other.fit_residual,
        )

    def to_record(self) -> dict[str, object]:
        return {
            "envelope_exponent": self.envelope_exponent,
            "envelope_prefactor": self.envelope_prefactor,
            "envelope_amplitudes": list(self.envelope_amplitudes),
            "frequencies": list(self.frequencies),
            "predicted": dict(self.predicted),
            "matched": dict(self.matched),
            "fit_residual": None if np.isnan(self.fit_residual) else self.fit_residual,
        }


@dataclass(frozen=True)
class StationaryPoints:
    """Zeros of dE/dk in [0, pi] and the oscillation frequencies they predict."""

    momenta: tuple[float, ...]
    gaps: tuple[float, ...]
    frequencies: dict[str, float]


@dataclass(frozen=True)
class ZittIntegrals:
    """Band-pair J and diagonal I contributions over a time grid."""

    times: np.ndarray
    j: dict[tuple[int, int], np.ndarray]
    i: dict[int, np.ndarray]

    @property
    def total(self) -> np.ndarray:
        return sum(self.j.values(), np.zeros_like(self.times, dtype=complex)) + sum(
            self.i.values(), np.zeros_like(self.times, dtype=complex)
        )


def _check_times(times: np.ndarray) -> None:
    if times.ndim != 1 or times.size < MIN_SAMPLES:
        raise TraceError(f"Trace needs at least {MIN_SAMPLES} samples, got {times.size}")
    if np.any(np.diff(times) <= 0):
        raise TraceError("Trace times must be strictly increasing")
    if times[-1] - times[0] < MIN_SPAN:
        raise TraceError(f"Trace must span at least {MIN_SPAN} time units, got {times[-1] - times[0]:.1f}")


def extract_zitt(times: Sequence[float] | np.ndarray, positions: Sequence[float] | np.ndarray) -> ZittTrace:
    """Subtract the least-squares line from <X(t)>.

    Raises:
        TraceError: If the trace is too short or not increasing in time
    """
    times = np.asarray(times, dtype=float)
    positions = np.asarray(positions, dtype=float)
    if positions.shape != times.shape:
        raise TraceError(f"times and positions differ in shape: {times.shape} vs {positions.shape}")
    _check_times(times)
    slope, intercept = np.polyfit(times, positions, 1)
    return ZittTrace(
        times=times,
        x_zitt=positions - (slope * times + intercept),
        ballistic_slope=float(slope),
        ballistic_intercept=float(intercept),
    )


def fit_envelope(
    zt: ZittTrace,
    window: float = 1.0,
    t_min: float = TRANSIENT,
    period: float | None = None,
) -> ZittFit:
    """Power-law fit of the local maxima of |x_zitt| in log-log scale.

    With a period, the trace first loses its running mean over one period and
    only the highest maximum per period is kept, so the fit follows the upper
    envelope of a two-line signal instead of its beats.

    Args:
        zt: Detrended trace
        window: Fraction of the trace, counted from its end, used for the fit
        t_min: Earliest time admitted (the early transient is excluded)
        period: Slowest oscillation period, in time units

    Raises:
        FitError: If fewer than 5 maxima fall inside the window
    """
    start = max(t_min, zt.times[-1] - window * (zt.times[-1] - zt.times[0]))
    values = zt.x_zitt
    distance = None
    valid = np.ones(values.size, dtype=bool)
    if period is not None:
        dt = float(np.median(np.diff(zt.times)))
        width = max(int(round(period / dt)), 1)
        values = values - np.convolve(values, np.ones(width) / width, mode="same")
        valid[: width // 2] = False
        valid[values.size - width // 2 :] = False
        distance = width

    mask = (zt.times >= start) & valid
    times = zt.times[mask]
    magnitude = np.abs(values[mask])
    peaks, _ = signal.find_peaks(magnitude, distance=distance)
    peaks = peaks[magnitude[peaks] > 0]
    if peaks.size < 5:
        raise FitError(f"Only {peaks.size} maxima after t={start:.1f}; need at least 5")

    log_t = np.log(times[peaks])
    log_x = np.log(magnitude[peaks])
    exponent, log_prefactor = np.polyfit(log_t, log_x, 1)
    residual = float(np.sqrt(np.mean((log_x - (exponent * log_t + log_prefactor)) ** 2)))
    logger.info("Envelope exponent %.3f from %d maxima", exponent, peaks.size)
    return ZittFit(
        envelope_exponent=float(exponent),
        envelope_prefactor=float(np.exp(log_prefactor)),
        fit_residual=residual,
    )


def stationary_points(spec: LatticeSpec) -> StationaryPoints:
    """k = 0, pi/2, pi with band gaps 2E_k; predicted ZB frequencies 2 mu and 2 sqrt(4 Delta^2 + mu^2)."""
    momenta = (0.0, 0.5 * np.pi, np.pi)
    gaps = tuple(float(2.0 * band_gap_energy(spec, k)) for k in momenta)
    frequencies = {
        "omega_2": float(2.0 * np.sqrt(4.0 * spec.hopping**2 + spec.mass**2)),
    }
    if spec.mass > 0:
        frequencies["omega_1"] = float(2.0 * spec.mass)
    return StationaryPoints(momenta=momenta, gaps=gaps, frequencies=frequencies)


def identify_frequencies(
    zt: ZittTrace,
    spec: LatticeSpec,
    n_peaks: int = 4,
    t_min: float = TRANSIENT,
    rtol: float = PEAK_RTOL,
) -> ZittFit:
    """Dominant angular frequencies of x_zitt * sqrt(t), matched against the predictions.

    A prediction counts as matched when an observed peak lies within one FFT
    bin plus rtol of it. Amplitudes are least-squares cosine/sine fits at the
    observed peaks.

    Raises:
        TraceError: If the sampling is not uniform
        AliasingError: If the Nyquist frequency is not above the highest prediction
    """
    steps = np.diff(zt.times)
    if not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
        raise TraceError("Frequency analysis needs uniform sampling")
    dt = float(steps[0])
    predicted = stationary_points(spec).frequencies
    nyquist = np.pi / dt
    if nyquist <= max(predicted.values()):
        raise AliasingError(
            f"Nyquist frequency {nyquist:.3f} does not exceed {max(predicted.values()):.3f}; "
            f"use dt < {np.pi / max(predicted.values()):.4f}"
        )

    mask = zt.times >= t_min
    times = zt.times[mask]
    scaled = signal.detrend(zt.x_zitt[mask] * np.sqrt(times))
    window = signal.windows.hann(scaled.size)
    spectrum = np.abs(np.fft.rfft(scaled * window))
    omegas = 2.0 * np.pi * np.fft.rfftfreq(scaled.size, dt)
    bin_width = float(omegas[1] - omegas[0]) if omegas.size > 1 else float("inf")

    peaks, _ = signal.find_peaks(spectrum, height=0.05 * spectrum.max())
    peaks = peaks[np.argsort(spectrum[peaks])[::-1]][:n_peaks]
    observed = omegas[peaks]

    matched: dict[str, float | None] = {}
    for label, omega in predicted.items():
        distance = np.abs(observed - omega)
        hits = np.flatnonzero(distance <= bin_width + rtol * omega)
        matched[label] = float(observed[hits[np.argmin(distance[hits])]]) if hits.size else None
        if hits.size == 0:
            logger.warning("No spectral peak near predicted %s = %.4f", label, omega)

    amplitudes, residual = _harmonic_fit(times, scaled, observed)
    return ZittFit(
        envelope_amplitudes=tuple(amplitudes),
        frequencies=tuple(float(w) for w in observed),
        predicted=dict(predicted),
        matched=matched,
        fit_residual=residual,
    )


def _harmonic_fit(times: np.ndarray, values: np.ndarray, omegas: np.ndarray) -> tuple[list[float], float]:
    if omegas.size == 0:
        return [], 1.0
    design = np.hstack([np.cos(np.outer(times, omegas)), np.sin(np.outer(times, omegas))])
    coefficients, *_ = np.linalg.lstsq(design, values, rcond=None)
    cosines, sines = np.split(coefficients, 2)
    residual = values - design @ coefficients
    scale = float(np.sqrt(np.mean(values**2))) or 1.0
    return [float(a) for a in np.hypot(cosines, sines)], float(np.sqrt(np.mean(residual**2)) / scale)


def interband_bracket(
    spec: LatticeSpec, k: float | np.ndarray, s: int, s_prime: int | None = None
) -> np.ndarray:
    """i [u+_{k,s} (u-_{k,s'})^* - u-_{k,s} (u+_{k,s'})^*]; identically zero when s = s'."""
    s_prime = s if s_prime is None else s_prime
    up_s, down_s = bloch_spinor(spec, k, s)
    up_p, down_p = bloch_spinor(spec, k, s_prime)
    return 1j * (up_s * np.conj(down_p) - down_s * np.conj(up_p))


def band_amplitudes(psi: WavePacket, spec: LatticeSpec) -> dict[int, np.ndarray]:
    """<k,s|psi> on the reduced-zone grid for s = +1 and -1."""
    amplitudes: dict[int, np.ndarray] = {}
    for s in (1, -1):
        amplitudes[s] = np.array(
            [np.vdot(bloch_state(spec, float(k), s)[1], psi.amplitudes) for k in k_grid(spec)]
        )
    return amplitudes


def zitt_integrals(spec: LatticeSpec, psi: WavePacket, times: Sequence[float] | np.ndarray) -> ZittIntegrals:
    """J_{s,s'} and I_s summed over the discrete momentum grid.

    With c_{k,s} = <k,s|psi>, the k-measure of the continuum integrals is
    absorbed into |c|^2, so the sums carry no explicit dk.
    """
    times = np.asarray(times, dtype=float)
    k = k_grid(spec)
    coefficients = band_amplitudes(psi, spec)
    gap = band_gap_energy(spec, k)

    def kernel(s: int, power: int) -> np.ndarray:
        energy = s * gap[None, :]
        phase = np.exp(-1j * energy * times[:, None])
        # sin(Et)/E -> t as E -> 0
        ratio = times[:, None] * np.sinc(energy * times[:, None] / np.pi)
        if power == 2:
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(energy == 0.0, 0.0, ratio / energy)
        return phase * ratio

    j_terms = {}
    for s in (1, -1):
        for s_prime in (1, -1):
            weight = coefficients[s] * np.conj(coefficients[s_prime]) * interband_bracket(spec, k, s, s_prime)
            j_terms[(s, s_prime)] = kernel(s, 1) @ weight
    i_terms = {s: kernel(s, 2) @ (np.sin(k) * np.abs(coefficients[s]) ** 2) for s in (1, -1)}
    return ZittIntegrals(times=times, j=j_terms, i=i_terms)
