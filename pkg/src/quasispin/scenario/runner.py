"""Subcommand orchestration: build domain objects from a scenario and write the artifacts."""

from __future__ import annotations

import logging
from collections.abc import Callable
from enum import Enum
from pathlib import Path

import numpy as np
from scipy import linalg

from quasispin.config import get_settings
from quasispin.physics.base import Boundary, ConfigError, FitError, QuasispinError
from quasispin.physics.dimers import (
    TriangleBlock,
    block_unitary,
    exponential_overlap_curve,
    level_table_csv,
    spectrum_sweep,
    triangle_matrix,
)
from quasispin.physics.dynamics import (
    PacketMode,
    ScatteringResult,
    ScatteringScenario,
    WavePacketSpec,
    calibrate_gate_height,
    group_velocity,
    kappa_sweep,
    make_packet,
    position_trace,
    rho_sweep,
    scattering_run,
)
from quasispin.physics.fw import band_projectors
from quasispin.physics.lattice import (
    build_dirac_operators,
    build_hamiltonian,
    conical_expansion_check,
    dispersion,
    k_grid,
)
from quasispin.physics.splitter import (
    captured_fraction,
    export_csv,
    locality_profile,
    synthesize_splitter,
)
from quasispin.scenario.config import ScenarioConfig
from quasispin.scenario.output import RunDirectory
from quasispin.studies.disorder import disorder_sweep, realizations_csv, sweep_csv
from quasispin.studies.zitterbewegung import (
    extract_zitt,
    fit_envelope,
    identify_frequencies,
    stationary_points,
)

logger = logging.getLogger(__name__)


class Subcommand(str, Enum):
    SPECTRUM = "spectrum"
    SCATTER = "scatter"
    ZITT = "zitt"
    DISORDER = "disorder"
    SPLITTER_MATRIX = "splitter-matrix"
    HEXAMER = "hexamer"


def build_scenario(config: ScenarioConfig, v0: float | None = None) -> ScatteringScenario:
    """Scattering scenario with the splitter synthesized from the config; v0 overrides the gate height."""
    spec = config.lattice_spec()
    splitter = synthesize_splitter(
        spec,
        config.splitter.rho,
        config.splitter.v0 if v0 is None else v0,
        config.splitter.mode,
        config.splitter.neighbor_order,
        config.splitter.margin,
    )
    return ScatteringScenario(
        spec=spec,
        splitter=splitter,
        pspec=config.packet_spec(),
        projectors=band_projectors(spec.with_boundary(Boundary.PERIODIC)),
        splitter_center=config.splitter_center,
        t_max=config.run.t_max,
        n_outputs=config.run.n_outputs,
        separation_widths=config.run.separation_widths,
    )


def run_spectrum(config: ScenarioConfig, run: RunDirectory) -> None:
    """Analytic bands on the periodic grid, checked against exact diagonalization."""
    spec = config.lattice_spec().with_boundary(Boundary.PERIODIC)
    k = k_grid(spec)
    upper = dispersion(spec, k, 1)
    lower = dispersion(spec, k, -1)
    run.write_csv("spectrum.csv", ["k", "e_plus", "e_minus"], zip(k, upper, lower, strict=True))

    h = build_hamiltonian(spec)
    exact = linalg.eigvalsh(h.entries)
    analytic = np.sort(np.concatenate([upper, lower]))
    operators = build_dirac_operators(spec)
    conical = conical_expansion_check(spec, config.packet.kick)
    summary = {
        "n_sites": spec.n_sites,
        "max_eigenvalue_error": float(np.max(np.abs(exact - analytic))),
        "dirac_form_residual": float(np.max(np.abs(operators.assemble(spec) - h.entries))),
        "gap": float(2.0 * spec.mass),
        "conical_check": {
            "kappa": conical.kappa,
            "p1": conical.p1,
            "p2": conical.p2,
            "p1_expansion": conical.p1_expansion,
            "p2_expansion": conical.p2_expansion,
            "error": conical.error,
            "bulk_residual": conical.bulk_residual,
        },
    }
    run.write_json("spectrum.json", summary)
    logger.info("Spectrum: max |E_exact - E_analytic| = %.2e", summary["max_eigenvalue_error"])


def _write_scatter_result(run: RunDirectory, result: ScatteringResult, prefix: str = "") -> None:
    run.write_json(f"{prefix}result.json", {**result.summary(), "diagnostics": result.diagnostics})
    trace = result.trace
    if trace:
        keys = ["t", "x", "p_plus", "left_prob", "right_prob"]
        run.write_csv(f"{prefix}trace.csv", keys, zip(*(trace[key] for key in keys), strict=True))
    for i, (t, total, plus, minus) in enumerate(result.snapshots):
        run.write_csv(
            f"{prefix}snapshot_{i:02d}.csv",
            ["site", "t", "prob", "prob_plus", "prob_minus"],
            ((n, t, total[n], plus[n], minus[n]) for n in range(total.size)),
        )


def _sweep_rows(results: list[tuple[float, ScatteringResult | None]]) -> list[list[float | int | str]]:
    rows: list[list[float | int | str]] = []
    for value, result in results:
        if result is None:
            rows.append([value, "", "", "", "", 0])
        else:
            rows.append([value, result.r_plus, result.t_plus, result.r_minus, result.t_minus, 1])
    return rows


def calibrate(config: ScenarioConfig, run: RunDirectory) -> tuple[float, ScatteringResult | None]:
    """Gate height for the run: splitter.v0, or the calibrated one when target_r_plus is set."""
    target = config.splitter.target_r_plus
    if target is None:
        return config.splitter.v0, None
    scenario = build_scenario(config)
    v0, result = calibrate_gate_height(
        scenario.spec,
        scenario.pspec,
        scenario.projectors,
        scenario.splitter_center,
        config.splitter.rho,
        target,
        mode=config.splitter.mode,
        neighbor_order=config.splitter.neighbor_order,
        margin=config.splitter.margin,
        bracket=(0.0, config.splitter.v0),
        t_max=config.run.t_max,
        n_outputs=config.run.n_outputs,
        separation_widths=config.run.separation_widths,
        n_snapshots=config.run.n_snapshots,
    )
    run.write_json(
        "calibration.json",
        {"target_r_plus": target, "v0": v0, "r_plus": result.r_plus, "t_minus": result.t_minus},
    )
    return v0, result


def run_scatter(config: ScenarioConfig, run: RunDirectory) -> None:
    """Single scattering run, or a kick / range sweep when run.kicks or run.rhos is set."""
    v0, calibrated = calibrate(config, run)
    scenario = build_scenario(config, v0)
    options = {
        "t_max": config.run.t_max,
        "n_outputs": config.run.n_outputs,
        "separation_widths": config.run.separation_widths,
    }
    header = ["value", "r_plus", "t_plus", "r_minus", "t_minus", "ok"]
    if config.run.kicks:
        results = kappa_sweep(
            scenario.spec, scenario.splitter, scenario.pspec, scenario.projectors,
            scenario.splitter_center, config.run.kicks, **options,
        )
        run.write_csv("kappa_sweep.csv", header, _sweep_rows(results))
        return
    if config.run.rhos:
        rho_results = rho_sweep(
            scenario.spec, scenario.pspec, scenario.projectors, scenario.splitter_center,
            config.run.rhos, v0=v0, mode=config.splitter.mode,
            neighbor_order=config.splitter.neighbor_order, margin=config.splitter.margin, **options,
        )
        run.write_csv("rho_sweep.csv", header, _sweep_rows([(float(r), res) for r, res in rho_results]))
        return

    result = calibrated or scattering_run(
        scenario.spec, scenario.splitter, scenario.pspec, scenario.projectors,
        scenario.splitter_center, n_snapshots=config.run.n_snapshots, **options,
    )
    _write_scatter_result(run, result)


def run_zitt(config: ScenarioConfig, run: RunDirectory) -> None:
    """Zitterbewegung of a packet centered in the clean chain, per effective mass."""
    section = config.zitt
    masses = section.masses or [config.lattice.mass]
    times = np.arange(0.0, section.t_max + 0.5 * section.dt, section.dt)
    center = config.lattice.n_sites // 2
    center -= center % 2
    pspec = WavePacketSpec(
        width=config.packet.width,
        kick=config.packet.kick,
        center=center,
        band_weights=(config.packet.w_plus, config.packet.w_minus),
        mode=section.mode,
    )
    reach = 0.0 if section.mode is PacketMode.DIMER else 4 * pspec.width
    for mass in masses:
        spec = config.lattice_spec(mass=mass)
        speed = 2.0 * float(np.max(np.abs(group_velocity(spec, k_grid(spec), 1)))) / spec.lattice_constant
        if speed * section.t_max + reach > center:
            logger.warning("mu=%.3g: fastest components may reach the edges before t=%.0f", mass, section.t_max)

        projectors = None
        if section.mode is PacketMode.BAND:
            projectors = band_projectors(spec.with_boundary(Boundary.PERIODIC))
        psi0 = make_packet(spec, pspec, projectors)
        positions = position_trace(build_hamiltonian(spec), psi0, spec, times)
        zt = extract_zitt(times, positions)
        tag = f"mu{mass:g}"
        run.write_csv(f"zitt_trace_{tag}.csv", ["t", "x", "x_zitt"], zip(times, positions, zt.x_zitt, strict=True))

        fit = identify_frequencies(zt, spec, n_peaks=section.n_peaks, t_min=section.t_transient)
        period = 2.0 * np.pi / min(stationary_points(spec).frequencies.values())
        try:
            fit = fit_envelope(
                zt, window=section.envelope_window, t_min=section.t_transient, period=period
            ).merged(fit)
        except FitError as e:
            logger.warning("mu=%.3g: envelope fit skipped: %s", mass, e)
        run.write_json(
            f"zitt_fit_{tag}.json",
            {"mass": mass, "ballistic_slope": zt.ballistic_slope, **fit.to_record()},
        )
        logger.info("mu=%.3g: envelope exponent %s, peaks %s", mass, fit.envelope_exponent, fit.frequencies)


def run_disorder(config: ScenarioConfig, run: RunDirectory, seed: int | None) -> None:
    """Monte Carlo hopping-disorder sweep around the configured splitter."""
    if seed is None:
        raise ConfigError("The disorder subcommand needs a seed", ["seed: required for disorder"])
    section = config.disorder
    if section is None:
        raise ConfigError("The disorder subcommand needs a disorder section", ["disorder: missing"])
    v0, _ = calibrate(config, run)
    scenario = build_scenario(config, v0)
    result = disorder_sweep(scenario, section.sigmas, config.disorder_config(seed))
    run.write_text("disorder_sweep.csv", sweep_csv(result.points))
    run.write_text("disorder_realizations.csv", realizations_csv(result.outcomes))
    run.write_json(
        "disorder.json",
        {
            "seed": seed,
            "clean_r_plus": result.clean_r_plus,
            "clean_t_minus": result.clean_t_minus,
            "sigmas": [point.sigma for point in result.points],
            "sem_r_plus": [point.sem_r_plus for point in result.points],
            "sem_t_minus": [point.sem_t_minus for point in result.points],
            "n_failed": sum(point.n_failed for point in result.points),
        },
    )


def run_splitter_matrix(config: ScenarioConfig, run: RunDirectory) -> None:
    """Synthesized splitter entries and their locality profile."""
    spec = config.lattice_spec()
    splitter = synthesize_splitter(
        spec,
        config.splitter.rho,
        config.splitter.v0,
        config.splitter.mode,
        config.splitter.neighbor_order,
        config.splitter.margin,
    )
    run.write_text("splitter_matrix.csv", export_csv(splitter))
    profile = locality_profile(splitter.v)
    run.write_csv("locality_profile.csv", ["distance", "frobenius"], enumerate(profile))
    run.write_json(
        "splitter.json",
        {
            "dim": splitter.dim,
            "mode": splitter.mode.value,
            "rho": splitter.rho,
            "neighbor_order": splitter.neighbor_order,
            "bandwidth": splitter.v.measured_bandwidth(atol=1e-12),
            "captured_fraction": captured_fraction(splitter.v, config.splitter.neighbor_order),
        },
    )


def run_hexamer(config: ScenarioConfig, run: RunDirectory) -> None:
    """Level table of the tilted-dimer ring and the triangle-block inversion check."""
    section = config.hexamer
    curve = exponential_overlap_curve(section.xi, section.ring_radius, section.dimer_length, section.strength)
    thetas = np.linspace(section.theta_start, section.theta_stop, section.n_theta)
    sweep = spectrum_sweep(curve, thetas)
    run.write_text("hexamer_levels.csv", level_table_csv(sweep))

    e0 = config.lattice.mean_onsite
    plus = triangle_matrix(TriangleBlock(e0=e0, delta=config.lattice.hopping, sign=1)).entries
    minus = triangle_matrix(TriangleBlock(e0=e0, delta=config.lattice.hopping, sign=-1)).entries
    u = block_unitary().entries
    inversion = u @ minus @ u.conj().T - (2.0 * e0 * np.eye(3) - plus)
    run.write_json(
        "hexamer.json",
        {
            "crossings": sweep.crossings,
            "gap_first": float(sweep.gaps[0]),
            "gap_last": float(sweep.gaps[-1]),
            "triangle_inversion_residual": float(np.max(np.abs(inversion))),
        },
    )


def run_scenario(
    subcommand: Subcommand | str,
    config: ScenarioConfig,
    seed: int | None = None,
    output: Path | None = None,
) -> RunDirectory:
    """Run one subcommand and write its artifacts plus the manifest.

    A failing run still gets a manifest with status "failed" before the
    error propagates.
    """
    subcommand = Subcommand(subcommand)
    seed = config.seed if seed is None else seed
    root = output or config.outputs.directory or get_settings().output_root
    run = RunDirectory.create(root, subcommand.value, config.resolved(), seed)
    logger.info("Running %s (config %s)", subcommand.value, run.manifest.config_hash[:12])

    handlers: dict[Subcommand, Callable[[], None]] = {
        Subcommand.SPECTRUM: lambda: run_spectrum(config, run),
        Subcommand.SCATTER: lambda: run_scatter(config, run),
        Subcommand.ZITT: lambda: run_zitt(config, run),
        Subcommand.DISORDER: lambda: run_disorder(config, run, seed),
        Subcommand.SPLITTER_MATRIX: lambda: run_splitter_matrix(config, run),
        Subcommand.HEXAMER: lambda: run_hexamer(config, run),
    }
    try:
        handlers[subcommand]()
    except QuasispinError as e:
        run.finish(error={"error": type(e).__name__, "message": str(e)})
        raise
    run.finish()
    return run
