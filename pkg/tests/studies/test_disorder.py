"""Tests for the hopping-disorder sweep."""

import json
import math
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

from quasispin.physics import (
    Boundary,
    ConfigError,
    OperatorMatrix,
    ScatteringScenario,
    WavePacketSpec,
    build_hamiltonian,
    synthesize_splitter,
)
from quasispin.scenario import build_scenario, load_config
from quasispin.studies import (
    DisorderConfig,
    DisorderScope,
    RealizationOutcome,
    aggregate,
    coupling_factors,
    disorder_sweep,
    load_disorder_csv,
    perturb_couplings,
    realizations_csv,
    sweep_csv,
)
from quasispin.studies.disorder import load_realizations_csv, random_stream

DISORDER_SCENARIO = Path(__file__).resolve().parents[2] / "scenarios" / "disorder.json"


@pytest.fixture
def windowed_hamiltonian(periodic_spec):
    """Clean chain Hamiltonian tagged with a splitter window over sites 8..15."""
    h = build_hamiltonian(periodic_spec.with_boundary(Boundary.OPEN))
    return OperatorMatrix(entries=h.entries, hermitian_flag=True, meta={"window": (8, 16)})


class TestDisorderConfig:
    """Tests for disorder parameter validation."""

    def test_collects_violations(self):
        """Test every bad field is reported at once."""
        with pytest.raises(ConfigError) as exc_info:
            DisorderConfig(sigma_delta=-0.1, n_realizations=0, seed=1)
        assert len(exc_info.value.violations) == 2

    def test_scope_from_string(self):
        """Test the scope accepts its string value."""
        cfg = DisorderConfig(sigma_delta=0.1, n_realizations=3, seed=1, scope="leads_only")
        assert cfg.scope is DisorderScope.LEADS_ONLY


class TestCouplingFactors:
    """Tests for reproducible random streams."""

    def test_same_realization_same_draws(self):
        """Test (seed, realization) fixes the factors."""
        cfg = DisorderConfig(sigma_delta=0.1, n_realizations=5, seed=42)
        assert_allclose(coupling_factors(10, cfg, 3), coupling_factors(10, cfg, 3))

    def test_realizations_differ(self):
        """Test distinct realizations draw distinct factors."""
        cfg = DisorderConfig(sigma_delta=0.1, n_realizations=5, seed=42)
        assert not np.allclose(coupling_factors(10, cfg, 3), coupling_factors(10, cfg, 4))

    def test_seeds_differ(self):
        """Test distinct seeds draw distinct factors."""
        a = DisorderConfig(sigma_delta=0.1, n_realizations=5, seed=1)
        b = DisorderConfig(sigma_delta=0.1, n_realizations=5, seed=2)
        assert not np.allclose(coupling_factors(10, a, 0), coupling_factors(10, b, 0))

    def test_zero_sigma(self):
        """Test sigma = 0 leaves every bond unchanged."""
        cfg = DisorderConfig(sigma_delta=0.0, n_realizations=1, seed=7)
        assert_allclose(coupling_factors(6, cfg, 0), np.ones(6))

    def test_draws_have_requested_spread(self):
        """Test many per-bond factors have mean 1 and standard deviation sigma."""
        factors = coupling_factors(20000, DisorderConfig(sigma_delta=0.1, n_realizations=1, seed=5), 0)
        assert factors.mean() == pytest.approx(1.0, abs=0.005)
        assert factors.std() == pytest.approx(0.1, abs=0.005)

    def test_correlated_draws_one_delta(self):
        """Test a correlated realization scales every bond alike and the shared delta has spread sigma."""
        cfg = DisorderConfig(sigma_delta=0.1, n_realizations=2000, seed=5, correlated=True)
        factors = coupling_factors(8, cfg, 0)
        assert_allclose(factors, np.full(8, factors[0]))
        shared = np.array([coupling_factors(1, cfg, r)[0] for r in range(cfg.n_realizations)])
        assert shared.std() == pytest.approx(0.1, abs=0.01)


class TestPerturbCouplings:
    """Tests for perturbed Hamiltonians."""

    def test_whole_chain(self, periodic_spec):
        """Test bonds change, onsite terms stay and Hermiticity holds."""
        h = build_hamiltonian(periodic_spec)
        cfg = DisorderConfig(sigma_delta=0.1, n_realizations=1, seed=3)
        perturbed = perturb_couplings(h, cfg, 0)
        assert perturbed.is_hermitian()
        assert_allclose(np.diag(perturbed.entries), np.diag(h.entries))
        assert not np.allclose(perturbed.entries, h.entries)
        assert np.count_nonzero(perturbed.entries) == np.count_nonzero(h.entries)
        assert perturbed.meta["realization"] == 0

    def test_splitter_only(self, windowed_hamiltonian):
        """Test only bonds inside the window are touched."""
        cfg = DisorderConfig(sigma_delta=0.1, n_realizations=1, seed=3, scope=DisorderScope.SPLITTER_ONLY)
        diff = np.abs(perturb_couplings(windowed_hamiltonian, cfg, 0).entries - windowed_hamiltonian.entries)
        changed_rows, changed_cols = np.nonzero(diff)
        assert changed_rows.size > 0
        assert np.all((changed_rows >= 8) & (changed_rows < 16))
        assert np.all((changed_cols >= 8) & (changed_cols < 16))

    def test_leads_only(self, windowed_hamiltonian):
        """Test the window interior is left alone."""
        cfg = DisorderConfig(sigma_delta=0.1, n_realizations=1, seed=3, scope=DisorderScope.LEADS_ONLY)
        perturbed = perturb_couplings(windowed_hamiltonian, cfg, 0)
        assert_allclose(perturbed.entries[8:16, 8:16], windowed_hamiltonian.entries[8:16, 8:16])
        assert not np.allclose(perturbed.entries, windowed_hamiltonian.entries)

    def test_scope_needs_window(self, periodic_spec):
        """Test a restricted scope on a plain chain raises ConfigError."""
        cfg = DisorderConfig(sigma_delta=0.1, n_realizations=1, seed=3, scope=DisorderScope.SPLITTER_ONLY)
        with pytest.raises(ConfigError, match="window"):
            perturb_couplings(build_hamiltonian(periodic_spec), cfg, 0)


class TestAggregate:
    """Tests for per-sigma statistics."""

    def test_statistics_and_failures(self):
        """Test failed realizations are counted and left out of the moments."""
        outcomes = [
            RealizationOutcome(0.1, 1, True, 0.8, 0.9),
            RealizationOutcome(0.0, 0, True, 1.0, 1.0),
            RealizationOutcome(0.1, 0, True, 0.6, 0.7),
            RealizationOutcome(0.1, 2, False, math.nan, math.nan),
        ]
        clean, noisy = aggregate(outcomes)
        assert clean.sigma == 0.0 and clean.std_r_plus == 0.0
        assert noisy.mean_r_plus == pytest.approx(0.7)
        assert noisy.std_r_plus == pytest.approx(np.std([0.8, 0.6], ddof=1))
        assert (noisy.n_ok, noisy.n_failed) == (2, 1)

    def test_all_failed(self):
        """Test a sigma without successes reports NaN moments."""
        (point,) = aggregate([RealizationOutcome(0.2, 0, False, math.nan, math.nan)])
        assert math.isnan(point.mean_r_plus)
        assert point.n_failed == 1

    def test_error_bars_shrink_with_realizations(self):
        """Test the standard error is std / sqrt(n) and falls by 4 for 16 times the realizations."""
        stream = random_stream(3, 0)

        def point(n):
            values = 0.9 + 0.05 * stream.standard_normal(n)
            (p,) = aggregate([RealizationOutcome(0.1, r, True, v, v) for r, v in enumerate(values)])
            return p

        small, large = point(100), point(1600)
        assert small.sem_r_plus == pytest.approx(small.std_r_plus / 10)
        assert large.sem_t_minus == pytest.approx(large.std_t_minus / 40)
        assert large.sem_r_plus / small.sem_r_plus == pytest.approx(0.25, rel=0.3)

    def test_no_successes_no_error_bar(self):
        """Test the standard error is NaN when every realization failed."""
        (p,) = aggregate([RealizationOutcome(0.2, 0, False, math.nan, math.nan)])
        assert math.isnan(p.sem_r_plus)


class TestCsv:
    """Tests for the sweep tables."""

    def test_sweep_table_reloads_exactly(self, tmp_path):
        """Test written floats parse back to the same values."""
        points = aggregate(
            [RealizationOutcome(0.05, r, True, 0.9 + r / 7, 0.95 - r / 11) for r in range(3)]
        )
        path = tmp_path / "sweep.csv"
        text = sweep_csv(points, path)
        assert path.read_bytes().count(b"\r") == 0
        assert text.splitlines()[0] == "sigma,mean_r_plus,std_r_plus,mean_t_minus,std_t_minus,n_ok,n_failed"
        assert load_disorder_csv(text) == points

    def test_realizations_sorted(self):
        """Test rows come out ordered by sigma then realization."""
        outcomes = [
            RealizationOutcome(0.1, 1, True, 0.5, 0.5),
            RealizationOutcome(0.0, 0, False, math.nan, math.nan),
            RealizationOutcome(0.1, 0, True, 0.25, 0.75),
        ]
        loaded = load_realizations_csv(realizations_csv(outcomes))
        assert [(o.sigma, o.realization) for o in loaded] == [(0.0, 0), (0.1, 0), (0.1, 1)]
        assert loaded[0].ok is False
        assert loaded[2].r_plus == 0.5


class TestDisorderSweep:
    """Tests for the full Monte Carlo sweep on the small scattering chain."""

    @pytest.fixture
    def scenario(self, scatter_spec, scatter_projectors):
        """One-sided splitter at site 240 and a mixed packet 140 sites before it."""
        return ScatteringScenario(
            spec=scatter_spec,
            splitter=synthesize_splitter(scatter_spec, rho=24, v0=2.0),
            pspec=WavePacketSpec(width=12, kick=0.5, center=100),
            projectors=scatter_projectors,
            splitter_center=240,
        )

    def test_zero_sigma_reproduces_clean(self, scenario):
        """Test sigma = 0 matches the clean run and weak disorder stays close."""
        cfg = DisorderConfig(sigma_delta=0.003, n_realizations=2, seed=11)
        result = disorder_sweep(scenario, [0.0, 0.003], cfg, n_jobs=1)
        clean, noisy = result.points
        assert clean.mean_r_plus == pytest.approx(result.clean_r_plus)
        assert clean.mean_t_minus == pytest.approx(result.clean_t_minus)
        assert clean.std_r_plus == pytest.approx(0.0, abs=1e-12)
        assert (noisy.n_ok, noisy.n_failed) == (2, 0)
        assert len(result.outcomes) == 4
        assert noisy.mean_r_plus == pytest.approx(result.clean_r_plus, abs=0.02)
        assert noisy.mean_t_minus == pytest.approx(result.clean_t_minus, abs=0.02)

    def test_order_independent(self, scenario):
        """Test rerunning one realization alone gives the same numbers."""
        cfg = DisorderConfig(sigma_delta=0.003, n_realizations=2, seed=11)
        full = disorder_sweep(scenario, [0.003], cfg, n_jobs=1)
        single = scenario.run(perturb_couplings(scenario.hamiltonian(), cfg, 1))
        assert full.outcomes[1].r_plus == pytest.approx(single.r_plus)


@pytest.mark.slow
class TestDisorderAcceptance:
    """Fifty realizations around the rho = 60 splitter of the shipped disorder scenario."""

    @pytest.fixture(scope="class")
    def scenario(self):
        """1200-site chain, packet at 300, splitter at 700."""
        raw = json.loads(DISORDER_SCENARIO.read_text(encoding="utf-8"))
        return build_scenario(load_config(raw))

    def test_global_coupling_error_within_ten_percent(self, scenario):
        """Test a 10% spread of the overall coupling moves R+ and T- by less than 10%."""
        cfg = DisorderConfig(sigma_delta=0.1, n_realizations=50, seed=20240601, correlated=True)
        result = disorder_sweep(scenario, [0.1], cfg)
        (point,) = result.points
        assert point.n_ok >= 45
        assert abs(point.mean_r_plus - result.clean_r_plus) < 0.1 * result.clean_r_plus
        assert abs(point.mean_t_minus - result.clean_t_minus) < 0.1 * result.clean_t_minus

    def test_strong_bond_disorder_collapses(self, scenario):
        """Test independent bond errors of sigma = 0.5 destroy the lower-band transmission."""
        cfg = DisorderConfig(sigma_delta=0.5, n_realizations=50, seed=20240601)
        result = disorder_sweep(scenario, [0.5], cfg)
        (point,) = result.points
        assert point.n_ok > 0
        assert point.mean_t_minus < 0.5 * result.clean_t_minus
