"""Tests for subcommand runs, run directories and the command line."""

import json
import re
from pathlib import Path

import pytest

from quasispin import main as cli
from quasispin.physics import ConfigError, ScatteringResult, SplitterMode
from quasispin.scenario import RunDirectory, config_hash, load_config, run_scenario, runner

SMALL = {
    "lattice": {"n_sites": 200, "mass": 0.2},
    "packet": {"center": 40, "width": 5},
    "splitter": {"rho": 4, "margin": 10},
    "zitt": {"t_max": 60.0, "dt": 0.05},
}

BASELINE = Path(__file__).resolve().parents[2] / "scenarios" / "baseline.json"


@pytest.fixture
def small_config():
    """200-site chain with a short-range splitter in the middle."""
    return load_config(SMALL)


@pytest.fixture
def scenario_file(tmp_path):
    """The small scenario written to disk."""
    path = tmp_path / "small.json"
    path.write_text(json.dumps(SMALL), encoding="utf-8")
    return path


@pytest.fixture
def quiet_cli(monkeypatch):
    """Keep main() from reconfiguring the root logger."""
    monkeypatch.setattr(cli, "configure_logging", lambda: None)


def read_manifest(run: RunDirectory) -> dict:
    return json.loads((run.path / "manifest.json").read_text(encoding="utf-8"))


class TestRunDirectory:
    """Tests for run directory naming and writers."""

    def test_name_follows_hash(self, tmp_path):
        """Test the directory is <subcommand>-<first 12 hex digits>."""
        run = RunDirectory.create(tmp_path, "spectrum", {"a": 1}, seed=None)
        digest = config_hash({"subcommand": "spectrum", "seed": None, "config": {"a": 1}})
        assert run.path == tmp_path / f"spectrum-{digest[:12]}"
        assert run.manifest.config_hash == digest

    def test_hash_ignores_key_order(self):
        """Test equal configs hash equally regardless of insertion order."""
        assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})

    def test_csv_floats_round_trip(self, tmp_path):
        """Test floats are written with full precision and LF endings."""
        run = RunDirectory.create(tmp_path, "spectrum", {}, seed=None)
        path = run.write_csv("values.csv", ["x"], [[0.1 + 0.2], [1 / 3]])
        assert path.read_bytes() == f"x\n{0.1 + 0.2!r}\n{1 / 3!r}\n".encode()

    def test_finish_lists_files(self, tmp_path):
        """Test the manifest lists every written file but not itself."""
        run = RunDirectory.create(tmp_path, "spectrum", {}, seed=5)
        run.write_json("b.json", {"x": 1})
        run.write_text("a.txt", "hello\n")
        run.finish()
        manifest = read_manifest(run)
        assert manifest["files"] == ["a.txt", "b.json", "resolved_config.json"]
        assert manifest["status"] == "ok"
        assert manifest["seed"] == 5
        assert manifest["wall_clock"] >= 0


class TestRunScenario:
    """Tests for subcommand runs on small chains."""

    def test_splitter_matrix(self, tmp_path, small_config):
        """Test the splitter export and its summary."""
        run = run_scenario("splitter-matrix", small_config, output=tmp_path)
        assert re.fullmatch(r"splitter-matrix-[0-9a-f]{12}", run.path.name)
        manifest = read_manifest(run)
        assert manifest["status"] == "ok"
        assert {"splitter_matrix.csv", "locality_profile.csv", "splitter.json"} <= set(manifest["files"])
        summary = json.loads((run.path / "splitter.json").read_text(encoding="utf-8"))
        assert summary["rho"] == 4
        assert summary["mode"] == "one_sided"
        for name in manifest["files"]:
            assert b"\r" not in (run.path / name).read_bytes()

    def test_same_config_same_directory(self, tmp_path, small_config):
        """Test reruns land in the same directory and a new seed in another."""
        first = run_scenario("hexamer", small_config, output=tmp_path)
        second = run_scenario("hexamer", small_config, output=tmp_path)
        seeded = run_scenario("hexamer", small_config, seed=3, output=tmp_path)
        assert first.path == second.path
        assert seeded.path != first.path

    def test_resolved_config_written(self, tmp_path, small_config):
        """Test the resolved config reloads to the same scenario."""
        run = run_scenario("hexamer", small_config, output=tmp_path)
        resolved = json.loads((run.path / "resolved_config.json").read_text(encoding="utf-8"))
        assert load_config(resolved) == small_config

    def test_hexamer(self, tmp_path, small_config):
        """Test the level table and the inversion residual."""
        run = run_scenario("hexamer", small_config, output=tmp_path)
        summary = json.loads((run.path / "hexamer.json").read_text(encoding="utf-8"))
        assert summary["triangle_inversion_residual"] < 1e-12
        assert summary["gap_first"] > 0 > summary["gap_last"]
        assert len(summary["crossings"]) >= 1
        lines = (run.path / "hexamer_levels.csv").read_text(encoding="utf-8").splitlines()
        assert len(lines) == 1 + small_config.hexamer.n_theta

    def test_spectrum(self, tmp_path, small_config):
        """Test analytic bands agree with exact diagonalization."""
        run = run_scenario("spectrum", small_config, output=tmp_path)
        summary = json.loads((run.path / "spectrum.json").read_text(encoding="utf-8"))
        assert summary["max_eigenvalue_error"] < 1e-10
        assert summary["dirac_form_residual"] < 1e-12
        assert summary["gap"] == pytest.approx(0.4)

    def test_zitt(self, tmp_path, small_config):
        """Test the zitt run writes a trace and a fit per mass."""
        run = run_scenario("zitt", small_config, output=tmp_path)
        files = set(read_manifest(run)["files"])
        assert {"zitt_trace_mu0.2.csv", "zitt_fit_mu0.2.json"} <= files
        fit = json.loads((run.path / "zitt_fit_mu0.2.json").read_text(encoding="utf-8"))
        assert set(fit["predicted"]) == {"omega_1", "omega_2"}

    def test_zitt_finds_both_lines(self, tmp_path):
        """Test the default dimer run matches 2 mu and 2 sqrt(4 + mu^2) and fits a decaying envelope."""
        config = load_config(
            {
                "lattice": {"n_sites": 600, "mass": 0.5},
                "packet": {"center": 100, "width": 10},
                "splitter": {"center": 400},
                "zitt": {"t_max": 100.0, "t_transient": 20.0},
            }
        )
        run = run_scenario("zitt", config, output=tmp_path)
        fit = json.loads((run.path / "zitt_fit_mu0.5.json").read_text(encoding="utf-8"))
        assert fit["matched"]["omega_1"] == pytest.approx(1.0, abs=0.1)
        assert fit["matched"]["omega_2"] == pytest.approx(2 * 4.25**0.5, abs=0.15)
        assert -0.75 < fit["envelope_exponent"] < -0.25

    def test_calibrated_scatter(self, tmp_path, monkeypatch, small_config):
        """Test target_r_plus routes the run through the gate calibration and records it."""
        calls = {}
        canned = ScatteringResult(
            r_plus=0.7, t_plus=0.3, r_minus=0.05, t_minus=0.95, partition_site=100,
            collision_time=200.0, arrival_time=63.0, separation_time=150.0,
            band_weight_initial=(0.5, 0.5), band_weight_final=(0.5, 0.5),
        )

        def fake_calibration(spec, pspec, projectors, center, rho, target, **options):
            calls.update(rho=rho, target=target, bracket=options["bracket"], mode=options["mode"])
            return 1.25, canned

        monkeypatch.setattr(runner, "calibrate_gate_height", fake_calibration)
        config = small_config.model_copy(
            update={"splitter": small_config.splitter.model_copy(update={"target_r_plus": 0.7})}
        )
        run = run_scenario("scatter", config, output=tmp_path)
        assert calls == {"rho": 4, "target": 0.7, "bracket": (0.0, 2.0), "mode": SplitterMode.ONE_SIDED}
        calibration = json.loads((run.path / "calibration.json").read_text(encoding="utf-8"))
        assert calibration == {"target_r_plus": 0.7, "v0": 1.25, "r_plus": 0.7, "t_minus": 0.95}
        result = json.loads((run.path / "result.json").read_text(encoding="utf-8"))
        assert result["r_plus"] == 0.7
        assert result["band_weight_lost_plus"] == 0.0

    def test_failure_writes_manifest(self, tmp_path, small_config):
        """Test a disorder run without a seed fails with a manifest recording the error."""
        with pytest.raises(ConfigError):
            run_scenario("disorder", small_config, output=tmp_path)
        (path,) = tmp_path.iterdir()
        manifest = json.loads((path / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["status"] == "failed"
        assert manifest["error"]["error"] == "ConfigError"


class TestMain:
    """Tests for the command-line entry point."""

    def test_validate_clean(self, capsys, quiet_cli, scenario_file):
        """Test validate exits 0 with an empty violation list."""
        assert cli.main(["validate", str(scenario_file)]) == 0
        assert json.loads(capsys.readouterr().out) == {"violations": []}

    def test_validate_with_override(self, capsys, quiet_cli, scenario_file):
        """Test overrides are validated too and violations exit 1."""
        assert cli.main(["validate", str(scenario_file), "--set", "lattice.n_sites=201"]) == 1
        violations = json.loads(capsys.readouterr().out)["violations"]
        assert violations[0].startswith("lattice.n_sites")

    def test_run_prints_directory(self, capsys, quiet_cli, scenario_file, tmp_path):
        """Test a successful run prints its directory."""
        out = tmp_path / "runs"
        assert cli.main(["splitter-matrix", str(scenario_file), "--output", str(out)]) == 0
        printed = Path(capsys.readouterr().out.strip())
        assert printed.parent == out
        assert (printed / "manifest.json").exists()

    def test_disorder_needs_seed(self, capsys, quiet_cli, scenario_file):
        """Test a seedless disorder run exits 2 with a JSON error."""
        assert cli.main(["disorder", str(scenario_file)]) == 2
        payload = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert payload["error"] == "ConfigError"
        assert payload["details"] == ["seed: required for disorder"]

    def test_missing_file(self, capsys, quiet_cli, tmp_path):
        """Test an unreadable scenario exits 2."""
        assert cli.main(["spectrum", str(tmp_path / "absent.json")]) == 2
        assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "ConfigError"


@pytest.mark.slow
class TestBaseline:
    """Full-size acceptance run of the shipped baseline scenario."""

    def test_baseline_scatter(self, tmp_path):
        """Test the baseline splitter reflects the upper band and passes the lower band."""
        config = load_config(json.loads(BASELINE.read_text(encoding="utf-8")))
        run = run_scenario("scatter", config, output=tmp_path)
        result = json.loads((run.path / "result.json").read_text(encoding="utf-8"))
        assert result["t_plus"] <= 0.02
        assert result["t_minus"] >= 0.99
        assert result["diagnostics"]["norm_drift"] < 1e-8
