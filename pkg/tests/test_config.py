"""Tests for process-wide settings."""

from pathlib import Path

from quasispin.config import Settings, get_settings


class TestSettings:
    """Tests for environment-driven settings."""

    def test_defaults(self, monkeypatch):
        """Test the defaults without any QUASISPIN_ variables."""
        monkeypatch.delenv("QUASISPIN_EDGE_SITES", raising=False)
        monkeypatch.delenv("QUASISPIN_N_JOBS", raising=False)
        settings = Settings(_env_file=None)
        assert settings.app_name == "quasispin"
        assert settings.n_jobs == 1
        assert settings.edge_sites == 10
        assert settings.output_root == Path("runs")

    def test_env_prefix(self, monkeypatch):
        """Test QUASISPIN_ variables override the defaults."""
        monkeypatch.setenv("QUASISPIN_QUADRATURE_POINTS", "256")
        monkeypatch.setenv("quasispin_debug", "true")
        settings = Settings(_env_file=None)
        assert settings.quadrature_points == 256
        assert settings.debug is True

    def test_cached(self):
        """Test get_settings returns one shared instance until cleared."""
        first = get_settings()
        assert get_settings() is first
        get_settings.cache_clear()
        assert get_settings() is not first
