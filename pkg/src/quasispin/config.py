"""Application configuration using pydantic-settings."""

from functools import lru_cache
from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide settings loaded from environment variables (QUASISPIN_*)."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="QUASISPIN_",
        case_sensitive=False,
    )

    # Application
    app_name: str = "quasispin"
    debug: bool = False
    log_level: str = "INFO"

    # Parallel sweeps (joblib); 1 keeps everything in-process
    n_jobs: int = 1

    # Output
    output_root: Path = Path("runs")

    # Quadrature for I-integrals
    quadrature_points: int = 1024
    quadrature_tol: float = 1e-9

    # Numerical tolerances
    hermitian_tol: float = 1e-12
    degeneracy_rtol: float = 1e-9
    norm_tol: float = 1e-10

    # Scattering guards
    edge_tol: float = 1e-6
    edge_sites: int = 10


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
