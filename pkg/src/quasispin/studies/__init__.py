"""Studies built on the physics layer.

This module contains:
- Zitterbewegung extraction, envelope and frequency fits
- Monte Carlo hopping-disorder sweeps of the splitter
"""

from quasispin.studies.disorder import (
    DisorderConfig,
    DisorderPoint,
    DisorderScope,
    DisorderSweepResult,
    RealizationOutcome,
    aggregate,
    coupling_factors,
    disorder_sweep,
    load_disorder_csv,
    perturb_couplings,
    realizations_csv,
    sweep_csv,
)
from quasispin.studies.zitterbewegung import (
    StationaryPoints,
    ZittFit,
    ZittIntegrals,
    ZittTrace,
    extract_zitt,
    fit_envelope,
    identify_frequencies,
    interband_bracket,
    stationary_points,
    zitt_integrals,
)

__all__ = [
    # Disorder
    "DisorderConfig",
    "DisorderPoint",
    "DisorderScope",
    "DisorderSweepResult",
    "RealizationOutcome",
    "aggregate",
    "coupling_factors",
    "disorder_sweep",
    "load_disorder_csv",
    "perturb_couplings",
    "realizations_csv",
    "sweep_csv",
    # Zitterbewegung
    "StationaryPoints",
    "ZittFit",
    "ZittIntegrals",
    "ZittTrace",
    "extract_zitt",
    "fit_envelope",
    "identify_frequencies",
    "interband_bracket",
    "stationary_points",
    "zitt_integrals",
]
