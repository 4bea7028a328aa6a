"""Monte Carlo robustness of the splitter against hopping disorder.

Every in-scope bond is scaled by (1 - delta) with delta ~ N(0, sigma^2),
one draw per bond so the Hamiltonian stays Hermitian. A correlated config
draws a single delta per realization for all of them, a global error in Delta. Streams come from
Philox keyed by (seed, realization), so any realization can be recomputed on
its own and parallel sweeps reduce to the same numbers in any order.
"""

from __future__ import annotations

import csv
import io
import logging
from collections.abc import Sequence
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed

from quasispin.config import get_settings
from quasispin.physics.base import ConfigError, DynamicsError, OperatorMatrix
from quasispin.physics.dynamics import ScatteringScenario

logger = logging.getLogger(__name__)

CSV_FIELDS = ["sigma", "mean_r_plus", "std_r_plus", "mean_t_minus", "std_t_minus", "n_ok", "n_failed"]
REALIZATION_FIELDS = ["sigma", "realization", "ok", "r_plus", "t_minus"]


class DisorderScope(str, Enum):
    """Which bonds receive disorder."""

    WHOLE_CHAIN = "whole_chain"
    SPLITTER_ONLY = "splitter_only"
    LEADS_ONLY = "leads_only"


@dataclass(frozen=True)
class DisorderConfig:
    sigma_delta: float
    n_realizations: int
    seed: int
    scope: DisorderScope = DisorderScope.WHOLE_CHAIN
    correlated: bool = False

    def __post_init__(self) -> None:
        violations = []
        if self.sigma_delta < 0:
            violations.append(f"sigma_delta must be >= 0, got {self.sigma_delta}")
        if self.n_realizations < 1:
            violations.append(f"n_realizations must be >= 1, got {self.n_realizations}")
        if violations:
            raise ConfigError("Invalid disorder configuration", violations)
        object.__setattr__(self, "scope", DisorderScope(self.scope))


@dataclass(frozen=True)
class RealizationOutcome:
    sigma: float
    realization: int
    ok: bool
    r_plus: float
    t_minus: float


@dataclass(frozen=True)
class DisorderPoint:
    """Aggregate over the realizations of one sigma."""

    sigma: float
    mean_r_plus: float
    std_r_plus: float
    mean_t_minus: float
    std_t_minus: float
    n_ok: int
    n_failed: int

    @property
    def sem_r_plus(self) -> float:
        """Standard error of mean_r_plus."""
        return self.std_r_plus / np.sqrt(self.n_ok) if self.n_ok else float("nan")

    @property
    def sem_t_minus(self) -> float:
        """Standard error of mean_t_minus."""
        return self.std_t_minus / np.sqrt(self.n_ok) if self.n_ok else float("nan")


@dataclass(frozen=True)
class DisorderSweepResult:
    points: list[DisorderPoint]
    outcomes: list[RealizationOutcome]
    clean_r_plus: float
    clean_t_minus: float
    config: DisorderConfig


def random_stream(seed: int, realization: int) -> np.random.Generator:
    """Counter-based generator for one realization."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, realization])))


def coupling_factors(n_bonds: int, cfg: DisorderConfig, realization: int) -> np.ndarray:
    """The (1 - delta) factors for n_bonds bonds of one realization."""
    if cfg.sigma_delta == 0:
        return np.ones(n_bonds)
    stream = random_stream(cfg.seed, realization)
    if cfg.correlated:
        return np.full(n_bonds, 1.0 - stream.normal(0.0, cfg.sigma_delta))
    deltas = stream.normal(0.0, cfg.sigma_delta, n_bonds)
    return 1.0 - deltas


def _bond_mask(h: OperatorMatrix, scope: DisorderScope) -> np.ndarray:
    rows, cols = np.indices(h.entries.shape)
    bonds = (cols > rows) & (h.entries != 0)
    if scope is DisorderScope.WHOLE_CHAIN:
        return bonds
    window = h.meta.get("window")
    if window is None:
        raise ConfigError(f"Scope {scope.value} needs a Hamiltonian with an embedded splitter window")
    start, stop = window
    inside = (rows >= start) & (rows < stop) & (cols >= start) & (cols < stop)
    return bonds & inside if scope is DisorderScope.SPLITTER_ONLY else bonds & ~inside


def perturb_couplings(h: OperatorMatrix, cfg: DisorderConfig, realization: int) -> OperatorMatrix:
    """Scale every in-scope off-diagonal bond by (1 - delta); onsite terms are untouched."""
    mask = _bond_mask(h, cfg.scope)
    rows, cols = np.nonzero(mask)
    factors = coupling_factors(rows.size, cfg, realization)
    entries = np.array(h.entries)
    entries[rows, cols] *= factors
    entries[cols, rows] = np.conj(entries[rows, cols])
    return OperatorMatrix(
        entries=entries,
        hermitian_flag=True,
        label=h.label,
        meta={**h.meta, "sigma_delta": cfg.sigma_delta, "realization": realization},
    )


def _run_realization(
    scenario: ScatteringScenario, h_clean: OperatorMatrix, cfg: DisorderConfig, realization: int
) -> RealizationOutcome:
    h = perturb_couplings(h_clean, cfg, realization)
    try:
        result = scenario.run(h)
    except DynamicsError as exc:
        logger.warning("sigma=%.3g realization %d excluded: %s", cfg.sigma_delta, realization, exc)
        return RealizationOutcome(cfg.sigma_delta, realization, False, float("nan"), float("nan"))
    return RealizationOutcome(cfg.sigma_delta, realization, True, result.r_plus, result.t_minus)


def aggregate(outcomes: Sequence[RealizationOutcome]) -> list[DisorderPoint]:
    """Mean and standard deviation of R+ and T- per sigma, over successful runs."""
    points = []
    for sigma in sorted({o.sigma for o in outcomes}):
        group = sorted((o for o in outcomes if o.sigma == sigma), key=lambda o: o.realization)
        ok = [o for o in group if o.ok]
        r_plus = np.array([o.r_plus for o in ok])
        t_minus = np.array([o.t_minus for o in ok])
        ddof = 1 if len(ok) > 1 else 0
        points.append(
            DisorderPoint(
                sigma=float(sigma),
                mean_r_plus=float(r_plus.mean()) if ok else float("nan"),
                std_r_plus=float(r_plus.std(ddof=ddof)) if ok else float("nan"),
                mean_t_minus=float(t_minus.mean()) if ok else float("nan"),
                std_t_minus=float(t_minus.std(ddof=ddof)) if ok else float("nan"),
                n_ok=len(ok),
                n_failed=len(group) - len(ok),
            )
        )
    return points


def disorder_sweep(
    scenario: ScatteringScenario,
    sigmas: Sequence[float],
    cfg: DisorderConfig,
    n_jobs: int | None = None,
) -> DisorderSweepResult:
    """Run cfg.n_realizations perturbed scattering runs for every sigma.

    The clean scenario is run first and must succeed. Failed realizations are
    excluded from the statistics and counted.
    """
    n_jobs = n_jobs or get_settings().n_jobs
    h_clean = scenario.hamiltonian()
    clean = scenario.run(h_clean)
    logger.info("Clean splitter: R+=%.4f T-=%.4f", clean.r_plus, clean.t_minus)

    tasks = [
        (replace(cfg, sigma_delta=float(sigma)), realization)
        for sigma in sigmas
        for realization in range(cfg.n_realizations)
    ]
    outcomes = Parallel(n_jobs=n_jobs)(
        delayed(_run_realization)(scenario, h_clean, task_cfg, realization)
        for task_cfg, realization in tasks
    )
    points = aggregate(outcomes)
    for point in points:
        logger.info(
            "sigma=%.3g: R+=%.4f+-%.4f T-=%.4f+-%.4f (%d ok, %d failed)",
            point.sigma, point.mean_r_plus, point.std_r_plus,
            point.mean_t_minus, point.std_t_minus, point.n_ok, point.n_failed,
        )
    return DisorderSweepResult(
        points=points,
        outcomes=list(outcomes),
        clean_r_plus=clean.r_plus,
        clean_t_minus=clean.t_minus,
        config=cfg,
    )


def _write(rows: list[list[object]], header: list[str], path: Path | None) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    text = buffer.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def sweep_csv(points: Sequence[DisorderPoint], path: Path | None = None) -> str:
    rows = [
        [repr(p.sigma), repr(p.mean_r_plus), repr(p.std_r_plus), repr(p.mean_t_minus),
         repr(p.std_t_minus), p.n_ok, p.n_failed]
        for p in points
    ]
    return _write(rows, CSV_FIELDS, path)


def realizations_csv(outcomes: Sequence[RealizationOutcome], path: Path | None = None) -> str:
    rows = [
        [repr(o.sigma), o.realization, int(o.ok), repr(o.r_plus), repr(o.t_minus)]
        for o in sorted(outcomes, key=lambda o: (o.sigma, o.realization))
    ]
    return _write(rows, REALIZATION_FIELDS, path)


def load_disorder_csv(text: str) -> list[DisorderPoint]:
    """Parse the text written by sweep_csv."""
    reader = csv.DictReader(io.StringIO(text))
    return [
        DisorderPoint(
            sigma=float(row["sigma"]),
            mean_r_plus=float(row["mean_r_plus"]),
            std_r_plus=float(row["std_r_plus"]),
            mean_t_minus=float(row["mean_t_minus"]),
            std_t_minus=float(row["std_t_minus"]),
            n_ok=int(row["n_ok"]),
            n_failed=int(row["n_failed"]),
        )
        for row in reader
    ]


def load_realizations_csv(text: str) -> list[RealizationOutcome]:
    """Parse the text written by realizations_csv."""
    reader = csv.DictReader(io.StringIO(text))
    return [
        RealizationOutcome(
            sigma=float(row["sigma"]),
            realization=int(row["realization"]),
            ok=bool(int(row["ok"])),
            r_plus=float(row["r_plus"]),
            t_minus=float(row["t_minus"]),
        )
        for row in reader
    ]
