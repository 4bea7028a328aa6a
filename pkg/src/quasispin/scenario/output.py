"""Run directories: CSV/JSON writers and the atomic manifest."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import tempfile
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from quasispin import __version__

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
RESOLVED_CONFIG_NAME = "resolved_config.json"


def canonical_json(obj: Any) -> str:
    """Compact JSON with sorted keys; the input to config hashes."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, default=_jsonable)


def config_hash(resolved: dict[str, Any]) -> str:
    return hashlib.sha256(canonical_json(resolved).encode("utf-8")).hexdigest()


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, complex | np.complexfloating):
        return [float(value.real), float(value.imag)]
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


@dataclass
class RunManifest:
    """What a run produced and how to reproduce it."""

    subcommand: str
    config_hash: str
    seed: int | None
    version: str = __version__
    started_at: float = field(default_factory=time.time)
    finished_at: float | None = None
    wall_clock: float | None = None
    files: list[str] = field(default_factory=list)
    status: str = "running"
    error: dict[str, Any] | None = None

    def to_record(self) -> dict[str, Any]:
        return {
            "subcommand": self.subcommand,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "version": self.version,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "wall_clock": self.wall_clock,
            "files": sorted(self.files),
            "status": self.status,
            "error": self.error,
        }


class RunDirectory:
    """One directory per run; every file goes through here so the manifest lists it."""

    def __init__(self, path: Path, manifest: RunManifest) -> None:
        self.path = Path(path)
        self.manifest = manifest
        self._clock = time.perf_counter()
        self.path.mkdir(parents=True, exist_ok=True)

    @classmethod
    def create(
        cls,
        root: Path,
        subcommand: str,
        resolved: dict[str, Any],
        seed: int | None,
    ) -> RunDirectory:
        """`<root>/<subcommand>-<hash[:12]>` with resolved_config.json already written."""
        digest = config_hash({"subcommand": subcommand, "seed": seed, "config": resolved})
        run = cls(Path(root) / f"{subcommand}-{digest[:12]}", RunManifest(subcommand, digest, seed))
        run.write_json(RESOLVED_CONFIG_NAME, resolved)
        logger.info("Run directory %s", run.path)
        return run

    def _register(self, name: str) -> Path:
        if name not in self.manifest.files:
            self.manifest.files.append(name)
        target = self.path / name
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    def write_text(self, name: str, text: str) -> Path:
        target = self._register(name)
        with target.open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        logger.debug("Wrote %s", target)
        return target

    def write_json(self, name: str, obj: Any) -> Path:
        return self.write_text(
            name, json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, default=_jsonable) + "\n"
        )

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(value) for value in row])
        return self.write_text(name, buffer.getvalue())

    def finish(self, error: dict[str, Any] | None = None) -> Path:
        """Write manifest.json atomically; the manifest itself is not listed in files."""
        self.manifest.finished_at = time.time()
        self.manifest.wall_clock = time.perf_counter() - self._clock
        self.manifest.status = "failed" if error else "ok"
        self.manifest.error = error
        target = self.path / MANIFEST_NAME
        _atomic_write(target, json.dumps(self.manifest.to_record(), sort_keys=True, indent=2) + "\n")
        logger.info(
            "Run %s %s in %.1fs (%d files)",
            self.manifest.subcommand,
            self.manifest.status,
            self.manifest.wall_clock,
            len(self.manifest.files),
        )
        return target


def _csv_cell(value: Any) -> Any:
    if isinstance(value, float | np.floating):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value
