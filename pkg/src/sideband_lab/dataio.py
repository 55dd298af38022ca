"""CSV spectrum files and run manifests.

Spectrum CSV format: a `# offset_hz,value_quanta` header line, one row per
grid point, offsets in Hz (angular rates divided by 2*pi at this boundary).
Component files add a third column with the component name. Calibration
ingestion uses the same reader with `# freq_hz,value` headers.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .model import TWO_PI, Spectrum

__all__ = [
    "write_spectrum_csv", "read_spectrum_csv", "read_xy_csv",
    "write_components_csv", "RunManifest", "write_manifest", "file_sha256",
]


def write_spectrum_csv(path, spec: Spectrum, header: str = "# offset_hz,value_quanta") -> None:
    lines = [header]
    for x, v in zip(spec.freq_offsets, spec.values):
        lines.append(f"{float(x) / TWO_PI!r},{float(v)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_components_csv(path, components: dict[str, Spectrum],
                         header: str = "# offset_hz,value_quanta,component") -> None:
    lines = [header]
    for name, spec in components.items():
        for x, v in zip(spec.freq_offsets, spec.values):
            lines.append(f"{float(x) / TWO_PI!r},{float(v)!r},{name}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_xy_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Two-column numeric CSV with `#` comment lines; returns (x, y) as given."""
    xs, ys = [], []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) < 2:
            raise ConfigError(f"{path}: expected at least two columns, got {line!r}")
        xs.append(float(parts[0]))
        ys.append(float(parts[1]))
    if not xs:
        raise ConfigError(f"{path}: no data rows")
    return np.asarray(xs), np.asarray(ys)


def read_spectrum_csv(path) -> Spectrum:
    """Read a spectrum CSV (offsets in Hz) back into rad/s offsets."""
    x, y = read_xy_csv(path)
    order = np.argsort(x)
    return Spectrum(TWO_PI * x[order], y[order])


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """What a CLI invocation did: inputs hashed, outputs listed."""

    command: str
    config_hash: str
    outputs: list[str] = field(default_factory=list)
    seed: int | None = None
    tool_version: str = "0.1.0"

    def to_dict(self) -> dict:
        return asdict(self)


def write_manifest(directory, manifest: RunManifest) -> Path:
    path = Path(directory) / "manifest.json"
    path.write_text(json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n")
    return path
