"""Deterministic file output and run manifests.

CSV floats are written with repr() (shortest round-trip form) and JSON with
sorted keys, so identical inputs produce byte-identical files; the manifest
records a sha256 digest per output for later verification.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    if isinstance(value, (np.integer, int)):
        return str(int(value))
    return str(value)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n")
    return path


def write_field_snapshot(path, array: np.ndarray, spacing, units: str = "um^(-dims/2)") -> list[Path]:
    """Flat binary array (.npy) plus a JSON sidecar describing shape/spacing."""
    path = Path(path)
    np.save(path, array)
    npy = path if path.suffix == ".npy" else path.with_suffix(path.suffix + ".npy")
    sidecar = write_json(npy.with_suffix(".json"), {
        "shape": list(array.shape),
        "dtype": str(array.dtype),
        "spacing_um": list(spacing),
        "units": units,
    })
    return [npy, sidecar]


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Record of one CLI run: command, resolved configuration, seeds, code
    version, wall-clock and the digests of every output file."""

    command: str
    config: dict
    seeds: dict = field(default_factory=dict)
    version: str = __version__
    wall_clock_s: float = 0.0
    outputs: dict = field(default_factory=dict)

    def add_output(self, path) -> None:
        path = Path(path)
        self.outputs[path.name] = sha256_file(path)

    def save(self, directory) -> Path:
        payload = {
            "command": self.command,
            "config": self.config,
            "seeds": self.seeds,
            "version": self.version,
            "wall_clock_s": self.wall_clock_s,
            "outputs": self.outputs,
        }
        return write_json(Path(directory) / "manifest.json", payload)

    @classmethod
    def load(cls, path) -> "RunManifest":
        data = json.loads(Path(path).read_text())
        return cls(command=data["command"], config=data["config"], seeds=data["seeds"],
                   version=data["version"], wall_clock_s=data["wall_clock_s"],
                   outputs=data["outputs"])


def verify_manifest(manifest_path) -> list[str]:
    """Re-hash the outputs listed in a manifest; returns mismatch descriptions
    (empty when everything checks out)."""
    manifest_path = Path(manifest_path)
    manifest = RunManifest.load(manifest_path)
    problems = []
    for name, digest in manifest.outputs.items():
        target = manifest_path.parent / name
        if not target.exists():
            problems.append(f"{name}: missing")
        elif sha256_file(target) != digest:
            problems.append(f"{name}: digest mismatch")
    return problems


class Stopwatch:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        return False
