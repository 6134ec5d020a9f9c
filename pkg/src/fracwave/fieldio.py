"""Field files: one sample per line (CSV) or flat little-endian float64, row-major,
with a JSON sidecar ``<path>.json`` holding {dim, n, L, format}."""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .errors import GridMismatch
from .spectral import Field, Grid

FORMATS = ("csv", "bin")


def sidecar_path(path) -> Path:
    return Path(f"{path}.json")


def _format_for(path) -> str:
    return "bin" if Path(path).suffix in (".bin", ".f64", ".raw") else "csv"


def atomic_write(path, data: bytes) -> None:
    """Write to a temporary sibling, then rename over ``path``."""
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def write_field(path, field: Field, fmt: str = None) -> tuple:
    """Returns (data path, sidecar path)."""
    fmt = fmt or _format_for(path)
    if fmt not in FORMATS:
        raise ValueError(f"unknown field format {fmt!r}; expected one of {FORMATS}")
    flat = np.ascontiguousarray(field.samples, dtype="<f8").ravel()
    if fmt == "csv":
        body = "".join(format(v, ".17g") + "\n" for v in flat).encode()
    else:
        body = flat.tobytes()
    g = field.grid
    atomic_write(path, body)
    side = sidecar_path(path)
    atomic_write(side, json.dumps({"dim": g.dim, "n": g.n, "L": g.L, "format": fmt}, indent=2).encode())
    return Path(path), side


def read_sidecar(path) -> dict:
    side = sidecar_path(path)
    if not side.exists():
        raise FileNotFoundError(f"missing sidecar {side}")
    meta = json.loads(side.read_text())
    missing = {"dim", "n", "L"} - set(meta)
    if missing:
        raise ValueError(f"sidecar {side} lacks {sorted(missing)}")
    return meta


def read_field(path, grid: Grid = None) -> Field:
    """Load a field; if ``grid`` is given the sidecar must describe the same grid."""
    path = Path(path)
    meta = read_sidecar(path)
    stored = Grid(int(meta["dim"]), int(meta["n"]), float(meta["L"]))
    if grid is not None and stored != grid:
        raise GridMismatch(f"{path}: file grid {stored} differs from {grid}")
    fmt = meta.get("format", _format_for(path))
    if fmt == "csv":
        flat = np.loadtxt(path, dtype=float, ndmin=1)
    elif fmt == "bin":
        flat = np.fromfile(path, dtype="<f8")
    else:
        raise ValueError(f"{path}: unknown format {fmt!r}")
    if flat.size != stored.size:
        raise GridMismatch(f"{path}: {flat.size} samples, grid needs {stored.size}")
    return Field(stored, flat.reshape(stored.shape))
