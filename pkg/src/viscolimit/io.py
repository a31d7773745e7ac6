"""Plain-text field export: long-format CSV (t, x[, y], u) plus a JSON run manifest."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .model import SpatialDomain
from .viscous import SpaceTimeField

__all__ = [
    "write_field_csv",
    "read_field_csv",
    "write_manifest",
    "read_manifest",
    "manifest_path",
    "dump_json",
    "fmt",
]

_AXES = ("x", "y")


def fmt(value: float) -> str:
    """Shortest round-trippable float text."""
    return repr(float(value))


def dump_json(obj, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n")
    return path


def manifest_path(csv_path: str | Path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".manifest.json")


def write_field_csv(field: SpaceTimeField, path: str | Path, every: int = 1) -> Path:
    """One row per (time level, cell); rows ordered by t, then x, then y.

    ``every`` keeps each ``every``-th stored level (the last is always kept).
    """
    path = Path(path)
    keep = list(range(0, len(field.t), max(1, every)))
    if keep[-1] != len(field.t) - 1:
        keep.append(len(field.t) - 1)
    mesh = [m.ravel() for m in field.mesh()]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", *_AXES[: field.dim], "u"])
        for n in keep:
            tn = fmt(field.t[n])
            coords = [[fmt(v) for v in m] for m in mesh]
            for i, u in enumerate(field.u[n].ravel()):
                w.writerow([tn, *(c[i] for c in coords), fmt(u)])
    return path


def write_manifest(field: SpaceTimeField, path: str | Path, extra: dict | None = None) -> Path:
    data = field.manifest()
    if extra:
        data.update(extra)
    return dump_json(data, path)


def read_manifest(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def read_field_csv(
    path: str | Path,
    domain: SpatialDomain | None = None,
    eps: float | None = None,
    manifest: dict | None = None,
) -> SpaceTimeField:
    """Rebuild a field from its CSV; grid extents come from the manifest when present.

    Without a manifest the domain defaults to the bounding box of the cell
    centres extended by half a cell.
    """
    path = Path(path)
    if manifest is None and manifest_path(path).exists():
        manifest = read_manifest(manifest_path(path))
    manifest = manifest or {}
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    with path.open() as fh:
        header = fh.readline().strip().split(",")
    if header[0] != "t" or header[-1] != "u" or header[1:-1] not in (["x"], ["x", "y"]):
        raise ValueError(f"unexpected CSV header {header}")
    dim = len(header) - 2
    t_all = data[:, 0]
    times = np.unique(t_all)
    axes = [np.unique(data[:, 1 + a]) for a in range(dim)]
    shape = tuple(len(ax) for ax in axes)
    per_level = int(np.prod(shape))
    if data.shape[0] != per_level * len(times):
        raise ValueError("CSV is not a complete tensor grid at every time level")
    order = np.lexsort(tuple(data[:, k] for k in range(dim, -1, -1)))
    u = data[order, -1].reshape((len(times),) + shape)

    if domain is None:
        if "lower" in manifest and "upper" in manifest:
            domain = SpatialDomain(tuple(manifest["lower"]), tuple(manifest["upper"]))
        else:
            lo, hi = [], []
            for ax in axes:
                h = (ax[-1] - ax[0]) / (len(ax) - 1) if len(ax) > 1 else 1.0
                lo.append(float(ax[0] - h / 2))
                hi.append(float(ax[-1] + h / 2))
            domain = SpatialDomain(tuple(lo), tuple(hi))
    if eps is None:
        eps = float(manifest.get("eps", 0.0))
    dt = float(manifest.get("dt", np.min(np.diff(times)) if len(times) > 1 else 0.0))
    keys = ("solver", "scheme", "ghost")
    kw = {k: manifest[k] for k in keys if k in manifest}
    meta = {k: v for k, v in manifest.items() if k in ("flux", "viscosity", "A", "steps")}
    return SpaceTimeField(domain, times, u, dt, eps, meta=meta, **kw)
