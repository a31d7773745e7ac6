"""Smooth, boundary-compatible approximations of the initial datum.

The datum is extended by zero outside the domain, shifted inward near each
face and convolved with a normalized bump of radius eps.  The convolution
is tabulated on a fine grid with nonnegative weights that sum to one, and
evaluated by (multi)linear interpolation, so the construction is an exact
sup-norm contraction.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.ndimage import convolve1d

from .model import SpatialDomain

__all__ = [
    "InitialCondition",
    "MollifiedDatum",
    "BoundsReport",
    "bump_weights",
    "smooth_step",
    "mollify_dirichlet",
    "verify_initial_bounds",
    "sweep_uniformity",
    "make_initial_condition",
    "load_initial_csv",
    "INITIAL_NAMES",
]

# blend window: full inward shift within SHIFT_FULL*eps of a face, none beyond SHIFT_OFF*eps
SHIFT = 2.0
SHIFT_FULL = 3.0
SHIFT_OFF = 5.0


@dataclass(frozen=True)
class InitialCondition:
    """Bounded sampler u0(*coords) with a known sup-norm."""

    name: str
    func: Callable[..., np.ndarray]
    sup: float
    params: dict = field(default_factory=dict)

    def __call__(self, *coords):
        return self.func(*[np.asarray(c, dtype=float) for c in coords])


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def bump_weights(m: int) -> np.ndarray:
    """Discrete normalized bump exp(-1/(1-y^2)) at nodes y = k/m, |k| < m."""
    y = np.arange(-m + 1, m) / m
    w = np.exp(-1.0 / (1.0 - y * y))
    return w / w.sum()


def _inward_shift(x: np.ndarray, a: float, b: float, eps: float) -> np.ndarray:
    """x + 2 eps (sum over faces of window * outward normal)."""
    width = (SHIFT_OFF - SHIFT_FULL) * eps
    left = 1.0 - smooth_step((x - a - SHIFT_FULL * eps) / width)
    right = 1.0 - smooth_step((b - x - SHIFT_FULL * eps) / width)
    return x + SHIFT * eps * (right - left)


@dataclass(frozen=True)
class MollifiedDatum:
    """Mollified initial datum with its fine-grid norms."""

    domain: SpatialDomain
    eps: float
    nodes: tuple[np.ndarray, ...]  # fine evaluation grid inside the domain
    values: np.ndarray
    sup: float
    l1_error: float
    grad_l1: float
    grad_l2sq: float
    lap_l1: float
    source_sup: float
    _table_axes: tuple[np.ndarray, ...] = field(repr=False, default=())
    _table: np.ndarray | None = field(repr=False, default=None)

    def __call__(self, *coords) -> np.ndarray:
        coords = [np.asarray(c, dtype=float) for c in coords]
        shifted = [
            _inward_shift(c, a, b, self.eps)
            for c, a, b in zip(coords, self.domain.lower, self.domain.upper)
        ]
        if self.domain.dim == 1:
            out = np.interp(shifted[0], self._table_axes[0], self._table, left=0.0, right=0.0)
        else:
            interp = RegularGridInterpolator(
                self._table_axes, self._table, bounds_error=False, fill_value=0.0
            )
            pts = np.stack(np.broadcast_arrays(*shifted), axis=-1)
            out = interp(pts)
        # the continuous construction vanishes within eps of every face;
        # remove any interpolation leak across that line
        mask = np.ones(np.broadcast(*coords).shape, dtype=bool)
        for c, a, b in zip(coords, self.domain.lower, self.domain.upper):
            mask &= (c - a > self.eps) & (b - c > self.eps)
        return np.where(mask, out, 0.0)

    @property
    def l2sq(self) -> float:
        cell = np.prod([n[1] - n[0] for n in self.nodes])
        return float(np.sum(self.values**2) * cell)

    @property
    def four_term(self) -> float:
        return self.sup + self.grad_l1 + self.eps * self.lap_l1 + self.eps * self.grad_l2sq


def _fine_resolution(domain: SpatialDomain, eps: float) -> int:
    """Kernel half-width in fine nodes, chosen so that spacing = eps/m."""
    if domain.dim == 1:
        m = max(32, int(np.ceil(eps * 2000 / min(domain.widths))))
    else:
        m = max(12, int(np.ceil(eps * 400 / min(domain.widths))))
    return m


def mollify_dirichlet(
    u0: Callable[..., np.ndarray], domain: SpatialDomain, eps: float, *, m: int | None = None
) -> MollifiedDatum:
    """Build the compactly supported smooth approximation of ``u0``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    if eps > min(domain.widths) / 10 * (1 + 1e-12):
        raise ValueError(
            f"eps={eps:g} too large: the boundary collar would consume the domain "
            f"(need eps <= {min(domain.widths) / 10:g})"
        )
    m = m or _fine_resolution(domain, eps)
    s = eps / m
    weights = bump_weights(m)

    # table of the convolution on [a - 3eps, b + 3eps] per axis
    axes, inside = [], []
    for a, b in zip(domain.lower, domain.upper):
        k0 = int(np.floor(3 * eps / s)) + 1
        nk = int(np.ceil((b - a) / s))
        z = a + s * np.arange(-k0, nk + k0 + 1)
        axes.append(z)
        inside.append((z > a) & (z < b))
    grids = np.meshgrid(*axes, indexing="ij")
    raw = np.asarray(u0(*grids), dtype=float) * np.ones(grids[0].shape)
    mask = inside[0] if domain.dim == 1 else np.logical_and.outer(inside[0], inside[1])
    extended = np.where(mask, raw, 0.0)
    table = extended
    for axis in range(domain.dim):
        table = convolve1d(table, weights, axis=axis, mode="constant", cval=0.0)

    # fine evaluation grid: cell centres of spacing ~ s inside the domain
    nodes = tuple(
        a + (np.arange(n) + 0.5) * (b - a) / n
        for a, b in zip(domain.lower, domain.upper)
        for n in [int(np.ceil((b - a) / s))]
    )
    datum = MollifiedDatum(
        domain, eps, nodes, np.empty(0), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, tuple(axes), table
    )
    fine = np.meshgrid(*nodes, indexing="ij")
    values = datum(*fine)
    exact = np.asarray(u0(*fine), dtype=float) * np.ones(values.shape)
    norms = _discrete_norms(values, nodes, domain)
    cell = float(np.prod([n[1] - n[0] for n in nodes]))
    return MollifiedDatum(
        domain,
        eps,
        nodes,
        values,
        float(np.max(np.abs(values))),
        float(np.sum(np.abs(values - exact)) * cell),
        norms["grad_l1"],
        norms["grad_l2sq"],
        norms["lap_l1"],
        float(np.max(np.abs(exact))),
        tuple(axes),
        table,
    )


def _discrete_norms(values: np.ndarray, nodes, domain: SpatialDomain) -> dict[str, float]:
    """Gradient L1 and squared L2 norms and Laplacian L1 norm with zero padding."""
    spacing = [n[1] - n[0] for n in nodes]
    cell = float(np.prod(spacing))
    padded = np.pad(values, 1)
    grad_abs = np.zeros_like(values)
    grad_sq = 0.0
    lap = np.zeros_like(values)
    for axis, hs in enumerate(spacing):
        fwd = np.diff(padded, axis=axis) / hs  # face differences
        core = [slice(1, -1)] * values.ndim
        core[axis] = slice(None)
        fwd = fwd[tuple(core)]
        lo = [slice(None)] * values.ndim
        hi = [slice(None)] * values.ndim
        lo[axis] = slice(0, -1)
        hi[axis] = slice(1, None)
        grad_sq += float(np.sum(fwd**2)) * cell
        centred = 0.5 * (fwd[tuple(lo)] + fwd[tuple(hi)])
        grad_abs = grad_abs + centred**2
        lap = lap + (fwd[tuple(hi)] - fwd[tuple(lo)]) / hs
    if values.ndim == 1:
        # in one dimension the gradient L1 norm is the total variation
        grad_l1 = float(np.sum(np.abs(np.diff(np.pad(values, 1)))))
    else:
        grad_l1 = float(np.sum(np.sqrt(grad_abs)) * cell)
    return {
        "grad_l1": grad_l1,
        "grad_l2sq": grad_sq,
        "lap_l1": float(np.sum(np.abs(lap)) * cell),
    }


@dataclass(frozen=True)
class BoundsReport:
    eps: float
    sup: float
    grad_l1: float
    lap_term: float  # eps * ||Laplacian||_L1
    energy_term: float  # eps * ||grad||_L2^2
    total: float
    contraction: bool
    uniform: bool | None = None
    ratio: float | None = None
    sharp_constant: float = 0.0
    chart_constant: float = 0.0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def verify_initial_bounds(
    datum: MollifiedDatum,
    eps: float | None = None,
    sweep: Sequence[MollifiedDatum] = (),
    factor: float = 3.0,
) -> BoundsReport:
    """Four-term bound for one datum, plus non-explosion across ``sweep`` if given."""
    eps = datum.eps if eps is None else eps
    lap_term = eps * datum.lap_l1
    energy_term = eps * datum.grad_l2sq
    total = datum.sup + datum.grad_l1 + lap_term + energy_term
    uniform = ratio = None
    if sweep:
        uniform, ratio = sweep_uniformity(list(sweep), factor)
    d = datum.domain.dim
    peak = float(bump_weights(64).max() * 64)  # sup of the continuous normalized bump
    return BoundsReport(
        eps,
        datum.sup,
        datum.grad_l1,
        lap_term,
        energy_term,
        total,
        datum.sup <= datum.source_sup + 1e-12,
        uniform,
        ratio,
        sharp_constant=datum.source_sup,
        chart_constant=(2.0 * peak) ** d * datum.source_sup,
    )


def sweep_uniformity(data: Sequence[MollifiedDatum], factor: float = 3.0) -> tuple[bool, float]:
    """max/min of the four-term totals across a sweep and whether it is <= factor."""
    totals = np.array([verify_initial_bounds(d).total for d in data])
    if np.all(totals == 0):
        return True, 1.0
    if np.min(totals) <= 0:
        return False, float("inf")
    ratio = float(np.max(totals) / np.min(totals))
    return ratio <= factor, ratio


# ---------------------------------------------------------------------------
# catalog

INITIAL_NAMES = ("constant", "riemann", "sine", "bv-step", "csv")


def make_initial_condition(name: str, domain: SpatialDomain, **params) -> InitialCondition:
    """Named initial data. Riemann and step data depend on the first coordinate only."""
    lo, hi = domain.lower, domain.upper
    if name == "constant":
        value = float(params.get("value", 1.0))
        return InitialCondition(
            name, lambda *c: np.full(np.broadcast(*c).shape, value), abs(value), {"value": value}
        )
    if name == "riemann":
        uL = float(params.get("uL", 1.0))
        uR = float(params.get("uR", 0.0))
        x0 = float(params.get("x0", 0.5 * (lo[0] + hi[0])))

        def riemann(*c):
            return np.where(c[0] < x0, uL, uR) * np.ones(np.broadcast(*c).shape)

        return InitialCondition(
            name, riemann, max(abs(uL), abs(uR)), {"uL": uL, "uR": uR, "x0": x0}
        )
    if name == "sine":
        amp = float(params.get("amplitude", 1.0))
        k = int(params.get("k", 1))

        def sine(*c):
            out = amp * np.ones(np.broadcast(*c).shape)
            for x, a, b in zip(c, lo, hi):
                out = out * np.sin(k * np.pi * (x - a) / (b - a))
            return out

        return InitialCondition(name, sine, abs(amp), {"amplitude": amp, "k": k})
    if name == "bv-step":
        x0 = float(params.get("x0", 0.5 * (lo[0] + hi[0])))
        amp = float(params.get("amplitude", 1.0))

        def step(*c):
            return amp * np.sign(c[0] - x0) * np.ones(np.broadcast(*c).shape)

        return InitialCondition(name, step, abs(amp), {"x0": x0, "amplitude": amp})
    if name == "csv":
        return load_initial_csv(params["path"], domain)
    raise KeyError(f"unknown initial datum {name!r}; known: {', '.join(INITIAL_NAMES)}")


def load_initial_csv(path: str | Path, domain: SpatialDomain) -> InitialCondition:
    """Grid samples with columns x,u (d=1) or x,y,u (d=2), interpolated linearly."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    u = np.array([float(r["u"]) for r in rows])
    if domain.dim == 1:
        x = np.array([float(r["x"]) for r in rows])
        order = np.argsort(x)
        xs, us = x[order], u[order]

        def sampler(*c):
            return np.interp(c[0], xs, us)

    else:
        x = np.array([float(r["x"]) for r in rows])
        y = np.array([float(r["y"]) for r in rows])
        xs, ys = np.unique(x), np.unique(y)
        if len(xs) * len(ys) != len(u):
            raise ValueError(f"{path}: 2-D samples must form a full tensor grid")
        grid = np.empty((len(xs), len(ys)))
        grid[np.searchsorted(xs, x), np.searchsorted(ys, y)] = u
        interp = RegularGridInterpolator((xs, ys), grid, bounds_error=False, fill_value=None)

        def sampler(*c):
            pts = np.stack(np.broadcast_arrays(*c), axis=-1)
            return interp(pts)

    return InitialCondition("csv", sampler, float(np.max(np.abs(u))), {"path": str(path)})
