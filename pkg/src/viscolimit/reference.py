"""Inviscid reference: Godunov scheme with boundary Riemann problems, and exact Burgers oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .model import FluxModel, ProblemSpec
from .viscous import SpaceTimeField

__all__ = [
    "NonConvexFluxError",
    "CFLViolation",
    "GodunovFlux",
    "godunov_flux",
    "solve_inviscid",
    "RiemannSolution",
    "riemann_solution",
    "exact_burgers_riemann",
    "exact_burgers_ibvp",
    "WaveInteraction",
    "cell_averages",
]


class NonConvexFluxError(ValueError):
    pass


class CFLViolation(ValueError):
    pass


class WaveInteraction(ValueError):
    """Requested time lies beyond the first interaction of elementary waves."""


class GodunovFlux:
    """Exact Riemann flux for a flux component that is convex or concave on I.

    Uses min f over [uL, uR] when uL <= uR and max f over [uR, uL] otherwise;
    the extremum over an interval is located through the unique critical
    point of f on I.
    """

    def __init__(self, flux: FluxModel, interval: tuple[float, float], j: int = 0):
        kind = flux.convexity(interval, j)
        if kind == 0:
            raise NonConvexFluxError(
                f"flux {flux.name!r} component {j} is neither convex nor concave on {interval}"
            )
        self.kind = kind
        self.flux = flux
        self.j = j
        lo, hi = interval
        dlo, dhi = float(flux.df(lo, j)), float(flux.df(hi, j))
        if lo == hi or dlo * dhi > 0 or (dlo == 0 and dhi == 0):
            # monotone on I: the critical point sits beyond the interval
            if dlo == 0 and dhi == 0:
                self.critical = 0.5 * (lo + hi)
            else:
                increasing = (dlo + dhi) > 0
                self.critical = -math.inf if increasing == (kind > 0) else math.inf
        elif dlo == 0:
            self.critical = lo
        elif dhi == 0:
            self.critical = hi
        else:
            self.critical = brentq(lambda z: float(flux.df(z, j)), lo, hi, xtol=1e-15)

    def __call__(self, uL, uR):
        uL = np.asarray(uL, dtype=float)
        uR = np.asarray(uR, dtype=float)
        f = lambda z: self.flux.f(z, self.j)  # noqa: E731
        lo, hi = np.minimum(uL, uR), np.maximum(uL, uR)
        at_critical = f(np.clip(self.critical, lo, hi))
        ends_min = np.minimum(f(uL), f(uR))
        ends_max = np.maximum(f(uL), f(uR))
        if self.kind > 0:
            return np.where(uL <= uR, at_critical, ends_max)
        return np.where(uL <= uR, ends_min, at_critical)


def godunov_flux(uL, uR, flux: FluxModel, interval=(-1.0, 1.0), j: int = 0):
    span = (min(interval[0], np.min(uL), np.min(uR)), max(interval[1], np.max(uL), np.max(uR)))
    return GodunovFlux(flux, span, j)(uL, uR)


def cell_averages(u0, domain, n: Sequence[int], sub: int = 8) -> np.ndarray:
    """Cell averages of ``u0`` by midpoint sub-sampling."""
    axes = []
    for a, b, m in zip(domain.lower, domain.upper, n):
        h = (b - a) / m
        offsets = (np.arange(sub) + 0.5) / sub * h
        axes.append((a + np.arange(m)[:, None] * h + offsets[None, :]).ravel())
    grids = np.meshgrid(*axes, indexing="ij")
    vals = np.asarray(u0(*grids), dtype=float) * np.ones(grids[0].shape)
    shape = []
    for m in n:
        shape += [m, sub]
    vals = vals.reshape(shape)
    return vals.mean(axis=tuple(range(1, 2 * len(n), 2)))


def solve_inviscid(
    spec: ProblemSpec,
    N_x: int | Sequence[int],
    *,
    cfl: float = 0.45,
    save_times: Sequence[float] | None = None,
    max_snapshots: int = 200,
    dt: float | None = None,
) -> SpaceTimeField:
    """First-order Godunov run to ``spec.T``; ``spec.eps`` is ignored.

    Boundary fluxes come from Riemann problems between the interior trace
    and the exterior state 0.  Two-dimensional runs use Lie splitting and
    are flagged as lower accuracy in the field metadata.
    """
    domain = spec.domain
    n = (N_x,) * domain.dim if isinstance(N_x, (int, np.integer)) else tuple(N_x)
    h = tuple(w / m for w, m in zip(domain.widths, n))
    interval = spec.interval if spec.A > 0 else (-1.0, 1.0)
    fluxes = [GodunovFlux(spec.flux, interval, j) for j in range(domain.dim)]
    M = spec.M
    dt_max = cfl * min(h) / M if M > 0 else spec.T
    if dt is not None:
        if M * dt / min(h) > 1.0:
            raise CFLViolation(f"M dt / h = {M * dt / min(h):.3f} exceeds 1")
        dt_max = dt
    steps = max(1, int(math.ceil(spec.T / dt_max - 1e-12)))
    dt = spec.T / steps
    if M * dt / min(h) > 1.0:
        raise CFLViolation(f"M dt / h = {M * dt / min(h):.3f} exceeds 1")

    u = cell_averages(spec.u0, domain, n)
    wanted = set() if save_times is None else {int(round(s / dt)) for s in save_times}
    stride = max(1, int(math.ceil((steps - 128) / max_snapshots)))
    snaps_t, snaps_u = [0.0], [u.copy()]
    for k in range(1, steps + 1):
        for axis, (G, hj) in enumerate(zip(fluxes, h)):
            pad = [(0, 0)] * u.ndim
            pad[axis] = (1, 1)
            p = np.pad(u, pad)
            L = np.take(p, np.arange(0, p.shape[axis] - 1), axis=axis)
            R = np.take(p, np.arange(1, p.shape[axis]), axis=axis)
            u = u - dt / hj * np.diff(G(L, R), axis=axis)
        if k <= 128 or k % stride == 0 or k == steps or k in wanted:
            snaps_t.append(k * dt)
            snaps_u.append(u.copy())
    meta = {"flux": spec.flux.name, "steps": steps, "A": float(spec.A)}
    if domain.dim == 2:
        meta["accuracy"] = "lower (Lie dimensional splitting)"
    return SpaceTimeField(
        domain,
        np.array(snaps_t),
        np.array(snaps_u),
        dt,
        0.0,
        solver="reference",
        scheme="godunov-exact-riemann" + ("-lie-split" if domain.dim == 2 else ""),
        ghost="boundary-riemann-exterior-0",
        meta=meta,
    )


# ---------------------------------------------------------------------------
# exact Burgers oracles


@dataclass(frozen=True)
class RiemannSolution:
    uL: float
    uR: float
    wave: str  # "shock", "rarefaction" or "constant"
    speeds: tuple[float, ...]

    def sample(self, x, t: float, x0: float = 0.0):
        if t <= 0:
            raise ValueError("t must be positive")
        xi = (np.asarray(x, dtype=float) - x0) / t
        if self.wave == "constant":
            return np.full_like(xi, self.uL)
        if self.wave == "shock":
            return np.where(xi < self.speeds[0], self.uL, self.uR)
        return np.clip(xi, self.uL, self.uR)

    def rankine_hugoniot_defect(self) -> float:
        if self.wave != "shock":
            return 0.0
        s = self.speeds[0]
        return abs(s * (self.uL - self.uR) - (0.5 * self.uL**2 - 0.5 * self.uR**2))


def riemann_solution(uL: float, uR: float) -> RiemannSolution:
    """Entropy solution of the Burgers Riemann problem."""
    if uL == uR:
        return RiemannSolution(uL, uR, "constant", (uL,))
    if uL > uR:
        return RiemannSolution(uL, uR, "shock", (0.5 * (uL + uR),))
    return RiemannSolution(uL, uR, "rarefaction", (uL, uR))


def exact_burgers_riemann(uL: float, uR: float, x0: float, t: float, x):
    """Free-space Burgers Riemann solution at (x, t)."""
    return riemann_solution(uL, uR).sample(x, t, x0)


def exact_burgers_ibvp(uL: float, uR: float, x0: float, t: float, x, a: float = 0.0, b: float = 1.0):
    """Entropy solution on (a, b) with zero Dirichlet data in the boundary-Riemann sense.

    Valid until the first interaction between the interior wave and the
    waves emitted by either boundary; later times raise
    :class:`WaveInteraction`.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=float)
    inner = riemann_solution(uL, uR)
    inner_lo = x0 + min(inner.speeds) * t
    inner_hi = x0 + max(inner.speeds) * t
    # left face: state 0 outside, uL inside; only uL > 0 launches a fan into the domain
    left_head = a + max(uL, 0.0) * t
    # right face: uR < 0 launches a fan 0 <- uR travelling left
    right_tail = b + min(uR, 0.0) * t
    tol = 1e-12
    if left_head > inner_lo + tol or inner_hi > right_tail + tol:
        raise WaveInteraction(f"waves interact before t={t:g}")
    if inner_lo < a - tol or inner_hi > b + tol:
        raise WaveInteraction(f"interior wave reaches the boundary before t={t:g}")
    out = inner.sample(x, t, x0)
    out = np.where(x < left_head, np.clip((x - a) / t, 0.0, max(uL, 0.0)), out)
    out = np.where(x > right_tail, np.clip((x - b) / t, min(uR, 0.0), 0.0), out)
    return out
