"""Entropy objects: Kruzhkov pairs, smoothed pairs, boundary pairs and the limit boundary flux."""

from __future__ import annotations

import math

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .model import FluxModel
from .quadrature import IntegralTable, adaptive_simpson

__all__ = [
    "sg",
    "KruzhkovPair",
    "kruzhkov_flux",
    "SmoothEntropyPair",
    "interval_dist",
    "BoundaryEntropyPair",
    "BoundaryPairValue",
    "eval_boundary_pair",
    "eval_limit_flux",
]

PAIR_QUAD_TOL = 1e-9


def sg(s):
    """Three-branch sign with sg(0) = 0."""
    return np.sign(s)


@dataclass(frozen=True)
class KruzhkovPair:
    k: float
    flux: FluxModel

    def eta(self, u):
        return np.abs(np.asarray(u, dtype=float) - self.k)

    def q(self, u, j: int = 0):
        u = np.asarray(u, dtype=float)
        return sg(u - self.k) * (self.flux.f(u, j) - self.flux.f(self.k, j))


def kruzhkov_flux(u, k: float, flux: FluxModel) -> np.ndarray:
    """Components sg(u-k)(f_j(u)-f_j(k)) stacked along the first axis."""
    pair = KruzhkovPair(k, flux)
    return np.stack([pair.q(u, j) for j in range(flux.dim)])


def interval_dist(z, a, b):
    """Distance from z to the closed interval spanned by a and b."""
    z = np.asarray(z, dtype=float)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    return np.maximum(lo - z, 0.0) + np.maximum(z - hi, 0.0)


def _table_range(flux_range, k, extra=()):
    lo = min(flux_range[0], k, *extra) - 0.5
    hi = max(flux_range[1], k, *extra) + 0.5
    return lo, hi


@dataclass(frozen=True)
class SmoothEntropyPair:
    """eta_l(z) = sqrt((z-k)^2 + 1/l^2) - 1/l with fluxes q_l,j = int_k^z eta_l' f_j'.

    Fluxes are tabulated on first use over ``interval`` widened by 0.5 on each side.
    """

    k: float
    l: float
    flux: FluxModel
    interval: tuple[float, float] = (-1.0, 1.0)
    _tables: tuple = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self):
        if not self.l > 0:
            raise ValueError("level l must be positive")

    def _table(self, j: int) -> IntegralTable:
        if not self._tables:
            lo, hi = _table_range(self.interval, self.k)
            tables = tuple(
                IntegralTable(
                    lambda r, j=j: float(self.deta(r) * self.flux.df(r, j)),
                    lo,
                    hi,
                    self.k,
                    breakpoints=((self.k, 1.0 / self.l),),
                )
                for j in range(self.flux.dim)
            )
            object.__setattr__(self, "_tables", tables)
        return self._tables[j]

    @property
    def s(self) -> float:
        return 1.0 / self.l

    def eta(self, z):
        d = np.asarray(z, dtype=float) - self.k
        return np.sqrt(d * d + self.s**2) - self.s

    def deta(self, z):
        d = np.asarray(z, dtype=float) - self.k
        return d / np.sqrt(d * d + self.s**2)

    def d2eta(self, z):
        d = np.asarray(z, dtype=float) - self.k
        return self.s**2 / (d * d + self.s**2) ** 1.5

    @property
    def d2eta_sup(self) -> float:
        return 1.0 / self.s  # attained at z = k

    def q(self, z, j: int = 0):
        return self._table(j)(z)


class BoundaryPairValue(NamedTuple):
    H: float
    Q: np.ndarray
    extrapolated: bool


@dataclass(frozen=True)
class BoundaryEntropyPair:
    """H_l(z) = sqrt(dist(z, [w,k])^2 + 1/l^2) - 1/l and Q_l,j = int_w^z dH_l f_j'.

    ``Q`` evaluates through a table built on first use (vectorized);
    :func:`eval_boundary_pair` integrates directly to the pair tolerance.
    """

    k: float
    w: float
    l: float
    flux: FluxModel
    interval: tuple[float, float] = (-1.0, 1.0)
    _tables: tuple = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self):
        if not self.l > 0:
            raise ValueError("level l must be positive")

    def _table(self, j: int) -> IntegralTable:
        if not self._tables:
            lo, hi = _table_range(self.interval, self.k, (self.w,))
            bps = ((self.lo, 1.0 / self.l), (self.hi, 1.0 / self.l))
            tables = tuple(
                IntegralTable(
                    lambda r, j=j: float(self.dH(r) * self.flux.df(r, j)),
                    lo,
                    hi,
                    self.w,
                    breakpoints=bps,
                )
                for j in range(self.flux.dim)
            )
            object.__setattr__(self, "_tables", tables)
        return self._tables[j]

    @property
    def s(self) -> float:
        return 1.0 / self.l

    @property
    def lo(self) -> float:
        return min(self.w, self.k)

    @property
    def hi(self) -> float:
        return max(self.w, self.k)

    def dist(self, z):
        return interval_dist(z, self.w, self.k)

    def H(self, z):
        d = self.dist(z)
        return np.sqrt(d * d + self.s**2) - self.s

    def dH(self, z):
        z = np.asarray(z, dtype=float)
        d = self.dist(z)
        slope = np.where(z > self.hi, 1.0, np.where(z < self.lo, -1.0, 0.0))
        return slope * d / np.sqrt(d * d + self.s**2)

    def Q(self, z, j: int = 0):
        return self._table(j)(z)

    def Q_direct(self, z: float, j: int = 0, tol: float = PAIR_QUAD_TOL) -> float:
        """int_w^z dH f_j' by adaptive Simpson, split where dH switches on."""
        integrand = lambda r: float(self.dH(r) * self.flux.df(r, j))  # noqa: E731
        z = float(z)
        if z > self.hi:
            start = self.hi
        elif z < self.lo:
            start = self.lo
        else:
            return 0.0
        # split at start + s * 10^m so the initial samples see the transition
        span = abs(z - start)
        marks = [m for m in self.s * 10.0 ** np.arange(0, 12) if m < span]
        edges = [start] + [start + math.copysign(m, z - start) for m in marks] + [z]
        piece_tol = tol / (len(edges) - 1)
        return sum(adaptive_simpson(integrand, a, b, piece_tol) for a, b in zip(edges[:-1], edges[1:]))


def eval_boundary_pair(pair: BoundaryEntropyPair, z: float) -> BoundaryPairValue:
    """(H_l(z), Q_l(z)) with Q from direct quadrature; flags z outside the pair's interval."""
    Q = np.array([pair.Q_direct(z, j) for j in range(pair.flux.dim)])
    outside = not (pair.interval[0] <= z <= pair.interval[1])
    return BoundaryPairValue(float(pair.H(z)), Q, outside)


def eval_limit_flux(z, w, k, flux: FluxModel) -> np.ndarray:
    """Pointwise limit of Q_l as l grows.

    With [lo, hi] the interval spanned by w and k the limit is
    f(lo) - f(z) below the interval, f(z) - f(hi) above it and 0 inside.
    """
    z = np.asarray(z, dtype=float)
    lo, hi = np.minimum(w, k), np.maximum(w, k)
    comps = []
    for j in range(flux.dim):
        below = flux.f(lo, j) - flux.f(z, j)
        above = flux.f(z, j) - flux.f(hi, j)
        comps.append(np.where(z < lo, below, np.where(z > hi, above, 0.0)))
    return np.stack(comps)
