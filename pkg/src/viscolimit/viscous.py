"""Explicit finite-volume solver for the viscous Dirichlet problem.

Local Lax-Friedrichs advection, centred diffusive face fluxes with the
arithmetic mean of B, Heun (SSP-RK2) time stepping and one ghost layer
holding zero on every face.  Under the step restriction of
:func:`stable_dt` each Euler stage is a convex combination of
neighbouring values, which gives the discrete maximum principle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .initial_data import MollifiedDatum
from .model import ProblemSpec, SpatialDomain
from .reports import InequalityReport

__all__ = [
    "SolverAbort",
    "SpaceTimeField",
    "EstimateTrace",
    "stable_dt",
    "solve_viscous",
    "check_max_principle",
    "check_energy_estimate",
    "time_derivative_l1",
    "face_differences",
    "diffusion_term",
]

SCHEME_ID = "fv-llf-centred-diffusion-heun"
DT_SAFETY = 0.4
INITIAL_DENSE_STEPS = 128


class SolverAbort(RuntimeError):
    """The discrete solution left the invariant interval."""


@dataclass(frozen=True)
class SpaceTimeField:
    """Cell-centred snapshots u[n, i(, j)] at times t[n]."""

    domain: SpatialDomain
    t: np.ndarray
    u: np.ndarray
    dt: float
    eps: float
    solver: str = "viscous"
    scheme: str = SCHEME_ID
    ghost: str = "dirichlet-0"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.u.shape[0] != self.t.shape[0]:
            raise ValueError("one snapshot per time level required")
        if not np.all(np.isfinite(self.u)):
            raise ValueError("field contains non-finite values")

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.u.shape[1:]

    @property
    def h(self) -> tuple[float, ...]:
        return tuple(w / n for w, n in zip(self.domain.widths, self.shape))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    @property
    def T(self) -> float:
        return float(self.t[-1])

    @property
    def centers(self) -> list[np.ndarray]:
        return self.domain.cell_centers(self.shape)

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*self.centers, indexing="ij")

    def time_weights(self) -> np.ndarray:
        """Trapezoid weights over the stored time levels."""
        if len(self.t) == 1:
            return np.zeros(1)
        dt = np.diff(self.t)
        w = np.zeros_like(self.t)
        w[:-1] += 0.5 * dt
        w[1:] += 0.5 * dt
        return w

    def at(self, time: float) -> np.ndarray:
        """Snapshot nearest to ``time``."""
        return self.u[int(np.argmin(np.abs(self.t - time)))]

    def manifest(self) -> dict:
        return {
            "solver": self.solver,
            "scheme": self.scheme,
            "ghost": self.ghost,
            "dim": self.dim,
            "lower": list(self.domain.lower),
            "upper": list(self.domain.upper),
            "cells": list(self.shape),
            "h": list(self.h),
            "dt": self.dt,
            "eps": self.eps,
            "snapshots": len(self.t),
            "T": self.T,
            **self.meta,
        }


@dataclass(frozen=True)
class EstimateTrace:
    """Running a-priori quantities accumulated step by step."""

    t: np.ndarray
    sup: np.ndarray  # sup norm at every time level
    energy: np.ndarray  # running sum_j eps ||d_j u||^2_{L2(0,t_n; L2)}
    time_variation: np.ndarray  # running ||u_t||_{L1(0,t_n; L1)}

    @property
    def energy_total(self) -> float:
        return float(self.energy[-1])

    @property
    def time_variation_total(self) -> float:
        return float(self.time_variation[-1])


def stable_dt(spec: ProblemSpec, h: float) -> float:
    """0.4 * min(h/(d M), h^2/(2 d eps B_max))."""
    if not h > 0:
        raise ValueError("h must be positive")
    d = spec.domain.dim
    adv = h / (d * spec.M) if spec.M > 0 else math.inf
    dif = h * h / (2 * d * spec.eps * spec.B_max)
    return DT_SAFETY * min(adv, dif)


def face_differences(u: np.ndarray, axis: int) -> np.ndarray:
    """u_R - u_L across every face along ``axis`` with zero ghost cells."""
    pad = [(0, 0)] * u.ndim
    pad[axis] = (1, 1)
    return np.diff(np.pad(u, pad), axis=axis)


def _shifted(p: np.ndarray, axis: int, start: int, stop: int | None) -> np.ndarray:
    """Slice a padded array along ``axis`` and drop ghosts on the other axes."""
    idx = [slice(1, -1)] * p.ndim
    idx[axis] = slice(start, stop)
    return p[tuple(idx)]


def diffusion_term(u: np.ndarray, spec: ProblemSpec, h: Sequence[float]) -> list[np.ndarray]:
    """Per-axis discrete d_j(B(u) d_j u) with the solver's face stencil."""
    p = np.pad(u, 1)
    Bp = spec.viscosity(p)
    out = []
    for axis, hj in enumerate(h):
        L, R = _shifted(p, axis, 0, -1), _shifted(p, axis, 1, None)
        BL, BR = _shifted(Bp, axis, 0, -1), _shifted(Bp, axis, 1, None)
        G = 0.5 * (BL + BR) * (R - L) / hj
        out.append(np.diff(G, axis=axis) / hj)
    return out


def _rhs(u: np.ndarray, spec: ProblemSpec, h: Sequence[float]) -> np.ndarray:
    p = np.pad(u, 1)
    Bp = spec.viscosity(p)
    du = np.zeros_like(u)
    for axis, hj in enumerate(h):
        fp = spec.flux.f(p, axis)
        sp = np.abs(spec.flux.df(p, axis))
        L, R = _shifted(p, axis, 0, -1), _shifted(p, axis, 1, None)
        fL, fR = _shifted(fp, axis, 0, -1), _shifted(fp, axis, 1, None)
        lam = np.maximum(_shifted(sp, axis, 0, -1), _shifted(sp, axis, 1, None))
        BL, BR = _shifted(Bp, axis, 0, -1), _shifted(Bp, axis, 1, None)
        F = 0.5 * (fL + fR) - 0.5 * lam * (R - L) - spec.eps * 0.5 * (BL + BR) * (R - L) / hj
        du -= np.diff(F, axis=axis) / hj
    return du


def _gradient_energy(u: np.ndarray, eps: float, h: Sequence[float]) -> float:
    vol = float(np.prod(h))
    return eps * sum(float(np.sum((face_differences(u, a) / hj) ** 2)) * vol for a, hj in enumerate(h))


def solve_viscous(
    spec: ProblemSpec,
    datum: MollifiedDatum,
    N_x: int | Sequence[int],
    *,
    save_times: Sequence[float] | None = None,
    max_snapshots: int = 200,
    dt: float | None = None,
) -> tuple[SpaceTimeField, EstimateTrace]:
    """Advance from the mollified datum to ``spec.T``.

    Every time level of the first 128 steps is stored, then every
    ``stride``-th level so that at most about ``max_snapshots`` further
    levels are kept; ``save_times`` are always included.
    """
    if abs(datum.eps - spec.eps) > 1e-14 * max(1.0, spec.eps):
        raise ValueError("datum was built with a different eps")
    n = (N_x,) * spec.domain.dim if isinstance(N_x, (int, np.integer)) else tuple(N_x)
    if min(n) < 16:
        raise ValueError("need at least 16 cells per axis")
    domain = spec.domain
    h = tuple(w / m for w, m in zip(domain.widths, n))
    dt_max = stable_dt(spec, min(h)) if dt is None else dt
    steps = max(1, int(math.ceil(spec.T / dt_max - 1e-12)))
    dt = spec.T / steps
    A = float(spec.A)

    u = np.asarray(datum(*np.meshgrid(*domain.cell_centers(n), indexing="ij")), dtype=float)
    stride = max(1, int(math.ceil((steps - INITIAL_DENSE_STEPS) / max_snapshots)))
    wanted = set()
    if save_times is not None:
        wanted = {int(round(s / dt)) for s in save_times}

    snaps_t, snaps_u = [0.0], [u.copy()]
    vol = float(np.prod(h))
    sup = np.empty(steps + 1)
    energy = np.empty(steps + 1)
    variation = np.empty(steps + 1)
    sup[0] = np.max(np.abs(u))
    energy[0] = variation[0] = 0.0
    e_prev = _gradient_energy(u, spec.eps, h)

    for k in range(1, steps + 1):
        stage = u + dt * _rhs(u, spec, h)
        new = 0.5 * (u + stage + dt * _rhs(stage, spec, h))
        peak = float(np.max(np.abs(new)))
        if not np.isfinite(peak) or peak > A + 1e-6:
            raise SolverAbort(
                f"|u| reached {peak:.6g} > A + 1e-6 = {A + 1e-6:.6g} at t={k * dt:.6g} "
                f"(eps={spec.eps:g}, h={min(h):g}, dt={dt:.3e})"
            )
        e_new = _gradient_energy(new, spec.eps, h)
        sup[k] = peak
        energy[k] = energy[k - 1] + 0.5 * dt * (e_prev + e_new)
        variation[k] = variation[k - 1] + float(np.sum(np.abs(new - u))) * vol
        e_prev = e_new
        u = new
        if k <= INITIAL_DENSE_STEPS or k % stride == 0 or k == steps or k in wanted:
            snaps_t.append(k * dt)
            snaps_u.append(u.copy())

    field_ = SpaceTimeField(
        domain,
        np.array(snaps_t),
        np.array(snaps_u),
        dt,
        spec.eps,
        meta={
            "flux": spec.flux.name,
            "viscosity": spec.viscosity.name,
            "face_B": "arithmetic-mean",
            "steps": steps,
            "A": A,
        },
    )
    trace = EstimateTrace(dt * np.arange(steps + 1), sup, energy, variation)
    return field_, trace


def check_max_principle(field: SpaceTimeField, A: float) -> bool:
    return bool(np.max(np.abs(field.u)) <= A + 1e-12)


def check_energy_estimate(
    trace: EstimateTrace, datum: MollifiedDatum, r: float, A: float | None = None
) -> InequalityReport:
    """Gradient energy against ||u0eps||^2/(2r) and the cruder A^2 |Omega|/(2r)."""
    bound1 = datum.l2sq / (2 * r)
    A = datum.source_sup if A is None else A
    bound2 = A * A * datum.domain.volume / (2 * r)
    lhs = trace.energy_total
    passed = lhs <= 1.05 * bound1 and bound1 <= 1.05 * bound2
    return InequalityReport(
        "energy", lhs, bound1, bool(passed), 1.05, 0.0, {"bound_volume": bound2}
    )


def time_derivative_l1(field: SpaceTimeField) -> float:
    """sum_n ||u^{n+1} - u^n||_{L1} over stored levels, i.e. int int |u_t|."""
    if len(field.t) < 2:
        return 0.0
    jumps = np.abs(np.diff(field.u, axis=0)).reshape(len(field.t) - 1, -1).sum(axis=1)
    return float(np.sum(jumps) * field.cell_volume)
