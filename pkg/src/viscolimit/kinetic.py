"""Kinetic formulation diagnostics.

Sign convention: chi_u(c) = 1 for u < c < 0, -1 for 0 < c < u and 0
otherwise, so that the c-integral of chi_u is -u.  The kinetic variable c
is discretized by cells of width dc on [-Mc, Mc]; chi and sg(u - c) enter
only through their exact cell averages.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .model import FluxModel, ProblemSpec
from .reports import InequalityReport
from .testfunctions import Bump, SupportError
from .viscous import SpaceTimeField, diffusion_term

__all__ = [
    "chi",
    "chi_integral_identity",
    "CGrid",
    "ChiField",
    "DefectDensity",
    "kinetic_weak_residual",
    "measure_bound_check",
    "defect_pairings",
    "nondegeneracy_measure",
    "C_MARGIN",
    "N_C",
]

C_MARGIN = 1.2
N_C = 256


def chi(u, c):
    u = np.asarray(u, dtype=float)
    c = np.asarray(c, dtype=float)
    pos = (u < c) & (c < 0)
    neg = (0 < c) & (c < u)
    return pos.astype(float) - neg.astype(float)


def chi_integral_identity(u: float, c_grid) -> float:
    """Trapezoid integral of chi_u over ``c_grid``; should equal -u to within 2 dc."""
    c = np.asarray(c_grid, dtype=float)
    if c[0] > min(0.0, u) or c[-1] < max(0.0, u):
        raise ValueError("c-grid does not cover the interval between 0 and u")
    return float(np.trapezoid(chi(u, c), c))


@dataclass(frozen=True)
class CGrid:
    """Uniform cells on [-half_width, half_width]."""

    half_width: float
    n: int = N_C

    @classmethod
    def for_bound(cls, A: float, n: int = N_C, margin: float = C_MARGIN) -> "CGrid":
        return cls(margin * (A if A > 0 else 1.0), n)

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n + 1)

    @property
    def centers(self) -> np.ndarray:
        e = self.edges
        return 0.5 * (e[:-1] + e[1:])

    @property
    def dc(self) -> float:
        return 2 * self.half_width / self.n

    def chi_average(self, u: np.ndarray) -> np.ndarray:
        """Cell averages of chi_u; appends a trailing c axis."""
        u = np.asarray(u, dtype=float)[..., None]
        e = self.edges
        lo, hi = np.minimum(u, 0.0), np.maximum(u, 0.0)
        overlap = np.clip(np.minimum(hi, e[1:]) - np.maximum(lo, e[:-1]), 0.0, None)
        return -np.sign(u) * overlap / self.dc

    def sg_average(self, u: np.ndarray) -> np.ndarray:
        """Cell averages of sg(u - c)."""
        u = np.asarray(u, dtype=float)[..., None]
        below = np.clip(u - self.edges[:-1], 0.0, self.dc)
        return (2.0 * below - self.dc) / self.dc


@dataclass(frozen=True)
class ChiField:
    field: SpaceTimeField
    grid: CGrid

    def level(self, n: int) -> np.ndarray:
        return self.grid.chi_average(self.field.u[n])

    def integral(self, n: int) -> np.ndarray:
        """int chi dc per cell at level n (equals -u up to clipping at the c-range)."""
        return self.level(n).sum(axis=-1) * self.grid.dc


@dataclass(frozen=True)
class DefectDensity:
    """m(x, t, c) = (eps/2) sg(u - c) sum_j d_j(B(u) d_j u) on the field grid.

    The diffusion term uses the solver's face stencil. Values are formed
    one time level at a time to keep memory bounded.
    """

    field: SpaceTimeField
    spec: ProblemSpec
    grid: CGrid

    @property
    def diffusion(self) -> np.ndarray:
        cached = self.__dict__.get("_diffusion")
        if cached is None:
            cached = np.array(
                [sum(diffusion_term(u, self.spec, self.field.h)) for u in self.field.u]
            )
            object.__setattr__(self, "_diffusion", cached)
        return cached

    def level(self, n: int) -> np.ndarray:
        D = self.diffusion[n][..., None]
        return 0.5 * self.field.eps * self.grid.sg_average(self.field.u[n]) * D

    def marginal(self) -> np.ndarray:
        """int |m| dc per cell and level."""
        out = np.empty(self.field.u.shape)
        for n in range(len(self.field.t)):
            out[n] = np.abs(self.level(n)).sum(axis=-1) * self.grid.dc
        return out

    def total(self) -> float:
        """int int int |m| over the c-range and Omega_T."""
        w = self.field.time_weights()
        per_level = self.marginal().reshape(len(w), -1).sum(axis=1) * self.field.cell_volume
        return float(w @ per_level)

    def write_marginal_csv(self, path: str | Path) -> Path:
        """Heat-map rows t, x[, y], int |m| dc."""
        path = Path(path)
        marg = self.marginal()
        mesh = self.field.mesh()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t"] + ["x", "y"][: self.field.dim] + ["m_abs"])
            for n, t in enumerate(self.field.t):
                coords = [m.ravel() for m in mesh]
                for row in zip(*coords, marg[n].ravel()):
                    w.writerow([f"{t:.10g}"] + [f"{v:.10g}" for v in row])
        return path


def _check_support(field: SpaceTimeField, psi: Bump, grid: CGrid) -> None:
    lower = tuple(field.domain.lower) + (-grid.half_width, 0.0)
    upper = tuple(field.domain.upper) + (grid.half_width, field.T)
    psi.check_inside(lower, upper)


def _space_sum(values: np.ndarray, factors: Sequence[np.ndarray]) -> np.ndarray:
    if len(factors) == 1:
        return values @ factors[0]
    return np.einsum("nij,i,j->n", values, factors[0], factors[1])


def _c_moments(u: np.ndarray, grid: CGrid, weights: np.ndarray, kind: str) -> np.ndarray:
    """sum_m avg_m(u) weights_m dc for every entry of u, level by level."""
    out = np.empty(u.shape)
    for n in range(u.shape[0]):
        avg = grid.chi_average(u[n]) if kind == "chi" else grid.sg_average(u[n])
        out[n] = (avg @ weights) * grid.dc
    return out


def kinetic_weak_residual(
    field: SpaceTimeField,
    spec: ProblemSpec,
    psi: Bump,
    grid: CGrid | None = None,
    flux: FluxModel | None = None,
) -> float:
    """int int int chi psi_t + sum_j f_j'(c) chi psi_xj - m psi_c.

    ``psi`` is a bump over (x..., c, t) supported in Omega x (-Mc, Mc) x (0, T).
    ``flux`` defaults to the problem's flux; pass another to test a field
    against a flux it was not computed with.
    """
    grid = grid or CGrid.for_bound(spec.A)
    flux = flux or spec.flux
    _check_support(field, psi, grid)
    d = field.dim
    c = grid.centers
    t = field.t
    w = field.time_weights()
    Cc = psi.factor(d, c)
    Cc1 = psi.factor(d, c, 1)
    Tm = psi.factor(d + 1, t)
    Tm1 = psi.factor(d + 1, t, 1)
    X = [psi.factor(a, x) for a, x in enumerate(field.centers)]

    total = np.sum(w * Tm1 * _space_sum(_c_moments(field.u, grid, Cc, "chi"), X))
    for j in range(d):
        Xj = [psi.factor(a, x, 1 if a == j else 0) for a, x in enumerate(field.centers)]
        moment = _c_moments(field.u, grid, flux.df(c, j) * Cc, "chi")
        total += np.sum(w * Tm * _space_sum(moment, Xj))
    D = DefectDensity(field, spec, grid).diffusion
    sgm = _c_moments(field.u, grid, Cc1, "sg")
    total -= 0.5 * field.eps * np.sum(w * Tm * _space_sum(D * sgm, X))
    return float(total * field.cell_volume)


def _centred_gradient(u: np.ndarray, axis: int, h: float) -> np.ndarray:
    pad = [(0, 0)] * u.ndim
    pad[axis] = (1, 1)
    p = np.pad(u, pad)
    n = u.shape[axis]
    hi = np.take(p, np.arange(2, n + 2), axis=axis)
    lo = np.take(p, np.arange(0, n), axis=axis)
    return (hi - lo) / (2 * h)


def defect_pairings(field: SpaceTimeField, spec: ProblemSpec, psi: Bump, grid: CGrid | None = None) -> dict:
    """<m, psi> three ways.

    ``density``: direct quadrature of m psi.
    ``by_parts``: -(eps/2) sum_j int sg(u-c) B(u) u_xj psi_xj.
    ``dissipation``: -eps sum_j int int B(u) u_xj^2 psi(x, u, t), the term that
    integration by parts produces from the jump of sg(u - c) at c = u.
    The density equals by_parts + dissipation up to discretization error.
    """
    grid = grid or CGrid.for_bound(spec.A)
    _check_support(field, psi, grid)
    d = field.dim
    c = grid.centers
    w = field.time_weights()
    Cc = psi.factor(d, c)
    Tm = psi.factor(d + 1, field.t)
    X = [psi.factor(a, x) for a, x in enumerate(field.centers)]
    eps = field.eps
    vol = field.cell_volume

    D = DefectDensity(field, spec, grid).diffusion
    S = _c_moments(field.u, grid, Cc, "sg")
    density = 0.5 * eps * np.sum(w * Tm * _space_sum(D * S, X)) * vol

    B = spec.viscosity(field.u)
    by_parts = 0.0
    dissipation = 0.0
    Cu = psi.factor(d, field.u)  # psi's c-factor evaluated at c = u
    for j, hj in enumerate(field.h):
        grad = np.stack([_centred_gradient(u, j, hj) for u in field.u])
        Xj = [psi.factor(a, x, 1 if a == j else 0) for a, x in enumerate(field.centers)]
        by_parts += -0.5 * eps * np.sum(w * Tm * _space_sum(B * grad * S, Xj)) * vol
        dissipation += -eps * np.sum(w * Tm * _space_sum(B * grad**2 * Cu, X)) * vol
    return {"density": float(density), "by_parts": float(by_parts), "dissipation": float(dissipation)}


def measure_bound_check(
    defect: DefectDensity,
    field: SpaceTimeField | None = None,
    spec: ProblemSpec | None = None,
    psi: Bump | None = None,
    energy: float | None = None,
) -> InequalityReport:
    """|<m, psi>| in integrated-by-parts form against the Hoelder-type measure bound.

    Bound: sqrt(eps) |B|_inf sqrt(2 Mc) (sum_j sqrt(eps) |d_j u|_{L2(Omega_T)})
    Vol(Omega x (-Mc, Mc) x (0, T)) |psi|_C1. ``energy`` overrides the
    gradient energy sum_j eps |d_j u|^2 (otherwise computed from the
    stored levels with face differences).
    """
    field = field or defect.field
    spec = spec or defect.spec
    if psi is None:
        raise ValueError("a test function is required")
    grid = defect.grid
    pair = defect_pairings(field, spec, psi, grid)
    pairing = pair["by_parts"]
    eps = field.eps
    Mc = grid.half_width
    w = field.time_weights()
    per_axis = []
    for j, hj in enumerate(field.h):
        pad = [(0, 0)] * (field.u.ndim - 1)
        pad[j] = (1, 1)
        sq = np.array([np.sum((np.diff(np.pad(u, pad), axis=j) / hj) ** 2) for u in field.u])
        per_axis.append(float(w @ sq) * field.cell_volume)
    if energy is not None and sum(per_axis) > 0:
        scale = energy / (eps * sum(per_axis))
        per_axis = [p * scale for p in per_axis]
    grad_sum = sum(np.sqrt(eps * p) for p in per_axis)
    volume = field.domain.volume * 2 * Mc * field.T
    B_inf = spec.B_max
    bound = np.sqrt(eps) * B_inf * np.sqrt(2 * Mc) * grad_sum * volume * psi.c1_norm
    holder = 0.5 * np.sqrt(eps) * B_inf * np.sqrt(2 * Mc) * grad_sum * np.sqrt(volume) * psi.c1_norm
    return InequalityReport(
        "measure_bound",
        abs(pairing),
        float(bound),
        abs(pairing) <= 1.05 * bound,
        1.05,
        0.0,
        {"pairing": pairing, "holder_bound": float(holder), "density_pairing": pair["density"]},
    )


def _directions(flux: FluxModel, support, n_dirs: int, n_adversarial: int = 201) -> np.ndarray:
    """Unit (tau, xi) samples: a uniform set plus directions that annihilate tau + f'(c0).xi."""
    d = flux.dim
    if d == 1:
        theta = np.linspace(0, np.pi, n_dirs, endpoint=False)
        dirs = [np.stack([np.cos(theta), np.sin(theta)], axis=1)]
        c0 = np.linspace(support[0], support[1], n_adversarial)
        adv = np.stack([-flux.df(c0, 0), np.ones_like(c0)], axis=1)
        dirs.append(adv)
    else:
        k = np.arange(n_dirs) + 0.5
        z = 1 - 2 * k / n_dirs
        phi = np.pi * (1 + 5**0.5) * k
        rad = np.sqrt(1 - z * z)
        dirs = [np.stack([z, rad * np.cos(phi), rad * np.sin(phi)], axis=1)]
        c0 = np.linspace(support[0], support[1], 41)
        alpha = np.linspace(0, np.pi, 36, endpoint=False)
        C0, AL = np.meshgrid(c0, alpha, indexing="ij")
        x1, x2 = np.cos(AL).ravel(), np.sin(AL).ravel()
        tau = -(x1 * flux.df(C0.ravel(), 0) + x2 * flux.df(C0.ravel(), 1))
        dirs.append(np.stack([tau, x1, x2], axis=1))
    out = np.concatenate(dirs)
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def nondegeneracy_measure(
    flux: FluxModel, psi_support=(-1.0, 1.0), n_dirs: int = 360, delta: float = 1e-3, n_c: int = 20001
) -> float:
    """max over unit (tau, xi) of |{c in support : |tau + f'(c).xi| < delta}|."""
    if n_dirs < 100:
        raise ValueError("need at least 100 directions")
    lo, hi = psi_support
    c = np.linspace(lo, hi, n_c)
    dc = (hi - lo) / (n_c - 1)
    dirs = _directions(flux, psi_support, n_dirs)
    slopes = np.stack([flux.df(c, j) for j in range(flux.dim)])  # (d, n_c)
    worst = 0.0
    for chunk in np.array_split(dirs, max(1, len(dirs) // 64)):
        vals = chunk[:, :1] + chunk[:, 1:] @ slopes
        counts = np.sum(np.abs(vals) < delta, axis=1)
        worst = max(worst, float(np.max(counts)))
    # a full hit covers the whole closed support
    return min(worst * dc, hi - lo)
