"""Entropy-solution certificate for space-time fields on bounded domains.

Three clauses are checked: interior Kruzhkov inequalities against bump test
functions, nonnegativity of the near-boundary entropy flux in the limit of
vanishing offset, and L1 attainment of the initial datum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .entropy import BoundaryEntropyPair, KruzhkovPair
from .model import FluxModel
from .reference import cell_averages
from .reports import InequalityReport
from .testfunctions import Bump, SupportError, TestFunctionFamily
from .viscous import SpaceTimeField

__all__ = [
    "interior_entropy_residual",
    "residual_tolerance",
    "total_variation",
    "BoundaryWeight",
    "LimitEstimate",
    "window_average_limit",
    "boundary_flux_limit",
    "DecaySequence",
    "initial_trace_check",
    "boundary_inequality_check",
    "OttoVerdict",
    "verify_entropy_solution",
    "k_grid",
    "TOL_CONSTANT",
]

TOL_CONSTANT = 10.0
ROUNDING_FLOOR = 1e-12  # absolute slack for residuals of constant states


def _space_factors(bump: Bump, field: SpaceTimeField, order_axis: int | None):
    """Per-axis factors of a bump on the cells.

    Plain factors are sampled at the centres.  The derivative factor on
    ``order_axis`` is the exact cell mean of the derivative, i.e. the
    difference of the factor across the two faces over h, so sums against
    constant data telescope to zero.
    """
    out = []
    for a, x in enumerate(field.centers):
        if a == order_axis:
            h = field.h[a]
            edges = np.append(x - 0.5 * h, x[-1] + 0.5 * h)
            out.append(np.diff(bump.factor(a, edges)) / h)
        else:
            out.append(bump.factor(a, x))
    return out


def _time_derivative_weights(bump: Bump, axis: int, t: np.ndarray) -> np.ndarray:
    """int of the time derivative over the dual cell of each stored level."""
    edges = np.concatenate([t[:1], 0.5 * (t[1:] + t[:-1]), t[-1:]])
    return np.diff(bump.factor(axis, edges))


def _pair_space(values: np.ndarray, factors: Sequence[np.ndarray]) -> np.ndarray:
    """sum over cells of values[n, ...] * prod_j factors[j], one number per time level."""
    if len(factors) == 1:
        return values @ factors[0]
    return np.einsum("nij,i,j->n", values, factors[0], factors[1])


def interior_entropy_residual(
    field: SpaceTimeField, k: float, phi: Bump, flux: FluxModel
) -> float:
    """int int |u-k| phi_t + sum_j q_j(u;k) phi_xj over the field's grid.

    Data are piecewise constant on cells and on dual time cells; test
    function derivatives are integrated exactly over those cells, the
    remaining factors use the midpoint and trapezoid rules.
    """
    d = field.dim
    lower = tuple(field.domain.lower) + (0.0,)
    upper = tuple(field.domain.upper) + (field.T,)
    phi.check_inside(lower, upper)
    pair = KruzhkovPair(k, flux)
    w = field.time_weights()
    t = field.t
    eta = pair.eta(field.u)
    total = np.sum(
        _time_derivative_weights(phi, d, t) * _pair_space(eta, _space_factors(phi, field, None))
    )
    for j in range(d):
        q = pair.q(field.u, j)
        total += np.sum(w * phi.factor(d, t) * _pair_space(q, _space_factors(phi, field, j)))
    return float(total * field.cell_volume)


def total_variation(field: SpaceTimeField) -> float:
    """Largest discrete total variation over stored levels, zero ghosts included.

    For d=2 this is the sum over axes of the line variations integrated
    across the other axis.
    """
    out = 0.0
    for snap in field.u:
        tv = 0.0
        for axis, h in enumerate(field.h):
            pad = [(0, 0)] * snap.ndim
            pad[axis] = (1, 1)
            jumps = np.abs(np.diff(np.pad(snap, pad), axis=axis))
            other = field.cell_volume / h
            tv += float(np.sum(jumps)) * other
        out = max(out, tv)
    return out


def residual_tolerance(field: SpaceTimeField, phi: Bump, tv: float, C: float = TOL_CONSTANT) -> float:
    """C (h + eps) ||phi||_C1 TV plus a rounding floor; eps is 0 for inviscid fields."""
    return (C * (max(field.h) + field.eps) * tv + ROUNDING_FLOOR) * phi.c1_norm


def k_grid(A: float, n: int = 9) -> np.ndarray:
    """n uniformly spaced values in [-A, A] together with 0."""
    A = A if A > 0 else 1.0
    return np.unique(np.concatenate([np.linspace(-A, A, n), [0.0]]))


# ---------------------------------------------------------------------------
# boundary clause


@dataclass(frozen=True)
class BoundaryWeight:
    """Nonnegative boundary weight beta(r, t) = face weight * time profile * tangential profile.

    The default tangential profile keeps only face interiors, dropping
    cells within ``corner_clearance`` of a corner.
    """

    face_weights: tuple[float, ...] | None = None  # one per face, lower/upper per axis
    time_profile: Callable[[np.ndarray], np.ndarray] | None = None
    corner_clearance: float = 0.1

    def face_weight(self, index: int) -> float:
        return 1.0 if self.face_weights is None else float(self.face_weights[index])

    def in_time(self, t: np.ndarray) -> np.ndarray:
        return np.ones_like(t) if self.time_profile is None else self.time_profile(t)


@dataclass(frozen=True)
class LimitEstimate:
    offsets: np.ndarray
    g: np.ndarray
    windows: np.ndarray
    averages: np.ndarray
    estimate: float
    mass: float  # integral of beta over the boundary and (0, T)

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "mass": self.mass,
            "offsets": self.offsets.tolist(),
            "g": self.g.tolist(),
            "windows": self.windows.tolist(),
            "window_averages": self.averages.tolist(),
        }


def window_average_limit(offsets: np.ndarray, g: np.ndarray, min_window: float):
    """Averages n int_0^{1/n} g over shrinking windows delta_n = offsets[-1]/n.

    ``g`` is the piecewise-linear interpolant of the samples with constant
    extension down to 0. Windows narrower than ``min_window`` are skipped.
    Returns (windows, averages).
    """
    offsets = np.asarray(offsets, dtype=float)
    g = np.asarray(g, dtype=float)
    nodes = np.concatenate([[0.0], offsets])
    vals = np.concatenate([[g[0]], g])
    top = offsets[-1]
    windows, avgs = [], []
    n = 1
    while top / n >= min_window - 1e-15:
        delta = top / n
        inner = nodes[nodes < delta]
        pts = np.concatenate([inner, [delta]])
        gv = np.interp(pts, nodes, vals)
        avgs.append(float(np.trapezoid(gv, pts) / delta))
        windows.append(delta)
        n += 1
    return np.array(windows), np.array(avgs)


def _boundary_trace_at(field: SpaceTimeField, axis: int, side: int, depth: float) -> np.ndarray:
    """u at distance ``depth`` inside a face, linear between cell centres.

    Returns shape (n_t, n_tangential).
    """
    h = field.h[axis]
    u = np.moveaxis(field.u, axis + 1, 1)
    if side > 0:
        u = u[:, ::-1]
    s = depth / h - 0.5  # fractional cell index from the face
    i0 = int(np.floor(s))
    frac = s - i0
    if i0 < 0:
        # shallower than the first centre: constant extension
        out = u[:, 0]
    elif i0 + 1 >= u.shape[1]:
        raise ValueError("offset exceeds domain depth")
    else:
        out = (1 - frac) * u[:, i0] + frac * u[:, i0 + 1]
    return out.reshape(out.shape[0], -1)


def boundary_flux_limit(
    field: SpaceTimeField,
    pair: BoundaryEntropyPair,
    beta: BoundaryWeight | None = None,
    offsets: Sequence[float] | None = None,
    K: int = 8,
) -> LimitEstimate:
    """Estimate ess lim_{s->0} int_0^T int_dOmega Q(u(r - s nu), w) . nu beta dr dt.

    ``offsets`` default to 1..K grid spacings; the limit is the average of
    g over the narrowest window at least two cells wide.
    """
    beta = beta or BoundaryWeight()
    h = min(field.h)
    offsets = np.arange(1, K + 1) * h if offsets is None else np.asarray(offsets, dtype=float)
    if len(offsets) < 4:
        raise ValueError("need at least four offsets")
    depth = min(field.domain.widths) / 2
    if offsets[-1] > depth:
        raise ValueError(f"offsets reach {offsets[-1]:.4g}, beyond the domain half-width {depth:.4g}")

    w_t = field.time_weights() * beta.in_time(field.t)
    g = np.zeros(len(offsets))
    mass = 0.0
    for index, face in enumerate(field.domain.faces):
        fw = beta.face_weight(index)
        if fw == 0:
            continue
        if field.dim == 1:
            tangential = np.ones(1)
        else:
            other = 1 - face.axis
            x = field.centers[other]
            a, b = field.domain.lower[other], field.domain.upper[other]
            clear = beta.corner_clearance * (b - a)
            tangential = ((x - a > clear) & (b - x > clear)).astype(float) * field.h[other]
        mass += fw * float(np.sum(w_t)) * float(np.sum(tangential))
        for m, s in enumerate(offsets):
            trace = _boundary_trace_at(field, face.axis, face.side, s)
            Qn = pair.Q(trace, face.axis) * face.side  # Q . nu
            g[m] += fw * float(w_t @ (Qn @ tangential))
    windows, avgs = window_average_limit(offsets, g, 2 * h)
    return LimitEstimate(offsets, g, windows, avgs, float(avgs[-1]), mass)


# ---------------------------------------------------------------------------
# initial trace


@dataclass(frozen=True)
class DecaySequence:
    times: np.ndarray
    distances: np.ndarray
    tol: float
    decreasing: bool
    passed: bool

    def to_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "distances": self.distances.tolist(),
            "tol": self.tol,
            "decreasing": self.decreasing,
            "pass": self.passed,
        }


def initial_trace_check(
    field: SpaceTimeField,
    u0: Callable[..., np.ndarray],
    times: Sequence[float],
    C: float = TOL_CONSTANT,
    floor: float = 1e-14,
) -> DecaySequence:
    """L1 distance of u(t_j) to the cell averages of u0 for decreasing t_j.

    Distances must strictly decrease along the sequence (values already
    below ``floor`` count as converged) and the last must be at most
    C (h + eps).
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) >= 0):
        raise ValueError("times must decrease")
    target = cell_averages(u0, field.domain, field.shape)
    dists = []
    for t in times:
        idx = int(np.argmin(np.abs(field.t - t)))
        if abs(field.t[idx] - t) > 1e-9 * max(1.0, field.T):
            raise ValueError(f"time {t:g} is not a stored level")
        dists.append(float(np.sum(np.abs(field.u[idx] - target)) * field.cell_volume))
    dists = np.array(dists)
    steps_ok = (np.diff(dists) < 0) | (dists[:-1] <= floor)
    decreasing = bool(np.all(steps_ok))
    tol = C * (max(field.h) + field.eps)
    return DecaySequence(times, dists, tol, decreasing, bool(decreasing and dists[-1] <= tol))


# ---------------------------------------------------------------------------
# boundary inequality


def boundary_inequality_check(
    field: SpaceTimeField,
    pair: BoundaryEntropyPair,
    phi: Bump,
    M: float,
    tol: float | None = None,
    C: float = TOL_CONSTANT,
) -> InequalityReport:
    """-int int (H phi_t + Q . grad phi) <= M d int_0^T int_dOmega H(u, k) phi.

    ``phi`` must vanish near t=0 and t=T but may be nonzero on the
    boundary. Boundary traces are linear extrapolations from the two
    nearest cell centres.
    """
    d = field.dim
    t = field.t
    s0, s1 = phi.support(d)
    if s0 < -1e-14 or s1 > field.T + 1e-14:
        raise SupportError("test function must be compactly supported in (0, T)")
    w = field.time_weights()
    H = pair.H(field.u)
    lhs = np.sum(_time_derivative_weights(phi, d, t) * _pair_space(H, _space_factors(phi, field, None)))
    for j in range(d):
        Q = pair.Q(field.u, j)
        lhs += np.sum(w * phi.factor(d, t) * _pair_space(Q, _space_factors(phi, field, j)))
    lhs = -float(lhs * field.cell_volume)

    rhs = 0.0
    for face in field.domain.faces:
        u = np.moveaxis(field.u, face.axis + 1, 1)
        if face.side > 0:
            u = u[:, ::-1]
        trace = 1.5 * u[:, 0] - 0.5 * u[:, 1]
        Hb = pair.H(trace).reshape(len(t), -1)
        wall = [np.full(1, face.position) if a == face.axis else x for a, x in enumerate(field.centers)]
        spatial = 1.0
        for a, x in enumerate(wall):
            spatial = np.multiply.outer(spatial, phi.factor(a, x)) if a else phi.factor(a, x)
        spatial = np.asarray(spatial).reshape(-1)
        dr = field.cell_volume / field.h[face.axis] if d > 1 else 1.0
        rhs += float(np.sum(w * phi.factor(d, t) * (Hb @ spatial)) * dr)
    rhs *= M * d
    if tol is None:
        tol = C * (max(field.h) + field.eps) * phi.c1_norm
    return InequalityReport("boundary_inequality", lhs, rhs, lhs <= rhs + tol, 1.0, tol)


# ---------------------------------------------------------------------------
# verdict


@dataclass
class OttoVerdict:
    interior_min: float
    interior_min_scaled: float  # min over (k, phi) of residual / tolerance
    interior_pass: bool
    boundary: dict = field(default_factory=dict)  # l -> estimate
    boundary_tol: float = 0.0
    boundary_pass: bool = True
    trace: DecaySequence | None = None
    seed: int = 0
    C: float = TOL_CONSTANT

    @property
    def passed(self) -> bool:
        trace_ok = True if self.trace is None else self.trace.passed
        return bool(self.interior_pass and self.boundary_pass and trace_ok)

    def to_dict(self) -> dict:
        return {
            "interior": {
                "value": self.interior_min,
                "scaled": self.interior_min_scaled,
                "pass": self.interior_pass,
            },
            "boundary": {
                "estimates": {str(k): v for k, v in self.boundary.items()},
                "tol": self.boundary_tol,
                "pass": self.boundary_pass,
            },
            "initial_trace": None if self.trace is None else self.trace.to_dict(),
            "seed": self.seed,
            "C": self.C,
            "pass": self.passed,
        }


def verify_entropy_solution(
    field: SpaceTimeField,
    flux: FluxModel,
    A: float,
    u0: Callable[..., np.ndarray] | None = None,
    *,
    n_bumps: int = 50,
    seed: int = 0,
    levels: Sequence[float] = (1, 10, 100),
    C: float = TOL_CONSTANT,
    trace_times: Sequence[float] | None = None,
) -> OttoVerdict:
    """Run all three clauses with seeded bumps and the standard k-grid."""
    family = TestFunctionFamily(
        tuple(field.domain.lower) + (0.0,),
        tuple(field.domain.upper) + (field.T,),
        n_bumps,
        seed,
    )
    tv = total_variation(field)
    worst, worst_scaled = np.inf, np.inf
    for phi in family:
        tol = residual_tolerance(field, phi, tv, C)
        for k in k_grid(A):
            r = interior_entropy_residual(field, k, phi, flux)
            worst = min(worst, r)
            worst_scaled = min(worst_scaled, r / tol)
    interior_ok = worst_scaled >= -1.0

    estimates = {}
    interval = (-A, A) if A > 0 else (-1.0, 1.0)
    quad_tol = 1e-6
    for l in levels:
        pair = BoundaryEntropyPair(0.0, 0.0, l, flux, interval)
        estimates[l] = boundary_flux_limit(field, pair).estimate
    mass = boundary_flux_limit(field, BoundaryEntropyPair(0.0, 0.0, 1.0, flux, interval)).mass
    btol = C * (max(field.h) + field.eps) * mass + quad_tol
    boundary_ok = all(v >= -btol for v in estimates.values())

    trace = None
    if u0 is not None:
        if trace_times is None:
            n = min(128, len(field.t) - 1)
            base = max(1, n // 8)
            trace_times = [field.t[8 * base], field.t[4 * base], field.t[2 * base], field.t[base]]
        trace = initial_trace_check(field, u0, trace_times, C)
    return OttoVerdict(
        float(worst),
        float(worst_scaled),
        bool(interior_ok),
        estimates,
        float(btol),
        bool(boundary_ok),
        trace,
        seed,
        C,
    )
