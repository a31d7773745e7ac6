"""Continuous problem data: domain, flux, viscosity and the structural hypotheses."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Polynomial

__all__ = [
    "Face",
    "SpatialDomain",
    "FluxComponent",
    "FluxModel",
    "ViscosityModel",
    "ProblemSpec",
    "HypothesisError",
    "ClauseResult",
    "HypothesisReport",
    "lipschitz_bound",
    "check_hypothesis",
    "flux_catalog",
    "make_flux",
    "make_viscosity",
    "polynomial_flux",
    "FLUX_NAMES",
    "VISCOSITY_NAMES",
]

LIPSCHITZ_SAMPLES = 10_000
F3_ANGLES = 720
F3_STATES = 1_000


class HypothesisError(ValueError):
    """Hypothesis requested for a spatial dimension it does not apply to."""


# ---------------------------------------------------------------------------
# domain


@dataclass(frozen=True)
class Face:
    axis: int
    side: int  # -1 for the lower face, +1 for the upper face
    position: float
    normal: tuple[float, ...]


@dataclass(frozen=True)
class SpatialDomain:
    """Interval (d=1) or axis-aligned rectangle (d=2)."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi) or len(lo) not in (1, 2):
            raise ValueError("domain must be an interval or a rectangle")
        if any(b <= a for a, b in zip(lo, hi)):
            raise ValueError("domain extents must satisfy b > a in every coordinate")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def interval(cls, a: float = 0.0, b: float = 1.0) -> "SpatialDomain":
        return cls((a,), (b,))

    @classmethod
    def rectangle(cls, ax=0.0, bx=1.0, ay=0.0, by=1.0) -> "SpatialDomain":
        return cls((ax, ay), (bx, by))

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def widths(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.lower, self.upper))

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    @property
    def faces(self) -> tuple[Face, ...]:
        out = []
        for axis in range(self.dim):
            for side, pos in ((-1, self.lower[axis]), (1, self.upper[axis])):
                normal = [0.0] * self.dim
                normal[axis] = float(side)
                out.append(Face(axis, side, pos, tuple(normal)))
        return tuple(out)

    def cell_centers(self, n: Sequence[int]) -> list[np.ndarray]:
        """Cell-centre coordinates for a uniform grid with ``n[j]`` cells per axis."""
        return [
            a + (np.arange(m) + 0.5) * (b - a) / m
            for a, b, m in zip(self.lower, self.upper, n)
        ]

    def to_dict(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper)}


# ---------------------------------------------------------------------------
# flux


@dataclass(frozen=True)
class FluxComponent:
    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    d2f: Callable[[np.ndarray], np.ndarray]
    coefficients: tuple[float, ...] | None = None


def _poly_component(coeffs: Sequence[float]) -> FluxComponent:
    p = Polynomial(np.asarray(coeffs, dtype=float))
    dp, d2p = p.deriv(1), p.deriv(2)
    return FluxComponent(p, dp, d2p, tuple(float(c) for c in coeffs))


@dataclass(frozen=True)
class FluxModel:
    """Flux f = (f_1, ..., f_d) with first and second derivatives."""

    name: str
    components: tuple[FluxComponent, ...]

    @property
    def dim(self) -> int:
        return len(self.components)

    def f(self, u, j: int = 0):
        return self.components[j].f(np.asarray(u, dtype=float))

    def df(self, u, j: int = 0):
        return self.components[j].df(np.asarray(u, dtype=float))

    def d2f(self, u, j: int = 0):
        return self.components[j].d2f(np.asarray(u, dtype=float))

    def scaled(self, factor: float) -> "FluxModel":
        """Flux multiplied by ``factor``; used for wrong-speed controls."""
        comps = tuple(
            FluxComponent(
                (lambda u, c=c: factor * c.f(u)),
                (lambda u, c=c: factor * c.df(u)),
                (lambda u, c=c: factor * c.d2f(u)),
                None if c.coefficients is None else tuple(factor * a for a in c.coefficients),
            )
            for c in self.components
        )
        return FluxModel(f"{factor:g}*{self.name}", comps)

    def convexity(self, interval: tuple[float, float], j: int = 0, samples: int = 2001) -> int:
        """+1 if f_j'' >= 0 on the interval, -1 if <= 0, 0 otherwise."""
        z = np.linspace(interval[0], interval[1], samples)
        second = self.d2f(z, j)
        if np.all(second >= -1e-14):
            return 1
        if np.all(second <= 1e-14):
            return -1
        return 0

    def derivative_consistency(
        self, interval: tuple[float, float], n: int = 100, delta: float = 1e-4, seed: int = 0
    ) -> tuple[bool, float]:
        """Compare f' with a centred difference of f at random states.

        Returns the pass flag and the worst ratio of error to the allowed
        ``10 delta^2 sup|f'''|`` budget (third derivative from differencing f'').
        """
        rng = np.random.default_rng(seed)
        z = rng.uniform(interval[0], interval[1], n)
        worst = 0.0
        ok = True
        for j in range(self.dim):
            fd = (self.f(z + delta, j) - self.f(z - delta, j)) / (2 * delta)
            err = np.abs(self.df(z, j) - fd)
            third = np.abs(self.d2f(z + delta, j) - self.d2f(z - delta, j)) / (2 * delta)
            # rounding floor of the difference quotient itself
            floor = 1e-9 * (1.0 + np.abs(self.f(z, j))) / delta
            budget = 10 * delta**2 * np.maximum(third.max(), 1e-300) + floor
            ok &= bool(np.all(err <= budget))
            worst = max(worst, float(np.max(err / budget)))
        return ok, worst


def polynomial_flux(coefficients: Sequence[Sequence[float]], name: str = "custom") -> FluxModel:
    """Flux whose components are polynomials given by ascending coefficient lists."""
    if len(coefficients) not in (1, 2):
        raise ValueError("flux must have one or two components")
    return FluxModel(name, tuple(_poly_component(c) for c in coefficients))


FLUX_NAMES = ("burgers", "linear", "cubic", "power-mix-2d", "custom")


def make_flux(name: str, *, a: float = 1.0, coefficients=None) -> FluxModel:
    """Catalog lookup. ``a`` parameterizes ``linear``; ``custom`` takes coefficient lists."""
    if name == "burgers":
        return polynomial_flux([[0.0, 0.0, 0.5]], "burgers")
    if name == "linear":
        return polynomial_flux([[0.0, a]], f"linear({a:g})")
    if name == "cubic":
        return polynomial_flux([[0.0, 0.0, 0.0, 1.0 / 3.0]], "cubic")
    if name == "power-mix-2d":
        return polynomial_flux([[0.0, 0.0, 0.5], [0.0, 0.0, 0.0, 1.0 / 3.0]], "power-mix-2d")
    if name == "custom":
        if coefficients is None:
            raise ValueError("custom flux needs coefficient lists")
        return polynomial_flux(coefficients, "custom")
    raise KeyError(f"unknown flux {name!r}; known: {', '.join(FLUX_NAMES)}")


def flux_catalog() -> dict[str, str]:
    return {
        "burgers": "f(u) = u^2/2",
        "linear": "f(u) = a u (parameter a)",
        "cubic": "f(u) = u^3/3",
        "power-mix-2d": "f(u) = (u^2/2, u^3/3)",
        "custom": "polynomial components from ascending coefficient lists",
    }


def lipschitz_bound(flux: FluxModel, interval: tuple[float, float]) -> float:
    """max_j max |f_j'| over a uniform sample of the interval."""
    lo, hi = interval
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("interval must be bounded")
    z = np.linspace(lo, hi, LIPSCHITZ_SAMPLES)
    return float(max(np.max(np.abs(flux.df(z, j))) for j in range(flux.dim)))


# ---------------------------------------------------------------------------
# viscosity


@dataclass(frozen=True)
class ViscosityModel:
    name: str
    B: Callable[[np.ndarray], np.ndarray]
    dB: Callable[[np.ndarray], np.ndarray]
    r: float
    upper: float | None = None  # analytic sup if known

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("viscosity lower bound r must be positive")

    def __call__(self, u):
        return self.B(np.asarray(u, dtype=float))

    def B_max(self, interval: tuple[float, float]) -> float:
        if self.upper is not None:
            return float(self.upper)
        z = np.linspace(interval[0], interval[1], LIPSCHITZ_SAMPLES)
        return float(np.max(self.B(z)))

    def check_lower_bound(self, interval: tuple[float, float]) -> tuple[bool, float]:
        z = np.linspace(interval[0], interval[1], LIPSCHITZ_SAMPLES)
        smallest = float(np.min(self.B(z)))
        return smallest >= self.r, smallest


VISCOSITY_NAMES = ("constant", "two-plus-sin", "polynomial")


def make_viscosity(
    name: str, *, value: float = 1.0, coefficients=None, interval=(-1.0, 1.0)
) -> ViscosityModel:
    if name == "constant":
        return ViscosityModel(
            f"constant({value:g})",
            lambda u: np.full_like(np.asarray(u, dtype=float), value),
            lambda u: np.zeros_like(np.asarray(u, dtype=float)),
            float(value),
            float(value),
        )
    if name == "two-plus-sin":
        return ViscosityModel("2+sin(u)", lambda u: 2.0 + np.sin(u), np.cos, 1.0, 3.0)
    if name == "polynomial":
        if coefficients is None:
            raise ValueError("polynomial viscosity needs coefficients")
        p = Polynomial(np.asarray(coefficients, dtype=float))
        z = np.linspace(interval[0], interval[1], LIPSCHITZ_SAMPLES)
        r = float(np.min(p(z)))
        return ViscosityModel("polynomial", p, p.deriv(), r)
    raise KeyError(f"unknown viscosity {name!r}; known: {', '.join(VISCOSITY_NAMES)}")


# ---------------------------------------------------------------------------
# problem


@dataclass(frozen=True)
class ProblemSpec:
    """Viscous initial-boundary value problem with homogeneous Dirichlet data.

    ``u0`` takes one coordinate array per spatial axis. ``A`` is the sup of
    the datum; when omitted it is estimated on a fine sample.
    """

    domain: SpatialDomain
    T: float
    eps: float
    flux: FluxModel
    viscosity: ViscosityModel
    u0: Callable[..., np.ndarray]
    A: float | None = None
    label: str = ""

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("horizon T must be positive")
        if not self.eps > 0:
            raise ValueError("viscosity strength eps must be positive")
        if self.flux.dim != self.domain.dim:
            raise ValueError("flux components must match the spatial dimension")
        if self.A is None:
            n = 4097 if self.domain.dim == 1 else 513
            grids = np.meshgrid(
                *[np.linspace(a, b, n) for a, b in zip(self.domain.lower, self.domain.upper)],
                indexing="ij",
            )
            object.__setattr__(self, "A", float(np.max(np.abs(self.u0(*grids)))))
        if self.A < 0:
            raise ValueError("A must be nonnegative")

    @property
    def interval(self) -> tuple[float, float]:
        return (-float(self.A), float(self.A))

    @cached_property
    def M(self) -> float:
        return lipschitz_bound(self.flux, self.interval)

    @cached_property
    def B_max(self) -> float:
        return self.viscosity.B_max(self.interval)

    def with_eps(self, eps: float) -> "ProblemSpec":
        return ProblemSpec(
            self.domain, self.T, eps, self.flux, self.viscosity, self.u0, self.A, self.label
        )

    def with_flux(self, flux: FluxModel) -> "ProblemSpec":
        return ProblemSpec(
            self.domain, self.T, self.eps, flux, self.viscosity, self.u0, self.A, self.label
        )


# ---------------------------------------------------------------------------
# hypotheses


@dataclass(frozen=True)
class ClauseResult:
    passed: bool
    witness: float
    detail: str = ""


@dataclass(frozen=True)
class HypothesisReport:
    which: str
    clauses: dict[str, ClauseResult] = field(default_factory=dict)
    sampling: dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses.values())

    def to_dict(self) -> dict:
        return {
            "hypothesis": self.which,
            "passed": self.passed,
            "sampling": dict(self.sampling),
            "clauses": {
                k: {"passed": v.passed, "witness": v.witness, "detail": v.detail}
                for k, v in self.clauses.items()
            },
        }


def _clauses_D(spec: ProblemSpec) -> dict[str, ClauseResult]:
    from .kinetic import nondegeneracy_measure

    I = spec.interval
    M = spec.M
    ok_b, smallest = spec.viscosity.check_lower_bound(I)
    d = spec.domain.dim
    n = 2049 if d == 1 else 257
    grids = np.meshgrid(
        *[np.linspace(a, b, n) for a, b in zip(spec.domain.lower, spec.domain.upper)],
        indexing="ij",
    )
    sup_u0 = float(np.max(np.abs(spec.u0(*grids))))
    support = (-1.0, 1.0) if spec.A == 0 else I
    coarse = nondegeneracy_measure(spec.flux, support, n_dirs=360, delta=1e-2)
    fine = nondegeneracy_measure(spec.flux, support, n_dirs=360, delta=1e-3)
    return {
        "a": ClauseResult(math.isfinite(M), M, "sampled sup of |f'| on I"),
        "b": ClauseResult(ok_b, smallest, f"min sampled B on I versus r={spec.viscosity.r:g}"),
        "c": ClauseResult(sup_u0 <= spec.A + 1e-12, sup_u0, "sampled sup of |u0| versus A"),
        "d": ClauseResult(
            fine < 0.5 * coarse or fine == 0.0,
            fine,
            f"degenerate-set measure {coarse:.3e} at 1e-2, {fine:.3e} at 1e-3",
        ),
    }


def _clauses_E(spec: ProblemSpec, pieces: int = 100) -> dict[str, ClauseResult]:
    lo, hi = spec.interval if spec.A > 0 else (-1.0, 1.0)
    edges = np.linspace(lo, hi, pieces + 1)
    active = 0
    for a, b in zip(edges[:-1], edges[1:]):
        z = np.linspace(a, b, 101)
        slope = spec.flux.df(z)
        scale = 1.0 + float(np.max(np.abs(slope)))
        if np.ptp(slope) > 1e-10 * scale:
            active += 1
    fraction = active / pieces
    return {
        "4": ClauseResult(
            fraction == 1.0, fraction, "fraction of subintervals on which f' is non-constant"
        )
    }


def _clauses_F(spec: ProblemSpec) -> dict[str, ClauseResult]:
    lo, hi = spec.interval if spec.A > 0 else (-1.0, 1.0)
    c = np.linspace(lo, hi, F3_STATES)
    theta = np.linspace(0.0, np.pi, F3_ANGLES, endpoint=False)
    # antipodal directions give the same modulus, so half the circle suffices
    d1, d2 = spec.flux.df(c, 0), spec.flux.df(c, 1)
    combo = np.abs(np.cos(theta)[:, None] * d1[None, :] + np.sin(theta)[:, None] * d2[None, :])
    witness = float(np.min(np.max(combo, axis=1)))
    return {
        "3": ClauseResult(
            witness > 1e-8, witness, "min over directions of max over states of |xi . f'(c)|"
        )
    }


def check_hypothesis(spec: ProblemSpec, which: str) -> HypothesisReport:
    """Sampling certificate for hypothesis D, E (d=1) or F (d=2)."""
    which = which.upper()
    d = spec.domain.dim
    if which == "D":
        return HypothesisReport("D", _clauses_D(spec), {"states": LIPSCHITZ_SAMPLES})
    if which == "E":
        if d != 1:
            raise HypothesisError("hypothesis E applies to d=1 only")
        return HypothesisReport("E", _clauses_E(spec), {"subintervals": 100, "states": 101})
    if which == "F":
        if d != 2:
            raise HypothesisError("hypothesis F applies to d=2 only")
        return HypothesisReport("F", _clauses_F(spec), {"angles": F3_ANGLES, "states": F3_STATES})
    raise ValueError(f"unknown hypothesis {which!r}")
