"""Tensor-product bump test functions with analytic derivatives."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["bump1d", "Bump", "TestFunctionFamily", "SupportError", "RHO_SUP", "RHO1_SUP", "RHO2_SUP"]


class SupportError(ValueError):
    """Test function support leaves the admissible region."""


def bump1d(y, order: int = 0):
    """exp(-1/(1-y^2)) on |y| < 1 and its first two derivatives."""
    y = np.asarray(y, dtype=float)
    inside = np.abs(y) < 1
    ys = np.where(inside, y, 0.0)
    g = 1.0 - ys * ys
    rho = np.where(inside, np.exp(-1.0 / g), 0.0)
    if order == 0:
        return rho
    d1 = -2.0 * ys / g**2
    if order == 1:
        return rho * d1
    # (log rho)'' = -2(1 + 3y^2)/g^3
    d2 = -2.0 * (1.0 + 3.0 * ys * ys) / g**3
    return np.where(inside, rho * (d1 * d1 + d2), 0.0)


_y = np.linspace(-1, 1, 200001)
RHO_SUP = float(np.exp(-1.0))
RHO1_SUP = float(np.max(np.abs(bump1d(_y, 1))))
RHO2_SUP = float(np.max(np.abs(bump1d(_y, 2))))
del _y


@dataclass(frozen=True)
class Bump:
    """phi(z) = prod_i rho((z_i - centre_i)/radius_i) over coordinates z = (x..., [c,] t)."""

    centre: tuple[float, ...]
    radius: tuple[float, ...]

    @property
    def ndim(self) -> int:
        return len(self.centre)

    def factor(self, axis: int, z, order: int = 0):
        """1-D factor along ``axis`` (derivative ``order`` in the physical variable)."""
        c, r = self.centre[axis], self.radius[axis]
        return bump1d((np.asarray(z, dtype=float) - c) / r, order) / r**order

    def __call__(self, *coords):
        out = 1.0
        for axis, z in enumerate(coords):
            out = out * self.factor(axis, z)
        return out

    def derivative(self, axis: int, *coords):
        out = 1.0
        for a, z in enumerate(coords):
            out = out * self.factor(a, z, 1 if a == axis else 0)
        return out

    def support(self, axis: int) -> tuple[float, float]:
        return self.centre[axis] - self.radius[axis], self.centre[axis] + self.radius[axis]

    @property
    def sup(self) -> float:
        return RHO_SUP**self.ndim

    def derivative_sup(self, axis: int) -> float:
        return RHO_SUP ** (self.ndim - 1) * RHO1_SUP / self.radius[axis]

    @property
    def c1_norm(self) -> float:
        """sup|phi| + sum over coordinates of sup|d phi|."""
        return self.sup + sum(self.derivative_sup(a) for a in range(self.ndim))

    @property
    def c2_norm(self) -> float:
        second = 0.0
        n = self.ndim
        for a in range(n):
            for b in range(n):
                if a == b:
                    second += RHO_SUP ** (n - 1) * RHO2_SUP / self.radius[a] ** 2
                else:
                    second += RHO_SUP ** (n - 2) * RHO1_SUP**2 / (self.radius[a] * self.radius[b])
        return self.c1_norm + second

    def check_inside(self, lower: Sequence[float], upper: Sequence[float]) -> None:
        for a, (lo, hi) in enumerate(zip(lower, upper)):
            s0, s1 = self.support(a)
            if s0 < lo - 1e-14 or s1 > hi + 1e-14:
                raise SupportError(
                    f"support [{s0:.4g}, {s1:.4g}] on axis {a} leaves [{lo:.4g}, {hi:.4g}]"
                )


@dataclass(frozen=True)
class TestFunctionFamily:
    """Seeded family of bumps supported strictly inside a box.

    Radii are drawn as fractions ``radius_range`` of each side length; the
    support keeps a clearance of ``margin`` times the side length.
    """

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    count: int
    seed: int = 0
    radius_range: tuple[float, float] = (0.08, 0.25)
    margin: float = 0.01

    __test__ = False  # not a pytest class

    def bumps(self) -> list[Bump]:
        rng = np.random.default_rng(self.seed)
        out = []
        for _ in range(self.count):
            centre, radius = [], []
            for lo, hi in zip(self.lower, self.upper):
                L = hi - lo
                r = rng.uniform(*self.radius_range) * L
                gap = self.margin * L
                c = rng.uniform(lo + r + gap, hi - r - gap)
                centre.append(float(c))
                radius.append(float(r))
            out.append(Bump(tuple(centre), tuple(radius)))
        return out

    def __iter__(self):
        return iter(self.bumps())

    def __len__(self) -> int:
        return self.count
