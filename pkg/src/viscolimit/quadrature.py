"""Adaptive Simpson quadrature and cumulative integral tables."""

from __future__ import annotations

from typing import Callable

import numpy as np
from scipy.interpolate import CubicHermiteSpline

__all__ = ["QuadratureError", "adaptive_simpson", "IntegralTable"]


class QuadratureError(RuntimeError):
    """Raised when adaptive refinement hits its depth limit."""


def adaptive_simpson(
    func: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-9,
    max_depth: int = 50,
) -> float:
    """Integrate ``func`` over ``[a, b]`` with absolute tolerance ``tol``.

    Uses the classical Richardson-corrected recursion. ``b < a`` is allowed
    and returns the oriented integral.
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(func, b, a, tol, max_depth)

    fa, fb = func(a), func(b)
    m = 0.5 * (a + b)
    fm = func(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    # explicit stack instead of recursion; entries carry their own tolerance
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm, frm = func(lm), func(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - est
        if abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
            continue
        if depth >= max_depth:
            raise QuadratureError(
                f"adaptive Simpson did not converge on [{lo:.6g}, {hi:.6g}] "
                f"(depth {depth}, |delta|={abs(delta):.3e})"
            )
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
    return total


class IntegralTable:
    """Tabulated antiderivative ``G(z) = int_{z0}^{z} g(r) dr``.

    Node-to-node integrals come from :func:`adaptive_simpson`; evaluation
    between nodes uses cubic Hermite interpolation with the exact
    derivative ``g``. ``breakpoints`` are extra nodes clustered where ``g``
    has a sharp transition (kinks of smoothed entropies).
    """

    def __init__(
        self,
        integrand: Callable[[float], float],
        lo: float,
        hi: float,
        origin: float,
        n: int = 1001,
        breakpoints: tuple[tuple[float, float], ...] = (),
        tol: float = 1e-11,
    ):
        if not hi > lo:
            raise ValueError("table range must satisfy hi > lo")
        nodes = [np.linspace(lo, hi, n), [origin]]
        for centre, width in breakpoints:
            # geometric clustering resolves every scale from width to the table size
            reach = max(hi - lo, width) / width
            steps = width * np.geomspace(1e-2, reach, 240)
            local = centre + np.concatenate([-steps[::-1], [0.0], steps])
            nodes.append(local[(local > lo) & (local < hi)])
        z = np.unique(np.concatenate(nodes))
        z = z[(z >= min(lo, origin)) & (z <= max(hi, origin))]

        pieces = np.array(
            [adaptive_simpson(integrand, z[i], z[i + 1], tol=tol) for i in range(len(z) - 1)]
        )
        # accumulate outward from the origin so small values near it carry no cancellation
        i0 = int(np.searchsorted(z, origin))
        values = np.concatenate(
            [-np.cumsum(pieces[:i0][::-1])[::-1], [0.0], np.cumsum(pieces[i0:])]
        )
        slopes = np.array([integrand(float(t)) for t in z])

        self.lo, self.hi = float(z[0]), float(z[-1])
        self.nodes = z
        self._integrand = integrand
        self._spline = CubicHermiteSpline(z, values, slopes, extrapolate=False)
        self._origin = origin

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        out = self._spline(z)
        outside = ~np.isfinite(out)
        if np.any(outside):
            # rare path: direct quadrature beyond the table
            flat = out.reshape(-1)
            zf = z.reshape(-1)
            for i in np.flatnonzero(outside.reshape(-1)):
                flat[i] = adaptive_simpson(self._integrand, self._origin, float(zf[i]), tol=1e-10)
            out = flat.reshape(z.shape)
        return out
