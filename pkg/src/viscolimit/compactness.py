"""Compensated-compactness diagnostics: entropy-production split and div-curl defects.

Weak limits are proxied by averages over macro-cells of solver cells.  A
defect compares the average of a null-Lagrangian-type quadratic form with
the same form applied to the averages.  It is evaluated in the equivalent
centred form Q(G - <G>) so that constant blocks give exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .entropy import KruzhkovPair, SmoothEntropyPair
from .model import FluxModel, ProblemSpec
from .quadrature import IntegralTable
from .viscous import SpaceTimeField, face_differences

__all__ = [
    "FijField",
    "SplitReport",
    "entropy_production_split",
    "DefectSequence",
    "macro_blocks",
    "block_defect",
    "divcurl_defect",
    "tartar_defect",
]


class FijField:
    """F11, F12, F22 as functions of the state, tabulated on [lo, hi].

    F_ab(lambda) = int_0^lambda f_a'(s) f_b'(s) ds.
    """

    def __init__(self, flux: FluxModel, interval=(-1.0, 1.0), n: int = 1001):
        if flux.dim != 2:
            raise ValueError("F_ij functionals need a two-component flux")
        self.flux = flux
        lo, hi = min(interval[0], 0.0), max(interval[1], 0.0)
        self.interval = (lo, hi)

        def prod(a, b):
            return lambda s: float(flux.df(s, a) * flux.df(s, b))

        self._tables = {
            key: IntegralTable(prod(a, b), lo, hi, 0.0, n=n)
            for key, (a, b) in {"11": (0, 0), "12": (0, 1), "22": (1, 1)}.items()
        }

    def F11(self, u):
        return self._tables["11"](u)

    def F12(self, u):
        return self._tables["12"](u)

    def F22(self, u):
        return self._tables["22"](u)

    def components(self, u) -> np.ndarray:
        """Stack (F11, F12, F22) along a new leading axis."""
        return np.stack([self.F11(u), self.F12(u), self.F22(u)])


# ---------------------------------------------------------------------------
# entropy-production split


@dataclass(frozen=True)
class SplitReport:
    part_i: float  # eps |B| |eta'| |grad u|_{L2(Omega_T)}
    part_ii: float  # int int eps sum_j B u_j^2 |eta''|
    bound_ii: float  # C' |B| |eta''| with C' = |u0eps|^2/(2r)
    passed: bool

    def to_dict(self) -> dict:
        return {
            "part_i": self.part_i,
            "part_ii": self.part_ii,
            "bound_ii": self.bound_ii,
            "pass": self.passed,
        }


def entropy_production_split(
    field: SpaceTimeField,
    spec: ProblemSpec,
    eta: SmoothEntropyPair,
    u0_l2sq: float | None = None,
) -> SplitReport:
    """Both parts of the entropy production for a smooth entropy.

    Gradients are face differences with zero ghosts and B at a face is the
    arithmetic mean of its neighbours, as in the solver. ``u0_l2sq`` is the
    squared L2 norm of the mollified datum; by default it is taken from
    the first stored level.
    """
    eps = field.eps
    w = field.time_weights()
    vol = field.cell_volume
    interval = spec.interval if spec.A > 0 else (-1.0, 1.0)
    z = np.append(np.linspace(interval[0], interval[1], 10001), np.clip(eta.k, *interval))
    deta_sup = float(np.max(np.abs(eta.deta(z))))
    d2eta_sup = float(np.max(np.abs(eta.d2eta(z))))
    B_sup = spec.B_max

    grad_sq = np.zeros(len(field.t))
    weighted = np.zeros(len(field.t))
    for n, u in enumerate(field.u):
        Bu = spec.viscosity(u)
        for axis, h in enumerate(field.h):
            diff = face_differences(u, axis) / h
            pad = [(0, 0)] * u.ndim
            pad[axis] = (1, 1)
            up = np.pad(u, pad)
            Bp = np.pad(Bu, pad, constant_values=float(spec.viscosity(0.0)))
            lo = [slice(None)] * u.ndim
            hi = [slice(None)] * u.ndim
            lo[axis] = slice(0, -1)
            hi[axis] = slice(1, None)
            u_face = 0.5 * (up[tuple(lo)] + up[tuple(hi)])
            B_face = 0.5 * (Bp[tuple(lo)] + Bp[tuple(hi)])
            grad_sq[n] += float(np.sum(diff**2)) * vol
            weighted[n] += float(np.sum(B_face * diff**2 * np.abs(eta.d2eta(u_face)))) * vol
    grad_l2 = float(np.sqrt(w @ grad_sq))
    part_i = eps * B_sup * deta_sup * grad_l2
    part_ii = eps * float(w @ weighted)
    if u0_l2sq is None:
        u0_l2sq = float(np.sum(field.u[0] ** 2)) * vol
    C_prime = u0_l2sq / (2 * spec.viscosity.r)
    bound = C_prime * B_sup * d2eta_sup
    return SplitReport(part_i, part_ii, bound, part_ii <= 1.05 * bound)


# ---------------------------------------------------------------------------
# macro-cell defects


def macro_blocks(a: np.ndarray, size: int) -> np.ndarray:
    """Reshape the trailing spatial axes into (blocks..., cells-per-block)."""
    if a.ndim == 1:
        n = a.shape[0] // size
        return a[: n * size].reshape(n, size)
    nx, ny = a.shape[0] // size, a.shape[1] // size
    b = a[: nx * size, : ny * size].reshape(nx, size, ny, size)
    return b.transpose(0, 2, 1, 3).reshape(nx, ny, size * size)


def _centred(g: np.ndarray) -> np.ndarray:
    """g - <g> per block, with the mean formed relative to the first entry."""
    base = g[..., :1]
    return (g - base) - np.mean(g - base, axis=-1, keepdims=True)


def block_defect(components: Sequence[np.ndarray], pairs, size: int) -> np.ndarray:
    """Per-block |<sum_p s_p (A_p - <A_p>)(B_p - <B_p>)>| for signed index pairs.

    ``pairs`` is a list of (sign, i, j) referring to ``components``; this
    equals |<Q(G)> - Q(<G>)| for the quadratic form Q(G) = sum s_p G_i G_j.
    """
    devs = [_centred(macro_blocks(c, size)) for c in components]
    total = 0.0
    for sign, i, j in pairs:
        total = total + sign * devs[i] * devs[j]
    return np.abs(np.mean(total, axis=-1))


@dataclass(frozen=True)
class DefectSequence:
    eps: tuple[float, ...]
    values: tuple[float, ...]
    cell_size: int

    def to_dict(self) -> dict:
        return {"eps": list(self.eps), "defect": list(self.values), "cell_size": self.cell_size}


def _time_integrated(field: SpaceTimeField, per_level) -> float:
    w = field.time_weights()
    return float(sum(wn * per_level(u) for wn, u in zip(w, field.u)))


def divcurl_defect(
    sweep: Sequence[SpaceTimeField], flux2d: FluxModel, cell_size: int = 8, interval=None
) -> DefectSequence:
    """|<F11 F22 - F12^2> - (<F11><F22> - <F12>^2)| over macro-cells and time, per field."""
    if not sweep:
        return DefectSequence((), (), cell_size)
    shape = sweep[0].shape
    if any(f.shape != shape or f.dim != 2 for f in sweep):
        raise ValueError("sweep fields must share one two-dimensional grid")
    A = max(float(np.max(np.abs(f.u))) for f in sweep)
    interval = interval or (-max(A, 1e-12), max(A, 1e-12))
    F = FijField(flux2d, interval)
    pairs = [(1.0, 0, 2), (-1.0, 1, 1)]
    block_area = sweep[0].cell_volume * cell_size * cell_size
    values = []
    for f in sweep:
        def level(u):
            comps = F.components(u)
            return float(np.sum(block_defect(list(comps), pairs, cell_size))) * block_area

        values.append(_time_integrated(f, level))
    return DefectSequence(tuple(f.eps for f in sweep), tuple(values), cell_size)


def tartar_defect(
    sweep: Sequence[SpaceTimeField], flux: FluxModel, k: float = 0.0, cell_size: int = 8
) -> DefectSequence:
    """One-dimensional commutation defect for the pairs (u, f(u)) and (|u-k|, q(u;k)).

    |<u q - eta f> - (<u><q> - <eta><f>)| over macro-cells and time.
    """
    if not sweep:
        return DefectSequence((), (), cell_size)
    pair = KruzhkovPair(k, flux)
    pairs = [(1.0, 0, 3), (-1.0, 2, 1)]
    values = []
    for fld in sweep:
        if fld.dim != 1:
            raise ValueError("the commutation defect is one-dimensional")
        block_len = fld.cell_volume * cell_size

        def level(u):
            comps = [u, flux.f(u), pair.eta(u), pair.q(u)]
            return float(np.sum(block_defect(comps, pairs, cell_size))) * block_len

        values.append(_time_integrated(fld, level))
    return DefectSequence(tuple(f.eps for f in sweep), tuple(values), cell_size)
