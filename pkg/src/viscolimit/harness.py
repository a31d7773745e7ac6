"""Epsilon sweeps: configuration, orchestration against a reference, report files."""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .compactness import divcurl_defect, entropy_production_split, tartar_defect
from .entropy import SmoothEntropyPair
from .initial_data import (
    InitialCondition,
    make_initial_condition,
    mollify_dirichlet,
    sweep_uniformity,
    verify_initial_bounds,
)
from .io import dump_json, fmt
from .kinetic import CGrid, DefectDensity, kinetic_weak_residual, measure_bound_check
from .model import ProblemSpec, SpatialDomain, make_flux, make_viscosity
from .otto import verify_entropy_solution
from .reference import NonConvexFluxError, WaveInteraction, cell_averages, exact_burgers_ibvp, solve_inviscid
from .testfunctions import TestFunctionFamily
from .viscous import SolverAbort, SpaceTimeField, check_energy_estimate, check_max_principle, solve_viscous

__all__ = [
    "SCHEMA_VERSION",
    "CSV_COLUMNS",
    "SweepConfig",
    "SweepError",
    "ReportError",
    "SweepRow",
    "SweepReport",
    "build_problem",
    "run_sweep",
    "verify_field",
    "emit_report",
    "resolve_output_dir",
]

SCHEMA_VERSION = 1
OUTPUT_ROOT_ENV = "VISCOLIMIT_OUTPUT_ROOT"
CSV_COLUMNS = (
    "eps",
    "h",
    "dt",
    "L1_T",
    "L1_spacetime",
    "max_principle",
    "energy_lhs",
    "energy_bound",
    "entropy_min_residual",
    "boundary_limit",
    "defect",
    "kinetic_residual",
)
ZERO_FLOOR = 1e-14


class SweepError(RuntimeError):
    """A sweep member failed; ``eps`` names the offending run."""

    def __init__(self, eps: float, message: str):
        super().__init__(f"eps={eps:g}: {message}")
        self.eps = eps


class ReportError(OSError):
    """The report directory cannot be written."""


# ---------------------------------------------------------------------------
# configuration


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class DomainConfig(_Strict):
    lower: list[float] = [0.0]
    upper: list[float] = [1.0]

    @model_validator(mode="after")
    def _box(self):
        if len(self.lower) != len(self.upper) or len(self.lower) not in (1, 2):
            raise ValueError("domain must be an interval or a rectangle")
        if any(b <= a for a, b in zip(self.lower, self.upper)):
            raise ValueError("domain needs lower < upper on every axis")
        return self


class FluxConfig(_Strict):
    name: str = "burgers"
    a: float = 1.0
    coefficients: Optional[list[list[float]]] = None


class ViscosityConfig(_Strict):
    name: str = "constant"
    value: float = 1.0
    coefficients: Optional[list[float]] = None


class InitialConfig(_Strict):
    name: str = "riemann"
    params: dict[str, float | str] = Field(default_factory=dict)


class GridConfig(_Strict):
    cells_per_eps: float = Field(5.0, gt=0)  # h = eps / cells_per_eps
    cells: Optional[int] = Field(None, ge=16)  # fixed grid, overrides the coupling
    min_cells: int = Field(16, ge=16)
    max_snapshots: int = Field(200, ge=1)


class ReferenceConfig(_Strict):
    kind: Literal["auto", "exact", "godunov", "none"] = "auto"
    cells: Optional[int] = Field(None, ge=16)
    cfl: float = Field(0.45, gt=0, le=1)
    compare_times: int = Field(21, ge=2)


class ChecksConfig(_Strict):
    otto: bool = True
    kinetic: bool = True
    compactness: bool = True
    estimates: bool = True
    dump_marginals: bool = False


class SeedConfig(_Strict):
    test_functions: int = 0
    kinetic: int = 0


class ToleranceConfig(_Strict):
    C: float = Field(10.0, gt=0)
    energy_slack: float = Field(1.05, ge=1)
    uniformity_factor: float = Field(3.0, ge=1)
    n_bumps: int = Field(50, ge=1)
    n_psi: int = Field(10, ge=1)
    macro_cell: int = Field(8, ge=1)
    entropy_level: float = Field(100.0, gt=0)


class SweepConfig(_Strict):
    """One ε-sweep. Unknown keys are rejected at every level."""

    schema_version: Literal[1] = SCHEMA_VERSION
    problem: str = "sweep"
    domain: DomainConfig = DomainConfig()
    T: float = Field(0.6, gt=0)
    A: Optional[float] = Field(None, ge=0)
    flux: FluxConfig = FluxConfig()
    viscosity: ViscosityConfig = ViscosityConfig()
    initial: InitialConfig = InitialConfig()
    eps: list[float] = [0.1, 0.05, 0.025, 0.0125]
    grid: GridConfig = GridConfig()
    reference: ReferenceConfig = ReferenceConfig()
    checks: ChecksConfig = ChecksConfig()
    seeds: SeedConfig = SeedConfig()
    tolerances: ToleranceConfig = ToleranceConfig()
    output: str = "viscolimit-out"
    workers: int = Field(1, ge=1)

    @field_validator("eps")
    @classmethod
    def _decreasing(cls, v: list[float]) -> list[float]:
        if any(e <= 0 for e in v):
            raise ValueError("eps values must be positive")
        if any(b >= a for a, b in zip(v, v[1:])):
            raise ValueError("eps list must be strictly decreasing")
        return v

    @classmethod
    def from_file(cls, path: str | Path) -> "SweepConfig":
        return cls.model_validate_json(Path(path).read_text())

    def cells_for(self, eps: float) -> int:
        if self.grid.cells is not None:
            return self.grid.cells
        width = min(u - l for l, u in zip(self.domain.lower, self.domain.upper))
        return max(self.grid.min_cells, int(math.ceil(width * self.grid.cells_per_eps / eps - 1e-9)))


def resolve_output_dir(config: SweepConfig, root: str | Path | None = None) -> Path:
    """Relative output paths hang off ``root`` (or the environment's output root)."""
    out = Path(config.output)
    if out.is_absolute():
        return out
    root = root if root is not None else os.environ.get(OUTPUT_ROOT_ENV)
    return (Path(root) if root else Path.cwd()) / out


def build_problem(config: SweepConfig, eps: float | None = None) -> tuple[ProblemSpec, InitialCondition]:
    domain = SpatialDomain(tuple(config.domain.lower), tuple(config.domain.upper))
    flux = make_flux(config.flux.name, a=config.flux.a, coefficients=config.flux.coefficients)
    if flux.dim != domain.dim:
        raise ValueError(f"flux '{flux.name}' has {flux.dim} components for a {domain.dim}-D domain")
    visc = make_viscosity(
        config.viscosity.name,
        value=config.viscosity.value,
        coefficients=config.viscosity.coefficients,
    )
    ic = make_initial_condition(config.initial.name, domain, **config.initial.params)
    A = ic.sup if config.A is None else config.A
    if eps is None:
        eps = config.eps[0] if config.eps else 1.0
    spec = ProblemSpec(domain, config.T, eps, flux, visc, ic, A=A, label=config.problem)
    return spec, ic


# ---------------------------------------------------------------------------
# reference solutions


class _Reference:
    kind = "none"

    def at(self, t: float, shape: tuple[int, ...]) -> np.ndarray | None:
        return None


class _ExactBurgers(_Reference):
    kind = "exact"

    def __init__(self, ic: InitialCondition, domain: SpatialDomain, T: float):
        p = ic.params
        self.uL, self.uR, self.x0 = float(p["uL"]), float(p["uR"]), float(p["x0"])
        self.a, self.b = domain.lower[0], domain.upper[0]
        self.domain = domain
        self.ic = ic
        self.at(T, (16,))  # raises WaveInteraction past the first interaction

    def at(self, t, shape):
        if t <= 0:
            return cell_averages(self.ic, self.domain, shape)
        fn = lambda x: exact_burgers_ibvp(self.uL, self.uR, self.x0, t, x, self.a, self.b)  # noqa: E731
        return cell_averages(fn, self.domain, shape)


class _Godunov(_Reference):
    kind = "godunov"

    def __init__(self, spec: ProblemSpec, cells: int, cfl: float, times: np.ndarray):
        self.field = solve_inviscid(spec, cells, cfl=cfl, save_times=times)

    def at(self, t, shape):
        fine = self.field.at(t)
        return _restrict(fine, shape)


def _restrict(fine: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Average a fine grid onto a coarse one whose cells each contain whole fine cells,
    or else sample the fine grid at coarse centres."""
    out = fine
    for axis, m in enumerate(shape):
        n = out.shape[axis]
        if n % m == 0:
            r = n // m
            new_shape = out.shape[:axis] + (m, r) + out.shape[axis + 1 :]
            out = out.reshape(new_shape).mean(axis=axis + 1)
        else:
            idx = np.minimum(((np.arange(m) + 0.5) * n / m).astype(int), n - 1)
            out = np.take(out, idx, axis=axis)
    return out


def _make_reference(config: SweepConfig, spec: ProblemSpec, ic: InitialCondition, times) -> _Reference:
    kind = config.reference.kind
    if kind == "none":
        return _Reference()
    exact_ok = spec.domain.dim == 1 and spec.flux.name == "burgers" and ic.name == "riemann"
    if kind in ("auto", "exact") and exact_ok:
        try:
            return _ExactBurgers(ic, spec.domain, spec.T)
        except WaveInteraction:
            if kind == "exact":
                raise
    elif kind == "exact":
        raise ValueError("the exact oracle covers 1-D Burgers Riemann data only")
    cells = config.reference.cells or (2000 if spec.domain.dim == 1 else 256)
    try:
        return _Godunov(spec, cells, config.reference.cfl, times)
    except NonConvexFluxError:
        if kind == "godunov":
            raise
        return _Reference()


# ---------------------------------------------------------------------------
# per-run checks


@dataclass
class SweepRow:
    eps: float
    h: float
    dt: float
    L1_T: float
    L1_spacetime: float
    max_principle: bool
    energy_lhs: float
    energy_bound: float
    entropy_min_residual: float
    boundary_limit: float
    defect: float
    kinetic_residual: float
    checks: dict = field(default_factory=dict)  # name -> {value, bound, tol, pass}
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks.values())

    def csv_values(self) -> list[str]:
        out = []
        for name in CSV_COLUMNS:
            v = getattr(self, name)
            out.append(str(bool(v)).lower() if isinstance(v, (bool, np.bool_)) else fmt(v))
        return out


@dataclass
class SweepReport:
    config: SweepConfig
    rows: list[SweepRow]
    checks: dict  # sweep-level checks
    reference: str
    profiles: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows) and all(c["pass"] for c in self.checks.values())

    def verdict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "problem": self.config.problem,
            "reference": self.reference,
            "pass": self.passed,
            "checks": self.checks,
            "runs": [
                {"eps": r.eps, "pass": r.passed, "checks": r.checks, "details": r.details}
                for r in self.rows
            ],
            "config": self.config.model_dump(mode="json"),
        }


def _entry(value, bound=None, tol=0.0, passed=True) -> dict:
    return {
        "value": _plain(value),
        "bound": _plain(bound),
        "tol": _plain(tol),
        "pass": bool(passed),
    }


def _plain(v):
    if v is None:
        return None
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    return float(v)


def _kinetic_checks(field_: SpaceTimeField, spec: ProblemSpec, config: SweepConfig) -> tuple[float, dict, dict]:
    grid = CGrid.for_bound(spec.A if spec.A > 0 else 1.0)
    family = TestFunctionFamily(
        tuple(spec.domain.lower) + (-grid.half_width, 0.0),
        tuple(spec.domain.upper) + (grid.half_width, spec.T),
        config.tolerances.n_psi,
        config.seeds.kinetic,
    )
    defect = DefectDensity(field_, spec, grid)
    res, ratios, bound_ok, pairings, bounds = [], [], True, [], []
    scale = max(field_.h) + grid.dc + field_.dt
    for psi in family:
        r = kinetic_weak_residual(field_, spec, psi, grid)
        res.append(r)
        ratios.append(abs(r) / (config.tolerances.C * scale * psi.c2_norm))
        mb = measure_bound_check(defect, psi=psi)
        bound_ok &= bool(mb.passed)
        pairings.append(mb.lhs)
        bounds.append(mb.bound)
    rms = float(np.sqrt(np.mean(np.square(res))))
    worst = int(np.argmax([p / b if b > 0 else (np.inf if p > 0 else 0.0) for p, b in zip(pairings, bounds)]))
    checks = {
        "kinetic_residual": _entry(max(ratios), 1.0, 0.0, max(ratios) <= 1.0),
        "measure_bound": _entry(pairings[worst], bounds[worst], 0.0, bound_ok),
    }
    details = {"residuals": _plain(res), "pairings": _plain(pairings), "bounds": _plain(bounds)}
    if config.checks.dump_marginals:
        details["marginal"] = defect.marginal()
    return rms, checks, details


def _run_member(config: SweepConfig, eps: float) -> tuple[SweepRow, dict]:
    spec, ic = build_problem(config, eps)
    N = config.cells_for(eps)
    times = np.linspace(0.0, config.T, config.reference.compare_times)
    datum = mollify_dirichlet(ic, spec.domain, eps)
    try:
        fld, trace = solve_viscous(
            spec, datum, N, save_times=times, max_snapshots=config.grid.max_snapshots
        )
    except SolverAbort as exc:
        raise SweepError(eps, str(exc)) from exc

    checks: dict = {}
    details: dict = {"cells": N, "snapshots": len(fld.t), "steps": int(fld.meta["steps"])}
    A = float(spec.A)

    mp = check_max_principle(fld, ic.sup)
    peak = float(np.max(np.abs(fld.u)))
    energy = check_energy_estimate(trace, datum, spec.viscosity.r)
    if config.checks.estimates:
        checks["max_principle"] = _entry(peak, ic.sup, 1e-12, mp)
        checks["energy"] = _entry(
            energy.lhs, energy.bound, 0.0, energy.lhs <= config.tolerances.energy_slack * energy.bound
        )
        ib = verify_initial_bounds(datum)
        checks["initial_contraction"] = _entry(datum.sup, datum.source_sup, 1e-12, ib.contraction)
        details["initial_bounds"] = {k: _plain(v) for k, v in ib.to_dict().items() if v is not None}
        details["initial_l1_error"] = datum.l1_error

    ent_min = bnd = float("nan")
    if config.checks.otto:
        verdict = verify_entropy_solution(
            fld,
            spec.flux,
            A,
            ic,
            n_bumps=config.tolerances.n_bumps,
            seed=config.seeds.test_functions,
            C=config.tolerances.C,
        )
        v = verdict.to_dict()
        ent_min = verdict.interior_min
        bnd = verdict.boundary[max(verdict.boundary)]
        checks["otto_interior"] = _entry(verdict.interior_min_scaled, -1.0, 0.0, verdict.interior_pass)
        checks["otto_boundary"] = _entry(
            min(verdict.boundary.values()), 0.0, verdict.boundary_tol, verdict.boundary_pass
        )
        if verdict.trace is not None:
            checks["otto_initial_trace"] = _entry(
                verdict.trace.distances[-1], verdict.trace.tol, 0.0, verdict.trace.passed
            )
        details["otto"] = v

    defect_value = float("nan")
    if config.checks.compactness:
        interval = (-A, A) if A > 0 else (-1.0, 1.0)
        eta = SmoothEntropyPair(0.0, config.tolerances.entropy_level, spec.flux, interval)
        split = entropy_production_split(fld, spec, eta, u0_l2sq=datum.l2sq)
        checks["split_part_ii"] = _entry(split.part_ii, split.bound_ii, 0.0, split.passed)
        details["split"] = split.to_dict()
        size = config.tolerances.macro_cell
        if spec.domain.dim == 1:
            defect_value = tartar_defect([fld], spec.flux, 0.0, size).values[0]
        else:
            defect_value = divcurl_defect([fld], spec.flux, size).values[0]
        checks["defect_bounded"] = _entry(defect_value, None, 0.0, math.isfinite(defect_value))

    kin = float("nan")
    if config.checks.kinetic:
        kin, kchecks, kdetails = _kinetic_checks(fld, spec, config)
        checks.update(kchecks)
        details["kinetic"] = {k: v for k, v in kdetails.items() if k != "marginal"}
        marginal = kdetails.get("marginal")
    else:
        marginal = None

    row = SweepRow(
        eps=eps,
        h=max(fld.h),
        dt=fld.dt,
        L1_T=float("nan"),
        L1_spacetime=float("nan"),
        max_principle=mp,
        energy_lhs=energy.lhs,
        energy_bound=energy.bound,
        entropy_min_residual=ent_min,
        boundary_limit=bnd,
        defect=defect_value,
        kinetic_residual=kin,
        checks=checks,
        details=details,
    )
    levels = {float(t): fld.at(t) for t in times}
    profile = {"eps": eps, "centers": fld.centers, "u_T": fld.u[-1], "levels": levels}
    if marginal is not None:
        profile["marginal"] = (fld.t, marginal)
    return row, profile


def _member_task(args):
    config_json, eps = args
    return _run_member(SweepConfig.model_validate_json(config_json), eps)


def _strictly_decreasing(values) -> bool:
    v = np.asarray(values, dtype=float)
    if len(v) < 2:
        return True
    return bool(np.all((np.diff(v) < 0) | ((v[:-1] <= ZERO_FLOOR) & (v[1:] <= ZERO_FLOOR))))


def run_sweep(config: SweepConfig) -> SweepReport:
    """Solve every member of the sweep, run the enabled checks and compare with the reference."""
    if config.workers > 1 and len(config.eps) > 1:
        payload = config.model_dump_json()
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_member_task, [(payload, e) for e in config.eps]))
    else:
        results = [_run_member(config, e) for e in config.eps]

    rows = [r for r, _ in results]
    profiles = [p for _, p in results]
    times = np.linspace(0.0, config.T, config.reference.compare_times)
    spec, ic = build_problem(config)
    ref = _make_reference(config, spec, ic, times)

    for row, prof in zip(rows, profiles):
        shape = tuple(len(c) for c in prof["centers"])
        vol = float(np.prod([(b - a) / n for a, b, n in zip(config.domain.lower, config.domain.upper, shape)]))
        dists = []
        for t in times:
            target = ref.at(float(t), shape)
            if target is None:
                break
            dists.append(float(np.sum(np.abs(prof["levels"][float(t)] - target)) * vol))
            if t == times[-1]:
                prof["reference_T"] = target
        if len(dists) == len(times):
            row.L1_T = dists[-1]
            row.L1_spacetime = float(np.trapezoid(dists, times))
            row.details["L1_profile"] = dists

    checks: dict = {}
    if ref.kind != "none" and rows:
        d = [r.L1_T for r in rows]
        checks["distance_decreasing"] = _entry(d, None, ZERO_FLOOR, _strictly_decreasing(d))
    if config.checks.compactness and len(rows) > 1:
        part_i = [r.details["split"]["part_i"] for r in rows]
        checks["split_part_i_decreasing"] = _entry(part_i, None, 0.0, _strictly_decreasing(part_i))
    if config.checks.estimates and rows:
        data = [mollify_dirichlet(ic, spec.domain, e) for e in config.eps]
        ok, ratio = sweep_uniformity(data, config.tolerances.uniformity_factor)
        checks["initial_uniformity"] = _entry(ratio, config.tolerances.uniformity_factor, 0.0, ok)
    return SweepReport(config, rows, checks, ref.kind, profiles)


def verify_field(fld: SpaceTimeField, config: SweepConfig) -> SweepReport:
    """Run the configured checks on an existing field (for example one read from CSV)."""
    eps = fld.eps if fld.eps > 0 else config.eps[0]
    spec, ic = build_problem(config, eps)
    if spec.domain.dim != fld.dim:
        raise ValueError("field dimension does not match the configured domain")
    A = float(spec.A)
    checks: dict = {}
    peak = float(np.max(np.abs(fld.u)))
    checks["max_principle"] = _entry(peak, ic.sup, 1e-12, check_max_principle(fld, ic.sup))
    details: dict = {"cells": list(fld.shape), "snapshots": len(fld.t)}
    ent_min = bnd = float("nan")
    if config.checks.otto:
        verdict = verify_entropy_solution(
            fld, spec.flux, A, ic, n_bumps=config.tolerances.n_bumps, seed=config.seeds.test_functions,
            C=config.tolerances.C,
        )
        ent_min = verdict.interior_min
        bnd = verdict.boundary[max(verdict.boundary)]
        checks["otto_interior"] = _entry(verdict.interior_min_scaled, -1.0, 0.0, verdict.interior_pass)
        checks["otto_boundary"] = _entry(
            min(verdict.boundary.values()), 0.0, verdict.boundary_tol, verdict.boundary_pass
        )
        if verdict.trace is not None:
            checks["otto_initial_trace"] = _entry(
                verdict.trace.distances[-1], verdict.trace.tol, 0.0, verdict.trace.passed
            )
        details["otto"] = verdict.to_dict()
    kin = float("nan")
    if config.checks.kinetic and fld.eps > 0:
        kin, kchecks, kdetails = _kinetic_checks(fld, spec, config)
        checks.update(kchecks)
        details["kinetic"] = {k: v for k, v in kdetails.items() if k != "marginal"}
    row = SweepRow(
        eps=fld.eps,
        h=max(fld.h),
        dt=fld.dt,
        L1_T=float("nan"),
        L1_spacetime=float("nan"),
        max_principle=bool(checks["max_principle"]["pass"]),
        energy_lhs=float("nan"),
        energy_bound=float("nan"),
        entropy_min_residual=ent_min,
        boundary_limit=bnd,
        defect=float("nan"),
        kinetic_residual=kin,
        checks=checks,
        details=details,
    )
    return SweepReport(config, [row], {}, "none", [])


# ---------------------------------------------------------------------------
# files


def emit_report(report: SweepReport, directory: str | Path) -> list[Path]:
    """Write sweep.csv, verdict.json and whitespace-separated .dat files.

    Output is a pure function of the report, so identical configurations give
    byte-identical files.
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        probe = directory / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ReportError(f"cannot write to {directory}: {exc}") from exc

    written = []
    path = directory / "sweep.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in report.rows:
            w.writerow(row.csv_values())
    written.append(path)
    written.append(dump_json(_jsonable(report.verdict()), directory / "verdict.json"))

    path = directory / "convergence.dat"
    with path.open("w") as fh:
        fh.write("# eps h L1_T L1_spacetime defect kinetic_residual\n")
        for r in report.rows:
            vals = (r.eps, r.h, r.L1_T, r.L1_spacetime, r.defect, r.kinetic_residual)
            fh.write(" ".join(fmt(v) for v in vals) + "\n")
    written.append(path)

    for i, prof in enumerate(report.profiles):
        path = directory / f"profile_{i:02d}.dat"
        mesh = np.meshgrid(*prof["centers"], indexing="ij")
        cols = [m.ravel() for m in mesh] + [prof["u_T"].ravel()]
        names = ["x", "y"][: len(mesh)] + ["u"]
        if "reference_T" in prof:
            cols.append(np.asarray(prof["reference_T"]).ravel())
            names.append("reference")
        with path.open("w") as fh:
            fh.write(f"# eps = {fmt(prof['eps'])}, t = {fmt(report.config.T)}\n")
            fh.write("# " + " ".join(names) + "\n")
            for vals in zip(*cols):
                fh.write(" ".join(fmt(v) for v in vals) + "\n")
        written.append(path)
        if "marginal" in prof:
            t, marg = prof["marginal"]
            path = directory / f"defect_marginal_{i:02d}.csv"
            with path.open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["t", *["x", "y"][: len(mesh)], "m_abs"])
                flat = [m.ravel() for m in mesh]
                for n, tn in enumerate(t):
                    for vals in zip(*flat, marg[n].ravel()):
                        w.writerow([fmt(tn), *(fmt(v) for v in vals)])
            written.append(path)
    return written


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj
