from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viscolimit import (
    ProblemSpec,
    SpaceTimeField,
    SpatialDomain,
    check_energy_estimate,
    check_max_principle,
    make_flux,
    make_initial_condition,
    make_viscosity,
    mollify_dirichlet,
    solve_viscous,
)
from viscolimit.viscous import SolverAbort, face_differences, stable_dt, time_derivative_l1


def burgers_spec(domain, eps=0.05, T=0.5, viscosity="constant", ic=None, flux="burgers"):
    ic = ic or make_initial_condition("sine", domain)
    return ProblemSpec(domain, T, eps, make_flux(flux), make_viscosity(viscosity), ic, A=1.0), ic


def test_time_step_rule():
    one = SpatialDomain.interval()
    spec, _ = burgers_spec(one, eps=0.01)
    assert stable_dt(spec, 0.01) == pytest.approx(0.002, rel=1e-12)
    vanishing, _ = burgers_spec(one, eps=1e-12)
    assert stable_dt(vanishing, 0.01) == pytest.approx(0.4 * 0.01 / 1.0, rel=1e-12)
    two, _ = burgers_spec(SpatialDomain.rectangle(), eps=0.01, flux="power-mix-2d")
    assert stable_dt(two, 0.01) == pytest.approx(0.001, rel=1e-12)
    with pytest.raises(ValueError):
        stable_dt(spec, 0.0)


@pytest.mark.parametrize("dim", [1, 2])
def test_zero_datum_gives_zero_solution(dim):
    dom = SpatialDomain.interval() if dim == 1 else SpatialDomain.rectangle()
    zero = make_initial_condition("constant", dom, value=0.0)
    spec, _ = burgers_spec(dom, ic=zero, T=0.1, flux="burgers" if dim == 1 else "power-mix-2d")
    field, trace = solve_viscous(spec, mollify_dirichlet(zero, dom, 0.05), 20)
    assert np.all(field.u == 0.0)
    assert trace.energy_total == 0.0 and time_derivative_l1(field) == 0.0
    assert check_max_principle(field, 0.0)


def test_step_run_obeys_max_principle_and_energy(small_burgers_run):
    spec, datum, field, trace = small_burgers_run
    assert np.max(trace.sup) <= 1.0
    assert check_max_principle(field, 1.0)
    rep = check_energy_estimate(trace, datum, spec.viscosity.r)
    assert rep.passed
    assert rep.lhs <= 1.05 * datum.l2sq / 2


def test_max_principle_flags_violation(unit):
    t = np.array([0.0, 0.1])
    u = np.zeros((2, 20))
    u[1, 7] = 1.5
    assert not check_max_principle(SpaceTimeField(unit, t, u, 0.1, 0.0), 1.0)


def test_energy_bound_arithmetic(unit):
    datum = SimpleNamespace(l2sq=0.5, source_sup=1.0, domain=unit)
    zero_trace = SimpleNamespace(energy_total=0.0)
    rep = check_energy_estimate(zero_trace, datum, r=1.0)
    assert rep.passed and rep.lhs == 0.0 and rep.bound == pytest.approx(0.25)
    # the bound depends on the lower bound r only, not on sup B
    assert make_viscosity("two-plus-sin").r == make_viscosity("constant").r == 1.0
    rep_sin = check_energy_estimate(zero_trace, datum, r=make_viscosity("two-plus-sin").r)
    assert rep_sin.bound == rep.bound


def test_time_derivative_of_moving_step(unit):
    n, T = 400, 0.6
    t = np.linspace(0.0, T, 601)
    x = unit.cell_centers((n,))[0]
    u = (x[None, :] < 0.3 + 0.5 * t[:, None]).astype(float)
    field = SpaceTimeField(unit, t, u, t[1] - t[0], 0.0)
    # a unit jump moving at speed 1/2 sweeps 0.5 * 1 * T
    assert time_derivative_l1(field) == pytest.approx(0.5 * T, abs=2.0 / n)
    frozen = SpaceTimeField(unit, t, np.repeat(u[:1], len(t), axis=0), t[1] - t[0], 0.0)
    assert time_derivative_l1(frozen) <= 1e-10


def test_refinement_is_first_order_on_smooth_run(unit):
    spec, ic = burgers_spec(unit, eps=0.1)
    datum = mollify_dirichlet(ic, unit, 0.1)
    mass = []
    for n in (50, 100, 200, 400):
        field, _ = solve_viscous(spec, datum, n)
        mass.append(float(field.time_weights() @ np.abs(field.u).sum(axis=1)) * field.cell_volume)
    gaps = np.abs(np.diff(mass))
    assert np.all(gaps[:-1] / gaps[1:] >= 1.5)


def test_sup_norm_decays_for_heat_dominated_run(unit):
    spec, ic = burgers_spec(unit, eps=0.1)
    _, trace = solve_viscous(spec, mollify_dirichlet(ic, unit, 0.1), 50)
    assert np.all(np.diff(trace.sup) <= 1e-15)
    assert np.all(np.diff(trace.energy) >= 0)


def test_solver_aborts_when_leaving_invariant_interval(unit):
    spec, ic = burgers_spec(unit, eps=0.1)
    with pytest.raises(SolverAbort):
        solve_viscous(spec, mollify_dirichlet(ic, unit, 0.1), 50, dt=0.05)


def test_solver_input_validation(unit):
    spec, ic = burgers_spec(unit, eps=0.1)
    with pytest.raises(ValueError):
        solve_viscous(spec, mollify_dirichlet(ic, unit, 0.05), 50)
    with pytest.raises(ValueError):
        solve_viscous(spec, mollify_dirichlet(ic, unit, 0.1), 8)


def test_snapshots_and_save_times(unit):
    spec, ic = burgers_spec(unit, eps=0.05)
    field, trace = solve_viscous(spec, mollify_dirichlet(ic, unit, 0.05), 100, save_times=[0.1234])
    steps = field.meta["steps"]
    assert np.allclose(field.t[: 129], np.arange(129) * field.dt)
    assert field.t[-1] == pytest.approx(spec.T)
    assert np.min(np.abs(field.t - 0.1234)) <= field.dt / 2
    assert len(trace.t) == steps + 1
    w = field.time_weights()
    assert w.sum() == pytest.approx(spec.T)
    m = field.manifest()
    assert m["cells"] == [100] and m["eps"] == 0.05 and m["scheme"] == field.scheme


@settings(max_examples=25, deadline=None)
@given(u=st.lists(st.floats(-5, 5), min_size=2, max_size=30))
def test_face_differences_telescope_to_zero(u):
    u = np.array(u)
    d = face_differences(u, 0)
    assert d.shape == (len(u) + 1,)
    assert abs(d.sum()) <= 1e-12


@settings(max_examples=8, deadline=None)
@given(
    uL=st.floats(-1, 1),
    uR=st.floats(-1, 1),
    viscosity=st.sampled_from(["constant", "two-plus-sin"]),
)
def test_discrete_max_principle_on_random_riemann_data(uL, uR, viscosity):
    dom = SpatialDomain.interval()
    ic = make_initial_condition("riemann", dom, uL=uL, uR=uR, x0=0.4)
    spec = ProblemSpec(dom, 0.2, 0.1, make_flux("burgers"), make_viscosity(viscosity), ic, A=ic.sup)
    field, _ = solve_viscous(spec, mollify_dirichlet(ic, dom, 0.1), 40)
    assert check_max_principle(field, ic.sup)
