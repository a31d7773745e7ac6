import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viscolimit import (
    ProblemSpec,
    exact_burgers_ibvp,
    exact_burgers_riemann,
    godunov_flux,
    make_flux,
    make_initial_condition,
    make_viscosity,
    solve_inviscid,
)
from viscolimit.reference import (
    CFLViolation,
    GodunovFlux,
    NonConvexFluxError,
    WaveInteraction,
    cell_averages,
    riemann_solution,
)
from viscolimit.viscous import time_derivative_l1

BURGERS = make_flux("burgers")


def riemann_spec(domain, uL, uR, x0=0.3, T=0.6):
    ic = make_initial_condition("riemann", domain, uL=uL, uR=uR, x0=x0)
    return ProblemSpec(domain, T, 0.01, BURGERS, make_viscosity("constant"), ic, A=max(abs(uL), abs(uR), 1e-12))


@pytest.mark.parametrize(
    "uL, uR, expected",
    [(0.3, 0.3, 0.045), (-0.7, -0.7, 0.245), (1.0, 0.0, 0.5), (-1.0, 1.0, 0.0), (0.0, 1.0, 0.0), (0.0, -1.0, 0.5)],
)
def test_godunov_flux_values(uL, uR, expected):
    assert float(godunov_flux(uL, uR, BURGERS)) == pytest.approx(expected, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(0, 0.5)), min_size=1, max_size=40))
def test_godunov_flux_is_monotone(triples):
    G = GodunovFlux(BURGERS, (-1.0, 1.0))
    a, b, d = (np.array(v) for v in zip(*triples))
    assert np.all(G(np.minimum(a + d, 1.0), b) >= G(a, b) - 1e-15)
    assert np.all(G(a, np.minimum(b + d, 1.0)) <= G(a, b) + 1e-15)


def test_godunov_flux_thousand_sampled_pairs(rng):
    G = GodunovFlux(make_flux("cubic"), (0.0, 1.0))
    a, b, d = rng.uniform(0, 1, 1000), rng.uniform(0, 1, 1000), rng.uniform(0, 0.2, 1000)
    assert np.all(G(np.minimum(a + d, 1), b) >= G(a, b) - 1e-15)
    assert np.all(G(a, np.minimum(b + d, 1)) <= G(a, b) + 1e-15)
    concave = GodunovFlux(BURGERS.scaled(-1.0), (-1.0, 1.0))
    assert float(concave(-1.0, 1.0)) == pytest.approx(-0.5)


def test_godunov_rejects_nonconvex_flux():
    with pytest.raises(NonConvexFluxError):
        GodunovFlux(make_flux("cubic"), (-1.0, 1.0))


def test_zero_datum_reference(unit):
    spec = riemann_spec(unit, 0.0, 0.0)
    field = solve_inviscid(spec, 100)
    assert np.all(field.u == 0.0)
    assert field.solver == "reference" and field.eps == 0.0


def test_shock_location(unit):
    spec = riemann_spec(unit, 1.0, 0.0, T=0.4)
    field = solve_inviscid(spec, 400)
    x, u = field.centers[0], field.u[-1]
    h = field.h[0]
    # the boundary fan occupies x < t; locate the shock beyond it
    right = x > 0.45
    shock = x[right][np.argmin(np.abs(u[right] - 0.5))]
    assert abs(shock - (0.3 + 0.4 / 2)) <= 2 * h


def test_time_variation_of_shock_reference(unit):
    field = solve_inviscid(riemann_spec(unit, 1.0, 0.0), 400)
    # shock sweeps 0.5 * T; the fan entering at x = 0 adds another T / 2
    assert time_derivative_l1(field) == pytest.approx(0.6, abs=0.01)


@pytest.mark.parametrize("uL, uR", [(1.0, 0.0), (0.0, 1.0)])
def test_self_convergence_on_riemann_data(unit, uL, uR):
    errs = []
    for n in (100, 200, 400):
        field = solve_inviscid(riemann_spec(unit, uL, uR), n)
        exact = cell_averages(lambda x: exact_burgers_ibvp(uL, uR, 0.3, 0.6, x), unit, field.shape)
        errs.append(float(np.sum(np.abs(field.u[-1] - exact)) * field.h[0]))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all(ratios >= 1.5), ratios


def test_cfl_guard(unit):
    with pytest.raises(CFLViolation):
        solve_inviscid(riemann_spec(unit, 1.0, 0.0), 100, dt=0.02)


def test_two_dimensional_reference_is_flagged(square):
    ic = make_initial_condition("sine", square)
    both = make_flux("custom", coefficients=[[0.0, 0.0, 0.5], [0.0, 0.0, 0.5]])
    spec = ProblemSpec(square, 0.2, 0.01, both, make_viscosity("constant"), ic, A=1.0)
    field = solve_inviscid(spec, 32)
    with pytest.raises(NonConvexFluxError):
        solve_inviscid(spec.with_flux(make_flux("power-mix-2d")), 32)
    assert "lie-split" in field.scheme and "accuracy" in field.meta
    assert np.max(np.abs(field.u)) <= 1.0 + 1e-12


def test_exact_riemann_examples():
    x = np.linspace(0, 1, 101)
    t = 0.4
    shock = exact_burgers_riemann(1.0, 0.0, 0.3, t, x)
    assert np.array_equal(shock, np.where(x < 0.3 + t / 2, 1.0, 0.0))
    fan = exact_burgers_riemann(0.0, 1.0, 0.3, t, x)
    assert np.allclose(fan, np.clip((x - 0.3) / t, 0, 1))
    assert np.all(exact_burgers_riemann(0.7, 0.7, 0.3, t, x) == 0.7)
    assert riemann_solution(1.0, -0.5).rankine_hugoniot_defect() < 1e-15
    with pytest.raises(ValueError):
        exact_burgers_riemann(1.0, 0.0, 0.3, 0.0, x)


def test_exact_ibvp_boundary_waves():
    x = np.linspace(0, 1, 1001)
    u = exact_burgers_ibvp(1.0, 0.0, 0.3, 0.4, x)
    # fan 0 -> 1 enters at x = 0, shock at 0.5
    assert np.allclose(u[x < 0.4], x[x < 0.4] / 0.4)
    assert np.all(u[(x > 0.4) & (x < 0.5)] == 1.0) and np.all(u[x > 0.5] == 0.0)
    v = exact_burgers_ibvp(0.0, -1.0, 0.5, 0.2, x)
    assert np.allclose(v[x > 0.8], np.clip((x[x > 0.8] - 1.0) / 0.2, -1, 0))
    with pytest.raises(WaveInteraction):
        exact_burgers_ibvp(1.0, 0.0, 0.3, 0.7, x)
