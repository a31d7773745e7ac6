import numpy as np
import pytest

from viscolimit import (
    ProblemSpec,
    SpatialDomain,
    make_flux,
    make_initial_condition,
    make_viscosity,
    mollify_dirichlet,
    solve_viscous,
)

SWEEP_EPS = (0.1, 0.05, 0.025, 0.0125)
SHOCK = {"uL": 1.0, "uR": 0.0, "x0": 0.3}
RAREFACTION = {"uL": 0.0, "uR": 1.0, "x0": 0.3}
T_RIEMANN = 0.6

# criterion number -> (title, passed, detail); filled by the acceptance tests
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def coupled_cells(eps: float) -> int:
    """h = eps / 5."""
    return int(round(5 / eps))


def riemann_sweep(params: dict, viscosity: str = "constant"):
    domain = SpatialDomain.interval()
    flux = make_flux("burgers")
    ic = make_initial_condition("riemann", domain, **params)
    runs = []
    for eps in SWEEP_EPS:
        spec = ProblemSpec(domain, T_RIEMANN, eps, flux, make_viscosity(viscosity), ic, A=ic.sup)
        datum = mollify_dirichlet(ic, domain, eps)
        field, trace = solve_viscous(spec, datum, coupled_cells(eps))
        runs.append((spec, datum, field, trace))
    return ic, runs


@pytest.fixture(scope="session")
def unit():
    return SpatialDomain.interval()


@pytest.fixture(scope="session")
def square():
    return SpatialDomain.rectangle()


@pytest.fixture(scope="session")
def burgers():
    return make_flux("burgers")


@pytest.fixture(scope="session")
def shock_sweep():
    return riemann_sweep(SHOCK)


@pytest.fixture(scope="session")
def rarefaction_sweep():
    return riemann_sweep(RAREFACTION)


@pytest.fixture(scope="session")
def shock_sweep_sin():
    return riemann_sweep(SHOCK, "two-plus-sin")


@pytest.fixture(scope="session")
def small_burgers_run(unit, burgers):
    """Mollified step 1 -> 0 at x = 0.5, eps = 0.05, 100 cells."""
    ic = make_initial_condition("riemann", unit, uL=1.0, uR=0.0, x0=0.5)
    spec = ProblemSpec(unit, 0.4, 0.05, burgers, make_viscosity("constant"), ic, A=1.0)
    datum = mollify_dirichlet(ic, unit, 0.05)
    field, trace = solve_viscous(spec, datum, 100)
    return spec, datum, field, trace


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
