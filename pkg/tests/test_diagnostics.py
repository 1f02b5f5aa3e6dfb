import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gammaflow import zoo
from gammaflow.core import (
    CouplingSchedule,
    Functional,
    InfiniteValue,
    MissingAnalyticSlope,
    Point,
)
from gammaflow.diagnostics import (
    GammaDistanceSpec,
    bounded_homeomorphism,
    crucial_assumption_probe,
    de_giorgi_ratio,
    edi_residual,
    epsilon_schedule_search,
    gamma_delta,
    local_slope,
    midpoint_enumeration,
    slope_liminf_probe,
)

QUAD = zoo.quadratic_reference().family
ONE = CouplingSchedule.constant(1.0)
OSC = zoo.named_oscillatory()


def test_local_slope_methods():
    assert local_slope(QUAD.limit, 2.0).local_slope == 2.0
    sq = Functional(lambda x: x * x, domain_hint=(-5, 5))
    assert local_slope(sq, 1.0, "finite_difference", h=1e-6).local_slope == pytest.approx(2.0, abs=1e-5)
    with pytest.raises(MissingAnalyticSlope):
        local_slope(sq, 1.0)


def test_descent_probe_at_local_minimizer():
    f = OSC.family.member(0.01)
    x0 = 0.01 * (math.pi / 2 + 100 * math.pi)  # a cos^2 zero near 3.16
    x0 = zoo.snap_to_cos_zero(x0, 0.01)
    radii = [1e-4 * 2.0 ** -k for k in range(6)]
    est = local_slope(f, x0, "descent_probe", radii=radii)
    # f'(x0) = 2 x0 at the zero, so the estimate is bounded by a Lipschitz bound times r
    assert est.local_slope <= 2 * abs(x0) + 1e-3
    flat = Functional(lambda x: np.abs(x) ** 3, domain_hint=(-1, 1))
    assert local_slope(flat, 0.0, "descent_probe", radii=radii).local_slope == 0.0


def test_local_slope_infinite():
    f = Functional(lambda x: np.where(x > 0, np.inf, 0.0), domain_hint=(-1, 1))
    with pytest.raises(InfiniteValue):
        local_slope(f, 1.0, "finite_difference")


@pytest.mark.parametrize("tau", [1.0, 0.1, 0.01, 1e-3])
def test_de_giorgi_ratio_quadratic(tau):
    r = de_giorgi_ratio(QUAD, ONE, tau, 1.0)
    assert abs(r.ratio - 1 / (2 * (1 + tau))) <= r.gap + 1e-12
    assert r.ratio >= 0.5 - tau * 0.5 - r.gap


def test_de_giorgi_ratio_at_minimizer():
    r = de_giorgi_ratio(QUAD, ONE, 0.1, 0.0)
    assert -r.gap <= r.ratio <= r.gap


def test_de_giorgi_ratio_oscillatory_fast_coupling():
    cpl = CouplingSchedule.power(1.0, 2.0)
    ratios = [de_giorgi_ratio(OSC.family, cpl, t, 1.0) for t in (1e-2, 1e-3, 1e-4)]
    assert ratios[-1].ratio >= 1.8


def test_crucial_probe_quadratic_satisfied():
    rep = crucial_assumption_probe(QUAD, ONE, lambda t: Point.of(1.0), [1e-1, 1e-2, 1e-3, 1e-4])
    assert rep.verdict == "satisfied" and rep.target == 0.5
    assert rep.as_dict()["label"] == "evidence only"


def test_crucial_probe_oscillatory_slow_coupling_violated():
    cpl = CouplingSchedule.power(1.0, 0.5)
    rep = crucial_assumption_probe(OSC.family, cpl, lambda t: Point.of(1.0), [1e-2, 1e-3, 1e-4])
    assert rep.verdict == "violated" and rep.conclusive


def test_crucial_probe_at_minimizer():
    rep = crucial_assumption_probe(QUAD, ONE, lambda t: Point.of(0.0), [1e-1, 1e-2, 1e-3])
    assert rep.target == 0.0 and rep.verdict == "satisfied"


def test_crucial_probe_requires_slope():
    fam = zoo.constant_family(QUAD.limit, QUAD.certificate, None, None, "no slope")
    with pytest.raises(MissingAnalyticSlope):
        crucial_assumption_probe(fam, ONE, lambda t: Point.of(1.0), [0.1])


def test_crucial_probe_convergence_flag():
    cpl = CouplingSchedule.power(1.0, 2.0)
    rep = crucial_assumption_probe(OSC.family, cpl, OSC.recovery(1.0, cpl), [1e-1, 1e-2, 1e-3],
                                   limit_point=Point.of(1.0), check_convergence=True)
    assert rep.extra["convergence_condition"]["holds"]


def test_edi_residuals():
    flow = lambda t: Point.of(math.exp(-t))
    assert abs(edi_residual(flow, QUAD.limit, QUAD.limit_slope, 0.0, 1.0, 1e-3)) <= 1e-3
    rest = lambda t: Point.of(0.0)
    assert edi_residual(rest, QUAD.limit, QUAD.limit_slope, 0.0, 1.0, 1e-2) == 0.0
    bad = lambda t: Point.of(t * math.exp(-t))
    assert edi_residual(bad, QUAD.limit, QUAD.limit_slope, 0.0, 1.0, 1e-3) <= -0.1


def test_edi_residual_converges_with_step():
    flow = lambda t: Point.of(math.exp(-t))
    r = [abs(edi_residual(flow, QUAD.limit, QUAD.limit_slope, 0.0, 1.0, h)) for h in (1e-1, 1e-2, 1e-3)]
    assert r[0] > r[1] > r[2]


def test_slope_liminf_probe():
    pert = zoo.named_perturbation("half_quadratic", "sin").family
    rep = slope_liminf_probe(pert, lambda e: Point.of(1.0), [1e-2, 1e-3, 1e-4])
    assert rep.verdict == "satisfied"
    rep = slope_liminf_probe(QUAD, lambda e: Point.of(1.0), [1e-1, 1e-2, 1e-3])
    assert rep.verdict == "satisfied" and rep.liminf_estimate == rep.target
    eps = [1e-2, 1e-3, 1e-4]
    rep = slope_liminf_probe(OSC.family, lambda e: Point.of(1.0), eps)
    expected = min(abs(OSC.family.member(e).grad(1.0)[0]) for e in eps)
    assert rep.liminf_estimate == pytest.approx(expected)
    assert rep.verdict in ("satisfied", "violated", "inconclusive")


def test_midpoint_enumeration_and_homeomorphism():
    assert midpoint_enumeration(-4.0, 4.0, 8) == [-4.0, 4.0, 0.0, -2.0, 2.0, -3.0, -1.0, 1.0]
    phi = bounded_homeomorphism
    assert phi(0.0) == 0.0 and phi(np.inf) == 1.0
    t = np.linspace(0, 50, 1001)
    assert np.all(np.diff(phi(t)) > 0)
    assert np.all(np.abs(np.diff(phi(t))) <= np.diff(t))


def test_gamma_delta_pseudometric():
    spec = GammaDistanceSpec()
    assert spec.truncation == (8, 8) and spec.truncation_bound == 2 * 2.0 ** -8
    f, g, h = OSC.family.member(0.1), OSC.family.member(0.05), OSC.family.limit
    assert gamma_delta(f, f, spec).value == 0.0
    fg, gf = gamma_delta(f, g, spec), gamma_delta(g, f, spec)
    assert fg.value == gf.value
    fh, gh = gamma_delta(f, h, spec), gamma_delta(g, h, spec)
    assert fh.value <= fg.value + gh.value + fg.gap + gh.gap + fh.gap


@settings(max_examples=10, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_gamma_delta_symmetric_property(a, b):
    f = Functional(lambda x: a * x * x, domain_hint=(-100, 100))
    g = Functional(lambda x: b * x * x + 0.1, domain_hint=(-100, 100))
    assert gamma_delta(f, g).value == gamma_delta(g, f).value


def test_schedule_search_constant_family():
    res = epsilon_schedule_search(QUAD, [1e-1, 1e-2], 1e-2, lambda t: t, eps_grid=[0.1, 0.01])
    assert res.table == {0.1: 0.1, 0.01: 0.1}


def test_schedule_search_oscillatory_decreasing_and_probe():
    grid = [0.1, 10 ** -1.5, 0.01, 10 ** -2.5]
    res = epsilon_schedule_search(OSC.family, [1e-1, 1e-2], 1e-2, lambda t: t, eps_grid=grid)
    assert res.table[0.01] < res.table[0.1]
    # any coupling below the table is allowed; tau * eps_tau sits in the fast regime
    cpl = CouplingSchedule.from_table({t: t * e for t, e in res.table.items()})
    rep = crucial_assumption_probe(OSC.family, cpl, OSC.recovery(1.0, cpl), [1e-1, 1e-2])
    assert rep.verdict == "satisfied"


def test_schedule_search_perturbation_monotone_in_theta():
    pert = zoo.named_perturbation("half_quadratic", "sin").family
    grid = [0.1, 10 ** -1.5, 0.01, 10 ** -2.5, 1e-3]
    loose = epsilon_schedule_search(pert, [1e-1, 1e-2], 1e-2, lambda t: t, eps_grid=grid)
    tight = epsilon_schedule_search(pert, [1e-1, 1e-2], 1e-2, lambda t: 0.1 * t, eps_grid=grid)
    for t in (1e-1, 1e-2):
        assert tight.table[t] <= loose.table[t]
    assert tight.table[1e-2] < loose.table[1e-2]


def test_schedule_search_reports_failure():
    res = epsilon_schedule_search(OSC.family, [1e-2], 1e-2, lambda t: 1e-12, eps_grid=[0.1, 0.05])
    assert res.table[1e-2] is None and res.failures
