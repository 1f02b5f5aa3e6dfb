import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gammaflow import zoo
from gammaflow.core import (
    CoercivityCertificate,
    CouplingSchedule,
    ErrorSchedule,
    Functional,
    InfiniteValue,
    InvalidValue,
    Point,
    TauTooLarge,
    as_point,
    distance,
    prox_search_radius,
)

HALF = Functional(lambda x: 0.5 * x * x, domain_hint=(-10.0, 10.0), derivative=lambda x: x)
ZERO_CERT = CoercivityCertificate(0.0, 0.0, Point.of(0.0))


def test_point_rejects_nonfinite():
    with pytest.raises(ValueError):
        Point.of(float("nan"))
    with pytest.raises(ValueError):
        Point.of(1.0, float("inf"))


def test_point_equality_and_hash_follow_coordinates():
    a, b = Point.of(1.0, 2.0), Point((1.0, 2.0))
    assert a == b and hash(a) == hash(b)
    assert len({a, b, Point.of(1.0, 2.5)}) == 2
    assert Point.of(0.0, 5.0) < Point.of(1.0, -5.0)


def test_distance_is_euclidean():
    assert distance(Point.of(0.0, 0.0), Point.of(3.0, 4.0)) == 5.0
    assert as_point(2.0) == Point.of(2.0)


def test_functional_rejects_minus_infinity_and_nan():
    f = Functional(lambda x: -np.inf * np.ones_like(x))
    with pytest.warns(UserWarning):
        f.box()
    with pytest.raises(InvalidValue):
        f(0.0)
    g = Functional(lambda x: np.full_like(x, np.nan), domain_hint=(-1, 1))
    with pytest.raises(InvalidValue):
        g(0.0)


def test_functional_allows_plus_infinity():
    f = Functional(lambda x: np.where(x == 0, np.inf, x * x), domain_hint=(-1, 1))
    assert f(0.0) == math.inf and f(0.5) == 0.25


def test_default_box_warns():
    f = Functional(lambda x: x * x)
    with pytest.warns(UserWarning):
        lo, hi = f.box()
    assert lo[0] == -1e10 and hi[0] == 1e10


def test_search_radius_degenerate_certificate():
    assert prox_search_radius(HALF, ZERO_CERT, 0.1, 1.0) == pytest.approx(math.sqrt(0.1), rel=1e-15)


def test_search_radius_errors():
    with pytest.raises(TauTooLarge):
        prox_search_radius(HALF, CoercivityCertificate(0.0, 1.0, Point.of(0.0)), 0.5, 1.0)
    f = Functional(lambda x: np.where(x == 0, np.inf, x * x), domain_hint=(-1, 1))
    with pytest.raises(InfiniteValue):
        prox_search_radius(f, ZERO_CERT, 0.1, 0.0)


def test_search_radius_contains_oscillatory_argmin():
    f = Functional(lambda x: x * x + 0.1 * np.cos(x / 0.01) ** 2, domain_hint=(-10, 10))
    tau, u = 0.05, 2.0
    R = prox_search_radius(f, ZERO_CERT, tau, u)
    xs = np.arange(u - 5.0, u + 5.0, 1e-6)
    obj = f.values(xs) + (xs - u) ** 2 / (2 * tau)
    assert abs(xs[np.argmin(obj)] - u) <= R


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-4, 0.2), st.floats(1e-4, 0.2), st.floats(-5, 5), st.floats(0, 0.3), st.floats(0, 1))
def test_search_radius_monotone(t1, t2, u, A, B):
    cert = CoercivityCertificate(A, B, Point.of(0.0))
    lo, hi = sorted((t1, t2))
    assert prox_search_radius(HALF, cert, lo, u) <= prox_search_radius(HALF, cert, hi, u)
    shifted = Functional(lambda x: 0.5 * x * x + 1.0, domain_hint=(-10, 10))
    assert prox_search_radius(HALF, cert, lo, u) <= prox_search_radius(shifted, cert, lo, u)


def test_coupling_schedules():
    assert CouplingSchedule.power(2.0, 2.0)(0.1) == pytest.approx(0.02)
    assert CouplingSchedule.constant(0.3)(1e-5) == 0.3
    table = CouplingSchedule.from_table({0.1: 0.01, 0.01: 0.001})
    assert table(0.01) == 0.001
    with pytest.raises(ValueError):
        CouplingSchedule.power(0.0, 1.0)


def test_error_schedules():
    uni = ErrorSchedule.uniform()
    assert uni.budget(0.01, 5) == pytest.approx(1e-4)
    assert uni.total(0.01, 100) == pytest.approx(1e-2)
    assert uni.vanishes_on([0.1, 0.01, 0.001])
    assert not ErrorSchedule.uniform(lambda t: 1.0).vanishes_on([0.1, 0.01])
    per = ErrorSchedule.per_step(lambda tau, n: tau * tau / n)
    assert per.budget(0.1, 2) == pytest.approx(0.005)
    assert per.vanishes_on([0.1, 0.01, 0.001])


@pytest.mark.parametrize("name", sorted(zoo.REGISTRY))
def test_registry_families_pass_coercivity_spot_check(name):
    fam = zoo.build(name).family
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert fam.spot_check([1.0, 0.1, 0.01, 1e-3], n=1000, seed=1) == []


def test_certificate_flags_violations():
    cert = CoercivityCertificate(0.0, 0.0, Point.of(0.0))
    f = Functional(lambda x: x - 1.0, domain_hint=(-1, 1))
    bad = cert.violations(f, np.linspace(-1, 1, 11))
    assert len(bad) > 0
