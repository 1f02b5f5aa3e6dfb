"""End-to-end acceptance checks.

Each test prints one ``criterion N: PASS|FAIL`` line (visible with ``pytest -v``
output) and then asserts.  Tolerances and runtime limits are the contract
values; nothing here is tuned to make a check pass.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from gammaflow import zoo
from gammaflow.cli import execute, load_config
from gammaflow.core import CouplingSchedule, ErrorSchedule, Point
from gammaflow.diagnostics import crucial_assumption_probe, de_giorgi_ratio, edi_residual, gamma_delta
from gammaflow.prox import check_relaxed_inequality, moreau_yosida
from gammaflow.scheme import RecoveryData, run_single

ROOT = Path(__file__).resolve().parents[1]
QUAD = zoo.quadratic_reference().family
ONE = CouplingSchedule.constant(1.0)
UNI = ErrorSchedule.uniform()
FAST = CouplingSchedule.power(1.0, 2.0)
SLOW = CouplingSchedule.power(1.0, 0.5)


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail, elapsed, limit):
        ok = bool(ok) and elapsed < limit
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.2f}s < {limit:g}s]")
        return ok
    return emit


def test_criterion_1_moreau_yosida_closed_form(report):
    t0 = time.perf_counter()
    worst_v = worst_x = 0.0
    for u in (-2.0, 1.0, 3.0):
        for tau in (1.0, 0.1, 0.01):
            r = moreau_yosida(QUAD.limit, QUAD.certificate, tau, u)
            worst_v = max(worst_v, abs(r.value - u * u / (2 * (1 + tau))))
            worst_x = max(worst_x, abs(float(r.minimizer) - u / (1 + tau)))
    dt = time.perf_counter() - t0
    ok = worst_v <= 1e-8 and worst_x <= 1e-6
    assert report(1, ok, f"max value error {worst_v:.2e}, max minimizer error {worst_x:.2e}", dt, 1.0)


def test_criterion_2_ratio_law(report):
    t0 = time.perf_counter()
    taus = [1e-1, 1e-2, 1e-3, 1e-4]
    rs = [de_giorgi_ratio(QUAD, ONE, t, 1.0) for t in taus]
    match = all(abs(r.ratio - 1 / (2 * (1 + t))) <= r.gap for r, t in zip(rs, taus))
    bound = all(r.ratio >= 0.5 - 0.5 * t - r.gap for r, t in zip(rs, taus))
    tail = rs[-1].ratio
    dt = time.perf_counter() - t0
    ok = match and bound and tail >= 0.4999
    assert report(2, ok, f"ratios {[round(r.ratio, 6) for r in rs]}, closed form matched={match}, "
                         f"tail {tail:.6f} >= 0.4999", dt, 5.0)


def test_criterion_3_scheme_vs_flow(report):
    t0 = time.perf_counter()
    tr = run_single(QUAD, ONE, UNI, RecoveryData.constant(1.0), 1e-3, 1.0)
    err = abs(float(tr.eval(1.0)) - math.exp(-1))
    dt = time.perf_counter() - t0
    assert report(3, err <= 5e-3, f"|u(1) - exp(-1)| = {err:.2e}", dt, 30.0)


def test_criterion_4_optimality_counterexample(report):
    t0 = time.perf_counter()
    all_hold = True
    for tau in (0.25, 1e-2, 1e-3):
        n_max = int(round(4 / tau))
        seq = zoo.counterexample_sequence(tau, n_max)
        for n in range(1, n_max + 1):
            res = moreau_yosida(QUAD.limit, QUAD.certificate, tau, seq[n - 1])
            if not check_relaxed_inequality(QUAD.limit, tau, seq[n - 1], seq[n], tau, res).holds:
                all_hold = False
    tau = 1e-3
    seq = zoo.counterexample_sequence(tau, 4000)
    at_one = seq[int(round(1 / tau))]
    # the interpolant is seq[n] on ((n-1) tau, n tau]; sample both ends and the inside of every interval
    n = np.arange(1, 4001)
    sup = 0.0
    for frac in np.linspace(0.0, 1.0, 11):
        t = (n - 1 + frac) * tau
        sup = max(sup, float(np.max(np.abs(seq[n] - zoo.counterexample_limit(t)))))
    res = edi_residual(lambda t: Point.of(float(zoo.counterexample_limit(t))), QUAD.limit, QUAD.limit_slope,
                       0.0, 1.0, 1e-3)
    dt = time.perf_counter() - t0
    ok = all_hold and abs(at_one - math.exp(-1)) <= 2e-2 and sup <= 2e-2 and abs(at_one - 0.0) >= 0.3 and res <= -0.1
    assert report(4, ok, f"checker holds={all_hold}, u(1)={at_one:.5f}, sup dist={sup:.2e}, EDI residual={res:.4f}",
                  dt, 10.0)


@pytest.fixture(scope="module")
def pinning_runs():
    spec = zoo.named_oscillatory(rho_exponent=0.5)
    runs, times = {}, {}
    for label, cpl in (("fast", FAST), ("slow", SLOW)):
        rec = spec.recovery(1.0, cpl)
        t0 = time.perf_counter()
        runs[label, 1e-4] = run_single(spec.family, cpl, UNI, rec, 1e-4, 1.0)
        times[label] = time.perf_counter() - t0
    t0 = time.perf_counter()
    for tau in (1e-2, 1e-3):
        runs["slow", tau] = run_single(spec.family, SLOW, UNI, spec.recovery(1.0, SLOW), tau, 1.0)
    times["slow_extra"] = time.perf_counter() - t0
    return spec, runs, times


def test_criterion_5_pinning_dichotomy(report, pinning_runs):
    spec, runs, times = pinning_runs
    target = math.exp(-2)
    fast = float(runs["fast", 1e-4].final)
    slow = float(runs["slow", 1e-4].final)
    ok = abs(fast - target) <= 2e-2 and abs(slow - target) >= 0.1
    dt = times["fast"] + times["slow"]
    assert report(5, ok, f"eps=tau^2 final {fast:.5f} (|.-e^-2|={abs(fast - target):.2e}), "
                         f"eps=sqrt(tau) final {slow:.5f} (|.-e^-2|={abs(slow - target):.3f})", dt, 600.0)


def test_criterion_6_crucial_assumption_probe(report, pinning_runs):
    spec, runs, _ = pinning_runs
    taus = [1e-2, 1e-3, 1e-4]
    t0 = time.perf_counter()
    fast = crucial_assumption_probe(spec.family, FAST, spec.recovery(1.0, FAST), taus, limit_point=Point.of(1.0))
    slow = crucial_assumption_probe(spec.family, SLOW, lambda tau: runs["slow", tau].final, taus,
                                    limit_point=Point.of(1.0))
    dt = time.perf_counter() - t0
    ok = fast.target == 2.0 and fast.verdict == "satisfied" and slow.verdict == "violated"
    assert report(6, ok, f"eps=tau^2: {fast.verdict} (liminf {fast.liminf_estimate:.4f}), "
                         f"eps=sqrt(tau): {slow.verdict} (liminf {slow.liminf_estimate:.4f})", dt, 120.0)


def test_criterion_7_gamma_metric(report):
    t0 = time.perf_counter()
    fam = zoo.named_oscillatory(rho_exponent=1.0).family
    f, g = fam.member(0.1), fam.limit
    zero = gamma_delta(f, f).value
    sym = gamma_delta(f, g).value == gamma_delta(g, f).value
    ds = [gamma_delta(fam.member(e), fam.limit).value for e in (1e-1, 1e-2, 1e-3)]
    dt = time.perf_counter() - t0
    ok = zero == 0.0 and sym and ds[0] > ds[1] > ds[2] and ds[2] < 1e-2
    assert report(7, ok, f"delta(f,f)={zero}, symmetric={sym}, deltas={[f'{d:.2e}' for d in ds]}", dt, 120.0)


def test_criterion_8_grid_discretization(report):
    t0 = time.perf_counter()
    spec = zoo.named_grid_restricted("half_quadratic")
    tr = run_single(spec.family, FAST, UNI, spec.recovery(1.0, FAST), 1e-3, 1.0)
    err = abs(float(tr.final) - math.exp(-1))
    dt = time.perf_counter() - t0
    assert report(8, err <= 1e-2, f"|u(1) - exp(-1)| = {err:.2e}", dt, 60.0)


def test_criterion_9_invariant_suite(report, tmp_path):
    t0 = time.perf_counter()
    problems = []
    configs = sorted((ROOT / "configs").glob("*.cfg"))
    for path in configs:
        cfg = load_config(str(path))
        summary = execute(cfg, str(tmp_path / path.stem), jobs=1)
        for run in summary["runs"]:
            if run["invariant_violations"]:
                problems.append(f"{path.stem} tau={run['tau']}: {run['invariant_violations']}")
            if not run["max_observed_d2"] <= run["gronwall_bound"]:
                problems.append(f"{path.stem} tau={run['tau']}: outside the Gronwall ball")
        fam = cfg.spec().family
        coupling = cfg.coupling_schedule()
        eps = sorted({coupling(t) for t in cfg.tau_list})
        if fam.spot_check(eps, n=1000, seed=cfg.seed):
            problems.append(f"{path.stem}: coercivity spot-check")
        u0 = cfg.recovery_data()(cfg.tau_list[-1])
        for e in eps:
            f = fam.member(e)
            vals = [moreau_yosida(f, fam.certificate, t, u0) for t in sorted(cfg.tau_list)]
            for a, b in zip(vals, vals[1:]):
                if a.value + a.certified_gap < b.value - b.certified_gap:
                    problems.append(f"{path.stem}: envelope not monotone in tau at eps={e:g}")
    dt = time.perf_counter() - t0
    assert report(9, not problems, f"{len(configs)} configs, violations: {problems or 'none'}", dt, 300.0)
