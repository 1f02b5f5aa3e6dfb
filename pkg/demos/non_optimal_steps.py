"""Admissible steps with a budget that does not vanish.

For x^2 / 2 from u0 = 0 the true flow stays at 0.  The steps
u_n = n tau / (1 + tau)^(n - 1) pass the relaxed inequality with budget
tau, yet their interpolants converge to t exp(-t), which fails the
energy dissipation inequality.
"""

import math

from gammaflow import zoo
from gammaflow.core import CouplingSchedule, ErrorSchedule, Point
from gammaflow.diagnostics import edi_residual
from gammaflow.scheme import RecoveryData, run_refinement


def main():
    fam = zoo.quadratic_reference().family
    trajs, summary = run_refinement(
        fam, CouplingSchedule.constant(1.0), ErrorSchedule.uniform(lambda tau: 1.0), RecoveryData.constant(0.0),
        [1e-1, 1e-2, 1e-3], 3.0, probe_times=[0.5, 1.0, 2.0, 3.0],
        selector=lambda tau, n, u: zoo.counterexample_selector(tau)(tau, n, u))
    for t, v in zip(summary.probe_times, summary.limit_estimate[:, 0]):
        print(f"t = {t:.1f}: u_tau(t) = {v:.5f}   t exp(-t) = {t * math.exp(-t):.5f}")
    r = edi_residual(lambda t: Point.of(t * math.exp(-t)), fam.limit, fam.limit_slope, 0.0, 1.0, 1e-3)
    print(f"energy dissipation residual on [0, 1]: {r:.4f} (negative: not a curve of maximal slope)")


if __name__ == "__main__":
    main()
