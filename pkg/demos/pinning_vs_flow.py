"""Oscillating wells x^2 + sqrt(eps) cos^2(x / eps) under two couplings.

With eps = tau^2 the wells are finer than a time step and the discrete
curve follows u' = -2u.  With eps = sqrt(tau) every step lands in a
nearby well and the curve barely moves.

Run with ``python3 demos/pinning_vs_flow.py [tau]``.
"""

import math
import sys

from gammaflow import zoo
from gammaflow.core import CouplingSchedule, ErrorSchedule, Point
from gammaflow.diagnostics import crucial_assumption_probe
from gammaflow.scheme import run_single


def main(tau=1e-3):
    spec = zoo.named_oscillatory()
    errors = ErrorSchedule.uniform()
    print(f"tau = {tau:g}, exact flow at t=1: {math.exp(-2):.5f}")
    for label, cpl in (("eps = tau^2", CouplingSchedule.power(1.0, 2.0)),
                       ("eps = sqrt(tau)", CouplingSchedule.power(1.0, 0.5))):
        tr = run_single(spec.family, cpl, errors, spec.recovery(1.0, cpl), tau, 1.0)
        print(f"{label:>16}: u(1) = {float(tr.final):.5f}  energy {tr.initial_energy:.4f} -> {tr.energies[-1]:.4f}")
        for t in (0.25, 0.5, 0.75):
            print(f"{'':>18}u({t}) = {float(tr.eval(t)):.5f}")
    taus = [1e-2, 1e-3, 1e-4]
    cpl = CouplingSchedule.power(1.0, 2.0)
    rep = crucial_assumption_probe(spec.family, cpl, spec.recovery(1.0, cpl), taus, limit_point=Point.of(1.0))
    print(f"probe with eps = tau^2 at u = 1: {rep.verdict}, ratios {[round(v, 4) for v in rep.values]}")


if __name__ == "__main__":
    main(float(sys.argv[1]) if len(sys.argv) > 1 else 1e-3)
