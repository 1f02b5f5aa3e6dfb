"""Gamma distance of oscillating wells to their limit, and the eps-schedule search.

With amplitude rho_eps = eps the members approach x^2 in the Gamma
metric.  The schedule search then picks, for each tau, the largest sampled
eps whose auxiliary functional is within theta(tau) of its limit.
"""

from gammaflow import zoo
from gammaflow.diagnostics import epsilon_schedule_search, gamma_delta


def main():
    fam = zoo.named_oscillatory(rho_exponent=1.0).family
    for eps in (1e-1, 1e-2, 1e-3):
        d = gamma_delta(fam.member(eps), fam.limit)
        print(f"eps = {eps:g}: delta = {d.value:.3e} (gap {d.gap:.1e}, truncation {d.truncation_bound:.1e})")
    res = epsilon_schedule_search(zoo.named_oscillatory().family, [1e-1, 1e-2], 1e-2, lambda tau: tau,
                                  eps_grid=[1e-1, 10 ** -1.5, 1e-2, 10 ** -2.5])
    for tau, eps in res.table.items():
        print(f"tau = {tau:g}: eps_tau = {eps}")


if __name__ == "__main__":
    main()
