"""Relaxed minimizing-movement driver.

A run fixes ``tau``, the coupled ``eps = eps(tau)`` and the member
``phi_eps``, then performs ``N = ceil(T / tau)`` relaxed steps

    phi_eps(u_n) + d(u_n, u_{n-1})^2 / (2 tau) <= Y_tau phi_eps(u_{n-1}) + budget_n

starting from recovery data ``u_0 = initial_for(tau)``.  Steps are either
generated by the certified inner solver or supplied by an external selector
and validated.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import (
    CouplingSchedule,
    DivergedTrajectory,
    ErrorSchedule,
    FunctionalFamily,
    InfiniteValue,
    Point,
    RelaxedInequalityViolation,
    TauTooLarge,
    as_point,
    distance,
)
from .prox import InnerSolverConfig, check_relaxed_inequality, moreau_yosida, relaxed_step_result

Selector = Callable[[float, int, Point], Point]


def step_count(horizon: float, tau: float) -> int:
    """``ceil(horizon / tau)``, robust to representation error in the ratio."""
    r = horizon / tau
    k = round(r)
    if abs(r - k) <= 1e-9 * max(1.0, r):
        return int(k)
    return int(math.ceil(r))


@dataclass(frozen=True)
class RecoveryData:
    """Initial data ``tau -> u_tau^0`` approximating ``limit_point``."""

    initial_for: Callable[[float], Point]
    limit_point: Point

    @classmethod
    def constant(cls, u0) -> "RecoveryData":
        p = as_point(u0)
        return cls(lambda tau: p, p)

    def __call__(self, tau: float) -> Point:
        return as_point(self.initial_for(tau))

    def check(self, family: FunctionalFamily, coupling: CouplingSchedule, taus: Sequence[float]) -> dict:
        """Distances to the limit point and energy errors along ``taus``."""
        taus = sorted(taus, reverse=True)
        dists = [distance(self(t), self.limit_point) for t in taus]
        limit_energy = family.limit(self.limit_point)
        errs = [abs(family.member(coupling(t))(self(t)) - limit_energy) for t in taus]
        return {"taus": taus, "distances": dists, "energy_errors": errs,
                "bounded": bool(np.all(np.isfinite(dists))),
                "energy_converging": errs[-1] <= errs[0]}


@dataclass(frozen=True)
class Trajectory:
    """Discrete values ``u_tau^n``, ``n = 1..N``, of one relaxed run.

    ``values`` has shape ``(N, d)``; ``step_speeds[j] = d(u_{j+1}, u_j) / tau``
    with ``u_0`` the initial point.  ``prox_values`` and ``gaps`` are the inner
    solver's step values and certified gaps (NaN when a selector was used
    without a reference solve).
    """

    tau: float
    epsilon: float
    initial: Point
    horizon: float
    values: np.ndarray
    step_speeds: np.ndarray
    energies: np.ndarray
    initial_energy: float
    budgets: np.ndarray
    gaps: np.ndarray
    prox_values: np.ndarray = field(repr=False)

    @property
    def n_steps(self) -> int:
        return len(self.values)

    @property
    def points(self) -> list:
        return [Point(tuple(row)) for row in self.values]

    @property
    def times(self) -> np.ndarray:
        return self.tau * np.arange(1, self.n_steps + 1)

    @property
    def final(self) -> Point:
        return Point(tuple(self.values[-1]))

    def index_at(self, t: float) -> int:
        """Step index ``n`` with ``t`` in ``((n-1) tau, n tau]``; 0 at ``t = 0``."""
        if t < 0:
            raise ValueError("negative time")
        if t == 0:
            return 0
        return min(step_count(t, self.tau), self.n_steps)

    def eval(self, t: float) -> Point:
        """Piecewise-constant interpolant."""
        n = self.index_at(t)
        return self.initial if n == 0 else Point(tuple(self.values[n - 1]))

    def displacement_sums(self) -> np.ndarray:
        """Cumulative ``sum_j d(u_j, u_{j-1})^2 / (2 tau)``."""
        return np.cumsum(self.tau * self.step_speeds ** 2 / 2.0)

    def path(self) -> np.ndarray:
        """All points including the initial one, shape ``(N + 1, d)``."""
        return np.vstack([self.initial.array[None, :], self.values])


def _check_tau(family: FunctionalFamily, tau: float):
    if not tau > 0:
        raise ValueError("tau must be positive")
    if 2.0 * tau * family.certificate.B >= 1.0:
        raise TauTooLarge(f"2*tau*B = {2 * tau * family.certificate.B:g} >= 1")


def gronwall_bound(family: FunctionalFamily, recovery: RecoveryData, tau: float, horizon: float,
                   coupling: CouplingSchedule, errors: ErrorSchedule) -> float:
    """A-priori bound ``C`` with ``d(u_tau^n, u_star)^2 <= C`` for ``n tau <= horizon``.

    With ``B > 0`` the discrete Gronwall lemma is applied to

        a_n <= 2 d0^2 + (phi0 + A + G) / B + 8 B sum_j tau a_j,

    which needs ``8 B tau < 1``.  With ``B = 0`` the energy estimate and
    Cauchy-Schwarz give ``d(u_n, u_star) <= d0 + sqrt(2 n tau (phi0 + A + G))``.
    Here ``G`` is the total error budget over the horizon.
    """
    cert = family.certificate
    u0 = recovery(tau)
    phi0 = family.member(coupling(tau))(u0)
    if math.isinf(phi0):
        raise InfiniteValue("initial energy is infinite")
    n = step_count(horizon, tau)
    total = errors.total(tau, n)
    d0 = distance(u0, cert.u_star)
    if cert.B == 0:
        energy = max(phi0 + cert.A + total, 0.0)
        return (d0 + math.sqrt(2.0 * n * tau * energy)) ** 2
    alpha = 8.0 * cert.B
    m = alpha * tau
    if m >= 1.0:
        raise TauTooLarge(f"Gronwall bound needs 8*B*tau < 1, got {m:g}")
    a1 = 2.0 * d0 * d0 + (phi0 + cert.A + total) / cert.B
    return a1 / (1.0 - m) * math.exp(alpha / (1.0 - m) * (n - 1) * tau)


def run_single(family: FunctionalFamily, coupling: CouplingSchedule, errors: ErrorSchedule,
               recovery: RecoveryData, tau: float, horizon: float,
               cfg: Optional[InnerSolverConfig] = None, selector: Optional[Selector] = None,
               divergence_factor: float = 1e3) -> Trajectory:
    """Run the relaxed scheme for one time step.

    Parameters
    ----------
    selector : callable, optional
        ``selector(tau, n, u_prev) -> Point``.  Each proposed step is checked
        against a certified envelope value and must hold.

    Raises
    ------
    TauTooLarge, BudgetTooTight, InfiniteValue
    RelaxedInequalityViolation
        When a selector's step is not certified admissible.
    DivergedTrajectory
        When ``d(u_n, u_star)^2`` exceeds ``divergence_factor`` times the Gronwall bound.
    """
    cfg = cfg or InnerSolverConfig()
    _check_tau(family, tau)
    eps = coupling(tau)
    f = family.member(eps)
    cert = family.certificate
    u = recovery(tau)
    e_prev = f(u)
    if math.isinf(e_prev):
        raise InfiniteValue(f"initial energy is infinite at {u!r}")
    n_steps = step_count(horizon, tau)
    try:
        bound = gronwall_bound(family, recovery, tau, horizon, coupling, errors)
    except TauTooLarge:
        bound = math.inf
    limit = divergence_factor * max(bound, np.finfo(float).tiny)

    d = u.dim
    values = np.empty((n_steps, d))
    speeds = np.empty(n_steps)
    energies = np.empty(n_steps)
    budgets = np.empty(n_steps)
    gaps = np.empty(n_steps)
    proxv = np.empty(n_steps)
    initial, e0 = u, e_prev
    for n in range(1, n_steps + 1):
        budget = errors.budget(tau, n)
        if selector is None:
            res = relaxed_step_result(f, cert, tau, u, budget, cfg)
            v = res.minimizer
        else:
            v = as_point(selector(tau, n, u))
            res = moreau_yosida(f, cert, tau, u, cfg)
            verdict = check_relaxed_inequality(f, tau, u, v, budget, res)
            if not verdict.holds:
                raise RelaxedInequalityViolation(f"step {n} at tau={tau:g}: {verdict}")
        e = f(v)
        step = distance(v, u)
        if distance(v, cert.u_star) ** 2 > limit:
            raise DivergedTrajectory(f"step {n}: left the Gronwall ball (C = {bound:.3g})")
        values[n - 1] = v.array
        speeds[n - 1] = step / tau
        energies[n - 1] = e
        budgets[n - 1] = budget
        gaps[n - 1] = res.certified_gap
        proxv[n - 1] = res.value
        u = v
    return Trajectory(tau, eps, initial, horizon, values, speeds, energies, e0, budgets, gaps, proxv)


def check_invariants(traj: Trajectory, bound: Optional[float] = None, u_star: Optional[Point] = None,
                     samples: int = 200, seed: int = 0) -> list:
    """A-priori estimates of the scheme; returns a list of violation messages.

    * energy quasi-monotonicity, exactly;
    * displacement sums against the energy drop plus budgets;
    * containment in the Gronwall ball (when ``bound`` is given);
    * interpolant increments against integrated step speeds.
    """
    out = []
    e = np.concatenate(([traj.initial_energy], traj.energies))
    bad = np.flatnonzero(e[1:] > e[:-1] + traj.budgets)
    if len(bad):
        out.append(f"energy quasi-monotonicity fails at steps {list(bad[:5] + 1)}")
    disp = traj.displacement_sums()
    rhs = traj.initial_energy - traj.energies + np.cumsum(traj.budgets)
    slack = 64 * np.finfo(float).eps * (np.abs(traj.initial_energy) + np.cumsum(np.abs(np.diff(e)) + traj.budgets)
                                        + np.arange(1, traj.n_steps + 1))
    bad = np.flatnonzero(disp > rhs + slack)
    if len(bad):
        out.append(f"displacement-sum estimate fails at steps {list(bad[:5] + 1)}")
    if bound is not None:
        c = (u_star or Point((0.0,) * traj.values.shape[1])).array
        d2 = np.sum((traj.path() - c) ** 2, axis=1)
        if np.any(d2 > bound):
            out.append(f"Gronwall containment fails: max d^2 = {d2.max():.6g} > C = {bound:.6g}")
    rng = np.random.default_rng(seed)
    T = traj.n_steps * traj.tau
    path = traj.path()
    cum = np.concatenate(([0.0], np.cumsum(traj.step_speeds * traj.tau)))
    for s, t in np.sort(rng.uniform(0, T, size=(samples, 2)), axis=1):
        i, j = traj.index_at(s), traj.index_at(t)
        lhs = float(np.linalg.norm(path[j] - path[i]))
        # integral of the step speeds over [s, t + tau] covers steps i+1..j
        rhs_t = cum[j] - cum[i]
        if lhs > rhs_t * (1 + 1e-12) + 1e-15:
            out.append(f"interpolant increment exceeds speed integral on [{s:.6g}, {t:.6g}]")
            break
    return out


@dataclass(frozen=True)
class ConvergenceSummary:
    """Behavior of ``u_tau(t)`` across a decreasing ``tau`` sequence.

    Attributes
    ----------
    probe_values : ndarray, shape (K, P, d)
        Interpolant values at the probe times for each ``tau``.
    successive_distances : ndarray, shape (K - 1, P)
    distance_ratios : ndarray, shape (K - 2, P)
        Ratios of consecutive successive distances; about ``tau_k / tau_{k+1}``
        for a first-order scheme.
    limit_estimate : ndarray, shape (P, d)
        Values at the smallest ``tau``.
    extrapolated : ndarray, shape (P, d)
        First-order Richardson extrapolation from the two smallest ``tau``.
    displacement_sums : list of float
        Total ``sum d^2 / (2 tau)`` per trajectory.
    cauchy : list of bool
        Per probe time, whether successive distances decrease.
    """

    taus: tuple
    probe_times: tuple
    probe_values: np.ndarray
    successive_distances: np.ndarray
    distance_ratios: np.ndarray
    limit_estimate: np.ndarray
    extrapolated: np.ndarray
    displacement_sums: list
    cauchy: list

    def as_dict(self) -> dict:
        return {
            "taus": list(self.taus),
            "probe_times": list(self.probe_times),
            "probe_values": self.probe_values.tolist(),
            "successive_distances": self.successive_distances.tolist(),
            "distance_ratios": self.distance_ratios.tolist(),
            "limit_estimate": self.limit_estimate.tolist(),
            "extrapolated": self.extrapolated.tolist(),
            "displacement_sums": list(self.displacement_sums),
            "cauchy": list(self.cauchy),
        }


def summarize(trajectories: Sequence[Trajectory], probe_times: Sequence[float]) -> ConvergenceSummary:
    taus = tuple(t.tau for t in trajectories)
    pv = np.array([[tr.eval(t).array for t in probe_times] for tr in trajectories])
    dist = np.linalg.norm(np.diff(pv, axis=0), axis=2) if len(pv) > 1 else np.zeros((0, len(probe_times)))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = dist[:-1] / dist[1:] if len(dist) > 1 else np.zeros((0, len(probe_times)))
    limit = pv[-1]
    if len(pv) > 1:
        t1, t2 = taus[-2], taus[-1]
        extrap = pv[-1] + (pv[-1] - pv[-2]) * t2 / (t1 - t2)
    else:
        extrap = pv[-1].copy()
    sums = [float(tr.displacement_sums()[-1]) for tr in trajectories]
    cauchy = [bool(np.all(np.diff(dist[:, p]) <= 0)) for p in range(len(probe_times))]
    return ConvergenceSummary(taus, tuple(probe_times), pv, dist, ratios, limit, extrap, sums, cauchy)


def run_refinement(family: FunctionalFamily, coupling: CouplingSchedule, errors: ErrorSchedule,
                   recovery: RecoveryData, tau_list: Sequence[float], horizon: float,
                   cfg: Optional[InnerSolverConfig] = None, probe_times: Sequence[float] = (),
                   selector: Optional[Selector] = None, jobs: int = 1):
    """Run the scheme along a strictly decreasing ``tau_list``.

    Returns
    -------
    trajectories : list of Trajectory
    summary : ConvergenceSummary
        Reported, not asserted: only subsequential convergence is guaranteed.
    """
    taus = list(tau_list)
    if not taus or any(b >= a for a, b in zip(taus, taus[1:])):
        raise ValueError("tau_list must be nonempty and strictly decreasing")
    probe_times = tuple(probe_times) or (horizon,)
    if any(t < 0 or t > horizon for t in probe_times):
        raise ValueError("probe times must lie in [0, horizon]")

    def one(tau):
        return run_single(family, coupling, errors, recovery, tau, horizon, cfg, selector)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            trajs = list(ex.map(one, taus))
    else:
        trajs = [one(t) for t in taus]
    return trajs, summarize(trajs, probe_times)
