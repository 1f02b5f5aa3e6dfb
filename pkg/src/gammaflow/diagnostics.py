"""Numerical probes: slopes, De Giorgi ratios, energy dissipation and the Gamma metric.

Every probe returns a small report object with a ``verdict``.  A probe only
sees the sequences it is handed, so ``violated`` is conclusive while
``satisfied`` is evidence; reports carry that label in ``conclusive``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from .core import (
    CoercivityCertificate,
    CouplingSchedule,
    Functional,
    FunctionalFamily,
    InfiniteValue,
    MissingAnalyticSlope,
    NoAdmissibleEpsilon,
    Point,
    as_point,
)
from .prox import InnerSolverConfig, moreau_envelope_grid, moreau_yosida


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


# ---------------------------------------------------------------- slopes


@dataclass(frozen=True)
class SlopeEstimate:
    point: Point
    local_slope: float
    method: str
    detail: dict = field(default_factory=dict, compare=False)


def local_slope(f: Functional, u, method: str = "analytic", h: float = 1e-6,
                radii: Optional[Sequence[float]] = None, directions: int = 16, seed: int = 0) -> SlopeEstimate:
    """Estimate the local slope ``limsup (f(u) - f(w))^+ / d(u, w)``.

    Parameters
    ----------
    method : {"analytic", "finite_difference", "descent_probe"}
        ``analytic`` needs ``f.derivative`` and returns the gradient norm.
        ``finite_difference`` uses central differences with step ``h``.
        ``descent_probe`` takes the largest descent quotient over sampled
        points on spheres of the given radii.
    """
    u = as_point(u)
    fu = f(u)
    if math.isinf(fu):
        raise InfiniteValue(f"f(u) = +inf at {u!r}")
    if method == "analytic":
        return SlopeEstimate(u, float(np.linalg.norm(f.grad(u))), "analytic")
    if method == "finite_difference":
        x = u.array
        grad = np.empty(u.dim)
        for i in range(u.dim):
            e = np.zeros(u.dim)
            e[i] = h
            grad[i] = (f(x + e) - f(x - e)) / (2.0 * h)
        return SlopeEstimate(u, float(np.linalg.norm(grad)), f"finite_difference({h:g})", {"h": h})
    if method == "descent_probe":
        radii = list(radii) if radii is not None else [1e-3 * 2.0 ** -k for k in range(10)]
        if u.dim == 1:
            dirs = np.array([[-1.0], [1.0]])
        else:
            rng = np.random.default_rng(seed)
            dirs = rng.normal(size=(directions, u.dim))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        per = []
        for r in radii:
            vals = [max(fu - f(u.array + r * dvec), 0.0) / r for dvec in dirs]
            per.append(max(vals))
        return SlopeEstimate(u, float(max(per)), "descent_probe", {"radii": radii, "quotients": per})
    raise ValueError(f"unknown slope method {method!r}")


# ---------------------------------------------------------------- De Giorgi ratio


@dataclass(frozen=True)
class DeGiorgiRatio:
    """``(phi_eps(u) - Y_tau phi_eps(u)) / tau`` with its certified uncertainty ``gap``."""

    tau: float
    epsilon: float
    point: Point
    ratio: float
    gap: float


def de_giorgi_ratio(family: FunctionalFamily, coupling: CouplingSchedule, tau: float, u,
                    cfg: Optional[InnerSolverConfig] = None) -> DeGiorgiRatio:
    eps = coupling(tau)
    f = family.member(eps)
    u = as_point(u)
    fu = f(u)
    if math.isinf(fu):
        raise InfiniteValue(f"member energy is infinite at {u!r}")
    res = moreau_yosida(f, family.certificate, tau, u, cfg)
    # value is an upper bound of the envelope, so this ratio is a lower estimate
    return DeGiorgiRatio(tau, eps, u, (fu - res.value) / tau, res.certified_gap / tau)


def _tail(keys: Sequence[float], n: int) -> np.ndarray:
    order = np.argsort(keys)
    return order[:n]


def _verdict(estimate: float, target: float, tolerance: float, allowance: float) -> str:
    threshold = target - allowance
    if not (math.isfinite(estimate) and math.isfinite(tolerance)):
        return "inconclusive"
    if estimate - tolerance >= threshold:
        return "satisfied"
    if estimate + tolerance < threshold:
        return "violated"
    return "inconclusive"


@dataclass(frozen=True)
class ProbeReport:
    """Outcome of a liminf probe.

    ``tolerance`` covers certified numerical uncertainty; ``allowance`` is
    the discretization slack granted to the tail (see the probe docs).
    """

    kind: str
    parameters: list
    points: list
    values: list
    gaps: list
    liminf_estimate: float
    target: float
    tolerance: float
    allowance: float
    verdict: str
    extra: dict = field(default_factory=dict)

    @property
    def conclusive(self) -> bool:
        return self.verdict == "violated"

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "parameters": [_json_float(p) for p in self.parameters],
            "points": [list(p.coords) for p in self.points],
            "values": [_json_float(v) for v in self.values],
            "gaps": [_json_float(g) for g in self.gaps],
            "liminf_estimate": _json_float(self.liminf_estimate),
            "target": _json_float(self.target),
            "tolerance": _json_float(self.tolerance),
            "allowance": _json_float(self.allowance),
            "verdict": self.verdict,
            "conclusive": self.conclusive,
            "label": "conclusive" if self.conclusive else "evidence only",
            "extra": self.extra,
        }


def crucial_assumption_probe(family: FunctionalFamily, coupling: CouplingSchedule,
                             point_sequence: Callable[[float], Point], tau_list: Sequence[float],
                             cfg: Optional[InnerSolverConfig] = None, limit_point=None, tail: int = 3,
                             allowance_factor: float = 4.0, check_convergence: bool = False) -> ProbeReport:
    """Compare ``liminf chi_{eps(tau), tau}(u_tau)`` with ``|d phi|^2(u) / 2``.

    The liminf is the minimum over the ``tail`` smallest ``tau``.  The
    tolerance is ``10 max(gap / tau)`` over the tail; the allowance is
    ``allowance_factor * max_tail(tau) * max(1, target)`` and absorbs the
    O(tau) bias of the ratio at finite ``tau``.

    With ``check_convergence`` the report also records whether member energies
    along the sequence approach ``phi(u)``.

    Raises
    ------
    MissingAnalyticSlope
        When the family has no analytic limit slope.
    """
    if family.limit_slope is None:
        raise MissingAnalyticSlope(f"family {family.name!r} declares no limit slope")
    taus = list(tau_list)
    pts = [as_point(point_sequence(t)) for t in taus]
    u = as_point(limit_point) if limit_point is not None else pts[int(np.argmin(taus))]
    ratios = [de_giorgi_ratio(family, coupling, t, p, cfg) for t, p in zip(taus, pts)]
    idx = _tail(taus, tail)
    est = min(ratios[i].ratio for i in idx)
    tol = 10.0 * max(ratios[i].gap for i in idx)
    target = 0.5 * family.limit_slope(u) ** 2
    allowance = allowance_factor * max(taus[i] for i in idx) * max(1.0, target)
    extra = {"epsilons": [r.epsilon for r in ratios], "limit_point": list(u.coords)}
    if check_convergence:
        limit_energy = family.limit(u)
        energies = [family.member(coupling(t))(p) for t, p in zip(taus, pts)]
        errs = [abs(e - limit_energy) for e in energies]
        tail_errs = [errs[i] for i in idx]
        extra["convergence_condition"] = {
            "energies": [_json_float(e) for e in energies],
            "limit_energy": _json_float(limit_energy),
            "errors": [_json_float(e) for e in errs],
            "holds": bool(max(tail_errs) <= max(errs[j] for j in range(len(errs))) and
                          min(tail_errs) <= allowance + tol),
        }
    return ProbeReport("crucial_assumption", taus, pts, [r.ratio for r in ratios], [r.gap for r in ratios],
                       est, target, tol, allowance, _verdict(est, target, tol, allowance), extra)


def slope_liminf_probe(family: FunctionalFamily, point_sequence: Callable[[float], Point],
                       epsilon_list: Sequence[float], mode: str = "relaxed_slope_proxy",
                       limit_point=None, tail: int = 3, allowance_factor: float = 4.0) -> ProbeReport:
    """Compare ``liminf |d phi_eps|(u_eps)`` with ``|d phi|(u)``.

    ``relaxed_slope_proxy`` uses member derivatives (C^1 members);
    ``local_slope`` falls back to central differences when a member has
    no derivative.  Liminf and allowance follow the tail convention of
    :func:`crucial_assumption_probe` with ``eps`` in place of ``tau``.
    """
    if mode not in ("relaxed_slope_proxy", "local_slope"):
        raise ValueError(f"unknown mode {mode!r}")
    if family.limit_slope is None:
        raise MissingAnalyticSlope(f"family {family.name!r} declares no limit slope")
    eps = list(epsilon_list)
    pts = [as_point(point_sequence(e)) for e in eps]
    slopes = []
    for e, p in zip(eps, pts):
        f = family.member(e)
        if f.derivative is None:
            if mode == "relaxed_slope_proxy":
                raise MissingAnalyticSlope(f"member eps={e:g} has no derivative")
            slopes.append(local_slope(f, p, "finite_difference", h=1e-3 * e).local_slope)
        else:
            slopes.append(local_slope(f, p, "analytic").local_slope)
    u = as_point(limit_point) if limit_point is not None else pts[int(np.argmin(eps))]
    idx = _tail(eps, tail)
    est = min(slopes[i] for i in idx)
    target = float(family.limit_slope(u))
    tol = 1e-12 * max(1.0, target)
    allowance = allowance_factor * max(eps[i] for i in idx) * max(1.0, target)
    return ProbeReport("slope_liminf", eps, pts, slopes, [0.0] * len(eps), est, target, tol, allowance,
                       _verdict(est, target, tol, allowance), {"mode": mode})


# ---------------------------------------------------------------- energy dissipation


def edi_residual(curve: Callable[[float], object], phi: Functional, slope_fn: Callable[[Point], float],
                 s: float, t: float, step: float) -> float:
    """``phi(u(s)) - phi(u(t)) - 1/2 int |d phi|^2(u) - 1/2 int |u'|^2`` on ``[s, t]``.

    Trapezoidal quadrature on a uniform grid of spacing at most ``step``;
    the metric derivative uses central differences inside and second-order
    one-sided differences at the ends.  A curve of maximal slope gives a
    residual near zero; a negative residual means the inequality fails.
    """
    if not t > s:
        raise ValueError("need s < t")
    n = max(2, int(math.ceil((t - s) / step)))
    r = np.linspace(s, t, n + 1)
    h = r[1] - r[0]
    pts = [as_point(curve(x)) for x in r]
    X = np.array([p.array for p in pts])
    slope2 = np.array([slope_fn(p) ** 2 for p in pts])
    vel = np.empty(len(r))
    vel[1:-1] = np.linalg.norm(X[2:] - X[:-2], axis=1) / (2.0 * h)
    vel[0] = np.linalg.norm(-3 * X[0] + 4 * X[1] - X[2]) / (2.0 * h)
    vel[-1] = np.linalg.norm(3 * X[-1] - 4 * X[-2] + X[-3]) / (2.0 * h)
    return float(phi(pts[0]) - phi(pts[-1]) - 0.5 * trapezoid(slope2, r) - 0.5 * trapezoid(vel ** 2, r))


# ---------------------------------------------------------------- Gamma metric


def midpoint_enumeration(lo: float, hi: float, count: int) -> list:
    """``lo, hi``, then midpoints level by level, left to right."""
    out = [lo, hi]
    level = [(lo, hi)]
    while len(out) < count:
        nxt = []
        for a, b in level:
            m = 0.5 * (a + b)
            out.append(m)
            nxt += [(a, m), (m, b)]
        level = nxt
    return out[:count]


def bounded_homeomorphism(t):
    """``t / (1 + |t|)``: odd, increasing, 1-Lipschitz, ``0 -> 0``, ``inf -> 1``."""
    t = np.asarray(t, dtype=float)
    with np.errstate(invalid="ignore"):
        out = np.where(np.isinf(t), np.sign(t), t / (1.0 + np.abs(t)))
    return out


@dataclass(frozen=True)
class GammaDistanceSpec:
    """Dense points ``x_i``, parameters ``kappa_j`` and the homeomorphism ``Phi``."""

    dense_points: tuple = tuple(midpoint_enumeration(-4.0, 4.0, 8))
    kappas: tuple = tuple(2.0 ** -j for j in range(1, 9))
    homeomorphism: Callable = bounded_homeomorphism

    @property
    def truncation(self) -> tuple:
        return len(self.dense_points), len(self.kappas)

    @property
    def truncation_bound(self) -> float:
        I, J = self.truncation
        return 2.0 ** -I + 2.0 ** -J

    def weights(self) -> np.ndarray:
        I, J = self.truncation
        return np.outer(2.0 ** -np.arange(1, I + 1), 2.0 ** -np.arange(1, J + 1))


@dataclass(frozen=True)
class GammaDistance:
    value: float
    truncation_bound: float
    gap: float


def _delta_from_tables(Yf: np.ndarray, Yg: np.ndarray, gf: np.ndarray, gg: np.ndarray,
                       spec: GammaDistanceSpec) -> GammaDistance:
    w = spec.weights()
    phi = spec.homeomorphism
    terms = w * np.abs(phi(Yf) - phi(Yg))
    return GammaDistance(float(np.sum(terms)), spec.truncation_bound, float(np.sum(w * (gf + gg))))


def envelope_table(f: Functional, cert: CoercivityCertificate, spec: GammaDistanceSpec,
                   cfg: Optional[InnerSolverConfig] = None):
    """``Y_{kappa_j} f(x_i)`` and certified gaps, shape ``(I, J)``."""
    I, J = spec.truncation
    Y, G = np.empty((I, J)), np.empty((I, J))
    for i, x in enumerate(spec.dense_points):
        for j, k in enumerate(spec.kappas):
            r = moreau_yosida(f, cert, k, x, cfg)
            Y[i, j], G[i, j] = r.value, r.certified_gap
    return Y, G


def gamma_delta(f: Functional, g: Functional, spec: Optional[GammaDistanceSpec] = None,
                cert_f: Optional[CoercivityCertificate] = None, cert_g: Optional[CoercivityCertificate] = None,
                cfg: Optional[InnerSolverConfig] = None) -> GammaDistance:
    """Truncated Gamma-convergence distance.

    ``sum_{i, j} 2^(-i-j) |Phi(Y_{kappa_j} f(x_i)) - Phi(Y_{kappa_j} g(x_i))|``.
    The result's ``gap`` bounds the effect of inexact envelopes since ``Phi``
    is 1-Lipschitz; ``truncation_bound`` bounds the omitted tail.
    """
    spec = spec or GammaDistanceSpec()
    cert_f = cert_f or CoercivityCertificate(0.0, 0.0, Point.of(0.0))
    cert_g = cert_g or cert_f
    Yf, Gf = envelope_table(f, cert_f, spec, cfg)
    Yg, Gg = (Yf, Gf) if g is f and cert_g == cert_f else envelope_table(g, cert_g, spec, cfg)
    return _delta_from_tables(Yf, Yg, Gf, Gg, spec)


# ---------------------------------------------------------------- eps schedule search


def _aux_table(member: Functional, cert: CoercivityCertificate, tau: float, alpha: float,
               x: np.ndarray, pad: int) -> np.ndarray:
    """Tabulate ``F = (phi - Y_tau phi)/tau + alpha (phi + A + B d^2) + d`` on ``x``.

    ``x`` carries ``pad`` extra nodes on each side for the inner envelope; the
    returned table drops them.
    """
    fx = member.values(x)
    Y = moreau_envelope_grid(x, fx, tau)
    c = cert.u_star.array[0]
    d = np.abs(x - c)
    F = (fx - Y) / tau + alpha * (fx + cert.A + cert.B * d * d) + d
    return F[pad:len(x) - pad]


def _grid_envelope_at(xg: np.ndarray, Fg: np.ndarray, points, kappas) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    return np.column_stack([moreau_envelope_grid(xg, Fg, k, pts) for k in kappas])


@dataclass(frozen=True)
class ScheduleSearchResult:
    """``table[tau]`` is the admissible ``eps_tau`` or ``None`` when none was found."""

    table: dict
    deltas: dict
    thresholds: dict
    failures: list

    def as_dict(self) -> dict:
        return {
            "table": {repr(k): v for k, v in self.table.items()},
            "deltas": {repr(k): {repr(e): d for e, d in v.items()} for k, v in self.deltas.items()},
            "thresholds": {repr(k): v for k, v in self.thresholds.items()},
            "failures": list(self.failures),
        }


def epsilon_schedule_search(family: FunctionalFamily, tau_list: Sequence[float], alpha: float,
                            theta: Callable[[float], float], spec: Optional[GammaDistanceSpec] = None,
                            cfg: Optional[InnerSolverConfig] = None, eps_grid: Optional[Sequence[float]] = None,
                            resolution: int = 4, max_nodes: int = 1 << 23) -> ScheduleSearchResult:
    """Largest sampled ``eps`` with ``delta(F_{eps,tau,alpha}, F_{tau,alpha}) <= theta(tau)``.

    The auxiliary functionals are tabulated on a uniform grid resolving each
    member's feature scale ``resolution`` times, the inner envelope is the
    exact discrete one, and ``Y_kappa F(x_i)`` is the minimum over the grid.
    Bisection over ``eps_grid`` (sorted decreasingly) assumes admissibility is
    monotone in ``eps``.  A ``tau`` without admissible ``eps`` maps to ``None``
    and is listed in ``failures`` together with the exception text.
    """
    spec = spec or GammaDistanceSpec()
    cert = family.certificate
    eps_grid = sorted((float(e) for e in (eps_grid or 10.0 ** -np.arange(1.0, 4.25, 0.25))), reverse=True)
    pts = np.array(spec.dense_points, dtype=float)
    kmax = max(spec.kappas)
    reach = float(np.max(np.abs(pts)))
    table, deltas, thresholds, failures = {}, {}, {}, []
    for tau in tau_list:
        if 2.0 * tau * cert.B >= 1.0:
            raise ValueError(f"tau={tau:g} violates 2 tau B < 1")
        th = float(theta(tau))
        thresholds[tau] = th
        lim = family.limit
        # the kappa-prox of F at x_i stays within sqrt(2 kappa F(x_i)) of x_i
        xs = np.linspace(-reach - 1.0, reach + 1.0, 4097)
        pad0 = 512
        xw = np.linspace(xs[0] - pad0 * (xs[1] - xs[0]), xs[-1] + pad0 * (xs[1] - xs[0]), len(xs) + 2 * pad0)
        Fc = _aux_table(lim, cert, tau, alpha, xw, pad0)
        fmax = float(np.max(np.interp(pts, xs, Fc)))
        span = reach + math.sqrt(2.0 * kmax * max(fmax, 0.0)) + 0.5
        inner = math.sqrt(2.0 * tau * (float(np.max(lim.values(np.array([-span, span])))) + cert.A + 1.0)) + 0.1
        cache: dict = {}

        def delta_at(eps):
            if eps in cache:
                return cache[eps]
            m = family.member(eps)
            h = min((m.feature_scale or span) / resolution, span / 4096.0)
            n = int(math.ceil((span + inner) / h))
            if 2 * n + 1 > max_nodes:
                raise NoAdmissibleEpsilon(f"eps={eps:g} needs {2 * n + 1} nodes (max_nodes={max_nodes})")
            pad = int(math.ceil(inner / h))
            x = np.arange(-n, n + 1) * h
            Fe = _aux_table(m, cert, tau, alpha, x, pad)
            Fl = _aux_table(lim, cert, tau, alpha, x, pad)
            xg = x[pad:len(x) - pad]
            Ye = _grid_envelope_at(xg, Fe, pts, spec.kappas)
            Yl = _grid_envelope_at(xg, Fl, pts, spec.kappas)
            zero = np.zeros_like(Ye)
            d = _delta_from_tables(Ye, Yl, zero, zero, spec).value
            cache[eps] = d
            return d

        def fits(eps):
            h = min((family.member(eps).feature_scale or span) / resolution, span / 4096.0)
            return 2 * int(math.ceil((span + inner) / h)) + 1 <= max_nodes

        grid = [e for e in eps_grid if fits(e)]
        skipped = [e for e in eps_grid if e not in grid]
        try:
            if not grid:
                raise NoAdmissibleEpsilon(f"no sampled eps fits max_nodes={max_nodes} at tau={tau:g}")
            lo, hi = 0, len(grid) - 1
            if delta_at(grid[0]) <= th:
                table[tau] = grid[0]
            elif delta_at(grid[hi]) > th:
                raise NoAdmissibleEpsilon(f"no sampled eps admissible at tau={tau:g}"
                                          + (f"; {len(skipped)} smaller eps skipped as too fine" if skipped else ""))
            else:
                # invariant: grid[lo] fails, grid[hi] passes
                while hi - lo > 1:
                    mid = (lo + hi) // 2
                    if delta_at(grid[mid]) <= th:
                        hi = mid
                    else:
                        lo = mid
                table[tau] = grid[hi]
        except NoAdmissibleEpsilon as exc:
            table[tau] = None
            failures.append({"tau": tau, "reason": str(exc)})
        deltas[tau] = dict(sorted(cache.items(), reverse=True))
    return ScheduleSearchResult(table, deltas, thresholds, failures)
