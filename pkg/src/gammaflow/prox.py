"""Certified Moreau-Yosida evaluation and the relaxed minimization step.

The step objective ``g(v) = f(v) + |v - u|^2 / (2 tau)`` is minimized over the
ball returned by :func:`gammaflow.core.prox_search_radius`.  In one dimension
the solver works in four stages:

1. If ``f`` carries a minorant ``m``, the ball is shrunk by discarding cells
   on which ``m(v) + |v - u|^2 / (2 tau)`` provably exceeds a value of ``g``
   already achieved.
2. A uniform grid resolving ``f.feature_scale`` is laid over what remains.
3. Golden-section search refines the most promising cells.
4. Branch and bound on cell lower bounds certifies the gap.

Cell lower bounds are second order: on a cell of width ``w`` with curvature
bound ``M`` the minimum is at least ``min(endpoints) - M w^2 / 8``.  ``M`` is
estimated from second differences of the samples times a safety factor, so
the certificate is exact for quadratics and reliable whenever the grid
resolves the feature scale of ``f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    BudgetTooTight,
    CoercivityCertificate,
    Functional,
    GridTooCoarse,
    InfiniteValue,
    Point,
    TauTooLarge,
    as_point,
    distance,
    prox_search_radius,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_ROUNDING = 8.0 * np.finfo(float).eps


@dataclass(frozen=True)
class ProxResult:
    """Approximate minimizer of the step objective.

    Attributes
    ----------
    minimizer : Point
    value : float
        Achieved ``f(v) + d(v, u)^2 / (2 tau)``; an upper bound on the envelope.
    certified_gap : float
        Upper bound on ``value - Y_tau f(u)``.
    info : dict
        Solver bookkeeping (search radius, region, grid size, levels).
    """

    minimizer: Point
    value: float
    certified_gap: float
    info: dict = field(default_factory=dict, compare=False)

    @property
    def lower(self) -> float:
        return self.value - self.certified_gap


@dataclass(frozen=True)
class InnerSolverConfig:
    """Knobs of the grid + golden-section inner solver.

    ``min_feature_scale`` caps the grid spacing; the effective spacing is the
    smaller of it and the functional's own ``feature_scale``.  The grid grows
    past ``coarse_grid_points`` when needed, up to ``max_grid_points``.
    """

    coarse_grid_points: int = 4096
    refine_iterations: int = 60
    refine_method: str = "golden"
    sweeps: int = 8
    min_feature_scale: Optional[float] = None
    max_grid_points: int = 1 << 22
    narrow_points: int = 1025
    narrow_passes: int = 6
    gap_target: float = 1e-14
    curvature_safety: float = 2.0
    golden_cells: int = 8
    subdivision: int = 4
    max_levels: int = 60
    max_refine_cells: int = 1 << 16

    def __post_init__(self):
        if self.coarse_grid_points < 3 or self.narrow_points < 3:
            raise ValueError("grids need at least 3 points")
        if self.refine_method not in ("golden", "coordinate_golden"):
            raise ValueError(f"unknown refine_method {self.refine_method!r}")
        if self.min_feature_scale is not None and not self.min_feature_scale > 0:
            raise ValueError("min_feature_scale must be positive")

    def feature(self, f: Functional) -> Optional[float]:
        scales = [s for s in (self.min_feature_scale, f.feature_scale) if s is not None]
        return min(scales) if scales else None


def step_objective(f: Functional, tau: float, u) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized ``v -> f(v) + |v - u|^2 / (2 tau)``."""
    c = as_point(u).array
    if f.dim == 1:
        c0 = c[0]
        return lambda x: f.values(x) + (x - c0) ** 2 / (2.0 * tau)
    return lambda x: f.values(x) + np.sum((x - c) ** 2, axis=1) / (2.0 * tau)


def _node_curvature(y: np.ndarray, h: float) -> np.ndarray:
    """|second difference| / h^2 at every node; NaN where a value is infinite."""
    n = len(y)
    d2 = np.full(n, np.nan)
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        inner = np.abs(y[:-2] - 2.0 * y[1:-1] + y[2:]) / (h * h)
    inner[~np.isfinite(inner)] = np.nan
    d2[1:-1] = inner
    d2[0], d2[-1] = d2[1], d2[-2]
    return d2


def _nanmax_rows(a: np.ndarray) -> np.ndarray:
    a = np.where(np.isnan(a), -np.inf, a)
    out = np.max(a, axis=0)
    return np.where(np.isfinite(out), out, 0.0)


def _cell_curvature(y: np.ndarray, h: float, safety: float) -> np.ndarray:
    """Curvature bound per cell ``[x_k, x_k+1]`` from the four surrounding nodes.

    Infinite values are ignored: only the finite part of a cell can carry
    the minimum.
    """
    d2 = _node_curvature(y, h)
    pad = np.concatenate(([d2[0]], d2, [d2[-1]]))
    return safety * _nanmax_rows(np.stack([pad[:-3], pad[1:-2], pad[2:-1], pad[3:]]))


def _cell_lower(ya: np.ndarray, yb: np.ndarray, w, M: np.ndarray) -> np.ndarray:
    """Second-order lower bound of a function on cells.

    A cell with one infinite endpoint is treated as a domain boundary and
    bounded through its finite endpoint; two infinite endpoints give ``+inf``.
    """
    lo = np.minimum(ya, yb)
    return lo - M * np.square(w) / 8.0


def _golden_cells(g, a: np.ndarray, b: np.ndarray, iterations: int):
    """Vectorized golden-section search on independent brackets.

    Returns the evaluated abscissae and values.  Ties keep the left point.
    """
    xs, vs = [], []
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = g(c), g(d)
    xs += [c, d]
    vs += [fc, fd]
    for _ in range(iterations):
        left = fc <= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new = np.where(left, b - GOLDEN * (b - a), a + GOLDEN * (b - a))
        fn = g(new)
        c_next = np.where(left, new, d)
        d_next = np.where(left, c, new)
        fc_next = np.where(left, fn, fd)
        fd_next = np.where(left, fc, fn)
        c, d, fc, fd = c_next, d_next, fc_next, fd_next
        xs.append(new)
        vs.append(fn)
    return np.concatenate(xs), np.concatenate(vs)


def _golden_iterations(width: float, M: float, target: float, cap: int) -> int:
    if not (np.isfinite(M) and M > 0 and width > 0):
        return cap
    # shrink until a bracket's curvature term is below the target
    need = math.log(max(width * math.sqrt(M / (8.0 * target)), 1.0)) / -math.log(GOLDEN)
    return int(min(cap, math.ceil(need) + 2))


class _Candidates:
    """Running collection of evaluated points for the final selection."""

    def __init__(self):
        self.x: list = []
        self.v: list = []
        self.best = np.inf

    def add(self, x, v):
        x = np.asarray(x, dtype=float).ravel()
        v = np.asarray(v, dtype=float).ravel()
        if len(v):
            self.x.append(x)
            self.v.append(v)
            self.best = min(self.best, float(np.min(v)))

    def select(self, g):
        """Best point, lexicographically smallest among exact ties.

        The final values are recomputed in one batch so that the reported
        value and the comparison with ``g(u)`` use identical arithmetic.
        """
        x = np.concatenate(self.x)
        v = np.concatenate(self.v)
        keep = v <= np.min(v) + 1e-12 * max(1.0, abs(np.min(v)))
        xs = np.unique(x[keep])
        vals = g(xs)
        k = int(np.argmin(vals))
        return float(xs[k]), float(vals[k])


def _narrow(g, m_obj, lo: float, hi: float, u0: float, cand: _Candidates,
            cfg: InnerSolverConfig, feature: Optional[float]):
    """Shrink ``[lo, hi]`` using the minorant objective ``m_obj <= g``."""
    passes = 0
    for _ in range(cfg.narrow_passes):
        if hi - lo <= 0:
            break
        x = np.linspace(lo, hi, cfg.narrow_points)
        s = x[1] - x[0]
        gv = g(x)
        cand.add(x, gv)
        k = int(np.argmin(gv))
        if np.isfinite(gv[k]):
            # cheap local search for a sharper upper bound
            wx = np.linspace(max(lo, x[k] - s), min(hi, x[k] + s), 257)
            wv = g(wx)
            cand.add(wx, wv)
            j = int(np.argmin(wv))
            a, b = wx[max(j - 1, 0)], wx[min(j + 1, len(wx) - 1)]
            gx, gvv = _golden_cells(g, np.array([a]), np.array([b]), 48)
            cand.add(gx, gvv)
        c = cand.best
        hv = m_obj(x)
        M = _cell_curvature(hv, s, cfg.curvature_safety)
        lb = _cell_lower(hv[:-1], hv[1:], s, M)
        keep = np.flatnonzero(lb <= c)
        passes += 1
        if len(keep) == 0:
            # nothing in the region can beat an achieved value
            return lo, lo, passes
        new_lo, new_hi = x[keep[0]], x[keep[-1] + 1]
        shrink = (hi - lo) / max(new_hi - new_lo, np.finfo(float).tiny)
        lo, hi = new_lo, new_hi
        if shrink < 2.0:
            break
        if feature is not None and (hi - lo) <= feature * (cfg.coarse_grid_points - 1):
            break
    return lo, hi, passes


def _branch_and_bound(g, a, w, ya, yb, M, cand: _Candidates, cfg: InnerSolverConfig, target: float):
    """Subdivide cells until every lower bound is within ``target`` of the best value."""
    lb = _cell_lower(ya, yb, w, M)
    settled = np.inf
    levels = 0
    m = cfg.subdivision
    while True:
        hot = lb < cand.best - target
        if np.any(~hot):
            settled = min(settled, float(np.min(lb[~hot])))
        if not np.any(hot) or levels >= cfg.max_levels or np.count_nonzero(hot) > cfg.max_refine_cells:
            rest = float(np.min(lb[hot])) if np.any(hot) else np.inf
            return min(settled, rest), levels
        a, w, ya, yb, M = a[hot], w[hot], ya[hot], yb[hot], M[hot]
        w = w / m
        offs = np.arange(1, m)
        nx = a[:, None] + w[:, None] * offs[None, :]
        nv = g(nx.ravel()).reshape(nx.shape)
        cand.add(nx, nv)
        pts = np.concatenate([ya[:, None], nv, yb[:, None]], axis=1)
        # local curvature from the new samples, never below the parent estimate
        with np.errstate(invalid="ignore", over="ignore"):
            d2 = np.abs(pts[:, :-2] - 2.0 * pts[:, 1:-1] + pts[:, 2:]) / (w[:, None] ** 2)
        d2[~np.isfinite(d2)] = np.nan
        loc = cfg.curvature_safety * _nanmax_rows(d2.T)
        M = np.maximum(M, loc)
        a = (a[:, None] + w[:, None] * np.arange(m)[None, :]).ravel()
        ya, yb = pts[:, :-1].ravel(), pts[:, 1:].ravel()
        M = np.repeat(M, m)
        w = np.repeat(w, m)
        lb = _cell_lower(ya, yb, w, M)
        levels += 1


def _solve_1d(f: Functional, tau: float, u: Point, R: float, cfg: InnerSolverConfig) -> ProxResult:
    g = step_objective(f, tau, u)
    u0 = u.array[0]
    dlo, dhi = f.box()
    lo, hi = max(u0 - R, dlo[0]), min(u0 + R, dhi[0])
    feature = cfg.feature(f)
    cand = _Candidates()
    cand.add([u0], g(np.array([u0])))
    info = {"radius": R, "ball": (u0 - R, u0 + R)}

    passes = 0
    if f.minorant is not None and hi > lo:
        m_obj = step_objective(f.minorant, tau, u)
        lo, hi, passes = _narrow(g, m_obj, lo, hi, u0, cand, cfg, feature)
    info.update(region=(lo, hi), narrow_passes=passes)

    if hi <= lo:
        x, val = cand.select(g)
        info.update(grid_points=0, levels=0)
        return ProxResult(Point.of(x), val, _ROUNDING * max(1.0, abs(val)), info)

    if f.atoms is not None:
        xs = np.asarray(f.atoms(lo, hi), dtype=float)
        if len(xs):
            cand.add(xs, g(xs))
        x, val = cand.select(g)
        info.update(grid_points=len(xs), levels=0)
        return ProxResult(Point.of(x), val, 0.0, info)

    width = hi - lo
    n = cfg.coarse_grid_points
    if feature is not None:
        need = int(math.ceil(width / feature)) + 1
        if need > cfg.max_grid_points:
            raise GridTooCoarse(
                f"{need} grid points needed to resolve feature scale {feature:g} on width {width:g}"
            )
        n = max(n, need)
    x = np.linspace(lo, hi, n)
    h = x[1] - x[0]
    y = g(x)
    cand.add(x, y)
    M = _cell_curvature(y, h, cfg.curvature_safety)
    target = cfg.gap_target * max(1.0, abs(cand.best))

    # golden-section refinement of the most promising cells
    lb0 = _cell_lower(y[:-1], y[1:], h, M)
    k = min(cfg.golden_cells, len(lb0))
    top = np.argpartition(lb0, k - 1)[:k] if k < len(lb0) else np.arange(len(lb0))
    top = top[np.isfinite(lb0[top])]
    if len(top):
        iters = _golden_iterations(h, float(np.max(M[top])), target, cfg.refine_iterations)
        gx, gv = _golden_cells(g, x[top], x[top + 1], iters)
        cand.add(gx, gv)

    lower, levels = _branch_and_bound(
        g, x[:-1].copy(), np.full(n - 1, h), y[:-1].copy(), y[1:].copy(), M, cand, cfg, target
    )
    xv, val = cand.select(g)
    gap = max(0.0, val - lower) + _ROUNDING * max(1.0, abs(val))
    info.update(grid_points=n, levels=levels)
    return ProxResult(Point.of(xv), val, gap, info)


def _solve_nd(f: Functional, tau: float, u: Point, R: float, cfg: InnerSolverConfig) -> ProxResult:
    g = step_objective(f, tau, u)
    c = u.array
    d = f.dim
    dlo, dhi = f.box()
    lo, hi = np.maximum(c - R, dlo), np.minimum(c + R, dhi)
    per = max(3, int(round(cfg.coarse_grid_points ** (1.0 / d))))
    feature = cfg.feature(f)
    if feature is not None:
        per = max(per, int(math.ceil(float(np.max(hi - lo)) / feature)) + 1)
        if per ** d > cfg.max_grid_points:
            raise GridTooCoarse(f"{per}^{d} grid points needed to resolve feature scale {feature:g}")
    axes = [np.linspace(lo[i], hi[i], per) for i in range(d)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    y = g(mesh)
    grid = y.reshape((per,) * d)
    hs = np.array([ax[1] - ax[0] if per > 1 else 0.0 for ax in axes])
    curv = 0.0
    for i in range(d):
        if per >= 3 and hs[i] > 0:
            s = np.moveaxis(grid, i, 0)
            with np.errstate(invalid="ignore"):
                d2 = np.abs(s[:-2] - 2 * s[1:-1] + s[2:]) / hs[i] ** 2
            d2 = d2[np.isfinite(d2)]
            if d2.size:
                curv = max(curv, float(np.max(d2)))
    M = cfg.curvature_safety * d * curv

    k = int(np.argmin(y))
    best_x, best_v = mesh[k].copy(), float(y[k])
    # coordinate-wise golden sweeps around the best node
    for _ in range(cfg.sweeps):
        for i in range(d):
            def line(t, i=i, base=best_x.copy()):
                pts = np.repeat(base[None, :], len(t), axis=0)
                pts[:, i] = t
                return g(pts)
            a = np.array([max(lo[i], best_x[i] - hs[i])])
            b = np.array([min(hi[i], best_x[i] + hs[i])])
            tx, tv = _golden_cells(line, a, b, cfg.refine_iterations)
            j = int(np.argmin(tv))
            if tv[j] < best_v:
                best_x[i], best_v = tx[j], float(tv[j])
    xs = np.vstack([mesh, best_x[None, :], c[None, :]])
    vals = g(xs)
    order = np.lexsort(xs.T[::-1])
    xs, vals = xs[order], vals[order]
    j = int(np.argmin(vals))
    val = float(vals[j])
    lower = float(np.min(y)) - M * float(np.sum(hs ** 2)) / 8.0
    gap = max(0.0, val - lower) + _ROUNDING * max(1.0, abs(val))
    info = {"radius": R, "grid_points": len(mesh), "levels": 0}
    return ProxResult(Point(tuple(xs[j])), val, gap, info)


def moreau_yosida(f: Functional, cert: CoercivityCertificate, tau: float, u,
                  cfg: Optional[InnerSolverConfig] = None) -> ProxResult:
    """Certified approximation of ``Y_tau f(u)`` and a near-minimizer.

    Parameters
    ----------
    f : Functional
    cert : CoercivityCertificate
        Used for the search radius.
    tau : float
        Time step, ``2 tau B < 1``.
    u : Point or array_like
    cfg : InnerSolverConfig, optional

    Returns
    -------
    ProxResult
        ``value <= f(u)`` always holds since ``u`` is itself a candidate.

    Raises
    ------
    TauTooLarge, InfiniteValue, GridTooCoarse
    """
    cfg = cfg or InnerSolverConfig()
    u = as_point(u)
    if u.dim != f.dim:
        raise ValueError(f"point of dimension {u.dim} for a functional of dimension {f.dim}")
    R = prox_search_radius(f, cert, tau, u)
    if f.dim == 1:
        return _solve_1d(f, tau, u, R, cfg)
    return _solve_nd(f, tau, u, R, cfg)


def relaxed_step(f: Functional, cert: CoercivityCertificate, tau: float, u_prev, error_budget: float,
                 cfg: Optional[InnerSolverConfig] = None) -> Point:
    """One step of the relaxed scheme.

    Returns a point ``v`` with ``f(v) + d(v, u_prev)^2 / (2 tau) <= Y_tau f(u_prev) + error_budget``.

    Raises
    ------
    BudgetTooTight
        If the certified gap of the inner solve exceeds the budget.
    """
    return relaxed_step_result(f, cert, tau, u_prev, error_budget, cfg).minimizer


def relaxed_step_result(f, cert, tau, u_prev, error_budget, cfg=None) -> ProxResult:
    if not error_budget > 0:
        raise ValueError("error budget must be positive")
    res = moreau_yosida(f, cert, tau, u_prev, cfg)
    if res.certified_gap > error_budget:
        raise BudgetTooTight(
            f"certified gap {res.certified_gap:.3g} exceeds budget {error_budget:.3g} at tau={tau:g}"
        )
    return res


@dataclass(frozen=True)
class Verdict:
    """Outcome of a relaxed-inequality check; ``status`` is holds, fails or uncertain."""

    status: str
    lhs: float
    bound: float
    gap: float

    @property
    def holds(self) -> bool:
        return self.status == "holds"

    def __str__(self):
        if self.status == "uncertain":
            return f"uncertain(gap={self.gap:.3g})"
        return self.status


def check_relaxed_inequality(f: Functional, tau: float, u_prev, v, error_budget: float,
                             oracle_result: ProxResult) -> Verdict:
    """Decide ``f(v) + d(v, u_prev)^2 / (2 tau) <= Y_tau f(u_prev) + error_budget``.

    The envelope is only known to lie in ``[value - gap, value]``:

    * holds if the left side is at most ``value - gap + budget``;
    * fails if it exceeds ``value + budget``;
    * uncertain otherwise, with the width of the undecided band as gap.
    """
    u_prev, v = as_point(u_prev), as_point(v)
    fu = f(u_prev)
    if math.isinf(fu):
        raise InfiniteValue(f"f(u_prev) = +inf at {u_prev!r}")
    lhs = f(v) + distance(v, u_prev) ** 2 / (2.0 * tau)
    hi = oracle_result.value + error_budget
    lo = hi - oracle_result.certified_gap
    if lhs <= lo:
        return Verdict("holds", lhs, lo, 0.0)
    if lhs > hi:
        return Verdict("fails", lhs, hi, 0.0)
    return Verdict("uncertain", lhs, hi, oracle_result.certified_gap)


def grid_oracle(f: Functional, tau: float, u, spacing: float, radius: Optional[float] = None,
                cert: Optional[CoercivityCertificate] = None, chunk: int = 1 << 20) -> ProxResult:
    """Exhaustive uniform-grid minimization of the step objective (``dim == 1``).

    No refinement and no narrowing; meant as an independent reference.  The
    reported gap is the curvature estimate ``2 M spacing^2 / 8`` of the grid.
    """
    if f.dim != 1:
        raise ValueError("grid_oracle supports one-dimensional functionals only")
    u = as_point(u)
    u0 = u.array[0]
    if radius is None:
        if cert is None:
            raise ValueError("need a radius or a certificate")
        radius = prox_search_radius(f, cert, tau, u)
    g = step_objective(f, tau, u)
    n = int(math.ceil(2 * radius / spacing)) + 1
    best_x, best_v, curv = u0, float(g(np.array([u0]))[0]), 0.0
    for start in range(0, n, chunk):
        idx = np.arange(start, min(n + 1, start + chunk + 2))
        x = u0 - radius + idx * spacing
        x = x[x <= u0 + radius]
        if len(x) == 0:
            break
        y = g(x)
        k = int(np.argmin(y))
        if y[k] < best_v or (y[k] == best_v and x[k] < best_x):
            best_x, best_v = float(x[k]), float(y[k])
        if len(x) >= 3:
            with np.errstate(invalid="ignore"):
                d2 = np.abs(y[:-2] - 2 * y[1:-1] + y[2:]) / spacing ** 2
            d2 = d2[np.isfinite(d2)]
            if d2.size:
                curv = max(curv, float(np.max(d2)))
    return ProxResult(Point.of(best_x), best_v, 2.0 * curv * spacing ** 2 / 8.0,
                      {"radius": radius, "grid_points": n})


def moreau_envelope_grid(x: np.ndarray, fx: np.ndarray, tau: float, xq: Optional[np.ndarray] = None) -> np.ndarray:
    """Exact envelope ``min_j fx[j] + (q - x[j])^2 / (2 tau)`` of tabulated data.

    Uses ``min_j fx_j + (q - x_j)^2 / (2 tau) = q^2 / (2 tau) - psi^*(q) / tau``
    with ``psi_j = tau fx_j + x_j^2 / 2``: the conjugate is read off the lower
    convex hull of the points ``(x_j, psi_j)``.  Nodes with ``fx = +inf`` are
    skipped.  Cost is dominated by the hull, O(n log n).

    Parameters
    ----------
    x, fx : ndarray
        Nodes and values.
    xq : ndarray, optional
        Query points; defaults to the nodes.
    """
    x = np.asarray(x, dtype=float)
    fx = np.asarray(fx, dtype=float)
    xq = x if xq is None else np.asarray(xq, dtype=float)
    ok = np.isfinite(fx)
    if not np.any(ok):
        return np.full(xq.shape, np.inf)
    y, fy = x[ok], fx[ok]
    order = np.argsort(y, kind="stable")
    y, fy = y[order], fy[order]
    psi = tau * fy + 0.5 * y * y
    hull = _lower_hull(y, psi)
    hy, hp = y[hull], psi[hull]
    if len(hull) == 1:
        k = np.zeros(xq.shape, dtype=int)
    else:
        slopes = np.diff(hp) / np.diff(hy)
        k = np.searchsorted(slopes, xq, side="left")
    j = hull[k]
    # evaluate directly at the supporting node, which avoids cancellation
    return fy[j] + (xq - y[j]) ** 2 / (2.0 * tau)


def _lower_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the lower convex hull of points sorted by ``x``, left to right."""
    n = len(x)
    if n <= 2:
        return np.arange(n)
    try:
        from scipy.spatial import ConvexHull, QhullError

        # shift and scale for conditioning; hull membership is affine invariant
        sx = max(float(x[-1] - x[0]), 1e-300)
        sy = max(float(np.max(y) - np.min(y)), 1e-300)
        pts = np.column_stack(((x - x[0]) / sx, (y - np.min(y)) / sy))
        v = ConvexHull(pts).vertices
        v = np.roll(v, -int(np.argmin(x[v])))
        end = int(np.argmax(x[v]))
        # qhull may drop collinear nodes; that does not change the envelope
        return np.sort(v[:end + 1])
    except (ImportError, QhullError, ValueError):
        return _monotone_chain(x, y)


def _monotone_chain(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    hull: list = []
    for i in range(len(x)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            if (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]) <= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.array(hull, dtype=int)
