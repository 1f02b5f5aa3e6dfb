"""Shared domain types: points, extended-real functionals, families and schedules.

Functionals take values in ``(-inf, +inf]``; ``+inf`` is represented by the
IEEE value ``numpy.inf`` and ``-inf`` or NaN are rejected at evaluation time.
The metric is the Euclidean distance on :class:`Point`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

DEFAULT_BOX = 1e10


class GammaFlowError(Exception):
    """Base class for all errors raised by this package."""


class TauTooLarge(GammaFlowError):
    pass


class InfiniteValue(GammaFlowError):
    pass


class InvalidValue(GammaFlowError):
    """A functional produced NaN or -inf."""


class GridTooCoarse(GammaFlowError):
    pass


class BudgetTooTight(GammaFlowError):
    pass


class DivergedTrajectory(GammaFlowError):
    pass


class RelaxedInequalityViolation(GammaFlowError):
    """An externally supplied step failed the relaxed minimization inequality."""


class MissingAnalyticSlope(GammaFlowError):
    pass


class NoAdmissibleEpsilon(GammaFlowError):
    pass


class CoercivityViolation(GammaFlowError):
    pass


class TauOutOfRange(GammaFlowError):
    pass


@dataclass(frozen=True, order=True)
class Point:
    """A point of R^d; ordering is lexicographic on the coordinates."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(float(c) for c in np.atleast_1d(np.asarray(self.coords, dtype=float)).ravel())
        if not coords:
            raise ValueError("a Point needs at least one coordinate")
        if not all(math.isfinite(c) for c in coords):
            raise ValueError(f"non-finite coordinates {coords}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *coords: float) -> "Point":
        return cls(tuple(coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)

    def __float__(self) -> float:
        if self.dim != 1:
            raise TypeError("only one-dimensional points convert to float")
        return self.coords[0]

    def __repr__(self) -> str:
        if self.dim == 1:
            return f"Point({self.coords[0]!r})"
        return f"Point{self.coords!r}"


def as_point(u) -> Point:
    if isinstance(u, Point):
        return u
    return Point(tuple(np.atleast_1d(np.asarray(u, dtype=float)).ravel()))


def distance(u, v) -> float:
    return float(np.linalg.norm(as_point(u).array - as_point(v).array))


@dataclass(frozen=True)
class Functional:
    """An extended-real functional on R^d with a vectorized evaluator.

    ``fn`` maps an array of shape ``(n,)`` (``dim == 1``) or ``(n, dim)`` to
    an array of shape ``(n,)``.  The optional fields carry structure that the
    inner prox solver can exploit:

    derivative
        Vectorized gradient, same input convention, output ``(n,)`` or ``(n, dim)``.
    minorant
        A functional ``m`` with ``m <= self`` everywhere; used to shrink the
        prox search region.
    feature_scale
        Smallest length scale the evaluator must be sampled at.
    atoms
        For functionals finite only on a discrete set: ``atoms(lo, hi)``
        returns the sorted finite points in ``[lo, hi]`` (``dim == 1``).
    """

    fn: Callable[[np.ndarray], np.ndarray]
    dim: int = 1
    domain_hint: Optional[tuple] = None
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    minorant: Optional["Functional"] = None
    feature_scale: Optional[float] = None
    atoms: Optional[Callable[[float, float], np.ndarray]] = None
    name: str = ""

    def values(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.fn(x), dtype=float)
        bad = np.isnan(out) | (out == -np.inf)
        if np.any(bad):
            raise InvalidValue(f"{self.name or 'functional'} returned NaN or -inf")
        return out

    def __call__(self, u) -> float:
        p = as_point(u)
        x = p.array if self.dim > 1 else p.array[:1]
        if self.dim > 1:
            x = x[None, :]
        return float(self.values(x)[0])

    def grad(self, u) -> np.ndarray:
        if self.derivative is None:
            raise MissingAnalyticSlope(f"{self.name or 'functional'} has no analytic derivative")
        p = as_point(u)
        if self.dim == 1:
            return np.atleast_1d(np.asarray(self.derivative(p.array[:1]), dtype=float)).ravel()
        return np.asarray(self.derivative(p.array[None, :]), dtype=float).reshape(-1)

    def box(self) -> tuple[np.ndarray, np.ndarray]:
        """Bounding box (lo, hi) where the functional is finite."""
        if self.domain_hint is None:
            warnings.warn(
                f"{self.name or 'functional'} has no domain hint; using [-1e10, 1e10]^d",
                stacklevel=2,
            )
            return np.full(self.dim, -DEFAULT_BOX), np.full(self.dim, DEFAULT_BOX)
        lo, hi = self.domain_hint
        return (np.broadcast_to(np.asarray(lo, dtype=float), (self.dim,)).copy(),
                np.broadcast_to(np.asarray(hi, dtype=float), (self.dim,)).copy())


@dataclass(frozen=True)
class CoercivityCertificate:
    """Constants with ``f(v) >= -A - B * d(v, u_star)**2``."""

    A: float
    B: float
    u_star: Point = field(default_factory=lambda: Point.of(0.0))

    def __post_init__(self):
        if self.A < 0 or self.B < 0:
            raise ValueError("certificate constants must be nonnegative")
        object.__setattr__(self, "u_star", as_point(self.u_star))

    def lower_bound(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        c = self.u_star.array
        if x.ndim == 1 and c.size == 1:
            d2 = (x - c[0]) ** 2
        else:
            d2 = np.sum((x.reshape(len(x), -1) - c) ** 2, axis=1)
        return -self.A - self.B * d2

    def violations(self, f: Functional, samples) -> np.ndarray:
        """Sample points where the certificate inequality fails."""
        samples = np.asarray(samples, dtype=float)
        vals = f.values(samples)
        return samples[vals < self.lower_bound(samples)]


def sample_box(f: Functional, n: int, rng: np.random.Generator, clip: float = 1e3) -> np.ndarray:
    lo, hi = f.box()
    lo, hi = np.maximum(lo, -clip), np.minimum(hi, clip)
    x = rng.uniform(lo, hi, size=(n, f.dim))
    return x[:, 0] if f.dim == 1 else x


@dataclass(frozen=True)
class FunctionalFamily:
    """A family ``eps -> phi_eps`` together with its limit functional."""

    member: Callable[[float], Functional]
    limit: Functional
    certificate: CoercivityCertificate
    limit_slope: Optional[Callable[[Point], float]] = None
    exact_flow: Optional[Callable[[Point, float], Point]] = None
    name: str = ""

    def spot_check(self, epsilons: Sequence[float], n: int = 1000, seed: int = 0) -> list:
        """Return ``(label, point)`` pairs violating the shared certificate."""
        rng = np.random.default_rng(seed)
        bad = []
        for label, f in [("limit", self.limit)] + [(f"eps={e:g}", self.member(e)) for e in epsilons]:
            for x in self.certificate.violations(f, sample_box(f, n, rng)):
                bad.append((label, x))
        return bad


@dataclass(frozen=True)
class CouplingSchedule:
    """The rule ``tau -> eps(tau)``."""

    kind: str
    params: Mapping[str, float] = field(default_factory=dict)
    table: Optional[Mapping[float, float]] = None
    description: str = ""

    @classmethod
    def power(cls, c: float, beta: float) -> "CouplingSchedule":
        if c <= 0:
            raise ValueError("coefficient must be positive")
        return cls("power", {"c": c, "beta": beta}, description=f"eps(tau) = {c:g} * tau^{beta:g}")

    @classmethod
    def constant(cls, eps0: float) -> "CouplingSchedule":
        if eps0 <= 0:
            raise ValueError("eps0 must be positive")
        return cls("constant", {"eps0": eps0}, description=f"eps(tau) = {eps0:g}")

    @classmethod
    def from_table(cls, table: Mapping[float, float]) -> "CouplingSchedule":
        if any(v <= 0 for v in table.values()):
            raise ValueError("table entries must be positive")
        return cls("table", table=dict(table), description="explicit table")

    def __call__(self, tau: float) -> float:
        if tau <= 0:
            raise ValueError("tau must be positive")
        if self.kind == "power":
            return self.params["c"] * tau ** self.params["beta"]
        if self.kind == "constant":
            return self.params["eps0"]
        if self.kind == "table":
            for key, val in self.table.items():
                if math.isclose(key, tau, rel_tol=1e-12):
                    return val
            raise KeyError(f"no coupling entry for tau={tau!r}")
        raise ValueError(f"unknown coupling kind {self.kind!r}")


@dataclass(frozen=True)
class ErrorSchedule:
    """Per-step error budgets for the relaxed scheme.

    ``uniform``: budget ``gamma(tau) * tau`` at every step.
    ``per_step``: budget ``gamma(tau, n)`` at step ``n``.
    """

    kind: str
    gamma: Callable
    description: str = ""

    @classmethod
    def uniform(cls, gamma: Callable[[float], float] = None, description: str = "") -> "ErrorSchedule":
        if gamma is None:
            gamma, description = (lambda tau: tau), "gamma_tau = tau"
        return cls("uniform", gamma, description)

    @classmethod
    def power(cls, c: float, p: float) -> "ErrorSchedule":
        return cls("uniform", lambda tau: c * tau ** p, f"gamma_tau = {c:g} * tau^{p:g}")

    @classmethod
    def per_step(cls, gamma: Callable[[float, int], float], description: str = "") -> "ErrorSchedule":
        return cls("per_step", gamma, description)

    def budget(self, tau: float, n: int) -> float:
        if self.kind == "uniform":
            b = self.gamma(tau) * tau
        elif self.kind == "per_step":
            b = self.gamma(tau, n)
        else:
            raise ValueError(f"unknown error schedule kind {self.kind!r}")
        if not b > 0:
            raise ValueError(f"error budget must be positive, got {b!r}")
        return float(b)

    def total(self, tau: float, n_steps: int) -> float:
        """Sum of budgets over steps 1..n_steps."""
        if self.kind == "uniform":
            return self.budget(tau, 1) * n_steps
        return float(sum(self.budget(tau, j) for j in range(1, n_steps + 1)))

    def vanishes_on(self, taus: Sequence[float], horizon: float = 1.0) -> bool:
        """Check the vanishing condition on a decreasing sample of time steps."""
        taus = sorted(taus, reverse=True)
        if self.kind == "uniform":
            seq = [self.gamma(t) for t in taus]
        else:
            seq = [self.total(t, int(math.ceil(horizon / t))) for t in taus]
        return all(b <= a for a, b in zip(seq, seq[1:])) and seq[-1] < seq[0]


def prox_search_radius(f: Functional, cert: CoercivityCertificate, tau: float, u) -> float:
    """Radius of a ball around ``u`` containing every point ``v`` with
    ``f(v) + d(v, u)**2 / (2 tau) <= f(u)``.

    Positive root of ``(1 - 2 tau B) r**2 - 4 tau B D r = 2 tau (f(u) + A + B D**2)``
    with ``D = d(u, u_star)``.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    if 2.0 * tau * cert.B >= 1.0:
        raise TauTooLarge(f"2*tau*B = {2 * tau * cert.B:g} >= 1")
    u = as_point(u)
    fu = f(u)
    if math.isinf(fu):
        raise InfiniteValue(f"f(u) = +inf at {u!r}")
    D = distance(u, cert.u_star)
    rhs = max(2.0 * tau * (fu + cert.A + cert.B * D * D), 0.0)
    a = 1.0 - 2.0 * tau * cert.B
    b = 4.0 * tau * cert.B * D
    return (b + math.sqrt(b * b + 4.0 * a * rhs)) / (2.0 * a)
