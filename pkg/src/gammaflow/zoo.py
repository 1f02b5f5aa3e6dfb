"""Concrete one-dimensional families with closed-form metadata.

Every builder returns a :class:`FamilySpec`: the family, its parameters, a
recovery-data factory and qualitative expectations keyed by coupling regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    CoercivityCertificate,
    CoercivityViolation,
    CouplingSchedule,
    Functional,
    FunctionalFamily,
    Point,
    TauOutOfRange,
    as_point,
)
from .scheme import RecoveryData

WIDE = (-1e6, 1e6)


def _constant_recovery(u0, coupling=None) -> RecoveryData:
    return RecoveryData.constant(u0)


@dataclass(frozen=True)
class FamilySpec:
    """A named family plus what it is expected to do.

    ``recovery(u0, coupling)`` builds well-prepared initial data for a run.
    ``expected`` holds ``(coupling regime, outcome)`` pairs.
    """

    name: str
    parameters: dict
    family: FunctionalFamily
    expected: list = field(default_factory=list)
    recovery: Callable[..., RecoveryData] = _constant_recovery


def _quadratic(scale: float) -> Functional:
    """``scale * x^2``."""
    return Functional(lambda x: scale * x * x, domain_hint=WIDE,
                      derivative=lambda x: 2.0 * scale * x, name=f"{scale:g}*x^2")


BASES = {"half_quadratic": 0.5, "quadratic": 1.0}


def _base(name: str):
    """Base functional, slope and flow for a named quadratic base."""
    if name not in BASES:
        raise ValueError(f"unknown base {name!r}; choose from {sorted(BASES)}")
    s = BASES[name]
    f = _quadratic(s)
    return (f, lambda p: 2.0 * s * abs(float(p)),
            lambda p, t: Point.of(float(p) * math.exp(-2.0 * s * t)))


def constant_family(f: Functional, cert: CoercivityCertificate, limit_slope=None, exact_flow=None,
                    name: str = "") -> FunctionalFamily:
    """The family ``phi_eps = f`` for every ``eps``."""
    return FunctionalFamily(lambda eps: f, f, cert, limit_slope, exact_flow, name or f.name)


def quadratic_reference() -> FamilySpec:
    """``psi = x^2 / 2`` with prox ``u / (1 + tau)`` and flow ``u0 exp(-t)``."""
    f, slope, flow = _base("half_quadratic")
    fam = constant_family(f, CoercivityCertificate(0.0, 0.0, Point.of(0.0)), slope, flow, "quadratic")
    return FamilySpec("quadratic", {}, fam, [("any", "implicit Euler for u' = -u; converges to u0 exp(-t)")])


def quadratic_envelope(tau: float, u) -> float:
    return float(u) ** 2 / (2.0 * (1.0 + tau))


def quadratic_prox(tau: float, u) -> float:
    return float(u) / (1.0 + tau)


def snap_to_cos_zero(x: float, eps: float) -> float:
    """Nearest point with ``cos(x / eps) = 0``."""
    k = round(x / (eps * math.pi) - 0.5)
    return eps * (math.pi / 2.0 + k * math.pi)


def oscillatory_family(amplitude: Optional[Callable] = None, rho: Optional[Callable[[float], float]] = None,
                       amplitude_derivative: Optional[Callable] = None, amplitude_bound: Optional[float] = None,
                       parameters: Optional[dict] = None) -> FamilySpec:
    """``f_eps(x) = x^2 + a(x) cos^2(x / eps)``.

    Parameters
    ----------
    amplitude : callable, optional
        Fixed nonnegative ``a(x)`` (vectorized).  Takes precedence over ``rho``.
    rho : callable, optional
        Constant amplitude ``rho(eps)``; defaults to ``sqrt(eps)``.
    amplitude_derivative : callable, optional
        ``a'(x)``; the member derivative is omitted if ``a`` is given without it.
    amplitude_bound : float, optional
        ``sup a``, recorded in the parameters.

    Notes
    -----
    The limit is ``x^2`` with slope ``2|x|`` and flow ``x0 exp(-2t)``.  The
    recovery map snaps the initial point to the nearest zero of ``cos(x/eps)``,
    so member energies at the initial data converge to the limit energy even
    when the amplitude does not vanish.
    """
    if amplitude is None:
        rho = rho or math.sqrt

        def amp(x, eps):
            return np.full_like(x, rho(eps))

        def damp(x, eps):
            return np.zeros_like(x)
    else:
        def amp(x, eps):
            return np.asarray(amplitude(x), dtype=float) * np.ones_like(x)

        damp = None if amplitude_derivative is None else (
            lambda x, eps: np.asarray(amplitude_derivative(x), dtype=float) * np.ones_like(x))

    lim, slope, flow = _base("quadratic")
    minorant = Functional(lambda x: x * x, domain_hint=WIDE, name="x^2")

    def member(eps: float) -> Functional:
        if not eps > 0:
            raise ValueError("eps must be positive")

        def fn(x):
            return x * x + amp(x, eps) * np.cos(x / eps) ** 2

        deriv = None
        if damp is not None:
            def deriv(x):
                return 2.0 * x - amp(x, eps) / eps * np.sin(2.0 * x / eps) + damp(x, eps) * np.cos(x / eps) ** 2
        return Functional(fn, domain_hint=WIDE, derivative=deriv, minorant=minorant,
                          feature_scale=eps / 4.0, name=f"oscillatory(eps={eps:g})")

    fam = FunctionalFamily(member, lim, CoercivityCertificate(0.0, 0.0, Point.of(0.0)), slope, flow, "oscillatory")

    def recovery(u0, coupling: CouplingSchedule) -> RecoveryData:
        p = as_point(u0)
        return RecoveryData(lambda tau: Point.of(snap_to_cos_zero(float(p), coupling(tau))), p)

    params = dict(parameters or {})
    if amplitude_bound is not None:
        params.setdefault("amplitude_bound", amplitude_bound)
    expected = [
        ("eps(tau)/tau -> 0", "converges to the flow u' = -2u"),
        ("eps(tau) >> tau with rho_eps >> eps", "pinning: the discrete curve stays near its start"),
    ]
    return FamilySpec("oscillatory", params, fam, expected, recovery)


def perturbation_family(base: Functional, zeta: Callable[[float], Functional],
                        zeta_certificate: CoercivityCertificate,
                        base_certificate: Optional[CoercivityCertificate] = None,
                        limit_slope=None, exact_flow=None, check_eps=(1.0, 0.1, 0.01),
                        parameters: Optional[dict] = None, seed: int = 0) -> FamilySpec:
    """``phi_eps = base + eps * zeta_eps`` for ``0 < eps <= 1``.

    The shared certificate combines both: with ``D = d(u_star, zeta u_star)``,
    ``A = A_base + A_zeta + 2 B_zeta D^2`` and ``B = B_base + 2 B_zeta``.

    Raises
    ------
    CoercivityViolation
        If the combined certificate fails on sampled points.
    """
    bc = base_certificate or CoercivityCertificate(0.0, 0.0, Point.of(0.0))
    zc = zeta_certificate
    D2 = float(np.sum((bc.u_star.array - zc.u_star.array) ** 2))
    cert = CoercivityCertificate(bc.A + zc.A + 2.0 * zc.B * D2, bc.B + 2.0 * zc.B, bc.u_star)
    zs = zc.u_star.array[0]

    def member(eps: float) -> Functional:
        if not 0 < eps <= 1:
            raise ValueError("perturbation members are defined for 0 < eps <= 1")
        z = zeta(eps)

        def fn(x):
            return base.values(x) + eps * z.values(x)

        deriv = None
        if base.derivative is not None and z.derivative is not None:
            def deriv(x):
                return base.derivative(x) + eps * z.derivative(x)
        mino = Functional(lambda x: base.values(x) - eps * (zc.A + zc.B * (x - zs) ** 2),
                          domain_hint=base.domain_hint)
        scales = [s for s in (base.feature_scale, z.feature_scale) if s is not None]
        return Functional(fn, domain_hint=base.domain_hint, derivative=deriv, minorant=mino,
                          feature_scale=min(scales) if scales else None, name=f"perturbation(eps={eps:g})")

    fam = FunctionalFamily(member, base, cert, limit_slope, exact_flow, "perturbation")
    bad = fam.spot_check(check_eps, seed=seed)
    if bad:
        raise CoercivityViolation(f"certificate fails at {bad[:3]}")
    expected = [
        ("eps(tau)/tau -> 0", "converges to the flow of the base functional"),
        ("eps(tau)/tau bounded", "admissible when zeta is uniformly Lipschitz"),
    ]
    return FamilySpec("perturbation", dict(parameters or {}), fam, expected)


def _sin(scale_of_eps: Callable[[float], float], shift_of_eps: Callable[[float], float] = lambda e: 0.0):
    """``eps -> sin(x / s(eps) + c(eps))`` as functionals."""
    def zeta(eps):
        s, c = scale_of_eps(eps), shift_of_eps(eps)
        return Functional(lambda x: np.sin(x / s + c), domain_hint=WIDE,
                          derivative=lambda x: np.cos(x / s + c) / s, feature_scale=s / 4.0)
    return zeta


ZETAS = {
    "sin_sqrt": _sin(math.sqrt),
    "sin": _sin(lambda e: 1.0),
    "sin_shift": _sin(lambda e: 1.0, lambda e: e),
    "zero": lambda eps: Functional(lambda x: np.zeros_like(x), domain_hint=WIDE,
                                   derivative=lambda x: np.zeros_like(x)),
}


def named_perturbation(base: str = "half_quadratic", zeta: str = "sin_sqrt") -> FamilySpec:
    """Perturbations of a quadratic base by bounded sine profiles."""
    if zeta not in ZETAS:
        raise ValueError(f"unknown zeta {zeta!r}; choose from {sorted(ZETAS)}")
    f, slope, flow = _base(base)
    zc = CoercivityCertificate(0.0 if zeta == "zero" else 1.0, 0.0, Point.of(0.0))
    return perturbation_family(f, ZETAS[zeta], zc, limit_slope=slope, exact_flow=flow,
                               parameters={"base": base, "zeta": zeta})


def lsc_envelope_pair() -> FamilySpec:
    """A non-lsc ``psi`` with a single-point defect and its envelope.

    ``psi(x) = x^2 + 1`` at ``x = 0`` and ``x^2`` elsewhere, so the envelope is
    ``x^2``.  Every member equals ``psi``; the declared limit is the envelope.
    Initial data for ``u0 = 0`` is ``u_tau^0 = tau`` so that energies converge.
    """
    def psi(x):
        return x * x + (x == 0.0)

    env, slope, flow = _base("quadratic")
    f = Functional(psi, domain_hint=WIDE, minorant=env, name="psi")
    fam = FunctionalFamily(lambda eps: f, env, CoercivityCertificate(0.0, 0.0, Point.of(0.0)),
                           slope, flow, "lsc_envelope")

    def recovery(u0, coupling=None) -> RecoveryData:
        p = as_point(u0)
        if float(p) == 0.0:
            return RecoveryData(lambda tau: Point.of(tau), p)
        return RecoveryData.constant(p)

    expected = [("any", "follows the flow of the envelope x^2")]
    return FamilySpec("lsc_envelope", {}, fam, expected, recovery)


def lattice_atoms(h: float, r: float):
    """``atoms(lo, hi)`` for the lattice ``h Z`` within ``[-r, r]``."""
    def atoms(lo, hi):
        lo, hi = max(lo, -r), min(hi, r)
        if hi < lo:
            return np.empty(0)
        k = np.arange(math.ceil(lo / h), math.floor(hi / h) + 1, dtype=float)
        x = k * h
        return x[(x >= lo) & (x <= hi)]
    return atoms


def grid_restricted_family(base: Functional, grid_spacing: Callable[[float], float],
                           box_radius: Callable[[float], float], base_certificate: Optional[CoercivityCertificate] = None,
                           limit_slope=None, exact_flow=None, parameters: Optional[dict] = None) -> FamilySpec:
    """``phi_eps = base`` on ``{k h(eps)} within [-r(eps), r(eps)]``, ``+inf`` elsewhere.

    Convergence is expected when ``h(eps(tau)) / tau^(3/2) -> 0``.
    """
    cert = base_certificate or CoercivityCertificate(0.0, 0.0, Point.of(0.0))

    def member(eps: float) -> Functional:
        h, r = grid_spacing(eps), box_radius(eps)

        def fn(x):
            on = (np.round(x / h) * h == x) & (np.abs(x) <= r)
            out = np.full(np.shape(x), np.inf)
            if np.any(on):
                out[on] = base.values(x[on])
            return out
        return Functional(fn, domain_hint=(-r, r), minorant=base.minorant or base,
                          atoms=lattice_atoms(h, r), name=f"grid_restricted(eps={eps:g})")

    fam = FunctionalFamily(member, base, cert, limit_slope, exact_flow, "grid_restricted")

    def recovery(u0, coupling: CouplingSchedule) -> RecoveryData:
        p = as_point(u0)

        def snap(tau):
            h = grid_spacing(coupling(tau))
            return Point.of(float(np.round(float(p) / h) * h))
        return RecoveryData(snap, p)

    expected = [
        ("spacing(eps(tau)) / tau^1.5 -> 0", "converges to the flow of the base functional"),
        ("otherwise", "exploratory; no guarantee either way"),
    ]
    return FamilySpec("grid_restricted", dict(parameters or {}), fam, expected, recovery)


def named_grid_restricted(base: str = "half_quadratic", spacing_coefficient: float = 1.0,
                          spacing_exponent: float = 1.0, box_radius: float = 10.0) -> FamilySpec:
    f, slope, flow = _base(base)
    return grid_restricted_family(
        f, lambda eps: spacing_coefficient * eps ** spacing_exponent, lambda eps: box_radius,
        limit_slope=slope, exact_flow=flow,
        parameters={"base": base, "spacing_coefficient": spacing_coefficient,
                    "spacing_exponent": spacing_exponent, "box_radius": box_radius})


def restricted_family(family: FunctionalFamily, center, radius: Callable[[float], float]) -> FunctionalFamily:
    """Members restricted to closed balls ``d(center, .) <= radius(eps)``."""
    c = as_point(center).array[0]

    def member(eps: float) -> Functional:
        f, r = family.member(eps), radius(eps)

        def fn(x):
            inside = np.abs(x - c) <= r
            out = np.full(np.shape(x), np.inf)
            if np.any(inside):
                out[inside] = f.values(x[inside])
            return out
        lo, hi = f.box() if f.domain_hint is not None else ((-np.inf,), (np.inf,))
        hint = (max(float(lo[0]), c - r), min(float(hi[0]), c + r))
        return Functional(fn, domain_hint=hint, derivative=f.derivative, minorant=f.minorant,
                          feature_scale=f.feature_scale, atoms=f.atoms, name=f"{f.name}|ball")

    return FunctionalFamily(member, family.limit, family.certificate, family.limit_slope,
                            family.exact_flow, family.name + "_restricted")


def counterexample_selector(tau: float):
    """Admissible but non-optimal steps for ``x^2 / 2`` from ``u0 = 0``.

    ``u_1 = tau`` and ``u_n = n tau / (1 + tau)^(n - 1)``; the interpolants
    converge to ``t exp(-t)`` rather than the true flow ``0``.
    """
    if not 0 < tau < 1:
        raise TauOutOfRange(f"the counterexample needs 0 < tau < 1, got {tau!r}")

    def select(tau_, n, u_prev=None) -> Point:
        return Point.of(counterexample_value(tau_, n))
    return select


def counterexample_value(tau: float, n: int) -> float:
    if not 0 < tau < 1:
        raise TauOutOfRange(f"the counterexample needs 0 < tau < 1, got {tau!r}")
    if n == 0:
        return 0.0
    return n * tau / (1.0 + tau) ** (n - 1)


def counterexample_sequence(tau: float, n_max: int) -> np.ndarray:
    """``[u_0, ..., u_{n_max}]``."""
    if not 0 < tau < 1:
        raise TauOutOfRange(f"the counterexample needs 0 < tau < 1, got {tau!r}")
    n = np.arange(n_max + 1, dtype=float)
    return n * tau / (1.0 + tau) ** np.maximum(n - 1, 0.0)


def counterexample_limit(t):
    return np.asarray(t) * np.exp(-np.asarray(t))


def named_oscillatory(rho_coefficient: float = 1.0, rho_exponent: float = 0.5,
                      amplitude: Optional[float] = None) -> FamilySpec:
    """Oscillatory family with ``rho_eps = c eps^p`` or a fixed constant amplitude."""
    params = {"rho_coefficient": rho_coefficient, "rho_exponent": rho_exponent}
    if amplitude is not None:
        if amplitude < 0:
            raise ValueError("amplitude must be nonnegative")
        a = float(amplitude)
        return oscillatory_family(amplitude=lambda x: np.full_like(x, a),
                                  amplitude_derivative=lambda x: np.zeros_like(x),
                                  amplitude_bound=a, parameters={"amplitude": a})
    if rho_coefficient <= 0:
        raise ValueError("rho_coefficient must be positive")
    return oscillatory_family(rho=lambda eps: rho_coefficient * eps ** rho_exponent, parameters=params)


REGISTRY = {
    "quadratic": (quadratic_reference, {}),
    "oscillatory": (named_oscillatory, {"rho_coefficient": 1.0, "rho_exponent": 0.5, "amplitude": None}),
    "perturbation": (named_perturbation, {"base": "half_quadratic", "zeta": "sin_sqrt"}),
    "grid_restricted": (named_grid_restricted, {"base": "half_quadratic", "spacing_coefficient": 1.0,
                                                "spacing_exponent": 1.0, "box_radius": 10.0}),
    "lsc_envelope": (lsc_envelope_pair, {}),
}


def build(name: str, parameters: Optional[dict] = None) -> FamilySpec:
    """Build a registered family by name."""
    if name not in REGISTRY:
        raise KeyError(f"unknown family {name!r}; known: {sorted(REGISTRY)}")
    fn, defaults = REGISTRY[name]
    params = dict(parameters or {})
    unknown = set(params) - set(defaults)
    if unknown:
        raise ValueError(f"unknown parameters for {name}: {sorted(unknown)}")
    return fn(**params)
