"""Information functionals of one-dimensional densities.

Provides the order-p information I^(p) = int f^(p)^2 / f, absolute score
moments I_p = int |f'|^p / f^{p-1}, the mixed cross-functionals
V_{k,l} = int f^(k) f^(l) / f, relative information against the standard
normal score, derivative norms, and characteristic-function modulus probes.

All operations are pure and cache aggressively on (model, order, config);
models and configs are hashable frozen values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .densities import TINY_DENSITY, DensityModel, moment, smoothness_gate
from .hermite import MonicPolynomial, hermite, hermite_eval
from .quadrature import (
    DEFAULT_CONFIG,
    FunctionalValue,
    QuadratureConfig,
    Status,
    integrate,
)

__all__ = [
    "MAX_ORDER",
    "MomentRequired",
    "OscillationLimit",
    "CrossFunctionalMatrix",
    "RelativeFisherResult",
    "fisher_info",
    "score_moment",
    "cross_functional",
    "cross_matrix",
    "relative_fisher",
    "relative_fisher_detail",
    "hermite_square_mean",
    "derivative_tv_norm",
    "derivative_l2_norm",
    "charfn",
    "charfn_modulus",
]

# Derivative closed forms and quadrature conditioning degrade beyond this
# order; nothing in the verification harness needs more than p = 3.
MAX_ORDER = 8

# Oscillation resolution limit for characteristic-function quadrature.
MAX_CHARFN_FREQUENCY = 1e3


class MomentRequired(ValueError):
    """An operation needs a finite absolute moment the model does not have."""


class OscillationLimit(ValueError):
    """Characteristic-function frequency beyond the resolvable range."""


def _check_order(p: int, smallest: int = 0) -> None:
    if not isinstance(p, (int, np.integer)):
        raise TypeError("order must be an integer")
    if p < smallest or p > MAX_ORDER:
        raise ValueError(f"order must lie in [{smallest}, {MAX_ORDER}]")


def _ratio_integrand(model: DensityModel, orders: tuple[int, ...]):
    """Integrand prod_k f^(k) / f^{m-1} with the zero-density convention."""

    def integrand(x):
        f = np.asarray(model.pdf(x), dtype=float)
        out = np.zeros_like(f)
        m = f > TINY_DENSITY
        if np.any(m):
            xm = np.asarray(x, dtype=float)[m]
            num = np.ones_like(f[m])
            for k in orders:
                num = num * np.asarray(model.derivative(k, xm), dtype=float)
            out[m] = num / f[m] ** (len(orders) - 1)
        return out

    return integrand


@lru_cache(maxsize=4096)
def _fisher_cached(model: DensityModel, p: int, cfg: QuadratureConfig) -> FunctionalValue:
    if not smoothness_gate(model, p):
        return FunctionalValue(math.inf, math.inf, Status.DIVERGENT, 0)
    return integrate(
        _ratio_integrand(model, (p, p)),
        model.support,
        cfg,
        breakpoints=model.anchors(),
    )


def fisher_info(
    model: DensityModel, p: int, config: QuadratureConfig | None = None
) -> FunctionalValue:
    """Information of order p: int f^(p)^2 / f over {f > 0}.

    Order 0 is exactly 1 by convention.  Models failing the smoothness gate
    are Divergent without running any quadrature; otherwise divergence is
    decided by the classifier on the refinement history.
    """
    _check_order(p)
    if p == 0:
        return FunctionalValue(1.0, 0.0, Status.FINITE, 0)
    return _fisher_cached(model, p, config or DEFAULT_CONFIG)


@lru_cache(maxsize=1024)
def _score_moment_cached(
    model: DensityModel, p: float, cfg: QuadratureConfig
) -> FunctionalValue:
    def integrand(x):
        f = np.asarray(model.pdf(x), dtype=float)
        out = np.zeros_like(f)
        m = f > TINY_DENSITY
        if np.any(m):
            xm = np.asarray(x, dtype=float)[m]
            g = np.asarray(model.derivative(1, xm), dtype=float)
            out[m] = np.abs(g / f[m]) ** p * f[m]
        return out

    return integrate(integrand, model.support, cfg, breakpoints=model.anchors())


def score_moment(
    model: DensityModel, p: float, config: QuadratureConfig | None = None
) -> FunctionalValue:
    """Absolute score moment: int |f'/f|^p f; p = 1 is the total-variation
    norm of f and p = 2 is the classical information."""
    if not p >= 1:
        raise ValueError("score-moment order must be >= 1")
    return _score_moment_cached(model, float(p), config or DEFAULT_CONFIG)


@lru_cache(maxsize=4096)
def _cross_cached(
    model: DensityModel, k: int, l: int, cfg: QuadratureConfig
) -> FunctionalValue:
    if not smoothness_gate(model, max(k, l)):
        return FunctionalValue(math.nan, math.inf, Status.INCONCLUSIVE, 0)
    if k != l and max(k, l) >= 1:
        # Existence guard: |V_{k,l}| <= sqrt(I^(k) I^(l)) by Cauchy, with
        # I^(0) = 1; refuse to report a signed value when a factor diverges.
        for order in {k, l}:
            if order >= 1 and not fisher_info(model, order, cfg).is_finite:
                return FunctionalValue(math.nan, math.inf, Status.INCONCLUSIVE, 0)
    return integrate(
        _ratio_integrand(model, (k, l)),
        model.support,
        cfg,
        breakpoints=model.anchors(),
    )


def cross_functional(
    model: DensityModel, k: int, l: int, config: QuadratureConfig | None = None
) -> FunctionalValue:
    """Signed cross-functional V_{k,l} = int f^(k) f^(l) / f.

    The diagonal V_{k,k} is the order-k information; V_{k,0} vanishes for
    k >= 1 whenever the order-k information is finite.
    """
    _check_order(k)
    _check_order(l)
    return _cross_cached(model, k, l, config or DEFAULT_CONFIG)


@dataclass(frozen=True)
class CrossFunctionalMatrix:
    """Table of V_{k,l} for 0 <= k, l <= order (symmetric by construction)."""

    order: int
    entries: tuple[tuple[FunctionalValue, ...], ...]

    def entry(self, k: int, l: int) -> FunctionalValue:
        return self.entries[k][l]

    def diagonal(self) -> tuple[FunctionalValue, ...]:
        return tuple(self.entries[k][k] for k in range(self.order + 1))


def cross_matrix(
    model: DensityModel, p: int, config: QuadratureConfig | None = None
) -> CrossFunctionalMatrix:
    """Fill the (p+1) x (p+1) cross-functional table, one quadrature per
    unordered pair; assembly order is deterministic."""
    _check_order(p)
    cfg = config or DEFAULT_CONFIG
    vals: dict[tuple[int, int], FunctionalValue] = {}
    for k in range(p + 1):
        for l in range(k, p + 1):
            vals[(k, l)] = cross_functional(model, k, l, cfg)
    rows = tuple(
        tuple(vals[(min(k, l), max(k, l))] for l in range(p + 1)) for k in range(p + 1)
    )
    return CrossFunctionalMatrix(p, rows)


@dataclass(frozen=True)
class RelativeFisherResult:
    """Direct quadrature of the relative information plus the identity value
    I^(p) - 2 p! + E H_p(X)^2 carried for self-consistency checks."""

    direct: FunctionalValue
    identity_value: float
    fisher: FunctionalValue
    hermite_square: FunctionalValue


def relative_fisher_detail(
    model: DensityModel, p: int, config: QuadratureConfig | None = None
) -> RelativeFisherResult:
    _check_order(p, smallest=1)
    cfg = config or DEFAULT_CONFIG
    mom = moment(model, 2.0 * p, cfg)
    if not mom.is_finite:
        raise MomentRequired(f"relative information of order {p} needs E|X|^{2*p} finite")
    fisher = fisher_info(model, p, cfg)
    if not fisher.is_finite:
        return RelativeFisherResult(
            FunctionalValue(math.inf, math.inf, fisher.status, fisher.node_count),
            math.inf,
            fisher,
            FunctionalValue(math.nan, math.inf, Status.INCONCLUSIVE, 0),
        )
    sign = -1.0 if p % 2 else 1.0

    def integrand(x):
        f = np.asarray(model.pdf(x), dtype=float)
        out = np.zeros_like(f)
        m = f > TINY_DENSITY
        if np.any(m):
            xm = np.asarray(x, dtype=float)[m]
            score = np.asarray(model.derivative(p, xm), dtype=float) / f[m]
            diff = score - sign * hermite_eval(p, xm)
            out[m] = diff * diff * f[m]
        return out

    direct = integrate(integrand, model.support, cfg, breakpoints=model.anchors())
    hsq = hermite_square_mean(model, hermite(p), cfg)
    identity = fisher.value - 2.0 * math.factorial(p) + hsq.value
    return RelativeFisherResult(direct, identity, fisher, hsq)


def relative_fisher(
    model: DensityModel, p: int, config: QuadratureConfig | None = None
) -> FunctionalValue:
    """Relative information against the standard normal score of order p,
    computed by direct quadrature of |f^(p)/f - (-1)^p H_p|^2 f."""
    return relative_fisher_detail(model, p, config).direct


def hermite_square_mean(
    model: DensityModel,
    poly: MonicPolynomial,
    config: QuadratureConfig | None = None,
) -> FunctionalValue:
    """E H(X)^2 for a monic polynomial H; Divergent when the moment of order
    2 deg(H) does not exist."""
    cfg = config or DEFAULT_CONFIG
    if model.moment_divergent(2.0 * poly.degree):
        return FunctionalValue(math.inf, math.inf, Status.DIVERGENT, 0)

    def integrand(x):
        h = poly(np.asarray(x, dtype=float))
        return h * h * np.asarray(model.pdf(x), dtype=float)

    return integrate(integrand, model.support, cfg, breakpoints=model.anchors())


@lru_cache(maxsize=1024)
def _tv_cached(model: DensityModel, k: int, cfg: QuadratureConfig) -> FunctionalValue:
    def integrand(x):
        return np.abs(np.asarray(model.derivative(k, x), dtype=float))

    return integrate(integrand, model.support, cfg, breakpoints=model.anchors())


def derivative_tv_norm(
    model: DensityModel, k: int, config: QuadratureConfig | None = None
) -> FunctionalValue:
    """Total variation of f^(k-1), i.e. int |f^(k)| over the support."""
    _check_order(k, smallest=1)
    return _tv_cached(model, k, config or DEFAULT_CONFIG)


def derivative_l2_norm(
    model: DensityModel, p: int, config: QuadratureConfig | None = None
) -> FunctionalValue:
    """int (f^(p))^2 over the support."""
    _check_order(p)
    cfg = config or DEFAULT_CONFIG

    def integrand(x):
        g = np.asarray(model.derivative(p, x), dtype=float)
        return g * g

    return integrate(integrand, model.support, cfg, breakpoints=model.anchors())


def charfn(
    model: DensityModel, t: float, config: QuadratureConfig | None = None
) -> FunctionalValue:
    """|E e^{itX}| from two real quadratures over the effective support.

    The value is limited by float64 cancellation: moduli below roughly
    node_count * macheps are indistinguishable from zero, and the returned
    error estimate reflects that floor.
    """
    if abs(t) > MAX_CHARFN_FREQUENCY:
        return FunctionalValue(math.nan, math.inf, Status.INCONCLUSIVE, 0)
    cfg = config or DEFAULT_CONFIG
    if t == 0.0:
        return FunctionalValue(1.0, 0.0, Status.FINITE, 0)
    lo, hi = model.effective_interval(1e-13)
    breaks = tuple(b for b in model.anchors() if lo < b < hi)
    cos_part = integrate(
        lambda x: np.cos(t * x) * model.pdf(x), (lo, hi), cfg, breakpoints=breaks
    )
    sin_part = integrate(
        lambda x: np.sin(t * x) * model.pdf(x), (lo, hi), cfg, breakpoints=breaks
    )
    nodes = cos_part.node_count + sin_part.node_count
    if not (cos_part.is_finite and sin_part.is_finite):
        return FunctionalValue(math.nan, math.inf, Status.INCONCLUSIVE, nodes)
    modulus = math.hypot(cos_part.value, sin_part.value)
    floor = nodes * np.finfo(float).eps
    err = cos_part.error_estimate + sin_part.error_estimate + floor + 1e-13
    return FunctionalValue(modulus, err, Status.FINITE, nodes)


def charfn_modulus(
    model: DensityModel, t: float, config: QuadratureConfig | None = None
) -> float:
    """Modulus of the characteristic function at frequency t."""
    if abs(t) > MAX_CHARFN_FREQUENCY:
        raise OscillationLimit(f"|t| = {abs(t)} exceeds {MAX_CHARFN_FREQUENCY}")
    return charfn(model, t, config).value
