"""Catalog of density families with exact analytic derivatives.

Every family exposes vectorized ``pdf``/``derivative`` evaluations, a
declared global smoothness order, closed-form CDFs/quantile seeds and
absolute moments where the family admits them, and a membership gate for the
smoothness classes that decide when an information functional of a given
order is defined at all.

Models are immutable (frozen dataclasses) and hashable; all evaluation is
pure and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import special as sc

from .hermite import hermite_eval
from .quadrature import (
    DEFAULT_CONFIG,
    FunctionalValue,
    QuadratureConfig,
    Status,
    integrate,
)

__all__ = [
    "UnsupportedOrder",
    "DescriptorError",
    "SupportInterval",
    "DensityModel",
    "Normal",
    "Gamma",
    "Beta",
    "HermiteWeighted",
    "PolynomialTail",
    "HalfGaussian",
    "Logistic",
    "FiniteMixture",
    "GaussianConvolution",
    "Affine",
    "TINY_DENSITY",
    "MAX_DERIVATIVE_ORDER",
    "eval_density",
    "eval_derivative",
    "smoothness_gate",
    "moment",
    "from_descriptor",
    "gaussian_convolution",
]

# Density values at or below this threshold are treated as exact zeros by the
# ratio integrands (where the information integral is finite, the derivative
# vanishes on the zero set of f, so the convention discards nothing).
TINY_DENSITY = 1e-300

# Analytic derivative rules are exposed up to this order across the catalog.
MAX_DERIVATIVE_ORDER = 16

_SQRT_2PI = math.sqrt(2.0 * math.pi)


class UnsupportedOrder(ValueError):
    """No analytic derivative rule exists for the requested (family, k)."""


class DescriptorError(ValueError):
    """A JSON family descriptor is malformed."""


@dataclass(frozen=True)
class SupportInterval:
    """Open interval (lower, upper); either endpoint may be infinite."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise ValueError("support endpoints must not be NaN")
        if not self.lower < self.upper:
            raise ValueError("support requires lower < upper")

    def __iter__(self):
        yield self.lower
        yield self.upper

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)


def _phi(z: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * z * z) / _SQRT_2PI


def _falling(a: Fraction, j: int) -> Fraction:
    out = Fraction(1)
    for i in range(j):
        out *= a - i
    return out


def _polyval(coeffs: tuple[float, ...], x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    for c in reversed(coeffs):
        out = out * x + c
    return out


class DensityModel:
    """Base class for catalog members.

    Subclasses implement ``_pdf``/``_deriv`` on arrays restricted to the
    support interior; the public ``pdf``/``derivative`` handle scalar/array
    conversion and extension by zero outside the support.
    """

    family_name = "abstract"

    # -- evaluation ------------------------------------------------------

    def pdf(self, x):
        xa, scalar = _as_array(x)
        out = np.zeros_like(xa)
        m = self._inside(xa)
        if np.any(m):
            out[m] = self._pdf(xa[m])
        return float(out) if scalar else out

    def derivative(self, k: int, x):
        if k == 0:
            return self.pdf(x)
        if k < 0 or k > MAX_DERIVATIVE_ORDER:
            raise UnsupportedOrder(
                f"no analytic rule for order {k} of family {self.family_name}"
            )
        xa, scalar = _as_array(x)
        out = np.zeros_like(xa)
        m = self._inside(xa)
        if np.any(m):
            out[m] = self._deriv(k, xa[m])
        return float(out) if scalar else out

    def _inside(self, xa: np.ndarray) -> np.ndarray:
        lo, hi = self.support
        return (xa > lo) & (xa < hi)

    # -- declared structure ---------------------------------------------

    @property
    def support(self) -> SupportInterval:
        raise NotImplementedError

    @property
    def smoothness_order(self) -> float:
        """Largest order for which the density stays in the smoothness class
        as a function on the whole real line (inf for C-infinity families)."""
        raise NotImplementedError

    def gate(self, p: int) -> bool:
        """Membership test used to decide whether the order-p information
        functional is defined; families with boundary-driven finiteness
        criteria override this with their parameter condition."""
        return p <= self.smoothness_order

    # -- optional closed forms -------------------------------------------

    def cdf_closed(self, x):
        """Closed-form CDF, or None when the family has no cheap one."""
        return None

    def quantile_seed(self, t):
        """Initial guess for the quantile solver, or None."""
        return None

    def abs_moment_closed(self, s: float) -> float | None:
        return None

    def moment_divergent(self, s: float) -> bool:
        return False

    # -- hints -------------------------------------------------------------

    def anchors(self) -> tuple[float, ...]:
        """Interior breakpoints worth seeding the quadrature subdivision
        with (modes, zeros of f, splice points)."""
        return (0.0,)

    def effective_interval(self, tail_mass: float = 1e-13) -> tuple[float, float]:
        """Interval carrying all but ~tail_mass of the probability."""
        lo, hi = self.support
        return lo, hi

    # -- serialization ------------------------------------------------------

    def descriptor(self) -> dict:
        raise NotImplementedError


def _as_array(x) -> tuple[np.ndarray, bool]:
    xa = np.asarray(x, dtype=float)
    if xa.ndim == 0:
        return xa.reshape(1), True
    return xa, False


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Normal(DensityModel):
    mean: float = 0.0
    stddev: float = 1.0

    family_name = "normal"

    def __post_init__(self) -> None:
        if not self.stddev > 0:
            raise ValueError("stddev must be positive")

    @property
    def support(self) -> SupportInterval:
        return SupportInterval(-math.inf, math.inf)

    @property
    def smoothness_order(self) -> float:
        return math.inf

    def _pdf(self, xa):
        return _phi((xa - self.mean) / self.stddev) / self.stddev

    def _deriv(self, k, xa):
        z = (xa - self.mean) / self.stddev
        sign = -1.0 if k % 2 else 1.0
        return sign * hermite_eval(k, z) * _phi(z) / self.stddev ** (k + 1)

    def cdf_closed(self, x):
        return sc.ndtr((np.asarray(x, dtype=float) - self.mean) / self.stddev)

    def quantile_seed(self, t):
        return self.mean + self.stddev * sc.ndtri(np.asarray(t, dtype=float))

    def abs_moment_closed(self, s: float) -> float | None:
        if self.mean != 0.0:
            return None
        return self.stddev**s * math.exp(
            0.5 * s * math.log(2.0) + math.lgamma(0.5 * (s + 1.0))
        ) / math.sqrt(math.pi)

    def anchors(self) -> tuple[float, ...]:
        return (self.mean,)

    def effective_interval(self, tail_mass: float = 1e-13) -> tuple[float, float]:
        z = -float(sc.ndtri(tail_mass))
        return self.mean - z * self.stddev, self.mean + z * self.stddev

    def descriptor(self) -> dict:
        return {"family": "normal", "params": {"mean": self.mean, "stddev": self.stddev}}


@lru_cache(maxsize=None)
def _gamma_deriv_coeffs(shape_fr: Fraction, k: int) -> tuple[float, ...]:
    # d^k/dx^k [x^{n-1} e^{-x}] = e^{-x} x^{n-1-k} * P_k(x) with
    # P_k(x) = sum_j C(k,j) (-1)^{k-j} ff(n-1, j) x^{k-j}; coefficients exact.
    n1 = shape_fr - 1
    coeffs = [Fraction(0)] * (k + 1)
    for j in range(k + 1):
        coeffs[k - j] = Fraction(math.comb(k, j)) * (-1) ** (k - j) * _falling(n1, j)
    return tuple(float(c) for c in coeffs)


@dataclass(frozen=True)
class Gamma(DensityModel):
    """Gamma density with unit rate: x^{n-1} e^{-x} / Gamma(n) on x > 0."""

    shape: float

    family_name = "gamma"

    def __post_init__(self) -> None:
        if not self.shape > 0:
            raise ValueError("shape must be positive")

    @property
    def support(self) -> SupportInterval:
        return SupportInterval(0.0, math.inf)

    @property
    def smoothness_order(self) -> float:
        return max(math.ceil(self.shape - 1.0) - 1, 0)

    def gate(self, p: int) -> bool:
        # Order-p information is finite iff n > 2p; the boundary behavior
        # x^{n-1} near 0 drives both the smoothness and the integrability.
        return self.shape > 2 * p

    def _pdf(self, xa):
        n = self.shape
        return np.exp(sc.xlogy(n - 1.0, xa) - xa - math.lgamma(n))

    def _deriv(self, k, xa):
        n = self.shape
        coeffs = _gamma_deriv_coeffs(Fraction(n), k)
        envelope = np.exp(sc.xlogy(n - 1.0 - k, xa) - xa - math.lgamma(n))
        return envelope * _polyval(coeffs, xa)

    def cdf_closed(self, x):
        return sc.gammainc(self.shape, np.maximum(np.asarray(x, dtype=float), 0.0))

    def quantile_seed(self, t):
        return sc.gammaincinv(self.shape, np.asarray(t, dtype=float))

    def abs_moment_closed(self, s: float) -> float | None:
        return math.exp(math.lgamma(self.shape + s) - math.lgamma(self.shape))

    def anchors(self) -> tuple[float, ...]:
        return (max(self.shape - 1.0, 0.5),)

    def effective_interval(self, tail_mass: float = 1e-13) -> tuple[float, float]:
        lo = float(sc.gammaincinv(self.shape, tail_mass))
        hi = float(sc.gammainccinv(self.shape, tail_mass))
        return lo, hi

    def descriptor(self) -> dict:
        return {"family": "gamma", "params": {"shape": self.shape}}


@lru_cache(maxsize=None)
def _beta_deriv_coeffs(
    alpha_fr: Fraction, beta_fr: Fraction, k: int
) -> tuple[tuple[float, float, float], ...]:
    # Leibniz on x^{a-1} (1-x)^{b-1}: list of (coef, power of x, power of 1-x).
    out = []
    for j in range(k + 1):
        c = (
            Fraction(math.comb(k, j))
            * _falling(alpha_fr - 1, j)
            * (-1) ** (k - j)
            * _falling(beta_fr - 1, k - j)
        )
        out.append((float(c), float(alpha_fr - 1 - j), float(beta_fr - 1 - (k - j))))
    return tuple(out)


@dataclass(frozen=True)
class Beta(DensityModel):
    alpha: float
    beta: float

    family_name = "beta"

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("alpha and beta must be positive")

    @property
    def support(self) -> SupportInterval:
        return SupportInterval(0.0, 1.0)

    @property
    def smoothness_order(self) -> float:
        return max(math.ceil(min(self.alpha, self.beta) - 1.0) - 1, 0)

    def gate(self, p: int) -> bool:
        return min(self.alpha, self.beta) > 2 * p

    def _log_norm(self) -> float:
        return sc.betaln(self.alpha, self.beta)

    def _pdf(self, xa):
        return np.exp(
            sc.xlogy(self.alpha - 1.0, xa)
            + sc.xlog1py(self.beta - 1.0, -xa)
            - self._log_norm()
        )

    def _deriv(self, k, xa):
        rows = _beta_deriv_coeffs(Fraction(self.alpha), Fraction(self.beta), k)
        norm = math.exp(-self._log_norm())
        out = np.zeros_like(xa)
        one_m = 1.0 - xa
        for c, px, pq in rows:
            if c == 0.0:
                continue
            out += c * np.power(xa, px) * np.power(one_m, pq)
        return norm * out

    def cdf_closed(self, x):
        return sc.betainc(self.alpha, self.beta, np.clip(np.asarray(x, dtype=float), 0.0, 1.0))

    def quantile_seed(self, t):
        return sc.betaincinv(self.alpha, self.beta, np.asarray(t, dtype=float))

    def abs_moment_closed(self, s: float) -> float | None:
        return math.exp(sc.betaln(self.alpha + s, self.beta) - self._log_norm())

    def anchors(self) -> tuple[float, ...]:
        a, b = self.alpha, self.beta
        if a > 1 and b > 1:
            return ((a - 1.0) / (a + b - 2.0),)
        return (0.5,)

    def effective_interval(self, tail_mass: float = 1e-13) -> tuple[float, float]:
        return 0.0, 1.0

    def descriptor(self) -> dict:
        return {"family": "beta", "params": {"alpha": self.alpha, "beta": self.beta}}


@dataclass(frozen=True)
class HermiteWeighted(DensityModel):
    """The density x^2 phi(x): smooth everywhere, vanishing at the origin."""

    family_name = "hermite_weighted"

    @property
    def support(self) -> SupportInterval:
        return SupportInterval(-math.inf, math.inf)

    @property
    def smoothness_order(self) -> float:
        return math.inf

    def _pdf(self, xa):
        return xa * xa * _phi(xa)

    def _deriv(self, k, xa):
        sign = -1.0 if k % 2 else 1.0
        return sign * (hermite_eval(k, xa) + hermite_eval(k + 2, xa)) * _phi(xa)

    def cdf_closed(self, x):
        xa = np.asarray(x, dtype=float)
        return sc.ndtr(xa) - xa * _phi(xa)

    def quantile_seed(self, t):
        # Spread matches a sigma ~ sqrt(3) Gaussian; Newton polishes the rest.
        return math.sqrt(3.0) * sc.ndtri(np.asarray(t, dtype=float))

    def abs_moment_closed(self, s: float) -> float | None:
        return math.exp(
            0.5 * (s + 2.0) * math.log(2.0) + math.lgamma(0.5 * (s + 3.0))
        ) / math.sqrt(math.pi)

    def anchors(self) -> tuple[float, ...]:
        return (-math.sqrt(2.0), 0.0, math.sqrt(2.0))

    def effective_interval(self, tail_mass: float = 1e-13) -> tuple[float, float]:
        z = -float(sc.ndtri(tail_mass)) + 3.0
        return -z, z

    def descriptor(self) -> dict:
        return {"family": "hermite_weighted", "params": {}}


# -- PolynomialTail ----------------------------------------------------------
#
# Even, positive, C-infinity density equal to c |x|^{-q} for |x| >= 1.  The
# interior completion is a fixed choice: identically 1 on |x| <= 1/2, spliced
# to the tail across 1/2 < |x| < 1 with a smooth partition of unity built
# from exp(-1/t).  Interior-dependent results are construction-dependent by
# design; only the tails are pinned.

_PT_LO, _PT_HI = 0.5, 1.0


@lru_cache(maxsize=None)
def _pt_splice_lambdas(q: float, k: int):
    # Derivatives are generated on x > 0 only (the density is even, so the
    # negative side follows by parity); a positive symbol keeps sympy from
    # rewriting (x^2)^(-q/2) through Abs.
    import sympy as sp

    x = sp.Symbol("x", positive=True)
    s = (x**2 - sp.Rational(1, 4)) / sp.Rational(3, 4)
    psi_s = sp.exp(-1 / s)
    psi_1ms = sp.exp(-1 / (1 - s))
    step = psi_s / (psi_s + psi_1ms)
    expr = (1 - step) + step * x ** (-sp.Float(q))
    dk = sp.diff(expr, x, k) if k else expr
    return sp.lambdify(x, dk, modules="numpy")


@lru_cache(maxsize=None)
def _pt_mid_mass(q: float) -> float:
    fn = _pt_splice_lambdas(q, 0)
    res = integrate(
        lambda x: np.asarray(fn(x), dtype=float),
        (_PT_LO, _PT_HI),
        QuadratureConfig(rel_tol=1e-13, abs_tol=1e-15),
    )
    return res.value


@lru_cache(maxsize=None)
def _pt_norm(q: float) -> float:
    total = 2.0 * (_PT_LO + _pt_mid_mass(q) + 1.0 / (q - 1.0))
    return 1.0 / total


@lru_cache(maxsize=None)
def _pt_weighted_mid(q: float, s: float) -> float:
    fn = _pt_splice_lambdas(q, 0)
    res = integrate(
        lambda x: np.abs(x) ** s * np.asarray(fn(x), dtype=float),
        (_PT_LO, _PT_HI),
        QuadratureConfig(rel_tol=1e-12, abs_tol=1e-15),
    )
    return res.value


@dataclass(frozen=True)
class PolynomialTail(DensityModel):
    q: float

    family_name = "polynomial_tail"

    # Symbolic splice derivatives are generated up to this order only.
    _MAX_K = 8

    def __post_init__(self) -> None:
        if not self.q > 1:
            raise ValueError("tail exponent q must exceed 1")

    @property
    def support(self) -> SupportInterval:
        return SupportInterval(-math.inf, math.inf)

    @property
    def smoothness_order(self) -> float:
        return math.inf

    def _pdf(self, xa):
        return self._deriv(0, xa)

    def _deriv(self, k, xa):
        if k > self._MAX_K:
            raise UnsupportedOrder(
                f"polynomial_tail derivatives available up to order {self._MAX_K}"
            )
        c = _pt_norm(self.q)
        ax = np.abs(xa)
        out = np.zeros_like(xa)

        core = ax <= _PT_LO
        if k == 0:
            out[core] = c

        tail = ax >= _PT_HI
        if np.any(tail):
            coef = c
            for i in range(k):
                coef *= -self.q - i
            vals = coef * ax[tail] ** (-self.q - k)
            if k % 2:
                vals = vals * np.sign(xa[tail])
            out[tail] = vals

        mid = ~core & ~tail
        if np.any(mid):
            fn = _pt_splice_lambdas(self.q, k)
            vals = c * np.asarray(fn(ax[mid]), dtype=float)
            if k % 2:
                vals = vals * np.sign(xa[mid])
            out[mid] = vals
        return out

    def abs_moment_closed(self, s: float) -> float | None:
        if self.moment_divergent(s):
            return None
        c = _pt_norm(self.q)
        core = _PT_LO ** (s + 1.0) / (s + 1.0)
        tail = 1.0 / (self.q - 1.0 - s)
        return 2.0 * c * (core + _pt_weighted_mid(self.q, s) + tail)

    def moment_divergent(self, s: float) -> bool:
        return s >= self.q - 1.0

    def anchors(self) -> tuple[float, ...]:
        return (-_PT_HI, -_PT_LO, 0.0, _PT_LO, _PT_HI)

    def effective_interval(self, tail_mass: float = 1e-13) -> tuple[float, float]:
        c = _pt_norm(self.q)
        # Tail mass beyond x: c x^{1-q} / (q-1).
        x = (c / ((self.q - 1.0) * tail_mass)) ** (1.0 / (self.q - 1.0))
        return -x, x

    def descriptor(self) -> dict:
        return {"family": "polynomial_tail", "params": {"q": self.q}}


@lru_cache(maxsize=None)
def _half_gaussian_coeffs(k: int) -> tuple[float, ...]:
    # f = P(x) e^{-x^2/2} with P_0 = x and P_{k+1} = P_k' - x P_k.
    coeffs = [Fraction(0), Fraction(1)]
    for _ in range(k):
        deriv = [coeffs[i] * i for i in range(1, len(coeffs))]
        shifted = [Fraction(0)] + coeffs
        nxt = [Fraction(0)] * max(len(deriv), len(shifted))
        for i, c in enumerate(deriv):
            nxt[i] += c
        for i, c in enumerate(shifted):
            nxt[i] -= c
        while len(nxt) > 1 and nxt[-1] == 0:
            nxt.pop()
        coeffs = nxt
    return tuple(float(c) for c in coeffs)


@dataclass(frozen=True)
class HalfGaussian(DensityModel):
    """The density x e^{-x^2/2} on x > 0; its first derivative jumps at 0."""

    family_name = "half_gaussian"

    @property
    def support(self) -> SupportInterval:
        return SupportInterval(0.0, math.inf)

    @property
    def smoothness_order(self) -> float:
        return 1

    def _pdf(self, xa):
        return xa * np.exp(-0.5 * xa * xa)

    def _deriv(self, k, xa):
        return _polyval(_half_gaussian_coeffs(k), xa) * np.exp(-0.5 * xa * xa)

    def cdf_closed(self, x):
        xa = np.maximum(np.asarray(x, dtype=float), 0.0)
        return -np.expm1(-0.5 * xa * xa)

    def quantile_seed(self, t):
        return np.sqrt(-2.0 * np.log1p(-np.asarray(t, dtype=float)))

    def abs_moment_closed(self, s: float) -> float | None:
        return math.exp(0.5 * s * math.log(2.0) + math.lgamma(0.5 * s + 1.0))

    def anchors(self) -> tuple[float, ...]:
        return (1.0,)

    def effective_interval(self, tail_mass: float = 1e-13) -> tuple[float, float]:
        return 0.0, math.sqrt(-2.0 * math.log(tail_mass))

    def descriptor(self) -> dict:
        return {"family": "half_gaussian", "params": {}}


@lru_cache(maxsize=None)
def _logistic_deriv_coeffs(k: int) -> tuple[float, ...]:
    # f^{(k)} = Q_k(F) with Q_0(u) = u - u^2 and Q_{k+1} = Q_k'(u) (u - u^2).
    coeffs = [Fraction(0), Fraction(1), Fraction(-1)]
    for _ in range(k):
        deriv = [coeffs[i] * i for i in range(1, len(coeffs))]
        prod = [Fraction(0)] * (len(deriv) + 2)
        for i, c in enumerate(deriv):
            prod[i + 1] += c
            prod[i + 2] -= c
        while len(prod) > 1 and prod[-1] == 0:
            prod.pop()
        coeffs = prod
    return tuple(float(c) for c in coeffs)


@dataclass(frozen=True)
class Logistic(DensityModel):
    """Standard logistic density e^{-x} / (1 + e^{-x})^2."""

    family_name = "logistic"

    @property
    def support(self) -> SupportInterval:
        return SupportInterval(-math.inf, math.inf)

    @property
    def smoothness_order(self) -> float:
        return math.inf

    @staticmethod
    def _sigmoid(xa):
        out = np.empty_like(xa)
        pos = xa >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-xa[pos]))
        e = np.exp(xa[~pos])
        out[~pos] = e / (1.0 + e)
        return out

    def _pdf(self, xa):
        F = self._sigmoid(xa)
        return F * (1.0 - F)

    def _deriv(self, k, xa):
        return _polyval(_logistic_deriv_coeffs(k), self._sigmoid(xa))

    def cdf_closed(self, x):
        xa, scalar = _as_array(x)
        out = self._sigmoid(xa)
        return float(out) if scalar else out

    def quantile_seed(self, t):
        ta = np.asarray(t, dtype=float)
        return np.log(ta) - np.log1p(-ta)

    def abs_moment_closed(self, s: float) -> float | None:
        if s == 1.0:
            return 2.0 * math.log(2.0)
        if s > 1.0:
            eta = (1.0 - 2.0 ** (1.0 - s)) * float(sc.zeta(s))
            return 2.0 * math.gamma(s + 1.0) * eta
        return None

    def anchors(self) -> tuple[float, ...]:
        return (0.0,)

    def effective_interval(self, tail_mass: float = 1e-13) -> tuple[float, float]:
        z = math.log(1.0 / tail_mass)
        return -z, z

    def descriptor(self) -> dict:
        return {"family": "logistic", "params": {}}


@dataclass(frozen=True)
class FiniteMixture(DensityModel):
    """Convex combination of catalog densities with positive weights."""

    components: tuple[tuple[float, DensityModel], ...]

    family_name = "mixture"

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("a mixture needs at least one component")
        weights = [w for w, _ in self.components]
        if any(w <= 0 for w in weights):
            raise ValueError("mixture weights must be positive")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError("mixture weights must sum to 1")

    @property
    def support(self) -> SupportInterval:
        lo = min(m.support.lower for _, m in self.components)
        hi = max(m.support.upper for _, m in self.components)
        return SupportInterval(lo, hi)

    @property
    def smoothness_order(self) -> float:
        return min(m.smoothness_order for _, m in self.components)

    def gate(self, p: int) -> bool:
        return all(m.gate(p) for _, m in self.components)

    def _pdf(self, xa):
        return sum(w * m.pdf(xa) for w, m in self.components)

    def _deriv(self, k, xa):
        return sum(w * m.derivative(k, xa) for w, m in self.components)

    def cdf_closed(self, x):
        parts = []
        for w, m in self.components:
            c = m.cdf_closed(x)
            if c is None:
                return None
            parts.append(w * np.asarray(c, dtype=float))
        return sum(parts)

    def abs_moment_closed(self, s: float) -> float | None:
        total = 0.0
        for w, m in self.components:
            v = m.abs_moment_closed(s)
            if v is None:
                return None
            total += w * v
        return total

    def moment_divergent(self, s: float) -> bool:
        return any(m.moment_divergent(s) for _, m in self.components)

    def anchors(self) -> tuple[float, ...]:
        pts: set[float] = set()
        for _, m in self.components:
            pts.update(m.anchors())
        return tuple(sorted(pts))

    def effective_interval(self, tail_mass: float = 1e-13) -> tuple[float, float]:
        los, his = zip(*(m.effective_interval(tail_mass) for _, m in self.components))
        return min(los), max(his)

    def descriptor(self) -> dict:
        return {
            "family": "mixture",
            "params": {
                "components": [
                    {"weight": w, "density": m.descriptor()} for w, m in self.components
                ]
            },
        }


@dataclass(frozen=True)
class GaussianConvolution(DensityModel):
    """Law of X + eps*Z for X ~ base and an independent standard normal Z.

    Evaluations integrate the base density against derivatives of the
    Gaussian kernel, so no smoothness of the base is required.  A Normal (or
    mixture-of-Normal) base collapses to the exact closed form.
    """

    base: DensityModel
    eps: float
    inner_rel_tol: float = 1e-8

    family_name = "gaussian_convolution"

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    @property
    def _collapsed(self) -> DensityModel | None:
        return _collapse_convolution(self)

    @property
    def support(self) -> SupportInterval:
        return SupportInterval(-math.inf, math.inf)

    @property
    def smoothness_order(self) -> float:
        return math.inf

    def _inner_config(self) -> QuadratureConfig:
        return QuadratureConfig(rel_tol=self.inner_rel_tol, abs_tol=1e-18)

    def _kernel_window(self, k: int) -> float:
        return (10.0 + k) * self.eps

    def _inside(self, xa):
        return np.ones_like(xa, dtype=bool)

    def _pdf(self, xa):
        return self._deriv(0, xa)

    def _deriv(self, k, xa):
        collapsed = self._collapsed
        if collapsed is not None:
            return collapsed.derivative(k, xa) if k else collapsed.pdf(xa)
        eps = self.eps
        base = self.base
        blo, bhi = base.support
        cfg = self._inner_config()
        win = self._kernel_window(k)
        sign = -1.0 if k % 2 else 1.0

        def kernel(u):
            z = u / eps
            return sign * hermite_eval(k, z) * _phi(z) / eps ** (k + 1)

        out = np.empty_like(xa)
        for i, x in enumerate(xa):
            lo = max(blo, x - win)
            hi = min(bhi, x + win)
            if not lo < hi:
                out[i] = 0.0
                continue
            res = integrate(lambda y: base.pdf(y) * kernel(x - y), (lo, hi), cfg)
            out[i] = res.value if res.is_finite else 0.0
        return out

    def anchors(self) -> tuple[float, ...]:
        return self.base.anchors()

    def effective_interval(self, tail_mass: float = 1e-13) -> tuple[float, float]:
        lo, hi = self.base.effective_interval(tail_mass)
        pad = 9.0 * self.eps
        return lo - pad, hi + pad

    def descriptor(self) -> dict:
        return {
            "family": "gaussian_convolution",
            "params": {"base": self.base.descriptor(), "eps": self.eps},
        }


@lru_cache(maxsize=None)
def _collapse_convolution(model: GaussianConvolution) -> DensityModel | None:
    base, eps = model.base, model.eps
    if isinstance(base, Normal):
        return Normal(base.mean, math.hypot(base.stddev, eps))
    if isinstance(base, FiniteMixture):
        collapsed = tuple(
            (w, GaussianConvolution(m, eps, model.inner_rel_tol))
            for w, m in base.components
        )
        if all(isinstance(c._collapsed, Normal) for _, c in collapsed):
            return FiniteMixture(tuple((w, c._collapsed) for w, c in collapsed))
    return None


def gaussian_convolution(base: DensityModel, eps: float, inner_rel_tol: float = 1e-8) -> DensityModel:
    """Construct the smoothed model, collapsing Gaussian bases exactly."""
    model = GaussianConvolution(base, eps, inner_rel_tol)
    return model._collapsed or model


@dataclass(frozen=True)
class Affine(DensityModel):
    """Law of shift + scale * X for X ~ base (scale > 0)."""

    base: DensityModel
    shift: float = 0.0
    scale: float = 1.0

    family_name = "affine"

    def __post_init__(self) -> None:
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    def _z(self, xa):
        return (xa - self.shift) / self.scale

    @property
    def support(self) -> SupportInterval:
        lo, hi = self.base.support
        return SupportInterval(self.shift + self.scale * lo, self.shift + self.scale * hi)

    @property
    def smoothness_order(self) -> float:
        return self.base.smoothness_order

    def gate(self, p: int) -> bool:
        return self.base.gate(p)

    def _pdf(self, xa):
        return self.base.pdf(self._z(xa)) / self.scale

    def _deriv(self, k, xa):
        return self.base.derivative(k, self._z(xa)) / self.scale ** (k + 1)

    def cdf_closed(self, x):
        return self.base.cdf_closed(self._z(np.asarray(x, dtype=float)))

    def quantile_seed(self, t):
        seed = self.base.quantile_seed(t)
        if seed is None:
            return None
        return self.shift + self.scale * np.asarray(seed, dtype=float)

    def abs_moment_closed(self, s: float) -> float | None:
        if self.shift != 0.0:
            return None
        v = self.base.abs_moment_closed(s)
        return None if v is None else self.scale**s * v

    def moment_divergent(self, s: float) -> bool:
        return self.base.moment_divergent(s)

    def anchors(self) -> tuple[float, ...]:
        return tuple(self.shift + self.scale * a for a in self.base.anchors())

    def effective_interval(self, tail_mass: float = 1e-13) -> tuple[float, float]:
        lo, hi = self.base.effective_interval(tail_mass)
        return self.shift + self.scale * lo, self.shift + self.scale * hi

    def descriptor(self) -> dict:
        return {
            "family": "affine",
            "params": {
                "base": self.base.descriptor(),
                "shift": self.shift,
                "scale": self.scale,
            },
        }


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------


def eval_density(model: DensityModel, x):
    """f(x); zero outside the support."""
    return model.pdf(x)


def eval_derivative(model: DensityModel, k: int, x):
    """Analytic f^(k)(x); extension by zero outside the closed support."""
    return model.derivative(k, x)


def smoothness_gate(model: DensityModel, p: int) -> bool:
    """True iff the order-p information functional is defined as a finite
    integral candidate (class membership / family finiteness condition)."""
    if p < 0:
        raise ValueError("order must be nonnegative")
    return model.gate(p)


def moment(model: DensityModel, s: float, config: QuadratureConfig | None = None) -> FunctionalValue:
    """Absolute moment E|X|^s, analytic where the family admits it."""
    if not s > 0:
        raise ValueError("moment order must be positive")
    cfg = config or DEFAULT_CONFIG
    if model.moment_divergent(s):
        return FunctionalValue(math.inf, math.inf, Status.DIVERGENT, 0)
    closed = model.abs_moment_closed(s)
    if closed is not None:
        return FunctionalValue(closed, 0.0, Status.FINITE, 0)
    return integrate(
        lambda x: np.abs(x) ** s * model.pdf(x),
        model.support,
        cfg,
        breakpoints=model.anchors(),
    )


# ---------------------------------------------------------------------------
# JSON descriptors
# ---------------------------------------------------------------------------


def _require(params: dict, field: str, family: str):
    if field not in params:
        raise DescriptorError(f"family '{family}' requires params.{field}")
    return params[field]


def from_descriptor(desc: dict) -> DensityModel:
    """Build a model from {"family": ..., "params": {...}}."""
    if not isinstance(desc, dict):
        raise DescriptorError("descriptor must be a JSON object")
    family = desc.get("family")
    if not isinstance(family, str):
        raise DescriptorError("descriptor field 'family' must be a string")
    params = desc.get("params", {})
    if not isinstance(params, dict):
        raise DescriptorError("descriptor field 'params' must be an object")
    try:
        if family == "normal":
            return Normal(float(params.get("mean", 0.0)), float(params.get("stddev", 1.0)))
        if family == "gamma":
            return Gamma(float(_require(params, "shape", family)))
        if family == "beta":
            return Beta(
                float(_require(params, "alpha", family)),
                float(_require(params, "beta", family)),
            )
        if family == "hermite_weighted":
            return HermiteWeighted()
        if family == "polynomial_tail":
            return PolynomialTail(float(_require(params, "q", family)))
        if family == "half_gaussian":
            return HalfGaussian()
        if family == "logistic":
            return Logistic()
        if family == "mixture":
            comps = _require(params, "components", family)
            if not isinstance(comps, list) or not comps:
                raise DescriptorError("params.components must be a non-empty list")
            built = []
            for entry in comps:
                built.append(
                    (
                        float(_require(entry, "weight", family)),
                        from_descriptor(_require(entry, "density", family)),
                    )
                )
            return FiniteMixture(tuple(built))
        if family == "gaussian_convolution":
            return gaussian_convolution(
                from_descriptor(_require(params, "base", family)),
                float(_require(params, "eps", family)),
            )
        if family == "affine":
            return Affine(
                from_descriptor(_require(params, "base", family)),
                float(params.get("shift", 0.0)),
                float(params.get("scale", 1.0)),
            )
    except DescriptorError:
        raise
    except (TypeError, ValueError) as exc:
        raise DescriptorError(f"invalid parameters for family '{family}': {exc}") from exc
    raise DescriptorError(f"unknown family '{family}'")
