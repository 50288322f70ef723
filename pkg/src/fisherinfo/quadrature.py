"""Adaptive Gauss-Kronrod integration for singular and improper integrands.

The engine targets integrands of the ratio form g(x)^2 / f(x) that arise when
computing information functionals: nonnegative, possibly singular at support
endpoints or at interior zeros of f, and frequently posed on half-infinite or
doubly infinite intervals.

Design points:

* Infinite endpoints are compactified with the substitution x = a + u/(1-u)
  (mirrored on the left), so the whole computation runs on finite panels.
* Each panel is estimated with the embedded Gauss-7 / Kronrod-15 pair; panels
  that fail their share of the budget are split.  Panels touching an interval
  endpoint are split geometrically toward that endpoint, which drills into
  integrable singularities at a fixed rate per refinement generation.
* Divergence is a statistical decision over the recorded per-generation
  partial sums, never an overflow exception: see ``classify_divergence``.

All integrands are called with numpy arrays (the 15 Kronrod abscissae of a
panel at a time) and must be vectorized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "Status",
    "QuadratureConfig",
    "FunctionalValue",
    "DEFAULT_CONFIG",
    "integrate",
    "classify_divergence",
]

# 15-point Kronrod abscissae/weights with the embedded 7-point Gauss rule
# (QUADPACK dqk15 constants).
_XGK_HALF = (
    0.9914553711208126,
    0.9491079123427585,
    0.8648644233597691,
    0.7415311855993944,
    0.5860872354676911,
    0.4058451513773972,
    0.2077849550078985,
    0.0,
)
_WGK_HALF = (
    0.0229353220105292,
    0.0630920926299785,
    0.1047900103222502,
    0.1406532597155259,
    0.1690047266392679,
    0.1903505780647854,
    0.2044329400752989,
    0.2094821410847278,
)
_WG_HALF = (
    0.1294849661688697,
    0.2797053914892767,
    0.3818300505051189,
    0.4179591836734694,
)

_XGK = np.array([-v for v in _XGK_HALF[:-1]] + [0.0] + [v for v in reversed(_XGK_HALF[:-1])])
_WGK = np.array(list(_WGK_HALF[:-1]) + [_WGK_HALF[-1]] + list(reversed(_WGK_HALF[:-1])))
_GAUSS_IDX = np.arange(1, 15, 2)
_WG = np.array(list(_WG_HALF[:-1]) + [_WG_HALF[-1]] + list(reversed(_WG_HALF[:-1])))

_EPS = np.finfo(float).eps
# Ratio by which endpoint-touching panels shrink per split.
_DRILL_FACTOR = 8.0
_PANEL_CAP = 60_000
# Window length and increment-sustainment factor for the divergence decision.
_DIVERGENCE_WINDOW = 6
_INCREMENT_SUSTAIN = 0.9


class Status(Enum):
    """Outcome classification of an improper integral."""

    FINITE = "finite"
    DIVERGENT = "divergent"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and limits for the adaptive engine.

    ``tail_mass_bound`` caps the relative contribution the outermost panel of
    a compactified tail may carry before the tail is considered resolved; it
    defaults to ``rel_tol / 10``.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_depth: int = 60
    divergence_cap: float = 1e12
    tail_mass_bound: float | None = None

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.divergence_cap <= 0:
            raise ValueError("tolerances and divergence_cap must be positive")
        if self.max_depth < 10:
            raise ValueError("max_depth must be at least 10")
        if self.tail_mass_bound is None:
            object.__setattr__(self, "tail_mass_bound", self.rel_tol / 10.0)
        elif self.tail_mass_bound <= 0:
            raise ValueError("tail_mass_bound must be positive")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class FunctionalValue:
    """Numeric result of an improper/singular integral.

    ``status is Status.DIVERGENT`` implies ``value == +inf``.  For finite
    results the error estimate satisfies
    ``error_estimate <= max(rel_tol * |value|, abs_tol)``.
    """

    value: float
    error_estimate: float
    status: Status
    node_count: int = 0

    @property
    def is_finite(self) -> bool:
        return self.status is Status.FINITE

    @property
    def is_divergent(self) -> bool:
        return self.status is Status.DIVERGENT


def classify_divergence(
    partial_sums: Sequence[float],
    config: QuadratureConfig | None = None,
    errors: Sequence[float] | None = None,
) -> Status:
    """Classify a refinement history of partial sums.

    Divergent requires at least 8 recorded generations with the last six
    increments all positive, growth that either exceeds ``divergence_cap`` or
    sustains a per-generation ratio of at least ``1 + 10 * rel_tol``, and
    increments that are not geometrically decaying (a decaying increment
    sequence is the signature of a convergent singular integral still being
    resolved).  Finite requires the embedded-rule error to meet tolerance.
    Everything else is Inconclusive.
    """
    cfg = config or DEFAULT_CONFIG
    sums = list(partial_sums)
    if errors is not None and sums:
        tol = max(cfg.rel_tol * abs(sums[-1]), cfg.abs_tol)
        if errors[-1] <= tol:
            return Status.FINITE
    if len(sums) < 8:
        return Status.INCONCLUSIVE
    window = np.asarray(sums[-(_DIVERGENCE_WINDOW + 1):], dtype=float)
    if not np.all(np.isfinite(window)):
        return Status.DIVERGENT
    increments = np.diff(window)
    if not np.all(increments > 0):
        return Status.INCONCLUSIVE
    ratio_ok = bool(np.all(increments >= 10.0 * cfg.rel_tol * np.abs(window[:-1])))
    cap_hit = abs(window[-1]) > cfg.divergence_cap
    sustained = bool(np.all(increments[1:] >= _INCREMENT_SUSTAIN * increments[:-1]))
    if (cap_hit or ratio_ok) and sustained:
        return Status.DIVERGENT
    return Status.INCONCLUSIVE


class _Piece:
    """One finite panel domain, possibly a compactified half-infinite tail.

    Kinds: "id" (x = u), "right" (x = anchor + u/(1-u), u in [0,1)) and
    "left" (x = anchor - u/(1-u)).  The u = 1 edge of a tail piece represents
    infinity.
    """

    __slots__ = ("kind", "anchor", "u0", "u1")

    def __init__(self, kind: str, anchor: float, u0: float, u1: float):
        self.kind = kind
        self.anchor = anchor
        self.u0 = u0
        self.u1 = u1

    def map(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "id":
            return u, np.ones_like(u)
        om = 1.0 - u
        w = 1.0 / (om * om)
        if self.kind == "right":
            return self.anchor + u / om, w
        return self.anchor - u / om, w

    @property
    def width(self) -> float:
        return self.u1 - self.u0


class _Panel:
    __slots__ = ("piece", "a", "b", "val", "err", "touch_lo", "touch_hi")

    def __init__(self, piece, a, b, val, err, touch_lo, touch_hi):
        self.piece = piece
        self.a = a
        self.b = b
        self.val = val
        self.err = err
        self.touch_lo = touch_lo
        self.touch_hi = touch_hi

    @property
    def at_infinity(self) -> bool:
        return self.touch_hi and self.piece.kind != "id"


def _eval_panel(f: Callable, piece: _Piece, a: float, b: float) -> tuple[float, float]:
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    u = c + h * _XGK
    x, w = piece.map(u)
    y = np.asarray(f(x), dtype=float) * w
    y = np.where(np.isfinite(y), y, 0.0)
    resk = float(np.dot(_WGK, y))
    resg = float(np.dot(_WG, y[_GAUSS_IDX]))
    resabs = float(np.dot(_WGK, np.abs(y)))
    resasc = float(np.dot(_WGK, np.abs(y - 0.5 * resk)))
    val = resk * h
    raw = abs(resk - resg) * h
    err = raw
    asc = resasc * h
    if asc != 0.0 and raw != 0.0:
        err = asc * min(1.0, (200.0 * raw / asc) ** 1.5)
    err = max(err, 50.0 * _EPS * resabs * h)
    return val, err


def _build_pieces(lower: float, upper: float, breakpoints: Iterable[float]) -> list[_Piece]:
    pts = sorted({float(b) for b in breakpoints if lower < b < upper and math.isfinite(b)})
    pieces: list[_Piece] = []
    lo_inf = math.isinf(lower)
    hi_inf = math.isinf(upper)
    if lo_inf and hi_inf:
        anchors = pts or [0.0]
        pieces.append(_Piece("left", anchors[0], 0.0, 1.0))
        for a, b in zip(anchors[:-1], anchors[1:]):
            pieces.append(_Piece("id", 0.0, a, b))
        pieces.append(_Piece("right", anchors[-1], 0.0, 1.0))
        return pieces
    if hi_inf:
        edges = [lower] + pts
        for a, b in zip(edges[:-1], edges[1:]):
            pieces.append(_Piece("id", 0.0, a, b))
        pieces.append(_Piece("right", edges[-1], 0.0, 1.0))
        return pieces
    if lo_inf:
        edges = pts + [upper]
        pieces.append(_Piece("left", edges[0], 0.0, 1.0))
        for a, b in zip(edges[:-1], edges[1:]):
            pieces.append(_Piece("id", 0.0, a, b))
        return pieces
    edges = [lower] + pts + [upper]
    for a, b in zip(edges[:-1], edges[1:]):
        pieces.append(_Piece("id", 0.0, a, b))
    return pieces


def _interval_bounds(interval) -> tuple[float, float]:
    lower, upper = interval
    lower = float(lower)
    upper = float(upper)
    if math.isnan(lower) or math.isnan(upper) or not lower < upper:
        raise ValueError(f"invalid integration interval ({lower}, {upper})")
    return lower, upper


def integrate(
    integrand: Callable,
    interval,
    config: QuadratureConfig | None = None,
    breakpoints: Iterable[float] = (),
) -> FunctionalValue:
    """Adaptively integrate ``integrand`` over ``interval``.

    ``interval`` is any (lower, upper) pair; either endpoint may be infinite.
    ``breakpoints`` are optional interior points (density anchors, suspected
    singular points) used to seed the initial subdivision.  The integrand must
    accept numpy arrays and be finite on a cofinite subset of the interior;
    non-finite samples are treated as 0, with growth on the approach region
    left to the divergence classifier.
    """
    cfg = config or DEFAULT_CONFIG
    lower, upper = _interval_bounds(interval)
    pieces = _build_pieces(lower, upper, breakpoints)

    nodes = 0
    panels: list[_Panel] = []
    for piece in pieces:
        edges = np.linspace(piece.u0, piece.u1, 9)
        for a, b in zip(edges[:-1], edges[1:]):
            val, err = _eval_panel(integrand, piece, a, b)
            nodes += 15
            panels.append(_Panel(piece, a, b, val, err, a == piece.u0, b == piece.u1))

    width_total = sum(p.width for p in pieces)
    frozen_val = 0.0
    frozen_err = 0.0
    history: list[float] = []

    for _generation in range(cfg.max_depth):
        active_val = math.fsum(p.val for p in panels)
        active_err = math.fsum(p.err for p in panels)
        total = frozen_val + active_val
        err_total = frozen_err + active_err
        history.append(total)
        tol = max(cfg.rel_tol * abs(total), cfg.abs_tol)
        if err_total <= tol:
            return FunctionalValue(total, err_total, Status.FINITE, nodes)
        if classify_divergence(history, cfg) is Status.DIVERGENT:
            return FunctionalValue(math.inf, math.inf, Status.DIVERGENT, nodes)
        if not panels or len(panels) > _PANEL_CAP:
            break

        scale = max(abs(total), cfg.abs_tol)
        next_panels: list[_Panel] = []
        for p in panels:
            budget = 0.5 * tol * ((p.b - p.a) / width_total)
            tail_blocked = p.at_infinity and abs(p.val) > cfg.tail_mass_bound * scale
            if p.err <= budget and not tail_blocked:
                frozen_val += p.val
                frozen_err += p.err
                continue
            if p.touch_lo and not p.touch_hi:
                cut = p.a + (p.b - p.a) / _DRILL_FACTOR
            elif p.touch_hi and not p.touch_lo:
                cut = p.b - (p.b - p.a) / _DRILL_FACTOR
            else:
                cut = 0.5 * (p.a + p.b)
            for (a, b, tl, th) in ((p.a, cut, p.touch_lo, False), (cut, p.b, False, p.touch_hi)):
                val, err = _eval_panel(integrand, p.piece, a, b)
                nodes += 15
                next_panels.append(_Panel(p.piece, a, b, val, err, tl, th))
        panels = next_panels

    active_val = math.fsum(p.val for p in panels)
    active_err = math.fsum(p.err for p in panels)
    total = frozen_val + active_val
    err_total = frozen_err + active_err
    history.append(total)
    tol = max(cfg.rel_tol * abs(total), cfg.abs_tol)
    if err_total <= tol:
        return FunctionalValue(total, err_total, Status.FINITE, nodes)
    if classify_divergence(history, cfg) is Status.DIVERGENT:
        return FunctionalValue(math.inf, math.inf, Status.DIVERGENT, nodes)
    return FunctionalValue(total, err_total, Status.INCONCLUSIVE, nodes)
