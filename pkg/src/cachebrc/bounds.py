"""Lower and achievable bounds on the normalized delivery time (NDT).

All functions are exact over :class:`fractions.Fraction`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from .core import (
    NetworkConfig,
    as_corner,
    as_rational,
    validate,
)

__all__ = [
    "Channel",
    "LowerBoundWitness",
    "NdtBreakdown",
    "OptimalityReport",
    "man_ndt",
    "ndt_man",
    "admissible_pairs",
    "lower_bound_component",
    "ndt_lower_bound",
    "ndt_one_shot",
    "corner_points",
    "lower_convex_envelope",
    "interpolate",
    "ndt_envelope",
    "full_cache_lower_bound",
    "optimality_report",
]

Point = Tuple[Fraction, Fraction]


class Channel(enum.Enum):
    """Which term of the one-shot max limits the delivery time."""

    BROADCAST = "broadcast"
    INTERFERENCE = "interference"


@dataclass(frozen=True)
class LowerBoundWitness:
    value: Fraction
    argmax_ell: int
    argmax_s: int
    floor_active: bool
    best_component: Fraction
    derived_at_alpha: Fraction = Fraction(1)


@dataclass(frozen=True)
class NdtBreakdown:
    man_term: Fraction
    interference_term: Fraction
    value: Fraction
    limiting_channel: Channel


@dataclass(frozen=True)
class OptimalityReport:
    lower: Fraction
    upper: Fraction
    gap: Fraction
    optimal: bool
    witness: LowerBoundWitness
    full_cache_bound: Fraction | None = None


def man_ndt(mu: Fraction, M: int) -> Fraction:
    """Broadcast (coded multicasting) delivery time ``M(1-mu)/(1+mu*M)``.

    Defined for any ``mu`` in ``[0, 1]``; :func:`ndt_man` is the corner-only
    version used by the one-shot scheme.
    """
    mu = as_rational(mu)
    return M * (1 - mu) / (1 + mu * M)


def ndt_man(config: NetworkConfig) -> Fraction:
    config = as_corner(config)
    return man_ndt(config.mu, config.M)


def admissible_pairs(K: int, M: int) -> List[Tuple[int, int]]:
    """All ``(ell, s)`` over which the lower bound maximizes, in tie-break order."""
    pairs = []
    for s in range(1, min(M + 1, K) + 1):
        for ell in range(M + 1 - s, M + 1):
            pairs.append((ell, s))
    return pairs


def lower_bound_component(mu, ell: int, s: int, K: int, M: int) -> Fraction:
    """One term of the cut-set style lower bound for a given ``(ell, s)``."""
    if not 1 <= s <= min(M + 1, K):
        raise ValueError(f"s={s} outside [1:{min(M + 1, K)}]")
    s_bar = M + 1 - s
    if not s_bar <= ell <= M:
        raise ValueError(f"ell={ell} outside [{s_bar}:{M}] for s={s}")
    mu = as_rational(mu)
    cached = s_bar * (K - s + Fraction(s_bar - 1, 2)) + Fraction(ell * (ell + 1), 2)
    return (K + ell - mu * cached) / s


def ndt_lower_bound(config: NetworkConfig) -> LowerBoundWitness:
    """Maximize the lower-bound components, floored at 1.

    The bound is derived for perfect CSI.  Since the optimal NDT cannot
    decrease when CSI degrades, it is a valid (possibly loose) bound for
    every ``alpha``; ``derived_at_alpha`` records this.
    Ties are broken by smallest ``s``, then smallest ``ell``.
    """
    validate(config)
    best = None
    best_pair = (0, 0)
    for ell, s in admissible_pairs(config.K, config.M):
        value = lower_bound_component(config.mu, ell, s, config.K, config.M)
        if best is None or value > best:
            best, best_pair = value, (ell, s)
    assert best is not None
    return LowerBoundWitness(
        value=max(Fraction(1), best),
        argmax_ell=best_pair[0],
        argmax_s=best_pair[1],
        floor_active=best < 1,
        best_component=best,
    )


def ndt_one_shot(config: NetworkConfig) -> NdtBreakdown:
    """Achievable NDT of the two-phase one-shot scheme at a corner ``mu``."""
    config = as_corner(config)
    K, M, t, alpha = config.K, config.M, config.t, config.alpha
    man = man_ndt(config.mu, M)
    if t == 0:
        # zero cache: plain unicast to all K+M receivers, independent of alpha
        interference = Fraction(K + M)
    else:
        indicator = 1 if K <= t else 0
        interference = (K + man * (1 - indicator * alpha)) / (1 + min(K - 1, t) * alpha)
    if man >= interference:
        return NdtBreakdown(man, interference, man, Channel.BROADCAST)
    return NdtBreakdown(man, interference, interference, Channel.INTERFERENCE)


def corner_points(K: int, M: int, alpha) -> List[Point]:
    alpha = as_rational(alpha)
    return [
        (Fraction(c, M), ndt_one_shot(NetworkConfig(K, M, Fraction(c, M), alpha)).value)
        for c in range(M + 1)
    ]


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_convex_envelope(points: Sequence[Point]) -> List[Point]:
    """Vertices of the lower convex hull, sorted by abscissa.

    Collinear interior points are dropped.  For repeated abscissae only the
    lowest ordinate is kept.
    """
    lowest = {}
    for x, y in points:
        if x not in lowest or y < lowest[x]:
            lowest[x] = y
    hull: List[Point] = []
    for p in sorted(lowest.items()):
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return hull


def interpolate(hull: Sequence[Point], x: Fraction) -> Fraction:
    """Exact piecewise-linear evaluation of ``hull`` at ``x``."""
    if not hull[0][0] <= x <= hull[-1][0]:
        raise ValueError(f"{x} outside [{hull[0][0]}, {hull[-1][0]}]")
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        if x0 <= x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    return hull[0][1]


def ndt_envelope(K: int, M: int, alpha, mu_query) -> Fraction:
    """Achievable NDT at any ``mu`` by memory sharing between corner points."""
    mu_query = as_rational(mu_query)
    if not 0 <= mu_query <= 1:
        raise ValueError(f"mu={mu_query} outside [0, 1]")
    return interpolate(lower_convex_envelope(corner_points(K, M, alpha)), mu_query)


def full_cache_lower_bound(K: int, M: int, alpha) -> Fraction:
    """MISO broadcast lower bound at ``mu = 1``: ``K / (1 + max(K-1, M) alpha)``.

    This is the form as published.  It matches the achievable value only
    when ``K == M + 1`` or ``alpha == 0``.
    """
    alpha = as_rational(alpha)
    return K / (1 + max(K - 1, M) * alpha)


def optimality_report(config: NetworkConfig) -> OptimalityReport:
    """Compare the best known lower bound with the achievable envelope."""
    validate(config)
    witness = ndt_lower_bound(config)
    lower = witness.value
    full = None
    if config.mu == 1:
        full = full_cache_lower_bound(config.K, config.M, config.alpha)
        lower = max(lower, full)
    upper = ndt_envelope(config.K, config.M, config.alpha, config.mu)
    gap = upper - lower
    return OptimalityReport(lower, upper, gap, gap == 0, witness, full)
