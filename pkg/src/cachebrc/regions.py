"""Perfect-CSI region taxonomy of the one-shot NDT over ``(mu, K, M)``.

Rows are tested in a fixed order (A1, A2, B, E, C, D) and the first match
wins, so boundary triplets shared by two rows get a deterministic label.
Comparisons against ``1/(1-2mu)`` are evaluated in the cross-multiplied
form ``M(1-2mu) < 1``, which reads as ``+inf`` at ``mu = 1/2`` and keeps the
literal meaning of the inequality for ``mu > 1/2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .bounds import man_ndt
from .core import NetworkConfig, as_rational

__all__ = [
    "Region",
    "NdtFormula",
    "RegionLabel",
    "RegionMap",
    "classify",
    "region_ndt",
    "region_map",
    "boundary_curves",
    "frontier_M",
    "ab_border_M",
    "ed_border_M",
]


class NdtFormula(enum.Enum):
    ONE = "one"
    MAN = "man"
    INTERFERENCE_LIMITED = "interference_limited"


class Region(enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E = "E"
    UNCLASSIFIED = "Unclassified"

    @property
    def formula(self) -> Optional[NdtFormula]:
        return _FORMULA.get(self)


_FORMULA = {
    Region.A: NdtFormula.ONE,
    Region.B: NdtFormula.MAN,
    Region.E: NdtFormula.MAN,
    Region.C: NdtFormula.INTERFERENCE_LIMITED,
    Region.D: NdtFormula.INTERFERENCE_LIMITED,
}


@dataclass(frozen=True)
class RegionLabel:
    label: Region
    row: Optional[str]

    @property
    def ndt_formula(self) -> Optional[NdtFormula]:
        return self.label.formula


def _below_ab_border(mu: Fraction, M: int) -> bool:
    # M < 1/(1-2mu) for mu <= 1/2, M > 1/(1-2mu) for mu > 1/2
    return M * (1 - 2 * mu) < 1


def classify(mu, K: int, M: int) -> RegionLabel:
    mu = as_rational(mu)
    if not 0 <= mu <= 1:
        raise ValueError(f"mu={mu} outside [0, 1]")
    if K < 1 or M < 1:
        raise ValueError("K and M must be positive")
    t = mu * M
    man = man_ndt(mu, M)
    half = Fraction(1, 2)

    if mu <= half and K <= t < M and _below_ab_border(mu, M):
        return RegionLabel(Region.A, "A1")
    if mu > half and K <= t <= M and _below_ab_border(mu, M):
        return RegionLabel(Region.A, "A2")
    if mu <= half and K <= t and not _below_ab_border(mu, M):
        return RegionLabel(Region.B, "B")
    if t < K <= t * man <= M:
        return RegionLabel(Region.E, "E")
    if t < M < K:
        return RegionLabel(Region.C, "C")
    if t * max(Fraction(1), man) < K <= M:
        return RegionLabel(Region.D, "D")
    return RegionLabel(Region.UNCLASSIFIED, None)


def region_ndt(label, config: NetworkConfig) -> Fraction:
    """Achievable NDT that a region's row of the taxonomy prescribes."""
    region = label.label if isinstance(label, RegionLabel) else Region(label)
    man = man_ndt(config.mu, config.M)
    if region is Region.A:
        return Fraction(1)
    if region in (Region.B, Region.E):
        return man
    if region in (Region.C, Region.D):
        return (config.K + man) / (1 + config.mu * config.M)
    raise ValueError("no NDT formula for an unclassified triplet")


def frontier_M(mu: float, K: int) -> float:
    """RN standalone frontier ``mu * M = K``."""
    return K / mu if mu > 0 else math.inf


def ab_border_M(mu: float) -> float:
    """``M = 1/(1-2mu)``, the locus where the broadcast NDT equals 1."""
    return 1 / (1 - 2 * mu) if mu < 0.5 else math.inf


def ed_border_M(mu: float, K: int) -> float:
    """Solve ``K = mu*M * M(1-mu)/(1+mu*M)`` for ``M`` (positive root)."""
    if mu <= 0:
        return math.inf
    if mu >= 1:
        return math.inf
    a = mu * (1 - mu)
    b = -K * mu
    c = -K
    return (-b + math.sqrt(b * b - 4 * a * c)) / (2 * a)


@dataclass(frozen=True)
class RegionMap:
    K: int
    mu_grid: Tuple[Fraction, ...]
    m_range: Tuple[int, int]
    cells: Tuple[Tuple[RegionLabel, ...], ...]
    curves: Dict[str, List[Tuple[Fraction, float]]]

    @property
    def m_values(self) -> range:
        return range(self.m_range[0], self.m_range[1] + 1)

    def label(self, mu: Fraction, M: int) -> Region:
        i = self.mu_grid.index(mu)
        return self.cells[i][M - self.m_range[0]].label


def boundary_curves(K: int, mu_grid) -> Dict[str, List[Tuple[Fraction, float]]]:
    """Sample the three analytic region borders at each grid ``mu``.

    Points where a border is at infinity are omitted.
    """
    curves: Dict[str, List[Tuple[Fraction, float]]] = {
        "standalone_frontier": [],
        "ab_border": [],
        "ed_border": [],
    }
    for mu in mu_grid:
        x = float(mu)
        for name, value in (
            ("standalone_frontier", frontier_M(x, K)),
            ("ab_border", ab_border_M(x)),
            ("ed_border", ed_border_M(x, K)),
        ):
            if math.isfinite(value):
                curves[name].append((mu, value))
    return curves


def region_map(K: int, mu_step, m_max: int, m_min: int = 1) -> RegionMap:
    """Classify every ``(mu, M)`` cell with ``mu`` on a uniform grid over [0, 1]."""
    mu_step = as_rational(mu_step)
    if mu_step <= 0:
        raise ValueError("mu_step must be positive")
    if m_max < m_min or m_min < 1:
        raise ValueError("need 1 <= m_min <= m_max")
    count = int(1 / mu_step)
    grid = [mu_step * i for i in range(count + 1)]
    if grid[-1] != 1:
        grid.append(Fraction(1))
    cells = tuple(
        tuple(classify(mu, K, M) for M in range(m_min, m_max + 1)) for mu in grid
    )
    return RegionMap(K, tuple(grid), (m_min, m_max), cells, boundary_curves(K, grid))
