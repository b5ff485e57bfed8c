"""Exact arithmetic, combinatorics and network configuration.

Every delivery-time quantity in this package (cache ratios, NDT values,
channel-use counts) is an exact :class:`fractions.Fraction`.  Floats only
appear in :mod:`cachebrc.linksim` and as convenience shadows in serialized
output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Tuple, Union

__all__ = [
    "Rational",
    "RationalLike",
    "ConfigError",
    "NodeCountError",
    "CacheSizeError",
    "CsiQualityError",
    "LibrarySizeError",
    "NonCornerError",
    "DemandError",
    "as_rational",
    "binom",
    "NetworkConfig",
    "CornerConfig",
    "as_corner",
    "corner_values",
    "validate",
    "DemandVector",
    "worst_case_demand",
]

Rational = Fraction
RationalLike = Union[Fraction, int, str]


class ConfigError(ValueError):
    """Base class for invalid network parameters."""


class NodeCountError(ConfigError):
    """K or M is not a positive integer."""


class CacheSizeError(ConfigError):
    """Fractional cache size outside [0, 1]."""


class CsiQualityError(ConfigError):
    """CSI quality exponent outside [0, 1]."""


class LibrarySizeError(ConfigError):
    """Library too small for a worst-case (all distinct) demand."""


class NonCornerError(ConfigError):
    """Cache size is not one of 0, 1/M, ..., 1."""

    def __init__(self, mu: Fraction, M: int) -> None:
        self.mu = mu
        self.M = M
        corners = ", ".join(str(c) for c in corner_values(M))
        super().__init__(
            f"mu={mu} is not a corner point for M={M}; valid corners: {{{corners}}}"
        )


class DemandError(ValueError):
    """Malformed demand vector."""


def as_rational(value: object) -> Fraction:
    """Convert ``value`` to an exact :class:`Fraction`.

    Accepts integers, fractions, strings such as ``"3/4"``, ``"0.25"`` or
    ``"1e-2"``, and :class:`decimal.Decimal`.  Floats are converted through
    their shortest decimal representation, so ``0.1`` becomes ``1/10``.
    Non-finite input raises :class:`ValueError`.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rational numbers")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, _RationalABC):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                return Fraction(int(num), int(den))
            except ValueError as exc:
                raise ValueError(f"cannot parse rational {value!r}") from exc
            except ZeroDivisionError as exc:
                raise ValueError(f"zero denominator in {value!r}") from exc
        try:
            dec = Decimal(text)
        except InvalidOperation as exc:
            raise ValueError(f"cannot parse rational {value!r}") from exc
        if not dec.is_finite():
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(dec)
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def binom(n: int, k: int) -> int:
    """Binomial coefficient with ``binom(n, k) == 0`` outside ``0 <= k <= n``."""
    if n < 0:
        raise ValueError(f"binom requires n >= 0, got n={n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def corner_values(M: int) -> Tuple[Fraction, ...]:
    """The cache sizes ``0, 1/M, ..., 1`` at which the one-shot scheme is defined."""
    return tuple(Fraction(c, M) for c in range(M + 1))


@dataclass(frozen=True)
class NetworkConfig:
    """Parameters of the cache-aided broadcast-relay network.

    Parameters
    ----------
    K : int
        Number of user equipments (UEs).
    M : int
        Number of cache-equipped relay nodes (RNs).
    mu : Fraction
        Fractional cache size of each RN.
    alpha : Fraction
        CSI quality exponent; the estimation error variance scales as
        ``P**-alpha``.
    N : int, optional
        Library size; defaults to ``K + M``.

    Construction coerces ``mu`` and ``alpha`` to fractions but does not
    validate; call :func:`validate` (or build a :class:`CornerConfig`).
    """

    K: int
    M: int
    mu: Fraction = Fraction(0)
    alpha: Fraction = Fraction(1)
    N: int = field(default=0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "mu", as_rational(self.mu))
        object.__setattr__(self, "alpha", as_rational(self.alpha))
        if self.N == 0:
            object.__setattr__(self, "N", self.K + self.M)

    @property
    def cache_index(self) -> Fraction:
        """``mu * M``, the number of RNs sharing each cached segment."""
        return self.mu * self.M

    @property
    def is_corner(self) -> bool:
        return self.cache_index.denominator == 1

    def with_(self, **changes) -> "NetworkConfig":
        return replace(self, **changes)


def validate(config: NetworkConfig) -> NetworkConfig:
    """Return ``config`` unchanged if it is admissible, else raise.

    Raises
    ------
    NodeCountError
        ``K`` or ``M`` is not a positive integer.
    CacheSizeError
        ``mu`` outside ``[0, 1]``.
    CsiQualityError
        ``alpha`` outside ``[0, 1]``.
    LibrarySizeError
        ``N < K + M``.
    """
    for name in ("K", "M", "N"):
        value = getattr(config, name)
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise NodeCountError(f"{name} must be a positive integer, got {value!r}")
    if not 0 <= config.mu <= 1:
        raise CacheSizeError(f"mu must lie in [0, 1], got {config.mu}")
    if not 0 <= config.alpha <= 1:
        raise CsiQualityError(f"alpha must lie in [0, 1], got {config.alpha}")
    if config.N < config.K + config.M:
        raise LibrarySizeError(
            f"N={config.N} is smaller than K+M={config.K + config.M}"
        )
    return config


@dataclass(frozen=True)
class CornerConfig(NetworkConfig):
    """A validated :class:`NetworkConfig` whose ``mu * M`` is an integer."""

    def __post_init__(self) -> None:
        super().__post_init__()
        validate(self)
        if not self.is_corner:
            raise NonCornerError(self.mu, self.M)

    @property
    def t(self) -> int:
        """Integer cache index ``mu * M``."""
        return int(self.cache_index)


def as_corner(config: NetworkConfig) -> CornerConfig:
    """Validate ``config`` and return it as a :class:`CornerConfig`."""
    if isinstance(config, CornerConfig):
        return config
    return CornerConfig(K=config.K, M=config.M, mu=config.mu, alpha=config.alpha, N=config.N)


@dataclass(frozen=True)
class DemandVector:
    """File requests of the ``K`` UEs followed by the ``M`` RNs (1-based indices)."""

    d: Tuple[int, ...]
    K: int
    M: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "d", tuple(int(x) for x in self.d))
        if len(self.d) != self.K + self.M:
            raise DemandError(
                f"demand vector has {len(self.d)} entries, expected K+M={self.K + self.M}"
            )

    def check(self, N: int) -> "DemandVector":
        bad = [x for x in self.d if not 1 <= x <= N]
        if bad:
            raise DemandError(f"file indices {bad} outside [1:{N}]")
        return self

    def ue(self, k: int) -> int:
        """File requested by UE ``k`` (1-based)."""
        return self.d[k - 1]

    def rn(self, m: int) -> int:
        """File requested by RN ``m`` (1-based)."""
        return self.d[self.K + m - 1]

    @property
    def is_worst_case(self) -> bool:
        return len(set(self.d)) == len(self.d)


def worst_case_demand(config: NetworkConfig) -> DemandVector:
    """The canonical all-distinct demand ``(1, 2, ..., K+M)``."""
    if config.N < config.K + config.M:
        raise LibrarySizeError(
            f"N={config.N} is smaller than K+M={config.K + config.M}"
        )
    return DemandVector(tuple(range(1, config.K + config.M + 1)), config.K, config.M)
