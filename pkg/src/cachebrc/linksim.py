"""Monte-Carlo check of the power levels behind the one-shot scheme.

Channel estimates are i.i.d. CN(0, 1); estimation errors are independent
CN(0, sigma^2) with ``sigma^2 = P**-alpha``.  Precoders only ever see the
estimates, while received powers are evaluated on the true channels.

For a fixed seed, the estimates and the *normalized* errors are identical
at every power level, and only the error scale changes with ``P``.  These
common random numbers make slopes across a ``P`` grid very stable.

Arrays carry an optional leading batch axis (one entry per trial).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .core import as_rational

__all__ = [
    "Quantity",
    "ChannelRealization",
    "ExponentEstimate",
    "SingularChannelError",
    "draw_channels",
    "zf_residual_power",
    "phase1_powers",
    "phase2_rates",
    "estimate_exponents",
    "regress_slope",
    "DEFAULT_SNRS",
]

DEFAULT_SNRS = (1e4, 1e6, 1e8)


class Quantity(enum.Enum):
    DESIRED_SIGNAL = "desired_signal"
    RESIDUAL_INTERFERENCE = "residual_interference"
    COMMON_RATE = "common_rate"
    PRIVATE_RATE = "private_rate"


class SingularChannelError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class ChannelRealization:
    """True channels, their estimates and the estimation errors at power ``P``.

    Attributes
    ----------
    f, f_hat, f_err : ndarray, shape (..., M)
        BS to relay gains.
    g, g_hat, g_err : ndarray, shape (..., K)
        BS to UE gains.
    H, H_hat, H_err : ndarray, shape (..., K, M)
        Relay to UE gains; ``H[..., k, m]`` is RN ``m+1`` to UE ``k+1``.
    P : float
        Per-node transmit power (noise has unit variance).
    sigma2 : float
        Estimation error variance ``P**-alpha``.
    """

    f: np.ndarray
    g: np.ndarray
    H: np.ndarray
    f_hat: np.ndarray
    g_hat: np.ndarray
    H_hat: np.ndarray
    f_err: np.ndarray
    g_err: np.ndarray
    H_err: np.ndarray
    P: float
    sigma2: float

    @property
    def K(self) -> int:
        return self.g.shape[-1]

    @property
    def M(self) -> int:
        return self.f.shape[-1]


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def draw_channels(K: int, M: int, alpha, P: float, seed: int,
                  trials: Optional[int] = None) -> ChannelRealization:
    """Draw one realization (or ``trials`` of them) for CSI quality ``alpha``.

    The same ``seed`` gives the same estimates and normalized errors for
    every ``P``.
    """
    if P <= 1:
        raise ValueError(f"P must exceed 1, got {P}")
    alpha = float(as_rational(alpha))
    lead = () if trials is None else (int(trials),)
    rng = np.random.default_rng(seed)
    f_hat = _cn(rng, lead + (M,))
    g_hat = _cn(rng, lead + (K,))
    H_hat = _cn(rng, lead + (K, M))
    f_unit = _cn(rng, lead + (M,))
    g_unit = _cn(rng, lead + (K,))
    H_unit = _cn(rng, lead + (K, M))
    sigma2 = P ** -alpha
    sigma = np.sqrt(sigma2)
    f_err, g_err, H_err = sigma * f_unit, sigma * g_unit, sigma * H_unit
    return ChannelRealization(
        f_hat + f_err, g_hat + g_err, H_hat + H_err,
        f_hat, g_hat, H_hat, f_err, g_err, H_err, float(P), float(sigma2),
    )


def _idx(items: Sequence[int]) -> np.ndarray:
    return np.asarray(items, dtype=int) - 1


def _joint_rows(real: ChannelRealization, ues, holders, estimated: bool) -> np.ndarray:
    """Rows ``[g_k, h_k,holders]`` of the distributed BS+relay array, shape (..., |ues|, 1+|holders|)."""
    g = real.g_hat if estimated else real.g
    H = real.H_hat if estimated else real.H
    u, h = _idx(ues), _idx(holders)
    return np.concatenate([g[..., u, None], H[..., u, :][..., :, h]], axis=-1)


def _check_finite(*arrays: np.ndarray) -> None:
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise SingularChannelError("singular channel estimate; redraw with another seed")


def _infnorm_scale(w: np.ndarray) -> np.ndarray:
    # every node transmits at most unit amplitude, i.e. power P after scaling
    peak = np.max(np.abs(w), axis=-1, keepdims=True)
    return w / peak


def zf_residual_power(real: ChannelRealization, nulled_ues: Sequence[int],
                      beamformer_holders: Sequence[int]) -> np.ndarray:
    """Received power of a relay-bound symbol at UEs where it was zero-forced.

    The BS sends the symbol with unit coefficient and the cache holders add
    a compensating signal solving ``H_hat[U, S] v = -g_hat[U]`` (least norm).
    Returns ``P * |g_k + h_k,S v|^2`` on the true channels, after per-node
    normalization, with shape (..., len(nulled_ues)).
    """
    u, h = _idx(nulled_ues), _idx(beamformer_holders)
    if len(nulled_ues) > len(beamformer_holders):
        raise ValueError("cannot null at more UEs than there are cache holders")
    if len(nulled_ues) == 0:
        return np.zeros(real.g.shape[:-1] + (0,))
    A = real.H_hat[..., u, :][..., :, h]
    b = -real.g_hat[..., u]
    v = np.einsum("...ij,...j->...i", np.linalg.pinv(A), b)
    w = _infnorm_scale(np.concatenate([np.ones(v.shape[:-1] + (1,)), v], axis=-1))
    _check_finite(w)
    rows = _joint_rows(real, nulled_ues, beamformer_holders, estimated=False)
    return real.P * np.abs(np.einsum("...ij,...j->...i", rows, w)) ** 2


def _zf_precoders(rows_hat: np.ndarray) -> np.ndarray:
    """Column ``k`` steers toward row ``k`` and nulls every other row (estimates only)."""
    n = rows_hat.shape[-2]
    cols = []
    for k in range(n):
        others = np.delete(rows_hat, k, axis=-2)
        target = np.conj(rows_hat[..., k, :])
        if others.shape[-2]:
            proj = np.linalg.pinv(others) @ others
            target = target - np.einsum("...ij,...j->...i", proj, target)
        cols.append(_infnorm_scale(target))
    W = np.stack(cols, axis=-1)
    _check_finite(W)
    return W


def phase1_powers(real: ChannelRealization, t: int) -> Dict[Quantity, np.ndarray]:
    """Desired and residual powers at the served UEs of one phase-1 channel use.

    Uses relay group ``{1..t+1}`` and serves UEs ``{1..min(K, t)}``.  The
    symbol for RN ``m`` is held by the other ``t`` members of the group.  The
    UE symbols are sent by the BS with the holders ``{1..t}``, zero-forced
    at the other served UEs.
    """
    K, M = real.K, real.M
    if not 1 <= t < M:
        raise ValueError("phase 1 needs 1 <= t < M")
    served = list(range(1, min(K, t) + 1))
    group = list(range(1, t + 2))
    residuals = [
        zf_residual_power(real, served, [x for x in group if x != m]) for m in group
    ]
    ue_holders = list(range(1, t + 1))
    W = _zf_precoders(_joint_rows(real, served, ue_holders, estimated=True))
    rx = real.P * np.abs(_joint_rows(real, served, ue_holders, estimated=False) @ W) ** 2
    desired = np.diagonal(rx, axis1=-2, axis2=-1)
    off = ~np.eye(len(served), dtype=bool)
    ue_residual = rx[..., off]
    return {
        Quantity.DESIRED_SIGNAL: desired,
        Quantity.RESIDUAL_INTERFERENCE: np.concatenate(residuals + [ue_residual], axis=-1),
    }


def phase2_rates(real: ChannelRealization, t: int, alpha) -> Dict[Quantity, np.ndarray]:
    """Per-UE achievable rates (bits per channel use) of one phase-2 channel use.

    The BS sends a common symbol at power ``P/2``.  Private symbols for UEs
    ``{1..min(K, t+1)}`` are sent at power ``P**alpha / (2 psi')`` by the BS
    and relays ``{1..t}``, zero-forced on the estimates.  Each UE decodes
    the common symbol first, treating everything else as noise, then
    cancels it and decodes its private symbol.
    """
    alpha = float(as_rational(alpha))
    K = real.K
    served = list(range(1, min(K, t + 1) + 1))
    holders = list(range(1, t + 1))
    psi_p = len(served)
    p_common = real.P / 2
    p_private = real.P ** alpha / (2 * psi_p)
    W = _zf_precoders(_joint_rows(real, served, holders, estimated=True))
    rx = p_private * np.abs(_joint_rows(real, served, holders, estimated=False) @ W) ** 2
    own = np.diagonal(rx, axis1=-2, axis2=-1)
    cross = rx.sum(axis=-1) - own
    common = p_common * np.abs(real.g[..., _idx(served)]) ** 2
    return {
        Quantity.COMMON_RATE: np.log2(1 + common / (1 + own + cross)),
        Quantity.PRIVATE_RATE: np.log2(1 + own / (1 + cross)),
    }


@dataclass(frozen=True)
class ExponentEstimate:
    quantity: Quantity
    slope: float
    stderr: float
    trials: int
    expected: float
    means: tuple = ()
    note: str = ""

    def within(self, tol: float) -> bool:
        return bool(np.isfinite(self.slope)) and abs(self.slope - self.expected) <= tol


def regress_slope(x: Sequence[float], y: Sequence[float], y_se: Optional[Sequence[float]] = None):
    """Least-squares slope of ``y`` on ``x`` and its standard error.

    With ``y_se`` (standard errors of the ``y`` values) the error is
    propagated from them; otherwise it comes from the fit residuals.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = x - x.mean()
    sxx = float(xc @ xc)
    c = xc / sxx
    slope = float(c @ y)
    if y_se is not None:
        stderr = float(np.sqrt(np.sum((c * np.asarray(y_se)) ** 2)))
    elif len(x) > 2:
        resid = y - (y.mean() + slope * xc)
        stderr = float(np.sqrt(resid @ resid / (len(x) - 2) / sxx))
    else:
        stderr = float("nan")
    return slope, stderr


def estimate_exponents(K: int, M: int, mu, alpha, P_list: Sequence[float] = DEFAULT_SNRS,
                       trials: int = 10_000, seed: int = 0) -> List[ExponentEstimate]:
    """Regress the four tracked quantities against ``log P``.

    Powers are averaged in the log domain (``mean log10 power`` against
    ``log10 P``).  The ZF residual involves an inverse channel matrix whose
    linear-domain mean need not be finite.  Rates are regressed as mean
    ``log2(1 + SINR)`` against ``log2 P``, so each slope is a DoF.
    """
    mu, alpha_q = as_rational(mu), as_rational(alpha)
    t = mu * M
    if t.denominator != 1 or not 1 <= t < M:
        raise ValueError("need a corner mu with 1 <= mu*M < M so that phase 1 exists")
    t = int(t)
    P_list = [float(p) for p in P_list]
    if len(P_list) < 3:
        raise ValueError("need at least three power levels")
    if any(b <= a for a, b in zip(P_list, P_list[1:])):
        raise ValueError("power levels must be strictly increasing")
    if trials < 1:
        raise ValueError("need at least one trial")
    a = float(alpha_q)
    expected = {
        Quantity.DESIRED_SIGNAL: 1.0,
        Quantity.RESIDUAL_INTERFERENCE: 1.0 - a,
        Quantity.COMMON_RATE: 1.0 - a,
        Quantity.PRIVATE_RATE: a,
    }
    samples: Dict[Quantity, List[np.ndarray]] = {q: [] for q in Quantity}
    for P in P_list:
        real = draw_channels(K, M, alpha_q, P, seed, trials=trials)
        powers = phase1_powers(real, t)
        rates = phase2_rates(real, t, alpha_q)
        for q, v in powers.items():
            samples[q].append(np.log10(v).mean(axis=-1))
        for q, v in rates.items():
            samples[q].append(v.mean(axis=-1))

    out = []
    for q in Quantity:
        per_p = samples[q]
        means = [float(s.mean()) for s in per_p]
        if trials > 1:
            se = [float(s.std(ddof=1) / np.sqrt(trials)) for s in per_p]
            note = ""
        else:
            se = None
            note = "single trial: standard error unavailable"
        log_p = np.log10(P_list) if q in powers else np.log2(P_list)
        slope, stderr = regress_slope(log_p, means, se)
        out.append(ExponentEstimate(q, slope, stderr, trials, expected[q], tuple(means), note))
    return out
