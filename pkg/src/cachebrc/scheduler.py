"""Explicit two-phase one-shot delivery schedule and its brute-force checker.

Each file is split into ``L' = Gamma * C(M, t)`` unit symbols, where
``t = mu*M``, ``psi = min(K, t)`` and ``Gamma = C(K, psi)``.  A symbol is
labelled by the ``t`` relays that cache it and a copy index in
``[1:Gamma]``.

Phase 1 runs one channel use per (relay group of size ``t+1``, copy index)
pair.  The BS multicasts to the relay group while the cache holders null the
relay symbols at ``psi`` UEs, each of which receives ``alpha`` DoF of its
own file.  Phase 2 delivers the rest of the UE demand with ``psi' =
min(K, t+1)`` private streams of ``alpha`` DoF plus one common stream of
``1 - alpha`` DoF per channel use.

Phase 2 generally spans a fractional number of channel uses, so it is
stored as a cyclic pattern of ``K`` slot templates repeated ``T2/K`` times.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .core import (
    CornerConfig,
    DemandVector,
    NetworkConfig,
    as_corner,
    binom,
    worst_case_demand,
)

__all__ = [
    "SymbolId",
    "Placement",
    "Phase1Slot",
    "Phase2Slot",
    "Phase2Plan",
    "Schedule",
    "VerificationReport",
    "SchemeCounts",
    "scheme_counts",
    "build_placement",
    "build_schedule",
    "verify_schedule",
    "schedule_ndt",
    "serialize_schedule",
]


class SymbolId(NamedTuple):
    file: int
    share_set: Tuple[int, ...]
    copy: int

    def __str__(self) -> str:
        members = ".".join(map(str, self.share_set)) or "-"
        return f"{self.file}/{members}/{self.copy}"


@dataclass(frozen=True)
class SchemeCounts:
    """Closed-form combinatorial quantities of the one-shot scheme."""

    t: int
    psi: int
    psi_prime: int
    gamma: int
    symbols_per_file: int
    T1: int
    phase1_ue_dof: Fraction
    T2: Fraction

    @property
    def total(self) -> Fraction:
        return self.T1 + self.T2

    @property
    def ndt(self) -> Fraction:
        return Fraction(self.total) / self.symbols_per_file


def scheme_counts(config: NetworkConfig) -> SchemeCounts:
    config = as_corner(config)
    K, M, t, alpha = config.K, config.M, config.t, config.alpha
    psi = min(K, t)
    gamma = binom(K, psi)
    L = gamma * binom(M, t)
    T1 = gamma * binom(M, t + 1)
    if t == 0:
        L_tilde = Fraction(0)
        T2 = Fraction(K * L)
    else:
        L_tilde = binom(M, t + 1) * binom(K - 1, psi - 1) * alpha
        T2 = K * (L - L_tilde) / (1 + min(K - 1, t) * alpha) if L_tilde < L else Fraction(0)
    return SchemeCounts(t, psi, min(K, t + 1), gamma, L, T1, Fraction(L_tilde), Fraction(T2))


@dataclass(frozen=True)
class Placement:
    """Uncoded symmetric cache contents of every relay.

    ``symbols[m]`` is the frozenset of :class:`SymbolId` cached at RN ``m``.
    """

    M: int
    N: int
    t: int
    gamma: int
    symbols: Dict[int, FrozenSet[SymbolId]]

    @property
    def symbols_per_file(self) -> int:
        return self.gamma * binom(self.M, self.t)

    def cached_by(self, m: int) -> FrozenSet[SymbolId]:
        return self.symbols[m]

    def holders(self, symbol: SymbolId) -> List[int]:
        return [m for m in range(1, self.M + 1) if symbol in self.symbols[m]]

    def all_symbols(self, file: int) -> Iterable[SymbolId]:
        for share in itertools.combinations(range(1, self.M + 1), self.t):
            for j in range(1, self.gamma + 1):
                yield SymbolId(file, share, j)


@lru_cache(maxsize=128)
def _placement(M: int, N: int, t: int, gamma: int) -> Placement:
    per_rn: Dict[int, set] = {m: set() for m in range(1, M + 1)}
    if t > 0:
        for share in itertools.combinations(range(1, M + 1), t):
            for n in range(1, N + 1):
                for j in range(1, gamma + 1):
                    sym = SymbolId(n, share, j)
                    for m in share:
                        per_rn[m].add(sym)
    return Placement(M, N, t, gamma, {m: frozenset(s) for m, s in per_rn.items()})


def build_placement(config: NetworkConfig) -> Placement:
    """Cache every symbol at exactly the ``t`` relays named by its share set."""
    counts = scheme_counts(config)
    return _placement(config.M, config.N, counts.t, counts.gamma)


@dataclass(frozen=True)
class Phase1Slot:
    rn_group: Tuple[int, ...]
    ue_group: Tuple[int, ...]
    delivered: Tuple[Tuple[int, SymbolId], ...]
    ue_dof: Fraction

    @property
    def delivered_rn_symbols(self) -> Dict[int, SymbolId]:
        return dict(self.delivered)


@dataclass(frozen=True)
class Phase2Slot:
    private_ues: Tuple[int, ...]
    private_dof: Fraction
    common_ue: Optional[int]
    common_dof: Fraction

    @property
    def total_dof(self) -> Fraction:
        return len(self.private_ues) * self.private_dof + self.common_dof


@dataclass(frozen=True)
class Phase2Plan:
    """Cyclic phase-2 pattern plus the resulting per-UE DoF ledger.

    The ``pattern`` is run ``repetitions`` times (possibly a fraction), so
    phase 2 spans ``T2 = repetitions * len(pattern)`` channel uses.
    """

    T2: Fraction
    pattern: Tuple[Phase2Slot, ...]
    repetitions: Fraction
    ue_dof: Tuple[Tuple[int, Fraction], ...]

    @property
    def ledger(self) -> Dict[int, Fraction]:
        return dict(self.ue_dof)


@dataclass(frozen=True)
class Schedule:
    config: CornerConfig
    demand: DemandVector
    placement: Placement = field(repr=False, compare=False)
    phase1: Tuple[Phase1Slot, ...]
    phase2: Phase2Plan
    symbols_per_file: int

    @property
    def T1(self) -> int:
        return len(self.phase1)

    @property
    def T2(self) -> Fraction:
        return self.phase2.T2


def _ue_subsets(K: int, psi: int) -> List[Tuple[int, ...]]:
    return list(itertools.combinations(range(1, K + 1), psi))


def _phase2_plan(K: int, t: int, alpha: Fraction, T2: Fraction,
                 residual: Dict[int, Fraction]) -> Phase2Plan:
    if t == 0:
        pattern = tuple(Phase2Slot((k,), Fraction(1), None, Fraction(0)) for k in range(1, K + 1))
    else:
        psi_p = min(K, t + 1)
        pattern = tuple(
            Phase2Slot(
                tuple(sorted((k - 1 + i) % K + 1 for i in range(psi_p))),
                alpha,
                k,
                1 - alpha,
            )
            for k in range(1, K + 1)
        )
    repetitions = T2 / K
    totals = {k: Fraction(0) for k in range(1, K + 1)}
    for slot in pattern:
        for k in slot.private_ues:
            totals[k] += slot.private_dof
        if slot.common_ue is not None:
            totals[slot.common_ue] += slot.common_dof
    ledger = tuple((k, totals[k] * repetitions) for k in range(1, K + 1))
    if T2 > 0:
        for k, dof in ledger:
            if dof != residual[k]:
                raise AssertionError(f"phase-2 ledger for UE{k} is {dof}, expected {residual[k]}")
    return Phase2Plan(T2, pattern, repetitions, ledger)


def build_schedule(config: NetworkConfig, demand: Optional[DemandVector] = None) -> Schedule:
    """Construct the one-shot schedule for ``config`` and ``demand``.

    ``demand`` defaults to the worst case.  Phase-1 slots are ordered
    lexicographically by relay group, then by copy index; copy ``j`` serves
    the ``j``-th lexicographic UE subset of size ``psi``.
    """
    config = as_corner(config)
    if demand is None:
        demand = worst_case_demand(config)
    if demand.K != config.K or demand.M != config.M:
        raise ValueError(
            f"demand is for (K={demand.K}, M={demand.M}), config has (K={config.K}, M={config.M})"
        )
    demand.check(config.N)
    counts = scheme_counts(config)
    K, M, t = config.K, config.M, counts.t
    placement = build_placement(config)
    ue_groups = _ue_subsets(K, counts.psi)

    ue_dof = Fraction(1) if t == 0 else config.alpha
    ue_dof = Fraction(0) if counts.psi == 0 else ue_dof
    phase1 = []
    for group in itertools.combinations(range(1, M + 1), t + 1):
        for j in range(1, counts.gamma + 1):
            delivered = tuple(
                (m, SymbolId(demand.rn(m), tuple(x for x in group if x != m), j))
                for m in group
            )
            phase1.append(Phase1Slot(group, ue_groups[j - 1], delivered, ue_dof))

    L = counts.symbols_per_file
    useful = {k: min(counts.phase1_ue_dof, L) for k in range(1, K + 1)}
    residual = {k: L - useful[k] for k in range(1, K + 1)}
    phase2 = _phase2_plan(K, t, config.alpha, counts.T2, residual)
    return Schedule(config, demand, placement, tuple(phase1), phase2, L)


@dataclass
class VerificationReport:
    """Outcome of an independent recount of a schedule."""

    rn_complete: bool
    zf_feasible: bool
    ue_complete: bool
    phase2_consistent: bool
    cache_ratio: Fraction
    cache_ratio_ok: bool
    ue_dof: Dict[int, Fraction]
    phase1_ue_dof: Dict[int, Fraction]
    T1: int
    T2: Fraction
    ndt: Fraction
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.rn_complete
            and self.zf_feasible
            and self.ue_complete
            and self.phase2_consistent
            and self.cache_ratio_ok
        )


def verify_schedule(schedule: Schedule, config: Optional[NetworkConfig] = None) -> VerificationReport:
    """Recount every claim of ``schedule`` from first principles.

    Nothing here reuses the closed-form counts of :func:`scheme_counts`;
    the only inputs are the slot lists, the placement and the demand.
    Violations are collected, not raised.
    """
    config = as_corner(config if config is not None else schedule.config)
    K, M, alpha = config.K, config.M, config.alpha
    demand = schedule.demand
    placement = schedule.placement
    L = schedule.symbols_per_file
    violations: List[str] = []

    # cache ratio: every RN stores the same fraction of every file
    per_file_total: Dict[int, int] = {}
    per_rn_file: Dict[Tuple[int, int], int] = {}
    for m in range(1, M + 1):
        for sym in placement.cached_by(m):
            per_rn_file[(m, sym.file)] = per_rn_file.get((m, sym.file), 0) + 1
    for n in range(1, config.N + 1):
        per_file_total[n] = sum(1 for _ in placement.all_symbols(n))
    ratios = {
        Fraction(per_rn_file.get((m, n), 0), per_file_total[n])
        for m in range(1, M + 1)
        for n in range(1, config.N + 1)
    }
    cache_ratio = ratios.pop() if len(ratios) == 1 else Fraction(-1)
    cache_ratio_ok = cache_ratio == config.mu
    if not cache_ratio_ok:
        violations.append(f"cache ratio not uniformly {config.mu}: {sorted(ratios | {cache_ratio})}")
    if any(n != L for n in per_file_total.values()):
        violations.append("symbols per file disagree with the schedule's L'")

    # phase 1: relay coverage and zero-forcing feasibility
    t = placement.t
    received: Dict[int, Dict[SymbolId, int]] = {m: {} for m in range(1, M + 1)}
    zf_feasible = True
    for idx, slot in enumerate(schedule.phase1, start=1):
        targets = dict(slot.delivered)
        if sorted(targets) != sorted(slot.rn_group):
            zf_feasible = False
            violations.append(f"P1 slot {idx}: delivered RNs {sorted(targets)} != group {slot.rn_group}")
        if len(slot.ue_group) > t:
            zf_feasible = False
            violations.append(f"P1 slot {idx}: {len(slot.ue_group)} nulled UEs exceed {t} cache holders")
        for m, sym in targets.items():
            received[m][sym] = received[m].get(sym, 0) + 1
            others = [x for x in slot.rn_group if x != m]
            missing = [x for x in others if sym not in placement.cached_by(x)]
            if missing or len(sym.share_set) != t:
                zf_feasible = False
                violations.append(
                    f"P1 slot {idx}: symbol {sym} for RN{m} not cached at RN{missing or others}"
                )
    rn_complete = True
    for m in range(1, M + 1):
        wanted = demand.rn(m)
        cached = placement.cached_by(m)
        for sym in placement.all_symbols(wanted):
            if sym in cached:
                continue
            hits = received[m].get(sym, 0)
            if hits != 1:
                rn_complete = False
                violations.append(f"RN{m}: uncached symbol {sym} delivered {hits} times")
        for sym, hits in received[m].items():
            if sym.file != wanted or sym in cached:
                rn_complete = False
                violations.append(f"RN{m}: received unneeded symbol {sym}")

    # UE DoF: phase-1 capacity (capped at the file size) plus phase-2 ledger
    phase1_dof = {k: Fraction(0) for k in range(1, K + 1)}
    for slot in schedule.phase1:
        for k in slot.ue_group:
            phase1_dof[k] += slot.ue_dof
    plan = schedule.phase2
    phase2_consistent = True
    per_use = 1 + min(K - 1, t) * alpha
    pattern_dof = {k: Fraction(0) for k in range(1, K + 1)}
    for i, slot in enumerate(plan.pattern, start=1):
        if slot.total_dof != per_use:
            phase2_consistent = False
            violations.append(f"P2 template {i}: carries {slot.total_dof} DoF, expected {per_use}")
        for k in slot.private_ues:
            pattern_dof[k] += slot.private_dof
        if slot.common_ue is not None:
            pattern_dof[slot.common_ue] += slot.common_dof
    ledger = plan.ledger
    for k in range(1, K + 1):
        if pattern_dof[k] * plan.repetitions != ledger.get(k, 0):
            phase2_consistent = False
            violations.append(f"P2 ledger for UE{k} disagrees with the slot pattern")
    if plan.repetitions * len(plan.pattern) != plan.T2:
        phase2_consistent = False
        violations.append("P2 pattern repetitions do not span T2 channel uses")
    if sum(ledger.values()) != plan.T2 * per_use:
        phase2_consistent = False
        violations.append("P2 ledger does not conserve T2 * per-use DoF")

    ue_dof = {k: min(phase1_dof[k], L) + ledger.get(k, Fraction(0)) for k in range(1, K + 1)}
    ue_complete = all(v == L for v in ue_dof.values())
    for k, v in ue_dof.items():
        if v != L:
            violations.append(f"UE{k}: accumulated {v} DoF, needs {L}")

    T1 = len(schedule.phase1)
    ndt = (T1 + plan.T2) / L
    return VerificationReport(
        rn_complete, zf_feasible, ue_complete, phase2_consistent, cache_ratio,
        cache_ratio_ok, ue_dof, phase1_dof, T1, plan.T2, ndt, violations,
    )


def schedule_ndt(config: NetworkConfig) -> Fraction:
    """``(T1 + T2) / L'`` of the worst-case schedule."""
    schedule = build_schedule(config)
    return (schedule.T1 + schedule.T2) / schedule.symbols_per_file


def _fmt_set(items: Sequence[int]) -> str:
    return "{" + ",".join(map(str, items)) + "}"


def serialize_schedule(schedule: Schedule) -> str:
    """Line-oriented text dump; identical input gives identical bytes."""
    c = schedule.config
    lines = [
        f"# schedule K={c.K} M={c.M} N={c.N} mu={c.mu} alpha={c.alpha}",
        f"# demand {' '.join(map(str, schedule.demand.d))}",
        f"# L'={schedule.symbols_per_file} T1={schedule.T1} T2={schedule.T2}",
    ]
    for i, slot in enumerate(schedule.phase1, start=1):
        syms = ",".join(f"{sym}" for _, sym in slot.delivered)
        lines.append(
            f"P1 {i} RN{_fmt_set(slot.rn_group)} UE{_fmt_set(slot.ue_group)} sym:{syms}"
        )
    for k, dof in schedule.phase2.ue_dof:
        lines.append(f"P2 UE{k} dof {dof.numerator}/{dof.denominator}")
    return "\n".join(lines) + "\n"
