import dataclasses
import random
from fractions import Fraction as F

import pytest

from cachebrc.bounds import Channel, ndt_one_shot
from cachebrc.core import DemandVector, NetworkConfig, NonCornerError, binom
from cachebrc.scheduler import (
    SymbolId,
    build_placement,
    build_schedule,
    schedule_ndt,
    scheme_counts,
    serialize_schedule,
    verify_schedule,
)

ALPHAS = [F(0), F(1, 4), F(1, 2), F(3, 4), F(1)]


def grid(max_k=6, max_m=6):
    for M in range(1, max_m + 1):
        for K in range(1, max_k + 1):
            for c in range(M + 1):
                for alpha in ALPHAS:
                    yield NetworkConfig(K, M, F(c, M), alpha)


# -- placement -----------------------------------------------------------------

def test_placement_fig2_configuration():
    p = build_placement(NetworkConfig(2, 4, F(1, 2)))
    assert p.symbols_per_file == 6
    for m in range(1, 5):
        per_file = [s for s in p.cached_by(m) if s.file == 1]
        assert len(per_file) == 3
        assert F(len(per_file), p.symbols_per_file) == F(1, 2)
        assert len(p.cached_by(m)) == 3 * 6


def test_placement_full_cache():
    p = build_placement(NetworkConfig(3, 2, 1))
    for m in (1, 2):
        for n in range(1, 6):
            assert set(p.all_symbols(n)) <= p.cached_by(m)


def test_placement_one_third():
    cfg = NetworkConfig(3, 3, F(1, 3))
    counts = scheme_counts(cfg)
    assert (counts.psi, counts.gamma, counts.symbols_per_file) == (1, 3, 9)
    p = build_placement(cfg)
    for m in range(1, 4):
        assert sum(1 for s in p.cached_by(m) if s.file == 2) == 3


def test_placement_zero_cache_is_empty():
    p = build_placement(NetworkConfig(2, 3, 0))
    assert all(not p.cached_by(m) for m in range(1, 4))


def test_placement_rejects_non_corner():
    with pytest.raises(NonCornerError):
        build_placement(NetworkConfig(2, 4, F(1, 3)))


def test_placement_counts_grid():
    for M in range(1, 7):
        for K in range(1, 7):
            for c in range(1, M + 1):
                cfg = NetworkConfig(K, M, F(c, M))
                counts = scheme_counts(cfg)
                p = build_placement(cfg)
                for m in range(1, M + 1):
                    on_file = sum(1 for s in p.cached_by(m) if s.file == 1)
                    assert on_file == counts.gamma * binom(M - 1, c - 1)
                    uncached = counts.symbols_per_file - on_file
                    assert uncached == counts.gamma * binom(M - 1, c)
                    assert uncached == (1 - cfg.mu) * counts.symbols_per_file


# -- schedule --------------------------------------------------------------------

def test_fig2_schedule():
    s = build_schedule(NetworkConfig(2, 4, F(1, 2), 1))
    assert (s.T1, s.T2, s.symbols_per_file) == (4, 2, 6)
    r = verify_schedule(s)
    assert r.ok and r.ndt == 1
    assert r.phase1_ue_dof == {1: 4, 2: 4}
    assert s.phase1[0].rn_group == (1, 2, 3) and s.phase1[0].ue_group == (1, 2)
    assert s.phase1[0].delivered_rn_symbols[1] == SymbolId(3, (2, 3), 1)


def test_no_csi_schedule():
    s = build_schedule(NetworkConfig(2, 4, F(1, 2), 0))
    r = verify_schedule(s)
    assert r.phase1_ue_dof == {1: 0, 2: 0}
    assert (s.T1, s.T2, r.ndt) == (4, 12, F(8, 3))
    assert r.ok


@pytest.mark.parametrize("K, M", [(1, 1), (2, 1), (3, 2), (4, 4), (6, 3)])
@pytest.mark.parametrize("alpha", ALPHAS)
def test_full_cache_schedule(K, M, alpha):
    cfg = NetworkConfig(K, M, 1, alpha)
    s = build_schedule(cfg)
    assert s.T1 == 0 and not s.phase1
    assert schedule_ndt(cfg) == K / (1 + min(K - 1, M) * alpha)
    assert verify_schedule(s).ok


@pytest.mark.parametrize("K, M", [(1, 1), (2, 3), (5, 2)])
def test_zero_cache_schedule_is_unicast(K, M):
    cfg = NetworkConfig(K, M, 0, F(1, 2))
    s = build_schedule(cfg)
    assert s.T1 == M and s.T2 == K and s.symbols_per_file == 1
    assert all(slot.private_dof == 1 and slot.common_ue is None for slot in s.phase2.pattern)
    assert schedule_ndt(cfg) == K + M
    assert verify_schedule(s).ok


def test_schedule_ndt_examples():
    assert schedule_ndt(NetworkConfig(2, 4, F(1, 2), 1)) == 1
    assert schedule_ndt(NetworkConfig(3, 2, F(1, 2), F(1, 2))) == F(7, 3)


def test_schedule_rejects_bad_demand():
    cfg = NetworkConfig(2, 4, F(1, 2))
    with pytest.raises(ValueError):
        build_schedule(cfg, DemandVector((1, 2, 3), K=2, M=1))
    with pytest.raises(ValueError):
        build_schedule(cfg, DemandVector((1, 2, 3, 4, 5, 9), K=2, M=4))


def test_non_worst_case_demand():
    cfg = NetworkConfig(2, 3, F(1, 3), F(1, 2), N=5)
    s = build_schedule(cfg, DemandVector((1, 1, 2, 2, 3), K=2, M=3))
    r = verify_schedule(s)
    assert r.ok and r.ndt == ndt_one_shot(cfg).value


def test_oracle_equivalence_and_invariants():
    for cfg in grid():
        s = build_schedule(cfg)
        r = verify_schedule(s)
        counts = scheme_counts(cfg)
        assert r.ok, (cfg, r.violations[:3])
        assert r.ndt == schedule_ndt(cfg) == ndt_one_shot(cfg).value
        assert r.cache_ratio == cfg.mu
        assert set(r.ue_dof.values()) == {s.symbols_per_file}
        if counts.t > 0:
            # each UE sits in C(K-1, psi-1) of the Gamma UE groups, per relay group
            per_ue = binom(cfg.M, counts.t + 1) * binom(cfg.K - 1, counts.psi - 1) * cfg.alpha
            assert all(v == per_ue for v in r.phase1_ue_dof.values())
        per_use = 1 + min(cfg.K - 1, counts.t) * cfg.alpha
        assert sum(s.phase2.ledger.values()) == s.T2 * per_use


def test_t2_zero_iff_broadcast_limited_at_perfect_csi():
    for cfg in grid(8, 8):
        if cfg.alpha != 1 or cfg.mu == 0:
            continue
        counts = scheme_counts(cfg)
        b = ndt_one_shot(cfg)
        assert (counts.T2 == 0) == (counts.phase1_ue_dof >= counts.symbols_per_file)
        if counts.T2 == 0:
            assert b.limiting_channel is Channel.BROADCAST or b.man_term == b.interference_term
        else:
            assert b.limiting_channel is Channel.INTERFERENCE or b.man_term == b.interference_term


def test_schedule_determinism():
    for cfg in [NetworkConfig(3, 5, F(2, 5), F(1, 4)), NetworkConfig(2, 4, F(1, 2), 1)]:
        a, b = build_schedule(cfg), build_schedule(cfg)
        assert a == b
        assert serialize_schedule(a) == serialize_schedule(b)


def test_ndt_invariant_under_slot_shuffle():
    rng = random.Random(1234)
    for cfg in [NetworkConfig(3, 5, F(2, 5), F(1, 4)), NetworkConfig(4, 6, F(1, 2), F(3, 4))]:
        s = build_schedule(cfg)
        base = verify_schedule(s)
        for _ in range(5):
            slots = list(s.phase1)
            rng.shuffle(slots)
            r = verify_schedule(dataclasses.replace(s, phase1=tuple(slots)))
            assert r.ok and r.ndt == base.ndt


# -- mutation tests ------------------------------------------------------------

def test_deleted_slot_is_reported():
    s = build_schedule(NetworkConfig(2, 4, F(1, 2), 1))
    dropped = s.phase1[1]
    r = verify_schedule(dataclasses.replace(s, phase1=s.phase1[:1] + s.phase1[2:]))
    assert not r.rn_complete and not r.ok
    for _, sym in dropped.delivered:
        assert any(str(sym) in v for v in r.violations)


def test_symbol_moved_out_of_share_set_is_reported():
    s = build_schedule(NetworkConfig(2, 4, F(1, 2), 1))
    slot = s.phase1[0]
    m, sym = slot.delivered[0]
    moved = SymbolId(sym.file, (3, 4), sym.copy)
    bad = dataclasses.replace(slot, delivered=((m, moved),) + slot.delivered[1:])
    r = verify_schedule(dataclasses.replace(s, phase1=(bad,) + s.phase1[1:]))
    assert not r.zf_feasible
    assert any("not cached" in v and str(moved) in v for v in r.violations)


def test_tampered_phase2_and_cache_are_reported():
    s = build_schedule(NetworkConfig(3, 3, F(1, 3), F(1, 2)))
    ledger = list(s.phase2.ue_dof)
    ledger[0] = (ledger[0][0], ledger[0][1] + 1)
    r = verify_schedule(dataclasses.replace(s, phase2=dataclasses.replace(s.phase2, ue_dof=tuple(ledger))))
    assert not r.phase2_consistent and not r.ue_complete

    slot = s.phase2.pattern[0]
    wide = dataclasses.replace(slot, private_dof=slot.private_dof + 1)
    pattern = (wide,) + s.phase2.pattern[1:]
    r = verify_schedule(dataclasses.replace(s, phase2=dataclasses.replace(s.phase2, pattern=pattern)))
    assert not r.phase2_consistent

    symbols = dict(s.placement.symbols)
    symbols[1] = frozenset(list(symbols[1])[1:])
    r = verify_schedule(dataclasses.replace(s, placement=dataclasses.replace(s.placement, symbols=symbols)))
    assert not r.cache_ratio_ok


def test_serialization_format():
    text = serialize_schedule(build_schedule(NetworkConfig(2, 4, F(1, 2), 1)))
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    assert lines[0] == "P1 1 RN{1,2,3} UE{1,2} sym:3/2.3/1,4/1.3/1,5/1.2/1"
    assert lines[-2:] == ["P2 UE1 dof 2/1", "P2 UE2 dof 2/1"]
    assert sum(l.startswith("P1 ") for l in lines) == 4
