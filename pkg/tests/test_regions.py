import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from cachebrc.bounds import Channel, man_ndt, ndt_one_shot
from cachebrc.core import NetworkConfig
from cachebrc.regions import (
    NdtFormula,
    Region,
    RegionLabel,
    boundary_curves,
    classify,
    ed_border_M,
    region_map,
    region_ndt,
)


def literal_rows(mu, K, M):
    """Table rows evaluated literally, with 1/(1-2mu) = +inf only at mu = 1/2.

    Returns a dict row -> (matched, interior) where ``interior`` is False
    when any inequality of that row holds with equality.
    """
    t = mu * M
    man = man_ndt(mu, M)
    inv = math.inf if mu == F(1, 2) else 1 / (1 - 2 * mu)
    half = F(1, 2)
    rows = {
        "A1": [(K, "<=", t), (t, "<", M), (M, "<", inv), (mu, "<=", half)],
        "A2": [(K, "<=", t), (t, "<=", M), (M, ">", inv), (mu, ">", half)],
        "B": [(K, "<=", t), (inv, "<=", M), (mu, "<=", half)],
        "E": [(t, "<", K), (K, "<=", t * man), (t * man, "<=", M)],
        "C": [(t, "<", M), (M, "<", K)],
        "D": [(t * max(F(1), man), "<", K), (K, "<=", M)],
    }
    ops = {"<": lambda a, b: a < b, "<=": lambda a, b: a <= b, ">": lambda a, b: a > b}
    out = {}
    for name, conds in rows.items():
        matched = all(ops[op](a, b) for a, op, b in conds)
        interior = all(a != b for a, _, b in conds)
        out[name] = (matched, interior)
    return out


@pytest.mark.parametrize(
    "mu, K, M, region",
    [(F(1, 2), 2, 4, Region.A), (F(1, 4), 5, 4, Region.C), (F(0), 1, 1, Region.D),
     (F(1), 2, 4, Region.A), (F(1, 4), 1, 8, Region.B), (F(1), 5, 4, Region.UNCLASSIFIED)],
)
def test_classify_examples(mu, K, M, region):
    assert classify(mu, K, M).label is region


def test_formula_mapping():
    assert Region.A.formula is NdtFormula.ONE
    assert Region.B.formula is Region.E.formula is NdtFormula.MAN
    assert Region.C.formula is Region.D.formula is NdtFormula.INTERFERENCE_LIMITED
    assert Region.UNCLASSIFIED.formula is None


def test_region_ndt_examples():
    assert region_ndt(RegionLabel(Region.A, "A1"), NetworkConfig(3, 7, F(5, 7))) == 1
    assert region_ndt(RegionLabel(Region.C, "C"), NetworkConfig(5, 4, F(1, 4))) == F(13, 4)
    assert region_ndt(RegionLabel(Region.B, "B"), NetworkConfig(2, 8, F(1, 2))) == F(4, 5)
    with pytest.raises(ValueError):
        region_ndt(RegionLabel(Region.UNCLASSIFIED, None), NetworkConfig(2, 2))


def test_classify_agrees_with_literal_rows():
    for K in range(1, 9):
        for M in range(1, 13):
            for c in range(M + 1):
                for mu in {F(c, M), F(2 * c + 1, 2 * M + 2)}:
                    rows = literal_rows(mu, K, M)
                    first = next((n for n, (hit, _) in rows.items() if hit), None)
                    assert classify(mu, K, M).row == first
                    interior_hits = [n for n, (hit, inner) in rows.items() if hit and inner]
                    if 0 < mu < 1 and all(inner for _, inner in rows.values()):
                        assert len(interior_hits) <= 1


@given(st.fractions(0, 1, max_denominator=50), st.integers(1, 15), st.integers(1, 30))
def test_classify_total_and_deterministic(mu, K, M):
    a, b = classify(mu, K, M), classify(mu, K, M)
    assert a == b
    assert isinstance(a.label, Region)


def test_consistency_with_one_shot_small():
    for K in range(1, 7):
        for M in range(1, 7):
            for c in range(M + 1):
                cfg = NetworkConfig(K, M, F(c, M), 1)
                label = classify(cfg.mu, K, M)
                if label.label is Region.UNCLASSIFIED:
                    continue
                b = ndt_one_shot(cfg)
                assert region_ndt(label, cfg) == b.value
                if label.label in (Region.B, Region.E):
                    assert b.limiting_channel is Channel.BROADCAST
                if label.label in (Region.C, Region.D):
                    assert b.limiting_channel is Channel.INTERFERENCE


def test_unclassified_only_full_cache_many_users():
    for K in range(1, 13):
        for M in range(1, 13):
            for c in range(M + 1):
                if classify(F(c, M), K, M).label is Region.UNCLASSIFIED:
                    assert c == M and K > M


def test_region_map_shape_and_standalone_cells():
    rmap = region_map(2, F(1, 100), 20)
    assert len(rmap.mu_grid) == 101 and rmap.mu_grid[-1] == 1
    assert all(len(row) == 20 for row in rmap.cells)
    for i, mu in enumerate(rmap.mu_grid):
        for j, M in enumerate(rmap.m_values):
            label = rmap.cells[i][j].label
            if mu * M >= 2 and man_ndt(mu, M) < 1:
                assert label is Region.A
            if mu * M >= 2 and man_ndt(mu, M) == 1:
                # shared A/B border: first-row rule picks B, both give NDT 1
                assert label is Region.B
                assert region_ndt(rmap.cells[i][j], NetworkConfig(2, M, mu)) == 1


def test_region_map_smallest_and_k1():
    rmap = region_map(1, F(1, 2), 1)
    assert [len(row) for row in rmap.cells] == [1, 1, 1]
    k1 = region_map(1, F(1, 10), 12)
    assert all(cell.label is not Region.C for row in k1.cells for cell in row)


def test_region_map_validation():
    with pytest.raises(ValueError):
        region_map(2, 0, 5)
    with pytest.raises(ValueError):
        region_map(2, F(1, 4), 0)


def test_boundary_curves():
    curves = boundary_curves(2, [F(0), F(1, 4), F(1, 2), F(3, 4), F(1)])
    assert dict(curves["standalone_frontier"]) == {F(1, 4): 8.0, F(1, 2): 4.0, F(3, 4): 8 / 3, F(1): 2.0}
    assert dict(curves["ab_border"]) == {F(0): 1.0, F(1, 4): 2.0}
    for mu, M in curves["ed_border"]:
        x = float(mu)
        assert math.isclose(x * M * M * (1 - x) / (1 + x * M), 2, rel_tol=1e-12)
    assert math.isinf(ed_border_M(0.0, 2))
