"""Print an ASCII region map for K = 2.

Each character is one (mu, M) cell labelled A-E. Rows run over M from
top (large) to bottom (small); columns run over mu from 0 to 1. A "."
marks the single unclassified case. This is the same classification that
``cachebrc regions`` writes as CSV.

Run with ``python3 demos/region_map.py``.
"""

from fractions import Fraction

from cachebrc.regions import Region, region_map

rmap = region_map(2, Fraction(1, 40), 20)
glyph = {r: r.value for r in Region}
glyph[Region.UNCLASSIFIED] = "."

for j in reversed(range(len(rmap.m_values))):
    line = "".join(glyph[rmap.cells[i][j].label] for i in range(len(rmap.mu_grid)))
    print(f"M={rmap.m_values[j]:>2} {line}")
print("     mu = 0" + " " * (len(rmap.mu_grid) - 12) + "1")
print()
print("A: NDT 1 (standalone relays, interference-free)")
print("B, E: broadcast-limited, NDT = MAN delivery time")
print("C, D: interference-limited")
