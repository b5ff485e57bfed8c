"""A tour of the NDT bounds for one small network.

We fix two UEs and four relays, and walk the cache size through every
corner point. At each corner we print the one-shot achievable NDT, the
cut-set style lower bound and whether the two meet. Then we show how the
convex envelope fills in the cache sizes between corners.

Run with ``python3 demos/bounds_tour.py``.
"""

from fractions import Fraction

from cachebrc import NetworkConfig
from cachebrc.bounds import corner_points, ndt_envelope, ndt_one_shot, optimality_report

K, M = 2, 4

for alpha in (Fraction(0), Fraction(1, 2), Fraction(1)):
    print(f"CSI quality alpha = {alpha}")
    print(f"  {'mu':>5} {'one-shot':>9} {'lower':>7} {'gap':>7}  limited by")
    for c in range(M + 1):
        cfg = NetworkConfig(K, M, Fraction(c, M), alpha)
        b = ndt_one_shot(cfg)
        r = optimality_report(cfg)
        print(f"  {str(cfg.mu):>5} {str(b.value):>9} {str(r.lower):>7} {str(r.gap):>7}  "
              f"{b.limiting_channel.value}")
    print()

# Between corners the scheme time-shares, so the achievable curve is the
# lower convex envelope of the corner points.
alpha = Fraction(1, 2)
pts = dict(corner_points(K, M, alpha))
print(f"Envelope at alpha = {alpha} on a finer grid (corners marked *):")
for i in range(9):
    mu = Fraction(i, 8)
    mark = "*" if mu in pts else " "
    print(f"  mu={str(mu):>4}{mark} NDT={str(ndt_envelope(K, M, alpha, mu)):>6}")
