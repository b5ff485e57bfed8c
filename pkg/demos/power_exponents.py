"""Monte Carlo check of the zero-forcing power exponents.

With channel-estimation error of variance P^-alpha, a zero-forced
interferer leaks at power about P^(1-alpha) while the desired signal
keeps power about P. We estimate both exponents by regressing mean
log-power on log P, and also the common/private rate exponents of the
phase-2 rate splitting.

Run with ``python3 demos/power_exponents.py`` (a few seconds).
"""

from fractions import Fraction

from cachebrc.linksim import estimate_exponents

for alpha in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)):
    est = estimate_exponents(2, 4, Fraction(1, 2), alpha, trials=3000, seed=1)
    cells = "  ".join(f"{e.quantity.value}={e.slope:5.2f}(exp {e.expected:4.2f})" for e in est)
    print(f"alpha={str(alpha):>4}  {cells}")
