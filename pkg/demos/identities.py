"""The chain-level identities, checked exactly on a handful of random cubes."""

import random
from fractions import Fraction

from cubar.chaincore import verify_dd_zero
from cubar.coeff import WeightVector
from cubar.cubeexpr import AffineCell, Base
from cubar.homotopylab import (PrismHomotopy, subdivide, verify_prism_identity,
                               verify_sd_homotopy, verify_sd_naturality)

rng = random.Random(0)
w = WeightVector.of((2, -1, 3))

T = Base.random(rng, 3, 2, 2)
cert = verify_dd_zero(T, w)
print(f"dd = 0 on a 3-cube, weight {tuple(w)}: {cert.ok} ({cert.terms} terms cancelled)")

h = PrismHomotopy.from_weight(w)
cert = verify_prism_identity(Base.random(rng, 2, 2, 2), h, Fraction(1, 6 * w.L))
print(f"prism homotopy dH + Hd = g(top) - g(bottom): {cert.ok}")

print("subdivision of the identity 1-cube:")
for cube, c in sorted(subdivide(AffineCell.identity(1)).terms.items(), key=lambda t: str(t[0])):
    print(f"  {c:+d} {cube}")

T = Base.random(rng, 2, 2, 2)
print("subdivision commutes with the boundary:", verify_sd_naturality(T, 1, 4).ok)
print("subdivision is homotopic to the identity:", verify_sd_homotopy(T, 1, 4, False).ok,
      "(mirrored:", verify_sd_homotopy(T, 1, 4, True).ok, ")")
