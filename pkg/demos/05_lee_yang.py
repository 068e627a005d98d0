"""The Lee-Yang circle theorem through Asano contractions."""

import numpy as np

from gracelike.asano_leeyang import (
    PairCoefficients,
    RadialRegion,
    asano_demo,
    key_lemma_region,
    lee_yang_asano,
    lee_yang_polynomial,
    verify_unit_circle,
)

# one contraction step: uv + a u + a v + 1 -> z + 1
demo = asano_demo(0.5)
print("contracted:", demo["contracted"], "root", demo["root"], "in", demo["region"])

# the key lemma's region -K*L for origin-centred regions
print(key_lemma_region(RadialRegion.outside(2), RadialRegion.outside(3)))
print(key_lemma_region(RadialRegion.annulus(1, 2), RadialRegion.annulus(3, 4)))

# random Hermitian interactions with |a_ij| <= 1
rng = np.random.default_rng(0)
for n in (3, 6, 10):
    a = PairCoefficients.random(rng, n)
    p = lee_yang_polynomial(a)
    rep = verify_unit_circle(p)
    print(f"n={n}: max ||root| - 1| = {rep.max_deviation:.2e}")

# the same polynomial assembled by contractions
a = PairCoefficients.random(rng, 5)
print("Asano vs direct:", np.abs(lee_yang_asano(a) - lee_yang_polynomial(a)).max())

# |a| > 1 breaks the theorem
bad = PairCoefficients(2, [[0, 1.5], [1.5, 0]])
print("a = 1.5:", verify_unit_circle(lee_yang_polynomial(bad)).roots)
