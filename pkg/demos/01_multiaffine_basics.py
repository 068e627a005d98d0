"""Multiaffine polynomials and circle geometry.

A multiaffine polynomial has degree at most one in each variable, so it is
stored as a table from variable subsets (bitmasks) to coefficients.
"""

import numpy as np

from gracelike import mapoly
from gracelike.geometry import GeneralizedCircle, MoebiusMap, cross_ratio, find_separating_circle, separates
from gracelike.mapoly import MAPolynomial

# z1 - w1, the simplest polynomial that never vanishes when a circle
# separates z1 from w1
P = MAPolynomial.from_terms(1, 1, {"z1": 1, "w1": -1})
print(P)
print("P(3, 1) =", mapoly.evaluate(P, [3, 1]))

# products on disjoint variables, relabelling and the reversal
Q = mapoly.multiply_disjoint(P, P)  # (z1 - w1)(z2 - w2)
print("product:", Q)
print("swap z1 <-> z2:", mapoly.transform(Q, zperm=[1, 0]))
print("reverse_tilde(P) = -P:", mapoly.reverse_tilde(P) == -P)

# translation invariance and homogeneity are what make a polynomial a
# candidate at all
print("translation invariant:", mapoly.is_translation_invariant(Q))
print("degree:", mapoly.homogeneity_degree(Q))
print("z1 w1 translation invariant:", mapoly.is_translation_invariant(MAPolynomial(1, 1, {0b11: 1})))

# JSON round trip
text = mapoly.dumps(Q)
print(text)
assert mapoly.loads(text) == Q

# Generalized circles: A|z|^2 + B Re z + C Im z + D, negative inside
c = GeneralizedCircle.from_center_radius(0, 1)
print("side of 0 and 2:", c(0), c(2))

# Is there a circle with {0, 2} on one side and {1} on the other?
sep = find_separating_circle([0, 2], [1])
print("separator for {0,2} | {1}:", sep, separates(sep, [0, 2], [1]))
# Alternating points on the unit circle cannot be separated
print("separator for {1,-1} | {i,-i}:", find_separating_circle([1, -1], [1j, -1j]))

# Moebius maps send circles to circles and keep sides
phi = MoebiusMap.random(np.random.default_rng(0))
print("image of the unit circle:", phi.image_circle(c))
print("cross-ratio of a separated quadruple:", cross_ratio(0, 0.1, 10, 11))
