"""Randomized falsification of the separation conditions.

Random evaluation alone almost never hits an exact zero, so the tests also
solve for zeros: P is affine in each variable, and a solved point that
stays on its side of the sampled circle is a certified violation.
"""

from gracelike.constructions import grace_sigma
from gracelike.geometry import separates
from gracelike.gnomial_verify import (
    bitorus_certify,
    classify_n2,
    g0_test_randomized,
    g_test_directed,
    g_test_randomized,
    reduce_to_canonical,
    theta_form,
)
from gracelike.mapoly import MAPolynomial

for n in (2, 3):
    rep = g_test_randomized(grace_sigma(n), 5_000, seed=0)
    print(f"Grace n={n}: {rep.violation_count} violations in {rep.trials} trials, min |P| {rep.min_abs:.3g}")

# The n = 2 family (1 - t)(z1 - w1)(z2 - w2) + t (z1 - w2)(z2 - w1)
for t in (0.0, 0.5, 1.0, 1.5, 2.0):
    P = theta_form(t)
    g = g_test_randomized(P, 2_000, seed=1)
    print(f"theta={t}: classify valid={classify_n2(P).is_valid}, G violations {g.violation_count}")

# a certified counterexample carries its points and a separating circle
rep = g_test_directed(theta_form(1.5), [0, -1, 1, 0.2], trials=1000, seed=0)
v = rep.violations[0]
print("witness points:", v.points.round(4), "|P| =", v.abs)
print("circle separates:", separates(v.circle, v.points[:2], v.points[2:]))

# condition (G0): z's on one circle, w's on a disjoint one
print("G0 on Grace n=2:", g0_test_randomized(grace_sigma(2), 3_000, seed=0).violation_count)
print("G0 on z1 w1:", g0_test_randomized(MAPolynomial(1, 1, {0b11: 1}), 500, seed=0).violation_count)

# bi-torus sampling: concentric circles of different radii
print("bi-torus on Grace n=3:", bitorus_certify(grace_sigma(3), 3_000, seed=0).violation_count)

# canonical form: strip unused variables and normalize
alpha, R, relabel = reduce_to_canonical(MAPolynomial.from_terms(2, 2, {"z2": 5, "w1": -5}))
print("alpha", alpha, "relabel", relabel, "R", R)
