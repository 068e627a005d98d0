"""Grace's polynomial and reduced forms.

Every translation-invariant polynomial that is homogeneous of degree n in
n z's and n w's can be written as sum_pi C_pi prod_j (z_j - w_pi(j)).
"""

import itertools

import numpy as np

from gracelike import mapoly
from gracelike.constructions import grace_sigma
from gracelike.geometry import MoebiusMap
from gracelike.reduced_form import (
    PermutationCoefficients,
    assemble,
    check_conformal_invariance,
    diagonal_restrict,
    reduced_form_iterative,
    reduced_form_linear,
)

S2 = grace_sigma(2)
print("Grace's polynomial, n = 2:")
print(S2)

# the exchange algorithm recovers C_pi = 1/2 for both permutations
rep = reduced_form_iterative(S2)
print(rep.coeffs.to_json())

# a random input built from random C_pi
rng = np.random.default_rng(1)
n = 4
pc = PermutationCoefficients(n, {p: complex(*rng.standard_normal(2)) for p in itertools.permutations(range(n))})
P = assemble(pc)
rep = reduced_form_iterative(P)
print(f"n={n}: {rep.iterations} exchange steps, relative residual {rep.residual:.2e}")
print("remainder norms (first five):", np.round(rep.norms[:5], 4))

# reduced forms are not unique, so compare assembled tables
lin = reduced_form_linear(P)
print("iterative vs least squares:", mapoly.max_coeff_diff(assemble(rep.coeffs), assemble(lin.coeffs)))

# identities every reduced form satisfies
S3 = grace_sigma(3)
print("reverse_tilde(S3) = -S3:", mapoly.max_coeff_diff(mapoly.reverse_tilde(S3), -S3))
# all z equal: (z - 1)(z - 2)(z - 3) = -6 + 11 z - 6 z^2 + z^3
print("P(z,z,z; 1,2,3):", np.round(diagonal_restrict(S3, [1, 2, 3]).real, 12))
phi = MoebiusMap.random(rng)
print("conformal covariance gap:", check_conformal_invariance(S3, phi))
