"""Building reduced G-nomials: determinants, symmetrization, interpolation
and the transposition-averaging flow."""

import numpy as np

from gracelike import mapoly
from gracelike.constructions import (
    determinant_gnomial,
    flow_to_sigma,
    grace_sigma,
    interpolate,
    random_unitary,
    symmetrize,
)
from gracelike.gnomial_verify import classify_n2, g_test_randomized, theta_form

# det(U_ij (z_i - w_j)) for a unitary U with det 1
U = random_unitary(3, seed=0)
P = determinant_gnomial(U)
print("z1 z2 z3 coefficient:", P[0b000111])
print("G violations:", g_test_randomized(P, 2_000, seed=0).violation_count)

# averaging over all z-permutations gives Grace's polynomial
print("symmetrize(P) vs Grace:", mapoly.max_coeff_diff(symmetrize(P), grace_sigma(3)))

# a 2x2 rotation by phi lands on theta = sin(phi)^2
phi = 0.7
R = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
print("theta:", classify_n2(determinant_gnomial(R)).theta.real, "sin^2:", np.sin(phi) ** 2)

# two G-nomials that agree on z1 = z2 can be mixed
for a in (0.25, 0.5, 0.75):
    Q = interpolate(theta_form(0), theta_form(1), a)
    print(f"alpha={a}: classified theta {classify_n2(Q).theta.real}")

# the flow pulls everything onto Grace's polynomial
traj = flow_to_sigma(determinant_gnomial(np.eye(3)))
print(f"flow: {traj.steps} steps, distance to Grace {traj.final_distance:.2e}")
for t, norm in list(zip(traj.times, traj.asym_norms))[::4]:
    print(f"  t={t:5.1f}  non-symmetric part {norm:.3e}")
