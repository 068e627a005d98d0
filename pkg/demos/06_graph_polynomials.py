"""Matching and unbranched-subgraph polynomials and where their roots lie."""

import numpy as np

from gracelike.graph_polys import (
    RegionSpec,
    dimer_polynomial,
    load_graph,
    random_graph,
    unbranched_polynomial,
    verify_region,
)

K3 = load_graph("3\n0 1\n1 2\n0 2\n")
print("K3 matchings:", dimer_polynomial(K3))
print("K3 unbranched:", unbranched_polynomial(K3))
print(verify_region(dimer_polynomial(K3), RegionSpec("negative_real_axis")).to_json())

# matching polynomials have real negative roots
rng = np.random.default_rng(0)
worst_im = 0.0
for _ in range(50):
    g = random_graph(rng, 12, 20)
    p = dimer_polynomial(g)
    if len(p) > 1:
        worst_im = max(worst_im, verify_region(p, RegionSpec("negative_real_axis")).max_deviation)
print("worst distance from the negative axis over 50 graphs:", worst_im)

# unbranched subgraphs: left half-plane holds; the lower half-plane does not
re_ok = im_ok = total = 0
for _ in range(50):
    g = random_graph(rng, 12, 20)
    p = unbranched_polynomial(g)
    if len(p) < 2:
        continue
    total += 1
    re_ok += verify_region(p, RegionSpec("half_plane_re_nonpositive")).passed
    im_ok += verify_region(p, RegionSpec("half_plane_im_negative")).passed
print(f"Re <= 0 holds on {re_ok}/{total}, Im <= 0 holds on {im_ok}/{total}")
