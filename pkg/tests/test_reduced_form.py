import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gracelike import mapoly
from gracelike.constructions import determinant_gnomial, grace_sigma, random_unitary
from gracelike.exceptions import StructuralError
from gracelike.geometry import MoebiusMap
from gracelike.gnomial_verify import theta_form
from gracelike.mapoly import MAPolynomial
from gracelike.reduced_form import (
    PermutationCoefficients,
    assemble,
    check_conformal_invariance,
    diagonal_restrict,
    reduced_form_iterative,
    reduced_form_linear,
)
from gracelike.rootfinder import from_roots
from oracles import expand_product


def random_pc(rng, n, support=None):
    perms = list(itertools.permutations(range(n)))
    if support is not None:
        perms = [perms[i] for i in rng.choice(len(perms), size=support, replace=False)]
    return PermutationCoefficients(n, {p: complex(*rng.standard_normal(2)) for p in perms})


def test_assemble_matches_dictionary_expansion():
    rng = np.random.default_rng(0)
    for n in (1, 2, 3, 4):
        pc = random_pc(rng, n)
        P = assemble(pc)
        ref = MAPolynomial(n, n, expand_product(pc.coeffs, n))
        assert mapoly.max_coeff_diff(P, ref) < 1e-12


def test_assemble_examples():
    P = assemble(PermutationCoefficients(2, {(0, 1): 1}))
    assert mapoly.max_coeff_diff(P, theta_form(0)) == 0
    for n in (1, 2, 3, 4):
        uniform = {p: 1 / math.factorial(n) for p in itertools.permutations(range(n))}
        assert mapoly.max_coeff_diff(assemble(PermutationCoefficients(n, uniform)), grace_sigma(n)) < 1e-15
    P = assemble(PermutationCoefficients(2, {(0, 1): 0.7, (1, 0): 0.3}))
    assert mapoly.max_coeff_diff(P, theta_form(0.3)) < 1e-15


def test_iterative_examples():
    P = MAPolynomial.from_terms(1, 1, {"z1": 1, "w1": -1})
    rep = reduced_form_iterative(P)
    assert rep.coeffs.coeffs == {(0,): 1} and rep.residual == 0

    rep = reduced_form_iterative(grace_sigma(2))
    assert rep.residual <= 1e-12
    assert all(abs(c - 0.5) < 1e-12 for c in rep.coeffs.coeffs.values())

    P = assemble(PermutationCoefficients(2, {(1, 0): 1}))
    rep = reduced_form_iterative(P)
    c = rep.coeffs.coeffs
    assert abs(c.get((1, 0), 0) - 1) < 1e-12 and abs(c.get((0, 1), 0)) < 1e-12


def test_linear_examples():
    a = assemble(reduced_form_linear(grace_sigma(3)).coeffs)
    b = assemble(reduced_form_iterative(grace_sigma(3)).coeffs)
    assert mapoly.max_coeff_diff(a, b) <= 1e-9
    rng = np.random.default_rng(4)
    w = rng.random(3)
    w /= w.sum()
    pc = random_pc(rng, 3, support=3)
    pc = PermutationCoefficients(3, dict(zip(pc.coeffs, w)))
    assert reduced_form_linear(assemble(pc)).residual <= 1e-11


def test_preconditions():
    not_invariant = MAPolynomial.from_terms(2, 2, {("z1", "z2"): 1, ("w1", "w2"): -1})
    for fn in (reduced_form_iterative, reduced_form_linear):
        with pytest.raises(StructuralError):
            fn(not_invariant)
        with pytest.raises(StructuralError):
            fn(MAPolynomial.zero(2, 2))
        with pytest.raises(StructuralError):
            fn(MAPolynomial.from_terms(2, 1, {"z1": 1, "w1": -1}))
    with pytest.raises(ValueError):
        reduced_form_linear(grace_sigma(6))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_iterative_reconstructs_random_inputs(n):
    rng = np.random.default_rng(n)
    for _ in range(3 if n < 5 else 1):
        P = assemble(random_pc(rng, n))
        rep = reduced_form_iterative(P)
        assert mapoly.max_coeff_diff(assemble(rep.coeffs), P) <= 1e-9
        assert all(b < a for a, b in zip(rep.norms, rep.norms[1:]))


def test_iterative_handles_determinants():
    for seed in range(5):
        P = determinant_gnomial(random_unitary(4, seed))
        rep = reduced_form_iterative(P)
        assert mapoly.max_coeff_diff(assemble(rep.coeffs), P) <= 1e-9


def test_json_round_trip():
    pc = random_pc(np.random.default_rng(1), 3)
    back = PermutationCoefficients.from_json(pc.to_json())
    assert back.coeffs == pc.coeffs
    assert pc.to_json()["coeffs"][0]["perm"] == [1, 2, 3]
    with pytest.raises(ValueError):
        PermutationCoefficients(2, {(0, 0): 1})


def test_diagonal_restrict_examples():
    got = diagonal_restrict(grace_sigma(2), [1, 2])
    assert np.allclose(got, [2, -3, 1], atol=1e-15)
    for theta in (0.0, 0.4, 1.0, 2.5):
        assert np.allclose(diagonal_restrict(theta_form(theta), [3j, -1]), from_roots([3j, -1]), atol=1e-14)
    assert np.allclose(diagonal_restrict(MAPolynomial.from_terms(1, 1, {"z1": 1, "w1": -1}), [5]), [-5, 1])


def test_conformal_examples():
    P = MAPolynomial.from_terms(1, 1, {"z1": 1, "w1": -1})
    assert check_conformal_invariance(P, MoebiusMap(0, 1, 1, 0)) < 1e-14
    rng = np.random.default_rng(7)
    for _ in range(5):
        assert check_conformal_invariance(grace_sigma(3), MoebiusMap.random(rng)) <= 1e-9
    with pytest.raises(StructuralError):
        check_conformal_invariance(MAPolynomial(1, 1, {0b11: 1}), MoebiusMap(0, 1, 1, 0))
    gap = check_conformal_invariance(MAPolynomial(1, 1, {0b11: 1}), MoebiusMap(1, 1, 1, -1), check=False)
    assert gap > 0.1


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_reduced_form_properties(n, seed):
    rng = np.random.default_rng(seed)
    pc = random_pc(rng, n)
    P = assemble(pc)
    # translation invariance and degree of every assembled table
    assert mapoly.is_translation_invariant(P)
    assert mapoly.homogeneity_degree(P) == n
    # roots of the diagonal restriction are the w's, scaled by sum C
    w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    lead = sum(pc.coeffs.values())
    assert np.allclose(diagonal_restrict(P, w), from_roots(w, lead), atol=1e-9 * (1 + abs(lead)))
    rep = reduced_form_iterative(P)
    assert mapoly.max_coeff_diff(assemble(rep.coeffs), P) <= 1e-9 * (1 + P.max_abs())
