import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from gracelike import mapoly
from gracelike.constructions import grace_sigma
from gracelike.gnomial_verify import theta_form
from gracelike.mapoly import MAPolynomial
from oracles import from_sympy, to_sympy, zw


def close(P, Q, tol=1e-12):
    return mapoly.max_coeff_diff(P, Q) <= tol


def rand_poly(seed, m, n):
    return mapoly.random_mapoly(np.random.default_rng(seed), m, n)


def test_evaluate_examples():
    P = MAPolynomial.from_terms(1, 1, {"z1": 1, "w1": -1})
    assert mapoly.evaluate(P, [1, 0]) == 1
    a = 1.0
    Q = MAPolynomial(2, 0, {0b11: 1, 0b01: a, 0b10: a, 0: 1})
    assert mapoly.evaluate(Q, [-1, -1]) == 0
    assert abs(mapoly.evaluate(grace_sigma(2), [0, 0, 1, 1]) - 1) < 1e-15


def test_substitute_examples():
    P = MAPolynomial.from_terms(1, 1, {"z1": 1, "w1": -1})
    assert close(mapoly.substitute(P, "w1", 0), MAPolynomial(1, 0, {1: 1}))
    Q = MAPolynomial.from_terms(2, 1, {("z1", "z2"): 1, ("z1", "w1"): -1})
    R = mapoly.substitute(Q, "z1", 2)
    assert close(R, MAPolynomial.from_terms(1, 1, {"z1": 2, "w1": -2}))


def test_multiply_disjoint_examples():
    a = MAPolynomial.from_terms(1, 1, {"z1": 1, "w1": -1})
    prod = mapoly.multiply_disjoint(a, a)
    expect = MAPolynomial.from_terms(2, 2, {("z1", "z2"): 1, ("z1", "w2"): -1, ("z2", "w1"): -1, ("w1", "w2"): 1})
    assert close(prod, expect)
    assert close(prod, theta_form(0))
    one = MAPolynomial.constant(0, 0, 1)
    assert close(mapoly.multiply_disjoint(prod, one), prod)


def test_transform_examples():
    P = MAPolynomial.from_terms(1, 1, {"z1": 1, "w1": -1})
    assert close(mapoly.transform(P, swap_zw=True), P)
    for theta in (0.0, 0.3, 1.0):
        assert close(mapoly.transform(theta_form(theta), zperm=[1, 0]), theta_form(1 - theta))
    Q = rand_poly(1, 2, 3)
    assert mapoly.transform(Q, [0, 1], [0, 1, 2]) == Q


def test_theta_swap_symbolic():
    z, w = zw(2, 2)
    t = sp.Rational(3, 10)
    f = lambda th: (1 - th) * (z[0] - w[0]) * (z[1] - w[1]) + th * (z[0] - w[1]) * (z[1] - w[0])
    swapped = f(t).subs({z[0]: z[1], z[1]: z[0]}, simultaneous=True)
    assert sp.expand(swapped - f(1 - t)) == 0
    assert close(from_sympy(f(t), 2, 2), theta_form(0.3))


def test_reverse_tilde_examples():
    P = MAPolynomial.from_terms(1, 1, {"z1": 1, "w1": -1})
    assert close(mapoly.reverse_tilde(P), -P)
    assert close(mapoly.reverse_tilde(MAPolynomial.constant(1, 1)), MAPolynomial(1, 1, {0b11: 1}))
    for n in (1, 2, 3, 4):
        S = grace_sigma(n)
        assert close(mapoly.reverse_tilde(S), S * (-1) ** n)


def test_translate_examples():
    P = MAPolynomial.from_terms(1, 1, {"z1": 1, "w1": -1})
    assert close(mapoly.translate_all(P, 5), P)
    assert close(mapoly.translate_all(MAPolynomial(1, 0, {1: 1}), 1), MAPolynomial(1, 0, {1: 1, 0: 1}))
    Q = MAPolynomial(1, 1, {0b11: 1})
    assert close(mapoly.translate_all(Q, 1), MAPolynomial(1, 1, {0b11: 1, 1: 1, 2: 1, 0: 1}))


def test_homogeneity_examples():
    assert mapoly.homogeneity_degree(MAPolynomial.from_terms(1, 1, {"z1": 1, "w1": -1})) == 1
    assert mapoly.homogeneity_degree(MAPolynomial(1, 0, {1: 1, 0: 1})) is None
    for n in (1, 2, 3, 4):
        assert mapoly.homogeneity_degree(grace_sigma(n)) == n
    with pytest.raises(ValueError):
        mapoly.homogeneity_degree(MAPolynomial.zero(1, 1))


def test_translation_invariance_examples():
    assert mapoly.is_translation_invariant(MAPolynomial.from_terms(1, 1, {"z1": 1, "w1": -1}))
    assert not mapoly.is_translation_invariant(MAPolynomial(1, 1, {0b11: 1}))
    assert mapoly.is_translation_invariant(grace_sigma(3))


def test_effective_variables_examples():
    P = MAPolynomial.from_terms(2, 2, {"z1": 1, "w1": -1})
    assert {str(v) for v in mapoly.effective_variables(P)} == {"z1", "w1"}
    assert len(mapoly.effective_variables(grace_sigma(2))) == 4
    assert mapoly.effective_variables(MAPolynomial.zero(2, 2)) == set()


def test_bad_inputs():
    with pytest.raises(ValueError):
        MAPolynomial(1, 1, {0b100: 1})
    with pytest.raises(ValueError):
        MAPolynomial(1, 1, {1: float("nan")})
    with pytest.raises(ValueError):
        MAPolynomial(20, 11, {})
    with pytest.raises(ValueError):
        MAPolynomial.from_terms(1, 1, {("z1", "z1"): 1})
    with pytest.raises(ValueError):
        MAPolynomial.from_terms(1, 1, {"z2": 1})
    with pytest.raises(ValueError):
        mapoly.evaluate(MAPolynomial.zero(1, 1), [1])
    with pytest.raises(ValueError):
        mapoly.from_json({"m": 1, "terms": []})
    with pytest.raises(ValueError):
        mapoly.transform(MAPolynomial.zero(2, 1), zperm=[0, 0])


def test_evaluate_many_matches_evaluate():
    rng = np.random.default_rng(3)
    P = rand_poly(3, 3, 2)
    X = rng.standard_normal((20, 5)) + 1j * rng.standard_normal((20, 5))
    vals = mapoly.evaluate_many(P, X)
    assert np.allclose(vals, [mapoly.evaluate(P, x) for x in X], atol=1e-13)


def test_split_variable_recombines():
    P = rand_poly(4, 2, 2)
    A, B = mapoly.split_variable(P, "w2")
    x = np.array([0.3, -1.2j, 2.0, 0.7 + 0.1j])
    a, b = mapoly.evaluate(A, x), mapoly.evaluate(B, x)
    assert abs(mapoly.evaluate(P, x) - (x[3] * a + b)) < 1e-12


def test_merge_variables_on_theta_form():
    a = mapoly.merge_variables(theta_form(0.2), ["z1", "z2"])
    b = mapoly.merge_variables(theta_form(0.9), ["z1", "z2"])
    keys = set(a) | set(b)
    assert max(abs(a.get(k, 0) - b.get(k, 0)) for k in keys) < 1e-15


# --- properties against a symbolic oracle -------------------------------------

shapes = st.tuples(st.integers(0, 3), st.integers(0, 3))


@settings(max_examples=25, deadline=None)
@given(shapes, st.integers(0, 10_000))
def test_json_round_trip(shape, seed):
    P = rand_poly(seed, *shape)
    assert mapoly.loads(mapoly.dumps(P)) == P


@settings(max_examples=25, deadline=None)
@given(shapes, st.integers(0, 10_000))
def test_reverse_tilde_is_involution(shape, seed):
    P = rand_poly(seed, *shape)
    assert mapoly.reverse_tilde(mapoly.reverse_tilde(P)) == P


@settings(max_examples=15, deadline=None)
@given(shapes, st.integers(0, 10_000), st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_translate_matches_sympy(shape, seed, s):
    P = rand_poly(seed, *shape)
    expr, xs = to_sympy(P)
    shifted = sp.expand(expr.subs({x: x + sp.Float(s.real) + sp.I * sp.Float(s.imag) for x in xs}, simultaneous=True))
    Q = from_sympy(shifted, P.m, P.n) if xs else P
    assert mapoly.max_coeff_diff(mapoly.translate_all(P, s), Q) <= 1e-9 * (1 + abs(s)) ** len(xs)


@settings(max_examples=15, deadline=None)
@given(shapes, shapes, st.integers(0, 10_000))
def test_multiply_disjoint_pointwise(s1, s2, seed):
    P, Q = rand_poly(seed, *s1), rand_poly(seed + 1, *s2)
    R = mapoly.multiply_disjoint(P, Q)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(R.nvars) + 1j * rng.standard_normal(R.nvars)
    zs, ws = x[: R.m], x[R.m :]
    xp = np.concatenate([zs[: P.m], ws[: P.n]])
    xq = np.concatenate([zs[P.m :], ws[P.n :]])
    assert abs(mapoly.evaluate(R, x) - mapoly.evaluate(P, xp) * mapoly.evaluate(Q, xq)) < 1e-10


@settings(max_examples=20, deadline=None)
@given(st.permutations(range(3)), st.permutations(range(2)), st.integers(0, 10_000))
def test_transform_relabels_values(zp, wp, seed):
    P = rand_poly(seed, 3, 2)
    Q = mapoly.transform(P, list(zp), list(wp))
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    # Q(x) = P(y) where variable i of P reads x at its new position
    y = [x[zp[i]] for i in range(3)] + [x[3 + wp[j]] for j in range(2)]
    assert abs(mapoly.evaluate(Q, x) - mapoly.evaluate(P, y)) < 1e-12


def test_homogeneity_adds_under_products():
    for a in (1, 2, 3):
        for b in (1, 2):
            prod = mapoly.multiply_disjoint(grace_sigma(a), grace_sigma(b))
            assert mapoly.homogeneity_degree(prod) == a + b


def test_translate_pointwise():
    rng = np.random.default_rng(12)
    for _ in range(20):
        P = rand_poly(int(rng.integers(1 << 30)), 2, 2)
        s = 2 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        a = mapoly.evaluate(mapoly.translate_all(P, s), x)
        b = mapoly.evaluate(P, x + s)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(b))
