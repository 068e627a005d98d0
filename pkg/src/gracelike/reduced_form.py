"""Reduced forms  P = sum_pi C_pi prod_j (z_j - w_pi(j)).

``reduced_form_iterative`` is the constructive exchange algorithm: pick the
z_j/w_k exchange with the largest coefficient jump, split off
(b - c)/2 * (z_j - w_k) where P = a z_j w_k + b z_j + c w_k + d, decompose
(b - c)/2 recursively one degree lower, subtract, repeat. Each step cuts the
squared coefficient norm geometrically.

``reduced_form_linear`` is an independent least-squares solve against the n!
basis products, used as an oracle.

Permutations are 0-based tuples: ``pi[j] = k`` stands for the factor
(z_{j+1} - w_{k+1}).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import ConvergenceError, StructuralError
from .geometry import MoebiusMap
from .mapoly import (
    MAPolynomial,
    evaluate_many,
    homogeneity_degree,
    is_translation_invariant,
)

LINEAR_MAX_N = 5


@dataclass
class PermutationCoefficients:
    n: int
    coeffs: dict  # perm tuple -> complex

    def __post_init__(self):
        clean = {}
        for perm, c in self.coeffs.items():
            perm = tuple(int(p) for p in perm)
            if sorted(perm) != list(range(self.n)):
                raise ValueError(f"{perm} is not a permutation of 0..{self.n - 1}")
            clean[perm] = clean.get(perm, 0j) + complex(c)
        self.coeffs = clean

    def sum_abs(self) -> float:
        return sum(abs(c) for c in self.coeffs.values())

    def to_json(self) -> dict:
        rows = []
        for perm in sorted(self.coeffs):
            c = self.coeffs[perm]
            rows.append({"perm": [p + 1 for p in perm], "re": c.real, "im": c.imag})
        return {"n": self.n, "coeffs": rows}

    @classmethod
    def from_json(cls, data) -> "PermutationCoefficients":
        if isinstance(data, str):
            data = json.loads(data)
        coeffs = {}
        for row in data["coeffs"]:
            perm = tuple(int(p) - 1 for p in row["perm"])
            if perm in coeffs:
                raise ValueError(f"duplicate permutation {row['perm']}")
            coeffs[perm] = complex(row.get("re", 0.0), row.get("im", 0.0))
        return cls(int(data["n"]), coeffs)


@dataclass
class ReductionReport:
    coeffs: PermutationCoefficients
    residual: float  # ||P - assembled|| / ||P||, 2-norm over coefficients
    iterations: int
    sum_abs: float
    norms: list = field(default_factory=list)  # remainder norm before each step

    def to_json(self) -> dict:
        return {
            "coeffs": self.coeffs.to_json(),
            "residual": self.residual,
            "iterations": self.iterations,
            "sum_abs": self.sum_abs,
            "norms": list(self.norms),
        }


# ---------------------------------------------------------------------------
# dense basis for m = n = k: bit i is z_{i+1}, bit k+i is w_{i+1}


@lru_cache(maxsize=None)
def _basis(k: int):
    """(perms, matrix) with one row per permutation: the dense table of
    prod_j (z_j - w_pi(j))."""
    perms = list(itertools.permutations(range(k)))
    mat = np.zeros((len(perms), 1 << (2 * k)))
    for r, perm in enumerate(perms):
        for choice in range(1 << k):
            mask, sign = 0, 1.0
            for j in range(k):
                if choice >> j & 1:
                    mask |= 1 << (k + perm[j])
                    sign = -sign
                else:
                    mask |= 1 << j
            mat[r, mask] += sign
    mat.setflags(write=False)
    return perms, mat


def _dense(P: MAPolynomial) -> np.ndarray:
    v = np.zeros(1 << P.nvars, dtype=complex)
    for mask, c in P.coeffs.items():
        v[mask] = c
    return v


def _sparse(v: np.ndarray, k: int) -> MAPolynomial:
    nz = np.flatnonzero(v)
    return MAPolynomial(k, k, {int(i): v[i] for i in nz})


def assemble(pc: PermutationCoefficients) -> MAPolynomial:
    """Expand sum_pi C_pi prod_j (z_j - w_pi(j)) into a coefficient table."""
    k = pc.n
    if k == 0:
        return MAPolynomial.constant(0, 0, sum(pc.coeffs.values(), 0j))
    if not pc.coeffs:
        return MAPolynomial.zero(k, k)
    perms = np.array(list(pc.coeffs), dtype=np.int64)
    weights = np.array(list(pc.coeffs.values()), dtype=complex)
    wbits = 1 << (k + perms)  # bit of w_pi(j), one column per j
    full = (1 << k) - 1
    dense = np.zeros(1 << (2 * k), dtype=complex)
    # choice: the set of factors contributing -w instead of z
    for choice in range(1 << k):
        cols = [j for j in range(k) if choice >> j & 1]
        masks = (full & ~choice) + wbits[:, cols].sum(axis=1)
        sign = -1.0 if len(cols) % 2 else 1.0
        np.add.at(dense, masks, sign * weights)
    return _sparse(dense, k)


def _check_reducible(P: MAPolynomial, tol: float = 1e-9) -> int:
    if P.m != P.n:
        raise StructuralError(f"needs as many z's as w's, got m={P.m}, n={P.n}")
    if P.is_zero():
        raise StructuralError("the zero polynomial has no reduced form")
    if homogeneity_degree(P) != P.n:
        raise StructuralError(f"not homogeneous of degree n={P.n}")
    if not is_translation_invariant(P, tol):
        raise StructuralError("not translation invariant")
    return P.n


# ---------------------------------------------------------------------------
# the exchange algorithm


@lru_cache(maxsize=None)
def _exchange_tables(k: int):
    """For each exchange (j, kk): the masks Y avoiding z_j and w_kk, and the
    compacted index of each Y in the 2(k-1)-variable layout."""
    N = 2 * k
    allmasks = np.arange(1 << N)
    out = {}
    for j in range(k):
        for kk in range(k):
            zb, wb = 1 << j, 1 << (k + kk)
            Y = allmasks[(allmasks & (zb | wb)) == 0]
            # drop bit j from the z block and bit kk from the w block
            zpart = Y & ((1 << k) - 1)
            wpart = Y >> k
            zc = (zpart & ((1 << j) - 1)) | ((zpart >> (j + 1)) << j)
            wc = (wpart & ((1 << kk) - 1)) | ((wpart >> (kk + 1)) << kk)
            compact = zc | (wc << (k - 1))
            out[j, kk] = (Y, compact)
    return out


def _reduce_dense(v: np.ndarray, k: int, tol: float, max_iter: int, norms: list | None = None, floor: float = 0.0, strict: bool = True):
    """Decompose the dense table ``v`` (m = n = k); returns {perm: C}.

    ``floor`` is an absolute roundoff level inherited from the top-level
    table: sub-problems below it are noise, not (a)-type polynomials, and
    asking them for relative accuracy would never terminate. Inner calls run
    with ``strict=False`` and return their best effort: whatever they leave
    behind is still translation invariant and gets picked up by the caller's
    next exchange.
    """
    if k == 1:
        # (a)_1 forces v = C z1 - C w1
        c = complex(v[0b01])
        return {(0,): c} if abs(c) > floor else {}
    perms, mat = _basis(k)
    index = {p: i for i, p in enumerate(perms)}
    tables = _exchange_tables(k)
    weights = np.zeros(len(perms), dtype=complex)
    rest = v.copy()
    target = max(tol * np.linalg.norm(v), floor)
    prev = np.inf
    for it in range(max_iter + 1):
        norm = np.linalg.norm(rest)
        if norm <= target or norm == 0:
            if norms is not None:
                norms.append(float(norm))
            return {p: weights[i] for i, p in enumerate(perms) if weights[i] != 0}
        if it == max_iter or norm >= prev:
            break
        if norms is not None:
            norms.append(float(norm))
        prev = norm
        best = None
        for j in range(k):
            for kk in range(k):
                Y, compact = tables[j, kk]
                diff = rest[Y | (1 << j)] - rest[Y | (1 << (k + kk))]
                i = int(np.argmax(np.abs(diff)))
                # lexicographic tie-break: (j, kk) loop order, then smallest Z
                if best is None or abs(diff[i]) > best[0]:
                    best = (abs(diff[i]), j, kk)
        _, j, kk = best
        Y, compact = tables[j, kk]
        half = np.zeros(1 << (2 * (k - 1)), dtype=complex)
        half[compact] = (rest[Y | (1 << j)] - rest[Y | (1 << (k + kk))]) / 2
        sub = _reduce_dense(half, k - 1, tol, max_iter, floor=floor, strict=False)
        if not sub:
            break
        others_z = [i for i in range(k) if i != j]
        others_w = [i for i in range(k) if i != kk]
        for sperm, c in sub.items():
            perm = [0] * k
            perm[j] = kk
            for a, b in zip(others_z, sperm):
                perm[a] = others_w[b]
            weights[index[tuple(perm)]] += c
            rest -= c * mat[index[tuple(perm)]]
    if not strict:
        return {p: weights[i] for i, p in enumerate(perms) if weights[i] != 0}
    raise ConvergenceError(
        f"reduced form stalled at relative residual {np.linalg.norm(rest) / np.linalg.norm(v):.3g}",
        best={p: weights[i] for i, p in enumerate(perms)},
        residual=float(np.linalg.norm(rest) / np.linalg.norm(v)),
    )


def reduced_form_iterative(P: MAPolynomial, tol: float = 1e-12, max_iter: int = 10_000) -> ReductionReport:
    """Reduced form of a translation-invariant, degree-n homogeneous P (m = n)."""
    k = _check_reducible(P)
    v = _dense(P)
    norms: list = []
    floor = 64 * np.finfo(float).eps * np.linalg.norm(v)
    coeffs = _reduce_dense(v, k, tol, max_iter, norms, floor)
    pc = PermutationCoefficients(k, coeffs)
    residual = np.linalg.norm(_dense(assemble(pc)) - v) / np.linalg.norm(v)
    return ReductionReport(pc, float(residual), max(len(norms) - 1, 0), pc.sum_abs(), norms)


def reduced_form_linear(P: MAPolynomial) -> ReductionReport:
    """Least-squares reduced form against the n! basis products (n <= 5)."""
    k = _check_reducible(P)
    if k > LINEAR_MAX_N:
        raise ValueError(f"n={k} too large for the dense solve (max {LINEAR_MAX_N})")
    perms, mat = _basis(k)
    v = _dense(P)
    x, *_ = np.linalg.lstsq(mat.T.astype(complex), v, rcond=None)
    pc = PermutationCoefficients(k, {p: x[i] for i, p in enumerate(perms)})
    residual = np.linalg.norm(mat.T @ x - v) / np.linalg.norm(v)
    return ReductionReport(pc, float(residual), 1, pc.sum_abs(), [])


# ---------------------------------------------------------------------------
# identities of reduced forms


def diagonal_restrict(P: MAPolynomial, w) -> np.ndarray:
    """Ascending coefficients of z -> P(z, ..., z, w_1, ..., w_n)."""
    w = np.asarray(w, dtype=complex)
    if len(w) != P.n:
        raise ValueError(f"need {P.n} w-values, got {len(w)}")
    out = np.zeros(P.m + 1, dtype=complex)
    zmask = (1 << P.m) - 1
    for mask, c in P.coeffs.items():
        term = c
        wm = mask >> P.m
        for j in range(P.n):
            if wm >> j & 1:
                term *= w[j]
        out[(mask & zmask).bit_count()] += term
    return out


def check_conformal_invariance(P: MAPolynomial, phi: MoebiusMap, samples: int = 100, seed=0, check: bool = True) -> float:
    """Largest relative gap between P(phi(x)) and P(x) * prod_j det / ((c z_j + d)(c w_j + d))
    over random sample points."""
    if check:
        _check_reducible(P)
    elif P.m != P.n:
        raise ValueError("needs m == n")
    rng = np.random.default_rng(seed)
    n = P.n
    X = np.empty((0, 2 * n), dtype=complex)
    for _ in range(100):
        cand = rng.standard_normal((samples, 2 * n)) + 1j * rng.standard_normal((samples, 2 * n))
        den = phi.c * cand + phi.d
        ok = np.all(np.abs(den) > 1e-3 * (abs(phi.c) * np.abs(cand) + abs(phi.d)), axis=1)
        X = np.vstack([X, cand[ok]])
        if len(X) >= samples:
            break
    X = X[:samples]
    den = phi.c * X + phi.d
    Y = (phi.a * X + phi.b) / den
    lhs = evaluate_many(P, Y)
    factor = np.prod(phi.det / (den[:, :n] * den[:, n:]), axis=1)
    rhs = evaluate_many(P, X) * factor
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    scale[scale == 0] = 1.0
    return float(np.max(np.abs(lhs - rhs) / scale))
