"""Asano contraction and the Lee-Yang circle theorem.

The contraction ``A uv + B u + C v + D -> A z + D`` merges two variables
into one. If the input does not vanish for u outside K and v outside L
(K, L closed sets avoiding 0), the output does not vanish for z outside
-K*L = {-uv : u in K, v in L}. Starting from prod (1 + z_i) and contracting
in one pair factor ``z_i z_j + a_ij z_i + a_ji z_j + 1`` per pair gives the
Lee-Yang polynomial, whose roots lie on the unit circle when
|a_ij| <= 1 and a_ij = conj(a_ji).

Univariate polynomials are ascending coefficient arrays.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .mapoly import MAPolynomial, _remove_bit, as_var, multiply_disjoint
from .rootfinder import roots

MAX_DIRECT_N = 16
HERMITIAN_TOL = 1e-12


def asano_contract(P: MAPolynomial, u, v) -> MAPolynomial:
    """Replace the pair (u, v) by one variable: A uv + B u + C v + D -> A z + D.

    The new variable sits where u was; v is removed and later variables on
    its side shift down by one. When P has no uv part the result is just D.
    """
    u, v = as_var(u), as_var(v)
    if u == v:
        raise ValueError("cannot contract a variable with itself")
    pu, pv = P.position(u), P.position(v)
    both = (1 << pu) | (1 << pv)
    table: dict[int, complex] = {}
    for mask, c in P.coeffs.items():
        hit = mask & both
        if hit and hit != both:
            continue  # the B u and C v parts are dropped
        new = _remove_bit(mask & ~(1 << pv), pv)
        table[new] = table.get(new, 0j) + c
    m, n = (P.m - 1, P.n) if v.side == "z" else (P.m, P.n - 1)
    return MAPolynomial(m, n, table)


# ---------------------------------------------------------------------------
# radial regions and the key lemma


@dataclass(frozen=True)
class RadialRegion:
    """Origin-centred closed region r_in <= |z| <= r_out.

    ``kind`` is "disc_complement" (r_out = inf), "annulus" or "disc" (r_in = 0).
    """

    kind: str
    r_in: float = 0.0
    r_out: float = math.inf

    def __post_init__(self):
        if self.kind == "disc_complement":
            ok = self.r_in > 0 and self.r_out == math.inf
        elif self.kind == "annulus":
            ok = 0 < self.r_in <= self.r_out < math.inf
        elif self.kind == "disc":
            ok = self.r_in == 0 and 0 < self.r_out < math.inf
        else:
            raise ValueError(f"unknown region kind {self.kind!r}")
        if not ok:
            raise ValueError(f"bad radii for {self.kind}: r_in={self.r_in}, r_out={self.r_out}")

    @classmethod
    def outside(cls, r: float) -> "RadialRegion":
        return cls("disc_complement", float(r))

    @classmethod
    def annulus(cls, r_in: float, r_out: float) -> "RadialRegion":
        return cls("annulus", float(r_in), float(r_out))

    @classmethod
    def disc(cls, r: float) -> "RadialRegion":
        return cls("disc", 0.0, float(r))

    @property
    def contains_zero(self) -> bool:
        return self.r_in == 0

    def contains(self, z, tol: float = 0.0):
        r = np.abs(np.asarray(z))
        return (r >= self.r_in * (1 - tol)) & (r <= self.r_out * (1 + tol))

    def to_json(self) -> dict:
        out = {"kind": self.kind, "r_in": self.r_in}
        if self.r_out != math.inf:
            out["r_out"] = self.r_out
        return out


def key_lemma_region(K: RadialRegion, L: RadialRegion) -> RadialRegion:
    """-K*L for origin-centred regions: the modulus intervals multiply and
    the minus sign changes nothing for a rotation-invariant set."""
    if K.contains_zero or L.contains_zero:
        raise ValueError("K and L must be closed subsets of C \\ {0}")
    lo, hi = K.r_in * L.r_in, K.r_out * L.r_out
    if hi == math.inf:
        return RadialRegion.outside(lo)
    return RadialRegion.annulus(lo, hi)


# ---------------------------------------------------------------------------
# Lee-Yang


@dataclass
class PairCoefficients:
    n: int
    a: np.ndarray  # n x n, diagonal unused

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=complex)
        if self.a.shape != (self.n, self.n):
            raise ValueError(f"a must be {self.n}x{self.n}, got shape {self.a.shape}")
        if not np.all(np.isfinite(self.a)):
            raise ValueError("coefficients must be finite")

    def satisfies_hypothesis(self, tol: float = HERMITIAN_TOL) -> bool:
        """|a_ij| <= 1 and a_ij = conj(a_ji) off the diagonal."""
        off = ~np.eye(self.n, dtype=bool)
        herm = np.abs(self.a - self.a.conj().T)[off]
        return bool(np.all(herm <= tol) and np.all(np.abs(self.a[off]) <= 1 + tol))

    @classmethod
    def random(cls, rng, n: int) -> "PairCoefficients":
        """Hermitian pattern with off-diagonal entries uniform in the closed unit disc."""
        a = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(i + 1, n):
                r, t = math.sqrt(rng.random()), 2 * math.pi * rng.random()
                a[i, j] = r * complex(math.cos(t), math.sin(t))
                a[j, i] = a[i, j].conjugate()
        return cls(n, a)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "a": [[{"re": float(x.real), "im": float(x.imag)} for x in row] for row in self.a],
        }

    @classmethod
    def from_json(cls, data) -> "PairCoefficients":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        try:
            n = int(data["n"])
            a = [[complex(float(x.get("re", 0.0)), float(x.get("im", 0.0))) for x in row] for row in data["a"]]
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed pair coefficient JSON: {exc}") from exc
        if len(a) != n or any(len(row) != n for row in a):
            raise ValueError(f"a must be an {n}x{n} array")
        return cls(n, np.array(a, dtype=complex).reshape(n, n))


def lee_yang_polynomial(a: PairCoefficients) -> np.ndarray:
    """sum over subsets X of z^|X| prod_{i in X} prod_{j not in X} a_ij,
    by direct enumeration of the 2^n subsets."""
    n = a.n
    if not 1 <= n <= MAX_DIRECT_N:
        raise ValueError(f"n must lie in 1..{MAX_DIRECT_N}, got {n}")
    masks = np.arange(1 << n)
    member = ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)
    weight = np.ones(len(masks), dtype=complex)
    for i in range(n):
        for j in range(n):
            if i != j:
                weight = np.where(member[:, i] & ~member[:, j], weight * a.a[i, j], weight)
    sizes = member.sum(axis=1)
    out = np.zeros(n + 1, dtype=complex)
    np.add.at(out, sizes, weight)
    return out


def pair_factor(a_ij: complex, a_ji: complex) -> MAPolynomial:
    """u v + a_ij u + a_ji v + 1 in two z-variables."""
    return MAPolynomial(2, 0, {0b11: 1.0, 0b01: a_ij, 0b10: a_ji, 0b00: 1.0})


def lee_yang_asano(a: PairCoefficients) -> np.ndarray:
    """The same polynomial built by Asano contractions: start from
    prod (1 + z_i), multiply in each pair factor on fresh variables and
    contract them straight back into z_i and z_j."""
    n = a.n
    P = MAPolynomial(1, 0, {0: 1.0, 1: 1.0})
    for _ in range(n - 1):
        P = multiply_disjoint(P, MAPolynomial(1, 0, {0: 1.0, 1: 1.0}))
    for i in range(n):
        for j in range(i + 1, n):
            P = multiply_disjoint(P, pair_factor(a.a[i, j], a.a[j, i]))
            P = asano_contract(P, f"z{i + 1}", f"z{n + 1}")
            P = asano_contract(P, f"z{j + 1}", f"z{n + 1}")
    out = np.zeros(n + 1, dtype=complex)
    for mask, c in P.coeffs.items():
        out[mask.bit_count()] += c
    return out


@dataclass
class CircleReport:
    roots: np.ndarray
    deviations: np.ndarray  # ||r| - 1| per root
    max_deviation: float
    passed: bool
    tol: float

    def to_json(self) -> dict:
        return {
            "roots": [{"re": float(r.real), "im": float(r.imag)} for r in self.roots],
            "deviations": [float(d) for d in self.deviations],
            "max_deviation": self.max_deviation,
            "tol": self.tol,
            "pass": self.passed,
        }


def verify_unit_circle(p, tol: float = 1e-6) -> CircleReport:
    """Solve for the roots of ``p`` and measure their distance from |z| = 1."""
    rs = roots(p).roots
    dev = np.abs(np.abs(rs) - 1.0)
    worst = float(dev.max()) if len(dev) else 0.0
    return CircleReport(rs, dev, worst, worst <= tol, tol)


def asano_demo(a: float, radii: int = 20, angles: int = 24) -> dict:
    """Walk through one contraction step for the factor uv + a u + a v + 1.

    For real |a| <= 1 the factor has no zero with |u| < 1 and |v| < 1, so
    K = L = {|.| >= 1} and the contracted polynomial z + 1 may only vanish
    on -K*L = {|z| >= 1}. A polar grid over the open unit disc gives an
    empirical check of the first claim.
    """
    a = float(a)
    factor = pair_factor(a, a)
    contracted = asano_contract(factor, "z1", "z2")
    A, D = contracted[1], contracted[0]
    r = np.linspace(0.0, 0.999, radii)
    t = 2 * np.pi * np.arange(angles) / angles
    grid = (r[:, None] * np.exp(1j * t)[None, :]).ravel()
    U, V = grid[:, None], grid[None, :]
    vals = np.abs(U * V + a * U + a * V + 1)
    K = RadialRegion.outside(1.0)
    region = key_lemma_region(K, K)
    root = -D / A if A != 0 else None
    return {
        "a": a,
        "hypothesis": abs(a) <= 1,
        "factor": {"uv": 1.0, "u": a, "v": a, "1": 1.0},
        "min_abs_on_open_discs": float(vals.min()),
        "K": K.to_json(),
        "L": K.to_json(),
        "contracted": {"A": [A.real, A.imag], "D": [D.real, D.imag]},
        "region": region.to_json(),
        "root": None if root is None else [root.real, root.imag],
        "root_in_region": None if root is None else bool(region.contains(root, 1e-12)),
    }


__all__ = [
    "asano_contract",
    "RadialRegion",
    "key_lemma_region",
    "PairCoefficients",
    "lee_yang_polynomial",
    "lee_yang_asano",
    "pair_factor",
    "CircleReport",
    "verify_unit_circle",
    "asano_demo",
]
