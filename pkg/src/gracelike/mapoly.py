"""Multiaffine polynomials in split variables z1..zm, w1..wn.

A polynomial is stored as a table ``{mask: coefficient}`` where ``mask`` is a
bitmask over the m+n variable positions. z_i sits at bit ``i-1`` and w_j at
bit ``m+j-1``, so a key can never contain a variable twice and multiaffinity
holds by construction.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

MAX_VARIABLES = 30
DROP_TOL = 1e-14


class VarId(NamedTuple):
    """A variable name such as z3 (side ``"z"``, 1-based index 3)."""

    side: str
    index: int

    @classmethod
    def parse(cls, name: str) -> "VarId":
        name = name.strip()
        if len(name) < 2 or name[0] not in "zw" or not name[1:].isdigit():
            raise ValueError(f"bad variable name {name!r}")
        index = int(name[1:])
        if index < 1:
            raise ValueError(f"variable indices are 1-based, got {name!r}")
        return cls(name[0], index)

    def __str__(self) -> str:
        return f"{self.side}{self.index}"


def as_var(v) -> VarId:
    if isinstance(v, VarId):
        return v
    if isinstance(v, str):
        return VarId.parse(v)
    if isinstance(v, tuple) and len(v) == 2:
        return VarId(*v)
    raise TypeError(f"cannot interpret {v!r} as a variable")


def _finite(c: complex) -> bool:
    return math.isfinite(c.real) and math.isfinite(c.imag)


@dataclass(frozen=True, eq=False)
class MAPolynomial:
    """Multiaffine polynomial ``sum_S c_S prod_{x in S} x``.

    Instances are immutable; every operation returns a new polynomial.
    """

    m: int
    n: int
    coeffs: Mapping[int, complex]

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ValueError("variable counts must be non-negative")
        if self.m + self.n > MAX_VARIABLES:
            raise ValueError(f"m+n={self.m + self.n} exceeds {MAX_VARIABLES}")
        full = (1 << (self.m + self.n)) - 1
        table = {}
        for mask, c in dict(self.coeffs).items():
            mask = int(mask)
            if mask < 0 or mask & ~full:
                raise ValueError(f"subset {mask:#b} outside the {self.m}+{self.n} variables")
            c = complex(c)
            if not _finite(c):
                raise ValueError("coefficients must be finite")
            table[mask] = c
        object.__setattr__(self, "coeffs", MappingProxyType(table))

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, m: int, n: int) -> "MAPolynomial":
        return cls(m, n, {})

    @classmethod
    def constant(cls, m: int, n: int, c: complex = 1.0) -> "MAPolynomial":
        return cls(m, n, {0: c} if c != 0 else {})

    @classmethod
    def variable(cls, m: int, n: int, v) -> "MAPolynomial":
        p = cls(m, n, {})
        return cls(m, n, {1 << p.position(v): 1.0})

    @classmethod
    def from_terms(cls, m: int, n: int, terms) -> "MAPolynomial":
        """Build from ``{("z1", "w2"): coeff, (): const, ...}`` or a list of pairs.

        Repeated subsets are rejected.
        """
        items = terms.items() if isinstance(terms, Mapping) else terms
        probe = cls(m, n, {})
        table: dict[int, complex] = {}
        for names, c in items:
            if isinstance(names, (str, VarId)):
                names = (names,)
            mask = 0
            for name in names:
                bit = 1 << probe.position(name)
                if mask & bit:
                    raise ValueError(f"variable {name} repeated in one monomial")
                mask |= bit
            if mask in table:
                raise ValueError(f"duplicate monomial {probe.monomial_name(mask)}")
            table[mask] = c
        return cls(m, n, table)

    # -- variables ----------------------------------------------------------

    @property
    def nvars(self) -> int:
        return self.m + self.n

    def position(self, v) -> int:
        v = as_var(v)
        if v.side == "z" and 1 <= v.index <= self.m:
            return v.index - 1
        if v.side == "w" and 1 <= v.index <= self.n:
            return self.m + v.index - 1
        raise ValueError(f"variable {v} not among z1..z{self.m}, w1..w{self.n}")

    def var_at(self, pos: int) -> VarId:
        if not 0 <= pos < self.nvars:
            raise ValueError(f"position {pos} out of range")
        return VarId("z", pos + 1) if pos < self.m else VarId("w", pos - self.m + 1)

    def variables(self) -> list[VarId]:
        return [self.var_at(i) for i in range(self.nvars)]

    def monomial_name(self, mask: int) -> str:
        names = [str(self.var_at(i)) for i in range(self.nvars) if mask >> i & 1]
        return "*".join(names) if names else "1"

    # -- container protocol ------------------------------------------------

    def __getitem__(self, key) -> complex:
        if not isinstance(key, int):
            key = self.mask_of(key)
        return self.coeffs.get(key, 0j)

    def mask_of(self, names: Iterable) -> int:
        mask = 0
        for name in names:
            mask |= 1 << self.position(name)
        return mask

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MAPolynomial):
            return NotImplemented
        return self.m == other.m and self.n == other.n and dict(self.coeffs) == dict(other.coeffs)

    def __hash__(self):
        return hash((self.m, self.n, frozenset(self.coeffs.items())))

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"MAPolynomial(m={self.m}, n={self.n}, 0)"
        parts = []
        for mask in sorted(self.coeffs, key=lambda k: (k.bit_count(), k)):
            c = self.coeffs[mask]
            cs = f"{c.real:g}" if c.imag == 0 else f"({c:g})"
            parts.append(f"{cs}*{self.monomial_name(mask)}" if mask else cs)
        return f"MAPolynomial(m={self.m}, n={self.n}, " + " + ".join(parts) + ")"

    # -- arithmetic ---------------------------------------------------------

    def _check_same_space(self, other: "MAPolynomial"):
        if (self.m, self.n) != (other.m, other.n):
            raise ValueError(f"variable sets differ: ({self.m},{self.n}) vs ({other.m},{other.n})")

    def __add__(self, other):
        if not isinstance(other, MAPolynomial):
            return NotImplemented
        self._check_same_space(other)
        table = dict(self.coeffs)
        for k, c in other.coeffs.items():
            table[k] = table.get(k, 0j) + c
        return MAPolynomial(self.m, self.n, table)

    def __neg__(self):
        return MAPolynomial(self.m, self.n, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, MAPolynomial):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, MAPolynomial):
            return NotImplemented
        scalar = complex(scalar)
        return MAPolynomial(self.m, self.n, {k: c * scalar for k, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / complex(scalar))

    def __call__(self, *values):
        if len(values) == 1 and np.ndim(values[0]) == 1:
            values = values[0]
        return evaluate(self, values)

    # -- norms --------------------------------------------------------------

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs.values())

    # -- vectorised evaluation support ---------------------------------------

    @cached_property
    def _arrays(self):
        masks = np.array(sorted(self.coeffs), dtype=np.int64)
        coefs = np.array([self.coeffs[int(k)] for k in masks], dtype=complex)
        bits = np.arange(self.nvars, dtype=np.int64)
        member = (masks[:, None] >> bits[None, :]) & 1 == 1 if len(masks) else np.zeros((0, self.nvars), bool)
        return masks, coefs, member


# ---------------------------------------------------------------------------
# evaluation


def evaluate(P: MAPolynomial, assignment: Sequence[complex]) -> complex:
    """Value of P at ``assignment`` (z1..zm then w1..wn)."""
    values = [complex(v) for v in assignment]
    if len(values) != P.nvars:
        raise ValueError(f"expected {P.nvars} values, got {len(values)}")
    if not all(_finite(v) for v in values):
        raise ValueError("assignment must be finite")
    total = 0j
    for mask, c in P.coeffs.items():
        term = c
        i = 0
        while mask:
            if mask & 1:
                term *= values[i]
            mask >>= 1
            i += 1
        total += term
    return total


def evaluate_many(P: MAPolynomial, X) -> np.ndarray:
    """Evaluate P at every row of the ``(batch, m+n)`` array ``X``."""
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[1] != P.nvars:
        raise ValueError(f"expected shape (batch, {P.nvars}), got {X.shape}")
    masks, coefs, member = P._arrays
    if len(masks) == 0:
        return np.zeros(X.shape[0], dtype=complex)
    prod = np.ones((X.shape[0], len(masks)), dtype=complex)
    for v in range(P.nvars):
        sel = member[:, v]
        if sel.any():
            prod[:, sel] *= X[:, v : v + 1]
    return prod @ coefs


# ---------------------------------------------------------------------------
# structural operations


def normalize(P: MAPolynomial, drop_tol: float = DROP_TOL) -> MAPolynomial:
    """Drop coefficients with modulus <= drop_tol * (largest modulus)."""
    cut = drop_tol * P.max_abs()
    return MAPolynomial(P.m, P.n, {k: c for k, c in P.coeffs.items() if abs(c) > cut and c != 0})


def _remove_bit(mask: int, pos: int) -> int:
    low = mask & ((1 << pos) - 1)
    return low | ((mask >> (pos + 1)) << pos)


def substitute(P: MAPolynomial, v, value: complex) -> MAPolynomial:
    """Fix one variable to ``value``; the result lives on the remaining m+n-1 variables."""
    pos = P.position(v)
    value = complex(value)
    side = as_var(v).side
    m, n = (P.m - 1, P.n) if side == "z" else (P.m, P.n - 1)
    table: dict[int, complex] = {}
    for mask, c in P.coeffs.items():
        if mask >> pos & 1:
            c = c * value
        key = _remove_bit(mask, pos)
        table[key] = table.get(key, 0j) + c
    return MAPolynomial(m, n, table)


def split_variable(P: MAPolynomial, v) -> tuple[MAPolynomial, MAPolynomial]:
    """Write P = x*A + B for the variable x; A and B keep P's variable set but
    do not involve x."""
    bit = 1 << P.position(v)
    A = {k ^ bit: c for k, c in P.coeffs.items() if k & bit}
    B = {k: c for k, c in P.coeffs.items() if not k & bit}
    return MAPolynomial(P.m, P.n, A), MAPolynomial(P.m, P.n, B)


def multiply_disjoint(P1: MAPolynomial, P2: MAPolynomial) -> MAPolynomial:
    """Product on disjoint variable sets.

    The result has z-variables ``z'_1..z'_m1, z''_1..z''_m2`` and likewise for w.
    """
    m, n = P1.m + P2.m, P1.n + P2.n
    if m + n > MAX_VARIABLES:
        raise ValueError(f"product would have {m + n} variables (max {MAX_VARIABLES})")

    def lift(mask, mm, zoff, woff):
        zpart = mask & ((1 << mm) - 1)
        wpart = mask >> mm
        return (zpart << zoff) | (wpart << (m + woff))

    table: dict[int, complex] = {}
    left = [(lift(k, P1.m, 0, 0), c) for k, c in P1.coeffs.items()]
    right = [(lift(k, P2.m, P1.m, P1.n), c) for k, c in P2.coeffs.items()]
    for k1, c1 in left:
        for k2, c2 in right:
            key = k1 | k2
            table[key] = table.get(key, 0j) + c1 * c2
    return MAPolynomial(m, n, table)


def _check_perm(perm, size, label):
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(size)):
        raise ValueError(f"{label} must be a permutation of 0..{size - 1}, got {perm}")
    return perm


def transform(P: MAPolynomial, zperm=None, wperm=None, swap_zw: bool = False) -> MAPolynomial:
    """Relabel variables.

    ``zperm[i] = k`` sends z_{i+1} to z_{k+1} (0-based permutation lists), and
    likewise for ``wperm``. With ``swap_zw`` the z and w blocks are then
    interchanged and the result is multiplied by (-1)^n.
    """
    zperm = _check_perm(range(P.m) if zperm is None else zperm, P.m, "zperm")
    wperm = _check_perm(range(P.n) if wperm is None else wperm, P.n, "wperm")
    if swap_zw and P.m != P.n:
        raise ValueError("swap_zw needs m == n")
    target = list(zperm) + [P.m + k for k in wperm]
    if swap_zw:
        target = [t + P.m if t < P.m else t - P.m for t in target]
    sign = (-1) ** P.n if swap_zw else 1
    table = {}
    for mask, c in P.coeffs.items():
        new = 0
        for i in range(P.nvars):
            if mask >> i & 1:
                new |= 1 << target[i]
        table[new] = sign * c
    return MAPolynomial(P.m, P.n, table)


def reverse_tilde(P: MAPolynomial) -> MAPolynomial:
    """``(prod z)(prod w) P(1/z, 1/w)``: the coefficient table read in complement."""
    full = (1 << P.nvars) - 1
    return MAPolynomial(P.m, P.n, {full ^ k: c for k, c in P.coeffs.items()})


def _submasks(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def translate_all(P: MAPolynomial, s: complex) -> MAPolynomial:
    """Q with Q(x) = P(x + s) for every variable at once (exact binomial re-expansion)."""
    s = complex(s)
    powers = [s**k for k in range(P.nvars + 1)]
    table: dict[int, complex] = {}
    for mask, c in P.coeffs.items():
        size = mask.bit_count()
        for sub in _submasks(mask):
            table[sub] = table.get(sub, 0j) + c * powers[size - sub.bit_count()]
    return MAPolynomial(P.m, P.n, table)


def homogeneity_degree(P: MAPolynomial) -> int | None:
    degrees = {k.bit_count() for k, c in P.coeffs.items() if c != 0}
    if not degrees:
        raise ValueError("the zero polynomial has no homogeneity degree")
    return degrees.pop() if len(degrees) == 1 else None


def max_coeff_diff(P: MAPolynomial, Q: MAPolynomial) -> float:
    P._check_same_space(Q)
    keys = set(P.coeffs) | set(Q.coeffs)
    return max((abs(P[k] - Q[k]) for k in keys), default=0.0)


def is_translation_invariant(P: MAPolynomial, tol: float = 1e-10) -> bool:
    """True when P(x + s) == P(x) as polynomials, checked at s = 1 and s = i."""
    bound = tol * (1.0 + P.max_abs())
    return all(max_coeff_diff(translate_all(P, s), P) <= bound for s in (1.0, 1j))


def effective_variables(P: MAPolynomial) -> set[VarId]:
    used = 0
    for mask, c in P.coeffs.items():
        if c != 0:
            used |= mask
    return {P.var_at(i) for i in range(P.nvars) if used >> i & 1}


def merge_variables(P: MAPolynomial, names) -> dict[tuple[int, int], complex]:
    """Set the given variables all equal to one shared symbol t.

    The result is no longer multiaffine, so it comes back as a plain table
    ``{(power of t, mask of the other variables): coeff}`` where the mask
    still uses P's bit layout with the merged bits cleared.
    """
    merged = P.mask_of(names)
    out: dict[tuple[int, int], complex] = {}
    for mask, c in P.coeffs.items():
        key = ((mask & merged).bit_count(), mask & ~merged)
        out[key] = out.get(key, 0j) + c
    return out


# ---------------------------------------------------------------------------
# JSON


def to_json(P: MAPolynomial) -> dict:
    terms = []
    for mask in sorted(P.coeffs):
        c = P.coeffs[mask]
        names = [str(P.var_at(i)) for i in range(P.nvars) if mask >> i & 1]
        terms.append({"vars": names, "re": c.real, "im": c.imag})
    return {"m": P.m, "n": P.n, "terms": terms}


def from_json(data) -> MAPolynomial:
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    try:
        m, n = int(data["m"]), int(data["n"])
        pairs = []
        for term in data["terms"]:
            c = complex(float(term.get("re", 0.0)), float(term.get("im", 0.0)))
            pairs.append((tuple(term["vars"]), c))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed polynomial JSON: {exc}") from exc
    return MAPolynomial.from_terms(m, n, pairs)


def dumps(P: MAPolynomial) -> str:
    return json.dumps(to_json(P))


def loads(text: str) -> MAPolynomial:
    return from_json(json.loads(text))


def random_mapoly(rng, m: int, n: int, density: float = 1.0, degree: int | None = None) -> MAPolynomial:
    """Random polynomial with coefficients in the unit disc, for tests and demos.

    ``degree`` restricts the support to subsets of that size.
    """
    table = {}
    for mask in range(1 << (m + n)):
        if degree is not None and mask.bit_count() != degree:
            continue
        if rng.random() <= density:
            r, t = math.sqrt(rng.random()), 2 * math.pi * rng.random()
            table[mask] = cmath.rect(r, t)
    return MAPolynomial(m, n, table)
