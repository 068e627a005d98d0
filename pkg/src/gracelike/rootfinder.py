"""Roots of univariate polynomials by Aberth-Ehrlich simultaneous iteration.

Coefficients are always given in ascending order, ``c[0] + c[1] z + ...``.

Integer-coefficient inputs (the graph counting polynomials) are first split
into square-free factors with exact arithmetic, so repeated roots such as
those of (1+z)^3 come out exactly repeated instead of as an eps^(1/3) cloud.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConvergenceError

EPS = np.finfo(float).eps
CLUSTER_REL = 1e-6


@dataclass
class RootSet:
    roots: np.ndarray  # every root, repeated by multiplicity
    clusters: list = field(default_factory=list)  # (center, multiplicity)
    residuals: np.ndarray = None  # |p(r)| / (sum|c| * max(1,|r|)^deg)
    bound: float = 0.0

    @property
    def degree(self) -> int:
        return len(self.roots)

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if len(self.residuals) else 0.0

    def to_json(self) -> list:
        return [{"re": float(r.real), "im": float(r.imag)} for r in self.roots]


def trim(coeffs) -> np.ndarray:
    """Drop exactly-zero high-order coefficients."""
    c = np.asarray(coeffs, dtype=complex)
    nz = np.flatnonzero(c)
    if len(nz) == 0:
        return c[:0]
    return c[: nz[-1] + 1]


def polyval(coeffs, z):
    """Horner evaluation of an ascending coefficient list at ``z`` (scalar or array)."""
    c = np.asarray(coeffs, dtype=complex)
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z) + c[-1]
    for a in c[-2::-1]:
        out = out * z + a
    return out


def _eval_with_bound(c, z):
    p = polyval(c, z)
    dp = polyval(c[1:] * np.arange(1, len(c)), z) if len(c) > 1 else np.zeros_like(z)
    # running error bound for Horner, Higham-style
    scale = polyval(np.abs(c), np.abs(z)).real
    return p, dp, scale


def _initial_guesses(c, d):
    # Radii from the upper convex hull of log|c_k| (Newton polygon) would be
    # sharper; the geometric mean is enough at the degrees used here.
    radius = (abs(c[0]) / abs(c[-1])) ** (1.0 / d)
    if not np.isfinite(radius) or radius == 0:
        radius = 1.0
    angles = 2 * np.pi * np.arange(d) / d + 0.4
    return radius * np.exp(1j * angles) * (1 + 0.01 * np.arange(d) / d)


def aberth(coeffs, max_iter: int = 1000):
    """Raw Aberth-Ehrlich iteration on a polynomial with nonzero constant term.

    Returns ``(roots, converged)``.
    """
    c = np.asarray(coeffs, dtype=complex)
    d = len(c) - 1
    if d == 1:
        return np.array([-c[0] / c[1]]), True
    c = c / c[-1]
    z = _initial_guesses(c, d)
    active = np.ones(d, dtype=bool)
    for _ in range(max_iter):
        p, dp, scale = _eval_with_bound(c, z)
        done = np.abs(p) <= 4 * d * EPS * scale
        active &= ~done
        if not active.any():
            return z, True
        idx = np.flatnonzero(active)
        diff = z[idx, None] - z[None, :]
        diff[np.arange(len(idx)), idx] = 1.0
        inv = 1.0 / diff
        inv[np.arange(len(idx)), idx] = 0.0
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p[idx] / dp[idx]
            step = ratio / (1.0 - ratio * s)
        bad = ~np.isfinite(step)
        step[bad] = 1e-3 * (1 + np.abs(z[idx][bad]))
        z[idx] = z[idx] - step
        small = np.abs(step) <= 2 * EPS * np.abs(z[idx])
        active[idx[small]] = False
    return z, False


def _polish(c, z, steps: int = 3):
    z = z.copy()
    for _ in range(steps):
        p, dp, _ = _eval_with_bound(c, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = z - p / dp
        pc = np.abs(polyval(c, cand))
        better = np.isfinite(cand) & (pc < np.abs(p))
        z[better] = cand[better]
    return z


def _cluster(points, rel=CLUSTER_REL):
    """Single-linkage grouping of nearby roots; returns list of index lists."""
    k = len(points)
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(k):
        for j in range(i + 1, k):
            if abs(points[i] - points[j]) <= rel * (1 + abs(points[i])):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _float_roots(c, max_iter):
    """Roots of a float polynomial (nonzero constant term), clustered."""
    z, ok = aberth(c, max_iter)
    if not ok:
        p = np.abs(polyval(c, z))
        raise ConvergenceError("Aberth iteration did not converge", best=z, residual=p)
    z = _polish(c, z)
    clusters = []
    for group in _cluster(z):
        clusters.append((complex(np.mean(z[group])), len(group)))
    return clusters


def _is_integer_input(coeffs) -> bool:
    """Integer dtype, or every value exactly integral, real and below 2**53."""
    if isinstance(coeffs, np.ndarray) and np.issubdtype(coeffs.dtype, np.integer):
        return True
    if all(isinstance(c, numbers.Integral) for c in coeffs):
        return True
    c = np.asarray(coeffs, dtype=complex)
    return bool(
        np.all(np.isfinite(c))
        and np.all(c.imag == 0)
        and np.all(c.real == np.round(c.real))
        and np.all(np.abs(c.real) < 2.0**53)
    )


def _squarefree_factors(int_coeffs):
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly([int(c) for c in reversed(int_coeffs)], x, domain="ZZ")
    _, factors = poly.sqf_list()
    return [([int(a) for a in reversed(f.all_coeffs())], mult) for f, mult in factors]


def roots(coeffs, tol: float = 1e-12, max_iter: int = 1000, exact: bool | None = None) -> RootSet:
    """All roots of the polynomial, with a residual certificate per root.

    Each returned root r satisfies ``|p(r)| <= tol * sum|c| * max(1,|r|)^deg``.
    Roots closer than 1e-6*(1+|r|) are merged and reported as one root of
    higher multiplicity. ``exact=None`` picks exact square-free splitting
    automatically for integer coefficient lists.
    """
    if exact is None:
        exact = _is_integer_input(coeffs)
    c = trim(coeffs)
    deg = len(c) - 1
    if deg < 1:
        raise ValueError("need a polynomial of degree >= 1")
    if not np.all(np.isfinite(c)):
        raise ValueError("coefficients must be finite")

    zeros = int(np.flatnonzero(c)[0])
    clusters: list = [(0j, zeros)] if zeros else []
    core = c[zeros:]
    if len(core) > 1:
        if exact:
            ints = [int(round(v.real)) for v in core]
            for factor, mult in _squarefree_factors(ints):
                if len(factor) < 2:
                    continue
                for center, k in _float_roots(np.array(factor, dtype=complex), max_iter):
                    clusters.append((center, k * mult))
        else:
            clusters.extend(_float_roots(core, max_iter))

    clusters.sort(key=lambda ck: (round(ck[0].real, 12), round(ck[0].imag, 12)))
    rts = np.array([r for r, k in clusters for _ in range(k)], dtype=complex)
    assert len(rts) == deg
    scale = np.abs(c).sum() * np.maximum(1.0, np.abs(rts)) ** deg
    residuals = np.abs(polyval(c, rts)) / scale
    if np.any(residuals > tol):
        raise ConvergenceError(
            f"root residual {residuals.max():.3g} exceeds tolerance {tol:.3g}",
            best=rts,
            residual=residuals,
        )
    return RootSet(roots=rts, clusters=clusters, residuals=residuals, bound=tol)


def from_roots(rts, leading: complex = 1.0) -> np.ndarray:
    """Ascending coefficients of ``leading * prod (z - r)``."""
    c = np.array([leading], dtype=complex)
    for r in rts:
        c = np.concatenate([[0], c]) - r * np.concatenate([c, [0]])
    return c


__all__ = ["RootSet", "roots", "polyval", "trim", "from_roots", "aberth"]
