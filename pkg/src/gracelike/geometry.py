"""Circles, lines and Moebius maps in the complex plane.

A generalized circle is the zero set of

    f(z) = A|z|^2 + B Re z + C Im z + D

with A != 0 for a proper circle and A == 0 for a line. The two open
components of its complement are ``f < 0`` and ``f > 0``. Equivalently f is
the Hermitian form ``(z,1)^* H (z,1)`` with ``H = [[A, beta], [conj(beta), D]]``
and ``beta = (B + iC)/2``; a Moebius map M acts by ``H -> M^{-*} H M^{-1}``,
which keeps the sign of every side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .exceptions import PoleError

POLE_REL = 1e-12


@dataclass(frozen=True)
class GeneralizedCircle:
    A: float
    B: float
    C: float
    D: float

    def __post_init__(self):
        vals = (self.A, self.B, self.C, self.D)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("circle coefficients must be finite")
        if self.A == 0:
            if self.B == 0 and self.C == 0:
                raise ValueError("degenerate circle: A = B = C = 0")
        elif self.B**2 + self.C**2 - 4 * self.A * self.D <= 0:
            raise ValueError("circle has non-positive squared radius")

    @classmethod
    def from_center_radius(cls, center: complex, radius: float) -> "GeneralizedCircle":
        """Circle with the inside on the negative side."""
        c = complex(center)
        return cls(1.0, -2 * c.real, -2 * c.imag, abs(c) ** 2 - radius**2)

    @classmethod
    def line_through(cls, p: complex, q: complex) -> "GeneralizedCircle":
        p, q = complex(p), complex(q)
        d = q - p
        if d == 0:
            raise ValueError("need two distinct points")
        B, C = -d.imag, d.real  # normal i*d; positive side on the left of p->q
        return cls(0.0, B, C, -(B * p.real + C * p.imag))

    @classmethod
    def through_points(cls, p: complex, q: complex, r: complex) -> "GeneralizedCircle":
        """The unique circle (or line, if collinear) through three points."""
        M = np.array([[abs(x) ** 2, x.real, x.imag, 1.0] for x in map(complex, (p, q, r))])
        # null vector of the 3x4 system
        _, s, vt = np.linalg.svd(M)
        A, B, C, D = vt[-1]
        if abs(A) <= 1e-13 * np.abs(vt[-1]).max():
            A = 0.0
        return cls(float(A), float(B), float(C), float(D))

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C, self.D])

    @property
    def is_line(self) -> bool:
        return self.A == 0

    @property
    def center(self) -> complex:
        if self.is_line:
            raise ValueError("a line has no center")
        return complex(-self.B / (2 * self.A), -self.C / (2 * self.A))

    @property
    def radius(self) -> float:
        if self.is_line:
            return math.inf
        return math.sqrt(self.B**2 + self.C**2 - 4 * self.A * self.D) / (2 * abs(self.A))

    def __call__(self, p):
        return side_of(self, p)

    def negated(self) -> "GeneralizedCircle":
        return GeneralizedCircle(-self.A, -self.B, -self.C, -self.D)

    def scaled(self) -> "GeneralizedCircle":
        s = max(abs(self.A), abs(self.B), abs(self.C), abs(self.D))
        return GeneralizedCircle(self.A / s, self.B / s, self.C / s, self.D / s)

    def distance(self, p: complex) -> float:
        """Euclidean distance from p to the curve."""
        p = complex(p)
        if self.is_line:
            return abs(self.B * p.real + self.C * p.imag + self.D) / math.hypot(self.B, self.C)
        return abs(abs(p - self.center) - self.radius)

    def points(self, k: int) -> np.ndarray:
        """k points spread along the curve (a line is sampled near its foot point)."""
        t = 2 * np.pi * np.arange(k) / k
        if self.is_line:
            nrm = complex(self.B, self.C)
            foot = -self.D * nrm / abs(nrm) ** 2
            return foot + 1j * nrm / abs(nrm) * np.tan(0.9 * (t - np.pi) / 2)
        return self.center + self.radius * np.exp(1j * t)

    def hermitian(self) -> np.ndarray:
        beta = complex(self.B, self.C) / 2
        return np.array([[self.A, beta], [beta.conjugate(), self.D]], dtype=complex)

    @classmethod
    def from_hermitian(cls, H) -> "GeneralizedCircle":
        A = H[0, 0].real
        beta = (H[0, 1] + H[1, 0].conjugate()) / 2
        D = H[1, 1].real
        s = max(abs(A), abs(beta) * 2, abs(D))
        A, B, C, D = A / s, 2 * beta.real / s, 2 * beta.imag / s, D / s
        if abs(A) <= 1e-14:
            A = 0.0
        return cls(float(A), float(B), float(C), float(D))

    def to_json(self) -> dict:
        return {"A": self.A, "B": self.B, "C": self.C, "D": self.D}

    @classmethod
    def from_json(cls, d) -> "GeneralizedCircle":
        return cls(float(d["A"]), float(d["B"]), float(d["C"]), float(d["D"]))


UNIT_CIRCLE = GeneralizedCircle(1.0, 0.0, 0.0, -1.0)
REAL_AXIS = GeneralizedCircle(0.0, 0.0, 1.0, 0.0)


def side_of(circle: GeneralizedCircle, p):
    """Signed value A|p|^2 + B Re p + C Im p + D (vectorised over p)."""
    p = np.asarray(p, dtype=complex)
    val = circle.A * np.abs(p) ** 2 + circle.B * p.real + circle.C * p.imag + circle.D
    return float(val) if val.ndim == 0 else val


def side_values(coeffs, points) -> np.ndarray:
    """Row-wise side values: ``coeffs`` is (batch, 4), ``points`` is (batch, k)."""
    coeffs = np.asarray(coeffs, dtype=float)
    P = np.asarray(points, dtype=complex)
    A, B, C, D = (coeffs[:, i : i + 1] for i in range(4))
    return A * np.abs(P) ** 2 + B * P.real + C * P.imag + D


def separates(circle: GeneralizedCircle, inside, outside) -> bool:
    """True when f < 0 on every point of ``inside`` and f > 0 on ``outside``."""
    fi = np.atleast_1d(side_of(circle, np.asarray(inside, dtype=complex)))
    fo = np.atleast_1d(side_of(circle, np.asarray(outside, dtype=complex)))
    return bool(np.all(fi < 0) and np.all(fo > 0))


def circles_disjoint(g1: GeneralizedCircle, g2: GeneralizedCircle, margin: float = 0.0) -> bool:
    """Whether the two curves do not meet, with a relative safety margin."""
    if g1.is_line and g2.is_line:
        cross = g1.B * g2.C - g1.C * g2.B
        if abs(cross) > 1e-12 * math.hypot(g1.B, g1.C) * math.hypot(g2.B, g2.C):
            return False
        # parallel: compare offsets along the common normal
        n1 = math.hypot(g1.B, g1.C)
        s = 1.0 if g1.B * g2.B + g1.C * g2.C > 0 else -1.0
        n2 = math.hypot(g2.B, g2.C)
        return abs(g1.D / n1 - s * g2.D / n2) > margin
    if g1.is_line or g2.is_line:
        line, circ = (g1, g2) if g1.is_line else (g2, g1)
        return line.distance(circ.center) > circ.radius * (1 + margin)
    d = abs(g1.center - g2.center)
    r1, r2 = g1.radius, g2.radius
    tol = margin * max(r1, r2)
    return d > r1 + r2 + tol or d < abs(r1 - r2) - tol


# ---------------------------------------------------------------------------
# separation by linear programming on the lifted points (x, y, x^2 + y^2)


def _normalizing_frame(points):
    pts = np.asarray(points, dtype=complex)
    c = pts.mean() if len(pts) else 0j
    s = float(np.abs(pts - c).max()) if len(pts) else 1.0
    return c, (s if s > 0 else 1.0)


def _unframe(coeffs, c: complex, s: float):
    # coefficients for u = (z - c)/s, rewritten in z
    A1, B1, C1, D1 = coeffs
    A = A1 / s**2
    B = -2 * A1 * c.real / s**2 + B1 / s
    C = -2 * A1 * c.imag / s**2 + C1 / s
    D = A1 * abs(c) ** 2 / s**2 - (B1 * c.real + C1 * c.imag) / s + D1
    return A, B, C, D


def find_separating_circle(inside, outside) -> GeneralizedCircle | None:
    """A generalized circle with ``inside`` strictly on its negative side and
    ``outside`` strictly on its positive side, or None when none exists.

    Solves the feasibility problem ``f(a) <= -1, f(b) >= 1`` over (A, B, C, D);
    the constraints are homogeneous so any strict separator can be scaled to
    meet them.
    """
    ins = np.atleast_1d(np.asarray(inside, dtype=complex))
    outs = np.atleast_1d(np.asarray(outside, dtype=complex))
    if not (np.all(np.isfinite(ins)) and np.all(np.isfinite(outs))):
        raise ValueError("points must be finite")
    if len(ins) == 0 or len(outs) == 0:
        return _enclosing(ins if len(ins) else outs, inside_empty=len(ins) == 0)
    if np.intersect1d(ins, outs).size:
        return None
    c, s = _normalizing_frame(np.concatenate([ins, outs]))
    ui, uo = (ins - c) / s, (outs - c) / s

    def rows(u):
        return np.column_stack([np.abs(u) ** 2, u.real, u.imag, np.ones(len(u))])

    A_ub = np.vstack([rows(ui), -rows(uo)])
    b_ub = -np.ones(len(A_ub))
    res = linprog(np.zeros(4), A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * 4, method="highs")
    if res.status != 0:
        return None
    coeffs = _unframe(res.x, c, s)
    if abs(coeffs[0]) <= 1e-13 * max(abs(v) for v in coeffs):
        coeffs = (0.0,) + tuple(coeffs[1:])
    try:
        circle = GeneralizedCircle(*map(float, coeffs)).scaled()
    except ValueError:
        return None
    return circle if separates(circle, ins, outs) else None


def _enclosing(points, inside_empty: bool) -> GeneralizedCircle:
    c, s = _normalizing_frame(points)
    circle = GeneralizedCircle.from_center_radius(c, 2 * s + 1)
    return circle.negated() if inside_empty else circle


# ---------------------------------------------------------------------------
# Moebius maps


@dataclass(frozen=True)
class MoebiusMap:
    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        a, b, c, d = (complex(x) for x in (self.a, self.b, self.c, self.d))
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, v)
        scale = max(abs(a), abs(b), abs(c), abs(d))
        if scale == 0 or abs(a * d - b * c) <= 1e-12 * scale**2:
            raise ValueError("Moebius map needs ad - bc != 0")

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def random(cls, rng) -> "MoebiusMap":
        while True:
            v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            try:
                return cls(*v)
            except ValueError:
                continue

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __call__(self, p):
        return moebius_apply(self, p)

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """self after other."""
        M = self.matrix() @ other.matrix()
        return MoebiusMap(*M.ravel())

    def denominators(self, p):
        return self.c * np.asarray(p, dtype=complex) + self.d

    def pole_scale(self, p):
        return np.abs(self.c) * np.abs(p) + np.abs(self.d)

    def image_circle(self, circle: GeneralizedCircle) -> GeneralizedCircle:
        """Image of a generalized circle, keeping each side's sign."""
        Minv = np.linalg.inv(self.matrix())
        H = Minv.conj().T @ circle.hermitian() @ Minv
        return GeneralizedCircle.from_hermitian(H)


def moebius_apply(phi: MoebiusMap, p):
    """(a p + b) / (c p + d); raises PoleError when the denominator vanishes."""
    p_arr = np.asarray(p, dtype=complex)
    den = phi.c * p_arr + phi.d
    if np.any(np.abs(den) <= POLE_REL * phi.pole_scale(p_arr)):
        raise PoleError("point maps to infinity")
    out = (phi.a * p_arr + phi.b) / den
    return complex(out) if out.ndim == 0 else out


def cross_ratio(z1: complex, z2: complex, w1: complex, w2: complex) -> complex:
    """((z1-w1)/(z1-w2)) : ((z2-w1)/(z2-w2))."""
    z1, z2, w1, w2 = map(complex, (z1, z2, w1, w2))
    if z1 == w2 or z2 == w1 or z2 == w2:
        raise ValueError("degenerate cross-ratio: coincident points")
    return ((z1 - w1) / (z1 - w2)) / ((z2 - w1) / (z2 - w2))


# ---------------------------------------------------------------------------
# random configurations for the nonvanishing tests

MAX_TRIES = 100
_MAX_MODULUS = 1e2
_MIN_POLE = 5e-2


def _random_moebius_batch(rng, size):
    v = rng.standard_normal((size, 4)) + 1j * rng.standard_normal((size, 4))
    det = v[:, 0] * v[:, 3] - v[:, 1] * v[:, 2]
    scale = np.abs(v).max(axis=1)
    ok = np.abs(det) > 1e-3 * scale**2
    return v, ok


def _apply_batch(v, pts):
    a, b, c, d = (v[:, i : i + 1] for i in range(4))
    den = c * pts + d
    return (a * pts + b) / den, np.abs(den) / (np.abs(c) * np.abs(pts) + np.abs(d))


def _circle_images(v, base):
    """Images of one base circle under a batch of maps, as (batch, 4) arrays."""
    H0 = base.hermitian()
    out = np.empty((len(v), 4))
    for i, row in enumerate(v):
        M = row.reshape(2, 2)
        Minv = np.linalg.inv(M)
        H = Minv.conj().T @ H0 @ Minv
        A = H[0, 0].real
        beta = (H[0, 1] + H[1, 0].conjugate()) / 2
        D = H[1, 1].real
        s = max(abs(A), 2 * abs(beta), abs(D))
        out[i] = (A / s, 2 * beta.real / s, 2 * beta.imag / s, D / s)
    return out


def _map_batch(rng, base_pts, size):
    """Map each row of ``base_pts`` through its own random Moebius map, retrying
    rows whose images come too close to the pole or run too far out."""
    pts = np.empty_like(base_pts)
    maps = np.empty((size, 4), dtype=complex)
    todo = np.arange(size)
    for _ in range(MAX_TRIES):
        if len(todo) == 0:
            return pts, maps
        v, ok = _random_moebius_batch(rng, len(todo))
        img, rel = _apply_batch(v, base_pts[todo])
        ok &= np.all(rel > _MIN_POLE, axis=1) & np.all(np.abs(img) < _MAX_MODULUS, axis=1)
        pts[todo[ok]] = img[ok]
        maps[todo[ok]] = v[ok]
        todo = todo[~ok]
    raise RuntimeError("could not draw a usable Moebius map in time")


def sample_separated_batch(rng, m: int, n: int, size: int):
    """``size`` random configurations with the z-points and w-points strictly
    separated by a known circle.

    Returns ``(Z, W, circles)`` with shapes (size, m), (size, n), (size, 4);
    row i of ``circles`` is negative on Z[i] and positive on W[i].

    Points start inside/outside the unit circle (sides chosen by a fair coin)
    with a random gap, then go through a random Moebius map.
    """
    inner_edge = 1 - 10 ** rng.uniform(-1.7, -0.3, size=(size, 1))
    k = m + n
    rad_in = inner_edge * np.sqrt(rng.random((size, k)))
    rad_out = 1 / (inner_edge * np.sqrt(rng.uniform(0.02, 1.0, (size, k))))
    phase = np.exp(2j * np.pi * rng.random((size, k)))
    flip = rng.random(size) < 0.5
    z_in = np.where(flip[:, None], False, True)
    radius = np.empty((size, k))
    radius[:, :m] = np.where(z_in, rad_in[:, :m], rad_out[:, :m])
    radius[:, m:] = np.where(z_in, rad_out[:, m:], rad_in[:, m:])
    base = radius * phase

    pts, maps = _map_batch(rng, base, size)
    circles = _circle_images(maps, UNIT_CIRCLE)
    # unit circle: inside negative. flip sign where z started outside
    circles[flip] *= -1
    fz = side_values(circles, pts[:, :m])
    fw = side_values(circles, pts[:, m:])
    good = np.all(fz < 0, axis=1) & np.all(fw > 0, axis=1)
    if not good.all():  # rounding at a near-degenerate map; redraw those rows
        bad = np.flatnonzero(~good)
        Zb, Wb, Cb = sample_separated_batch(rng, m, n, len(bad))
        pts[bad, :m], pts[bad, m:], circles[bad] = Zb, Wb, Cb
    return pts[:, :m], pts[:, m:], circles


def sample_separated_config(rng, m: int, n: int):
    """One random separated configuration: ``(z_points, w_points, circle)``."""
    Z, W, C = sample_separated_batch(rng, m, n, 1)
    return Z[0], W[0], GeneralizedCircle(*C[0])


def sample_disjoint_circles_batch(rng, m: int, n: int, size: int):
    """Configurations with all z's on one circle and all w's on another,
    disjoint one.

    Built from two concentric circles |z| = r1 < r2 (which side carries the
    z's is a coin flip) pushed through a random Moebius map. Returns
    ``(Z, W, circles_z, circles_w)``.
    """
    k = m + n
    r2 = np.ones((size, 1))
    r1 = 10 ** rng.uniform(-2.5, -0.05, size=(size, 1))
    phase = np.exp(2j * np.pi * rng.random((size, k)))
    flip = rng.random(size) < 0.5
    rz = np.where(flip[:, None], r2, r1)
    rw = np.where(flip[:, None], r1, r2)
    base = np.concatenate([rz * phase[:, :m], rw * phase[:, m:]], axis=1)
    pts, maps = _map_batch(rng, base, size)
    cz = np.empty((size, 4))
    cw = np.empty((size, 4))
    for i in range(size):
        phi = MoebiusMap(*maps[i])
        g1 = phi.image_circle(GeneralizedCircle.from_center_radius(0, float(rz[i, 0])))
        g2 = phi.image_circle(GeneralizedCircle.from_center_radius(0, float(rw[i, 0])))
        cz[i], cw[i] = g1.coeffs, g2.coeffs
    return pts[:, :m], pts[:, m:], cz, cw


__all__ = [
    "GeneralizedCircle",
    "MoebiusMap",
    "UNIT_CIRCLE",
    "REAL_AXIS",
    "side_of",
    "side_values",
    "separates",
    "circles_disjoint",
    "find_separating_circle",
    "moebius_apply",
    "cross_ratio",
    "sample_separated_config",
    "sample_separated_batch",
    "sample_disjoint_circles_batch",
]
