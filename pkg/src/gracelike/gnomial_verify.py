"""Tests and classification for the circle-separation nonvanishing conditions.

Condition (G): P(z, w) != 0 whenever some circle or line separates the
z-points from the w-points. Condition (G0): the same with the z's on one
circle and the w's on a disjoint circle or line (a circle may shrink to a
point).

Random evaluation alone almost never lands on an exact zero, so each test
also *solves* for zeros. P is affine in every variable, P = alpha*x + beta,
so x* = -beta/alpha is the only value of x killing P with the other points
held fixed. If x* still sits strictly on its side of the sampled circle the
modified configuration is a certified violation. Reports therefore
distinguish "no violation found" (evidence) from a stored violation, which
carries the points and a separating circle that anyone can re-check with
``geometry.separates``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .exceptions import StructuralError
from .geometry import (
    GeneralizedCircle,
    find_separating_circle,
    sample_disjoint_circles_batch,
    sample_separated_batch,
    side_values,
)
from .mapoly import (
    MAPolynomial,
    effective_variables,
    evaluate,
    evaluate_many,
    homogeneity_degree,
    is_translation_invariant,
    normalize,
    split_variable,
)

TOL_ABS = 1e-12
TOL_REL = 1e-10
SIDE_MARGIN = 1e-7  # relative clearance a solved point needs from the circle
MAX_ROOT = 1e6
MAX_STORED = 20
BATCH = 2000
GRID = 48  # angles per circle in the pair search
THETA_TOL = 1e-10


@dataclass
class Violation:
    points: np.ndarray  # z_1..z_m then w_1..w_n
    abs: float
    circle: GeneralizedCircle  # negative on the z's, positive on the w's

    def to_json(self) -> dict:
        return {
            "points": [{"re": float(p.real), "im": float(p.imag)} for p in self.points],
            "abs": float(self.abs),
            "circle": self.circle.to_json(),
        }


@dataclass
class GTestReport:
    trials: int
    violations: list = field(default_factory=list)  # at most MAX_STORED
    violation_count: int = 0
    min_abs: float = np.inf  # over the sampled (unsolved) configurations
    scale_note: str = ""
    mode: str = "g"

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "trials": self.trials,
            "violation_count": self.violation_count,
            "violations": [v.to_json() for v in self.violations],
            "min_abs": float(self.min_abs),
            "scale_note": self.scale_note,
        }


class _Prepared:
    """P scaled to unit largest coefficient, with the per-variable splits
    P = x*A + B cached."""

    def __init__(self, P: MAPolynomial):
        if not isinstance(P, MAPolynomial):
            raise TypeError("expected an MAPolynomial")
        if P.is_zero():
            raise ValueError("the zero polynomial vanishes everywhere")
        self.P = P / P.max_abs()
        self.m, self.n = P.m, P.n
        k = homogeneity_degree(self.P)
        self.k = k if k is not None else P.m + P.n
        self.norm = self.P.norm()
        self._splits: dict[int, tuple] = {}

    def note(self) -> str:
        return (
            f"P divided by its largest coefficient modulus; zero when |P| <= "
            f"{TOL_ABS:g} + {TOL_REL:g}*||P||*M^{self.k}, M = largest point modulus"
        )

    def threshold(self, X):
        M = np.abs(np.atleast_2d(X)).max(axis=1)
        return TOL_ABS + TOL_REL * self.norm * M**self.k

    def split(self, i):
        if i not in self._splits:
            self._splits[i] = split_variable(self.P, self.P.var_at(i))
        return self._splits[i]

    def values(self, X):
        return np.abs(evaluate_many(self.P, X))


class _Collector:
    def __init__(self, report: GTestReport):
        self.report = report
        self.hit: set = set()

    def add(self, trial: int, points, value: float, circle: GeneralizedCircle):
        if trial in self.hit:
            return
        self.hit.add(trial)
        self.report.violation_count += 1
        if len(self.report.violations) < MAX_STORED:
            self.report.violations.append(Violation(np.array(points, dtype=complex), float(value), circle))


def _circle_row(row) -> GeneralizedCircle:
    return GeneralizedCircle(*map(float, row))


def _solve_single(prep: _Prepared, X, circles, allowed=None):
    """Zeros obtained by moving one variable, kept when the moved point stays
    strictly on its side. Yields (row, new_points, |P|)."""
    m = prep.m
    for i in range(prep.m + prep.n):
        A, B = prep.split(i)
        alpha = evaluate_many(A, X)
        beta = evaluate_many(B, X)
        with np.errstate(divide="ignore", invalid="ignore"):
            xs = -beta / alpha
        ok = np.isfinite(xs) & (np.abs(xs) < MAX_ROOT)
        sign = -1.0 if i < m else 1.0
        f = side_values(circles, np.where(ok, xs, 0)[:, None])[:, 0]
        ok &= sign * f > SIDE_MARGIN * (1 + np.abs(xs) ** 2)
        if allowed is not None:
            ok &= allowed
        for r in np.flatnonzero(ok):
            pts = X[r].copy()
            pts[i] = xs[r]
            val = abs(evaluate(prep.P, pts))
            if val <= prep.threshold(pts)[0]:
                yield int(r), pts, val


def g_test_randomized(P: MAPolynomial, trials: int = 10_000, seed=0, solve: bool = True) -> GTestReport:
    """Randomized falsification of condition (G).

    Each trial draws a configuration with a known separating circle, records
    it when |P| falls below the tolerance, and (``solve=True``) also tries
    the one-variable zeros described in the module docstring.
    """
    prep = _Prepared(P)
    rng = np.random.default_rng(seed)
    report = GTestReport(trials=int(trials), scale_note=prep.note(), mode="g")
    out = _Collector(report)
    done = 0
    while done < trials:
        size = min(BATCH, trials - done)
        Z, W, circles = sample_separated_batch(rng, prep.m, prep.n, size)
        X = np.concatenate([Z, W], axis=1)
        vals = prep.values(X)
        report.min_abs = min(report.min_abs, float(vals.min()))
        for r in np.flatnonzero(vals <= prep.threshold(X)):
            out.add(done + r, X[r], vals[r], _circle_row(circles[r]))
        if solve:
            for r, pts, val in _solve_single(prep, X, circles):
                out.add(done + r, pts, val, _circle_row(circles[r]))
        done += size
    return report


def g_test_directed(
    P: MAPolynomial,
    center,
    trials: int = 100_000,
    seed=0,
    spread: float = 0.05,
    stop_after: int | None = 1,
) -> GTestReport:
    """Falsification of (G) with configurations drawn around ``center``.

    Every sample is checked for separability by linear programming, so this
    is much slower per trial than ``g_test_randomized``; use it to chase a
    suspected counterexample. Stops after ``stop_after`` violations.
    """
    prep = _Prepared(P)
    center = np.asarray(center, dtype=complex)
    if center.shape != (prep.m + prep.n,):
        raise ValueError(f"center needs {prep.m + prep.n} points")
    rng = np.random.default_rng(seed)
    report = GTestReport(trials=0, scale_note=prep.note(), mode="g-directed")
    out = _Collector(report)
    scale = spread * (1 + np.abs(center))
    for t in range(trials):
        X = center + scale * (rng.standard_normal(center.shape) + 1j * rng.standard_normal(center.shape))
        report.trials = t + 1
        circle = find_separating_circle(X[: prep.m], X[prep.m :])
        if circle is None:
            continue
        X = X[None, :]
        val = float(prep.values(X)[0])
        report.min_abs = min(report.min_abs, val)
        if val <= prep.threshold(X)[0]:
            out.add(t, X[0], val, circle)
        else:
            for _, pts, v in _solve_single(prep, X, circle.coeffs[None, :]):
                out.add(t, pts, v, circle)
                break
        if stop_after is not None and report.violation_count >= stop_after:
            break
    return report


# ---------------------------------------------------------------------------
# condition (G0)


def _centers_radii(circles):
    A, B, C, D = circles.T
    with np.errstate(divide="ignore", invalid="ignore"):
        c = -(B + 1j * C) / (2 * A)
        r = np.sqrt(np.maximum(np.abs(c) ** 2 - D / A, 0.0))
    proper = np.abs(A) > 1e-9 * np.abs(circles).max(axis=1)
    return c, r, proper


def _rel_side(circles, pts):
    f = side_values(circles, pts[:, None])[:, 0]
    return f / (1 + np.abs(pts) ** 2)


def _pair_zeros(prep: _Prepared, X, circ_of, skip=frozenset(), offset=0):
    """Zeros with two variables moving on their own circles.

    Moving x_i on its circle, the value of x_j killing P is a Moebius
    function of x_i; its sign change against x_j's circle marks a common
    point. Yields (row, points); rows with ``offset + row`` in ``skip`` are
    passed over (``skip`` may grow while the generator runs).
    """
    nv = prep.m + prep.n
    t = 2 * np.pi * np.arange(GRID) / GRID
    for i, j in itertools.combinations(range(nv), 2):
        A, B = prep.split(i)
        a, c = split_variable(A, prep.P.var_at(j))
        b, d = split_variable(B, prep.P.var_at(j))
        # P = a x_i x_j + c x_i + b x_j + d
        coef = [evaluate_many(q, X) for q in (a, b, c, d)]
        ci, ri, pi = _centers_radii(circ_of[i])
        cj = circ_of[j]

        def xj_of(rows, xi):
            aa, bb, cc, dd = (q[rows, None] if xi.ndim == 2 else q[rows] for q in coef)
            with np.errstate(divide="ignore", invalid="ignore"):
                return -(cc * xi + dd) / (aa * xi + bb)

        rows = np.flatnonzero(pi)
        if len(rows) == 0:
            continue
        xi = ci[rows, None] + ri[rows, None] * np.exp(1j * t)[None, :]
        xj = xj_of(rows, xi)
        A_, B_, C_, D_ = (cj[rows, q, None] for q in range(4))
        with np.errstate(invalid="ignore", over="ignore"):
            g = (A_ * np.abs(xj) ** 2 + B_ * xj.real + C_ * xj.imag + D_) / (1 + np.abs(xj) ** 2)
        g = np.where(np.isfinite(g), g, np.nan)
        s = np.sign(g)
        change = (s * np.roll(s, -1, axis=1)) < 0
        for rr, col in zip(*np.nonzero(change)):
            r = rows[rr]
            if offset + r in skip:
                continue
            lo, hi = t[col], t[col] + 2 * np.pi / GRID
            glo = g[rr, col]
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                xm = ci[r] + ri[r] * np.exp(1j * mid)
                ym = xj_of(np.array([r]), np.array([xm]))[0]
                gm = (cj[r, 0] * abs(ym) ** 2 + cj[r, 1] * ym.real + cj[r, 2] * ym.imag + cj[r, 3]) / (1 + abs(ym) ** 2)
                if np.sign(gm) == np.sign(glo):
                    lo, glo = mid, gm
                else:
                    hi = mid
            xi_s = ci[r] + ri[r] * np.exp(1j * 0.5 * (lo + hi))
            xj_s = xj_of(np.array([r]), np.array([xi_s]))[0]
            if not np.isfinite(xj_s) or abs(xj_s) > MAX_ROOT:
                continue
            pts = X[r].copy()
            pts[i], pts[j] = xi_s, xj_s
            yield int(r), pts


def _batch_roots(C):
    """Roots of each row of ascending coefficients ``C`` (batch, d+1) via
    companion matrices; rows with a negligible leading term are returned as
    NaN (a root escaped to infinity)."""
    d = C.shape[1] - 1
    lead = C[:, -1]
    ok = np.abs(lead) > 1e-12 * np.abs(C).max(axis=1)
    out = np.full((len(C), d), np.nan + 0j)
    if d == 0 or not ok.any():
        return out
    comp = np.zeros((ok.sum(), d, d), dtype=complex)
    comp[:, 1:, :-1] = np.eye(d - 1)
    comp[:, :, -1] = -C[ok, :-1] / lead[ok, None]
    out[ok] = np.linalg.eigvals(comp)
    return out


def _collapse_zeros(prep: _Prepared, X, circ_other, side: str):
    """Zeros with one whole side shrunk to a single point p (a circle of
    radius 0): roots p of P(p, ..., p, w) that avoid the other circle."""
    m, n = prep.m, prep.n
    lo, cnt = (0, m) if side == "z" else (m, n)
    if cnt == 0:
        return
    block = ((1 << cnt) - 1) << lo
    parts: dict[int, dict] = {}
    for mask, c in prep.P.coeffs.items():
        deg = (mask & block).bit_count()
        key = mask & ~block
        parts.setdefault(deg, {})
        parts[deg][key] = parts[deg].get(key, 0j) + c
    C = np.zeros((len(X), cnt + 1), dtype=complex)
    for deg, table in parts.items():
        C[:, deg] = evaluate_many(MAPolynomial(m, n, table), X)
    R = _batch_roots(C)
    for q in range(R.shape[1]):
        p = R[:, q]
        ok = np.isfinite(p) & (np.abs(p) < MAX_ROOT)
        rel = np.abs(_rel_side(circ_other, np.where(ok, p, 0)))
        ok &= rel > SIDE_MARGIN
        for r in np.flatnonzero(ok):
            pts = X[r].copy()
            pts[lo : lo + cnt] = p[r]
            yield int(r), pts


def g0_test_randomized(P: MAPolynomial, trials: int = 10_000, seed=0, solve: bool = True) -> GTestReport:
    """Randomized falsification of condition (G0).

    z's on one random circle, w's on a disjoint one. With ``solve=True`` each
    trial also looks for exact zeros with two points sliding along their
    circles, and for zeros with one side collapsed to a point.
    """
    prep = _Prepared(P)
    rng = np.random.default_rng(seed)
    report = GTestReport(trials=int(trials), scale_note=prep.note(), mode="g0")
    out = _Collector(report)
    m = prep.m

    def record(trial, pts, val=None):
        if trial in out.hit:
            return
        if val is None:
            val = abs(evaluate(prep.P, pts))
            if val > prep.threshold(pts)[0]:
                return
        if len(report.violations) >= MAX_STORED:
            # nothing more is stored; the sampled circles already separate
            out.add(trial, pts, val, None)
            return
        witness = find_separating_circle(pts[:m], pts[m:])
        if witness is not None:
            out.add(trial, pts, val, witness)

    done = 0
    while done < trials:
        size = min(BATCH, trials - done)
        Z, W, cz, cw = sample_disjoint_circles_batch(rng, prep.m, prep.n, size)
        X = np.concatenate([Z, W], axis=1)
        vals = prep.values(X)
        report.min_abs = min(report.min_abs, float(vals.min()))
        for r in np.flatnonzero(vals <= prep.threshold(X)):
            record(done + r, X[r], vals[r])
        if solve:
            circ_of = [cz] * prep.m + [cw] * prep.n
            for r, pts in _pair_zeros(prep, X, circ_of, out.hit, done):
                record(done + r, pts)
            for side, other in (("z", cw), ("w", cz)):
                for r, pts in _collapse_zeros(prep, X, other, side):
                    record(done + r, pts)
        done += size
    return report


# ---------------------------------------------------------------------------
# bi-torus sampling


def _check_reduced_shape(P: MAPolynomial):
    if P.m != P.n:
        raise StructuralError(f"needs as many z's as w's, got m={P.m}, n={P.n}")
    if P.is_zero():
        raise StructuralError("the zero polynomial")
    if homogeneity_degree(normalize(P, 1e-12)) != P.n:
        raise StructuralError(f"not homogeneous of degree n={P.n}")
    if not is_translation_invariant(P, 1e-9):
        raise StructuralError("not translation invariant")


def bitorus_certify(P: MAPolynomial, trials: int = 10_000, seed=0, path_points: int = 9) -> GTestReport:
    """Evidence for (G) from the bi-torus |z_j| = a, |w_k| = b, a != b.

    For translation-invariant P homogeneous of degree n, nonvanishing on
    every such bi-torus implies (G); a clean sampled report is evidence of
    that, not a proof. Besides direct evaluation, each trial walks a path
    between two random phase vectors: a sign change of |beta| - r|alpha|
    for some variable locates an exact zero on the bi-torus.
    """
    _check_reduced_shape(P)
    prep = _Prepared(P)
    n = P.n
    rng = np.random.default_rng(seed)
    report = GTestReport(
        trials=int(trials),
        scale_note=prep.note() + "; evidence only: radii sampled log-uniformly in [1e-2, 1e2]",
        mode="bitorus",
    )
    out = _Collector(report)
    s_grid = np.linspace(0.0, 1.0, path_points)
    done = 0
    while done < trials:
        size = min(BATCH, trials - done)
        la = rng.uniform(np.log(1e-2), np.log(1e2), size)
        lb = rng.uniform(np.log(1e-2), np.log(1e2), size)
        close = np.abs(la - lb) < 1e-3
        while close.any():
            lb[close] = rng.uniform(np.log(1e-2), np.log(1e2), close.sum())
            close = np.abs(la - lb) < 1e-3
        radii = np.concatenate([np.repeat(np.exp(la)[:, None], n, 1), np.repeat(np.exp(lb)[:, None], n, 1)], axis=1)
        phi0 = 2 * np.pi * rng.random((size, 2 * n))
        phi1 = 2 * np.pi * rng.random((size, 2 * n))
        ab = np.sqrt(np.exp(la + lb))

        def witness(r):
            circ = GeneralizedCircle.from_center_radius(0, float(ab[r]))
            return circ if la[r] < lb[r] else circ.negated()

        X = radii * np.exp(1j * phi0)
        vals = prep.values(X)
        report.min_abs = min(report.min_abs, float(vals.min()))
        for r in np.flatnonzero(vals <= prep.threshold(X)):
            out.add(done + r, X[r], vals[r], witness(r))

        for i in range(2 * n):
            A, B = prep.split(i)

            def h(s):
                Xs = radii * np.exp(1j * (phi0 + s[:, None] * (phi1 - phi0)))
                al = evaluate_many(A, Xs)
                be = evaluate_many(B, Xs)
                return np.abs(be) - radii[:, i] * np.abs(al), al, be, Xs

            hs = np.stack([h(np.full(size, s))[0] for s in s_grid], axis=1)
            sg = np.sign(hs)
            change = sg[:, :-1] * sg[:, 1:] < 0
            rows = np.flatnonzero(change.any(axis=1))
            if len(rows) == 0:
                continue
            first = change[rows].argmax(axis=1)
            lo, hi = s_grid[first].copy(), s_grid[first + 1].copy()
            hlo = hs[rows, first]
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                full = np.zeros(size)
                full[rows] = mid
                hm = h(full)[0][rows]
                same = np.sign(hm) == np.sign(hlo)
                lo = np.where(same, mid, lo)
                hlo = np.where(same, hm, hlo)
                hi = np.where(same, hi, mid)
            full = np.zeros(size)
            full[rows] = 0.5 * (lo + hi)
            _, al, be, Xs = h(full)
            for r in rows:
                if al[r] == 0:
                    continue
                pts = Xs[r].copy()
                pts[i] = -be[r] / al[r]
                val = abs(evaluate(prep.P, pts))
                if val <= prep.threshold(pts)[0]:
                    out.add(done + r, pts, val, witness(r))
        done += size
    return report


# ---------------------------------------------------------------------------
# canonical form and the n = 2 classification


@dataclass
class CanonicalForm:
    alpha: complex
    R: MAPolynomial
    relabel: dict  # new variable name -> original variable name

    def __iter__(self):
        return iter((self.alpha, self.R, self.relabel))


def reduce_to_canonical(P: MAPolynomial, tol: float = 1e-12) -> CanonicalForm:
    """Drop unused variables, relabel, and scale so the z_1...z_k coefficient is 1.

    Structural checks only: the survivors must split into k z's and k w's,
    and the result must be homogeneous of degree k and translation
    invariant (as every G-nomial in this shape is). Whether P satisfies (G)
    is the caller's business.
    """
    if P.is_zero():
        raise StructuralError("the zero polynomial has no canonical form")
    Q = normalize(P, tol)
    used = effective_variables(Q)
    zs = sorted(v.index for v in used if v.side == "z")
    ws = sorted(v.index for v in used if v.side == "w")
    if len(zs) != len(ws):
        raise StructuralError(
            f"effective variable counts differ: {len(zs)} z's against {len(ws)} w's"
        )
    k = len(zs)
    old_pos = [Q.position(f"z{i}") for i in zs] + [Q.position(f"w{i}") for i in ws]
    table = {}
    for mask, c in Q.coeffs.items():
        new = 0
        for b, pos in enumerate(old_pos):
            if mask >> pos & 1:
                new |= 1 << b
        table[new] = c
    S = MAPolynomial(k, k, table)
    if homogeneity_degree(S) != k:
        raise StructuralError(f"not homogeneous of degree k={k} in the effective variables")
    alpha = S[(1 << k) - 1]
    if abs(alpha) <= tol * S.max_abs():
        raise StructuralError("coefficient of z_1...z_k vanishes")
    R = S / alpha
    if not is_translation_invariant(R, 1e-9):
        raise StructuralError("not translation invariant")
    relabel = {f"z{a + 1}": f"z{i}" for a, i in enumerate(zs)}
    relabel.update({f"w{a + 1}": f"w{i}" for a, i in enumerate(ws)})
    return CanonicalForm(complex(alpha), R, relabel)


@dataclass
class ThetaReport:
    theta: complex
    is_valid: bool
    residual: float  # largest coefficient mismatch after the fit

    def to_json(self) -> dict:
        return {
            "theta": {"re": self.theta.real, "im": self.theta.imag},
            "is_valid": self.is_valid,
            "residual": self.residual,
        }


def theta_form(theta: complex) -> MAPolynomial:
    """(1 - theta)(z1 - w1)(z2 - w2) + theta (z1 - w2)(z2 - w1)."""
    E = _pair_product((0, 1))
    F = _pair_product((1, 0))
    return E * (1 - theta) + F * theta


def _pair_product(perm) -> MAPolynomial:
    # prod_j (z_j - w_perm(j)) for n = 2
    table = {}
    for bits in itertools.product((0, 1), repeat=2):
        mask, sign = 0, 1
        for j, b in enumerate(bits):
            if b:
                mask |= 1 << (2 + perm[j])
                sign = -sign
            else:
                mask |= 1 << j
        table[mask] = table.get(mask, 0) + sign
    return MAPolynomial(2, 2, table)


def classify_n2(P: MAPolynomial) -> ThetaReport:
    """Fit P to the one-parameter family of reduced n = 2 G-nomials.

    The six coefficients give an overdetermined linear system in theta; it
    is solved by least squares and the leftover mismatch is reported.
    """
    if P.m != 2 or P.n != 2:
        raise ValueError(f"needs m = n = 2, got m={P.m}, n={P.n}")
    E = _pair_product((0, 1))
    F = _pair_product((1, 0))
    keys = sorted(set(P.coeffs) | set(E.coeffs) | set(F.coeffs))
    p = np.array([P[k] for k in keys])
    e = np.array([E[k] for k in keys], dtype=complex)
    f = np.array([F[k] for k in keys], dtype=complex)
    d = f - e
    theta = complex(np.vdot(d, p - e) / np.vdot(d, d))
    residual = float(np.abs(p - e - theta * d).max())
    valid = (
        residual <= THETA_TOL
        and abs(theta.imag) <= THETA_TOL
        and -THETA_TOL <= theta.real <= 1 + THETA_TOL
    )
    return ThetaReport(theta, bool(valid), residual)


__all__ = [
    "Violation",
    "GTestReport",
    "g_test_randomized",
    "g_test_directed",
    "g0_test_randomized",
    "bitorus_certify",
    "CanonicalForm",
    "reduce_to_canonical",
    "ThetaReport",
    "theta_form",
    "classify_n2",
]
