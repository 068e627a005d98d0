"""Factories for reduced G-nomials.

Grace's polynomial, determinant G-nomials, symmetrization, interpolation
between two G-nomials agreeing on the diagonal z_1 = z_2, and the
transposition-averaging flow that contracts everything onto Grace's
polynomial.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConvergenceError, StructuralError
from .mapoly import MAPolynomial, homogeneity_degree, merge_variables
from .reduced_form import PermutationCoefficients, assemble

MAX_N = 8
MAX_SYM_PERMS = math.factorial(8)
AGREE_TOL = 1e-10
UNITARY_TOL = 1e-10
DET_TOL = 1e-8


def _check_n(n: int):
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_N:
        raise ValueError(f"n must be an integer in 1..{MAX_N}, got {n!r}")


def grace_sigma(n: int) -> MAPolynomial:
    """Grace's polynomial (1/n!) sum_pi prod_j (z_j - w_pi(j)).

    The coefficient of z_S w_T (|S| + |T| = n) is (-1)^|T| / C(n, |T|);
    it is filled in from that closed form so the table is exact.
    """
    _check_n(n)
    table = {}
    for zs in range(1 << n):
        t = n - zs.bit_count()
        c = (-1) ** t / math.comb(n, t)
        for ws in range(1 << n):
            if ws.bit_count() == t:
                table[zs | (ws << n)] = c
    return MAPolynomial(n, n, table)


# ---------------------------------------------------------------------------
# determinants


def check_unitary(U) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError("U must be a square matrix")
    err = np.abs(U @ U.conj().T - np.eye(len(U))).max()
    if err > UNITARY_TOL:
        raise ValueError(f"U is not unitary (max deviation of U U* from I is {err:.3g})")
    det = np.linalg.det(U)
    if abs(det - 1) > DET_TOL:
        raise ValueError(f"det U = {det:.6g}, expected 1")
    return U


def random_unitary(n: int, seed=None) -> np.ndarray:
    """Random unitary with determinant 1 (QR of a complex Gaussian matrix)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    rng = np.random.default_rng(seed)
    G = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(G)
    d = np.diag(R)
    Q = Q * (d / np.abs(d))[None, :]
    det = np.linalg.det(Q)
    return Q / det ** (1.0 / n)


def unitary_to_json(U) -> list:
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(U, dtype=complex)]


def unitary_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def _perm_sign(perm) -> int:
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def determinant_gnomial(U) -> MAPolynomial:
    """det(U_ij (z_i - w_j)) expanded over permutations.

    Equal to det(diag(z) - U diag(w) U^-1); the coefficient of z_1...z_n is
    det U = 1.
    """
    U = check_unitary(U)
    n = len(U)
    _check_n(n)
    coeffs = {}
    for perm in itertools.permutations(range(n)):
        c = _perm_sign(perm) * np.prod(U[np.arange(n), list(perm)])
        coeffs[perm] = c
    return assemble(PermutationCoefficients(n, coeffs))


# ---------------------------------------------------------------------------
# symmetrization and interpolation


def symmetrize(P: MAPolynomial, S=None) -> MAPolynomial:
    """Average of P over all permutations of the z-variables in ``S``
    (default: all of them), every other variable held in place."""
    if S is None:
        S = list(range(P.m))
    else:
        S = [_z_index(P, v) for v in S]
    if len(set(S)) != len(S):
        raise ValueError("repeated variable in S")
    if math.factorial(len(S)) > MAX_SYM_PERMS:
        raise ValueError(f"|S|! exceeds {MAX_SYM_PERMS}")
    if len(S) <= 1:
        return P
    masks = np.array(list(P.coeffs), dtype=np.int64)
    vals = np.array(list(P.coeffs.values()), dtype=complex)
    keep = masks.copy()
    for i in S:
        keep &= ~(1 << i)
    bits = [(masks >> i) & 1 for i in S]
    dense = np.zeros(1 << P.nvars, dtype=complex)
    count = 0
    for perm in itertools.permutations(S):
        new = keep.copy()
        for b, target in zip(bits, perm):
            new |= b << target
        np.add.at(dense, new, vals)
        count += 1
    dense /= count
    nz = np.flatnonzero(dense)
    return MAPolynomial(P.m, P.n, {int(k): dense[k] for k in nz})


def _z_index(P: MAPolynomial, v) -> int:
    if isinstance(v, (int, np.integer)):
        i = int(v)
    else:
        i = P.position(v)
    if not 0 <= i < P.m:
        raise ValueError(f"{v!r} is not a z-variable of P")
    return i


def _check_reduced(P: MAPolynomial, label: str = "P"):
    if P.m != P.n:
        raise StructuralError(f"{label}: needs m == n")
    if P.is_zero() or homogeneity_degree(P) != P.n:
        raise StructuralError(f"{label}: not homogeneous of degree n={P.n}")
    lead = P[(1 << P.m) - 1]
    if abs(lead - 1) > AGREE_TOL:
        raise StructuralError(f"{label}: coefficient of z1...z{P.m} is {lead}, not 1")


def diagonal_mismatch(P0: MAPolynomial, P1: MAPolynomial, pair=("z1", "z2")) -> float:
    """Largest coefficient gap between P0 and P1 after setting the two
    variables of ``pair`` equal."""
    P0._check_same_space(P1)
    a = merge_variables(P0, pair)
    b = merge_variables(P1, pair)
    return max((abs(a.get(k, 0) - b.get(k, 0)) for k in set(a) | set(b)), default=0.0)


def interpolate(P0: MAPolynomial, P1: MAPolynomial, alpha: float, pair=("z1", "z2")) -> MAPolynomial:
    """(1 - alpha) P0 + alpha P1 for two reduced G-nomials that agree once
    the two z's of ``pair`` are set equal; the result is again one."""
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    _check_reduced(P0, "P0")
    _check_reduced(P1, "P1")
    for v in pair:
        _z_index(P0, v)
    gap = diagonal_mismatch(P0, P1, pair)
    if gap > AGREE_TOL:
        raise ValueError(
            f"P0 and P1 differ on the diagonal {pair[0]} = {pair[1]}: "
            f"largest coefficient mismatch {gap:.3g}"
        )
    if alpha == 0.0:
        return P0
    if alpha == 1.0:
        return P1
    return P0 * (1 - alpha) + P1 * alpha


# ---------------------------------------------------------------------------
# the transposition-averaging flow


@dataclass
class FlowTrajectory:
    times: list  # strictly increasing
    snapshots: list  # MAPolynomial at each time
    converged: bool
    final_distance: float  # coefficient 2-norm distance to Grace's polynomial
    asym_norms: list = field(default_factory=list)  # 2-norm of the non-symmetric part at each time

    @property
    def final(self) -> MAPolynomial:
        return self.snapshots[-1]

    @property
    def steps(self) -> int:
        return len(self.times) - 1

    def pick(self, count: int) -> list:
        """``count`` snapshots spread evenly along the trajectory (with repeats
        when it is shorter)."""
        idx = np.linspace(0, len(self.snapshots) - 1, count).round().astype(int)
        return [(self.times[i], self.snapshots[i]) for i in idx]

    def to_json(self) -> dict:
        return {
            "steps": self.steps,
            "converged": self.converged,
            "final_distance": self.final_distance,
            "times": list(self.times),
            "asym_norms": list(self.asym_norms),
        }


def _swap_index(nvars: int, i: int, j: int) -> np.ndarray:
    masks = np.arange(1 << nvars)
    bi, bj = (masks >> i) & 1, (masks >> j) & 1
    return masks ^ ((bi ^ bj) << i) ^ ((bi ^ bj) << j)


def flow_to_sigma(P0: MAPolynomial, h: float = 1.0, tol: float = 1e-10, max_steps: int = 5000) -> FlowTrajectory:
    """Follow dP/dt = -P + C(n,2)^-1 sum over z-transpositions of tau P.

    One step of length h applies, for each transposition tau in turn, the
    exact solution of the single-transposition flow

        P <- (1 + e)/2 P + (1 - e)/2 tau P,   e = exp(-2h / C(n,2)).

    Each factor is an interpolation between P and tau P, which agree at
    z_i = z_j, so every snapshot is again a reduced G-nomial when P0 is one.
    The z-symmetric part is untouched and the rest shrinks monotonically;
    the limit is the symmetrization of P0, Grace's polynomial for a reduced
    G-nomial.
    """
    _check_reduced(P0, "P0")
    if not 0 < h <= 1:
        raise ValueError("step h must lie in (0, 1]")
    n = P0.n
    _check_n(n)
    target = grace_sigma(n)
    v = np.zeros(1 << P0.nvars, dtype=complex)
    for k, c in P0.coeffs.items():
        v[k] = c
    sym = np.zeros_like(v)
    for k, c in symmetrize(P0).coeffs.items():
        sym[k] = c
    tv = np.zeros_like(v)
    for k, c in target.coeffs.items():
        tv[k] = c

    pairs = list(itertools.combinations(range(n), 2))
    swaps = [_swap_index(P0.nvars, i, j) for i, j in pairs]
    e = math.exp(-2 * h / max(len(pairs), 1))
    a, b = (1 + e) / 2, (1 - e) / 2

    def snap(vec):
        nz = np.flatnonzero(vec)
        return MAPolynomial(n, n, {int(k): vec[k] for k in nz})

    times, snaps, asym = [0.0], [P0], [float(np.linalg.norm(v - sym))]
    for step in range(1, max_steps + 1):
        if asym[-1] <= tol:
            break
        for s in swaps:
            v = a * v + b * v[s]
        times.append(step * h)
        snaps.append(snap(v))
        asym.append(float(np.linalg.norm(v - sym)))
    dist = float(np.linalg.norm(v - tv))
    traj = FlowTrajectory(times, snaps, asym[-1] <= tol, dist, asym)
    if not traj.converged:
        raise ConvergenceError(
            f"flow still {asym[-1]:.3g} from its fixed point after {max_steps} steps",
            best=traj,
            residual=asym[-1],
        )
    return traj


__all__ = [
    "grace_sigma",
    "random_unitary",
    "check_unitary",
    "unitary_to_json",
    "unitary_from_json",
    "determinant_gnomial",
    "symmetrize",
    "diagonal_mismatch",
    "interpolate",
    "FlowTrajectory",
    "flow_to_sigma",
]
