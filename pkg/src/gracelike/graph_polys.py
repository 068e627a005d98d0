"""Graph counting polynomials and root-region checks.

``dimer_polynomial`` counts matchings (edge sets where every vertex meets at
most one chosen edge) by size; ``unbranched_polynomial`` counts edge sets
where every vertex meets at most two. Coefficients are exact Python ints,
ascending.

Edge-list text format: the first non-comment line is the vertex count, then
one ``u v`` pair per line (0-based). ``#`` starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import GraphParseError
from .rootfinder import roots

MAX_DIMER_EDGES = 24
MAX_UNBRANCHED_EDGES = 20
REGION_KINDS = (
    "unit_circle",
    "negative_real_axis",
    "half_plane_re_nonpositive",
    "half_plane_im_negative",
)


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: tuple = ()  # (u, v) with u < v

    def __post_init__(self):
        seen = set()
        clean = []
        for e in self.edges:
            u, v = (int(x) for x in e)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"edge ({u}, {v}) outside 0..{self.vertex_count - 1}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            clean.append(key)
        object.__setattr__(self, "edges", tuple(clean))

    def neighbors(self) -> list[list[int]]:
        adj = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def to_text(self) -> str:
        return "\n".join([str(self.vertex_count)] + [f"{u} {v}" for u, v in self.edges]) + "\n"


def load_graph(text: str) -> Graph:
    """Parse the edge-list format; errors name the offending line."""
    count = None
    edges = []
    seen: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if count is None:
            if len(parts) != 1:
                raise GraphParseError("expected the vertex count alone", lineno)
            try:
                count = int(parts[0])
            except ValueError:
                raise GraphParseError(f"vertex count {parts[0]!r} is not an integer", lineno) from None
            if count < 0:
                raise GraphParseError("vertex count must be non-negative", lineno)
            continue
        if len(parts) != 2:
            raise GraphParseError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"non-integer vertex in {line!r}", lineno) from None
        if u == v:
            raise GraphParseError(f"self-loop at vertex {u}", lineno)
        if not (0 <= u < count and 0 <= v < count):
            raise GraphParseError(f"vertex out of range 0..{count - 1}", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphParseError(f"duplicate edge {u} {v} (first on line {seen[key]})", lineno)
        seen[key] = lineno
        edges.append(key)
    if count is None:
        raise GraphParseError("empty graph file: missing vertex count")
    return Graph(count, tuple(edges))


def random_graph(rng, max_vertices: int = 12, max_edges: int = 20) -> Graph:
    """Random simple graph with 1..max_vertices vertices and at most max_edges edges."""
    nv = int(rng.integers(1, max_vertices + 1))
    pairs = [(u, v) for u in range(nv) for v in range(u + 1, nv)]
    k = int(rng.integers(0, min(max_edges, len(pairs)) + 1))
    pick = rng.choice(len(pairs), size=k, replace=False) if k else []
    return Graph(nv, tuple(pairs[i] for i in sorted(pick)))


def _add(acc: list, other: list, shift: int = 0):
    need = len(other) + shift
    if len(acc) < need:
        acc.extend([0] * (need - len(acc)))
    for i, c in enumerate(other):
        acc[i + shift] += c


def dimer_polynomial(G: Graph) -> list[int]:
    """sum over matchings of z^(number of edges), ascending integer coefficients.

    Branches on the lowest free vertex: either it stays unmatched or it is
    matched to one of its free neighbours. Memoized on the free-vertex mask.
    """
    if len(G.edges) > MAX_DIMER_EDGES:
        raise ValueError(f"at most {MAX_DIMER_EDGES} edges, got {len(G.edges)}")
    adj = [0] * G.vertex_count
    for u, v in G.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u

    @lru_cache(maxsize=None)
    def count(free: int) -> tuple:
        # drop free vertices with no free neighbour: they can only stay unmatched
        while free:
            v = (free & -free).bit_length() - 1
            if adj[v] & free:
                break
            free &= ~(1 << v)
        if not free:
            return (1,)
        v = (free & -free).bit_length() - 1
        rest = free & ~(1 << v)
        acc = list(count(rest))
        nb = adj[v] & rest
        while nb:
            u = (nb & -nb).bit_length() - 1
            nb &= nb - 1
            _add(acc, count(rest & ~(1 << u)), 1)
        return tuple(acc)

    return list(count((1 << G.vertex_count) - 1))


def unbranched_polynomial(G: Graph) -> list[int]:
    """sum over edge sets with every vertex degree <= 2 of z^(size).

    Edges are decided one at a time; the state is the capped degree of each
    vertex that still has undecided edges, which keeps the memo small.
    """
    E = len(G.edges)
    if E > MAX_UNBRANCHED_EDGES:
        raise ValueError(f"at most {MAX_UNBRANCHED_EDGES} edges, got {E}")
    last = {}
    for i, (u, v) in enumerate(G.edges):
        last[u] = i
        last[v] = i

    @lru_cache(maxsize=None)
    def count(i: int, degs: tuple) -> tuple:
        if i == E:
            return (1,)
        u, v = G.edges[i]
        d = list(degs)

        def forget(arr):
            # vertices with no later edges no longer matter
            for x in (u, v):
                if last[x] == i:
                    arr[x] = 0
            return tuple(arr)

        acc = list(count(i + 1, forget(d[:])))
        if d[u] < 2 and d[v] < 2:
            d[u] += 1
            d[v] += 1
            _add(acc, count(i + 1, forget(d)), 1)
        return tuple(acc)

    return list(count(0, (0,) * G.vertex_count))


# ---------------------------------------------------------------------------
# root regions


@dataclass(frozen=True)
class RegionSpec:
    kind: str
    tol: float = 1e-7

    def __post_init__(self):
        if self.kind not in REGION_KINDS:
            raise ValueError(f"unknown region {self.kind!r}; expected one of {REGION_KINDS}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def deviation(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=complex)
        if self.kind == "unit_circle":
            return np.abs(np.abs(r) - 1)
        if self.kind == "negative_real_axis":
            return np.maximum(np.abs(r.imag), np.maximum(0.0, r.real))
        if self.kind == "half_plane_re_nonpositive":
            return np.maximum(0.0, r.real)
        return np.maximum(0.0, r.imag)


@dataclass
class RegionReport:
    polynomial: list
    roots: np.ndarray
    deviations: np.ndarray
    max_deviation: float
    passed: bool
    region: RegionSpec = field(default=None)

    def to_json(self) -> dict:
        poly = [int(c) if isinstance(c, (int, np.integer)) else _cjson(c) for c in self.polynomial]
        return {
            "region": self.region.kind,
            "tol": self.region.tol,
            "polynomial": poly,
            "roots": [_cjson(r) for r in self.roots],
            "max_deviation": self.max_deviation,
            "pass": self.passed,
        }


def _cjson(c):
    c = complex(c)
    return {"re": c.real, "im": c.imag}


def verify_region(p, region: RegionSpec) -> RegionReport:
    """Roots of ``p`` (ascending coefficients) and their distance from the region.

    Regions are closed: a root on the boundary has deviation 0.
    """
    rs = roots(p).roots
    dev = region.deviation(rs)
    worst = float(dev.max()) if len(dev) else 0.0
    return RegionReport(list(p), rs, dev, worst, worst <= region.tol, region)


def auto_regions(kind: str, tol: float) -> list[RegionSpec]:
    """Default checks per polynomial kind. Unbranched polynomials get both
    closed half-planes (Re <= 0 and Im <= 0) side by side."""
    if kind == "dimer":
        return [RegionSpec("negative_real_axis", tol)]
    if kind == "unbranched":
        return [RegionSpec("half_plane_re_nonpositive", tol), RegionSpec("half_plane_im_negative", tol)]
    raise ValueError(f"unknown polynomial kind {kind!r}")


__all__ = [
    "Graph",
    "load_graph",
    "random_graph",
    "dimer_polynomial",
    "unbranched_polynomial",
    "RegionSpec",
    "RegionReport",
    "verify_region",
    "auto_regions",
    "REGION_KINDS",
]
