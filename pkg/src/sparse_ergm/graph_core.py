"""Graphs, subgraph statistics and homomorphism densities.

Undirected graphs on ``n`` vertices are stored as a bit vector over the
``n(n-1)/2`` unordered pairs in lexicographic order ``(0,1), (0,2), ...,
(n-2,n-1)``. That order is also the enumeration order used by the exact
engine. Directed graphs are stored as a full ``n x n`` 0/1 matrix.

Vertices are 0-based in code and 1-based in the text form of
:class:`SubgraphSpec` (``star:p`` or ``subgraph:v;i-j,i-j,...``).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Sequence, Union

import numpy as np


@dataclass(frozen=True)
class SubgraphSpec:
    """A finite simple graph H used as a sufficient statistic."""

    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if int(self.vertex_count) < 1:
            raise ValueError("vertex_count must be positive")
        norm = []
        for e in self.edges:
            a, b = (int(x) for x in e)
            if a == b:
                raise ValueError(f"self-pair {a}-{b} in subgraph")
            if not (0 <= a < self.vertex_count and 0 <= b < self.vertex_count):
                raise ValueError(f"edge {a}-{b} outside 0..{self.vertex_count - 1}")
            norm.append((min(a, b), max(a, b)))
        if len(set(norm)) != len(norm):
            raise ValueError("duplicate edge in subgraph")
        object.__setattr__(self, "vertex_count", int(self.vertex_count))
        object.__setattr__(self, "edges", tuple(norm))

    @classmethod
    def edge(cls) -> SubgraphSpec:
        return cls(2, ((0, 1),))

    @classmethod
    def star(cls, p: int) -> SubgraphSpec:
        """The p-star: a center joined to p leaves."""
        if p < 1:
            raise ValueError("star order must be >= 1")
        return cls(p + 1, tuple((0, i) for i in range(1, p + 1)))

    @classmethod
    def triangle(cls) -> SubgraphSpec:
        return cls(3, ((0, 1), (0, 2), (1, 2)))

    @classmethod
    def parse(cls, text: str) -> SubgraphSpec:
        """Parse ``star:p`` or ``subgraph:v;i-j,...`` (1-based vertices)."""
        text = text.strip()
        kind, sep, body = text.partition(":")
        if not sep:
            raise ValueError(f"cannot parse subgraph {text!r}")
        kind = kind.strip().lower()
        if kind == "star":
            return cls.star(int(body))
        if kind == "subgraph":
            v, _, elist = body.partition(";")
            edges = []
            for tok in filter(None, (t.strip() for t in elist.split(","))):
                a, _, b = tok.partition("-")
                edges.append((int(a) - 1, int(b) - 1))
            return cls(int(v), tuple(edges))
        raise ValueError(f"unknown subgraph kind {kind!r}")

    def to_text(self) -> str:
        p = self.star_order()
        if p is not None:
            return f"star:{p}"
        body = ",".join(f"{a + 1}-{b + 1}" for a, b in self.edges)
        return f"subgraph:{self.vertex_count};{body}"

    def star_order(self) -> int | None:
        """Return p if this is exactly the star ``star(p)``, else None."""
        p = self.vertex_count - 1
        if p >= 1 and self.edges == tuple((0, i) for i in range(1, p + 1)):
            return p
        return None

    def is_edge(self) -> bool:
        return self.star_order() == 1

    def is_triangle(self) -> bool:
        return self.vertex_count == 3 and len(self.edges) == 3

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        adj = self.neighbors()
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.vertex_count

    def neighbors(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.vertex_count)]
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj


Statistic = Union[SubgraphSpec, int]


# ----------------------------------------------------------------------------
# pair indexing
# ----------------------------------------------------------------------------

def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(i: int, j: int, n: int) -> int:
    """Lexicographic index of the unordered pair {i, j}, i != j."""
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"invalid pair ({i}, {j}) for n={n}")
    if i > j:
        i, j = j, i
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@lru_cache(maxsize=None)
def pair_list(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(combinations(range(n), 2))


@lru_cache(maxsize=None)
def incidence(n: int) -> np.ndarray:
    """Pair-by-vertex incidence matrix, shape ``(C(n,2), n)``."""
    inc = np.zeros((pair_count(n), n), dtype=np.int64)
    for e, (i, j) in enumerate(pair_list(n)):
        inc[e, i] = 1
        inc[e, j] = 1
    inc.setflags(write=False)
    return inc


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.uint8, copy=True)
    a.setflags(write=False)
    return a


class UndirectedGraph:
    """Simple undirected graph stored as upper-triangular bits."""

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits=None):
        if n < 1:
            raise ValueError("n must be positive")
        m = pair_count(n)
        if bits is None:
            bits = np.zeros(m, dtype=np.uint8)
        bits = np.asarray(bits)
        if bits.shape != (m,):
            raise ValueError(f"expected {m} pair bits, got shape {bits.shape}")
        if np.any((bits != 0) & (bits != 1)):
            raise ValueError("pair bits must be 0/1")
        self.n = int(n)
        self.bits = _frozen(bits)

    @classmethod
    def empty(cls, n: int) -> UndirectedGraph:
        return cls(n)

    @classmethod
    def complete(cls, n: int) -> UndirectedGraph:
        return cls(n, np.ones(pair_count(n), dtype=np.uint8))

    @classmethod
    def from_edges(cls, n: int, edges) -> UndirectedGraph:
        bits = np.zeros(pair_count(n), dtype=np.uint8)
        for i, j in edges:
            bits[pair_index(i, j, n)] = 1
        return cls(n, bits)

    @classmethod
    def from_index(cls, n: int, index: int) -> UndirectedGraph:
        """Graph number ``index`` in enumeration order (bit e = pair e)."""
        m = pair_count(n)
        bits = (index >> np.arange(m)) & 1
        return cls(n, bits)

    @classmethod
    def from_adjacency(cls, a) -> UndirectedGraph:
        a = np.asarray(a)
        n = a.shape[0]
        if a.shape != (n, n) or not np.array_equal(a, a.T):
            raise ValueError("adjacency must be square and symmetric")
        if np.any(np.diag(a) != 0):
            raise ValueError("adjacency must have zero diagonal")
        iu = np.triu_indices(n, 1)
        return cls(n, a[iu])

    def index(self) -> int:
        return int(sum(1 << e for e in np.flatnonzero(self.bits)))

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        iu = np.triu_indices(self.n, 1)
        a[iu] = self.bits
        return a + a.T

    def degrees(self) -> np.ndarray:
        return self.bits.astype(np.int64) @ incidence(self.n)

    def edge_count(self) -> int:
        return int(self.bits.sum())

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.bits[pair_index(i, j, self.n)])

    def flipped(self, pos) -> UndirectedGraph:
        e = _undirected_pos(pos, self.n)
        bits = self.bits.copy()
        bits[e] ^= 1
        return UndirectedGraph(self.n, bits)

    def with_pair(self, pos, value: int) -> UndirectedGraph:
        e = _undirected_pos(pos, self.n)
        bits = self.bits.copy()
        bits[e] = value
        return UndirectedGraph(self.n, bits)

    def __eq__(self, other):
        return (isinstance(other, UndirectedGraph) and self.n == other.n
                and np.array_equal(self.bits, other.bits))

    def __hash__(self):
        return hash((self.n, self.bits.tobytes()))

    def __repr__(self):
        return f"UndirectedGraph(n={self.n}, edges={self.edge_count()})"


class DirectedGraph:
    """Directed graph as a 0/1 matrix; ``X[i, j] = 1`` is an edge i -> j."""

    __slots__ = ("n", "matrix", "allow_diagonal")

    def __init__(self, matrix, allow_diagonal: bool = True):
        x = np.asarray(matrix)
        n = x.shape[0]
        if x.ndim != 2 or x.shape != (n, n) or n < 1:
            raise ValueError("directed graph needs a square matrix")
        if np.any((x != 0) & (x != 1)):
            raise ValueError("entries must be 0/1")
        if not allow_diagonal and np.any(np.diag(x) != 0):
            raise ValueError("diagonal entries set but allow_diagonal is False")
        self.n = int(n)
        self.matrix = _frozen(x)
        self.allow_diagonal = bool(allow_diagonal)

    @classmethod
    def empty(cls, n: int, allow_diagonal: bool = True) -> DirectedGraph:
        return cls(np.zeros((n, n), dtype=np.uint8), allow_diagonal)

    def degrees(self) -> np.ndarray:
        return self.matrix.sum(axis=1, dtype=np.int64)

    def flipped(self, pos) -> DirectedGraph:
        i, j = _directed_pos(pos, self.n, self.allow_diagonal)
        x = self.matrix.copy()
        x[i, j] ^= 1
        return DirectedGraph(x, self.allow_diagonal)

    def __eq__(self, other):
        return (isinstance(other, DirectedGraph) and self.n == other.n
                and self.allow_diagonal == other.allow_diagonal
                and np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.n, self.allow_diagonal, self.matrix.tobytes()))

    def __repr__(self):
        return f"DirectedGraph(n={self.n}, edges={int(self.matrix.sum())})"


GraphState = Union[UndirectedGraph, DirectedGraph]


def _undirected_pos(pos, n: int) -> int:
    if isinstance(pos, (tuple, list)):
        return pair_index(int(pos[0]), int(pos[1]), n)
    e = int(pos)
    if not 0 <= e < pair_count(n):
        raise ValueError(f"pair index {e} out of range for n={n}")
    return e


def _directed_pos(pos, n: int, allow_diagonal: bool) -> tuple[int, int]:
    try:
        i, j = (int(v) for v in pos)
    except TypeError:
        raise ValueError("directed position must be an (i, j) pair") from None
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"position ({i}, {j}) out of range for n={n}")
    if i == j and not allow_diagonal:
        raise ValueError("diagonal position with allow_diagonal=False")
    return i, j


# ----------------------------------------------------------------------------
# homomorphism counts and densities
# ----------------------------------------------------------------------------

def hom_count(H: SubgraphSpec, G: UndirectedGraph) -> int:
    """Number of vertex maps V(H) -> V(G) sending every edge of H to an edge of G.

    Non-injective maps are counted. Brute force by backtracking over the
    vertices of H, pruning as soon as an edge to an already placed vertex
    is violated. Cost is up to ``n ** v(H)``; fine for small graphs only.
    """
    n = G.n
    nbr = [set(np.flatnonzero(row).tolist()) for row in G.adjacency()]
    hn = H.neighbors()
    order = list(range(H.vertex_count))
    back = [[w for w in hn[v] if w < v] for v in order]
    everything = set(range(n))
    assign = [0] * H.vertex_count

    def extend(k: int) -> int:
        if k == H.vertex_count:
            return 1
        cand = everything
        for w in back[k]:
            cand = cand & nbr[assign[w]]
            if not cand:
                return 0
        if k == H.vertex_count - 1:
            return len(cand)
        total = 0
        for c in cand:
            assign[k] = c
            total += extend(k + 1)
        return total

    return extend(0)


def hom_density(H: SubgraphSpec, G: UndirectedGraph) -> float:
    return hom_count(H, G) / G.n ** H.vertex_count


def _einsum_terms(H: SubgraphSpec):
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if H.vertex_count > len(letters):
        raise ValueError("subgraph too large for weighted density")
    used = {v for e in H.edges for v in e}
    isolated = H.vertex_count - len(used)
    subs = ",".join(letters[a] + letters[b] for a, b in H.edges)
    return subs, isolated


def weighted_hom_density(H: SubgraphSpec, x) -> float:
    """Homomorphism density of H in the edge-weight matrix ``x``.

    ``x`` must be symmetric with entries in [0, 1] and zero diagonal. The
    value is ``n ** -v(H)`` times the sum over all vertex maps of the
    product of ``x`` over the mapped edges of H.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if x.shape != (n, n):
        raise ValueError("x must be square")
    if not np.allclose(x, x.T, rtol=0, atol=0):
        raise ValueError("x must be symmetric")
    if np.any(x < 0) or np.any(x > 1):
        raise ValueError("entries of x must lie in [0, 1]")
    if np.any(np.diag(x) != 0):
        raise ValueError("x must have zero diagonal")
    subs, isolated = _einsum_terms(H)
    if H.edges:
        total = np.einsum(subs + "->", *([x] * len(H.edges)), optimize=True)
    else:
        total = 1.0
    return float(total) * n ** isolated / n ** H.vertex_count


def star_hom_count(p: int, degrees) -> int:
    """hom(star_p, G) = sum of d_v ** p, as an exact integer."""
    return sum(int(d) ** p for d in degrees)


def star_density_undirected(p: int, G: UndirectedGraph) -> float:
    if p < 1:
        raise ValueError("p must be >= 1")
    return star_hom_count(p, G.degrees()) / G.n ** (p + 1)


def directed_star_density(p: int, X: DirectedGraph) -> float:
    """Directed p-star density ``n^(-p-1) * sum_i d_i^p`` from row degrees."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return star_hom_count(p, X.degrees()) / X.n ** (p + 1)


def fast_hom_count(H: SubgraphSpec, G: UndirectedGraph) -> int:
    """hom_count with degree-power and triangle fast paths."""
    p = H.star_order()
    if p is not None:
        return star_hom_count(p, G.degrees())
    if H.is_triangle():
        a = G.adjacency()
        return int(np.trace(a @ a @ a))
    return hom_count(H, G)


def statistic_density(stat: Statistic, G: GraphState) -> float:
    if isinstance(G, DirectedGraph):
        return directed_star_density(_star_order(stat), G)
    return fast_hom_count(stat, G) / G.n ** stat.vertex_count


def _star_order(stat: Statistic) -> int:
    if isinstance(stat, SubgraphSpec):
        p = stat.star_order()
        if p is None:
            raise ValueError("directed models only accept star statistics")
        return p
    return int(stat)


def _hom_gain_undirected(H: SubgraphSpec, G_off: UndirectedGraph, i: int, j: int) -> int:
    """hom(H, G_off + ij) - hom(H, G_off) for a pair ij absent from G_off."""
    p = H.star_order()
    if p is not None:
        d = G_off.degrees()
        di, dj = int(d[i]), int(d[j])
        return (di + 1) ** p - di ** p + (dj + 1) ** p - dj ** p
    if H.is_triangle():
        a = G_off.adjacency()
        return 6 * int(a[i] @ a[j])
    return hom_count(H, G_off.with_pair((i, j), 1)) - hom_count(H, G_off)


def edge_flip_delta(G: GraphState, stats: Sequence[Statistic], pos) -> np.ndarray:
    """Change in every statistic density when the bit at ``pos`` is flipped.

    ``pos`` is a pair index or ``(i, j)`` tuple for undirected graphs and an
    ``(i, j)`` tuple for directed graphs. Deltas are exact integer hom-count
    differences divided by ``n ** v(H)``, so flipping twice restores the
    original densities bit for bit.
    """
    out = np.empty(len(stats))
    n = G.n
    if isinstance(G, DirectedGraph):
        i, j = _directed_pos(pos, n, G.allow_diagonal)
        d = int(G.degrees()[i])
        sign = -1 if G.matrix[i, j] else 1
        lo = d - 1 if sign < 0 else d
        for k, s in enumerate(stats):
            p = _star_order(s)
            gain = (lo + 1) ** p - lo ** p
            out[k] = sign * gain / n ** (p + 1)
        return out
    e = _undirected_pos(pos, n)
    i, j = pair_list(n)[e]
    present = bool(G.bits[e])
    G_off = G.with_pair(e, 0) if present else G
    sign = -1 if present else 1
    for k, H in enumerate(stats):
        out[k] = sign * _hom_gain_undirected(H, G_off, i, j) / n ** H.vertex_count
    return out
