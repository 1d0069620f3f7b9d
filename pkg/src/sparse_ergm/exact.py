"""Sampling-free partition functions, marginals and degree laws.

* ``undirected_exact`` enumerates all ``2^C(n,2)`` graphs (tiny n only).
* ``directed_rowwise_exact`` uses the fact that the directed star
  Hamiltonian is a sum of per-row functions of the out-degree, so
  ``Z_n = (sum_j C(n,j) w_j)^n`` and the rows are independent. Works for n
  in the millions.
* ``directed_bruteforce_exact`` enumerates all 0/1 matrices; it only exists
  to check the row-factorised engine.

All partition sums are accumulated in the log domain.
"""
from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import CapExceeded, ConfigError
from .graph_core import (
    SubgraphSpec,
    UndirectedGraph,
    hom_count,
    incidence,
    pair_count,
    pair_index,
)
from .model import UNDIRECTED, ModelSpec, effective_params, hamiltonian_coefficients

DEFAULT_CAP = 7
GENERAL_CAP = 6
HARD_CAP = 8
DIRECTED_BRUTE_CAP = 4
CHUNK_BITS = 15


@dataclass
class ExactResult:
    log_Z: float
    p_edge: float
    p_joint: float
    n: int
    method: str
    degree_law: np.ndarray | None = None
    log_p_edge: float = math.nan
    log_p_joint: float = math.nan

    def to_dict(self, model: ModelSpec | None = None) -> dict:
        d = {
            "n": self.n,
            "method": self.method,
            "log_Z": self.log_Z,
            "p_edge": self.p_edge,
            "p_joint": None if math.isnan(self.p_joint) else self.p_joint,
        }
        if self.degree_law is not None:
            d["degree_law"] = [float(v) for v in self.degree_law]
        if model is not None:
            d["model_echo"] = model.to_config()
        return d


def _log_add(log_terms: np.ndarray) -> float:
    """log(sum(exp(log_terms))) keeping full relative precision of small tails.

    With one dominant term the result is ``max + log1p(rest)`` instead of
    ``max + log(1 + rest)``, which matters when ``rest`` is ~1e-8.
    """
    log_terms = np.asarray(log_terms, dtype=float)
    if log_terms.size == 0:
        return -math.inf
    k = int(np.argmax(log_terms))
    mx = log_terms[k]
    if not np.isfinite(mx):
        return float(mx)
    rest = np.delete(log_terms, k)
    return float(mx + np.log1p(np.exp(rest - mx).sum()))


# ----------------------------------------------------------------------------
# undirected enumeration
# ----------------------------------------------------------------------------

def _fast_statistic(H: SubgraphSpec) -> bool:
    return H.star_order() is not None or H.is_triangle()


def default_cap(m: ModelSpec) -> int:
    return DEFAULT_CAP if all(_fast_statistic(H) for H in m.statistics) else GENERAL_CAP


@lru_cache(maxsize=None)
def _map_patterns(H: SubgraphSpec, n: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Group the edge-preserving-capable vertex maps V(H) -> [n] by image pairs.

    A map contributes prod over image pairs of the pair bits, so maps with
    the same set of image pairs can be merged with a multiplicity. Maps that
    collapse an edge of H onto one vertex never preserve it and are dropped.
    """
    counts: Counter = Counter()
    for q in product(range(n), repeat=H.vertex_count):
        pairs = set()
        for a, b in H.edges:
            if q[a] == q[b]:
                break
            pairs.add(pair_index(q[a], q[b], n))
        else:
            counts[tuple(sorted(pairs))] += 1
    return tuple(sorted(counts.items()))


def _chunk_homs(H: SubgraphSpec, n: int, bits: np.ndarray, deg: np.ndarray) -> np.ndarray:
    p = H.star_order()
    if p is not None:
        return (deg.astype(np.float64) ** p).sum(axis=1)
    if H.is_triangle():
        tot = np.zeros(bits.shape[0], dtype=np.int64)
        for i, j, k in combinations(range(n), 3):
            tot += (bits[:, pair_index(i, j, n)] & bits[:, pair_index(i, k, n)]
                    & bits[:, pair_index(j, k, n)])
        return 6.0 * tot
    tot = np.zeros(bits.shape[0], dtype=np.int64)
    for pairs, mult in _map_patterns(H, n):
        if pairs:
            tot += mult * np.bitwise_and.reduce(bits[:, list(pairs)], axis=1)
        else:
            tot += mult
    return tot.astype(np.float64)


def _enumeration_chunks(n: int) -> list[tuple[int, int]]:
    total = 1 << pair_count(n)
    size = 1 << CHUNK_BITS
    return [(s, min(s + size, total)) for s in range(0, total, size)]


def _chunk_bits(n: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    return ((idx[:, None] >> np.arange(pair_count(n), dtype=np.int64)) & 1).astype(np.int8)


def _chunk_hamiltonian(m: ModelSpec, n: int, coefs, start: int, stop: int):
    bits = _chunk_bits(n, start, stop)
    deg = bits.astype(np.int64) @ incidence(n)
    h = np.zeros(bits.shape[0])
    for c, H in zip(coefs, m.statistics):
        h += c * _chunk_homs(H, n, bits, deg)
    return bits, h


def _check_undirected(m: ModelSpec, n: int, cap, override: bool) -> None:
    if m.flavor != UNDIRECTED:
        raise ConfigError("undirected_exact needs an undirected model")
    if n < 2:
        raise ValueError("n must be >= 2")
    limit = default_cap(m) if cap is None else int(cap)
    if override:
        return
    if n > HARD_CAP:
        raise CapExceeded(n, min(limit, HARD_CAP))
    if n > limit:
        raise CapExceeded(n, limit)


def undirected_exact(m: ModelSpec, n: int, *, cap: int | None = None,
                     override: bool = False, threads: int = 1) -> ExactResult:
    """Exact log Z_n, P(X_12 = 1) and P(X_12 = X_13 = 1) by enumeration.

    The graph index space is split into fixed chunks of ``2**15`` graphs.
    Chunks may be evaluated on several threads, but partial sums are always
    merged in chunk order, so the result does not depend on ``threads``.
    """
    _check_undirected(m, n, cap, override)
    coefs = hamiltonian_coefficients(m, n)
    e12 = pair_index(0, 1, n)
    e13 = pair_index(0, 2, n) if n >= 3 else None

    def work(span):
        bits, h = _chunk_hamiltonian(m, n, coefs, *span)
        mx = h.max()
        w = np.exp(h - mx)
        x12 = bits[:, e12].astype(bool)
        s_edge = w[x12].sum()
        s_joint = w[x12 & bits[:, e13].astype(bool)].sum() if e13 is not None else 0.0
        return mx, w.sum(), s_edge, s_joint

    chunks = _enumeration_chunks(n)
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]

    M = -math.inf
    S = Se = Sj = 0.0
    for mx, s, se, sj in parts:
        if mx > M:
            scale = math.exp(M - mx) if M > -math.inf else 0.0
            S, Se, Sj, M = S * scale, Se * scale, Sj * scale, mx
            S, Se, Sj = S + s, Se + se, Sj + sj
        else:
            scale = math.exp(mx - M)
            S, Se, Sj = S + s * scale, Se + se * scale, Sj + sj * scale
    p_joint = Sj / S if e13 is not None else math.nan
    return ExactResult(
        log_Z=float(M + math.log(S)),
        p_edge=float(Se / S),
        p_joint=float(p_joint),
        n=n,
        method="enumeration",
        log_p_edge=math.log(Se / S) if Se > 0 else -math.inf,
        log_p_joint=math.log(Sj / S) if Sj > 0 else -math.inf,
    )


def undirected_gibbs_law(m: ModelSpec, n: int, *, cap: int = 5) -> np.ndarray:
    """Gibbs probability of every graph, indexed in enumeration order."""
    _check_undirected(m, n, cap, False)
    coefs = hamiltonian_coefficients(m, n)
    _, h = _chunk_hamiltonian(m, n, coefs, 0, 1 << pair_count(n))
    return np.exp(h - logsumexp(h))


# ----------------------------------------------------------------------------
# directed star models
# ----------------------------------------------------------------------------

def _check_directed(m: ModelSpec) -> None:
    if not m.directed_flavor:
        raise ConfigError("directed engine needs a directed-stars model")


def row_log_weights(m: ModelSpec, n: int) -> np.ndarray:
    """log w_j for out-degree j = 0..slots of one row.

    ``w_j = C(slots, j) exp(sum_p alpha_{n,p} beta_p j^p / n^{p-1})`` where
    ``slots`` is n with the diagonal allowed and n - 1 without.
    """
    _check_directed(m)
    slots = n if m.allow_diagonal else n - 1
    j = np.arange(slots + 1, dtype=np.float64)
    lw = gammaln(slots + 1.0) - gammaln(j + 1.0) - gammaln(slots - j + 1.0)
    for b, p in zip(effective_params(m, n), m.statistics):
        lw = lw + b * j ** p / float(n) ** (p - 1)
    return lw


def directed_rowwise_exact(m: ModelSpec, n: int) -> ExactResult:
    """Exact directed results from the per-row degree sum; O(n k) cost."""
    _check_directed(m)
    if n < 2:
        raise ValueError("n must be >= 2")
    slots = n if m.allow_diagonal else n - 1
    lw = row_log_weights(m, n)
    log_row = _log_add(lw)
    j = np.arange(slots + 1, dtype=np.float64)
    law = np.exp(lw - log_row)
    law = law / law.sum()
    if not m.allow_diagonal:
        law = np.append(law, 0.0)
    log_first = logsumexp(lw[1:] + np.log(j[1:])) - log_row
    log_p_edge = float(log_first - math.log(slots))
    if slots >= 2:
        log_second = logsumexp(lw[2:] + np.log(j[2:]) + np.log(j[2:] - 1)) - log_row
        log_p_joint = float(log_second - math.log(slots) - math.log(slots - 1))
    else:
        log_p_joint = math.nan
    return ExactResult(
        log_Z=n * log_row,
        p_edge=math.exp(log_p_edge),
        p_joint=math.exp(log_p_joint) if slots >= 2 else math.nan,
        n=n,
        method="rowwise",
        degree_law=law,
        log_p_edge=log_p_edge,
        log_p_joint=log_p_joint,
    )


def directed_bruteforce_exact(m: ModelSpec, n: int) -> ExactResult:
    """Enumerate every adjacency matrix; for checking the rowwise engine."""
    _check_directed(m)
    if n > DIRECTED_BRUTE_CAP:
        raise CapExceeded(n, DIRECTED_BRUTE_CAP, "directed brute force")
    cells = [(i, j) for i in range(n) for j in range(n) if m.allow_diagonal or i != j]
    total = 1 << len(cells)
    idx = np.arange(total, dtype=np.int64)
    x = np.zeros((total, n, n), dtype=np.int64)
    for b, (i, j) in enumerate(cells):
        x[:, i, j] = (idx >> b) & 1
    deg = x.sum(axis=2)
    beta = effective_params(m, n)
    h = np.zeros(total)
    for bp, p in zip(beta, m.statistics):
        # n^2 * beta * n^{-p-1} * sum_i d_i^p
        h += n * n * bp * (deg.astype(np.float64) ** p).sum(axis=1) / float(n) ** (p + 1)
    log_z = float(logsumexp(h))
    prob = np.exp(h - log_z)
    # the two positions in row 1 standing in for (1,i) and (1,j), i != j
    row_cols = [c for c in range(n) if c != 0] + ([0] if m.allow_diagonal else [])
    a, b = row_cols[0], row_cols[1] if len(row_cols) > 1 else None
    p_edge = float(prob[x[:, 0, a] == 1].sum())
    p_joint = float(prob[(x[:, 0, a] == 1) & (x[:, 0, b] == 1)].sum()) if b is not None else math.nan
    law = np.bincount(deg[:, 0], weights=prob, minlength=n + 1)
    return ExactResult(
        log_Z=log_z,
        p_edge=p_edge,
        p_joint=p_joint,
        n=n,
        method="bruteforce",
        degree_law=law,
        log_p_edge=math.log(p_edge) if p_edge > 0 else -math.inf,
        log_p_joint=math.log(p_joint) if p_joint > 0 else -math.inf,
    )


def exact(m: ModelSpec, n: int, **kw) -> ExactResult:
    """Dispatch to the exact engine that fits the model flavor."""
    if m.directed_flavor:
        return directed_rowwise_exact(m, n)
    return undirected_exact(m, n, **kw)


# ----------------------------------------------------------------------------
# finite-n brackets on the undirected marginal ratios
# ----------------------------------------------------------------------------

class SandwichBounds(NamedTuple):
    """Brackets on P(X_12=1)/e^{2 a b1} and P(X_12=X_13=1)/e^{4 a b1}.

    The ``log_*`` fields carry the same bounds in the log domain, which
    stay finite when the plain values overflow.
    """

    lower: float
    upper: float
    lower2: float
    upper2: float
    log_lower: float
    log_upper: float
    log_lower2: float
    log_upper2: float


def witness_constants(H: SubgraphSpec) -> tuple[int, int]:
    """(hom(H, one-edge graph), hom(H, 2-star graph)), both on v(H)+1 vertices."""
    if not H.edges or not H.is_connected():
        raise ConfigError(
            "sandwich bounds need connected statistics with at least one edge")
    size = max(H.vertex_count + 1, 3)
    one = UndirectedGraph.from_edges(size, [(0, 1)])
    two = UndirectedGraph.from_edges(size, [(0, 1), (0, 2)])
    return hom_count(H, one), hom_count(H, two)


def sandwich_bounds(m: ModelSpec, n: int) -> SandwichBounds:
    """Lower/upper brackets read off the numerator/denominator estimates.

    lower = exp(sum_{p>=2} beta_p^{(n)} c_p n^{2-v(H_p)}) / (1+e^{2 a b1})^{C(n,2)}
    upper = (1+e^{2 a b1})^{C(n,2)-1}   (marginal), ^{C(n,2)-2} (joint)

    with c_p counted in the one-edge witness (marginal) or the 2-star
    witness (joint). Requires every beta negative.
    """
    if m.flavor != UNDIRECTED:
        raise ConfigError("sandwich bounds are for undirected models")
    m.require_edge_first()
    if not all(b < 0 for b in m.beta):
        raise ConfigError("sandwich bounds need all beta negative")
    beta = effective_params(m, n)
    c_one, c_two = [], []
    for H in m.statistics[1:]:
        a, b = witness_constants(H)
        c_one.append(a)
        c_two.append(b)
    vs = m.vertex_counts()[1:]
    ex1 = sum(b * c / float(n) ** (v - 2) for b, c, v in zip(beta[1:], c_one, vs))
    ex2 = sum(b * c / float(n) ** (v - 2) for b, c, v in zip(beta[1:], c_two, vs))
    pairs = pair_count(n)
    log1pe = math.log1p(math.exp(2 * beta[0]))
    lo, up = ex1 - pairs * log1pe, (pairs - 1) * log1pe
    lo2, up2 = ex2 - pairs * log1pe, (pairs - 2) * log1pe

    def safe_exp(v):
        return math.exp(v) if v < 700 else math.inf

    return SandwichBounds(safe_exp(lo), safe_exp(up), safe_exp(lo2), safe_exp(up2),
                          lo, up, lo2, up2)
