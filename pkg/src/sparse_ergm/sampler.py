"""Monte Carlo for the Gibbs measures.

Undirected models use single-site heat-bath (Glauber) dynamics. Directed
star models are sampled exactly: rows are independent, the out-degree of a
row follows the exact degree law, and given the degree the out-neighbours
are a uniform subset.

Every chain draws from its own Philox stream keyed by ``(seed, chain)``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import expit

from .errors import ConfigError
from .exact import directed_rowwise_exact
from .graph_core import (
    DirectedGraph,
    UndirectedGraph,
    edge_flip_delta,
    hom_count,
    pair_count,
    pair_list,
)
from .model import ModelSpec, effective_params, hamiltonian_coefficients

N_BATCHES = 30
_BLOCK = 1 << 16


@dataclass(frozen=True)
class SampleEstimate:
    mean: float
    stderr: float
    n_samples: int
    burn_in: int
    thin: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def rng_stream(seed: int, chain: int = 0) -> np.random.Generator:
    """Counter-based generator for chain ``chain`` of run ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(chain),))
    return np.random.Generator(np.random.Philox(ss))


def batch_means(values, n_batches: int = N_BATCHES) -> tuple[float, float]:
    """Mean and batch-means standard error of a (correlated) series.

    The series is cut into ``n_batches`` equal contiguous batches (a short
    remainder at the end is dropped for the error but kept in the mean).
    """
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValueError("no samples")
    mean = float(x.mean())
    b = min(n_batches, x.size)
    size = x.size // b
    if b < 2:
        return mean, 0.0
    bm = x[: b * size].reshape(b, size).mean(axis=1)
    return mean, float(bm.std(ddof=1) / math.sqrt(b))


# ----------------------------------------------------------------------------
# Glauber dynamics
# ----------------------------------------------------------------------------

def glauber_step(G: UndirectedGraph, m: ModelSpec, rng: np.random.Generator) -> UndirectedGraph:
    """One heat-bath update of a uniformly chosen pair.

    The pair is set to 1 with probability sigma(dH), where dH is the
    Hamiltonian with the pair present minus with it absent.
    """
    if m.directed_flavor:
        raise ConfigError("glauber_step needs an undirected model")
    e = int(rng.integers(pair_count(G.n)))
    u = rng.random()
    return G.with_pair(e, int(u < conditional_on_probability(G, m, e)))


def conditional_on_probability(G: UndirectedGraph, m: ModelSpec, pos) -> float:
    """P(X_pos = 1 | all other pairs) under the Gibbs measure."""
    n = G.n
    off = G.with_pair(pos, 0)
    delta = edge_flip_delta(off, m.statistics, pos)
    dH = n * n * float(np.dot(effective_params(m, n), delta))
    return float(expit(dH))


class _Chain:
    """Mutable heat-bath chain with incremental statistics.

    Adjacency rows are int bitmasks; degrees are kept in a list. Stars use
    the degree-power update, triangles the common-neighbour count, and any
    other subgraph falls back to recounting homomorphisms.
    """

    def __init__(self, m: ModelSpec, n: int, rng: np.random.Generator, init=None):
        self.m = m
        self.n = n
        self.rng = rng
        self.pairs = pair_list(n)
        self.coefs = hamiltonian_coefficients(m, n)
        self.kinds = []
        for H in m.statistics:
            p = H.star_order()
            if p is not None:
                self.kinds.append(("star", p))
            elif H.is_triangle():
                self.kinds.append(("tri", None))
            else:
                self.kinds.append(("gen", H))
        self.adj = [0] * n
        self.deg = [0] * n
        self.state = 0
        if init is not None:
            for e in np.flatnonzero(init.bits):
                self._set(int(e), 1)
        self._buf_e = self._buf_u = None
        self._pos = _BLOCK

    def _set(self, e: int, val: int) -> None:
        i, j = self.pairs[e]
        cur = (self.adj[i] >> j) & 1
        if cur == val:
            return
        if val:
            self.adj[i] |= 1 << j
            self.adj[j] |= 1 << i
            self.deg[i] += 1
            self.deg[j] += 1
            self.state |= 1 << e
        else:
            self.adj[i] &= ~(1 << j)
            self.adj[j] &= ~(1 << i)
            self.deg[i] -= 1
            self.deg[j] -= 1
            self.state &= ~(1 << e)

    def graph(self) -> UndirectedGraph:
        return UndirectedGraph.from_index(self.n, self.state)

    def has(self, e: int) -> int:
        return (self.state >> e) & 1

    def delta_h(self, e: int) -> float:
        i, j = self.pairs[e]
        on = (self.adj[i] >> j) & 1
        di = self.deg[i] - on
        dj = self.deg[j] - on
        total = 0.0
        for c, (kind, arg) in zip(self.coefs, self.kinds):
            if kind == "star":
                gain = (di + 1) ** arg - di ** arg + (dj + 1) ** arg - dj ** arg
            elif kind == "tri":
                gain = 6 * bin(self.adj[i] & self.adj[j]).count("1")
            else:
                g = self.graph()
                gon, goff = g.with_pair(e, 1), g.with_pair(e, 0)
                gain = hom_count(arg, gon) - hom_count(arg, goff)
            total += c * gain
        return total

    def _refill(self):
        self._buf_e = self.rng.integers(len(self.pairs), size=_BLOCK).tolist()
        self._buf_u = self.rng.random(_BLOCK).tolist()
        self._pos = 0

    def step(self) -> None:
        if self._pos >= _BLOCK:
            self._refill()
        e = self._buf_e[self._pos]
        u = self._buf_u[self._pos]
        self._pos += 1
        dh = self.delta_h(e)
        # sigma(dh) without overflow
        if dh >= 0:
            p_on = 1.0 / (1.0 + math.exp(-dh))
        else:
            z = math.exp(dh)
            p_on = z / (1.0 + z)
        self._set(e, 1 if u < p_on else 0)


def _check_budgets(burn_in, samples, thin):
    if samples < 1 or thin < 1 or burn_in < 0:
        raise ValueError("need samples >= 1, thin >= 1, burn_in >= 0")


def run_chain(m: ModelSpec, n: int, burn_in: int, samples: int, thin: int,
              seed: int, chain: int = 0) -> tuple[SampleEstimate, SampleEstimate]:
    """Time averages of 1{X_12=1} and 1{X_12=X_13=1} along a Glauber chain.

    The chain starts from the empty graph, runs ``burn_in`` single-pair
    updates, then records the indicators every ``thin`` updates until
    ``samples`` values are collected.
    """
    if m.directed_flavor:
        raise ConfigError("run_chain needs an undirected model")
    if n < 3:
        raise ValueError("run_chain needs n >= 3")
    _check_budgets(burn_in, samples, thin)
    ch = _Chain(m, n, rng_stream(seed, chain))
    for _ in range(burn_in):
        ch.step()
    e12, e13 = 0, 1  # pairs (0,1), (0,2) in lexicographic order
    edge = np.empty(samples, dtype=np.int8)
    joint = np.empty(samples, dtype=np.int8)
    for s in range(samples):
        for _ in range(thin):
            ch.step()
        a = ch.has(e12)
        edge[s] = a
        joint[s] = a & ch.has(e13)
    out = []
    for series in (edge, joint):
        mean, se = batch_means(series)
        out.append(SampleEstimate(mean, se, samples, burn_in, thin, int(seed)))
    return out[0], out[1]


def chain_state_counts(m: ModelSpec, n: int, steps: int, seed: int,
                       burn_in: int = 0, chain: int = 0) -> np.ndarray:
    """Visit counts of every graph (enumeration index) over ``steps`` updates."""
    if n > 5:
        raise ValueError("state histogram only for n <= 5")
    ch = _Chain(m, n, rng_stream(seed, chain))
    for _ in range(burn_in):
        ch.step()
    counts = np.zeros(1 << pair_count(n), dtype=np.int64)
    for _ in range(steps):
        ch.step()
        counts[ch.state] += 1
    return counts


# ----------------------------------------------------------------------------
# exact directed sampling
# ----------------------------------------------------------------------------

def degree_cdf(m: ModelSpec, n: int) -> np.ndarray:
    law = directed_rowwise_exact(m, n).degree_law
    cdf = np.cumsum(law)
    cdf[-1] = 1.0
    return cdf


def sample_directed_rows(m: ModelSpec, n: int, size: int, rng: np.random.Generator,
                         row: int = 0, cdf=None) -> np.ndarray:
    """``size`` independent exact samples of row ``row``; shape (size, n)."""
    if not m.directed_flavor:
        raise ConfigError("directed sampling needs a directed-stars model")
    if cdf is None:
        cdf = degree_cdf(m, n)
    slots = n if m.allow_diagonal else n - 1
    deg = np.searchsorted(cdf, rng.random(size), side="right")
    deg = np.minimum(deg, slots)
    keys = rng.random((size, slots))
    ranks = keys.argsort(axis=1).argsort(axis=1)
    chosen = ranks < deg[:, None]
    if m.allow_diagonal:
        return chosen.astype(np.uint8)
    out = np.zeros((size, n), dtype=np.uint8)
    cols = [c for c in range(n) if c != row]
    out[:, cols] = chosen
    return out


def directed_direct_sample(m: ModelSpec, n: int, rng: np.random.Generator) -> DirectedGraph:
    """Exact sample of the directed Gibbs measure."""
    cdf = degree_cdf(m, n)
    rows = [sample_directed_rows(m, n, 1, rng, row=i, cdf=cdf)[0] for i in range(n)]
    return DirectedGraph(np.stack(rows), m.allow_diagonal)


def estimate_directed_edge(m: ModelSpec, n: int, samples: int, seed: int,
                           chain: int = 0) -> tuple[SampleEstimate, SampleEstimate]:
    """Monte Carlo P(X_12=1) and P(X_12=X_13=1) from exact directed samples.

    Rows of a sample are independent, so only row 1 of each sample is drawn.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = rng_stream(seed, chain)
    cdf = degree_cdf(m, n)
    j = 2 if n >= 3 else 0
    edge = np.empty(samples)
    joint = np.empty(samples)
    # fixed-size blocks keep memory at O(_BLOCK * n) whatever the budget
    for start in range(0, samples, _BLOCK):
        size = min(_BLOCK, samples - start)
        rows = sample_directed_rows(m, n, size, rng, row=0, cdf=cdf)
        edge[start:start + size] = rows[:, 1]
        joint[start:start + size] = rows[:, 1] & rows[:, j]
    out = []
    for series in (edge, joint):
        mean, se = batch_means(series)
        out.append(SampleEstimate(mean, se, samples, 0, 1, int(seed)))
    return out[0], out[1]
