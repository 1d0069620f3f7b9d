"""Parameter schedules, model specifications and Hamiltonians.

A model multiplies base parameters ``beta_p`` by a divergence rate
``alpha_n`` (or a per-statistic rate ``alpha_{n,p}``). The Gibbs weight of a
graph is ``exp(n^2 * sum_p beta_p * alpha_n * t_p(G))``.

Config files are TOML::

    flavor = "directed-stars"
    statistics = [1, 2]
    beta = [-1.0, -1.0]
    allow_diagonal = true
    schedule = { kind = "log", coeff = 2.0 }
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import tomli_w

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .graph_core import (
    DirectedGraph,
    GraphState,
    SubgraphSpec,
    fast_hom_count,
    star_hom_count,
)

UNDIRECTED = "undirected-subgraphs"
DIRECTED = "directed-stars"
SCHEDULE_KINDS = ("constant", "log", "power", "linear", "table")


@dataclass(frozen=True)
class ParamSchedule:
    """Divergence rate alpha_n as a function of n.

    kinds: constant -> c, log -> c ln n, power -> c n^gamma, linear -> c n,
    table -> exact lookup. ``per_term`` holds one schedule per statistic and,
    when given, overrides the shared rate.
    """

    kind: str = "constant"
    coeff: float = 1.0
    exponent: float | None = None
    table: tuple[tuple[float, float], ...] | None = None
    per_term: tuple[ParamSchedule, ...] | None = None

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ConfigError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "power":
            if self.exponent is None or not 0 < self.exponent < 1:
                raise ConfigError("power schedule needs 0 < exponent < 1")
        if self.kind == "table":
            if not self.table:
                raise ConfigError("table schedule needs a non-empty table")
            object.__setattr__(
                self, "table", tuple((float(a), float(b)) for a, b in self.table))
        if self.per_term is not None:
            object.__setattr__(self, "per_term", tuple(self.per_term))
        object.__setattr__(self, "coeff", float(self.coeff))

    def __call__(self, n: float) -> float:
        n = float(n)
        if self.kind == "constant":
            return self.coeff
        if self.kind == "log":
            return self.coeff * math.log(n)
        if self.kind == "power":
            return self.coeff * n ** self.exponent
        if self.kind == "linear":
            return self.coeff * n
        for key, val in self.table:
            if key == n:
                return val
        raise ConfigError(f"schedule table has no entry for n={n:g}")

    def term_rates(self, n: float, k: int) -> list[float]:
        """Rates alpha_{n,p} for each of k statistics."""
        if self.per_term is None:
            return [self(n)] * k
        if len(self.per_term) != k:
            raise ConfigError(
                f"per_term has {len(self.per_term)} schedules for {k} statistics")
        return [s(n) for s in self.per_term]

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "coeff": self.coeff}
        if self.exponent is not None:
            d["exponent"] = float(self.exponent)
        if self.table is not None:
            d["table"] = [list(r) for r in self.table]
        if self.per_term is not None:
            d["per_term"] = [s.to_dict() for s in self.per_term]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ParamSchedule:
        unknown = set(d) - {"kind", "coeff", "exponent", "table", "per_term"}
        if unknown:
            raise ConfigError(f"unknown schedule keys {sorted(unknown)}")
        per = d.get("per_term")
        return cls(
            kind=d.get("kind", "constant"),
            coeff=float(d.get("coeff", 1.0)),
            exponent=None if d.get("exponent") is None else float(d["exponent"]),
            table=None if d.get("table") is None else tuple(tuple(r) for r in d["table"]),
            per_term=None if per is None else tuple(cls.from_dict(s) for s in per),
        )


@dataclass(frozen=True)
class ModelSpec:
    flavor: str
    statistics: tuple
    beta: tuple[float, ...]
    schedule: ParamSchedule = field(default_factory=ParamSchedule)
    allow_diagonal: bool = True

    def __post_init__(self):
        if self.flavor not in (UNDIRECTED, DIRECTED):
            raise ConfigError(f"unknown flavor {self.flavor!r}")
        stats = tuple(self.statistics)
        if self.flavor == UNDIRECTED:
            if not all(isinstance(s, SubgraphSpec) for s in stats):
                raise ConfigError("undirected statistics must be SubgraphSpec")
        else:
            conv = []
            for s in stats:
                if isinstance(s, SubgraphSpec):
                    p = s.star_order()
                    if p is None:
                        raise ConfigError("directed statistics must be stars")
                    s = p
                if int(s) < 1:
                    raise ConfigError("star orders must be >= 1")
                conv.append(int(s))
            stats = tuple(conv)
        beta = tuple(float(b) for b in self.beta)
        if len(beta) != len(stats) or not stats:
            raise ConfigError("beta and statistics must be non-empty and equal length")
        object.__setattr__(self, "statistics", stats)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "allow_diagonal", bool(self.allow_diagonal))

    @classmethod
    def undirected(cls, statistics, beta, schedule=None) -> ModelSpec:
        stats = [SubgraphSpec.parse(s) if isinstance(s, str) else s for s in statistics]
        return cls(UNDIRECTED, tuple(stats), tuple(beta), schedule or ParamSchedule())

    @classmethod
    def directed(cls, stars, beta, schedule=None, allow_diagonal=True) -> ModelSpec:
        return cls(DIRECTED, tuple(stars), tuple(beta),
                   schedule or ParamSchedule(), allow_diagonal)

    @property
    def k(self) -> int:
        return len(self.statistics)

    @property
    def directed_flavor(self) -> bool:
        return self.flavor == DIRECTED

    def star_orders(self) -> list[int | None]:
        if self.directed_flavor:
            return list(self.statistics)
        return [s.star_order() for s in self.statistics]

    def vertex_counts(self) -> list[int]:
        if self.directed_flavor:
            return [p + 1 for p in self.statistics]
        return [s.vertex_count for s in self.statistics]

    def require_edge_first(self) -> None:
        """Theorem checks need the first statistic to be the single edge."""
        first = self.statistics[0]
        ok = first == 1 if self.directed_flavor else first.is_edge()
        if not ok:
            raise ConfigError("the first statistic must be the single edge")

    def edge_star_order(self) -> int:
        """For an edge-p-star model (undirected), return p."""
        self.require_edge_first()
        orders = self.star_orders()
        if self.k != 2 or orders[1] is None or orders[1] < 2:
            raise ConfigError("expected an edge-p-star model with p >= 2")
        return orders[1]

    def with_beta(self, beta) -> ModelSpec:
        return ModelSpec(self.flavor, self.statistics, tuple(beta),
                         self.schedule, self.allow_diagonal)

    def with_schedule(self, schedule: ParamSchedule) -> ModelSpec:
        return ModelSpec(self.flavor, self.statistics, self.beta,
                         schedule, self.allow_diagonal)

    # -- config ----------------------------------------------------------------
    def to_config(self) -> dict:
        if self.directed_flavor:
            stats = list(self.statistics)
        else:
            stats = [s.to_text() for s in self.statistics]
        return {
            "flavor": self.flavor,
            "statistics": stats,
            "beta": list(self.beta),
            "allow_diagonal": self.allow_diagonal,
            "schedule": self.schedule.to_dict(),
        }

    @classmethod
    def from_config(cls, d: dict) -> ModelSpec:
        unknown = set(d) - {"flavor", "statistics", "beta", "schedule", "allow_diagonal"}
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        try:
            flavor = d["flavor"]
            raw = d["statistics"]
            beta = d["beta"]
        except KeyError as exc:
            raise ConfigError(f"missing config key {exc.args[0]!r}") from None
        stats = []
        for s in raw:
            if isinstance(s, str):
                try:
                    stats.append(SubgraphSpec.parse(s))
                except ValueError as exc:
                    raise ConfigError(str(exc)) from None
            else:
                stats.append(int(s))
        if flavor == UNDIRECTED and any(isinstance(s, int) for s in stats):
            # bare integers mean stars for undirected models too
            stats = [SubgraphSpec.star(s) if isinstance(s, int) else s for s in stats]
        schedule = ParamSchedule.from_dict(d.get("schedule", {}))
        return cls(flavor, tuple(stats), tuple(beta), schedule,
                   bool(d.get("allow_diagonal", True)))


def loads_model(text: str) -> ModelSpec:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"bad config syntax: {exc}") from None
    return ModelSpec.from_config(data)


def dumps_model(m: ModelSpec) -> str:
    return tomli_w.dumps(m.to_config())


def load_model(path) -> ModelSpec:
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())


# ----------------------------------------------------------------------------
# effective parameters and Hamiltonian
# ----------------------------------------------------------------------------

def effective_params(m: ModelSpec, n: float) -> list[float]:
    """beta_p^{(n)} = beta_p * alpha_{n,p}."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rates = m.schedule.term_rates(n, m.k)
    return [b * a for b, a in zip(m.beta, rates)]


def hamiltonian_coefficients(m: ModelSpec, n: int) -> list[float]:
    """Per-statistic multipliers of the integer hom counts in the exponent.

    ``n^2 * beta^{(n)} * hom / n^{v(H)} = beta^{(n)} / n^{v(H)-2} * hom``.
    """
    return [b / float(n) ** (v - 2)
            for b, v in zip(effective_params(m, n), m.vertex_counts())]


def hamiltonian(m: ModelSpec, G: GraphState) -> float:
    """Exponent of the Gibbs weight of G."""
    n = G.n
    if m.directed_flavor != isinstance(G, DirectedGraph):
        raise ValueError(f"graph type does not match flavor {m.flavor}")
    if m.directed_flavor and not m.allow_diagonal and np.any(np.diag(G.matrix)):
        raise ValueError("graph uses diagonal but model forbids it")
    coefs = hamiltonian_coefficients(m, n)
    if m.directed_flavor:
        d = G.degrees()
        homs = [star_hom_count(p, d) for p in m.statistics]
    else:
        homs = [fast_hom_count(H, G) for H in m.statistics]
    return float(sum(c * h for c, h in zip(coefs, homs)))


# ----------------------------------------------------------------------------
# regime diagnostics
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class RegimeReport:
    n: int
    alpha_n: float
    sparse_undirected: tuple[float, float]
    sparse_directed: tuple[float, float]
    lambda_estimate: float
    fast_directed: tuple[float, float]
    all_beta_negative: bool

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha_n": self.alpha_n,
            "sparse_undirected": list(self.sparse_undirected),
            "sparse_directed": list(self.sparse_directed),
            "lambda_estimate": self.lambda_estimate,
            "fast_directed": list(self.fast_directed),
            "all_beta_negative": self.all_beta_negative,
        }


def regime_report(m: ModelSpec, n: float) -> RegimeReport:
    """Quantities appearing in the hypotheses of the limit theorems.

    ``sparse_undirected = (n^2 e^{2 a b1}, a/n)`` should both go to 0;
    ``sparse_directed = (n e^{a b1}, a/n)`` likewise; ``lambda_estimate =
    n e^{a b1}``; ``fast_directed = (a/n, ln 2/|b1|)`` with the first above
    the second in the fast regime. Never raises on sign conventions.
    """
    rates = m.schedule.term_rates(n, m.k)
    a = rates[0]
    b1 = m.beta[0]
    x = a * b1
    lam = math.exp(math.log(n) + x)
    und = math.exp(2 * math.log(n) + 2 * x)
    thresh = math.log(2) / abs(b1) if b1 != 0 else math.inf
    return RegimeReport(
        n=int(n) if float(n).is_integer() else n,
        alpha_n=a,
        sparse_undirected=(und, a / n),
        sparse_directed=(lam, a / n),
        lambda_estimate=lam,
        fast_directed=(a / n, thresh),
        all_beta_negative=all(b < 0 for b in m.beta),
    )


def _decreasing(values: Sequence[float]) -> bool:
    return len(values) < 2 or values[-1] < values[0]


def regime_trends(m: ModelSpec, n_grid: Sequence[float]) -> dict[str, bool]:
    """Check each theorem's hypothesis trend along an n grid.

    A limit-to-zero hypothesis counts as holding when the quantity at the
    last grid point is below its value at the first. The lambda regime holds
    when ``n e^{a b1}`` varies by less than 1% over the grid.
    """
    reps = [regime_report(m, n) for n in n_grid]
    und = [r.sparse_undirected[0] for r in reps]
    dirr = [r.sparse_directed[0] for r in reps]
    ratio = [r.sparse_undirected[1] for r in reps]
    lam = np.array([r.lambda_estimate for r in reps])
    neg = reps[0].all_beta_negative if reps else False
    flags = {
        "all_beta_negative": neg,
        "sparse_undirected": neg and _decreasing(und) and _decreasing(ratio),
        "sparse_directed": neg and _decreasing(dirr) and _decreasing(ratio),
        "lambda_regime": bool(neg and lam.size and lam.min() > 0
                              and (lam.max() - lam.min()) / lam[-1] < 0.01),
        "fast_directed": neg and all(r.fast_directed[0] > r.fast_directed[1] for r in reps),
    }
    if m.schedule.per_term is not None:
        # generalized scaling: alpha_{n,p} / n^{v(H_p)-2} -> 0 (undirected)
        # or alpha_{n,p} / n^{p-1} -> 0 (directed), p >= 2
        ok = True
        for idx in range(1, m.k):
            if m.directed_flavor:
                scale = m.statistics[idx] - 1
            else:
                scale = m.statistics[idx].vertex_count - 2
            vals = [m.schedule.per_term[idx](n) / float(n) ** scale for n in n_grid]
            ok = ok and _decreasing(vals)
        flags["per_term_scaling"] = ok
    return flags
