"""Convergence sweeps for the sparse limit theorems.

Each sweep walks an n grid, evaluates an observed quantity exactly (or by
MCMC where enumeration is out of reach), divides it by the theorem's
predictor and records whether the finite-n hypotheses look satisfied.

============  ===========================================  =====
theorem_id    ratio                                        limit
============  ===========================================  =====
UND_MEAN      P(X_12=1) / e^{2 a b1}                       1
UND_JOINT     P(X_12=X_13=1) / e^{4 a b1}                  1
UND_LOGZ      (log Z_n / n^2) / e^{2 a b1}                 1/2
DIR_MEAN      P(X_12=1) / e^{a b1}                         1
DIR_JOINT     P(X_12=X_13=1) / e^{2 a b1}                  1
DIR_LOGZ      (log Z_n / n^2) / e^{a b1}                   1
DIR_POISSON   P(X_12=1) / (lambda/n), plus TV to Poisson   1
DIR_FAST      P(X_12=1) / e^{n a sum_p b_p n^-p}           1
============  ===========================================  =====
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import poisson

from .errors import ConfigError
from .exact import (
    default_cap,
    directed_rowwise_exact,
    sandwich_bounds,
    undirected_exact,
)
from .model import ModelSpec, effective_params, regime_report, regime_trends
from .sampler import run_chain
from .variational import chatterjee_dembo_bound, er_log_partition_approx, variational_value

THEOREMS = ("UND_MEAN", "UND_JOINT", "UND_LOGZ", "DIR_MEAN", "DIR_JOINT",
            "DIR_LOGZ", "DIR_POISSON", "DIR_FAST")
LIMITS = {t: 1.0 for t in THEOREMS} | {"UND_LOGZ": 0.5}
CSV_HEADER = ("theorem_id", "n", "alpha_n", "observed", "predicted", "ratio",
              "regime_ok", "extra1", "extra2")


@dataclass
class SweepRow:
    n: int
    alpha_n: float
    observed: float
    predicted: float
    ratio: float
    regime_ok: bool
    extra: dict = field(default_factory=dict)


@dataclass
class SweepReport:
    theorem_id: str
    rows: list[SweepRow]
    limit: float
    model: ModelSpec | None = None

    def __post_init__(self):
        self.rows.sort(key=lambda r: r.n)

    @property
    def trend_ok(self) -> bool:
        """|ratio - limit| at the last grid point below that at the first."""
        if len(self.rows) < 2:
            return False
        first, last = self.rows[0].ratio, self.rows[-1].ratio
        return abs(last - self.limit) < abs(first - self.limit)

    @property
    def regime_ok(self) -> list[bool]:
        return [r.regime_ok for r in self.rows]

    def row(self, n: int) -> SweepRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            vals = list(r.extra.values())[:2]
            vals += [math.nan] * (2 - len(vals))
            w.writerow([self.theorem_id, r.n, _fmt(r.alpha_n), _fmt(r.observed),
                        _fmt(r.predicted), _fmt(r.ratio),
                        "true" if r.regime_ok else "false", _fmt(vals[0]), _fmt(vals[1])])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "limit": self.limit,
            "trend_ok": self.trend_ok,
            "rows": [
                {"theorem_id": self.theorem_id, "n": r.n, "alpha_n": r.alpha_n,
                 "observed": r.observed, "predicted": r.predicted, "ratio": r.ratio,
                 "regime_ok": r.regime_ok, "extra": r.extra}
                for r in self.rows
            ],
            "model_echo": None if self.model is None else self.model.to_config(),
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2, sort_keys=False)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _grid(n_grid: Sequence[int]) -> list[int]:
    g = [int(n) for n in n_grid]
    if not g or any(b <= a for a, b in zip(g, g[1:])) or g[0] < 2:
        raise ConfigError("n_grid must be strictly increasing integers >= 2")
    return g


def _negative(m: ModelSpec) -> bool:
    return all(b < 0 for b in m.beta)


# ----------------------------------------------------------------------------
# undirected sweeps
# ----------------------------------------------------------------------------

def _undirected_regime(m: ModelSpec, n: int) -> bool:
    r = regime_report(m, n)
    und, a_over_n = r.sparse_undirected
    return _negative(m) and und < 1 and a_over_n < 1


def _undirected_marginal(m, n, method, threads, mcmc):
    """(p_edge, p_joint, info) from enumeration when possible, else MCMC."""
    if method not in ("exact", "mcmc"):
        raise ConfigError(f"unknown method {method!r}")
    if method == "exact" and n <= default_cap(m):
        r = undirected_exact(m, n, threads=threads)
        return r.p_edge, r.p_joint, {"method": "enumeration"}
    opts = {"burn_in": 10_000, "samples": 20_000, "thin": 10, "seed": 0}
    opts.update(mcmc or {})
    edge, joint = run_chain(m, n, opts["burn_in"], opts["samples"], opts["thin"], opts["seed"])
    return edge.mean, joint.mean, {"method": "mcmc", "edge_stderr": edge.stderr,
                                   "joint_stderr": joint.stderr}


def _sandwich_or_none(m, n):
    try:
        return sandwich_bounds(m, n)
    except ConfigError:
        return None


def sweep_undirected_mean(m: ModelSpec, n_grid, method: str = "exact", *,
                          threads: int = 1, mcmc: dict | None = None) -> SweepReport:
    """P(X_12 = 1) / e^{2 a b1} along the grid, with sandwich bounds in extra."""
    m.require_edge_first()
    rows = []
    for n in _grid(n_grid):
        b1 = effective_params(m, n)[0]
        p_edge, _, info = _undirected_marginal(m, n, method, threads, mcmc)
        pred = math.exp(2 * b1)
        sb = _sandwich_or_none(m, n)
        extra = {"lower": sb.lower if sb else math.nan,
                 "upper": sb.upper if sb else math.nan}
        if info["method"] == "mcmc":
            extra["ratio_stderr"] = info["edge_stderr"] / pred
        extra["method"] = info["method"]
        rows.append(SweepRow(n, regime_report(m, n).alpha_n, p_edge, pred, p_edge / pred,
                             _undirected_regime(m, n), extra))
    return SweepReport("UND_MEAN", rows, LIMITS["UND_MEAN"], m)


def sweep_undirected_joint(m: ModelSpec, n_grid, method: str = "exact", *,
                           threads: int = 1, mcmc: dict | None = None) -> SweepReport:
    """P(X_12 = X_13 = 1) / e^{4 a b1} along the grid."""
    m.require_edge_first()
    rows = []
    for n in _grid(n_grid):
        if n < 3:
            raise ConfigError("joint sweep needs n >= 3")
        b1 = effective_params(m, n)[0]
        _, p_joint, info = _undirected_marginal(m, n, method, threads, mcmc)
        pred = math.exp(4 * b1)
        sb = _sandwich_or_none(m, n)
        extra = {"lower2": sb.lower2 if sb else math.nan,
                 "upper2": sb.upper2 if sb else math.nan}
        if info["method"] == "mcmc":
            extra["ratio_stderr"] = info["joint_stderr"] / pred
        extra["method"] = info["method"]
        rows.append(SweepRow(n, regime_report(m, n).alpha_n, p_joint, pred, p_joint / pred,
                             _undirected_regime(m, n), extra))
    return SweepReport("UND_JOINT", rows, LIMITS["UND_JOINT"], m)


def sweep_undirected_logz(m: ModelSpec, n_grid, *, threads: int = 1,
                          exact_up_to: int | None = None) -> SweepReport:
    """(log Z_n / n^2) / e^{2 a b1} for the edge-p-star model.

    Exact log Z is used where enumeration is possible; beyond that the
    observed column is the scalar free energy L_n. extra carries the L_n
    ratio, the Erdos-Renyi ratio and (indicative only) the free-energy gap
    bracket with unit constants.
    """
    p = m.edge_star_order()
    cap = default_cap(m) if exact_up_to is None else exact_up_to
    rows = []
    for n in _grid(n_grid):
        alphas = m.schedule.term_rates(n, 2)
        if alphas[0] != alphas[1]:
            raise ConfigError("UND_LOGZ needs a shared schedule for both terms")
        a = alphas[0]
        b1, b2 = m.beta
        pred = math.exp(2 * a * b1)
        var = variational_value(b1, b2, p, a)
        er = er_log_partition_approx(a, b1)
        extra = {"Ln_ratio": var.ratio_Ln, "er_ratio": er / pred, "L_n": var.L_n,
                 "er_approx": er, "n2_L_n": n * n * var.L_n, "n2_er": n * n * er}
        if n <= cap:
            lz = undirected_exact(m, n, threads=threads).log_Z
            observed = lz / (n * n)
            lo, up = chatterjee_dembo_bound(a * (abs(b1) + abs(b2)), n)
            extra.update(log_Z=lz, gap=observed - var.L_n, gap_lower=lo, gap_upper=up,
                         gap_inside=bool(lo <= observed - var.L_n <= up))
            extra["source"] = "enumeration"
        else:
            observed = var.L_n
            extra["source"] = "variational"
        rows.append(SweepRow(n, a, observed, pred, observed / pred, _negative(m), extra))
    return SweepReport("UND_LOGZ", rows, LIMITS["UND_LOGZ"], m)


# ----------------------------------------------------------------------------
# directed sweeps
# ----------------------------------------------------------------------------

def _directed_regime(m: ModelSpec, n: int) -> bool:
    r = regime_report(m, n)
    lam, a_over_n = r.sparse_directed
    return _negative(m) and lam < 1 and a_over_n < 1


def _require_directed(m: ModelSpec) -> None:
    if not m.directed_flavor:
        raise ConfigError("directed sweep needs a directed-stars model")
    m.require_edge_first()


def sweep_directed_mean(m: ModelSpec, n_grid) -> SweepReport:
    _require_directed(m)
    rows = []
    for n in _grid(n_grid):
        b1 = effective_params(m, n)[0]
        r = directed_rowwise_exact(m, n)
        rows.append(SweepRow(n, regime_report(m, n).alpha_n, r.p_edge, math.exp(b1),
                             math.exp(r.log_p_edge - b1), _directed_regime(m, n),
                             {"log_ratio": r.log_p_edge - b1}))
    return SweepReport("DIR_MEAN", rows, LIMITS["DIR_MEAN"], m)


def sweep_directed_joint(m: ModelSpec, n_grid) -> SweepReport:
    _require_directed(m)
    rows = []
    for n in _grid(n_grid):
        b1 = effective_params(m, n)[0]
        r = directed_rowwise_exact(m, n)
        rows.append(SweepRow(n, regime_report(m, n).alpha_n, r.p_joint, math.exp(2 * b1),
                             math.exp(r.log_p_joint - 2 * b1), _directed_regime(m, n),
                             {"log_ratio": r.log_p_joint - 2 * b1}))
    return SweepReport("DIR_JOINT", rows, LIMITS["DIR_JOINT"], m)


def sweep_directed_logz(m: ModelSpec, n_grid) -> SweepReport:
    """log Z_n / (n^2 e^{a b1}); extra has Z^{1/n^2} and Z^{1/n}."""
    _require_directed(m)
    rows = []
    for n in _grid(n_grid):
        b1 = effective_params(m, n)[0]
        r = directed_rowwise_exact(m, n)
        observed = r.log_Z / (n * n)
        rows.append(SweepRow(n, regime_report(m, n).alpha_n, observed, math.exp(b1),
                             observed * math.exp(-b1), _directed_regime(m, n),
                             {"Z_pow_inv_n2": math.exp(observed),
                              "Z_pow_inv_n": math.exp(r.log_Z / n)}))
    return SweepReport("DIR_LOGZ", rows, LIMITS["DIR_LOGZ"], m)


def poisson_tv(degree_law, lam: float) -> tuple[float, float]:
    """TV distance between a law on 0..N and Poisson(lam) cut at N.

    Returns ``(tv, tail)`` where ``tail = P(Poisson > N)`` is reported
    separately and left out of the distance.
    """
    law = np.asarray(degree_law, dtype=float)
    k = np.arange(law.size)
    pmf = poisson.pmf(k, lam)
    tail = float(poisson.sf(law.size - 1, lam))
    return 0.5 * float(np.abs(law - pmf).sum()), tail


def sweep_poisson(m: ModelSpec, n_grid) -> SweepReport:
    """Degree law vs Poisson(lambda) with lambda = n e^{a b1} at the last n.

    ratio is P(X_12 = 1) / (lambda/n); extra holds the TV distance, the
    joint ratio P(X_12 = X_13 = 1) / (lambda/n)^2 and the truncated tail.
    """
    _require_directed(m)
    grid = _grid(n_grid)
    lam = regime_report(m, grid[-1]).lambda_estimate
    lam_range = [regime_report(m, n).lambda_estimate for n in grid]
    rows = []
    for n, lam_n in zip(grid, lam_range):
        r = directed_rowwise_exact(m, n)
        tv, tail = poisson_tv(r.degree_law, lam)
        pred = lam / n
        ok = _negative(m) and abs(lam_n - lam) / lam < 0.01
        rows.append(SweepRow(n, regime_report(m, n).alpha_n, r.p_edge, pred, r.p_edge / pred,
                             ok, {"tv": tv, "joint_ratio": r.p_joint / pred ** 2,
                                  "poisson_tail": tail, "lambda": lam,
                                  "lambda_n": lam_n}))
    return SweepReport("DIR_POISSON", rows, LIMITS["DIR_POISSON"], m)


def sweep_fast(m: ModelSpec, n_grid) -> SweepReport:
    """P(X_12=1) / exp(n sum_p beta_p^{(n)} n^{-p}) in the alpha_n ~ n regime."""
    _require_directed(m)
    rows = []
    for n in _grid(n_grid):
        beta = effective_params(m, n)
        log_pred = n * sum(b * float(n) ** -p for b, p in zip(beta, m.statistics))
        r = directed_rowwise_exact(m, n)
        rep = regime_report(m, n)
        ok = _negative(m) and rep.fast_directed[0] > rep.fast_directed[1]
        rows.append(SweepRow(n, rep.alpha_n, r.p_edge, math.exp(log_pred),
                             math.exp(r.log_p_edge - log_pred), ok,
                             {"alpha_over_n": rep.fast_directed[0],
                              "threshold": rep.fast_directed[1],
                              "log_ratio": r.log_p_edge - log_pred}))
    return SweepReport("DIR_FAST", rows, LIMITS["DIR_FAST"], m)


def run_sweep(theorem_id: str, m: ModelSpec, n_grid, method: str = "exact", *,
              threads: int = 1, mcmc: dict | None = None) -> SweepReport:
    """Dispatch a sweep by theorem id."""
    tid = theorem_id.upper()
    if tid == "UND_MEAN":
        return sweep_undirected_mean(m, n_grid, method, threads=threads, mcmc=mcmc)
    if tid == "UND_JOINT":
        return sweep_undirected_joint(m, n_grid, method, threads=threads, mcmc=mcmc)
    if tid == "UND_LOGZ":
        return sweep_undirected_logz(m, n_grid, threads=threads)
    table = {"DIR_MEAN": sweep_directed_mean, "DIR_JOINT": sweep_directed_joint,
             "DIR_LOGZ": sweep_directed_logz, "DIR_POISSON": sweep_poisson,
             "DIR_FAST": sweep_fast}
    if tid not in table:
        raise ConfigError(f"unknown theorem id {theorem_id!r}")
    return table[tid](m, n_grid)


__all__ = [
    "SweepReport", "SweepRow", "THEOREMS", "LIMITS", "CSV_HEADER", "poisson_tv",
    "regime_trends", "run_sweep", "sweep_undirected_mean", "sweep_undirected_joint",
    "sweep_undirected_logz", "sweep_directed_mean", "sweep_directed_joint",
    "sweep_directed_logz", "sweep_poisson", "sweep_fast",
]
