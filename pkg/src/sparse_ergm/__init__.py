"""Exact, variational and Monte Carlo tools for sparse exponential random graphs."""
from .errors import CapExceeded, ConfigError, NumericalDefect
from .graph_core import (
    DirectedGraph,
    SubgraphSpec,
    UndirectedGraph,
    directed_star_density,
    edge_flip_delta,
    hom_count,
    hom_density,
    star_density_undirected,
    weighted_hom_density,
)
from .model import (
    ModelSpec,
    ParamSchedule,
    RegimeReport,
    dumps_model,
    effective_params,
    hamiltonian,
    load_model,
    loads_model,
    regime_report,
    regime_trends,
)
from .exact import (
    ExactResult,
    SandwichBounds,
    directed_bruteforce_exact,
    directed_rowwise_exact,
    sandwich_bounds,
    undirected_exact,
)
from .variational import (
    BoundParams,
    VariationalResult,
    chatterjee_dembo_bound,
    entropy_I,
    er_log_partition_approx,
    solve_fixed_point,
    variational_value,
)
from .sampler import (
    SampleEstimate,
    directed_direct_sample,
    estimate_directed_edge,
    glauber_step,
    run_chain,
)
from .asymptotics import SweepReport, run_sweep

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "ConfigError",
    "NumericalDefect",
    "DirectedGraph",
    "SubgraphSpec",
    "UndirectedGraph",
    "directed_star_density",
    "edge_flip_delta",
    "hom_count",
    "hom_density",
    "star_density_undirected",
    "weighted_hom_density",
    "ModelSpec",
    "ParamSchedule",
    "RegimeReport",
    "dumps_model",
    "effective_params",
    "hamiltonian",
    "load_model",
    "loads_model",
    "regime_report",
    "regime_trends",
    "ExactResult",
    "SandwichBounds",
    "directed_bruteforce_exact",
    "directed_rowwise_exact",
    "sandwich_bounds",
    "undirected_exact",
    "BoundParams",
    "VariationalResult",
    "chatterjee_dembo_bound",
    "entropy_I",
    "er_log_partition_approx",
    "solve_fixed_point",
    "variational_value",
    "SampleEstimate",
    "directed_direct_sample",
    "estimate_directed_edge",
    "glauber_step",
    "run_chain",
    "SweepReport",
    "run_sweep",
]
