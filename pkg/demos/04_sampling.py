"""
Sampling: Glauber chains and exact directed draws
=================================================

Undirected chains resample one pair at a time from its conditional law.
Directed star models need no chain at all, since rows are independent.
"""
from sparse_ergm import (
    ModelSpec,
    ParamSchedule,
    directed_rowwise_exact,
    estimate_directed_edge,
    run_chain,
    undirected_exact,
)

m = ModelSpec.undirected(["star:1", "star:2"], [-1.0, -1.0], ParamSchedule("constant", 1.0))
edge, joint = run_chain(m, 6, burn_in=5_000, samples=20_000, thin=10, seed=7)
ex = undirected_exact(m, 6)
print(f"glauber  p_edge={edge.mean:.4f} +- {edge.stderr:.4f}   exact={ex.p_edge:.4f}")
print(f"glauber  p_joint={joint.mean:.4f} +- {joint.stderr:.4f}  exact={ex.p_joint:.4f}")

d = ModelSpec.directed([1, 2], [-1.0, -1.0], ParamSchedule("log", 1.0))
for n in (10, 100):
    est, _ = estimate_directed_edge(d, n, 200_000, seed=n)
    print(f"direct n={n:>3}  p_edge={est.mean:.5f} +- {est.stderr:.5f}"
          f"  exact={directed_rowwise_exact(d, n).p_edge:.5f}")
