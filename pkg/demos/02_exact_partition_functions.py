"""
Exact partition functions by enumeration
========================================

Undirected models are summed over all 2^(n choose 2) graphs, so n stops at
7. Directed star models factor over rows and go to n in the millions.
"""
import math

from sparse_ergm import ModelSpec, ParamSchedule, directed_rowwise_exact, undirected_exact

# Edge-only: every pair is an independent coin with log-odds 2*alpha*beta_1.
edge = ModelSpec.undirected(["star:1"], [-1.0], ParamSchedule("constant", 1.0))
r = undirected_exact(edge, 5)
print(f"edge-only n=5   p_edge={r.p_edge:.12f}  logistic(-2)={1 / (1 + math.exp(2)):.12f}")

# Edge + 2-star with a log schedule: compare with the sparse prediction.
es = ModelSpec.undirected(["star:1", "star:2"], [-1.0, -1.0], ParamSchedule("log", 1.5))
for n in (4, 5, 6, 7):
    r = undirected_exact(es, n)
    print(f"edge+2-star n={n}  p_edge={r.p_edge:.6e}  ratio to n^-3={r.p_edge * n ** 3:.4f}")

# Directed stars: the rowwise path handles large n in a fraction of a second.
d = ModelSpec.directed([1, 2], [-1.0, -1.0], ParamSchedule("log", 2.0))
for n in (10 ** 2, 10 ** 4, 10 ** 6):
    r = directed_rowwise_exact(d, n)
    print(f"directed n={n:>7}  p_edge*n^2={r.p_edge * n * n:.6f}  log Z={r.log_Z:.6f}")
