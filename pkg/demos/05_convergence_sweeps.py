"""
Convergence sweeps
==================

Each sweep divides an exact finite-n quantity by its large-n prediction.
The last column of each table should drift toward the stated limit.
"""
from sparse_ergm import ModelSpec, ParamSchedule, run_sweep

slow = ModelSpec.directed([1, 2], [-1.0, -1.0], ParamSchedule("log", 2.0))
lam = ModelSpec.directed([1, 2], [-1.0, -1.0], ParamSchedule("log", 1.0))
fast = ModelSpec.directed([1, 2], [-1.0, -1.0], ParamSchedule("linear", 1.0))
und = ModelSpec.undirected(["star:1", "star:2"], [-1.0, -1.0], ParamSchedule("log", 1.5))

jobs = [
    ("UND_MEAN", und, [4, 5, 6, 7]),
    ("DIR_MEAN", slow, [10 ** 2, 10 ** 3, 10 ** 4]),
    ("DIR_JOINT", slow, [10 ** 2, 10 ** 3, 10 ** 4]),
    ("DIR_LOGZ", slow, [10 ** 2, 10 ** 3, 10 ** 4]),
    ("DIR_POISSON", lam, [250, 500, 1000, 2000]),
    ("DIR_FAST", fast, [10, 20, 50]),
]
for tid, model, grid in jobs:
    rep = run_sweep(tid, model, grid)
    print(f"{tid}  (limit {rep.limit})")
    for row in rep.rows:
        tv = f"  tv={row.extra['tv']:.4f}" if "tv" in row.extra else ""
        print(f"   n={row.n:>6}  ratio={row.ratio:.6f}{tv}")
    print(f"   trend_ok={rep.trend_ok}")

# The CSV form is what the command line tool writes.
print(run_sweep("DIR_MEAN", slow, [100, 10000]).to_csv())
