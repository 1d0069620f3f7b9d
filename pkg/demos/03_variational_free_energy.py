"""
The scalar free energy
======================

For edge-p-star models the log partition function per n^2 is close to a
one-dimensional maximisation. In the sparse regime its value divided by the
edge probability approaches one half.
"""
import math

from sparse_ergm import chatterjee_dembo_bound, er_log_partition_approx, variational_value

for n in (10 ** 2, 10 ** 4, 10 ** 6):
    alpha = math.log(n)
    res = variational_value(-1.0, -1.0, 2, alpha)
    er = er_log_partition_approx(alpha, -1.0)
    print(f"n={n:>8}  x*={res.x_star:.3e}  L_n/e^(2ab1)={res.ratio_Ln:.8f}"
          f"  ER/e^(2ab1)={er / math.exp(-2 * alpha):.8f}")

# The gap bracket carries unspecified constants; with c = C = 1 it only
# starts shrinking once n is very large.
for n in (1e2, 1e4, 1e8, 1e40):
    lo, up = chatterjee_dembo_bound(2 * math.log(n), n)
    print(f"n={n:8.0e}  gap in [{lo:.3e}, {up:.3e}]")
