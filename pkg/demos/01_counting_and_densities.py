"""
Homomorphism densities on small graphs
======================================

Densities count every vertex map, including the ones that fold a subgraph
onto fewer vertices. That is why a single edge on three vertices already
carries some 2-star density.
"""
import numpy as np

from sparse_ergm import SubgraphSpec, UndirectedGraph, hom_count, hom_density, weighted_hom_density

g = UndirectedGraph.from_edges(3, [(0, 1)])
two_star = SubgraphSpec.star(2)
print("hom(2-star, single edge) =", hom_count(two_star, g))       # 2 folded maps
print("t(2-star, single edge)   =", hom_density(two_star, g))     # 2 / 27

# The same count on a weighted graph: replace 0/1 entries with probabilities.
x = np.full((3, 3), 0.5)
np.fill_diagonal(x, 0.0)
print("t(2-star, W = 1/2)       =", weighted_hom_density(two_star, x))  # 1 / 9

# Any connected pattern can be written in the 1-based text form.
c4 = SubgraphSpec.parse("subgraph:4;1-2,2-3,3-4,4-1")
k4 = UndirectedGraph.complete(4)
print("hom(C4, K4)              =", hom_count(c4, k4))
