"""Strongly connected components from the left fixed space of a random walk.

A small graph with three cycles chained together plus a dangling node.  The
spectral peeling finds the sink components first, then removes them and
repeats; Tarjan's algorithm gives the same partition by depth-first search.
"""
import numpy as np

from aas.digraph import DirectedGraph, condensation, scc_spectral, scc_tarjan
from aas.structural import select_anchors

edges = [
    (0, 1), (1, 2), (2, 0),          # cycle A
    (2, 3),                          # A feeds B
    (3, 4), (4, 5), (5, 3), (4, 3),  # cycle B with a chord
    (5, 6), (6, 7), (7, 6),          # B feeds the 2-cycle C
    (8, 0),                          # a source node pointing into A
]
g = DirectedGraph(9, edges)

d = scc_spectral(g)
print("peel round  component  centrality")
for comp, rnd in zip(d.components, d.peel_order):
    print(f"{rnd:>10}  {str(comp):<10} {np.round(d.centrality[comp], 3)}")

assert d.as_partition() == scc_tarjan(g).as_partition()
print("\nTarjan agrees on the partition.")

cg = condensation(g, d)
print("condensation edges (component index -> component index):", sorted(cg.dag_edges))
print("topological order of components:", cg.topological_order())

# The chord 4 -> 3 lifts nodes 3 and 4 above node 5 inside cycle B.
print("anchors at theta=0.4:", select_anchors(d, 0.4))
