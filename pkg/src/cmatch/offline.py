"""Exact offline optima on realized graphs.

These supply the denominators for empirical competitive ratios: a maximum
cardinality matching, and its capacitated generalization where offline
vertex u may absorb up to omega_u matches. Balancing-vertex edges are
excluded and parallel edges collapsed first; a matching can use each vertex
pair at most once, so multiplicity never helps the optimum.

Both solvers are exact integer routines from scipy.sparse.csgraph
(augmenting-path bipartite matching, max flow); small-instance brute-force
oracles in the test suite pin their correctness independently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching, maximum_flow

from .stream import Multigraph

AUGMENTING_PATHS = "augmenting_paths"
MAX_FLOW = "max_flow"


@dataclass(frozen=True)
class OptResult:
    """Size of an optimal (b-)matching and the method that produced it."""

    size: int
    method: str


def _distinct_real_edges(graph: Multigraph) -> list:
    return sorted(set(graph.real_edges()))


def max_matching(graph: Multigraph) -> OptResult:
    """Exact maximum-cardinality matching between real vertices."""
    edges = _distinct_real_edges(graph)
    if not edges:
        return OptResult(size=0, method=AUGMENTING_PATHS)
    vs, us = zip(*edges)
    bi = csr_matrix((np.ones(len(edges), dtype=np.int8), (vs, us)),
                    shape=(graph.n_arrivals, graph.n_offline))
    perm = maximum_bipartite_matching(bi, perm_type="column")
    return OptResult(size=int(np.count_nonzero(perm >= 0)),
                     method=AUGMENTING_PATHS)


def max_b_matching(graph: Multigraph, capacities) -> OptResult:
    """Exact optimum when offline vertex u may be matched capacities[u]
    times: max flow on source -> u (cap omega_u) -> v (cap 1) -> sink."""
    caps = np.asarray(capacities, dtype=np.int64)
    if len(caps) != graph.n_offline:
        raise ValueError(f"capacity array has length {len(caps)}, "
                         f"expected {graph.n_offline}")
    if np.any(caps < 0):
        raise ValueError("capacities must be nonnegative")
    edges = _distinct_real_edges(graph)
    if not edges:
        return OptResult(size=0, method=MAX_FLOW)
    n, t = graph.n_offline, graph.n_arrivals
    source, sink = 0, 1 + n + t
    rows, cols, data = [], [], []
    for u in range(n):
        if caps[u] > 0:
            rows.append(source)
            cols.append(1 + u)
            data.append(int(caps[u]))
    for v, u in edges:
        rows.append(1 + u)
        cols.append(1 + n + v)
        data.append(1)
    for v in range(t):
        rows.append(1 + n + v)
        cols.append(sink)
        data.append(1)
    net = csr_matrix((np.asarray(data, dtype=np.int32), (rows, cols)),
                     shape=(n + t + 2, n + t + 2))
    value = maximum_flow(net, source, sink).flow_value
    return OptResult(size=int(value), method=MAX_FLOW)
