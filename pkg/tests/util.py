"""Shared builders for the test suite."""

import numpy as np

from cdsim.graph import Graph, erdos_renyi_graph


TWO_TRIANGLE_EDGES = """\
# two 3-cliques bridged by 1-4
0 1
0 2
1 2
3 4
3 5
4 5
1 4
"""


def example1_graph():
    """Node 0 with five unit-weight neighbors, matching the worked
    two-vs-three neighborhood: neighbors 1,2 play +1 and 3,4,5 play -1."""
    m = np.zeros((6, 6))
    for j in range(1, 6):
        m[0, j] = 1.0
        m[j, 0] = 1.0
    return Graph(m)


def example1_profile():
    return np.array([-1, 1, 1, -1, -1, -1], dtype=np.int8)


def village_graph(n_groups=12, size=6):
    """Two-level synthetic village: cliques of ``size`` households, each
    joined to a group leader, leaders wired in a ring.  Leaders carry the
    highest eigenvector centrality by construction."""
    n = n_groups * (size + 1)
    m = np.zeros((n, n))
    for c in range(n_groups):
        base = c * size
        for i in range(size):
            for j in range(i + 1, size):
                m[base + i, base + j] = m[base + j, base + i] = 1.0
    lead0 = n_groups * size
    for c in range(n_groups):
        leader = lead0 + c
        base = c * size
        for i in range(size):
            m[leader, base + i] = m[base + i, leader] = 1.0
        nxt = lead0 + (c + 1) % n_groups
        m[leader, nxt] = m[nxt, leader] = 1.0
    return Graph(m)


def random_connected_graph(n, p, seed):
    """Connected symmetric G(n, p); bumps p if the first draws disconnect."""
    rng = np.random.Generator(np.random.PCG64(seed))
    prob = p
    for _ in range(50):
        g = erdos_renyi_graph(n, prob, rng)
        if g.undirected_connected() and np.all(g.matrix.sum(axis=1) > 0):
            return g
    raise RuntimeError(f"no connected graph found for n={n}, p={p}")
