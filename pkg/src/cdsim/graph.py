"""Static weighted directed graphs: construction, normalization, centralities.

Everything downstream (payoffs, revision dynamics, opinion averaging) reads
graphs through the dense weight matrix ``Graph.matrix``.  Graphs are immutable
after construction so they can be shared freely across ensemble workers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.sparse import csr_matrix

from .errors import DomainError, IterationError, NormalizationError, ParseError

__all__ = [
    "Graph",
    "load_edge_list",
    "row_normalize",
    "eigenvector_centrality",
    "social_power",
    "is_cohesive",
    "rank_nodes",
    "complete_graph",
    "star_graph",
    "ring_graph",
    "two_triangle_graph",
    "erdos_renyi_graph",
]

_ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Graph:
    """Weighted directed graph over nodes ``0..n-1``.

    ``matrix[i, j]`` is the weight of arc ``i -> j`` (the strength with which
    ``j`` influences ``i``).  ``labels`` keeps the original node names when an
    edge list used non-integer identifiers, in index order.
    """

    matrix: np.ndarray
    row_stochastic: bool = False
    labels: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"weight matrix must be square, got shape {m.shape}")
        if np.any(m < 0):
            raise DomainError("edge weights must be nonnegative")
        if self.row_stochastic:
            sums = m.sum(axis=1)
            if np.any(np.abs(sums - 1.0) > _ROW_SUM_TOL):
                bad = int(np.argmax(np.abs(sums - 1.0)))
                raise DomainError(
                    f"row_stochastic graph has row {bad} summing to {sums[bad]!r}"
                )
        if self.labels is not None and len(self.labels) != m.shape[0]:
            raise DomainError("labels length must equal node count")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def edges(self) -> list[tuple[int, int, float]]:
        """All arcs as ``(source, target, weight)`` triples, row-major order."""
        src, dst = np.nonzero(self.matrix)
        return [(int(i), int(j), float(self.matrix[i, j])) for i, j in zip(src, dst)]

    def out_degrees(self) -> np.ndarray:
        return (self.matrix > 0).sum(axis=1)

    def undirected_connected(self) -> bool:
        sym = csr_matrix(self.matrix + self.matrix.T)
        ncomp, _ = connected_components(sym, directed=False)
        return ncomp == 1


def load_edge_list(
    text: str,
    default_weight: float = 1.0,
    strip_self_loops: bool = True,
    symmetrize: bool = False,
) -> Graph:
    """Parse an edge-list document into a :class:`Graph`.

    Each non-comment line reads ``src dst [weight]`` (whitespace separated,
    ``#`` starts a comment).  When every node id is a nonnegative integer the
    graph spans ``0..max_id``; when none are, the names map to dense indices
    in first-appearance order.  Mixing the two is rejected as malformed.
    Duplicate arcs sum their weights.  ``symmetrize`` adds the reverse of
    every arc, for files that list each undirected edge once.
    """
    raw_edges: list[tuple[str, str, float]] = []
    lines_of: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 'src dst [weight]', got {body!r}", line=lineno)
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise ParseError(f"bad weight {parts[2]!r}", line=lineno) from None
        else:
            w = default_weight
        if not np.isfinite(w) or w < 0:
            raise DomainError(f"line {lineno}: negative or non-finite weight {w!r}")
        raw_edges.append((parts[0], parts[1], w))
        lines_of.append(lineno)

    tokens = [t for s, d, _ in raw_edges for t in (s, d)]
    integer_ids = all(t.isdigit() for t in tokens)
    if not integer_ids and any(t.isdigit() for t in tokens):
        for (s, d, _), lineno in zip(raw_edges, lines_of):
            if s.isdigit() != d.isdigit():
                raise ParseError(f"mixed integer and label node ids ({s!r}, {d!r})",
                                 line=lineno)
        raise ParseError("file mixes integer and label node ids", line=lines_of[0])
    labels: tuple[str, ...] | None = None
    if integer_ids:
        n = max((int(t) for t in tokens), default=-1) + 1
        index = {t: int(t) for t in tokens}
    else:
        order: dict[str, int] = {}
        for t in tokens:
            if t not in order:
                order[t] = len(order)
        index = order
        n = len(order)
        labels = tuple(order)

    if n == 0:
        raise ParseError("edge list contains no edges", line=None)

    m = np.zeros((n, n))
    for s, d, w in raw_edges:
        i, j = index[s], index[d]
        m[i, j] += w
        if symmetrize and i != j:
            m[j, i] += w
    if strip_self_loops:
        np.fill_diagonal(m, 0.0)
    return Graph(m, labels=labels)


def row_normalize(g: Graph) -> Graph:
    """Rescale every out-row to sum to one (makes the matrix stochastic)."""
    sums = g.matrix.sum(axis=1)
    zero = np.nonzero(sums == 0)[0]
    if zero.size:
        raise NormalizationError(f"node {int(zero[0])} has no outgoing weight")
    return Graph(g.matrix / sums[:, None], row_stochastic=True, labels=g.labels)


def eigenvector_centrality(g: Graph, tol: float = 1e-10, max_iter: int = 100_000) -> np.ndarray:
    """Dominant right eigenvector of the weight matrix, normalized to unit sum.

    Power iteration from the uniform vector; the identity shift keeps the
    iteration from oscillating on bipartite structures (same eigenvector).
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if not g.undirected_connected():
        raise DomainError("eigenvector centrality needs a connected graph")
    n = g.n
    v = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        w = g.matrix @ v + v
        w /= w.sum()
        if np.max(np.abs(w - v)) < tol:
            return w
        v = w
    raise IterationError(f"power iteration did not converge in {max_iter} steps")


def _closed_class_count(matrix: np.ndarray) -> tuple[int, int]:
    """Number of strongly connected components with no outgoing arcs."""
    ncomp, comp = connected_components(csr_matrix(matrix), directed=True, connection="strong")
    src, dst = np.nonzero(matrix)
    leaves = set(range(ncomp))
    for i, j in zip(comp[src], comp[dst]):
        if i != j:
            leaves.discard(int(i))
    return len(leaves), ncomp


def social_power(g: Graph) -> np.ndarray:
    """Stationary left eigenvector pi of a row-stochastic matrix.

    pi^T W = pi^T with nonnegative entries summing to one; entry i is the
    weight of node i's initial opinion in the consensus value of the linear
    averaging process.  Requires a globally reachable node, i.e. a unique
    closed strongly connected class.
    """
    if not g.row_stochastic:
        raise DomainError("social power is defined for row-stochastic graphs")
    nclosed, _ = _closed_class_count(g.matrix)
    if nclosed != 1:
        raise DomainError(
            f"no globally reachable node ({nclosed} closed strongly connected classes)"
        )
    n = g.n
    a = g.matrix.T - np.eye(n)
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = np.linalg.solve(a, b)
    pi = np.where(np.abs(pi) < 1e-14, 0.0, pi)
    if np.any(pi < 0):
        raise IterationError("stationary vector solve produced negative entries")
    return pi / pi.sum()


def is_cohesive(g: Graph, nodes, alpha: float, action: int) -> bool:
    """Whether ``nodes`` holds enough internal influence mass to lock ``action``.

    With a stochastic influence matrix, every member must keep at least
    ``1/(2+alpha)`` of its weight inside the set to sustain +1 against any
    outside profile, and at least ``(1+alpha)/(2+alpha)`` to sustain -1.
    """
    if alpha <= -1:
        raise DomainError("alpha must exceed -1")
    if action not in (-1, 1):
        raise DomainError("action must be -1 or +1")
    idx = np.asarray(sorted(set(int(i) for i in nodes)), dtype=np.intp)
    if idx.size == 0:
        raise DomainError("cohesive-set test needs a nonempty node set")
    if idx.min() < 0 or idx.max() >= g.n:
        raise DomainError("node index out of range")
    need = 1.0 / (2.0 + alpha) if action == 1 else (1.0 + alpha) / (2.0 + alpha)
    internal = g.matrix[np.ix_(idx, idx)].sum(axis=1)
    return bool(np.all(internal >= need - 1e-12))


def rank_nodes(g: Graph, method: str = "eigenvector", rng: np.random.Generator | None = None) -> np.ndarray:
    """Node indices in descending order of the requested score.

    ``eigenvector`` and ``degree`` break ties by node index; ``random`` is a
    seeded shuffle used as a placement baseline.
    """
    if method == "eigenvector":
        if g.row_stochastic:
            # stochastic rows make the dominant right eigenvector uniform
            warnings.warn("eigenvector ranking on a row-stochastic graph is degenerate; "
                          "rank the raw-weight graph instead", stacklevel=2)
        score = eigenvector_centrality(g)
    elif method == "degree":
        score = g.matrix.sum(axis=1)
    elif method == "random":
        if rng is None:
            raise DomainError("random ranking needs an rng")
        return rng.permutation(g.n)
    else:
        raise DomainError(f"unknown ranking method {method!r}")
    return np.argsort(-score, kind="stable")


def _from_undirected_pairs(n: int, pairs) -> Graph:
    m = np.zeros((n, n))
    for i, j in pairs:
        m[i, j] = 1.0
        m[j, i] = 1.0
    return Graph(m)


def complete_graph(n: int) -> Graph:
    if n < 2:
        raise DomainError("complete graph needs n >= 2")
    m = np.ones((n, n)) - np.eye(n)
    return Graph(m)


def star_graph(n_leaves: int) -> Graph:
    """Hub node 0 joined to ``n_leaves`` leaves, symmetric unit weights."""
    if n_leaves < 1:
        raise DomainError("star graph needs at least one leaf")
    return _from_undirected_pairs(n_leaves + 1, [(0, i) for i in range(1, n_leaves + 1)])


def ring_graph(n: int) -> Graph:
    if n < 3:
        raise DomainError("ring graph needs n >= 3")
    return _from_undirected_pairs(n, [(i, (i + 1) % n) for i in range(n)])


def two_triangle_graph() -> Graph:
    """Two 3-cliques {0,1,2} and {3,4,5} bridged by the symmetric edge 1-4."""
    pairs = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (1, 4)]
    return _from_undirected_pairs(6, pairs)


def erdos_renyi_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Symmetric G(n, p): each unordered pair is wired with probability p."""
    if n < 2:
        raise DomainError("erdos-renyi graph needs n >= 2")
    if not 0.0 <= p <= 1.0:
        raise DomainError("edge probability must lie in [0, 1]")
    upper = np.triu(rng.random((n, n)) < p, k=1)
    m = (upper | upper.T).astype(np.float64)
    return Graph(m)
