"""Directed graphs, strongly connected components and eigenvector centrality.

Two SCC routines live here.  ``scc_spectral`` peels sink components off the
graph using left eigenvectors of the random-walk transition matrix, which
also yields the eigenvector centrality of every node inside its component.
``scc_tarjan`` is the classical linear-time algorithm and serves as an
independent reference for the spectral routine.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from os import PathLike

import numpy as np
from scipy import linalg

__all__ = [
    "DirectedGraph",
    "SccDecomposition",
    "CondensationGraph",
    "NumericalFailure",
    "FormatError",
    "scc_tarjan",
    "scc_spectral",
    "is_strongly_connected_spectral",
    "condensation",
    "shortest_path_node_counts",
    "read_edge_list",
    "write_edge_list",
]

# support threshold, relative to the largest |entry| of a null-space vector
SUPPORT_RTOL = 1e-8


class NumericalFailure(RuntimeError):
    """The eigen-decomposition disagrees with what the graph theory guarantees."""


class FormatError(ValueError):
    """A data file could not be parsed; the message names file and line."""


class DirectedGraph:
    """Simple unweighted directed graph on nodes ``0..n-1``.

    Parameters
    ----------
    n : int
        Number of nodes.
    edges : iterable of (int, int), optional
        Ordered pairs ``(u, v)`` meaning an edge ``u -> v``.  Self-loops are
        rejected, duplicates collapse.
    """

    def __init__(self, n, edges=()):
        n = int(n)
        if n < 0:
            raise ValueError("node count must be non-negative")
        adj = np.zeros((n, n), dtype=np.int8)
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            adj[u, v] = 1
        self._adj = adj
        self._adj.setflags(write=False)
        self._succ = None

    @classmethod
    def from_adjacency(cls, adjacency):
        a = np.asarray(adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be square")
        if np.any(np.diag(a) != 0):
            raise ValueError("adjacency has self-loops")
        if not np.all((a == 0) | (a == 1)):
            raise ValueError("adjacency entries must be 0 or 1")
        g = cls(a.shape[0])
        g._adj = (a != 0).astype(np.int8)
        g._adj.setflags(write=False)
        return g

    @property
    def n(self):
        return self._adj.shape[0]

    @property
    def adjacency(self):
        """Read-only ``n x n`` 0/1 matrix, ``A[u, v] = 1`` iff ``u -> v``."""
        return self._adj

    @property
    def edges(self):
        return {(int(u), int(v)) for u, v in zip(*np.nonzero(self._adj))}

    def successors(self, u):
        if self._succ is None:
            self._succ = [np.flatnonzero(row).tolist() for row in self._adj]
        return self._succ[u]

    def out_degree(self):
        return self._adj.sum(axis=1)

    def subgraph(self, nodes):
        nodes = np.asarray(nodes, dtype=int)
        return DirectedGraph.from_adjacency(self._adj[np.ix_(nodes, nodes)])

    def __repr__(self):
        return f"DirectedGraph(n={self.n}, m={int(self._adj.sum())})"


@dataclass
class SccDecomposition:
    """Partition of the nodes into strongly connected components.

    ``components`` are sorted member lists.  ``centrality`` holds one value per
    node, summing to one inside each component; it is ``None`` when the
    decomposition came from a routine that does not compute it.
    ``peel_order[j]`` is the round in which component ``j`` was removed.
    """

    n: int
    components: list
    centrality: np.ndarray | None = None
    peel_order: list = field(default_factory=list)

    def labels(self):
        """Component index of every node."""
        lab = np.full(self.n, -1, dtype=int)
        for j, comp in enumerate(self.components):
            lab[comp] = j
        return lab

    def as_partition(self):
        """Order-free view of the partition, for comparisons."""
        return frozenset(frozenset(c) for c in self.components)

    def __len__(self):
        return len(self.components)


@dataclass
class CondensationGraph:
    c: int
    dag_edges: set

    def to_graph(self):
        return DirectedGraph(self.c, self.dag_edges)

    def topological_order(self):
        """Kahn's algorithm; raises ValueError if a cycle is present."""
        indeg = np.zeros(self.c, dtype=int)
        succ = [[] for _ in range(self.c)]
        for j, l in self.dag_edges:
            succ[j].append(l)
            indeg[l] += 1
        queue = deque(int(j) for j in np.flatnonzero(indeg == 0))
        order = []
        while queue:
            j = queue.popleft()
            order.append(j)
            for l in succ[j]:
                indeg[l] -= 1
                if indeg[l] == 0:
                    queue.append(l)
        if len(order) != self.c:
            raise ValueError("condensation graph contains a cycle")
        return order


def scc_tarjan(g):
    """Tarjan's algorithm, iterative so deep graphs do not hit the recursion limit.

    Components come back with sorted members, ordered by smallest member.
    No centrality is computed.
    """
    n = g.n
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comps = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            succ = g.successors(v)
            if i < len(succ):
                work[-1] = (v, i + 1)
                w = succ[i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))

    comps.sort(key=lambda c: c[0])
    return SccDecomposition(n=n, components=comps)


def _weak_components(adj, nodes):
    """Weakly connected components of the subgraph induced by ``nodes``."""
    nodes = sorted(int(x) for x in nodes)
    sub = adj[np.ix_(nodes, nodes)]
    sym = (sub + sub.T) > 0
    seen = [False] * len(nodes)
    out = []
    for s in range(len(nodes)):
        if seen[s]:
            continue
        seen[s] = True
        queue = deque([s])
        comp = []
        while queue:
            i = queue.popleft()
            comp.append(nodes[i])
            for j in np.flatnonzero(sym[i]):
                if not seen[j]:
                    seen[j] = True
                    queue.append(j)
        out.append(sorted(comp))
    return out


def _left_fixed_space(adj):
    """Basis of {phi : phi P = phi} for P = D^-1 A, columns of the result."""
    deg = adj.sum(axis=1).astype(float)
    p = adj / deg[:, None]
    return linalg.null_space(p.T - np.eye(adj.shape[0]))


def scc_spectral(g):
    """Strongly connected components together with eigenvector centrality.

    Each round first removes nodes of zero out-degree (each is a sink
    component on its own, centrality 1).  On what remains, every out-degree is
    positive, so ``P = D^-1 A`` is row-stochastic; the left eigenvectors of
    ``P`` at eigenvalue 1 are supported exactly on the sink components.  The
    union of their supports is split by weak connectivity into those
    components, whose nodes are then deleted, and the loop repeats.

    Returns
    -------
    SccDecomposition
        Components in peel order (ties broken by smallest member), with
        per-component normalized centrality.
    """
    n = g.n
    adj = g.adjacency.astype(float)
    alive = np.ones(n, dtype=bool)
    centrality = np.zeros(n)
    found = []  # (round, component)
    rnd = 0

    while alive.any():
        idx = np.flatnonzero(alive)
        sub = adj[np.ix_(idx, idx)]
        outdeg = sub.sum(axis=1)
        sinks = idx[outdeg == 0]
        if sinks.size:
            for u in sinks:
                found.append((rnd, [int(u)]))
                centrality[u] = 1.0
            alive[sinks] = False
            rnd += 1
            continue

        basis = _left_fixed_space(sub)
        if basis.shape[1] == 0:
            raise NumericalFailure(
                f"no left eigenvector at eigenvalue 1 for a {idx.size}-node "
                "subgraph with positive out-degrees"
            )
        support = np.zeros(idx.size, dtype=bool)
        for phi in basis.T:
            support |= np.abs(phi) > SUPPORT_RTOL * np.abs(phi).max()

        local = np.arange(idx.size)
        for comp_local in _weak_components(sub, local[support]):
            comp_local = np.asarray(comp_local)
            restricted = basis[comp_local, :]
            # every basis vector is a multiple of the same positive vector here
            best = restricted[:, np.argmax(np.abs(restricted).sum(axis=0))]
            phi = best / best.sum()
            comp = idx[comp_local]
            centrality[comp] = phi
            found.append((rnd, sorted(int(u) for u in comp)))
        alive[idx[support]] = False
        rnd += 1

    found.sort(key=lambda item: (item[0], item[1][0]))
    return SccDecomposition(
        n=n,
        components=[c for _, c in found],
        centrality=centrality,
        peel_order=[r for r, _ in found],
    )


def is_strongly_connected_spectral(g, tol=1e-10):
    """Strong connectivity test through the left fixed space of ``P``.

    For a weakly connected graph whose out-degrees are all positive, the graph
    is strongly connected iff that space is one-dimensional and spanned by a
    vector with no zero entries.  Graphs violating the precondition are
    reported as not strongly connected, except the one-node graph.
    """
    n = g.n
    if n == 0:
        return False
    if n == 1:
        return True
    adj = g.adjacency
    if np.any(adj.sum(axis=1) == 0):
        return False
    if len(_weak_components(adj, range(n))) != 1:
        return False
    basis = _left_fixed_space(adj.astype(float))
    if basis.shape[1] != 1:
        return False
    phi = basis[:, 0]
    phi = phi / np.abs(phi).sum()
    return bool(np.all(np.abs(phi) > tol))


def condensation(g, d):
    """Contract each component of ``d`` into a single node."""
    lab = d.labels()
    if np.any(lab < 0):
        raise ValueError("decomposition does not cover every node")
    us, vs = np.nonzero(g.adjacency)
    edges = {(int(lab[u]), int(lab[v])) for u, v in zip(us, vs) if lab[u] != lab[v]}
    return CondensationGraph(c=len(d.components), dag_edges=edges)


def shortest_path_node_counts(g, sources, targets):
    """Number of nodes on a shortest directed path, endpoints included.

    Entry ``(i, j)`` refers to ``sources[i] -> targets[j]``; it is the BFS
    distance plus one, 1 on the diagonal and ``inf`` when unreachable.
    """
    sources = [int(s) for s in sources]
    targets = np.asarray(targets, dtype=int)
    out = np.full((len(sources), targets.size), np.inf)
    for i, s in enumerate(sources):
        dist = np.full(g.n, -1, dtype=int)
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.successors(u):
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        reach = dist[targets]
        out[i, reach >= 0] = reach[reach >= 0] + 1
    return out


def read_edge_list(path: str | PathLike, n: int | None = None):
    """Parse a ``u<TAB>v`` edge list.  ``#`` starts a comment.

    Returns ``(n, edges)`` where ``n`` defaults to one past the largest index.
    Malformed lines raise ``FormatError`` naming the file and line number.
    """
    edges = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise FormatError(f"{path}:{lineno}: expected 'u<TAB>v', got {raw.rstrip()!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise FormatError(f"{path}:{lineno}: non-integer node index in {raw.rstrip()!r}") from None
            if u < 0 or v < 0:
                raise FormatError(f"{path}:{lineno}: negative node index")
            edges.append((u, v))
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return n, edges


def write_edge_list(g, path, header=None):
    with open(path, "w") as fh:
        if header:
            fh.write(f"# {header}\n")
        for u, v in sorted(g.edges):
            fh.write(f"{u}\t{v}\n")
