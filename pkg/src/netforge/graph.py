"""Undirected simple graphs with edge-count-preserving rewires and exact metrics.

The graph is stored densely (an ``N x N`` boolean adjacency matrix plus a
neighbor table), which suits the few-hundred-node networks the optimizer
works on. Edges also live in an indexable slot list so a uniformly random
edge can be drawn in O(1); a rewire reuses the slot of the edge it removes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np

from . import _kernels
from .errors import ConsistencyError, DisconnectedError, NoMoveError, ParameterError

__all__ = [
    "Graph",
    "RewireMove",
    "random_connected_graph",
    "propose_rewire",
    "propose_endpoint_shift",
    "is_connected",
    "clustering_coefficient",
    "local_clustering",
    "cc_delta",
    "affected_nodes",
    "average_shortest_path",
    "distance_sum",
    "write_edgelist",
    "read_edgelist",
    "format_edgelist",
    "parse_edgelist",
]

Pair = Tuple[int, int]
SeedLike = Union[int, np.random.Generator, None]

# Below this fraction of free pairs, non-edges are enumerated instead of
# rejection-sampled.
_DENSE_NONEDGE_FRACTION = 0.05
_REJECTION_CAP = 10_000


def _pair(u: int, v: int) -> Pair:
    u, v = int(u), int(v)
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class RewireMove:
    """Delete ``removed`` and insert ``added``.

    ``slot`` is the position of ``removed`` in the graph's edge list; it is
    filled in by :func:`propose_rewire` and looked up when left as ``None``.
    """

    removed: Pair
    added: Pair
    slot: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "removed", _pair(*self.removed))
        object.__setattr__(self, "added", _pair(*self.added))

    @property
    def endpoints(self) -> Tuple[int, ...]:
        return tuple(sorted(set(self.removed) | set(self.added)))


class Graph:
    def __init__(self, n_nodes: int, edges: Iterable[Pair] = ()):
        if n_nodes < 1:
            raise ParameterError(f"n_nodes must be >= 1, got {n_nodes}")
        self.n_nodes = int(n_nodes)
        self.adj = np.zeros((n_nodes, n_nodes), dtype=np.bool_)
        self.nbr = np.zeros((n_nodes, min(n_nodes, 8)), dtype=np.int32)
        self.deg = np.zeros(n_nodes, dtype=np.int64)
        self._edges: List[Pair] = []
        self._slot: dict = {}
        self._last: Optional[RewireMove] = None
        for u, v in edges:
            self.add_edge(u, v)

    # -- structure -------------------------------------------------------

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    @property
    def degrees(self) -> np.ndarray:
        view = self.deg.view()
        view.flags.writeable = False
        return view

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u, v])

    def neighbors(self, u: int) -> List[int]:
        return sorted(int(x) for x in self.nbr[u, : self.deg[u]])

    def edge_at(self, slot: int) -> Pair:
        return self._edges[slot]

    def edges(self) -> List[Pair]:
        """All edges as ``(u, v)`` with ``u < v``, sorted."""
        return sorted(self._edges)

    def _check_node(self, u: int) -> None:
        if not (0 <= u < self.n_nodes):
            raise ParameterError(f"node {u} out of range 0..{self.n_nodes - 1}")

    def _ensure_capacity(self, *nodes: int) -> None:
        need = max(int(self.deg[x]) for x in nodes) + 1
        cap = self.nbr.shape[1]
        if need <= cap:
            return
        new_cap = min(self.n_nodes, max(need, 2 * cap))
        grown = np.zeros((self.n_nodes, new_cap), dtype=np.int32)
        grown[:, :cap] = self.nbr
        self.nbr = grown

    def add_edge(self, u: int, v: int) -> None:
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise ParameterError(f"self-loop at node {u}")
        if self.adj[u, v]:
            raise ParameterError(f"edge {_pair(u, v)} already present")
        self._ensure_capacity(u, v)
        self.adj[u, v] = self.adj[v, u] = True
        self.nbr[u, self.deg[u]] = v
        self.deg[u] += 1
        self.nbr[v, self.deg[v]] = u
        self.deg[v] += 1
        e = _pair(u, v)
        self._slot[e] = len(self._edges)
        self._edges.append(e)
        self._last = None

    def remove_edge(self, u: int, v: int) -> None:
        e = _pair(u, v)
        slot = self._slot.pop(e, None)
        if slot is None:
            raise ParameterError(f"edge {e} not present")
        last = self._edges.pop()
        if slot < len(self._edges):
            self._edges[slot] = last
            self._slot[last] = slot
        self.adj[u, v] = self.adj[v, u] = False
        _kernels.drop_neighbor(self.nbr, self.deg, u, v)
        _kernels.drop_neighbor(self.nbr, self.deg, v, u)
        self._last = None

    def copy(self) -> "Graph":
        g = Graph.__new__(Graph)
        g.n_nodes = self.n_nodes
        g.adj = self.adj.copy()
        g.nbr = self.nbr.copy()
        g.deg = self.deg.copy()
        g._edges = list(self._edges)
        g._slot = dict(self._slot)
        g._last = None
        return g

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n_nodes == other.n_nodes
            and self._edges == other._edges
            and np.array_equal(self.adj, other.adj)
            and np.array_equal(self.deg, other.deg)
        )

    def __repr__(self) -> str:
        return f"Graph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"

    # -- rewires ---------------------------------------------------------

    def _resolve_slot(self, move: RewireMove) -> int:
        slot = move.slot if move.slot is not None else self._slot.get(move.removed)
        if slot is None or not (0 <= slot < len(self._edges)):
            raise ConsistencyError(f"{move.removed} is not an edge")
        if self._edges[slot] != move.removed:
            raise ConsistencyError(f"stale move: slot {slot} holds {self._edges[slot]}")
        return slot

    def apply(self, move: RewireMove) -> None:
        """Install ``move``; the graph must match the state it was proposed on."""
        slot = self._resolve_slot(move)
        a, b = move.added
        if a == b or move.added == move.removed:
            raise ConsistencyError(f"invalid insertion {move.added}")
        if self.adj[a, b]:
            raise ConsistencyError(f"{move.added} is already an edge")
        u, v = move.removed
        self._ensure_capacity(a, b)
        _kernels.rewire(self.adj, self.nbr, self.deg, u, v, a, b)
        del self._slot[move.removed]
        self._slot[move.added] = slot
        self._edges[slot] = move.added
        self._last = move

    def revert(self, move: RewireMove) -> None:
        """Undo ``move``, which must be the most recently applied one."""
        if self._last is None or self._last != move:
            raise ConsistencyError("can only revert the last applied move")
        u, v = move.removed
        a, b = move.added
        slot = self._slot[move.added]
        _kernels.rewire(self.adj, self.nbr, self.deg, a, b, u, v)
        del self._slot[move.added]
        self._slot[move.removed] = slot
        self._edges[slot] = move.removed
        self._last = None


def _as_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_connected_graph(n_nodes: int, n_edges: int, rng_seed: SeedLike = None) -> Graph:
    """Random recursive spanning tree over a shuffled node order, plus extras.

    The extra ``n_edges - (n_nodes - 1)`` edges are distinct non-tree pairs
    drawn uniformly.
    """
    max_edges = n_nodes * (n_nodes - 1) // 2
    if n_nodes < 1 or not (n_nodes - 1 <= n_edges <= max_edges):
        raise ParameterError(
            f"cannot build a connected simple graph with {n_nodes} nodes "
            f"and {n_edges} edges"
        )
    rng = _as_rng(rng_seed)
    g = Graph(n_nodes)
    order = rng.permutation(n_nodes)
    for i in range(1, n_nodes):
        g.add_edge(int(order[i]), int(order[rng.integers(i)]))

    extra = n_edges - (n_nodes - 1)
    free = max_edges - (n_nodes - 1)
    if extra == 0:
        return g
    if extra * 2 > free:
        iu, ju = np.triu_indices(n_nodes, k=1)
        mask = ~g.adj[iu, ju]
        cand = np.flatnonzero(mask)
        pick = rng.choice(cand, size=extra, replace=False)
        for p in np.sort(pick):
            g.add_edge(int(iu[p]), int(ju[p]))
        return g
    while g.n_edges < n_edges:
        a, b = rng.integers(n_nodes, size=2)
        if a != b and not g.adj[a, b]:
            g.add_edge(int(a), int(b))
    return g


def propose_rewire(g: Graph, rng: np.random.Generator) -> RewireMove:
    """Uniform edge to delete and uniform non-edge to insert; ``g`` is untouched."""
    n = g.n_nodes
    m = g.n_edges
    n_pairs = n * (n - 1) // 2
    if m == 0 or m >= n_pairs:
        raise NoMoveError("graph is empty or complete; no rewire exists")
    slot = int(rng.integers(m))
    removed = g._edges[slot]
    adj = g.adj
    if (n_pairs - m) < _DENSE_NONEDGE_FRACTION * n_pairs:
        iu, ju = np.triu_indices(n, k=1)
        cand = np.flatnonzero(~adj[iu, ju])
        p = cand[rng.integers(cand.shape[0])]
        return RewireMove(removed, (int(iu[p]), int(ju[p])), slot)
    for _ in range(_REJECTION_CAP):
        a, b = rng.integers(n, size=2)
        if a != b and not adj[a, b]:
            return RewireMove(removed, (int(a), int(b)), slot)
    raise NoMoveError(f"no non-edge found after {_REJECTION_CAP} draws")


def propose_endpoint_shift(g: Graph, rng: np.random.Generator) -> RewireMove:
    """Uniform edge ``u-v``, uniform kept endpoint, then ``v`` is replaced by a uniform non-neighbor of ``u``.

    Only two degrees change (``v`` loses one, the new endpoint gains one).
    """
    n = g.n_nodes
    m = g.n_edges
    if m == 0 or m >= n * (n - 1) // 2:
        raise NoMoveError("graph is empty or complete; no rewire exists")
    adj = g.adj
    deg = g.deg
    for _ in range(_REJECTION_CAP):
        slot = int(rng.integers(m))
        removed = g._edges[slot]
        keep = removed[int(rng.integers(2))]
        if deg[keep] >= n - 1:
            continue
        if n - 1 - deg[keep] < _DENSE_NONEDGE_FRACTION * n:
            free = np.flatnonzero(~adj[keep])
            free = free[free != keep]
            w = int(free[rng.integers(free.shape[0])])
            return RewireMove(removed, (keep, w), slot)
        while True:
            w = int(rng.integers(n))
            if w != keep and not adj[keep, w]:
                return RewireMove(removed, (keep, w), slot)
    raise NoMoveError(f"no endpoint shift found after {_REJECTION_CAP} draws")


def is_connected(g: Graph) -> bool:
    return int(_kernels.reachable_count(g.nbr, g.deg, 0)) == g.n_nodes


def local_clustering(g: Graph, nodes=None) -> np.ndarray:
    """Local clustering of each node in ``nodes`` (all nodes by default)."""
    if nodes is None:
        nodes = np.arange(g.n_nodes, dtype=np.int64)
    else:
        nodes = np.asarray(nodes, dtype=np.int64)
    return _kernels.local_clustering(g.adj, g.nbr, g.deg, nodes)


def clustering_coefficient(g: Graph) -> float:
    """Mean local clustering over all nodes; nodes of degree < 2 count as 0.

    The sum is exactly rounded (``math.fsum``), so the value depends only on
    the graph and not on neighbor ordering.
    """
    return math.fsum(local_clustering(g).tolist()) / g.n_nodes


def affected_nodes(g: Graph, move: RewireMove) -> np.ndarray:
    """Nodes whose local clustering can change when ``move`` is applied to ``g``."""
    u, v = move.removed
    a, b = move.added
    parts = [
        np.array([u, v, a, b], dtype=np.int64),
        _kernels.common_neighbors(g.adj, g.nbr, g.deg, u, v),
        _kernels.common_neighbors(g.adj, g.nbr, g.deg, a, b),
    ]
    return np.unique(np.concatenate(parts))


def cc_delta(g: Graph, move: RewireMove) -> float:
    """``clustering_coefficient`` after ``move`` minus before; ``g`` is left unchanged."""
    nodes = affected_nodes(g, move)
    before = local_clustering(g, nodes).tolist()
    last = g._last
    g.apply(move)
    after = local_clustering(g, nodes).tolist()
    g.revert(move)
    g._last = last
    return math.fsum(after + [-x for x in before]) / g.n_nodes


def distance_sum(g: Graph) -> int:
    """Sum of shortest-path lengths over unordered pairs."""
    total = int(_kernels.distance_sum(g.nbr, g.deg))
    if total < 0:
        raise DisconnectedError("graph is disconnected; shortest paths are undefined")
    return total


def average_shortest_path(g: Graph) -> float:
    n = g.n_nodes
    if n < 2:
        return 0.0
    return distance_sum(g) / (n * (n - 1) // 2)


# -- edge-list IO -----------------------------------------------------------


def format_edgelist(g: Graph) -> str:
    lines = [f"# nodes={g.n_nodes} edges={g.n_edges}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_edgelist(text: str) -> Graph:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ParameterError("edge list must start with '# nodes=N edges=E'")
    header = dict(
        tok.split("=", 1) for tok in lines[0].lstrip("#").split() if "=" in tok
    )
    try:
        n = int(header["nodes"])
        m = int(header["edges"])
    except (KeyError, ValueError):
        raise ParameterError(f"bad edge list header: {lines[0]!r}") from None
    g = Graph(n)
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParameterError(f"line {lineno}: expected 'u v', got {line!r}")
        g.add_edge(int(parts[0]), int(parts[1]))
    if g.n_edges != m:
        raise ParameterError(f"header declares {m} edges, file has {g.n_edges}")
    return g


def write_edgelist(g: Graph, path) -> None:
    Path(path).write_text(format_edgelist(g))


def read_edgelist(path) -> Graph:
    return parse_edgelist(Path(path).read_text())

