"""Static network topology: graphs, grids, user sets and hop-distance utilities.

Nodes are dense integers ``0..n-1``. Edges are unordered pairs ``(u, v)`` with
``u < v``, each carrying a Bell-state generation probability and an initial
Werner parameter. Graphs are immutable after construction and safe to share
between threads or processes.
"""

from __future__ import annotations

import json
from collections import deque
from typing import Iterable, Sequence


class TopologyError(ValueError):
    """Raised for malformed graphs, edges or user sets."""


def _canon_edge(u: int, v: int) -> tuple[int, int]:
    if u == v:
        raise TopologyError(f"self-loop at node {u}")
    return (u, v) if u < v else (v, u)


class NetworkGraph:
    """Simple undirected graph with per-edge generation probability and w0."""

    def __init__(self, n_nodes: int, edges: Iterable[tuple[int, int, float, float]]):
        if n_nodes < 1:
            raise TopologyError("graph needs at least one node")
        self.n_nodes = int(n_nodes)
        edge_list: list[tuple[int, int]] = []
        gen_prob: list[float] = []
        w0: list[float] = []
        seen: set[tuple[int, int]] = set()
        for u, v, p, w in edges:
            e = _canon_edge(int(u), int(v))
            if not (0 <= e[0] and e[1] < self.n_nodes):
                raise TopologyError(f"edge {e} out of node range 0..{self.n_nodes - 1}")
            if e in seen:
                raise TopologyError(f"parallel edge {e}")
            if not 0.0 <= p <= 1.0:
                raise TopologyError(f"gen_prob {p} outside [0, 1] on edge {e}")
            if not 0.0 <= w <= 1.0:
                raise TopologyError(f"w0 {w} outside [0, 1] on edge {e}")
            seen.add(e)
            edge_list.append(e)
            gen_prob.append(float(p))
            w0.append(float(w))
        order = sorted(range(len(edge_list)), key=lambda i: edge_list[i])
        self.edges: tuple[tuple[int, int], ...] = tuple(edge_list[i] for i in order)
        self.gen_prob: tuple[float, ...] = tuple(gen_prob[i] for i in order)
        self.w0: tuple[float, ...] = tuple(w0[i] for i in order)
        self.edge_index: dict[tuple[int, int], int] = {e: i for i, e in enumerate(self.edges)}
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n_nodes)]
        for i, (u, v) in enumerate(self.edges):
            adj[u].append((v, i))
            adj[v].append((u, i))
        # sorted neighbour order gives deterministic traversal everywhere
        self.adj: tuple[tuple[tuple[int, int], ...], ...] = tuple(
            tuple(sorted(a)) for a in adj
        )

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[tuple[int, int], ...]:
        """Neighbours of ``v`` as (node, edge index) pairs, ascending by node."""
        return self.adj[v]

    def edge_id(self, u: int, v: int) -> int:
        return self.edge_index[_canon_edge(u, v)]

    def is_connected(self) -> bool:
        if self.n_nodes == 1:
            return True
        seen = [False] * self.n_nodes
        seen[0] = True
        queue = deque([0])
        count = 1
        while queue:
            x = queue.popleft()
            for y, _ in self.adj[x]:
                if not seen[y]:
                    seen[y] = True
                    count += 1
                    queue.append(y)
        return count == self.n_nodes

    def require_connected(self) -> None:
        if not self.is_connected():
            raise TopologyError("graph is not connected")

    def hop_distances(self, source: int) -> list[int]:
        """Unweighted shortest-path hop distance from ``source`` to every node."""
        dist = [-1] * self.n_nodes
        dist[source] = 0
        queue = deque([source])
        while queue:
            x = queue.popleft()
            for y, _ in self.adj[x]:
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    def to_json(self) -> str:
        payload = {
            "nodes": self.n_nodes,
            "edges": [[u, v, p, w] for (u, v), p, w in zip(self.edges, self.gen_prob, self.w0)],
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "NetworkGraph":
        payload = json.loads(text)
        try:
            nodes = payload["nodes"]
            edges = [(int(u), int(v), float(p), float(w)) for u, v, p, w in payload["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise TopologyError(f"malformed graph JSON: {exc}") from exc
        return cls(nodes, edges)

    def __repr__(self) -> str:
        return f"NetworkGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"


class UserSet:
    """Ordered set of at least two distinct nodes requesting a shared GHZ state."""

    def __init__(self, users: Sequence[int], graph: NetworkGraph | None = None):
        users = [int(u) for u in users]
        if len(users) < 2:
            raise TopologyError("user set needs at least two nodes")
        if len(set(users)) != len(users):
            raise TopologyError("duplicate users")
        if graph is not None:
            for u in users:
                if not 0 <= u < graph.n_nodes:
                    raise TopologyError(f"user {u} not in graph")
        self.users: tuple[int, ...] = tuple(users)

    def __len__(self) -> int:
        return len(self.users)

    def __iter__(self):
        return iter(self.users)

    def __repr__(self) -> str:
        return f"UserSet({list(self.users)})"


def make_grid(m: int, gen_prob: float, w0: float) -> NetworkGraph:
    """Build an M x M square lattice with uniform edge parameters.

    Nodes are numbered row-major, so node (r, c) has id ``r * m + c``. The
    lattice has ``m**2`` nodes and ``2 * m * (m - 1)`` edges.
    """
    if m < 2:
        raise TopologyError(f"grid size must be at least 2, got {m}")
    edges = []
    for r in range(m):
        for c in range(m):
            node = r * m + c
            if c + 1 < m:
                edges.append((node, node + 1, gen_prob, w0))
            if r + 1 < m:
                edges.append((node, node + m, gen_prob, w0))
    return NetworkGraph(m * m, edges)


def _check_users(g: NetworkGraph, users: Iterable[int]) -> tuple[int, ...]:
    out = tuple(int(u) for u in users)
    for u in out:
        if not 0 <= u < g.n_nodes:
            raise TopologyError(f"user {u} not a node of the graph")
    return out


def steiner_distance(g: NetworkGraph, users: UserSet | Sequence[int]) -> int:
    """Edge count of a minimum Steiner tree connecting the users (unit weights)."""
    terminals = _check_users(g, users)
    if len(set(terminals)) < 2:
        return 0
    g.require_connected()
    from . import routing

    unit = {e: 1.0 for e in g.edges}
    if len(set(terminals)) <= 6:
        solution = routing.exact_steiner_tree(g.edges, unit, terminals)
    else:
        solution = routing.approx_steiner_tree(g.edges, unit, terminals)
    return len(solution.edges)


def centroid_node(g: NetworkGraph, users: UserSet | Sequence[int],
                  exclude: Iterable[int] = ()) -> int:
    """Node minimising total hop distance to the users.

    Grid graphs tie many nodes on the plain distance sum, so ties prefer the
    most balanced node (smallest sum of squared distances) and then the
    smallest id. ``exclude`` removes candidate nodes (used when the centre of
    a star route must not coincide with a user).
    """
    terminals = _check_users(g, users)
    g.require_connected()
    excluded = set(exclude)
    totals = [0] * g.n_nodes
    squares = [0] * g.n_nodes
    for u in terminals:
        dist = g.hop_distances(u)
        for v in range(g.n_nodes):
            totals[v] += dist[v]
            squares[v] += dist[v] * dist[v]
    best = None
    for v in range(g.n_nodes):
        if v in excluded:
            continue
        if best is None or (totals[v], squares[v]) < (totals[best], squares[best]):
            best = v
    if best is None:
        raise TopologyError("all candidate centroid nodes excluded")
    return best
