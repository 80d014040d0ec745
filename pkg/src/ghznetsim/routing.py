"""Route selection on probability- or fidelity-weighted graphs.

All algorithms maximise a product of edge values in (0, 1] by minimising the
sum of per-edge costs ``-log(value)``. Costs are small tuples compared
lexicographically, which implements two-step objectives (e.g. success
probability first, Werner product as tie-break) in a single pass; the last
component is always a hop count of 1 per edge so that ties never leave
zero-cost cycles. Edges with value 0 are unusable and dropped. All tie-breaks
are deterministic: adjacency is iterated in sorted order and heaps are keyed
by (cost, node).
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .topology import NetworkGraph

Edge = tuple[int, int]

# stand-in for an infinite cost component; keeps residual-arc arithmetic finite
_HUGE_COST = 1e18


class RoutingError(ValueError):
    """Invalid routing input."""


class NoRouteError(RoutingError):
    """No feasible routing solution exists."""


class UnsupportedSizeError(RoutingError):
    """Instance too large for the exact algorithm."""


def canon(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def _add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def _close(a: tuple, b: tuple, tol: float = 1e-9) -> bool:
    """Componentwise float equality; sums along different orders drift."""
    return all(abs(x - y) <= tol * max(1.0, abs(x), abs(y)) for x, y in zip(a, b))


def _lex_less(a: tuple, b: tuple, tol: float = 1e-12) -> bool:
    """Lexicographic less-than that treats near-equal components as ties.

    Flow relaxations must use this: rounding drift between equal-cost paths
    would otherwise fabricate epsilon-negative residual cycles and the
    shortest-path search would circle them forever.
    """
    for x, y in zip(a, b):
        if x < y - tol:
            return True
        if x > y + tol:
            return False
    return False


class _Net:
    """Adjacency view over a cost-weighted undirected edge set."""

    def __init__(self, edge_costs: Mapping[Edge, tuple]):
        self.edge_costs = dict(edge_costs)
        self.zero = (0.0,) * len(next(iter(edge_costs.values()))) if edge_costs else (0.0,)
        adj: dict[int, list[tuple[int, tuple]]] = {}
        for (u, v), cost in edge_costs.items():
            adj.setdefault(u, []).append((v, cost))
            adj.setdefault(v, []).append((u, cost))
        self.adj = {x: sorted(nbrs) for x, nbrs in sorted(adj.items())}
        self.nodes = sorted(self.adj)

    def dijkstra(self, source: int) -> tuple[dict[int, tuple], dict[int, int]]:
        dist = {source: self.zero}
        parent: dict[int, int] = {}
        heap = [(self.zero, source)]
        done: set[int] = set()
        while heap:
            d, x = heapq.heappop(heap)
            if x in done:
                continue
            done.add(x)
            for y, cost in self.adj.get(x, ()):
                nd = _add(d, cost)
                if y not in dist or nd < dist[y]:
                    dist[y] = nd
                    parent[y] = x
                    heapq.heappush(heap, (nd, y))
        return dist, parent

def edge_cost_map(edges: Iterable[Edge], primary: Mapping[Edge, float],
                  secondary: Mapping[Edge, float] | None = None) -> dict[Edge, tuple]:
    """Build lexicographic cost tuples from edge values.

    Primary-value-0 edges are dropped (a route through them can never be
    used); a secondary value of 0 costs infinity but keeps the edge usable
    for the primary objective.
    """
    costs: dict[Edge, tuple] = {}
    for e in edges:
        e = canon(*e)
        p = primary[e]
        if not 0.0 <= p <= 1.0:
            raise RoutingError(f"edge value {p} outside [0, 1] on {e}")
        if p == 0.0:
            continue
        cost = [-math.log(p)]
        if secondary is not None:
            s = secondary[e]
            if not 0.0 <= s <= 1.0:
                raise RoutingError(f"edge value {s} outside [0, 1] on {e}")
            cost.append(_HUGE_COST if s == 0.0 else -math.log(s))
        cost.append(1.0)
        costs[e] = tuple(cost)
    return costs


@dataclass(frozen=True)
class RoutingSolution:
    """Edge subset connecting the users, with its branch decomposition.

    ``branches`` are node paths whose interiors contain no user, fork or
    centre node; ``forks`` are tree junctions (degree >= 3). For star
    solutions the branches are the edge-disjoint centre-user paths and
    ``center`` holds the hub node.
    """

    kind: str
    edges: tuple[Edge, ...]
    branches: tuple[tuple[int, ...], ...]
    forks: frozenset[int] = field(default_factory=frozenset)
    center: int | None = None

    @property
    def size(self) -> int:
        return len(self.edges)

    def check(self, users: Sequence[int]) -> None:
        """Validate structural invariants; raises RoutingError on failure."""
        users = set(users)
        edge_set = set(self.edges)
        if len(edge_set) != len(self.edges):
            raise RoutingError("duplicate edges in solution")
        seen: set[Edge] = set()
        for path in self.branches:
            for u, v in zip(path, path[1:]):
                e = canon(u, v)
                if e not in edge_set:
                    raise RoutingError(f"branch edge {e} missing from solution")
                if e in seen:
                    raise RoutingError(f"branches share edge {e}")
                seen.add(e)
        if seen != edge_set:
            raise RoutingError("branches do not cover the edge set")
        adj: dict[int, set[int]] = {}
        for u, v in self.edges:
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        if not users <= set(adj):
            raise RoutingError("solution does not span all users")
        comp = {next(iter(sorted(adj)))}
        stack = list(comp)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        if comp != set(adj):
            raise RoutingError("solution is not connected")
        if self.kind == "tree":
            if len(self.edges) != len(adj) - 1:
                raise RoutingError("tree solution contains a cycle")
            for f in self.forks:
                if len(adj[f]) < 3:
                    raise RoutingError(f"fork {f} has degree {len(adj[f])}")
            stops = users | set(self.forks)
            for path in self.branches:
                for node in path[1:-1]:
                    if node in stops:
                        raise RoutingError(f"branch interior contains endpoint node {node}")
        elif self.kind == "star":
            if self.center is None:
                raise RoutingError("star solution without a centre")
            if self.center in users:
                raise RoutingError("centre coincides with a user")
            ends = sorted(path[0] for path in self.branches)
            if ends != sorted(users):
                raise RoutingError("star branches do not end at the users")
            if any(path[-1] != self.center for path in self.branches):
                raise RoutingError("star branch does not reach the centre")
        else:
            raise RoutingError(f"unknown solution kind {self.kind!r}")


def decompose_tree_branches(edges: Sequence[Edge],
                            users: Sequence[int]) -> tuple[list[tuple[int, ...]], list[int]]:
    """Split a tree into branches between users and forks.

    Returns (branches, forks); each branch is a node path, forks are the
    nodes of degree >= 3. Rejects inputs that are not trees spanning the
    users or that have dangling non-user leaves.
    """
    users_set = set(int(u) for u in users)
    edge_set = {canon(*e) for e in edges}
    if len(edge_set) != len(list(edges)):
        raise RoutingError("duplicate edges")
    adj: dict[int, list[int]] = {}
    for u, v in edge_set:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    for nbrs in adj.values():
        nbrs.sort()
    nodes = set(adj)
    if not users_set <= nodes:
        raise RoutingError("tree does not span the users")
    if len(edge_set) != len(nodes) - 1:
        raise RoutingError("edge set is not a tree")
    start = next(iter(sorted(nodes)))
    comp = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in comp:
                comp.add(y)
                stack.append(y)
    if comp != nodes:
        raise RoutingError("edge set is not connected")
    for node, nbrs in adj.items():
        if len(nbrs) == 1 and node not in users_set:
            raise RoutingError(f"non-user leaf {node}")

    forks = sorted(node for node, nbrs in adj.items() if len(nbrs) >= 3)
    endpoints = users_set | set(forks)
    branches: list[tuple[int, ...]] = []
    used: set[Edge] = set()
    for endpoint in sorted(endpoints):
        for nbr in adj[endpoint]:
            e = canon(endpoint, nbr)
            if e in used:
                continue
            path = [endpoint, nbr]
            used.add(e)
            while path[-1] not in endpoints:
                prev, here = path[-2], path[-1]
                nxt = [y for y in adj[here] if y != prev]
                if len(nxt) != 1:
                    raise RoutingError(f"unexpected junction at node {here}")
                path.append(nxt[0])
                used.add(canon(here, nxt[0]))
            branches.append(tuple(path))
    return branches, forks


def _tree_solution(edges: Iterable[Edge], users: Sequence[int]) -> RoutingSolution:
    edges = tuple(sorted(canon(*e) for e in edges))
    branches, forks = decompose_tree_branches(edges, users)
    return RoutingSolution(kind="tree", edges=edges,
                           branches=tuple(branches), forks=frozenset(forks))


def max_product_path(edges: Sequence[Edge], values: Mapping[Edge, float],
                     u: int, v: int) -> tuple[int, ...]:
    """Node path from u to v maximising the product of edge values.

    Ties go to fewer hops, then to the lexicographically smallest node
    sequence. Returns an empty path for u == v.
    """
    if u == v:
        return ()
    costs = edge_cost_map(edges, values)
    net = _Net(costs)
    if u not in net.adj or v not in net.adj:
        raise NoRouteError(f"no path between {u} and {v}")
    dist_u, _ = net.dijkstra(u)
    dist_v, _ = net.dijkstra(v)
    if v not in dist_u:
        raise NoRouteError(f"no path between {u} and {v}")
    total = dist_u[v]
    # walk tight edges greedily: smallest next node that still lies on some
    # optimal path gives the lexicographically smallest optimal sequence
    path = [u]
    acc = net.zero
    while path[-1] != v:
        here = path[-1]
        step = None
        for y, cost in net.adj[here]:
            if y in dist_v and _close(_add(_add(acc, cost), dist_v[y]), total):
                step = (y, cost)
                break
        if step is None:
            raise RoutingError("tight-edge walk failed")  # unreachable
        path.append(step[0])
        acc = _add(acc, step[1])
    return tuple(path)


def _steiner_dp(net: _Net, terminals: Sequence[int]) -> set[Edge]:
    """Exact minimum-cost Steiner tree by dynamic programming over terminal subsets."""
    k = len(terminals)
    full = (1 << k) - 1
    # dp[mask][v] = (cost, provenance); provenance reconstructs the tree
    dp: list[dict[int, tuple]] = [dict() for _ in range(full + 1)]
    prov: list[dict[int, tuple]] = [dict() for _ in range(full + 1)]

    def relax(mask: int, seeds: dict[int, tuple]) -> None:
        best = dp[mask]
        heap = [(cost, v) for v, cost in sorted(seeds.items())]
        heapq.heapify(heap)
        while heap:
            d, x = heapq.heappop(heap)
            if x in best and best[x] < d:
                continue
            for y, cost in net.adj.get(x, ()):
                nd = _add(d, cost)
                if y not in best or nd < best[y]:
                    best[y] = nd
                    prov[mask][y] = ("edge", x)
                    heapq.heappush(heap, (nd, y))

    for i, t in enumerate(terminals):
        mask = 1 << i
        dp[mask][t] = net.zero
        prov[mask][t] = ("seed",)
        relax(mask, {t: net.zero})

    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue
        low = mask & -mask
        seeds: dict[int, tuple] = {}
        sub = (mask - 1) & mask
        while sub:
            # canonical split: the half containing the lowest terminal
            if sub & low:
                other = mask ^ sub
                for v, ca in sorted(dp[sub].items()):
                    cb = dp[other].get(v)
                    if cb is not None:
                        cand = _add(ca, cb)
                        if v not in dp[mask] or cand < dp[mask][v]:
                            dp[mask][v] = cand
                            prov[mask][v] = ("merge", sub)
                            seeds[v] = cand
            sub = (sub - 1) & mask
        relax(mask, seeds)

    root = terminals[0]
    if root not in dp[full]:
        raise NoRouteError("terminals are not connected")

    edges: set[Edge] = set()

    def rebuild(mask: int, v: int) -> None:
        kind = prov[mask][v]
        if kind[0] == "seed":
            return
        if kind[0] == "edge":
            u = kind[1]
            edges.add(canon(u, v))
            rebuild(mask, u)
        else:
            sub = kind[1]
            rebuild(sub, v)
            rebuild(mask ^ sub, v)

    rebuild(full, root)
    return edges


def _prune_leaves(edges: set[Edge], keep: set[int]) -> set[Edge]:
    edges = set(edges)
    while True:
        degree: dict[int, int] = {}
        for u, v in edges:
            degree[u] = degree.get(u, 0) + 1
            degree[v] = degree.get(v, 0) + 1
        drop = [e for e in edges if
                (degree[e[0]] == 1 and e[0] not in keep) or
                (degree[e[1]] == 1 and e[1] not in keep)]
        if not drop:
            return edges
        edges.difference_update(drop)


def exact_steiner_tree(edges: Sequence[Edge], values: Mapping[Edge, float],
                       terminals: Sequence[int],
                       secondary: Mapping[Edge, float] | None = None) -> RoutingSolution:
    """Tree spanning the terminals with maximal edge-value product, exactly.

    Dynamic programming over terminal subsets; exponential in the number of
    terminals, so limited to at most 6.
    """
    terminals = sorted(set(int(t) for t in terminals))
    if len(terminals) < 2:
        raise RoutingError("need at least two terminals")
    if len(terminals) > 6:
        raise UnsupportedSizeError("exact Steiner search limited to 6 terminals")
    net = _Net(edge_cost_map(edges, values, secondary))
    for t in terminals:
        if t not in net.adj:
            raise NoRouteError(f"terminal {t} has no usable edges")
    tree = _prune_leaves(_steiner_dp(net, terminals), set(terminals))
    return _tree_solution(tree, terminals)


def approx_steiner_tree(edges: Sequence[Edge], values: Mapping[Edge, float],
                        terminals: Sequence[int]) -> RoutingSolution:
    """Metric-closure 2-approximation of the maximum-product Steiner tree."""
    terminals = sorted(set(int(t) for t in terminals))
    if len(terminals) < 2:
        raise RoutingError("need at least two terminals")
    net = _Net(edge_cost_map(edges, values))
    dists: dict[int, dict[int, tuple]] = {}
    parents: dict[int, dict[int, int]] = {}
    for t in terminals:
        if t not in net.adj:
            raise NoRouteError(f"terminal {t} has no usable edges")
        dists[t], parents[t] = net.dijkstra(t)
    # minimum spanning tree over the terminal metric closure (Prim)
    in_tree = {terminals[0]}
    closure_edges: list[tuple[int, int]] = []
    while len(in_tree) < len(terminals):
        best = None
        for a in sorted(in_tree):
            for b in terminals:
                if b in in_tree:
                    continue
                if b not in dists[a]:
                    raise NoRouteError("terminals are not connected")
                cand = (dists[a][b], a, b)
                if best is None or cand < best:
                    best = cand
        _, a, b = best
        closure_edges.append((a, b))
        in_tree.add(b)
    tree: set[Edge] = set()
    for a, b in closure_edges:
        x = b
        while x != a:
            p = parents[a][x]
            tree.add(canon(p, x))
            x = p
    tree = _prune_leaves(tree, set(terminals))
    # overlapping closure paths can create cycles; thin them out with the DP
    node_count = len({n for e in tree for n in e})
    if len(tree) != node_count - 1:
        sub_values = {e: values[e] for e in tree}
        return exact_steiner_tree(sorted(tree), sub_values, terminals) \
            if len(terminals) <= 6 else _spanning_fallback(tree, values, terminals)
    return _tree_solution(tree, terminals)


def _spanning_fallback(tree: set[Edge], values: Mapping[Edge, float],
                       terminals: Sequence[int]) -> RoutingSolution:
    """Cheapest spanning tree of a small cyclic subgraph (Kruskal), then prune."""
    ranked = sorted(tree, key=lambda e: (-math.log(values[e]), e))
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen: set[Edge] = set()
    for e in ranked:
        ra, rb = find(e[0]), find(e[1])
        if ra != rb:
            parent[ra] = rb
            chosen.add(e)
    chosen = _prune_leaves(chosen, set(terminals))
    return _tree_solution(chosen, terminals)


class _FlowNet:
    """Unit-capacity min-cost flow via successive shortest augmenting paths.

    Shortest paths in the residual graph are found with a Bellman-Ford queue,
    which stays correct on the negative-cost residual arcs without potential
    bookkeeping; the graphs here are tiny.
    """

    def __init__(self, edge_costs: Mapping[Edge, tuple], users: Sequence[int]):
        self.zero = (0.0,) * len(next(iter(edge_costs.values()))) if edge_costs else (0.0,)
        self.sink = -1
        # arcs: list of [to, cap, cost, flow]; paired residuals at i ^ 1
        self.arcs: list[list] = []
        self.out: dict[int, list[int]] = {}
        for (u, v), cost in sorted(edge_costs.items()):
            self._arc(u, v, 1, cost)
            self._arc(v, u, 1, cost)
        for u in sorted(users):
            self._arc(u, self.sink, 1, self.zero)

    def _arc(self, u: int, v: int, cap: int, cost: tuple) -> None:
        self.out.setdefault(u, []).append(len(self.arcs))
        self.arcs.append([v, cap, cost, 0])
        self.out.setdefault(v, []).append(len(self.arcs))
        self.arcs.append([u, 0, tuple(-c for c in cost), 0])

    def send(self, source: int, units: int) -> int:
        """Augment up to ``units`` along successive shortest paths; returns count."""
        sent = 0
        relax_budget = 200 * max(1, len(self.out)) * max(1, len(self.arcs))
        for _ in range(units):
            dist: dict[int, tuple] = {source: self.zero}
            prev_arc: dict[int, int] = {}
            queue = deque([source])
            queued = {source}
            spent = 0
            while queue:
                x = queue.popleft()
                queued.discard(x)
                d = dist[x]
                for ai in self.out.get(x, ()):
                    to, cap, cost, flow = self.arcs[ai]
                    if cap - flow <= 0:
                        continue
                    spent += 1
                    nd = _add(d, cost)
                    if to not in dist or _lex_less(nd, dist[to]):
                        dist[to] = nd
                        prev_arc[to] = ai
                        if to != self.sink and to not in queued:
                            queued.add(to)
                            queue.append(to)
                if spent > relax_budget:
                    raise RoutingError("flow relaxation failed to converge")
            if self.sink not in prev_arc:
                return sent
            x = self.sink
            while x != source:
                ai = prev_arc[x]
                self.arcs[ai][3] += 1
                self.arcs[ai ^ 1][3] -= 1
                x = self.arcs[ai ^ 1][0]
            sent += 1
        return sent

    def path_decomposition(self, source: int) -> list[list[int]]:
        """Follow positive flows from the source; one node path per sink unit."""
        succ: dict[int, list[int]] = {}
        for u, arc_ids in self.out.items():
            for ai in arc_ids:
                to, _cap, _cost, flow = self.arcs[ai]
                if flow > 0:
                    succ.setdefault(u, []).append(to)
        for lst in succ.values():
            lst.sort()
        paths = []
        while succ.get(source):
            path = [source]
            while path[-1] != self.sink:
                here = path[-1]
                nxt = succ[here].pop(0)
                path.append(nxt)
            paths.append(path[:-1])
        return paths


def star_route(edges: Sequence[Edge], values: Mapping[Edge, float],
               users: Sequence[int], center: int,
               secondary: Mapping[Edge, float] | None = None) -> RoutingSolution:
    """Edge-disjoint min-cost paths from the centre to every user (unit capacities)."""
    users = sorted(set(int(u) for u in users))
    if center in users:
        raise RoutingError("centre node cannot be a user")
    costs = edge_cost_map(edges, values, secondary)
    flow = _FlowNet(costs, users)
    if center not in flow.out:
        raise NoRouteError("centre has no usable edges")
    if flow.send(center, len(users)) < len(users):
        raise NoRouteError("no edge-disjoint path system to all users")
    paths = flow.path_decomposition(center)
    branches = tuple(sorted(tuple(reversed(p)) for p in paths))
    solution_edges = tuple(sorted(canon(u, v) for p in paths for u, v in zip(p, p[1:])))
    return RoutingSolution(kind="star", edges=solution_edges,
                           branches=branches, forks=frozenset(), center=center)


def star_flow_feasible(edges: Sequence[Edge], users: Sequence[int], center: int) -> bool:
    """True if unit-capacity edge-disjoint paths reach every user from the centre.

    Plain BFS augmentation on integer arcs; much cheaper than the min-cost
    pass, so callers use it to filter infeasible link-state snapshots.
    """
    users = sorted(set(int(u) for u in users))
    sink = -1
    arcs: list[list] = []
    out: dict[int, list[int]] = {}

    def add(u: int, v: int, cap: int) -> None:
        out.setdefault(u, []).append(len(arcs))
        arcs.append([v, cap])
        out.setdefault(v, []).append(len(arcs))
        arcs.append([u, 0])

    for u, v in sorted(canon(*e) for e in edges):
        add(u, v, 1)
        add(v, u, 1)
    for u in users:
        add(u, sink, 1)
    if center not in out:
        return False
    flow = 0
    for _ in range(len(users)):
        prev: dict[int, int] = {center: -2}
        queue = deque([center])
        while queue and sink not in prev:
            x = queue.popleft()
            for ai in out.get(x, ()):
                to, cap = arcs[ai]
                if cap > 0 and to not in prev:
                    prev[to] = ai
                    queue.append(to)
        if sink not in prev:
            return False
        x = sink
        while x != center:
            ai = prev[x]
            arcs[ai][1] -= 1
            arcs[ai ^ 1][1] += 1
            x = arcs[ai ^ 1][0]
        flow += 1
    return flow == len(users)


def users_connected(edges: Sequence[Edge], users: Sequence[int]) -> bool:
    """True if all users lie in one connected component of the edge set."""
    users = [int(u) for u in users]
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    if any(u not in adj for u in users):
        return False
    seen = {users[0]}
    stack = [users[0]]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return all(u in seen for u in users)


def select_single_path(g: NetworkGraph, users: Sequence[int],
                       kind: str) -> RoutingSolution:
    """Static routing solution maximising the one-shot success probability.

    Ties between equal-probability solutions are broken by the largest
    fresh-link Werner product; for stars the centre with the smallest id
    wins remaining ties.
    """
    users = sorted(set(int(u) for u in users))
    g.require_connected()
    p_map = {e: p for e, p in zip(g.edges, g.gen_prob)}
    w_map = {e: w for e, w in zip(g.edges, g.w0)}
    if kind == "tree":
        if len(users) <= 6:
            return exact_steiner_tree(g.edges, p_map, users, secondary=w_map)
        return approx_steiner_tree(g.edges, p_map, users)
    if kind != "star":
        raise RoutingError(f"unknown routing kind {kind!r}")
    best: tuple | None = None
    best_solution = None
    for center in range(g.n_nodes):
        if center in users:
            continue
        try:
            sol = star_route(g.edges, p_map, users, center, secondary=w_map)
        except NoRouteError:
            continue
        cost = _solution_cost(sol, p_map, w_map)
        if best is None or cost < best:
            best = cost
            best_solution = sol
    if best_solution is None:
        raise NoRouteError("no feasible star for any centre")
    return best_solution


def _solution_cost(sol: RoutingSolution, primary: Mapping[Edge, float],
                   secondary: Mapping[Edge, float]) -> tuple:
    cp = -math.fsum(math.log(primary[e]) for e in sol.edges)
    cw = -math.fsum(math.log(secondary[e]) for e in sol.edges)
    return (cp, cw, len(sol.edges))


def select_multipath(live_edges: Sequence[Edge], werner: Mapping[Edge, float],
                     users: Sequence[int], kind: str,
                     center: int | None = None) -> RoutingSolution | None:
    """Best routing solution on the current link-state graph, or None.

    Maximises the Werner product over the live links. Infeasibility (users
    not connected, or no full star flow) is a normal outcome.
    """
    users = sorted(set(int(u) for u in users))
    if kind == "tree":
        if not users_connected(live_edges, users):
            return None
        if len(users) <= 6:
            return exact_steiner_tree(live_edges, werner, users)
        return approx_steiner_tree(live_edges, werner, users)
    if kind != "star":
        raise RoutingError(f"unknown routing kind {kind!r}")
    if center is None:
        raise RoutingError("star routing needs a centre")
    if not users_connected(live_edges, list(users) + [center]):
        return None
    if not star_flow_feasible(live_edges, users, center):
        return None
    try:
        return star_route(live_edges, werner, users, center)
    except NoRouteError:
        return None
