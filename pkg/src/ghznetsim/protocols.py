"""The four distribution protocols: what to attempt each timeslot and when
a GHZ state can be realized.

Single-path protocols (sp-s, sp-t) fix one routing solution up front and
attempt link generation only on its edges; they complete when every planned
edge holds a live link. Multi-path protocols (mp-s, mp-t) attempt generation
on every edge and re-run routing on the link-state graph each timeslot,
completing as soon as any feasible solution exists; the solution returned is
the one maximising the Werner product over the current links.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import routing, statesim
from .topology import NetworkGraph, TopologyError, centroid_node


class Protocol(str, enum.Enum):
    SP_S = "sp-s"
    SP_T = "sp-t"
    MP_S = "mp-s"
    MP_T = "mp-t"

    @property
    def is_single_path(self) -> bool:
        return self in (Protocol.SP_S, Protocol.SP_T)

    @property
    def routing_kind(self) -> str:
        return "star" if self in (Protocol.SP_S, Protocol.MP_S) else "tree"


@dataclass(frozen=True)
class ProtocolState:
    """Immutable per-run protocol context, shared by all trials of a user set."""

    kind: Protocol
    users: tuple[int, ...]
    planned_route: routing.RoutingSolution | None
    center: int | None
    tracked: np.ndarray          # edge indices where generation is attempted
    planned_idx: np.ndarray | None   # planned-route edge indices (single path)
    user_incidence: tuple[np.ndarray, ...]   # per user, incident edge indices
    center_incidence: np.ndarray | None
    # plain flags for the per-timeslot hot path
    single_path: bool = False
    tracked_all: bool = False


def initialize(kind: Protocol | str, g: NetworkGraph, users) -> ProtocolState:
    """Set up a protocol run: fixed route for sp-*, centre node for mp-s."""
    kind = Protocol(kind)
    users = tuple(sorted(set(int(u) for u in users)))
    g.require_connected()

    planned = None
    planned_idx = None
    center = None
    if kind.is_single_path:
        planned = routing.select_single_path(g, users, kind.routing_kind)
        center = planned.center
        planned_idx = np.array(sorted(g.edge_index[e] for e in planned.edges))
        tracked = planned_idx
    else:
        if kind is Protocol.MP_S:
            # the centre must be able to host one disjoint branch per user,
            # so nodes of insufficient degree are skipped along with users
            too_small = [v for v in range(g.n_nodes)
                         if len(g.neighbors(v)) < len(users)]
            try:
                center = centroid_node(g, users,
                                       exclude=set(users) | set(too_small))
            except TopologyError as exc:
                raise routing.NoRouteError(
                    f"no viable centre node for {len(users)} users") from exc
        tracked = np.arange(g.n_edges)

    user_inc = tuple(
        np.array(sorted(i for i, e in enumerate(g.edges) if u in e)) for u in users
    )
    center_inc = None
    if center is not None and kind is Protocol.MP_S:
        center_inc = np.array(sorted(i for i, e in enumerate(g.edges) if center in e))
    return ProtocolState(kind=kind, users=users, planned_route=planned,
                         center=center, tracked=tracked, planned_idx=planned_idx,
                         user_incidence=user_inc, center_incidence=center_inc,
                         single_path=kind.is_single_path,
                         tracked_all=len(tracked) == g.n_edges)


def try_complete(state: ProtocolState, links, delta: float) -> routing.RoutingSolution | None:
    """Routing solution realizable from the current links, if any.

    Single-path protocols return their planned route only when it is fully
    live. Multi-path protocols search the link-state graph; cheap incidence
    checks reject most infeasible timeslots before any graph algorithm runs.
    """
    ages = links.ages
    if state.single_path:
        if (ages[state.planned_idx] >= 0).all():
            return state.planned_route
        return None
    for inc in state.user_incidence:
        if not (ages[inc] >= 0).any():
            return None
    if state.center_incidence is not None:
        if int((ages[state.center_incidence] >= 0).sum()) < len(state.users):
            return None
    live_idx = np.nonzero(ages >= 0)[0]
    graph = links.graph
    live_edges = [graph.edges[i] for i in live_idx]
    w_now = links.current_werner(delta, live_idx)
    werner = {graph.edges[i]: float(w) for i, w in zip(live_idx, w_now)}
    return routing.select_multipath(live_edges, werner, state.users,
                                    state.kind.routing_kind, center=state.center)


@dataclass(frozen=True)
class RealizedGhz:
    """Outcome of turning a live routing solution into a GHZ state."""

    fidelity: float
    r_size: int
    mean_age: float
    consumed: tuple[int, ...]            # edge indices
    werner_product: float                # product of link Werner parameters
    branch_fidelity_product: float       # product of per-branch Bell fidelities
    fidelity_floor: float                # w0^|R| * delta^(mean_age |R|) bound


def realize_ghz(solution: routing.RoutingSolution, links, delta: float,
                users) -> RealizedGhz:
    """Swap, fuse and trim the live links of ``solution`` into a GHZ state.

    Uses each link's decohered Werner parameter at its current age. Raises if
    any solution edge has no live link (caller bug).
    """
    graph = links.graph
    idx = np.array([graph.edge_index[e] for e in solution.edges])
    ages = links.ages[idx]
    if (ages < 0).any():
        raise RuntimeError("routing solution includes an edge with no live link")
    w_use = {e: float(graph.w0[i]) * delta ** int(a)
             for e, i, a in zip(solution.edges, idx, ages)}

    users = sorted(set(int(u) for u in users))
    branch_specs = []
    prod_fb = 1.0
    for path in solution.branches:
        ws = [w_use[routing.canon(u, v)] for u, v in zip(path, path[1:])]
        branch_specs.append((path[0], path[-1], ws))
        prod_fb *= (3.0 * math.prod(ws) + 1.0) / 4.0
    removal = set(solution.forks) - set(users)
    if solution.kind == "star":
        removal.add(solution.center)
    fidelity = statesim.pipeline_fidelity(branch_specs, users, sorted(removal))

    mean_age = float(ages.mean())
    r_size = len(solution.edges)
    w_r = math.prod(w_use.values())
    w0_prod = math.prod(float(graph.w0[i]) for i in idx)
    floor = w0_prod * delta ** (mean_age * r_size)
    return RealizedGhz(fidelity=fidelity, r_size=r_size, mean_age=mean_age,
                       consumed=tuple(int(i) for i in idx),
                       werner_product=w_r, branch_fidelity_product=prod_fb,
                       fidelity_floor=floor)
