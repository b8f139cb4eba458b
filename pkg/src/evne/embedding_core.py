"""Objective and metric primitives shared by every embedder.

Covers request revenue, embedding cost, the residual-fragment scattering
measure, capacity-aware shortest paths, and the three-way objective vector
(cost, fragmentation, power) that the solvers minimize.
"""

from __future__ import annotations

from dataclasses import dataclass
from heapq import heappop, heappush
from typing import NamedTuple

from .net_model import (InsufficientBandwidth, InsufficientCpu, InvalidMapping,
                        Mapping, SubstrateNetwork, SubstratePath, VneError,
                        VNRequest, aggregate_demands)
from .power_model import PowerConfig, embedding_power


class NoPath(VneError):
    def __init__(self, src: int, dst: int):
        super().__init__(f"no feasible substrate path from {src} to {dst}")
        self.src = src
        self.dst = dst


class InfeasibleMapping(VneError):
    """A mapping cannot be applied against the current residual state."""


@dataclass(frozen=True)
class FragmentationConfig:
    """Parameters of the scattering measure.

    ``q`` dampens the weight of small fragments relative to one large one;
    ``bw_lower_bound`` is the residual bandwidth a link needs to count as
    usable when fragments are formed.  ``max_path_len`` belongs to a
    rejected length-bounded fragment variant and is unused by default.
    """
    q: int = 2
    bw_lower_bound: float = 1.0
    max_path_len: int | None = None

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("fragment exponent q must be an integer >= 2")


class ObjectiveVector(NamedTuple):
    cost: float
    fragmentation: float
    power: float


def revenue(vnr: VNRequest) -> float:
    """Total demanded resources: CPU over nodes plus bandwidth over links.

    Lifetime gating is the simulator's business; this is the per-time-unit
    figure while the request is active.
    """
    vn = vnr.vn
    return (sum(v.cpu_demand for v in vn.nodes)
            + sum(l.bw_demand for l in vn.links))


def embedding_cost(vnr: VNRequest, m: Mapping) -> float:
    """Total allocated resources: CPU plus bandwidth times path length.

    A co-located virtual link (empty path) contributes nothing.
    """
    vn = vnr.vn
    if len(m.node_map) != len(vn.nodes) or len(m.link_map) != len(vn.links):
        raise InvalidMapping("mapping does not cover the virtual network")
    total = sum(v.cpu_demand for v in vn.nodes)
    for link, path in zip(vn.links, m.link_map):
        if m.node_map[link.u] == m.node_map[link.v]:
            if path:
                raise InvalidMapping(
                    f"virtual link {link.id}: co-located endpoints need the empty path")
            continue
        if len(path) < 2:
            raise InvalidMapping(f"virtual link {link.id}: missing substrate path")
        total += link.bw_demand * (len(path) - 1)
    return total


def shortest_feasible_path(sn: SubstrateNetwork, src: int, dst: int, bw: float,
                           max_hops: int | None = None) -> SubstratePath:
    """Minimum-hop loop-free path whose links all have residual >= ``bw``.

    Ties between equal-hop paths are broken by fewest powered-off nodes
    along the path, then by the lexicographically smallest node sequence,
    which keeps every caller reproducible.  ``src == dst`` yields the empty
    path; ``max_hops=None`` means unbounded.
    """
    if src == dst:
        return ()
    nodes = sn.nodes
    if max_hops is None:
        max_hops = len(nodes)  # a loop-free path cannot be longer
    if max_hops < 1:
        raise NoPath(src, dst)
    links = sn.links
    adjacency = sn.adjacency
    off = [0 if node.power_on else 1 for node in nodes]

    # Node-weighted Dijkstra from dst with (hops, activations) labels; the
    # activation count includes the labelled node itself.
    dist: list[tuple[int, int] | None] = [None] * len(nodes)
    dist[dst] = (0, off[dst])
    heap = [(0, off[dst], dst)]
    while heap:
        h, a, u = heappop(heap)
        if (h, a) != dist[u]:
            continue
        if h >= max_hops:
            continue
        for v, lid in adjacency[u]:
            if links[lid].bw_residual < bw:
                continue
            cand = (h + 1, a + off[v])
            known = dist[v]
            if known is None or cand < known:
                dist[v] = cand
                heappush(heap, (h + 1, cand[1], v))

    start = dist[src]
    if start is None or start[0] > max_hops:
        raise NoPath(src, dst)

    # Walk forward always taking the smallest-id neighbour that still lies
    # on an optimal path; adjacency lists are id-sorted.
    path = [src]
    h_rem, a_rem = start
    cur = src
    while cur != dst:
        want = (h_rem - 1, a_rem - off[cur])
        nxt = None
        for v, lid in adjacency[cur]:
            if links[lid].bw_residual < bw:
                continue
            if dist[v] == want:
                nxt = v
                break
        assert nxt is not None, "optimal-path reconstruction lost the trail"
        path.append(nxt)
        cur = nxt
        h_rem, a_rem = want
    return tuple(path)


def _fragment_residuals(cpu_residual, bw_residual, links, bound) -> list[float]:
    """Residual mass per fragment of the bandwidth-filtered subgraph.

    Fragments are connected components over links with residual >= bound;
    every link with both endpoints inside a fragment contributes its
    residual, even one below the bound.
    """
    n = len(cpu_residual)
    parent = list(range(n))

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for link in links:
        if bw_residual[link.id] >= bound:
            ru, rv = find(link.u), find(link.v)
            if ru != rv:
                parent[ru] = rv
    sums: dict[int, float] = {}
    for nid in range(n):
        root = find(nid)
        sums[root] = sums.get(root, 0.0) + cpu_residual[nid]
    for link in links:
        ru, rv = find(link.u), find(link.v)
        if ru == rv:
            sums[ru] += bw_residual[link.id]
    return list(sums.values())


def _snf_of_residuals(cpu_residual, bw_residual, links, q, bound) -> float:
    fragments = _fragment_residuals(cpu_residual, bw_residual, links, bound)
    total = sum(fragments)
    if total <= 0.0:
        return 0.0
    return 1.0 - sum(r ** q for r in fragments) / total ** q


def snf(sn: SubstrateNetwork, cfg: FragmentationConfig) -> float:
    """Scattering of residual resources across fragments, in [0, 1).

    0 when a single fragment carries all residual capacity; approaches 1 as
    the residual splinters into many equal fragments.  A fully exhausted
    substrate scores 0 by convention.
    """
    return _snf_of_residuals([n.cpu_residual for n in sn.nodes],
                             [l.bw_residual for l in sn.links],
                             sn.links, cfg.q, cfg.bw_lower_bound)


def evaluate_objectives(sn: SubstrateNetwork, vnr: VNRequest, m: Mapping,
                        power_cfg: PowerConfig,
                        frag_cfg: FragmentationConfig) -> ObjectiveVector:
    """Cost, post-embedding fragmentation, and marginal power for ``m``.

    All three are minimized.  Fragmentation is computed on a hypothetical
    copy of the residual state with the mapping applied; ``sn`` itself is
    never mutated.  Revenue is excluded: it is identical for every mapping
    of a given request, so it cannot discriminate between solutions.
    """
    try:
        cpu_need, bw_need = aggregate_demands(sn, vnr.vn, m)
        for host, amount in cpu_need.items():
            if amount > sn.nodes[host].cpu_residual:
                raise InsufficientCpu(host, amount, sn.nodes[host].cpu_residual)
        for lid, amount in bw_need.items():
            if amount > sn.links[lid].bw_residual:
                raise InsufficientBandwidth(lid, amount, sn.links[lid].bw_residual)
        cost = embedding_cost(vnr, m)
        power = embedding_power(sn, vnr, m, power_cfg)
    except (InvalidMapping, InsufficientCpu, InsufficientBandwidth) as exc:
        raise InfeasibleMapping(str(exc)) from exc
    cpu_after = [n.cpu_residual for n in sn.nodes]
    bw_after = [l.bw_residual for l in sn.links]
    for host, amount in cpu_need.items():
        cpu_after[host] -= amount
    for lid, amount in bw_need.items():
        bw_after[lid] -= amount
    frag = _snf_of_residuals(cpu_after, bw_after, sn.links,
                             frag_cfg.q, frag_cfg.bw_lower_bound)
    return ObjectiveVector(cost, frag, power)
