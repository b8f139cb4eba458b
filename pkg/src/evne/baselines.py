"""Two comparison embedders used by the experiment harness.

``greedy_two_stage`` places nodes and routes links in independent stages
with no backtracking; ``backtrack_bfs`` interleaves node placement and link
routing inside one bounded backtracking search.  Both rank hosts by the
residual CPU x residual bandwidth product rather than by power, and their
report labels are "greedy2s" and "btbfs".
"""

from __future__ import annotations

from .embedding_core import NoPath, shortest_feasible_path
from .mopso import DisconnectedVN, _backtracking_embed, order_virtual_nodes
from .net_model import (Mapping, SubstrateNetwork, SubstratePath, VNRequest)


def _residual_product(net: SubstrateNetwork, nid: int) -> float:
    node = net.nodes[nid]
    bw_sum = sum(net.links[lid].bw_residual for _, lid in net.adjacency[nid])
    return node.cpu_residual * bw_sum


def _greedy_rank(net: SubstrateNetwork, nid: int, demand: float):
    return (-_residual_product(net, nid), nid)


def greedy_two_stage(sn: SubstrateNetwork, vnr: VNRequest,
                     hops_max: int) -> Mapping | None:
    """Node stage then link stage, no coordination between them.

    Virtual nodes are taken by descending resource demand and each lands on
    the feasible host with the largest residual CPU x bandwidth product;
    links are then routed within ``hops_max``.  Any routing failure rejects
    the request outright.
    """
    vn = vnr.vn
    n = len(vn.nodes)
    scratch = sn.clone()
    scores = [vn.nodes[v].cpu_demand
              + sum(vn.links[lid].bw_demand for _, lid in vn.adjacency[v])
              for v in range(n)]
    hosts = [-1] * n
    for v in sorted(range(n), key=lambda v: (-scores[v], v)):
        demand = vn.nodes[v].cpu_demand
        best = None
        best_score = -1.0
        for node in scratch.nodes:
            if node.cpu_residual < demand:
                continue
            s = _residual_product(scratch, node.id)
            if s > best_score:
                best, best_score = node.id, s
        if best is None:
            return None
        scratch.alloc_cpu(best, demand)
        hosts[v] = best
    paths: list[SubstratePath] = []
    for link in vn.links:
        a, b = hosts[link.u], hosts[link.v]
        if a == b:
            path: SubstratePath = ()
        else:
            try:
                path = shortest_feasible_path(scratch, a, b, link.bw_demand,
                                              hops_max)
            except NoPath:
                return None
        scratch.alloc_path(path, link.bw_demand)
        paths.append(path)
    return Mapping(hosts, paths)


def backtrack_bfs(sn: SubstrateNetwork, vnr: VNRequest, hops_max: int,
                  max_backtrack: int) -> Mapping | None:
    """Single-stage backtracking embedder with resource-greedy ordering.

    Identical search to the swarm initializer's particle construction, but
    every candidate list (root included) is ordered by descending residual
    product, and the first success is returned.
    """
    vn = vnr.vn
    try:
        order = order_virtual_nodes(vn)
    except DisconnectedVN:
        return None
    if sum(v.cpu_demand for v in vn.nodes) > sum(nd.cpu_residual for nd in sn.nodes):
        return None
    root_demand = vn.nodes[order[0]].cpu_demand
    roots = [node.id for node in sn.nodes if node.cpu_residual >= root_demand]
    roots.sort(key=lambda nid: _greedy_rank(sn, nid, root_demand))
    scratch = sn.clone()
    pos = _backtracking_embed(scratch, vn, order, roots, hops_max,
                              max_backtrack, _greedy_rank)
    return pos.to_mapping() if pos is not None else None
