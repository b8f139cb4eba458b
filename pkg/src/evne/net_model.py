"""Substrate and virtual network model with transactional resource accounting.

Substrate nodes track CPU residuals, power state, and a routing-card
reference count; links track bandwidth residuals.  An embedding is applied
atomically: demands are aggregated and validated first, then committed and
recorded as deltas keyed by request id, so releasing a request restores the
exact prior state.
"""

from __future__ import annotations

from dataclasses import dataclass

SubstratePath = tuple[int, ...]


class VneError(Exception):
    """Base class for embedding errors."""


class InvalidMapping(VneError):
    """A mapping violates a structural invariant."""


class InsufficientCpu(VneError):
    def __init__(self, node_id: int, needed: float, available: float):
        super().__init__(
            f"node {node_id}: need {needed} CPU, {available} available")
        self.node_id = node_id
        self.needed = needed
        self.available = available


class InsufficientBandwidth(VneError):
    def __init__(self, link_id: int, needed: float, available: float):
        super().__init__(
            f"link {link_id}: need {needed} bandwidth, {available} available")
        self.link_id = link_id
        self.needed = needed
        self.available = available


class NotAllocated(VneError):
    """Release of a request that holds no allocation."""


class ParseError(VneError):
    """A configuration or topology file is malformed."""

    def __init__(self, path, line_no: int, reason: str):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = path
        self.line_no = line_no
        self.reason = reason


@dataclass(slots=True)
class SubstrateNode:
    id: int
    cpu_capacity: float
    cpu_residual: float
    profile: int = 0
    power_on: bool = False
    routing_enabled: bool = False
    routing_refcount: int = 0
    hosted_count: int = 0

    def utilization(self) -> float:
        """Allocated fraction of this node's CPU, in [0, 1]."""
        if self.cpu_capacity <= 0:
            return 0.0
        return (self.cpu_capacity - self.cpu_residual) / self.cpu_capacity


@dataclass(slots=True)
class SubstrateLink:
    id: int
    u: int
    v: int
    bw_capacity: float
    bw_residual: float
    active_paths: int = 0


class SubstrateNetwork:
    """Undirected graph of capacity-tracked nodes and links.

    At most one link per node pair and no self-loops.  Topology is fixed at
    construction; only resource state mutates afterwards, which lets clones
    share the adjacency indexes.
    """

    def __init__(self, nodes, links, coords=None):
        self.nodes: list[SubstrateNode] = list(nodes)
        self.links: list[SubstrateLink] = list(links)
        self.coords = list(coords) if coords is not None else None
        n = len(self.nodes)
        self.adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self._pair_to_link: dict[tuple[int, int], int] = {}
        for ln in self.links:
            if ln.u == ln.v:
                raise ValueError(f"link {ln.id} is a self-loop")
            if not (0 <= ln.u < n and 0 <= ln.v < n):
                raise ValueError(f"link {ln.id} references a missing node")
            pair = (ln.u, ln.v) if ln.u < ln.v else (ln.v, ln.u)
            if pair in self._pair_to_link:
                raise ValueError(f"parallel link between {ln.u} and {ln.v}")
            self._pair_to_link[pair] = ln.id
            self.adjacency[ln.u].append((ln.v, ln.id))
            self.adjacency[ln.v].append((ln.u, ln.id))
        for adj in self.adjacency:
            adj.sort()
        self._allocations: dict[int, _Allocation] = {}

    def link_between(self, a: int, b: int) -> SubstrateLink | None:
        pair = (a, b) if a < b else (b, a)
        idx = self._pair_to_link.get(pair)
        return self.links[idx] if idx is not None else None

    def clone(self) -> "SubstrateNetwork":
        """Copy resource state; topology indexes are shared (never mutated).

        Allocation records are not carried over: a clone is a scratch value,
        it cannot release requests applied to the original.
        """
        other = SubstrateNetwork.__new__(SubstrateNetwork)
        other.nodes = [
            SubstrateNode(nd.id, nd.cpu_capacity, nd.cpu_residual, nd.profile,
                          nd.power_on, nd.routing_enabled, nd.routing_refcount,
                          nd.hosted_count)
            for nd in self.nodes
        ]
        other.links = [
            SubstrateLink(ln.id, ln.u, ln.v, ln.bw_capacity, ln.bw_residual,
                          ln.active_paths)
            for ln in self.links
        ]
        other.coords = self.coords
        other.adjacency = self.adjacency
        other._pair_to_link = self._pair_to_link
        other._allocations = {}
        return other

    # -- low-level allocation primitives ------------------------------------
    # Used by solver scratch copies; apply/release below commit aggregated
    # deltas instead so a validated commit can never fail halfway.

    def alloc_cpu(self, node_id: int, amount: float) -> None:
        node = self.nodes[node_id]
        if amount > node.cpu_residual:
            raise InsufficientCpu(node_id, amount, node.cpu_residual)
        node.cpu_residual -= amount
        node.hosted_count += 1
        node.power_on = True

    def free_cpu(self, node_id: int, amount: float) -> None:
        node = self.nodes[node_id]
        node.hosted_count -= 1
        if node.hosted_count == 0:
            # hosting is the only CPU consumer: reset exactly, no float drift
            node.cpu_residual = node.cpu_capacity
            if node.routing_refcount == 0:
                node.power_on = False
        else:
            node.cpu_residual += amount

    def alloc_path(self, path: SubstratePath, bw: float) -> None:
        if not path:
            return
        link_ids = self.path_links(path)
        for lid in link_ids:
            if bw > self.links[lid].bw_residual:
                raise InsufficientBandwidth(lid, bw, self.links[lid].bw_residual)
        for lid in link_ids:
            link = self.links[lid]
            link.bw_residual -= bw
            link.active_paths += 1
        for nid in path:
            node = self.nodes[nid]
            node.routing_refcount += 1
            node.routing_enabled = True
            node.power_on = True

    def free_path(self, path: SubstratePath, bw: float) -> None:
        if not path:
            return
        for lid in self.path_links(path):
            link = self.links[lid]
            link.bw_residual += bw
            link.active_paths -= 1
            if link.active_paths == 0:
                link.bw_residual = link.bw_capacity
        for nid in path:
            node = self.nodes[nid]
            node.routing_refcount -= 1
            node.routing_enabled = node.routing_refcount > 0
            if node.hosted_count == 0 and node.routing_refcount == 0:
                node.power_on = False

    def path_links(self, path: SubstratePath) -> list[int]:
        """Link ids along a node sequence; InvalidMapping on a missing hop."""
        out = []
        for a, b in zip(path, path[1:]):
            pair = (a, b) if a < b else (b, a)
            lid = self._pair_to_link.get(pair)
            if lid is None:
                raise InvalidMapping(f"no substrate link between {a} and {b}")
            out.append(lid)
        return out

    def validate_state(self) -> None:
        """Assert the resource/state coupling invariants (test helper)."""
        for node in self.nodes:
            assert 0 <= node.cpu_residual <= node.cpu_capacity, node
            assert node.routing_enabled == (node.routing_refcount > 0), node
            if not node.power_on:
                assert node.cpu_residual == node.cpu_capacity, node
                assert not node.routing_enabled, node
                assert node.hosted_count == 0, node
        for link in self.links:
            assert 0 <= link.bw_residual <= link.bw_capacity, link


@dataclass(slots=True)
class VirtualNode:
    id: int
    cpu_demand: float


@dataclass(slots=True)
class VirtualLink:
    id: int
    u: int
    v: int
    bw_demand: float


class VirtualNetwork:
    """Weighted undirected graph of CPU demands and bandwidth demands."""

    def __init__(self, nodes, links):
        self.nodes: list[VirtualNode] = list(nodes)
        self.links: list[VirtualLink] = list(links)
        n = len(self.nodes)
        self.adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        seen = set()
        for ln in self.links:
            if ln.u == ln.v:
                raise ValueError(f"virtual link {ln.id} is a self-loop")
            if not (0 <= ln.u < n and 0 <= ln.v < n):
                raise ValueError(f"virtual link {ln.id} references a missing node")
            pair = (ln.u, ln.v) if ln.u < ln.v else (ln.v, ln.u)
            if pair in seen:
                raise ValueError(f"parallel virtual link between {ln.u} and {ln.v}")
            seen.add(pair)
            self.adjacency[ln.u].append((ln.v, ln.id))
            self.adjacency[ln.v].append((ln.u, ln.id))
        for adj in self.adjacency:
            adj.sort()


@dataclass(slots=True)
class VNRequest:
    """A virtual network plus its arrival time and lifetime."""
    id: int
    vn: VirtualNetwork
    arrival: float
    lifetime: float
    state: str = "pending"  # pending | active | rejected | departed


@dataclass(slots=True)
class Mapping:
    """Virtual-node to substrate-node and virtual-link to path assignment.

    ``link_map`` is aligned with the virtual network's link list; a link
    whose endpoints share a substrate node maps to the empty path.
    """
    node_map: list[int]
    link_map: list[SubstratePath]


@dataclass(slots=True)
class _Allocation:
    """Deltas applied for one request, used to release it exactly."""
    cpu: dict[int, float]          # node -> summed CPU taken
    hosts: dict[int, int]          # node -> hosted virtual node count
    bw: dict[int, float]           # link -> summed bandwidth taken
    path_counts: dict[int, int]    # link -> number of paths crossing it
    relays: dict[int, int]         # node -> routing refcount increments


def validate_structure(sn: SubstrateNetwork, vn: VirtualNetwork, m: Mapping) -> None:
    """Raise InvalidMapping unless ``m`` is structurally sound against ``sn``."""
    n_sub = len(sn.nodes)
    if len(m.node_map) != len(vn.nodes):
        raise InvalidMapping(
            f"node map covers {len(m.node_map)} of {len(vn.nodes)} virtual nodes")
    for host in m.node_map:
        if not (0 <= host < n_sub):
            raise InvalidMapping(f"substrate node {host} does not exist")
    if len(m.link_map) != len(vn.links):
        raise InvalidMapping(
            f"link map covers {len(m.link_map)} of {len(vn.links)} virtual links")
    for link, path in zip(vn.links, m.link_map):
        a = m.node_map[link.u]
        b = m.node_map[link.v]
        if a == b:
            if path:
                raise InvalidMapping(
                    f"virtual link {link.id}: co-located endpoints need the empty path")
            continue
        if len(path) < 2:
            raise InvalidMapping(f"virtual link {link.id}: missing substrate path")
        if len(set(path)) != len(path):
            raise InvalidMapping(f"virtual link {link.id}: path revisits a node")
        if {path[0], path[-1]} != {a, b}:
            raise InvalidMapping(
                f"virtual link {link.id}: path endpoints {path[0]},{path[-1]} "
                f"do not match hosts {a},{b}")
        sn.path_links(path)


def aggregate_demands(sn: SubstrateNetwork, vn: VirtualNetwork,
                      m: Mapping) -> tuple[dict[int, float], dict[int, float]]:
    """Summed CPU per substrate node and bandwidth per substrate link.

    Validates structure; co-located virtual nodes have their demands summed
    on the shared host.
    """
    validate_structure(sn, vn, m)
    cpu_need: dict[int, float] = {}
    for vnode, host in zip(vn.nodes, m.node_map):
        cpu_need[host] = cpu_need.get(host, 0.0) + vnode.cpu_demand
    bw_need: dict[int, float] = {}
    for link, path in zip(vn.links, m.link_map):
        for lid in sn.path_links(path):
            bw_need[lid] = bw_need.get(lid, 0.0) + link.bw_demand
    return cpu_need, bw_need


def validate_mapping(sn: SubstrateNetwork, vnr: VNRequest, m: Mapping) -> None:
    """Dry-run feasibility check: structure plus residual capacities."""
    cpu_need, bw_need = aggregate_demands(sn, vnr.vn, m)
    for host in sorted(cpu_need):
        if cpu_need[host] > sn.nodes[host].cpu_residual:
            raise InsufficientCpu(host, cpu_need[host], sn.nodes[host].cpu_residual)
    for lid in sorted(bw_need):
        if bw_need[lid] > sn.links[lid].bw_residual:
            raise InsufficientBandwidth(lid, bw_need[lid], sn.links[lid].bw_residual)


def apply_mapping(sn: SubstrateNetwork, vnr: VNRequest, m: Mapping) -> None:
    """Allocate all resources for ``m`` atomically.

    Hosting nodes power on; every node of every non-empty path (endpoints
    included) gains a routing-card reference.  On any validation failure the
    network is left untouched.
    """
    if vnr.id in sn._allocations:
        raise InvalidMapping(f"request {vnr.id} is already embedded")
    vn = vnr.vn
    cpu_need, bw_need = aggregate_demands(sn, vn, m)
    for host in sorted(cpu_need):
        if cpu_need[host] > sn.nodes[host].cpu_residual:
            raise InsufficientCpu(host, cpu_need[host], sn.nodes[host].cpu_residual)
    for lid in sorted(bw_need):
        if bw_need[lid] > sn.links[lid].bw_residual:
            raise InsufficientBandwidth(lid, bw_need[lid], sn.links[lid].bw_residual)

    # commit: aggregated deltas only, so the checks above fully cover it
    hosts: dict[int, int] = {}
    for host in m.node_map:
        hosts[host] = hosts.get(host, 0) + 1
    path_counts: dict[int, int] = {}
    relays: dict[int, int] = {}
    for path in m.link_map:
        for lid in sn.path_links(path):
            path_counts[lid] = path_counts.get(lid, 0) + 1
        for nid in path:
            relays[nid] = relays.get(nid, 0) + 1

    for nid, amount in cpu_need.items():
        node = sn.nodes[nid]
        node.cpu_residual -= amount
        node.hosted_count += hosts[nid]
        node.power_on = True
    for lid, amount in bw_need.items():
        link = sn.links[lid]
        link.bw_residual -= amount
        link.active_paths += path_counts[lid]
    for nid, count in relays.items():
        node = sn.nodes[nid]
        node.routing_refcount += count
        node.routing_enabled = True
        node.power_on = True
    sn._allocations[vnr.id] = _Allocation(cpu_need, hosts, bw_need,
                                          path_counts, relays)


def release_mapping(sn: SubstrateNetwork, vnr: VNRequest, m: Mapping) -> None:
    """Return all resources taken by a previously applied mapping.

    Residuals are restored from the recorded deltas; counters that reach
    zero snap residuals back to capacity so interleaved holders cannot leave
    float drift behind.
    """
    rec = sn._allocations.pop(vnr.id, None)
    if rec is None:
        raise NotAllocated(f"request {vnr.id} holds no allocation")
    for nid, amount in rec.cpu.items():
        node = sn.nodes[nid]
        node.hosted_count -= rec.hosts[nid]
        if node.hosted_count == 0:
            node.cpu_residual = node.cpu_capacity
        else:
            node.cpu_residual += amount
    for lid, amount in rec.bw.items():
        link = sn.links[lid]
        link.active_paths -= rec.path_counts[lid]
        if link.active_paths == 0:
            link.bw_residual = link.bw_capacity
        else:
            link.bw_residual += amount
    for nid, count in rec.relays.items():
        node = sn.nodes[nid]
        node.routing_refcount -= count
        node.routing_enabled = node.routing_refcount > 0
    for nid in set(rec.cpu) | set(rec.relays):
        node = sn.nodes[nid]
        if node.hosted_count == 0 and node.routing_refcount == 0:
            node.power_on = False
