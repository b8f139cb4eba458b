"""Seeded substrate/request generation and file persistence.

Substrates are Waxman-style: nodes scattered in the unit square, pair scores
beta*exp(-d/(alpha*L)), and edges taken in descending score order until the
exact target count, patched to stay connected.  Requests arrive as a Poisson
process with uniform lifetimes.  Substrates serialize to a line-oriented
BRITE dialect, workloads to JSON lines.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass

from .net_model import (ParseError, SubstrateLink, SubstrateNetwork,
                        SubstrateNode, VirtualLink, VirtualNetwork,
                        VirtualNode, VneError, VNRequest)
from .power_model import PowerConfig, default_power_config


class InvalidSpec(VneError):
    """A generator specification violates its own constraints."""


@dataclass
class SubstrateGenSpec:
    node_count: int
    target_link_count: int
    bw_min: float = 50.0
    bw_max: float = 100.0
    waxman_alpha: float = 0.5
    waxman_beta: float = 0.2
    profile_ids: tuple[int, ...] = (0, 1)
    seed: int = 0


@dataclass
class WorkloadSpec:
    vnr_count: int
    vn_node_min: int = 2
    vn_node_max: int = 20
    connectivity: float = 0.5
    cpu_choices: tuple[float, ...] = (2500.0, 2000.0, 1000.0, 500.0)
    bw_min: float = 1.0
    bw_max: float = 50.0
    arrival_rate: float = 10.0      # requests per 100 time units
    lifetime_min: float = 300.0
    lifetime_max: float = 700.0
    seed: int = 0


def _check_substrate_spec(spec: SubstrateGenSpec, power_cfg: PowerConfig) -> None:
    if spec.node_count < 1:
        raise InvalidSpec("node_count must be at least 1")
    if spec.target_link_count < spec.node_count - 1:
        raise InvalidSpec("target_link_count below the spanning-tree minimum")
    if spec.target_link_count > spec.node_count * (spec.node_count - 1) // 2:
        raise InvalidSpec("target_link_count exceeds the simple-graph maximum")
    if not (0.0 < spec.waxman_alpha <= 1.0 and 0.0 < spec.waxman_beta <= 1.0):
        raise InvalidSpec("waxman parameters must lie in (0, 1]")
    if spec.bw_min > spec.bw_max or spec.bw_min < 0:
        raise InvalidSpec("bad bandwidth range")
    if not spec.profile_ids:
        raise InvalidSpec("no profiles to assign")
    for pid in spec.profile_ids:
        prof = power_cfg.get(pid)
        if prof.cpu_mips is None:
            raise InvalidSpec(f"profile {prof.name} defines no cpu_mips capacity")


def _connected(n: int, edges) -> bool:
    if n <= 1:
        return True
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


def gen_substrate(spec: SubstrateGenSpec,
                  power_cfg: PowerConfig | None = None) -> SubstrateNetwork:
    """Deterministic Waxman-style substrate with an exact link count.

    Edges fill in descending pair-score order with a seeded jitter breaking
    exact ties; if the result is disconnected, the best cross-component
    pairs are swapped in for the cheapest cycle edges so the count holds.
    Node capacities come from the assigned server profile; everything starts
    powered off.
    """
    if power_cfg is None:
        power_cfg = default_power_config()
    _check_substrate_spec(spec, power_cfg)
    rng = random.Random(spec.seed)
    n = spec.node_count
    pts = [(rng.random(), rng.random()) for _ in range(n)]
    max_d = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            d = math.dist(pts[i], pts[j])
            if d > max_d:
                max_d = d
    denom = spec.waxman_alpha * max_d
    scored = []
    for i in range(n):
        for j in range(i + 1, n):
            d = math.dist(pts[i], pts[j])
            score = spec.waxman_beta * (math.exp(-d / denom) if denom > 0 else 1.0)
            scored.append((score, rng.random(), i, j))
    scored.sort(key=lambda t: (-t[0], t[1]))
    chosen = [(i, j) for _, _, i, j in scored[:spec.target_link_count]]
    chosen_set = set(chosen)

    while not _connected(n, chosen):
        comp = _components(n, chosen)
        label = {}
        for ci, members in enumerate(comp):
            for nid in members:
                label[nid] = ci
        bridge = None
        for score, tie, i, j in scored:
            if (i, j) not in chosen_set and label[i] != label[j]:
                bridge = (i, j)
                break
        assert bridge is not None, "complete graph is always connectable"
        chosen.append(bridge)
        chosen_set.add(bridge)
        # drop the cheapest edge that sits on a cycle to keep the count
        for score, tie, i, j in reversed(scored):
            edge = (i, j)
            if edge not in chosen_set or edge == bridge:
                continue
            rest = [e for e in chosen if e != edge]
            if _connected_pair(n, rest, i, j):
                chosen.remove(edge)
                chosen_set.discard(edge)
                break

    chosen.sort()
    profiles = [rng.choice(spec.profile_ids) for _ in range(n)]
    nodes = []
    for nid in range(n):
        cap = power_cfg.get(profiles[nid]).cpu_mips
        nodes.append(SubstrateNode(nid, cap, cap, profiles[nid]))
    links = []
    for lid, (u, v) in enumerate(chosen):
        bw = rng.uniform(spec.bw_min, spec.bw_max)
        links.append(SubstrateLink(lid, u, v, bw, bw))
    return SubstrateNetwork(nodes, links, coords=pts)


def _components(n: int, edges) -> list[list[int]]:
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    out = []
    seen = set()
    for start in range(n):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
                    stack.append(y)
        out.append(sorted(comp))
    return out


def _connected_pair(n: int, edges, a: int, b: int) -> bool:
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {a}
    stack = [a]
    while stack:
        x = stack.pop()
        if x == b:
            return True
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return False


def gen_workload(spec: WorkloadSpec) -> list[VNRequest]:
    """Poisson arrivals of connected random virtual networks.

    Link probability equals ``connectivity`` with a spanning patch joining
    stray components; node CPUs draw from ``cpu_choices``; lifetimes and
    bandwidths are uniform.
    """
    if spec.vnr_count < 0:
        raise InvalidSpec("vnr_count must be non-negative")
    if spec.vn_node_min < 1 or spec.vn_node_max < spec.vn_node_min:
        raise InvalidSpec("bad virtual node count range")
    if not (0.0 < spec.connectivity <= 1.0):
        raise InvalidSpec("connectivity must lie in (0, 1]")
    if not spec.cpu_choices:
        raise InvalidSpec("no CPU choices")
    if spec.bw_min > spec.bw_max or spec.bw_min <= 0:
        raise InvalidSpec("bad bandwidth range")
    if spec.arrival_rate <= 0:
        raise InvalidSpec("arrival_rate must be positive")
    if spec.lifetime_min > spec.lifetime_max or spec.lifetime_min <= 0:
        raise InvalidSpec("bad lifetime range")
    rng = random.Random(spec.seed)
    mean_gap = 100.0 / spec.arrival_rate
    clock = 0.0
    requests = []
    for rid in range(spec.vnr_count):
        clock += rng.expovariate(1.0 / mean_gap)
        k = rng.randint(spec.vn_node_min, spec.vn_node_max)
        nodes = [VirtualNode(i, float(rng.choice(spec.cpu_choices)))
                 for i in range(k)]
        edges = []
        for i in range(k):
            for j in range(i + 1, k):
                if rng.random() < spec.connectivity:
                    edges.append((i, j, rng.uniform(spec.bw_min, spec.bw_max)))
        comps = _components(k, [(u, v) for u, v, _ in edges])
        while len(comps) > 1:
            a = comps[0][rng.randrange(len(comps[0]))]
            b = comps[1][rng.randrange(len(comps[1]))]
            edges.append((min(a, b), max(a, b),
                          rng.uniform(spec.bw_min, spec.bw_max)))
            comps = [sorted(comps[0] + comps[1])] + comps[2:]
        links = [VirtualLink(lid, u, v, bw)
                 for lid, (u, v, bw) in enumerate(sorted(edges))]
        lifetime = rng.uniform(spec.lifetime_min, spec.lifetime_max)
        requests.append(VNRequest(rid, VirtualNetwork(nodes, links),
                                  arrival=clock, lifetime=lifetime))
    return requests


# ---------------------------------------------------------------------------
# BRITE-dialect substrate files
# ---------------------------------------------------------------------------

_COORD_SCALE = 1000.0


def brite_write(sn: SubstrateNetwork, path,
                power_cfg: PowerConfig | None = None) -> None:
    """Write the substrate topology, capacities, and profile names."""
    if power_cfg is None:
        power_cfg = default_power_config()
    coords = sn.coords or [(0.0, 0.0)] * len(sn.nodes)
    degree = [len(adj) for adj in sn.adjacency]
    lines = [f"Topology: ( {len(sn.nodes)} Nodes, {len(sn.links)} Edges )", ""]
    lines.append(f"Nodes: ( {len(sn.nodes)} )")
    for node in sn.nodes:
        x, y = coords[node.id]
        name = power_cfg.get(node.profile).name
        # capacity fields use repr so they round-trip bit-exactly
        lines.append(f"{node.id} {x * _COORD_SCALE:.6f} {y * _COORD_SCALE:.6f} "
                     f"{degree[node.id]} {degree[node.id]} "
                     f"{node.cpu_capacity!r} {name}")
    lines.append("")
    lines.append(f"Edges: ( {len(sn.links)} )")
    for link in sn.links:
        (x1, y1), (x2, y2) = coords[link.u], coords[link.v]
        length = math.dist((x1, y1), (x2, y2)) * _COORD_SCALE
        lines.append(f"{link.id} {link.u} {link.v} {length:.6f} 0.000000 "
                     f"{link.bw_capacity!r} -1 -1 E_RT U")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


_TOPOLOGY_RE = re.compile(r"Topology:\s*\(\s*(\d+)\s+Nodes,\s*(\d+)\s+Edges\s*\)")
_NODES_RE = re.compile(r"Nodes:\s*\(\s*(\d+)\s*\)")
_EDGES_RE = re.compile(r"Edges:\s*\(\s*(\d+)\s*\)")


def brite_read(path, power_cfg: PowerConfig | None = None) -> SubstrateNetwork:
    """Parse a BRITE-dialect file back into a pristine substrate."""
    if power_cfg is None:
        power_cfg = default_power_config()
    with open(path, encoding="utf-8") as fh:
        raw = [(no, line.strip()) for no, line in enumerate(fh, 1)]
    lines = [(no, line) for no, line in raw if line]
    if not lines:
        raise ParseError(path, 0, "empty file")
    pos = 0
    no, header = lines[pos]
    m = _TOPOLOGY_RE.match(header)
    if not m:
        raise ParseError(path, no, "expected 'Topology: ( N Nodes, E Edges )'")
    n_nodes, n_edges = int(m.group(1)), int(m.group(2))
    pos += 1
    no, sect = lines[pos]
    m = _NODES_RE.match(sect)
    if not m or int(m.group(1)) != n_nodes:
        raise ParseError(path, no, "expected matching 'Nodes: ( N )' section")
    pos += 1
    nodes: list[SubstrateNode] = []
    coords = []
    for _ in range(n_nodes):
        if pos >= len(lines):
            raise ParseError(path, raw[-1][0], "truncated node section")
        no, line = lines[pos]
        parts = line.split()
        if len(parts) != 7:
            raise ParseError(path, no, f"node line needs 7 fields, got {len(parts)}")
        try:
            nid = int(parts[0])
            x, y = float(parts[1]), float(parts[2])
            cap = float(parts[5])
        except ValueError as exc:
            raise ParseError(path, no, f"bad numeric field: {exc}") from exc
        if nid != len(nodes):
            raise ParseError(path, no, f"node ids must be 0-based and ordered, got {nid}")
        try:
            profile = power_cfg.index_of(parts[6])
        except VneError as exc:
            raise ParseError(path, no, str(exc)) from exc
        nodes.append(SubstrateNode(nid, cap, cap, profile))
        coords.append((x / _COORD_SCALE, y / _COORD_SCALE))
        pos += 1
    no, sect = lines[pos]
    m = _EDGES_RE.match(sect)
    if not m or int(m.group(1)) != n_edges:
        raise ParseError(path, no, "expected matching 'Edges: ( E )' section")
    pos += 1
    links: list[SubstrateLink] = []
    for _ in range(n_edges):
        if pos >= len(lines):
            raise ParseError(path, raw[-1][0], "truncated edge section")
        no, line = lines[pos]
        parts = line.split()
        if len(parts) != 10:
            raise ParseError(path, no, f"edge line needs 10 fields, got {len(parts)}")
        try:
            lid = int(parts[0])
            u, v = int(parts[1]), int(parts[2])
            bw = float(parts[5])
        except ValueError as exc:
            raise ParseError(path, no, f"bad numeric field: {exc}") from exc
        if lid != len(links):
            raise ParseError(path, no, f"edge ids must be 0-based and ordered, got {lid}")
        if not (0 <= u < n_nodes and 0 <= v < n_nodes):
            raise ParseError(path, no, f"edge endpoint {max(u, v)} does not exist")
        links.append(SubstrateLink(lid, u, v, bw, bw))
        pos += 1
    if pos != len(lines):
        raise ParseError(path, lines[pos][0], "trailing content after edge section")
    try:
        return SubstrateNetwork(nodes, links, coords=coords)
    except ValueError as exc:
        raise ParseError(path, 0, str(exc)) from exc


# ---------------------------------------------------------------------------
# JSON-lines workload files
# ---------------------------------------------------------------------------

def workload_write(requests: list[VNRequest], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for vnr in requests:
            record = {
                "id": vnr.id,
                "arrival": vnr.arrival,
                "lifetime": vnr.lifetime,
                "nodes": [[v.id, v.cpu_demand] for v in vnr.vn.nodes],
                "links": [[l.u, l.v, l.bw_demand] for l in vnr.vn.links],
            }
            fh.write(json.dumps(record) + "\n")


def workload_read(path) -> list[VNRequest]:
    requests = []
    with open(path, encoding="utf-8") as fh:
        for no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                nodes = [VirtualNode(int(i), float(cpu)) for i, cpu in rec["nodes"]]
                links = [VirtualLink(lid, int(u), int(v), float(bw))
                         for lid, (u, v, bw) in enumerate(rec["links"])]
                vnr = VNRequest(int(rec["id"]), VirtualNetwork(nodes, links),
                                float(rec["arrival"]), float(rec["lifetime"]))
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise ParseError(path, no, f"bad request record: {exc}") from exc
            requests.append(vnr)
    requests.sort(key=lambda r: (r.arrival, r.id))
    return requests
