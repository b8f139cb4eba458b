"""Memetic multi-objective discrete particle swarm embedder.

A particle's position is a full embedding (one substrate host per virtual
node plus consistent link paths); its velocity is one substrate path per
dimension that drags the assignment toward an attractor.  Leaders come from
a bounded external archive of mutually non-dominated solutions, and every
move is polished by a neighbourhood local search, so the swarm only ever
holds feasible embeddings.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .embedding_core import (FragmentationConfig, NoPath, ObjectiveVector,
                             evaluate_objectives, shortest_feasible_path)
from .net_model import (Mapping, SubstrateNetwork, SubstratePath, VirtualNetwork,
                        VneError, VNRequest)
from .power_model import PowerConfig, incremental_node_power


class DisconnectedVN(VneError):
    """The virtual network has more than one component; it is rejected."""


@dataclass(slots=True)
class Position:
    """Node assignment plus per-virtual-link substrate paths."""
    hosts: list[int]
    paths: list[SubstratePath]

    def copy(self) -> "Position":
        return Position(list(self.hosts), list(self.paths))

    def key(self):
        return (tuple(self.hosts), tuple(self.paths))

    def to_mapping(self) -> Mapping:
        return Mapping(list(self.hosts), list(self.paths))


Velocity = list  # one SubstratePath per virtual node; () means "stay"


@dataclass(slots=True)
class Particle:
    position: Position
    velocity: Velocity
    objectives: ObjectiveVector
    pbest: Position
    pbest_objectives: ObjectiveVector
    rank: int = 0
    crowding: float = 0.0


@dataclass(slots=True)
class ArchiveEntry:
    position: Position
    objectives: ObjectiveVector


@dataclass(slots=True)
class ExternalArchive:
    """Bounded store of mutually non-dominated solutions."""
    members: list[ArchiveEntry] = field(default_factory=list)
    capacity: int = 20


@dataclass
class SolverParams:
    iterations_max: int = 5
    swarm_size: int = 10
    ea_max_size: int = 20
    hops_max: int = 2
    max_backtrack: int | None = None   # None -> 3 x number of virtual nodes
    w: float = 0.4
    c1: float = 1.0
    c2: float = 1.0
    pro_mut: float | None = None       # None -> 1 / number of virtual nodes
    seed: int = 0


@dataclass
class MopsoResult:
    mapping: Mapping
    objectives: ObjectiveVector
    archive: ExternalArchive


# ---------------------------------------------------------------------------
# Pareto machinery
# ---------------------------------------------------------------------------

def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True when ``a`` is no worse anywhere and strictly better somewhere."""
    better = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            better = True
    return better


def fast_nondominated_sort(vectors: Sequence[Sequence[float]]) -> list[list[int]]:
    """Indexes partitioned into fronts F1, F2, ... by domination level."""
    n = len(vectors)
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    domination_count = [0] * n
    fronts: list[list[int]] = [[]]
    for p in range(n):
        vp = vectors[p]
        for q in range(p + 1, n):
            vq = vectors[q]
            if dominates(vp, vq):
                dominated_by[p].append(q)
                domination_count[q] += 1
            elif dominates(vq, vp):
                dominated_by[q].append(p)
                domination_count[p] += 1
    for p in range(n):
        if domination_count[p] == 0:
            fronts[0].append(p)
    i = 0
    while fronts[i]:
        nxt = []
        for p in fronts[i]:
            for q in dominated_by[p]:
                domination_count[q] -= 1
                if domination_count[q] == 0:
                    nxt.append(q)
        i += 1
        fronts.append(sorted(nxt))
    fronts.pop()
    return fronts


def crowding_distance(front: Sequence[Sequence[float]]) -> list[float]:
    """Per-member density estimate; boundary members are infinite."""
    n = len(front)
    if n == 0:
        return []
    if n <= 2:
        return [float("inf")] * n
    k = len(front[0])
    dist = [0.0] * n
    for obj in range(k):
        order = sorted(range(n), key=lambda i: front[i][obj])
        lo = front[order[0]][obj]
        hi = front[order[-1]][obj]
        dist[order[0]] = dist[order[-1]] = float("inf")
        span = hi - lo
        if span <= 0.0:
            continue  # a flat objective separates nobody
        for j in range(1, n - 1):
            i = order[j]
            if dist[i] == float("inf"):
                continue
            gap = front[order[j + 1]][obj] - front[order[j - 1]][obj]
            dist[i] += gap / span
    return dist


def update_archive(archive: ExternalArchive,
                   swarm: Iterable[Particle]) -> ExternalArchive:
    """Merge swarm positions into the archive and truncate.

    The pool is non-domination sorted, ordered within fronts by descending
    crowding distance, cut at capacity, and finally stripped of anything a
    retained member dominates, so the archive stays mutually non-dominated.
    """
    pool: list[ArchiveEntry] = []
    seen = set()
    candidates = list(archive.members)
    candidates.extend(ArchiveEntry(p.position.copy(), p.objectives) for p in swarm)
    for entry in candidates:
        k = entry.position.key()
        if k in seen:
            continue
        seen.add(k)
        pool.append(entry)
    if not pool:
        return ExternalArchive([], archive.capacity)
    vectors = [e.objectives for e in pool]
    ordered: list[int] = []
    for front in fast_nondominated_sort(vectors):
        cds = crowding_distance([vectors[i] for i in front])
        by_crowding = sorted(range(len(front)), key=lambda j: -cds[j])
        ordered.extend(front[j] for j in by_crowding)
    kept = [pool[i] for i in ordered[:archive.capacity]]
    pure = [e for i, e in enumerate(kept)
            if not any(dominates(o.objectives, e.objectives)
                       for j, o in enumerate(kept) if j != i)]
    return ExternalArchive(pure, archive.capacity)


# ---------------------------------------------------------------------------
# Swarm construction
# ---------------------------------------------------------------------------

def order_virtual_nodes(vn: VirtualNetwork) -> list[int]:
    """Breadth-first placement order from the most demanding virtual node.

    The root maximizes cpu demand plus incident bandwidth; each tree level
    is sorted by descending score, ties by ascending id.
    """
    n = len(vn.nodes)
    scores = [vn.nodes[v].cpu_demand
              + sum(vn.links[lid].bw_demand for _, lid in vn.adjacency[v])
              for v in range(n)]
    root = min(range(n), key=lambda v: (-scores[v], v))
    order = [root]
    visited = {root}
    level = [root]
    while level:
        frontier = set()
        for v in level:
            for u, _ in vn.adjacency[v]:
                if u not in visited:
                    frontier.add(u)
        level = sorted(frontier, key=lambda v: (-scores[v], v))
        visited.update(level)
        order.extend(level)
    if len(order) < n:
        raise DisconnectedVN(f"{n - len(order)} virtual nodes unreachable from {root}")
    return order


class _BudgetExhausted(Exception):
    pass


def _backtracking_embed(net: SubstrateNetwork, vn: VirtualNetwork,
                        order: Sequence[int], root_candidates: Sequence[int],
                        hops: int, max_backtrack: int,
                        rank_key: Callable) -> Position | None:
    """Depth-first assignment along ``order``, routing links as it goes.

    ``net`` is scratch state owned by the caller and is left dirty on
    success.  Every candidate attempt beyond a frame's first one counts as a
    re-mapping operation against ``max_backtrack``.
    """
    demands = [v.cpu_demand for v in vn.nodes]
    hosts = [-1] * len(vn.nodes)
    paths: dict[int, SubstratePath] = {}
    counter = 0

    def try_place(v: int, host: int):
        demand = demands[v]
        if net.nodes[host].cpu_residual < demand:
            return None
        net.alloc_cpu(host, demand)
        routed: list[tuple[int, SubstratePath]] = []
        for u, lid in vn.adjacency[v]:
            hu = hosts[u]
            if hu < 0:
                continue
            bw = vn.links[lid].bw_demand
            if hu == host:
                path: SubstratePath = ()
            else:
                try:
                    path = shortest_feasible_path(net, host, hu, bw, hops)
                except NoPath:
                    for rlid, rpath in reversed(routed):
                        net.free_path(rpath, vn.links[rlid].bw_demand)
                    net.free_cpu(host, demand)
                    return None
            net.alloc_path(path, bw)
            routed.append((lid, path))
        hosts[v] = host
        for lid, path in routed:
            paths[lid] = path
        return routed

    def unplace(v: int, host: int, routed) -> None:
        for lid, path in reversed(routed):
            net.free_path(path, vn.links[lid].bw_demand)
            del paths[lid]
        net.free_cpu(host, demands[v])
        hosts[v] = -1

    def search(k: int) -> bool:
        nonlocal counter
        if k == len(order):
            return True
        v = order[k]
        demand = demands[v]
        if k == 0:
            cands = list(root_candidates)
        else:
            cands = [node.id for node in net.nodes if node.cpu_residual >= demand]
            cands.sort(key=lambda nid: rank_key(net, nid, demand))
        first = True
        for host in cands:
            if not first:
                counter += 1
                if counter > max_backtrack:
                    raise _BudgetExhausted
            first = False
            routed = try_place(v, host)
            if routed is None:
                continue
            if search(k + 1):
                return True
            unplace(v, host, routed)
        return False

    try:
        if not search(0):
            return None
    except _BudgetExhausted:
        return None
    link_paths = []
    for lid, link in enumerate(vn.links):
        path = paths[lid]
        if path and path[0] != hosts[link.u]:
            path = tuple(reversed(path))
        link_paths.append(path)
    return Position(hosts, link_paths)


def _power_rank(cfg: PowerConfig) -> Callable:
    def key(net: SubstrateNetwork, nid: int, demand: float):
        node = net.nodes[nid]
        return (incremental_node_power(node, demand, cfg), -node.cpu_residual, nid)
    return key


def create_new_particle(sn: SubstrateNetwork, vn: VirtualNetwork,
                        order: Sequence[int], root_host: int, hops: int,
                        max_backtrack: int,
                        power_cfg: PowerConfig) -> Position | None:
    """One backtracking embedding attempt with the root pinned to a host.

    Candidates for later virtual nodes are ordered by incremental power
    (cheapest activation first, which prefers nodes that are already on),
    ties by descending residual CPU then ascending id.
    """
    scratch = sn.clone()
    return _backtracking_embed(scratch, vn, order, [root_host], hops,
                               max_backtrack, _power_rank(power_cfg))


def init_swarm(sn: SubstrateNetwork, vnr: VNRequest, params: SolverParams,
               power_cfg: PowerConfig) -> list[Position]:
    """Collect up to ``swarm_size`` distinct feasible embeddings.

    Root candidates are walked cheapest-activation-first while the allowed
    path length escalates from 0 to ``hops_max``; an empty result means the
    request cannot be embedded.
    """
    vn = vnr.vn
    order = order_virtual_nodes(vn)
    n = len(vn.nodes)
    max_backtrack = params.max_backtrack if params.max_backtrack is not None else 3 * n
    # cheap necessary conditions before any search
    if sum(v.cpu_demand for v in vn.nodes) > sum(nd.cpu_residual for nd in sn.nodes):
        return []
    if sum(l.bw_demand for l in vn.links) > sum(ln.bw_residual for ln in sn.links):
        return []
    root_demand = vn.nodes[order[0]].cpu_demand
    rank = _power_rank(power_cfg)
    candidates = [node.id for node in sn.nodes if node.cpu_residual >= root_demand]
    candidates.sort(key=lambda nid: rank(sn, nid, root_demand))
    positions: list[Position] = []
    seen = set()
    for hops in range(params.hops_max + 1):
        for host in candidates:
            scratch = sn.clone()
            pos = _backtracking_embed(scratch, vn, order, [host], hops,
                                      max_backtrack, rank)
            if pos is not None and pos.key() not in seen:
                seen.add(pos.key())
                positions.append(pos)
            if len(positions) >= params.swarm_size:
                return positions
    return positions


# ---------------------------------------------------------------------------
# Particle algebra
# ---------------------------------------------------------------------------

def subtract(a: Position, b: Position, sn: SubstrateNetwork,
             cache: dict | None = None) -> Velocity:
    """Per dimension, a shortest path from ``b``'s host to ``a``'s host.

    Residual capacities are ignored: a velocity only guides moves, the
    position update enforces feasibility.  Equal hosts, or a disconnected
    substrate pair, yield the empty component.
    """
    velocity: Velocity = []
    for src, dst in zip(b.hosts, a.hosts):
        if src == dst:
            velocity.append(())
            continue
        key = (src, dst)
        path = cache.get(key) if cache is not None else None
        if path is None:
            try:
                path = shortest_feasible_path(sn, src, dst, 0.0, None)
            except NoPath:
                path = ()
            if cache is not None:
                cache[key] = path
        velocity.append(path)
    return velocity


def add(terms: Sequence[tuple[float, Velocity]], rng: random.Random) -> Velocity:
    """Per dimension, keep the component of term k with probability w_k.

    Weights are assumed non-negative and normalized by the caller.
    """
    dim = len(terms[0][1])
    out: Velocity = []
    for m in range(dim):
        r = rng.random()
        acc = 0.0
        chosen = terms[-1][1][m]
        for weight, vel in terms:
            acc += weight
            if r < acc:
                chosen = vel[m]
                break
        out.append(chosen)
    return out


def _allocated_scratch(sn: SubstrateNetwork, vn: VirtualNetwork,
                       hosts: Sequence[int],
                       paths: Sequence[SubstratePath]) -> SubstrateNetwork:
    scratch = sn.clone()
    for vnode, host in zip(vn.nodes, hosts):
        scratch.alloc_cpu(host, vnode.cpu_demand)
    for link, path in zip(vn.links, paths):
        scratch.alloc_path(path, link.bw_demand)
    return scratch


def _move_target(scratch: SubstrateNetwork, vpath: SubstratePath, cur: int,
                 demand: float) -> int | None:
    """First node of ``vpath`` able to take the demand, per the move rule.

    When the current host lies on the path only nodes after it qualify;
    otherwise the whole path is scanned front to back.
    """
    if cur in vpath:
        tail = vpath[vpath.index(cur) + 1:]
    else:
        tail = vpath
    for nid in tail:
        if scratch.nodes[nid].cpu_residual >= demand:
            return nid
    return None


def multiply(position: Position, velocity: Velocity, sn: SubstrateNetwork,
             vn: VirtualNetwork, hops_max: int) -> Position:
    """Move every dimension one step along its velocity path, then re-route.

    Node moves are decided first for all dimensions; every virtual link
    with a moved endpoint is then re-routed within ``hops_max``.  If some
    link cannot be re-routed its moved endpoints are reverted and routing is
    retried; in the worst case the whole update falls back to ``position``.
    """
    n = len(position.hosts)
    demands = [v.cpu_demand for v in vn.nodes]
    scratch = _allocated_scratch(sn, vn, position.hosts, position.paths)
    new_hosts = list(position.hosts)
    for m, vpath in enumerate(velocity):
        if not vpath:
            continue
        target = _move_target(scratch, vpath, new_hosts[m], demands[m])
        if target is None:
            continue
        scratch.free_cpu(new_hosts[m], demands[m])
        scratch.alloc_cpu(target, demands[m])
        new_hosts[m] = target

    moved = {m for m in range(n) if new_hosts[m] != position.hosts[m]}
    while moved:
        hosts = [new_hosts[m] if m in moved else position.hosts[m]
                 for m in range(n)]
        trial = sn.clone()
        cpu_ok = True
        for m in range(n):
            if trial.nodes[hosts[m]].cpu_residual < demands[m]:
                cpu_ok = False
                break
            trial.alloc_cpu(hosts[m], demands[m])
        if not cpu_ok:
            break  # reverts collided with other moves: give the update up
        paths: list[SubstratePath | None] = [None] * len(vn.links)
        affected = []
        for lid, link in enumerate(vn.links):
            if link.u in moved or link.v in moved:
                affected.append(lid)
            else:
                paths[lid] = position.paths[lid]
                trial.alloc_path(position.paths[lid], link.bw_demand)
        failing = None
        for lid in affected:
            link = vn.links[lid]
            a, b = hosts[link.u], hosts[link.v]
            if a == b:
                path: SubstratePath = ()
            else:
                try:
                    path = shortest_feasible_path(trial, a, b, link.bw_demand,
                                                  hops_max)
                except NoPath:
                    failing = link
                    break
            trial.alloc_path(path, link.bw_demand)
            paths[lid] = path
        if failing is None:
            return Position(hosts, paths)
        moved.discard(failing.u)
        moved.discard(failing.v)
    return position.copy()


def step_particle(particle: Particle, leader: Position, params: SolverParams,
                  sn: SubstrateNetwork, vn: VirtualNetwork, rng: random.Random,
                  cache: dict | None = None) -> None:
    """One velocity/position update toward pbest and the archive leader.

    The inertia, cognitive, and social weights are normalized to sum to one
    after sampling r1, r2, so each dimension draws its new component from
    exactly one of the three sources.
    """
    r1 = rng.random()
    r2 = rng.random()
    raw = (params.w, params.c1 * r1, params.c2 * r2)
    total = raw[0] + raw[1] + raw[2]
    if total > 0.0:
        weights = (raw[0] / total, raw[1] / total, raw[2] / total)
    else:
        weights = (1.0, 0.0, 0.0)
    toward_pbest = subtract(particle.pbest, particle.position, sn, cache)
    toward_leader = subtract(leader, particle.position, sn, cache)
    velocity = add([(weights[0], particle.velocity),
                    (weights[1], toward_pbest),
                    (weights[2], toward_leader)], rng)
    particle.velocity = velocity
    particle.position = multiply(particle.position, velocity, sn, vn,
                                 params.hops_max)


def mutate(position: Position, pro_mut: float, sn: SubstrateNetwork,
           vn: VirtualNetwork, rng: random.Random) -> Position:
    """Re-map each dimension with probability ``pro_mut``.

    The new host is drawn uniformly from every other node with room for the
    demand; its links are re-routed with no hop limit.  A dimension whose
    re-routing fails is reverted.
    """
    if pro_mut <= 0.0:
        return position.copy()
    demands = [v.cpu_demand for v in vn.nodes]
    hosts = list(position.hosts)
    paths = list(position.paths)
    scratch = _allocated_scratch(sn, vn, hosts, paths)
    for m in range(len(hosts)):
        if rng.random() >= pro_mut:
            continue
        demand = demands[m]
        cands = [node.id for node in scratch.nodes
                 if node.id != hosts[m] and node.cpu_residual >= demand]
        if not cands:
            continue
        target = cands[rng.randrange(len(cands))]
        moved = _try_relocate(scratch, vn, hosts, paths, m, target, None)
        if moved is not None:
            scratch, hosts, paths = moved
    return Position(hosts, paths)


def _try_relocate(scratch: SubstrateNetwork, vn: VirtualNetwork,
                  hosts: list[int], paths: list[SubstratePath], m: int,
                  target: int, hops_max: int | None):
    """Move virtual node ``m`` to ``target`` on a trial clone.

    Returns the committed (scratch, hosts, paths) triple, or None when some
    incident link cannot be re-routed.
    """
    demand = vn.nodes[m].cpu_demand
    trial = scratch.clone()
    trial.free_cpu(hosts[m], demand)
    incident = sorted(vn.adjacency[m], key=lambda t: t[1])
    for _, lid in incident:
        trial.free_path(paths[lid], vn.links[lid].bw_demand)
    if trial.nodes[target].cpu_residual < demand:
        return None
    trial.alloc_cpu(target, demand)
    new_hosts = list(hosts)
    new_hosts[m] = target
    new_paths = list(paths)
    for _, lid in incident:
        link = vn.links[lid]
        a, b = new_hosts[link.u], new_hosts[link.v]
        if a == b:
            path: SubstratePath = ()
        else:
            try:
                path = shortest_feasible_path(trial, a, b, link.bw_demand,
                                              hops_max)
            except NoPath:
                return None
        trial.alloc_path(path, link.bw_demand)
        new_paths[lid] = path
    return trial, new_hosts, new_paths


def _first_common_host(sn: SubstrateNetwork, state: SubstrateNetwork,
                       starts: Sequence[int], demand: float,
                       cur: int) -> int | None:
    """First node reachable from every start with room for the demand.

    Frontiers grow breadth-first one hop per step simultaneously; ties at
    the same step break by ascending node id.  The current host counts as
    eligible (it already carries the demand).
    """
    visited = [{s} for s in starts]
    frontiers: list[list[int]] = [[s] for s in starts]
    checked: set[int] = set()

    def pick(common: set[int]) -> int | None:
        eligible = [nid for nid in common
                    if nid == cur or state.nodes[nid].cpu_residual >= demand]
        return min(eligible) if eligible else None

    common = set.intersection(*visited)
    found = pick(common)
    checked |= common
    while found is None and any(frontiers):
        for i in range(len(starts)):
            grown = []
            for nid in frontiers[i]:
                for nbr, _ in sn.adjacency[nid]:
                    if nbr not in visited[i]:
                        visited[i].add(nbr)
                        grown.append(nbr)
            frontiers[i] = grown
        common = set.intersection(*visited) - checked
        found = pick(common)
        checked |= common
    return found


def improve_local(position: Position, objectives: ObjectiveVector,
                  sn: SubstrateNetwork, vn: VirtualNetwork,
                  evaluator: Callable[[Position], ObjectiveVector],
                  hops_max: int) -> tuple[Position, ObjectiveVector]:
    """Round-robin relocation toward the first meeting point of neighbours.

    For each virtual node, frontiers grown from the hosts of its neighbours
    nominate the first common substrate node with spare CPU; the relocation
    is kept only when the re-evaluated objective vector dominates the
    current one.  Stops after a full pass without an accepted move.
    """
    n = len(position.hosts)
    demands = [v.cpu_demand for v in vn.nodes]
    hosts = list(position.hosts)
    paths = list(position.paths)
    scratch = _allocated_scratch(sn, vn, hosts, paths)
    best = objectives
    improved = True
    while improved:
        improved = False
        for m in range(n):
            incident = vn.adjacency[m]
            if not incident:
                continue
            starts = sorted({hosts[u] for u, _ in incident})
            cand = _first_common_host(sn, scratch, starts, demands[m], hosts[m])
            if cand is None or cand == hosts[m]:
                continue
            moved = _try_relocate(scratch, vn, hosts, paths, m, cand, hops_max)
            if moved is None:
                continue
            trial, new_hosts, new_paths = moved
            vec = evaluator(Position(new_hosts, new_paths))
            if dominates(vec, best):
                scratch, hosts, paths = trial, new_hosts, new_paths
                best = vec
                improved = True
    return Position(hosts, paths), best


# ---------------------------------------------------------------------------
# Full solve
# ---------------------------------------------------------------------------

_MASK = (1 << 63) - 1


def _derive(seed: int, a: int, b: int) -> int:
    return (seed * 0x9E3779B97F4A7C15 + a * 0xBF58476D1CE4E5B9
            + b * 0x94D049BB133111EB + 0x2545F4914F6CDD1D) & _MASK


def solve(sn: SubstrateNetwork, vnr: VNRequest, params: SolverParams,
          power_cfg: PowerConfig,
          frag_cfg: FragmentationConfig) -> MopsoResult | None:
    """Embed one request against a substrate snapshot.

    Returns None when no feasible embedding is found (empty initial swarm or
    disconnected virtual network).  The result carries the final archive so
    callers can inspect the whole trade-off front; the returned mapping is
    the archive member with the lowest equal-weight sum of min-max
    normalized objectives, ties broken by cost then power.
    """
    vn = vnr.vn
    n = len(vn.nodes)
    if n == 0:
        raise ValueError("cannot embed an empty virtual network")
    try:
        positions = init_swarm(sn, vnr, params, power_cfg)
    except DisconnectedVN:
        return None
    if not positions:
        return None
    pro_mut = params.pro_mut if params.pro_mut is not None else 1.0 / n

    def evaluator(pos: Position) -> ObjectiveVector:
        return evaluate_objectives(sn, vnr, pos.to_mapping(), power_cfg, frag_cfg)

    particles: list[Particle] = []
    for pos in positions:
        vec = evaluator(pos)
        pos, vec = improve_local(pos, vec, sn, vn, evaluator, params.hops_max)
        particles.append(Particle(position=pos, velocity=[() for _ in range(n)],
                                  objectives=vec, pbest=pos.copy(),
                                  pbest_objectives=vec))
    _assign_ranks(particles)
    archive = update_archive(ExternalArchive([], params.ea_max_size), particles)

    leader_rng = random.Random(_derive(params.seed, 0, 0))
    cache: dict = {}
    for rnd in range(params.iterations_max):
        # leaders for the whole round are drawn up front so per-particle
        # work could run in parallel without changing the trajectory
        leader_ids = [leader_rng.randrange(len(archive.members))
                      for _ in particles]
        for i, particle in enumerate(particles):
            stream = random.Random(_derive(params.seed, rnd + 1, i + 1))
            leader = archive.members[leader_ids[i]].position
            step_particle(particle, leader, params, sn, vn, stream, cache)
            particle.position = mutate(particle.position, pro_mut, sn, vn, stream)
            vec = evaluator(particle.position)
            particle.position, particle.objectives = improve_local(
                particle.position, vec, sn, vn, evaluator, params.hops_max)
            new = particle.objectives
            if dominates(new, particle.pbest_objectives):
                particle.pbest = particle.position.copy()
                particle.pbest_objectives = new
            elif not dominates(particle.pbest_objectives, new):
                if stream.random() < 0.5:
                    particle.pbest = particle.position.copy()
                    particle.pbest_objectives = new
        _assign_ranks(particles)
        archive = update_archive(archive, particles)

    best = _select_from_front(archive.members)
    return MopsoResult(best.position.to_mapping(), best.objectives, archive)


def _assign_ranks(particles: list[Particle]) -> None:
    vectors = [p.objectives for p in particles]
    for level, front in enumerate(fast_nondominated_sort(vectors)):
        cds = crowding_distance([vectors[i] for i in front])
        for j, i in enumerate(front):
            particles[i].rank = level
            particles[i].crowding = cds[j]


def _select_from_front(members: Sequence[ArchiveEntry]) -> ArchiveEntry:
    """Equal-weight scalarization over min-max normalized objectives."""
    k = len(members[0].objectives)
    lows = [min(e.objectives[j] for e in members) for j in range(k)]
    highs = [max(e.objectives[j] for e in members) for j in range(k)]

    def score(entry: ArchiveEntry) -> float:
        total = 0.0
        for j in range(k):
            span = highs[j] - lows[j]
            if span > 0.0:
                total += (entry.objectives[j] - lows[j]) / span
        return total

    return min(members, key=lambda e: (score(e), e.objectives.cost,
                                       e.objectives.power))
