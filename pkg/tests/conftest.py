"""Shared builders for substrate/request instances used across the suite."""

import pytest

from evne import (FragmentationConfig, PowerConfig, ServerProfile,
                  SubstrateLink, SubstrateNetwork, SubstrateNode, VirtualLink,
                  VirtualNetwork, VirtualNode, VNRequest)


def power_config(p_idle=86.0, p_max=117.0, p_routing=10.0):
    return PowerConfig((ServerProfile("test", p_idle, p_max, p_routing, 1000.0),))


def substrate(caps, edges, profile=0):
    """Nodes from a capacity list and links from (u, v, bw) triples."""
    nodes = [SubstrateNode(i, float(c), float(c), profile)
             for i, c in enumerate(caps)]
    links = [SubstrateLink(i, u, v, float(bw), float(bw))
             for i, (u, v, bw) in enumerate(edges)]
    return SubstrateNetwork(nodes, links)


def virtual_network(cpus, edges):
    nodes = [VirtualNode(i, float(c)) for i, c in enumerate(cpus)]
    links = [VirtualLink(i, u, v, float(bw)) for i, (u, v, bw) in enumerate(edges)]
    return VirtualNetwork(nodes, links)


def request(cpus, edges, rid=0, arrival=0.0, lifetime=100.0):
    return VNRequest(rid, virtual_network(cpus, edges), arrival, lifetime)


def random_substrate(rng, n_nodes, n_links, cpu_choices=(60, 100, 140),
                     bw_choices=(20, 40, 60)):
    """Connected random substrate with integer capacities."""
    caps = [rng.choice(cpu_choices) for _ in range(n_nodes)]
    edges = set()
    order = list(range(n_nodes))
    rng.shuffle(order)
    for a, b in zip(order, order[1:]):  # random spanning tree
        edges.add((min(a, b), max(a, b)))
    pairs = [(i, j) for i in range(n_nodes) for j in range(i + 1, n_nodes)
             if (i, j) not in edges]
    rng.shuffle(pairs)
    for pair in pairs[:max(0, n_links - len(edges))]:
        edges.add(pair)
    with_bw = [(u, v, rng.choice(bw_choices)) for u, v in sorted(edges)]
    return substrate(caps, with_bw)


def random_request(rng, n_nodes, link_prob=0.6, cpu_choices=(20, 35, 50),
                   bw_choices=(5, 10, 15), rid=0):
    """Connected random request with integer demands."""
    cpus = [rng.choice(cpu_choices) for _ in range(n_nodes)]
    edges = set()
    order = list(range(n_nodes))
    rng.shuffle(order)
    for a, b in zip(order, order[1:]):
        edges.add((min(a, b), max(a, b)))
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if (i, j) not in edges and rng.random() < link_prob:
                edges.add((i, j))
    with_bw = [(u, v, rng.choice(bw_choices)) for u, v in sorted(edges)]
    return request(cpus, with_bw, rid=rid)


def snapshot_state(sn):
    """Full resource/state tuple for exact comparisons."""
    return ([(n.cpu_residual, n.power_on, n.routing_enabled, n.routing_refcount,
              n.hosted_count) for n in sn.nodes],
            [(l.bw_residual, l.active_paths) for l in sn.links])


@pytest.fixture
def frag_cfg():
    return FragmentationConfig()
