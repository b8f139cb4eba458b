"""Power formulas and the marginal-power identity."""

import random

import pytest

from evne import (Mapping, UnknownProfile, apply_mapping, embedding_power,
                  network_power, node_power)
from evne.baselines import backtrack_bfs
from evne.power_model import (incremental_node_power, parse_power_profiles,
                              resolve_power_config)
from evne.net_model import ParseError

from conftest import (power_config, random_request, random_substrate, request,
                      substrate)


def test_off_node_draws_nothing():
    sn = substrate([100], [])
    assert node_power(sn.nodes[0], power_config()) == 0.0


def test_full_utilization_hits_peak():
    sn = substrate([100], [])
    node = sn.nodes[0]
    node.power_on = True
    node.cpu_residual = 0.0
    assert node_power(node, power_config()) == pytest.approx(117.0)


def test_half_utilization_with_routing():
    sn = substrate([100], [])
    node = sn.nodes[0]
    node.power_on = True
    node.cpu_residual = 50.0
    node.routing_enabled = True
    node.routing_refcount = 1
    assert node_power(node, power_config()) == pytest.approx(111.5)


def test_unknown_profile():
    sn = substrate([100], [])
    sn.nodes[0].profile = 7
    with pytest.raises(UnknownProfile):
        node_power(sn.nodes[0], power_config())


def test_network_power_all_off_is_zero():
    sn = substrate([100, 100, 100], [(0, 1, 10)])
    assert network_power(sn, power_config()) == 0.0


def test_network_power_sums_idle_nodes():
    sn = substrate([100, 100], [])
    for node in sn.nodes:
        node.power_on = True
    assert network_power(sn, power_config()) == pytest.approx(2 * 86.0)


def test_network_power_matches_fold_on_random_states():
    rng = random.Random(4)
    cfg = power_config()
    for _ in range(25):
        sn = random_substrate(rng, 6, 9)
        for node in sn.nodes:
            if rng.random() < 0.6:
                node.power_on = True
                node.cpu_residual = rng.uniform(0, node.cpu_capacity)
                if rng.random() < 0.5:
                    node.routing_enabled = True
                    node.routing_refcount = 1
        expected = 0.0
        for node in sn.nodes:  # independent fold
            if node.power_on:
                prof = cfg.get(node.profile)
                expected += prof.p_idle + (prof.p_max - prof.p_idle) * (
                    (node.cpu_capacity - node.cpu_residual) / node.cpu_capacity)
                if node.routing_enabled:
                    expected += prof.p_routing
        assert network_power(sn, cfg) == pytest.approx(expected)


def test_monotone_in_utilization():
    cfg = power_config()
    sn = substrate([100], [])
    node = sn.nodes[0]
    node.power_on = True
    previous = -1.0
    for used in range(0, 101, 10):
        node.cpu_residual = 100.0 - used
        watts = node_power(node, cfg)
        assert watts >= previous
        previous = watts


def test_routing_card_adds_exactly_its_draw():
    cfg = power_config()
    sn = substrate([100], [])
    node = sn.nodes[0]
    node.power_on = True
    node.cpu_residual = 37.0
    base = node_power(node, cfg)
    node.routing_enabled = True
    node.routing_refcount = 1
    assert node_power(node, cfg) - base == pytest.approx(10.0)


def test_small_routing_draw_stays_within_five_percent_of_idle():
    cfg = power_config(p_routing=4.0)  # 4 <= 0.05 * 86
    sn = substrate([100], [])
    node = sn.nodes[0]
    node.power_on = True
    node.routing_enabled = True
    node.routing_refcount = 1
    assert node_power(node, cfg) <= 86.0 * 1.05


def test_embedding_power_off_host_no_links():
    sn = substrate([100], [])
    vnr = request([25], [])
    watts = embedding_power(sn, vnr, Mapping([0], []), power_config())
    assert watts == pytest.approx(86.0 + 31.0 * 0.25)  # 93.75


def test_embedding_power_already_active_hosts():
    sn = substrate([100, 100], [(0, 1, 10)])
    for node in sn.nodes:
        node.power_on = True
        node.routing_enabled = True
        node.routing_refcount = 1
    vnr = request([25, 50], [(0, 1, 2)])
    watts = embedding_power(sn, vnr, Mapping([0, 1], [(0, 1)]), power_config())
    assert watts == pytest.approx(31.0 * 0.25 + 31.0 * 0.5)


def test_embedding_power_line_path_sequential_accounting():
    # hosts on A and C, the link routed A-B-C, everything starts off
    sn = substrate([200, 200, 200], [(0, 1, 10), (1, 2, 10)])
    vnr = request([50, 50], [(0, 1, 4)])
    m = Mapping([0, 2], [(0, 1, 2)])
    watts = embedding_power(sn, vnr, m, power_config())
    p_vn = 2 * (86.0 + 31.0 * 0.25)
    p_vl = 10.0 + (86.0 + 10.0) + 10.0
    assert watts == pytest.approx(p_vn + p_vl)


def test_colocated_nodes_charge_idle_once():
    sn = substrate([100], [])
    vnr = request([20, 30], [])
    watts = embedding_power(sn, vnr, Mapping([0, 0], []), power_config())
    assert watts == pytest.approx(86.0 + 31.0 * 0.2 + 31.0 * 0.3)


def test_marginal_identity_random_embeddings():
    # network_power(after) - network_power(before) == embedding_power(before)
    rng = random.Random(11)
    cfg = power_config()
    checked = 0
    while checked < 60:
        sn = random_substrate(rng, 7, 12)
        for rid in range(6):
            vnr = random_request(rng, rng.randint(1, 3), rid=rid)
            m = backtrack_bfs(sn, vnr, 3, 40)
            if m is None:
                continue
            before = network_power(sn, cfg)
            predicted = embedding_power(sn, vnr, m, cfg)
            apply_mapping(sn, vnr, m)
            assert network_power(sn, cfg) - before == pytest.approx(
                predicted, abs=1e-9)
            checked += 1


def test_profile_file_round_trip(tmp_path):
    text = """\
# comment
name = boxA
p_idle_watts = 50
p_max_watts = 90
p_routing_watts = 5
cpu_mips = 1500

name = boxB
p_idle_watts = 60
p_max_watts = 80
p_routing_watts = 0
"""
    path = tmp_path / "custom.profiles"
    path.write_text(text)
    cfg = resolve_power_config(path)
    assert [p.name for p in cfg.profiles] == ["boxA", "boxB"]
    assert cfg.profiles[0].cpu_mips == 1500.0
    assert cfg.profiles[1].cpu_mips is None
    assert cfg.index_of("boxB") == 1


@pytest.mark.parametrize("text", [
    "p_idle_watts = 50",                      # entry before name
    "name = x\np_idle_watts = 50",            # missing required entries
    "name = x\nmystery = 1",                  # unknown key
    "name = x\np_idle_watts = many",          # not a number
    "",                                       # no profiles at all
])
def test_profile_file_errors(text):
    with pytest.raises(ParseError):
        parse_power_profiles(text)


def test_env_var_profile_path(tmp_path, monkeypatch):
    path = tmp_path / "env.profiles"
    path.write_text("name = only\np_idle_watts = 10\np_max_watts = 20\n"
                    "p_routing_watts = 1\n")
    monkeypatch.setenv("VNE_POWER_PROFILES", str(path))
    cfg = resolve_power_config()
    assert cfg.profiles[0].name == "only"


def test_incremental_power_prefers_active_nodes():
    cfg = power_config()
    sn = substrate([100, 100], [])
    sn.nodes[1].power_on = True
    cold = incremental_node_power(sn.nodes[0], 10, cfg)
    warm = incremental_node_power(sn.nodes[1], 10, cfg)
    assert warm < cold
    assert cold == pytest.approx(86.0 + 31.0 * 0.1)
