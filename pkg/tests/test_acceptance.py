"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them all
live).  The full-scale batch (5 seeds x 3 solvers on the 50-node/250-link
scenario with 1000 requests each) is computed once and shared.
"""

import random
import statistics
import time

import pytest

from evne import (FragmentationConfig, SolverParams, WorkloadSpec,
                  apply_mapping, crowding_distance, default_power_config,
                  evaluate_objectives, fast_nondominated_sort, gen_substrate,
                  gen_workload, network_power, embedding_power, snf, solve)
from evne.cli import dispatch
from evne.baselines import backtrack_bfs
from evne.mopso import dominates
from evne.workload import SubstrateGenSpec
from evne import sim

from brute import (crowding_brute, enumerate_feasible_mappings, sort_brute)
from conftest import random_request, random_substrate, substrate

PCFG = default_power_config()
FCFG = FragmentationConfig()


def conclude(number: int, name: str, ok: bool, detail: str = "") -> None:
    verdict = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number} ({name}): {verdict}" + (f" - {detail}" if detail else ""))
    assert ok, f"criterion {number} ({name}) failed: {detail}"


# -- criterion 1: exhaustive micro oracle ------------------------------------

def test_criterion_1_micro_front_oracle():
    started = time.perf_counter()
    clean = 0
    for instance in range(30):
        rng = random.Random(9_000 + instance)
        sn = random_substrate(rng, rng.choice([5, 6]), rng.randint(6, 10))
        if instance % 2 == 0:
            # warm half the instances with a pre-embedded single-node request
            warm = random_request(rng, 1, rid=900)
            warm_map = backtrack_bfs(sn, warm, 2, 10)
            if warm_map is not None:
                apply_mapping(sn, warm, warm_map)
        vnr = random_request(rng, rng.choice([2, 3]), rid=instance)
        feasible = [evaluate_objectives(sn, vnr, m, PCFG, FCFG)
                    for m in enumerate_feasible_mappings(sn, vnr, 2)]
        result = solve(sn, vnr, SolverParams(seed=instance), PCFG, FCFG)
        if result is None:
            if not feasible:
                clean += 1
            continue
        undominated = all(
            not any(dominates(f, entry.objectives) for f in feasible)
            for entry in result.archive.members)
        if undominated:
            clean += 1
    elapsed = time.perf_counter() - started
    conclude(1, "micro front oracle", clean >= 27 and elapsed < 60.0,
             f"{clean}/30 instances clean in {elapsed:.1f}s")


# -- criterion 2: sorting and crowding oracle ---------------------------------

def test_criterion_2_sorting_oracle():
    started = time.perf_counter()
    rng = random.Random(555)
    for _ in range(1000):
        n = rng.randint(1, 64)
        k = rng.randint(2, 4)
        if rng.random() < 0.5:
            vectors = [tuple(rng.randint(0, 6) for _ in range(k))
                       for _ in range(n)]
        else:
            vectors = [tuple(rng.random() for _ in range(k)) for _ in range(n)]
        fast = [sorted(front) for front in fast_nondominated_sort(vectors)]
        assert fast == sort_brute(vectors)
        first = [vectors[i] for i in fast[0]]
        for a, b in zip(crowding_distance(first), crowding_brute(first)):
            assert a == b or abs(a - b) < 1e-12
    elapsed = time.perf_counter() - started
    conclude(2, "sorting oracle", elapsed < 10.0,
             f"1000 sets matched in {elapsed:.1f}s")


# -- full-scale batch shared by criteria 3 and 5 ------------------------------

SCENARIO_SEEDS = (0, 1, 2, 3, 4)


def full_scale_run(solver_name: str, seed: int):
    sn = gen_substrate(SubstrateGenSpec(50, 250, seed=1_000 + seed), PCFG)
    workload = gen_workload(WorkloadSpec(1000, seed=2_000 + seed))
    solver = sim.make_solver(solver_name, power_cfg=PCFG, frag_cfg=FCFG,
                             seed=seed)
    started = time.perf_counter()
    series = sim.run_simulation(sn, workload, solver, PCFG, FCFG)
    elapsed = time.perf_counter() - started
    pristine = gen_substrate(SubstrateGenSpec(50, 250, seed=1_000 + seed), PCFG)
    conserved = (
        [(n.cpu_residual, n.power_on, n.routing_enabled, n.routing_refcount)
         for n in sn.nodes]
        == [(n.cpu_residual, n.power_on, n.routing_enabled, n.routing_refcount)
            for n in pristine.nodes]
        and [l.bw_residual for l in sn.links]
        == [l.bw_residual for l in pristine.links])
    return sim.summarize(series), elapsed, conserved


@pytest.fixture(scope="module")
def scenario_batch():
    batch = {}
    for name in sim.SOLVER_NAMES:
        batch[name] = [full_scale_run(name, seed) for seed in SCENARIO_SEEDS]
    return batch


# -- criterion 3: conservation at full scale ----------------------------------

def test_criterion_3_full_scale_conservation(scenario_batch):
    runs = scenario_batch["mopso"]
    conserved = all(done for _, _, done in runs)
    slowest = max(elapsed for _, elapsed, _ in runs)
    conclude(3, "full-scale conservation",
             conserved and slowest < 600.0,
             f"5 runs of 1000 requests, slowest {slowest:.0f}s, "
             f"residuals pristine: {conserved}")


# -- criterion 4: marginal-power identity -------------------------------------

def test_criterion_4_marginal_power_identity():
    rng = random.Random(7_777)
    checked = 0
    worst = 0.0
    while checked < 200:
        sn = random_substrate(rng, rng.randint(6, 10), rng.randint(8, 16))
        for rid in range(12):
            vnr = random_request(rng, rng.randint(1, 4), rid=rid)
            mapping = backtrack_bfs(sn, vnr, 3, 5 * len(vnr.vn.nodes))
            if mapping is None:
                continue
            before = network_power(sn, PCFG)
            predicted = embedding_power(sn, vnr, mapping, PCFG)
            apply_mapping(sn, vnr, mapping)
            gap = abs(network_power(sn, PCFG) - before - predicted)
            worst = max(worst, gap)
            checked += 1
            if checked == 200:
                break
    conclude(4, "marginal power identity", worst <= 1e-9,
             f"200 embeddings, worst gap {worst:.2e} W")


# -- criterion 5: directional claims ------------------------------------------

def test_criterion_5_directional_claims(scenario_batch):
    def mean_of(name, field):
        return statistics.mean(getattr(agg, field)
                               for agg, _, _ in scenario_batch[name])

    acc = {name: mean_of(name, "acceptance_ratio")
           for name in sim.SOLVER_NAMES}
    rc = mean_of("mopso", "rc_ratio")
    beats_baselines = (acc["mopso"] >= acc["greedy2s"]
                       and acc["mopso"] >= acc["btbfs"])
    detail = (f"acceptance mopso={acc['mopso']:.3f} "
              f"btbfs={acc['btbfs']:.3f} greedy2s={acc['greedy2s']:.3f}; "
              f"mopso revenue/cost={rc:.3f} (soft target 0.95, hard floor 0.85)")
    conclude(5, "directional claims",
             beats_baselines and rc >= 0.85, detail)


# -- criterion 6: fragmentation closed form -----------------------------------

def test_criterion_6_snf_closed_form():
    cfg = FragmentationConfig(q=2, bw_lower_bound=1.0)
    exact = all(
        snf(substrate([100.0] * m, []), cfg) == 1.0 - 1.0 / m
        for m in range(1, 6))
    rng = random.Random(321)
    in_range = True
    for _ in range(1000):
        sn = random_substrate(rng, rng.randint(2, 12), rng.randint(2, 20))
        for node in sn.nodes:
            node.cpu_residual = rng.uniform(0.0, node.cpu_capacity)
        for link in sn.links:
            link.bw_residual = rng.uniform(0.0, link.bw_capacity)
        value = snf(sn, cfg)
        in_range = in_range and 0.0 <= value < 1.0
    conclude(6, "fragmentation closed form", exact and in_range,
             "1 - 1/m exact for m=1..5; 1000 random states in [0, 1)")


# -- criterion 7: byte-identical reruns ---------------------------------------

def test_criterion_7_run_determinism(tmp_path):
    sn = tmp_path / "sn.brite"
    wl = tmp_path / "wl.jsonl"
    assert dispatch(["gen-substrate", "--nodes", "30", "--links", "90",
                     "--seed", "11", "-o", str(sn)]) == 0
    assert dispatch(["gen-workload", "--count", "120", "--vn-nodes", "2:8",
                     "--lifetime", "50:150", "--seed", "12", "-o", str(wl)]) == 0
    outputs = []
    for tag in ("first", "second"):
        out = tmp_path / f"{tag}.csv"
        code = dispatch(["run", "--substrate", str(sn), "--workload", str(wl),
                         "--solver", "mopso", "--seed", "31", "-o", str(out)])
        assert code == 0
        outputs.append((out.read_bytes(),
                        (tmp_path / f"{tag}.csv.summary.csv").read_bytes()))
    conclude(7, "byte-identical reruns", outputs[0] == outputs[1],
             "metrics and summary CSVs byte-equal across invocations")


# -- criterion 8: generator statistics -----------------------------------------

def test_criterion_8_generator_statistics():
    requests = gen_workload(WorkloadSpec(1000, seed=42))
    lifetimes = statistics.mean(r.lifetime for r in requests)
    arrivals = [r.arrival for r in requests]
    gaps = [arrivals[0]] + [b - a for a, b in zip(arrivals, arrivals[1:])]
    inter = statistics.mean(gaps)
    ok = abs(lifetimes - 500.0) <= 15.0 and abs(inter - 10.0) <= 0.6
    conclude(8, "generator statistics", ok,
             f"mean lifetime {lifetimes:.1f} (500 +/- 15), "
             f"mean inter-arrival {inter:.2f} (10 +/- 0.6)")
