"""Discrete-event replay of a workload against a substrate.

Arrivals invoke a solver on a snapshot of the current state; accepted
requests allocate resources and schedule a departure, rejected ones are
never retried.  All metric integrands are piecewise constant between events
and integrated exactly; the horizon is the last departure.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from heapq import heappop, heappush
from math import nan
from typing import Callable

from . import baselines, mopso
from .embedding_core import (FragmentationConfig, embedding_cost, revenue, snf)
from .net_model import (Mapping, SubstrateNetwork, VneError, VNRequest,
                        apply_mapping, release_mapping)
from .power_model import PowerConfig, network_power

SOLVER_NAMES = ("mopso", "greedy2s", "btbfs")

Solver = Callable[[SubstrateNetwork, VNRequest], Mapping | None]


class SolverPanic(VneError):
    def __init__(self, vnr_id: int, cause: BaseException):
        super().__init__(f"solver failed on request {vnr_id}: {cause!r}")
        self.vnr_id = vnr_id


class DegenerateSeries(VneError):
    """Time-averaged metrics need a positive-length horizon."""


@dataclass(slots=True)
class Sample:
    time: float
    revenue_rate: float
    acceptance_ratio: float
    cost_rate: float
    snf: float
    power_watts: float
    active_nodes: int
    utilization: float


@dataclass(slots=True)
class Aggregates:
    revenue_rate: float
    acceptance_ratio: float
    rc_ratio: float
    avg_snf: float
    avg_power_watts: float
    rejected_resource_ratio: float


@dataclass(slots=True)
class MetricsSeries:
    samples: list[Sample]
    horizon: float
    total_requests: int
    accepted_requests: int
    offered_resources: float
    rejected_resources: float


def make_solver(name: str, *, params: mopso.SolverParams | None = None,
                power_cfg: PowerConfig | None = None,
                frag_cfg: FragmentationConfig | None = None,
                backtrack_mult: int = 3, seed: int = 0) -> Solver:
    """Adapter turning a solver name into a ``(sn, vnr) -> Mapping`` callable.

    The re-mapping budget scales with request size (``backtrack_mult`` times
    the virtual node count) and each request gets its own derived seed so
    runs are reproducible end to end.
    """
    if name not in SOLVER_NAMES:
        raise ValueError(f"unknown solver {name!r}; pick one of {SOLVER_NAMES}")
    params = params or mopso.SolverParams()
    frag_cfg = frag_cfg or FragmentationConfig()

    if name == "greedy2s":
        return lambda sn, vnr: baselines.greedy_two_stage(sn, vnr, params.hops_max)
    if name == "btbfs":
        return lambda sn, vnr: baselines.backtrack_bfs(
            sn, vnr, params.hops_max, backtrack_mult * len(vnr.vn.nodes))

    if power_cfg is None:
        raise ValueError("the mopso solver needs a power configuration")

    def run_mopso(sn: SubstrateNetwork, vnr: VNRequest) -> Mapping | None:
        per_request = dataclasses.replace(
            params,
            seed=mopso._derive(seed, vnr.id, 0),
            max_backtrack=backtrack_mult * len(vnr.vn.nodes))
        result = mopso.solve(sn, vnr, per_request, power_cfg, frag_cfg)
        return result.mapping if result is not None else None

    return run_mopso


def _take_sample(time: float, sn: SubstrateNetwork, revenue_sum: float,
                 cost_sum: float, arrived: int, accepted: int,
                 power_cfg: PowerConfig, frag_cfg: FragmentationConfig) -> Sample:
    cpu_cap = cpu_used = bw_cap = bw_used = 0.0
    active = 0
    for node in sn.nodes:
        cpu_cap += node.cpu_capacity
        cpu_used += node.cpu_capacity - node.cpu_residual
        if node.power_on:
            active += 1
    for link in sn.links:
        bw_cap += link.bw_capacity
        bw_used += link.bw_capacity - link.bw_residual
    total_cap = cpu_cap + bw_cap
    return Sample(
        time=time,
        revenue_rate=revenue_sum,
        acceptance_ratio=accepted / arrived if arrived else 0.0,
        cost_rate=cost_sum,
        snf=snf(sn, frag_cfg),
        power_watts=network_power(sn, power_cfg),
        active_nodes=active,
        utilization=(cpu_used + bw_used) / total_cap if total_cap > 0 else 0.0,
    )


def run_simulation(sn: SubstrateNetwork, workload: list[VNRequest],
                   solver: Solver, power_cfg: PowerConfig,
                   frag_cfg: FragmentationConfig) -> MetricsSeries:
    """Replay ``workload`` on ``sn``, mutating it event by event.

    Departures are processed before arrivals at equal timestamps, ties by
    request id.  One sample is recorded per distinct event time; on return
    the substrate has released everything and is back to pristine state.
    """
    events: list[tuple[float, int, int]] = []  # (time, 0=departure/1=arrival, id)
    by_id: dict[int, VNRequest] = {}
    for vnr in workload:
        heappush(events, (vnr.arrival, 1, vnr.id))
        by_id[vnr.id] = vnr

    mappings: dict[int, Mapping] = {}
    revenue_sum = 0.0
    cost_sum = 0.0
    revenues: dict[int, float] = {}
    costs: dict[int, float] = {}
    arrived = accepted = 0
    rejected_resources = 0.0
    offered = sum(revenue(vnr) for vnr in workload)
    horizon = 0.0
    samples: list[Sample] = []
    if workload:
        samples.append(_take_sample(0.0, sn, 0.0, 0.0, 0, 0, power_cfg, frag_cfg))

    while events:
        time, kind, vid = heappop(events)
        vnr = by_id[vid]
        if kind == 0:
            release_mapping(sn, vnr, mappings.pop(vid))
            vnr.state = "departed"
            revenue_sum -= revenues.pop(vid)
            cost_sum -= costs.pop(vid)
            horizon = time
        else:
            arrived += 1
            snapshot = sn.clone()
            try:
                mapping = solver(snapshot, vnr)
            except Exception as exc:
                raise SolverPanic(vid, exc) from exc
            if mapping is not None:
                apply_mapping(sn, vnr, mapping)
                vnr.state = "active"
                mappings[vid] = mapping
                accepted += 1
                revenues[vid] = revenue(vnr)
                costs[vid] = embedding_cost(vnr, mapping)
                revenue_sum += revenues[vid]
                cost_sum += costs[vid]
                heappush(events, (time + vnr.lifetime, 0, vid))
            else:
                vnr.state = "rejected"
                rejected_resources += revenue(vnr)
        if not events or events[0][0] > time:
            samples.append(_take_sample(time, sn, revenue_sum, cost_sum,
                                        arrived, accepted, power_cfg, frag_cfg))

    return MetricsSeries(samples, horizon, len(workload), accepted,
                         offered, rejected_resources)


def compute_metrics(series: MetricsSeries) -> Aggregates:
    """Long-term aggregates over [0, horizon] by exact piecewise integration."""
    horizon = series.horizon
    if horizon <= 0.0 or len(series.samples) < 2:
        raise DegenerateSeries("series has no positive-length horizon")
    int_revenue = int_cost = int_snf = int_power = 0.0
    for prev, cur in zip(series.samples, series.samples[1:]):
        dt = min(cur.time, horizon) - prev.time
        if dt <= 0.0:
            continue
        int_revenue += prev.revenue_rate * dt
        int_cost += prev.cost_rate * dt
        int_snf += prev.snf * dt
        int_power += prev.power_watts * dt
    return Aggregates(
        revenue_rate=int_revenue / horizon,
        acceptance_ratio=series.accepted_requests / series.total_requests,
        rc_ratio=int_revenue / int_cost if int_cost > 0 else nan,
        avg_snf=int_snf / horizon,
        avg_power_watts=int_power / horizon,
        rejected_resource_ratio=(series.rejected_resources / series.offered_resources
                                 if series.offered_resources > 0 else 0.0),
    )


def summarize(series: MetricsSeries) -> Aggregates:
    """Aggregates with nan sentinels when the series is degenerate."""
    try:
        return compute_metrics(series)
    except DegenerateSeries:
        acceptance = (series.accepted_requests / series.total_requests
                      if series.total_requests else nan)
        rejected = (series.rejected_resources / series.offered_resources
                    if series.offered_resources > 0 else 0.0)
        return Aggregates(nan, acceptance, nan, nan, nan, rejected)


SAMPLE_HEADER = ("time,revenue_rate,acceptance_ratio,cost_rate,snf,"
                 "power_watts,active_nodes,utilization")
SUMMARY_HEADER = ("revenue_rate,acceptance_ratio,rc_ratio,avg_snf,"
                  "avg_power_watts,rejected_resource_ratio")


def write_metrics_csv(series: MetricsSeries, path) -> None:
    """Sample rows to ``path`` and aggregates to ``<path>.summary.csv``."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SAMPLE_HEADER + "\n")
        for s in series.samples:
            fh.write(f"{s.time:.6f},{s.revenue_rate:.6f},"
                     f"{s.acceptance_ratio:.6f},{s.cost_rate:.6f},"
                     f"{s.snf:.6f},{s.power_watts:.6f},{s.active_nodes},"
                     f"{s.utilization:.6f}\n")
    agg = summarize(series)
    with open(f"{path}.summary.csv", "w", encoding="utf-8") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        fh.write(f"{agg.revenue_rate:.6f},{agg.acceptance_ratio:.6f},"
                 f"{agg.rc_ratio:.6f},{agg.avg_snf:.6f},"
                 f"{agg.avg_power_watts:.6f},{agg.rejected_resource_ratio:.6f}\n")
