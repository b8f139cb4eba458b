"""Command-line front end: generate, simulate, report.

Exit codes: 0 success, 1 usage error (bad flag, missing file), 2 runtime
error.  All diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import report as report_mod
from . import sim
from .embedding_core import FragmentationConfig
from .mopso import SolverParams
from .net_model import VneError
from .power_model import resolve_power_config
from .workload import (SubstrateGenSpec, WorkloadSpec, brite_read, brite_write,
                       gen_substrate, gen_workload, workload_read,
                       workload_write)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_range(text: str, flag: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise _UsageError(f"{flag}: expected LO:HI, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise _UsageError(f"{flag}: expected numbers, got {text!r}")
    return lo, hi


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise _UsageError(f"{flag}: expected comma-separated integers, got {text!r}")


def _parse_float_list(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise _UsageError(f"{flag}: expected comma-separated numbers, got {text!r}")


def _require_file(path: str, flag: str) -> str:
    if not os.path.exists(path):
        raise _UsageError(f"{flag}: file not found: {path}")
    return path


def build_parser() -> _Parser:
    parser = _Parser(prog="vne", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("gen-substrate", help="generate a substrate topology")
    p.add_argument("--nodes", type=int, default=50)
    p.add_argument("--links", type=int, default=250)
    p.add_argument("--bw", default="50:100", help="bandwidth range LO:HI")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=0.2)
    p.add_argument("--profile-ids", default=None,
                   help="comma-separated profile indexes (default: all configured)")
    p.add_argument("--power-profiles", default=None, metavar="FILE")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True, metavar="FILE")
    p.set_defaults(func=cmd_gen_substrate)

    p = sub.add_parser("gen-workload", help="generate a request workload")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--vn-nodes", default="2:20", help="node count range LO:HI")
    p.add_argument("--connectivity", type=float, default=0.5)
    p.add_argument("--cpu-choices", default="2500,2000,1000,500")
    p.add_argument("--bw", default="1:50", help="bandwidth range LO:HI")
    p.add_argument("--arrival-rate", type=float, default=10.0,
                   help="requests per 100 time units")
    p.add_argument("--lifetime", default="300:700", help="lifetime range LO:HI")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True, metavar="FILE")
    p.set_defaults(func=cmd_gen_workload)

    p = sub.add_parser("run", help="simulate a workload with one solver")
    p.add_argument("--substrate", required=True, metavar="FILE")
    p.add_argument("--workload", required=True, metavar="FILE")
    p.add_argument("--solver", choices=sim.SOLVER_NAMES, default="mopso")
    p.add_argument("--iterations", type=int, default=5)
    p.add_argument("--swarm", type=int, default=10)
    p.add_argument("--ea-max", type=int, default=20)
    p.add_argument("--hops-max", type=int, default=2)
    p.add_argument("--max-backtrack-mult", type=int, default=3,
                   help="re-mapping budget per request = mult x virtual nodes")
    p.add_argument("--w", type=float, default=0.4)
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--pro-mut", type=float, default=None,
                   help="mutation probability (default: 1/virtual nodes)")
    p.add_argument("--frag-q", type=int, default=2)
    p.add_argument("--frag-bw-bound", type=float, default=1.0)
    p.add_argument("--power-profiles", default=None, metavar="FILE")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True, metavar="FILE",
                   help="metrics CSV; a .summary.csv companion is written too")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="compare run summaries")
    p.add_argument("summaries", nargs="+", metavar="SUMMARY_CSV")
    p.add_argument("--labels", default=None,
                   help="comma-separated run labels (default: file stems)")
    p.add_argument("--out", default=None, metavar="PREFIX",
                   help="also write PREFIX.csv and PREFIX_<metric>.png figures")
    p.set_defaults(func=cmd_report)
    return parser


def cmd_gen_substrate(args) -> int:
    if args.power_profiles:
        _require_file(args.power_profiles, "--power-profiles")
    power_cfg = resolve_power_config(args.power_profiles)
    bw_lo, bw_hi = _parse_range(args.bw, "--bw")
    if args.profile_ids is not None:
        profile_ids = _parse_int_list(args.profile_ids, "--profile-ids")
    else:
        profile_ids = tuple(range(len(power_cfg.profiles)))
    spec = SubstrateGenSpec(node_count=args.nodes,
                            target_link_count=args.links,
                            bw_min=bw_lo, bw_max=bw_hi,
                            waxman_alpha=args.alpha, waxman_beta=args.beta,
                            profile_ids=profile_ids, seed=args.seed)
    sn = gen_substrate(spec, power_cfg)
    brite_write(sn, args.out, power_cfg)
    print(f"wrote {args.out} ({len(sn.nodes)} nodes, {len(sn.links)} links)")
    return 0


def cmd_gen_workload(args) -> int:
    lo, hi = _parse_range(args.vn_nodes, "--vn-nodes")
    bw_lo, bw_hi = _parse_range(args.bw, "--bw")
    life_lo, life_hi = _parse_range(args.lifetime, "--lifetime")
    spec = WorkloadSpec(vnr_count=args.count,
                        vn_node_min=int(lo), vn_node_max=int(hi),
                        connectivity=args.connectivity,
                        cpu_choices=_parse_float_list(args.cpu_choices,
                                                      "--cpu-choices"),
                        bw_min=bw_lo, bw_max=bw_hi,
                        arrival_rate=args.arrival_rate,
                        lifetime_min=life_lo, lifetime_max=life_hi,
                        seed=args.seed)
    requests = gen_workload(spec)
    workload_write(requests, args.out)
    print(f"wrote {args.out} ({len(requests)} requests)")
    return 0


def cmd_run(args) -> int:
    _require_file(args.substrate, "--substrate")
    _require_file(args.workload, "--workload")
    if args.power_profiles:
        _require_file(args.power_profiles, "--power-profiles")
    power_cfg = resolve_power_config(args.power_profiles)
    sn = brite_read(args.substrate, power_cfg)
    workload = workload_read(args.workload)
    params = SolverParams(iterations_max=args.iterations, swarm_size=args.swarm,
                          ea_max_size=args.ea_max, hops_max=args.hops_max,
                          w=args.w, c1=args.c1, c2=args.c2,
                          pro_mut=args.pro_mut)
    frag_cfg = FragmentationConfig(q=args.frag_q,
                                   bw_lower_bound=args.frag_bw_bound)
    solver = sim.make_solver(args.solver, params=params, power_cfg=power_cfg,
                             frag_cfg=frag_cfg,
                             backtrack_mult=args.max_backtrack_mult,
                             seed=args.seed)
    series = sim.run_simulation(sn, workload, solver, power_cfg, frag_cfg)
    sim.write_metrics_csv(series, args.out)
    agg = sim.summarize(series)
    print(f"wrote {args.out} and {args.out}.summary.csv "
          f"(acceptance {agg.acceptance_ratio:.3f}, "
          f"rc {agg.rc_ratio:.3f}, power {agg.avg_power_watts:.1f} W)")
    return 0


def cmd_report(args) -> int:
    for path in args.summaries:
        _require_file(path, "SUMMARY_CSV")
    labels = args.labels.split(",") if args.labels else None
    if labels is not None and len(labels) != len(args.summaries):
        raise _UsageError("--labels: need one label per summary file")
    runs = report_mod.load_runs(args.summaries, labels)
    print(report_mod.format_table(runs))
    if args.out:
        report_mod.write_comparison_csv(runs, f"{args.out}.csv")
        figures = report_mod.render_figures(runs, args.out)
        print(f"wrote {args.out}.csv and {len(figures)} figures")
    return 0


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args) or 0
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (VneError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
