"""Energy-aware virtual network embedding toolkit.

Data model and transactional allocation (net_model), power accounting
(power_model), objective primitives (embedding_core), the memetic
multi-objective swarm solver (mopso), greedy/backtracking baselines
(baselines), workload generation and persistence (workload), the
discrete-event harness (sim), and reporting (report, cli).
"""

from .embedding_core import (FragmentationConfig, InfeasibleMapping, NoPath,
                             ObjectiveVector, embedding_cost,
                             evaluate_objectives, revenue,
                             shortest_feasible_path, snf)
from .net_model import (InsufficientBandwidth, InsufficientCpu, InvalidMapping,
                        Mapping, NotAllocated, ParseError, SubstrateLink,
                        SubstrateNetwork, SubstrateNode, SubstratePath,
                        VirtualLink, VirtualNetwork, VirtualNode, VneError,
                        VNRequest, apply_mapping, release_mapping,
                        validate_mapping)
from .power_model import (PowerConfig, ServerProfile, UnknownProfile,
                          default_power_config, embedding_power,
                          load_power_profiles, network_power, node_power,
                          resolve_power_config)
from .mopso import (DisconnectedVN, ExternalArchive, MopsoResult, Particle,
                    Position, SolverParams, crowding_distance, dominates,
                    fast_nondominated_sort, solve, update_archive)
from .baselines import backtrack_bfs, greedy_two_stage
from .workload import (InvalidSpec, SubstrateGenSpec, WorkloadSpec, brite_read,
                       brite_write, gen_substrate, gen_workload, workload_read,
                       workload_write)
from .sim import (Aggregates, DegenerateSeries, MetricsSeries, Sample,
                  SolverPanic, compute_metrics, make_solver, run_simulation,
                  summarize, write_metrics_csv)

__version__ = "0.1.0"
