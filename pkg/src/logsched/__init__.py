"""Client-side log-assisted straggler-aware I/O scheduling, simulated.

Clients of an object storage cluster normally place a request on the
server its object id hashes to, which keeps hammering servers that are
already slow. This package simulates the alternative: each client keeps
a local statistic log of the load it has sent and the selection
probability of each server, and redirects I/O away from servers the log
says are busy. Four policies are provided (round robin placement and
three log-driven ones), plus redirect-table bookkeeping with a
background maintainer, a synthetic workload generator, and a seeded
experiment harness with csv/json/svg reporting.
"""

from .core import (
    Request,
    ScheduleDecision,
    ServerStatEntry,
    StatisticLog,
    Step,
    TimeWindow,
    group_into_steps,
    new_statistic_log,
)
from .prob_model import ProbConfig, apply_selection, refresh_probs, servers_by_prob_desc, update_load
from .redirect import RedirectEntry, RedirectTable, maintainer_flush, new_tables, record_redirect, resolve_read
from .report import (
    HistogramBucket,
    LoadHistogram,
    MetricsSummary,
    average_loads,
    emit,
    load_histogram,
    load_histogram_many,
    straggler_hits,
    summarize,
)
from .schedulers import (
    SchedulerKind,
    SectionPartition,
    ThresholdGate,
    benefit_gate,
    build_sections,
    schedule_mlml,
    schedule_nltr,
    schedule_rr,
    schedule_trh,
)
from .simulator import MaintainerConfig, RunConfig, SimulationResult, run, run_many, workload_for_seed
from .workload import (
    ClusterConfig,
    WorkloadConfig,
    dump_workload,
    gen_initial_loads,
    gen_requests,
    inject_stragglers,
    load_workload,
)

__version__ = "0.1.0"

__all__ = [
    "Request",
    "ServerStatEntry",
    "StatisticLog",
    "TimeWindow",
    "Step",
    "ScheduleDecision",
    "group_into_steps",
    "new_statistic_log",
    "ProbConfig",
    "update_load",
    "apply_selection",
    "refresh_probs",
    "servers_by_prob_desc",
    "SchedulerKind",
    "ThresholdGate",
    "SectionPartition",
    "benefit_gate",
    "schedule_rr",
    "schedule_mlml",
    "schedule_trh",
    "build_sections",
    "schedule_nltr",
    "RedirectEntry",
    "RedirectTable",
    "new_tables",
    "record_redirect",
    "resolve_read",
    "maintainer_flush",
    "WorkloadConfig",
    "ClusterConfig",
    "gen_requests",
    "gen_initial_loads",
    "inject_stragglers",
    "dump_workload",
    "load_workload",
    "MaintainerConfig",
    "RunConfig",
    "SimulationResult",
    "run",
    "run_many",
    "workload_for_seed",
    "HistogramBucket",
    "LoadHistogram",
    "MetricsSummary",
    "average_loads",
    "load_histogram",
    "load_histogram_many",
    "straggler_hits",
    "summarize",
    "emit",
    "__version__",
]
