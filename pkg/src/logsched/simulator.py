"""Experiment harness: wires workload, policy, redirects and maintainer into runs.

One ``run`` simulates a full request stream against a fresh cluster:
generate (or accept) the windowed workload, roll initial loads, mark
stragglers, then schedule window by window with the configured policy,
recording redirects as they happen and letting the maintainer migrate
redirected extents home during idle windows. ``run_many`` repeats that
with consecutive seeds for averaged experiments.

Determinism: a run is a pure function of its config. The master seed is
split into four independent substreams (workload, initial loads,
straggler choice, policy randomness), so changing e.g. only the policy
leaves the generated workload untouched.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np

from .core import ScheduleDecision, group_into_steps, new_statistic_log
from .core import TimeWindow
from .prob_model import ProbConfig, apply_selection, update_load
from .redirect import RedirectTable, maintainer_flush, new_tables, record_redirect
from .schedulers import (
    SchedulerKind,
    ThresholdGate,
    schedule_mlml,
    schedule_nltr,
    schedule_rr,
    schedule_trh,
)
from .workload import ClusterConfig, WorkloadConfig, gen_initial_loads, gen_requests, inject_stragglers

__all__ = [
    "MaintainerConfig",
    "RunConfig",
    "SimulationResult",
    "run",
    "run_many",
    "workload_for_seed",
]


@dataclass(frozen=True, slots=True)
class MaintainerConfig:
    """Background migration of redirected extents during idle windows.

    ``budget`` caps how many entries one idle window may migrate.
    ``charge_migration`` also bills the moved bytes to the default
    server's load; off by default, migration is background traffic.
    """

    enabled: bool = True
    budget: int = 64
    charge_migration: bool = False

    def validate(self) -> None:
        if self.budget < 0:
            raise ValueError(f"budget must be >= 0, got {self.budget}")


@dataclass(frozen=True, slots=True)
class RunConfig:
    """Everything one simulation run depends on.

    ``gate`` and ``prob`` default to values derived from the workload's
    mean request length: the redirection threshold equals it, and so
    does the load scale of the probability decay.
    """

    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    workload: WorkloadConfig = field(default_factory=WorkloadConfig)
    scheduler: SchedulerKind = field(default_factory=lambda: SchedulerKind("rr"))
    gate: Optional[ThresholdGate] = None
    prob: Optional[ProbConfig] = None
    maintainer: MaintainerConfig = field(default_factory=MaintainerConfig)
    seed: int = 0

    def effective_gate(self) -> ThresholdGate:
        return self.gate if self.gate is not None else ThresholdGate(self.workload.mean_request_length())

    def effective_prob(self) -> ProbConfig:
        return self.prob if self.prob is not None else ProbConfig(self.workload.mean_request_length())


@dataclass(slots=True, eq=False)
class SimulationResult:
    """What one run produced.

    ``initial_loads`` is the cluster state after straggler injection,
    i.e. what the policy started against; ``scheduled_mb`` is the total
    MB placed, so final minus initial loads sums to it (plus migrated
    bytes when the maintainer bills them).
    """

    final_loads: np.ndarray
    initial_loads: np.ndarray
    request_counts: np.ndarray
    straggler_ids: List[int]
    decisions: List[ScheduleDecision]
    redirect_tables: List[RedirectTable]
    redirect_entries_created: int
    migrated_mb: float
    scheduled_mb: float
    seed: int

    @property
    def num_servers(self) -> int:
        return len(self.final_loads)


def _substreams(seed: int) -> List[random.Random]:
    master = random.Random(seed)
    return [random.Random(master.getrandbits(63)) for _ in range(4)]


def workload_for_seed(cfg: WorkloadConfig, seed: int) -> List[TimeWindow]:
    """The exact request stream ``run`` would generate for this seed."""
    return gen_requests(cfg, _substreams(seed)[0])


def run(cfg: RunConfig, *, workload_windows: Optional[Sequence[TimeWindow]] = None) -> SimulationResult:
    """Simulate one full run; same config, same result.

    ``workload_windows`` substitutes a pre-generated request stream (for
    replaying a dumped workload); initial loads and straggler choice
    still come from the config's seed.
    """
    cfg.cluster.validate()
    cfg.workload.validate()
    cfg.maintainer.validate()
    m = cfg.cluster.num_servers
    cfg.scheduler.validate_for(m)
    gate = cfg.effective_gate()
    prob_cfg = cfg.effective_prob()

    rng_workload, rng_loads, rng_stragglers, rng_policy = _substreams(cfg.seed)
    if workload_windows is None:
        windows: Sequence[TimeWindow] = gen_requests(cfg.workload, rng_workload)
    else:
        windows = workload_windows

    loads = gen_initial_loads(cfg.cluster, rng_loads)
    straggler_ids = inject_stragglers(loads, cfg.cluster, rng_stragglers)
    initial = loads.copy()
    log = new_statistic_log(m, loads)

    tables = new_tables(m)
    decisions: List[ScheduleDecision] = []
    request_counts = np.zeros(m, dtype=int)
    entries_created = 0
    migrated = 0.0
    scheduled = 0.0

    for window in windows:
        steps = group_into_steps(window)
        if not steps:
            if cfg.maintainer.enabled:
                moved, _ = maintainer_flush(tables, log, cfg.maintainer.budget, cfg.maintainer.charge_migration)
                migrated += moved
            continue

        kind = cfg.scheduler
        if kind.name == "rr":
            window_decisions = []
            for step in steps:
                d = schedule_rr(step, m)
                # the baseline still feeds the log, so its bookkeeping
                # stays comparable with the aware policies
                update_load(log, d.chosen_server, step.total_length)
                apply_selection(log, d.chosen_server, prob_cfg)
                window_decisions.append(d)
        elif kind.name == "mlml":
            window_decisions = schedule_mlml(steps, log, gate, prob_cfg)
        elif kind.name == "trh":
            window_decisions = [schedule_trh(step, log, gate, prob_cfg, rng_policy) for step in steps]
        else:
            window_decisions = schedule_nltr(steps, log, gate, kind.levels, prob_cfg, rng_policy)

        for step, decision in zip(steps, window_decisions):
            decision.window_index = window.index
            request_counts[decision.chosen_server] += len(step.requests)
            scheduled += step.total_length
            if decision.redirected:
                table = tables[decision.default_server]
                for req in step.requests:
                    before = len(table.entries)
                    record_redirect(tables, decision, req.object_id, req.offset, req.length)
                    entries_created += len(table.entries) - before
            decisions.append(decision)

    return SimulationResult(
        final_loads=log.loads.copy(),
        initial_loads=initial,
        request_counts=request_counts,
        straggler_ids=straggler_ids,
        decisions=decisions,
        redirect_tables=tables,
        redirect_entries_created=entries_created,
        migrated_mb=migrated,
        scheduled_mb=scheduled,
        seed=cfg.seed,
    )


def run_many(cfg: RunConfig, num_runs: int) -> List[SimulationResult]:
    """Repeat ``run`` with seeds cfg.seed, cfg.seed+1, ... cfg.seed+num_runs-1."""
    if num_runs < 1:
        raise ValueError(f"num_runs must be >= 1, got {num_runs}")
    return [run(replace(cfg, seed=cfg.seed + i)) for i in range(num_runs)]
