"""The four scheduling policies behind one shared shape of decision.

All policies place a step's I/O on exactly one server and record whether
it was redirected away from its default (object_id mod M) placement:

- ``schedule_rr``: the default placement itself, the baseline.
- ``schedule_mlml``: max-length/min-load pairing. Steps sorted by length
  descending are paired circularly with servers sorted by selection
  probability descending, so the longest I/O meets the most selectable
  (lightest) server.
- ``schedule_trh``: two random draws from the lighter half of the
  probability ranking; the lighter-loaded draw is the candidate.
- ``schedule_nltr``: the ranking and the window's lengths are each split
  recursively into 2**n matched sections; a step draws two servers from
  the section matching its length class, weighted toward lighter loads,
  and keeps the lighter one.

Every candidate passes through the benefit gate before it sticks:
redirection must save more than a configured amount of load, otherwise
the default placement wins. The three log-driven policies update the
statistic log (load, then selection probability) after each decision, so
later decisions inside one window see the earlier ones.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .core import ScheduleDecision, StatisticLog, Step
from .prob_model import ProbConfig, apply_selection, refresh_probs, servers_by_prob_desc, update_load

__all__ = [
    "SchedulerKind",
    "ThresholdGate",
    "SectionPartition",
    "benefit_gate",
    "schedule_rr",
    "schedule_mlml",
    "schedule_trh",
    "build_sections",
    "schedule_nltr",
]

_KIND_NAMES = ("rr", "mlml", "trh", "nltr")


@dataclass(frozen=True, slots=True)
class SchedulerKind:
    """Names one of the four policies; ``levels`` applies only to nltr.

    nltr with n levels partitions servers and request lengths into 2**n
    sections; n=0 degenerates to plain two-random-choices over all
    servers.
    """

    name: str
    levels: int = 0

    def __post_init__(self) -> None:
        if self.name not in _KIND_NAMES:
            raise ValueError(f"unknown scheduler {self.name!r}, expected one of {_KIND_NAMES}")
        if self.levels < 0:
            raise ValueError(f"nltr levels must be >= 0, got {self.levels}")
        if self.name != "nltr" and self.levels != 0:
            raise ValueError(f"levels only applies to nltr, not {self.name}")

    @classmethod
    def parse(cls, text: str, default_levels: int = 1) -> "SchedulerKind":
        """Parse labels like ``rr``, ``trh``, ``nltr`` or ``nltr:2``."""
        text = text.strip().lower()
        if ":" in text:
            name, _, levels = text.partition(":")
            if name != "nltr":
                raise ValueError(f"only nltr takes a level suffix, got {text!r}")
            try:
                n = int(levels)
            except ValueError:
                raise ValueError(f"bad nltr level {levels!r} in {text!r}") from None
            return cls("nltr", n)
        if text == "nltr":
            return cls("nltr", default_levels)
        return cls(text)

    @property
    def label(self) -> str:
        return f"nltr:{self.levels}" if self.name == "nltr" else self.name

    @property
    def file_label(self) -> str:
        """Label safe for file names (``nltr:2`` becomes ``nltr2``)."""
        return self.label.replace(":", "")

    def validate_for(self, num_servers: int) -> None:
        if self.name == "nltr" and 2**self.levels > num_servers:
            raise ValueError(
                f"nltr needs 2**levels <= servers: 2**{self.levels} = {2 ** self.levels} "
                f"> {num_servers}"
            )


@dataclass(frozen=True, slots=True)
class ThresholdGate:
    """Redirection must save more than this many MB of load to be worth it.

    +inf disables redirection entirely; -inf accepts every candidate.
    """

    threshold: float

    def __post_init__(self) -> None:
        if self.threshold != self.threshold:  # NaN
            raise ValueError("threshold must not be NaN")


def benefit_gate(default_server: int, target_server: int, log: StatisticLog, gate: ThresholdGate) -> int:
    """Pick the proposed target only if it beats the default by more than the threshold.

    The benefit is load(default) - load(target) per the statistic log;
    anything at or below the threshold keeps the default placement.
    """
    for server in (default_server, target_server):
        if not 0 <= server < log.num_servers:
            raise ValueError(f"server id {server} out of range [0, {log.num_servers})")
    benefit = float(log.loads[default_server]) - float(log.loads[target_server])
    return target_server if benefit > gate.threshold else default_server


def _decision(step: Step, default: int, target: int, chosen: int) -> ScheduleDecision:
    return ScheduleDecision(
        step_object_id=step.object_id,
        length=step.total_length,
        default_server=default,
        chosen_server=chosen,
        redirected=chosen != default,
        target_server=target,
    )


def _commit(log: StatisticLog, chosen: int, length: float, prob_cfg: ProbConfig) -> None:
    # every decision feeds back into the log before the next one is made
    update_load(log, chosen, length)
    apply_selection(log, chosen, prob_cfg)


def _lighter(log: StatisticLog, a: int, b: int) -> int:
    """The lighter-loaded of two servers; ties go to the smaller id."""
    if (float(log.loads[a]), a) <= (float(log.loads[b]), b):
        return a
    return b


def schedule_rr(step: Step, num_servers: int) -> ScheduleDecision:
    """Default placement: the step's object id modulo the server count."""
    if num_servers < 1:
        raise ValueError(f"num_servers must be >= 1, got {num_servers}")
    server = step.object_id % num_servers
    return _decision(step, server, server, server)


def schedule_mlml(
    steps: Sequence[Step],
    log: StatisticLog,
    gate: ThresholdGate,
    prob_cfg: ProbConfig,
) -> List[ScheduleDecision]:
    """Max-length/min-load pairing over one window.

    Steps are sorted by total length descending (ties by object id), the
    servers once by selection probability descending; the k-th sorted
    step proposes the (k mod M)-th server. Both sorts happen once per
    window; the log still advances after every decision, which matters to
    the benefit gate. The returned list is in the window's arrival order.
    """
    if not steps:
        return []
    refresh_probs(log, prob_cfg)
    order = servers_by_prob_desc(log)
    m = log.num_servers
    ranked = sorted(range(len(steps)), key=lambda k: (-steps[k].total_length, steps[k].object_id))
    decisions: List[ScheduleDecision | None] = [None] * len(steps)
    for pos, k in enumerate(ranked):
        step = steps[k]
        default = step.object_id % m
        target = int(order[pos % m])
        chosen = benefit_gate(default, target, log, gate)
        decisions[k] = _decision(step, default, target, chosen)
        _commit(log, chosen, step.total_length, prob_cfg)
    return decisions  # type: ignore[return-value]


def schedule_trh(
    step: Step,
    log: StatisticLog,
    gate: ThresholdGate,
    prob_cfg: ProbConfig,
    rng: random.Random,
) -> ScheduleDecision:
    """Two random choices from the lighter half of the ranking.

    The pool is the first ceil(M/2) servers of the probability-descending
    order at decision time; two ids are drawn uniformly with replacement
    and the lighter-loaded one is the candidate put to the gate.
    """
    refresh_probs(log, prob_cfg)
    order = servers_by_prob_desc(log)
    m = log.num_servers
    half = (m + 1) // 2
    a = int(order[rng.randrange(half)])
    b = int(order[rng.randrange(half)])
    target = _lighter(log, a, b)
    default = step.object_id % m
    chosen = benefit_gate(default, target, log, gate)
    decision = _decision(step, default, target, chosen)
    _commit(log, chosen, step.total_length, prob_cfg)
    return decision


@dataclass(slots=True)
class SectionPartition:
    """2**n matched sections of servers and request lengths.

    ``server_sections`` are contiguous slices of the probability-ranked
    server list, best-ranked section first. ``request_boundaries`` are
    the n-level length cut points in descending order; a length strictly
    above a cut belongs to the sections before it, a length equal to a
    cut falls into the lower (smaller-length) side.
    """

    server_sections: List[List[int]]
    request_boundaries: List[float]

    @property
    def num_sections(self) -> int:
        return len(self.server_sections)

    def section_index(self, length: float) -> int:
        for i, cut in enumerate(self.request_boundaries):
            if length > cut:
                return i
        return len(self.server_sections) - 1


def _split_servers(order: List[int], levels: int) -> List[List[int]]:
    if levels == 0:
        return [order]
    mid = len(order) // 2
    return _split_servers(order[:mid], levels - 1) + _split_servers(order[mid:], levels - 1)


def _split_lengths(seg: List[float], levels: int, cuts: List[float], fill: float) -> None:
    """Emit the in-order cut points of the recursive average split.

    ``seg`` is sorted descending. Each level cuts at the segment's mean:
    the strictly-greater part on the high side, the rest on the low side.
    When every value equals the mean (nothing strictly greater) the
    segment is cut at its middle index instead, and an empty segment
    inherits the enclosing cut value so the flat list stays descending.
    """
    if levels == 0:
        return
    if seg:
        mean = sum(seg) / len(seg)
        k = 0
        while k < len(seg) and seg[k] > mean:
            k += 1
        if k == 0:
            k = len(seg) // 2
        cut = mean
    else:
        k = 0
        cut = fill
    _split_lengths(seg[:k], levels - 1, cuts, cut)
    cuts.append(cut)
    _split_lengths(seg[k:], levels - 1, cuts, cut)


def build_sections(log: StatisticLog, levels: int, steps: Sequence[Step]) -> SectionPartition:
    """Split the server ranking and the window's step lengths into 2**n sections.

    Servers: the probability-descending order halved recursively at the
    middle index, so section sizes differ by at most one. Lengths: the
    step lengths sorted descending, split recursively at each segment's
    mean. Section i of requests draws from section i of servers.
    """
    if levels < 0:
        raise ValueError(f"levels must be >= 0, got {levels}")
    m = log.num_servers
    if 2**levels > m:
        raise ValueError(f"nltr needs 2**levels <= servers: 2**{levels} = {2 ** levels} > {m}")
    if not steps:
        raise ValueError("cannot build sections for an empty window")
    order = [int(s) for s in servers_by_prob_desc(log)]
    server_sections = _split_servers(order, levels)
    lengths = sorted((s.total_length for s in steps), reverse=True)
    cuts: List[float] = []
    _split_lengths(lengths, levels, cuts, lengths[0])
    return SectionPartition(server_sections, cuts)


def _weighted_draw(log: StatisticLog, section: List[int], scale: float, rng: random.Random) -> int:
    """Draw one server from a section, lighter loads exponentially more likely.

    The weights take the same decay shape the selection probabilities
    use, anchored at the section's lightest load. The probability column
    itself is no use for this draw: every selection redistributes an
    equal share to all servers, so deep inside a heavy section the
    probabilities level out and stop separating an overloaded server
    from a merely busy one, while the load column keeps the difference.
    """
    loads = log.loads[section]
    weights = np.exp(-(loads - float(loads.min())) / scale)
    r = rng.random() * float(weights.sum())
    idx = int(np.searchsorted(np.cumsum(weights), r, side="right"))
    if idx >= len(section):
        idx = len(section) - 1
    return section[idx]


def schedule_nltr(
    steps: Sequence[Step],
    log: StatisticLog,
    gate: ThresholdGate,
    levels: int,
    prob_cfg: ProbConfig,
    rng: random.Random,
) -> List[ScheduleDecision]:
    """Sectioned two-random-choices over one window.

    Sections are built once from the window's steps and the refreshed
    ranking. Each step then maps to the section matching its length,
    draws two servers from that section weighted toward lighter loads,
    and puts the lighter draw to the gate. Steps are processed, and
    decisions returned, in arrival order.
    """
    if not steps:
        return []
    refresh_probs(log, prob_cfg)
    partition = build_sections(log, levels, steps)
    m = log.num_servers
    decisions: List[ScheduleDecision] = []
    for step in steps:
        section = partition.server_sections[partition.section_index(step.total_length)]
        a = _weighted_draw(log, section, prob_cfg.load_scale, rng)
        b = _weighted_draw(log, section, prob_cfg.load_scale, rng)
        target = _lighter(log, a, b)
        default = step.object_id % m
        chosen = benefit_gate(default, target, log, gate)
        decisions.append(_decision(step, default, target, chosen))
        _commit(log, chosen, step.total_length, prob_cfg)
    return decisions
