"""Domain types for object I/O scheduling.

Everything the scheduler reasons about lives here: individual object
requests, the time windows that batch them, the per-object steps a window
is grouped into, the client-side server statistic log, and the decision
records the scheduling policies produce.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

__all__ = [
    "Request",
    "ServerStatEntry",
    "StatisticLog",
    "TimeWindow",
    "Step",
    "ScheduleDecision",
    "new_statistic_log",
    "group_into_steps",
]


@dataclass(frozen=True, slots=True)
class Request:
    """A single object I/O request, the unit being scheduled.

    ``length`` is in MB, ``offset`` in bytes within the object. A request
    that would span an object boundary must already be split into
    per-object requests before it reaches the scheduler; nothing here
    splits them.
    """

    object_id: int
    offset: int
    length: float

    def __post_init__(self) -> None:
        if self.object_id < 0:
            raise ValueError(f"object_id must be non-negative, got {self.object_id}")
        if self.offset < 0:
            raise ValueError(f"offset must be non-negative, got {self.offset}")
        if not self.length > 0:
            raise ValueError(f"length must be positive (MB), got {self.length}")


@dataclass(frozen=True, slots=True)
class ServerStatEntry:
    """Read-only view of one server's row in the statistic log."""

    server_id: int
    load: float
    prob: float


class StatisticLog:
    """Client-side scheduling memory.

    Keeps the pending requests of the window currently being scheduled
    next to two per-server arrays: ``loads``, the expected outstanding MB
    on each server accumulated from this client's own past decisions (no
    server probing involved), and ``probs``, the selection probabilities,
    which always sum to one.
    """

    __slots__ = ("requests", "loads", "probs", "ids")

    def __init__(
        self,
        loads: Sequence[float] | np.ndarray,
        probs: Sequence[float] | np.ndarray,
        requests: Optional[List[Request]] = None,
    ) -> None:
        self.loads = np.array(loads, dtype=float)
        self.probs = np.array(probs, dtype=float)
        if self.loads.shape != self.probs.shape or self.loads.ndim != 1:
            raise ValueError("loads and probs must be 1-d arrays of equal length")
        self.requests: List[Request] = list(requests) if requests else []
        # cached id vector, reused by every ranking sort
        self.ids = np.arange(len(self.loads))

    @property
    def num_servers(self) -> int:
        return len(self.loads)

    @property
    def servers(self) -> List[ServerStatEntry]:
        """Materialize the per-server rows (test/report convenience)."""
        return [
            ServerStatEntry(i, float(self.loads[i]), float(self.probs[i]))
            for i in range(self.num_servers)
        ]

    def copy(self) -> "StatisticLog":
        return StatisticLog(self.loads.copy(), self.probs.copy(), list(self.requests))

    def __repr__(self) -> str:
        return f"StatisticLog(num_servers={self.num_servers}, pending={len(self.requests)})"


def new_statistic_log(num_servers: int, initial_loads: Sequence[float] | np.ndarray) -> StatisticLog:
    """Build a fresh log: given loads, uniform selection probabilities.

    Args:
        num_servers: number of storage servers M, at least 1.
        initial_loads: M non-negative load values (MB).

    Returns:
        A StatisticLog with every prob equal to 1/M and no pending requests.
    """
    if num_servers < 1:
        raise ValueError(f"num_servers must be >= 1, got {num_servers}")
    loads = np.array(initial_loads, dtype=float)
    if loads.ndim != 1 or len(loads) != num_servers:
        raise ValueError(f"expected {num_servers} initial loads, got shape {loads.shape}")
    if not np.all(np.isfinite(loads)) or np.any(loads < 0):
        raise ValueError("initial loads must be finite and non-negative")
    probs = np.full(num_servers, 1.0 / num_servers)
    return StatisticLog(loads, probs)


@dataclass(slots=True)
class TimeWindow:
    """One batch of requests; windows are processed in increasing index order."""

    index: int
    requests: List[Request] = field(default_factory=list)


@dataclass(slots=True)
class Step:
    """All requests of one window that touch the same object.

    The step is the unit the policies schedule: every request in it goes
    to the same server. ``total_length`` is the summed MB; it is computed
    from the members when not given explicitly.
    """

    object_id: int
    requests: List[Request]
    total_length: float = -1.0

    def __post_init__(self) -> None:
        if not self.requests:
            raise ValueError("a step needs at least one request")
        for r in self.requests:
            if r.object_id != self.object_id:
                raise ValueError(
                    f"step for object {self.object_id} contains a request for object {r.object_id}"
                )
        if self.total_length < 0:
            self.total_length = sum(r.length for r in self.requests)


@dataclass(slots=True)
class ScheduleDecision:
    """Outcome of scheduling one step.

    ``target_server`` is the candidate the policy proposed before the
    benefit gate ran; it is excluded from equality so that decision lists
    from different policies compare on what actually happened.
    ``window_index`` is stamped by the simulator.
    """

    step_object_id: int
    length: float
    default_server: int
    chosen_server: int
    redirected: bool
    target_server: int = field(default=-1, compare=False)
    window_index: int = -1

    def __post_init__(self) -> None:
        if self.redirected != (self.chosen_server != self.default_server):
            raise ValueError("redirected must equal (chosen_server != default_server)")


def group_into_steps(window: TimeWindow) -> List[Step]:
    """Group a window's requests into per-object steps.

    Steps keep the order in which their objects first appear in the
    window; requests keep their arrival order within each step. The
    request count is conserved: every request lands in exactly one step.
    """
    grouped: dict[int, List[Request]] = {}
    for req in window.requests:
        grouped.setdefault(req.object_id, []).append(req)
    return [Step(object_id=oid, requests=reqs) for oid, reqs in grouped.items()]
