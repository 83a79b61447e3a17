"""Synthetic workload and cluster state generation.

Requests come in three size classes (large, medium, small) mixed by
configurable weights, with lengths drawn uniformly from the open
interior of each class range. Servers start with Gaussian initial
loads, and a chosen fraction of them are made stragglers by scaling
their load to a multiple of the mean of the rest.

Workloads can be dumped to and reloaded from a plain text format so a
run can be repeated bit-for-bit or shared between machines.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Sequence, TextIO, Tuple

import numpy as np

from .core import Request, TimeWindow

__all__ = [
    "WorkloadConfig",
    "ClusterConfig",
    "gen_requests",
    "gen_initial_loads",
    "inject_stragglers",
    "dump_workload",
    "load_workload",
]


@dataclass(frozen=True, slots=True)
class WorkloadConfig:
    """Shape of the synthetic request stream.

    ``mix`` gives the (large, medium, small) class weights; the ranges
    are (lo, hi) bounds in MB, and lengths are drawn strictly inside
    them. Requests are spread uniformly over ``num_windows`` time
    windows against ``num_objects`` distinct objects.
    """

    num_requests: int = 2000
    num_windows: int = 50
    num_objects: int = 1000
    mix: Tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    large_range: Tuple[float, float] = (10.0, 100.0)
    medium_range: Tuple[float, float] = (4.0, 10.0)
    small_range: Tuple[float, float] = (0.1, 4.0)
    max_offset: float = 1024.0

    def validate(self) -> None:
        if self.num_requests < 0:
            raise ValueError(f"num_requests must be >= 0, got {self.num_requests}")
        if self.num_windows < 1:
            raise ValueError(f"num_windows must be >= 1, got {self.num_windows}")
        if self.num_objects < 1:
            raise ValueError(f"num_objects must be >= 1, got {self.num_objects}")
        if len(self.mix) != 3 or any(w < 0 for w in self.mix) or sum(self.mix) <= 0:
            raise ValueError(f"mix must be three non-negative weights with positive sum, got {self.mix}")
        for name, (lo, hi) in (
            ("large_range", self.large_range),
            ("medium_range", self.medium_range),
            ("small_range", self.small_range),
        ):
            if not (0 <= lo < hi):
                raise ValueError(f"{name} must satisfy 0 <= lo < hi, got ({lo}, {hi})")
        if self.max_offset < 0:
            raise ValueError(f"max_offset must be >= 0, got {self.max_offset}")

    def mean_request_length(self) -> float:
        """Expected request length in MB under the configured mix."""
        total = sum(self.mix)
        mids = (
            (self.large_range[0] + self.large_range[1]) / 2,
            (self.medium_range[0] + self.medium_range[1]) / 2,
            (self.small_range[0] + self.small_range[1]) / 2,
        )
        return sum(w * mid for w, mid in zip(self.mix, mids)) / total


@dataclass(frozen=True, slots=True)
class ClusterConfig:
    """Server-side starting conditions.

    Initial loads are Gaussian (clamped at zero); then
    ``straggler_fraction`` of the servers get their load replaced by
    ``straggler_factor`` times the mean load of the remaining servers.
    ``num_clients`` is recorded for context only; the simulated stream
    is already the merged view all clients would produce.
    """

    num_servers: int = 100
    num_clients: int = 200
    initial_load_mean: float = 200.0
    initial_load_std: float = 10.0
    straggler_fraction: float = 0.1
    straggler_factor: float = 5.0

    def validate(self) -> None:
        if self.num_servers < 1:
            raise ValueError(f"num_servers must be >= 1, got {self.num_servers}")
        if self.num_clients < 1:
            raise ValueError(f"num_clients must be >= 1, got {self.num_clients}")
        if self.initial_load_mean < 0:
            raise ValueError(f"initial_load_mean must be >= 0, got {self.initial_load_mean}")
        if self.initial_load_std < 0:
            raise ValueError(f"initial_load_std must be >= 0, got {self.initial_load_std}")
        if not 0 <= self.straggler_fraction <= 1:
            raise ValueError(f"straggler_fraction must be in [0, 1], got {self.straggler_fraction}")
        if self.straggler_factor < 1:
            raise ValueError(f"straggler_factor must be >= 1, got {self.straggler_factor}")


def _open_uniform(rng: random.Random, lo: float, hi: float) -> float:
    # redraw until strictly inside; random.uniform can return an endpoint
    while True:
        x = rng.uniform(lo, hi)
        if lo < x < hi:
            return x


def gen_requests(cfg: WorkloadConfig, rng: random.Random) -> List[TimeWindow]:
    """Generate the request stream, grouped into time windows.

    Per request the draws happen in a fixed order (size class, length,
    object id, offset, window), so one seed always yields one stream.
    """
    cfg.validate()
    windows = [TimeWindow(index=i) for i in range(cfg.num_windows)]
    total = sum(cfg.mix)
    cut_large = cfg.mix[0] / total
    cut_medium = cut_large + cfg.mix[1] / total
    ranges = (cfg.large_range, cfg.medium_range, cfg.small_range)
    for _ in range(cfg.num_requests):
        u = rng.random()
        if u < cut_large:
            lo, hi = ranges[0]
        elif u < cut_medium:
            lo, hi = ranges[1]
        else:
            lo, hi = ranges[2]
        length = _open_uniform(rng, lo, hi)
        object_id = rng.randrange(cfg.num_objects)
        offset = rng.uniform(0.0, cfg.max_offset)
        window = rng.randrange(cfg.num_windows)
        windows[window].requests.append(Request(object_id=object_id, offset=offset, length=length))
    return windows


def gen_initial_loads(cfg: ClusterConfig, rng: random.Random) -> np.ndarray:
    """Gaussian starting loads, clamped at zero."""
    cfg.validate()
    loads = np.empty(cfg.num_servers, dtype=float)
    for i in range(cfg.num_servers):
        loads[i] = max(0.0, rng.gauss(cfg.initial_load_mean, cfg.initial_load_std))
    return loads


def inject_stragglers(loads: np.ndarray, cfg: ClusterConfig, rng: random.Random) -> List[int]:
    """Overload a random subset of servers in place; returns their ids sorted.

    floor(fraction * servers) servers are chosen and their load set to
    ``straggler_factor`` times the mean load of the non-chosen servers.
    """
    cfg.validate()
    m = len(loads)
    count = int(cfg.straggler_fraction * m + 1e-9)
    if count == 0:
        return []
    chosen = sorted(rng.sample(range(m), count))
    if count < m:
        others = [i for i in range(m) if i not in set(chosen)]
        base = float(np.mean(loads[others]))
    else:
        base = float(np.mean(loads))
    for i in chosen:
        loads[i] = cfg.straggler_factor * base
    return chosen


def dump_workload(windows: Sequence[TimeWindow], fp: TextIO) -> None:
    """Write a request stream as plain text, one request per line.

    Format: a ``# windows=N`` header, then ``window object_id offset
    length_mb`` per request, floats via repr so a reload is exact.
    """
    fp.write(f"# windows={len(windows)}\n")
    for window in windows:
        for req in window.requests:
            fp.write(f"{window.index} {req.object_id} {repr(float(req.offset))} {repr(float(req.length))}\n")


def load_workload(fp: TextIO) -> List[TimeWindow]:
    """Read a stream written by ``dump_workload``."""
    header = fp.readline().strip()
    if not header.startswith("# windows="):
        raise ValueError(f"bad workload header {header!r}")
    num_windows = int(header[len("# windows=") :])
    if num_windows < 1:
        raise ValueError(f"workload must have >= 1 window, got {num_windows}")
    windows = [TimeWindow(index=i) for i in range(num_windows)]
    for lineno, line in enumerate(fp, start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"line {lineno}: expected 4 fields, got {len(parts)}")
        w = int(parts[0])
        if not 0 <= w < num_windows:
            raise ValueError(f"line {lineno}: window {w} out of range [0, {num_windows})")
        windows[w].requests.append(
            Request(object_id=int(parts[1]), offset=float(parts[2]), length=float(parts[3]))
        )
    return windows
