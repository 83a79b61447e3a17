"""Load accounting and selection-probability maintenance.

The statistic log tracks, per server, the expected outstanding load and
the probability that the scheduler should pick that server next.
Probabilities shrink exponentially with load, so heavily loaded servers
sink to the bottom of every ranking; the mass removed from a selected
server is spread evenly over the others, keeping the vector normalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import StatisticLog

__all__ = [
    "SUM_TOLERANCE",
    "ProbConfig",
    "update_load",
    "apply_selection",
    "refresh_probs",
    "servers_by_prob_desc",
]

# probability vectors are renormalized once accumulated float drift passes this
SUM_TOLERANCE = 1e-9


@dataclass(frozen=True, slots=True)
class ProbConfig:
    """Normalization of the load-decay exponent.

    ``load_scale`` is the load in MB over which a selection probability
    drops by a factor of e. Defaulting it to the workload's mean request
    length keeps the exponent contributed by one request at order one;
    raw MB loads would otherwise drive exp(-l) straight to zero.
    """

    load_scale: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.load_scale) and self.load_scale > 0):
            raise ValueError(f"load_scale must be finite and positive, got {self.load_scale}")


def _check_server(log: StatisticLog, server: int) -> None:
    if not 0 <= server < log.num_servers:
        raise ValueError(f"server id {server} out of range [0, {log.num_servers})")


def update_load(log: StatisticLog, server: int, length: float) -> None:
    """Add a scheduled request's length (MB) to one server's load."""
    _check_server(log, server)
    if not (math.isfinite(length) and length >= 0):
        raise ValueError(f"length must be finite and >= 0, got {length}")
    log.loads[server] += length


def apply_selection(log: StatisticLog, chosen: int, cfg: ProbConfig) -> None:
    """Decay the chosen server's probability and redistribute the difference.

    The chosen probability is multiplied by exp(-load/scale) using the
    chosen server's current cumulative load; the removed mass is split
    evenly over the other M-1 servers, so the vector's sum is preserved.
    With a single server, or a zero load, nothing changes. Float drift in
    the sum is corrected only once it exceeds SUM_TOLERANCE, so the exact
    even increment of the others is normally left untouched.
    """
    _check_server(log, chosen)
    m = log.num_servers
    if m == 1:
        return
    probs = log.probs
    p = float(probs[chosen])
    decayed = p * math.exp(-float(log.loads[chosen]) / cfg.load_scale)
    share = (p - decayed) / (m - 1)
    if share != 0.0:
        probs += share
        probs[chosen] = decayed
    total = float(probs.sum())
    if abs(total - 1.0) > SUM_TOLERANCE:
        probs /= total


def refresh_probs(log: StatisticLog, cfg: ProbConfig) -> None:
    """Re-derive every server's selection probability from its current load.

    Applies the decay law to all servers at once and renormalizes, so the
    ranking a policy is about to use always reflects the loads recorded so
    far: p_i becomes proportional to p_i * exp(-load_i/scale). Worked in
    log space with the maximum subtracted; cumulative loads late in a run
    would underflow every term to zero in linear space.
    """
    if log.num_servers == 1:
        log.probs[0] = 1.0
        return
    with np.errstate(divide="ignore"):
        w = np.log(log.probs)
    w -= log.loads / cfg.load_scale
    w -= w.max()
    np.exp(w, out=log.probs)
    log.probs /= log.probs.sum()


def servers_by_prob_desc(log: StatisticLog) -> np.ndarray:
    """Server ids ordered by selection probability, highest first.

    Ties break toward the smaller id. Returns an integer index array of
    length M.
    """
    return np.lexsort((log.ids, -log.probs))
