"""Redirect bookkeeping for reads and the background maintainer.

When a step is redirected, the data lands on a server other than the
one its object id maps to. Each default server keeps a redirect table
so later reads of the same (object_id, offset) can be resolved to where
the bytes actually are. A background maintainer migrates entries back
to their default servers during idle windows, draining the tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .core import ScheduleDecision, StatisticLog

__all__ = [
    "RedirectEntry",
    "RedirectTable",
    "new_tables",
    "record_redirect",
    "resolve_read",
    "maintainer_flush",
]


@dataclass(slots=True)
class RedirectEntry:
    """One redirected extent: where (object_id, offset, length) really lives."""

    object_id: int
    offset: float
    length: float
    actual_server: int


@dataclass(slots=True)
class RedirectTable:
    """Redirect entries held by one default server, oldest first."""

    server_id: int
    entries: List[RedirectEntry] = field(default_factory=list)

    def find(self, object_id: int, offset: float) -> Optional[RedirectEntry]:
        for entry in self.entries:
            if entry.object_id == object_id and entry.offset == offset:
                return entry
        return None


def new_tables(num_servers: int) -> List[RedirectTable]:
    if num_servers < 1:
        raise ValueError(f"num_servers must be >= 1, got {num_servers}")
    return [RedirectTable(server_id=i) for i in range(num_servers)]


def record_redirect(
    tables: List[RedirectTable],
    decision: ScheduleDecision,
    object_id: int,
    offset: float,
    length: float,
) -> Optional[RedirectEntry]:
    """Record where a redirected request's bytes went; no-op if not redirected.

    A later write to the same (object_id, offset) updates the existing
    entry in place rather than growing the table.
    """
    if not decision.redirected:
        return None
    table = tables[decision.default_server]
    existing = table.find(object_id, offset)
    if existing is not None:
        existing.length = length
        existing.actual_server = decision.chosen_server
        return existing
    entry = RedirectEntry(object_id, offset, length, decision.chosen_server)
    table.entries.append(entry)
    return entry


def resolve_read(tables: List[RedirectTable], object_id: int, offset: float) -> int:
    """Which server holds (object_id, offset): the redirect target if any, else the default."""
    default = object_id % len(tables)
    entry = tables[default].find(object_id, offset)
    return entry.actual_server if entry is not None else default


def maintainer_flush(
    tables: List[RedirectTable],
    log: StatisticLog,
    budget: int,
    charge_migration: bool = False,
) -> Tuple[float, List[RedirectEntry]]:
    """Migrate up to ``budget`` redirected extents back to their default servers.

    Runs during idle windows. Tables are drained round-robin, oldest
    entry first, so no single server's backlog starves the others.
    Returns the migrated MB and the flushed entries. With
    ``charge_migration`` the moved bytes are added to the default
    server's load in the statistic log; by default the migration is
    treated as free background traffic.
    """
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    flushed: List[RedirectEntry] = []
    migrated = 0.0
    remaining = budget
    while remaining > 0:
        progressed = False
        for table in tables:
            if remaining == 0:
                break
            if table.entries:
                entry = table.entries.pop(0)
                flushed.append(entry)
                migrated += entry.length
                if charge_migration:
                    log.loads[table.server_id] += entry.length
                remaining -= 1
                progressed = True
        if not progressed:
            break
    return migrated, flushed
