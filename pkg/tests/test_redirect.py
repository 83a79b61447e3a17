import pytest

from logsched.core import ScheduleDecision, new_statistic_log
from logsched.redirect import (
    RedirectEntry,
    maintainer_flush,
    new_tables,
    record_redirect,
    resolve_read,
)


def redirected_decision(default, chosen):
    return ScheduleDecision(
        step_object_id=0, length=1.0, default_server=default, chosen_server=chosen,
        redirected=True, target_server=chosen,
    )


def kept_decision(server):
    return ScheduleDecision(
        step_object_id=0, length=1.0, default_server=server, chosen_server=server,
        redirected=False, target_server=server,
    )


def test_new_tables_one_per_server():
    tables = new_tables(3)
    assert [t.server_id for t in tables] == [0, 1, 2]
    assert all(t.entries == [] for t in tables)
    with pytest.raises(ValueError):
        new_tables(0)


def test_record_ignores_unredirected():
    tables = new_tables(2)
    assert record_redirect(tables, kept_decision(1), 1, 0.0, 5.0) is None
    assert tables[1].entries == []


def test_record_lands_in_default_servers_table():
    tables = new_tables(4)
    entry = record_redirect(tables, redirected_decision(2, 0), 6, 100.0, 8.0)
    assert tables[2].entries == [entry]
    assert entry.actual_server == 0
    assert entry.object_id == 6
    assert entry.offset == 100.0
    assert entry.length == 8.0


def test_record_updates_existing_extent_in_place():
    tables = new_tables(4)
    record_redirect(tables, redirected_decision(2, 0), 6, 100.0, 8.0)
    record_redirect(tables, redirected_decision(2, 3), 6, 100.0, 2.0)
    assert len(tables[2].entries) == 1
    entry = tables[2].entries[0]
    assert entry.actual_server == 3
    assert entry.length == 2.0


def test_record_distinguishes_offsets():
    tables = new_tables(4)
    record_redirect(tables, redirected_decision(2, 0), 6, 100.0, 8.0)
    record_redirect(tables, redirected_decision(2, 0), 6, 200.0, 8.0)
    assert len(tables[2].entries) == 2


def test_resolve_read_follows_redirect():
    tables = new_tables(4)
    record_redirect(tables, redirected_decision(2, 1), 6, 100.0, 8.0)
    assert resolve_read(tables, 6, 100.0) == 1
    # untouched extent of the same object reads from the default
    assert resolve_read(tables, 6, 999.0) == 2
    # other objects fall through to their own defaults
    assert resolve_read(tables, 5, 0.0) == 1
    assert resolve_read(tables, 8, 0.0) == 0


def test_flush_zero_budget_moves_nothing():
    tables = new_tables(2)
    log = new_statistic_log(2, [0.0, 0.0])
    record_redirect(tables, redirected_decision(0, 1), 0, 0.0, 5.0)
    migrated, flushed = maintainer_flush(tables, log, 0)
    assert migrated == 0.0
    assert flushed == []
    assert len(tables[0].entries) == 1


def test_flush_round_robin_oldest_first():
    tables = new_tables(3)
    log = new_statistic_log(3, [0.0, 0.0, 0.0])
    # two entries on server 0, one on server 2
    record_redirect(tables, redirected_decision(0, 1), 0, 0.0, 1.0)
    record_redirect(tables, redirected_decision(0, 1), 0, 1.0, 2.0)
    record_redirect(tables, redirected_decision(2, 1), 2, 0.0, 4.0)
    migrated, flushed = maintainer_flush(tables, log, 2)
    # one pass over the tables: server 0's oldest, then server 2's
    assert [(e.object_id, e.offset) for e in flushed] == [(0, 0.0), (2, 0.0)]
    assert migrated == pytest.approx(5.0)
    assert len(tables[0].entries) == 1
    assert tables[2].entries == []


def test_flush_drains_everything_with_large_budget():
    tables = new_tables(2)
    log = new_statistic_log(2, [0.0, 0.0])
    for k in range(5):
        record_redirect(tables, redirected_decision(0, 1), 0, float(k), 1.0)
    migrated, flushed = maintainer_flush(tables, log, 100)
    assert len(flushed) == 5
    assert migrated == pytest.approx(5.0)
    assert tables[0].entries == []


def test_flush_charging_bills_default_server():
    tables = new_tables(2)
    log = new_statistic_log(2, [10.0, 10.0])
    record_redirect(tables, redirected_decision(0, 1), 0, 0.0, 7.0)
    maintainer_flush(tables, log, 10, charge_migration=True)
    assert log.loads[0] == pytest.approx(17.0)
    assert log.loads[1] == pytest.approx(10.0)


def test_flush_no_charge_by_default():
    tables = new_tables(2)
    log = new_statistic_log(2, [10.0, 10.0])
    record_redirect(tables, redirected_decision(0, 1), 0, 0.0, 7.0)
    maintainer_flush(tables, log, 10)
    assert log.loads[0] == pytest.approx(10.0)


def test_flush_budget_validation():
    with pytest.raises(ValueError):
        maintainer_flush(new_tables(1), new_statistic_log(1, [0.0]), -1)
