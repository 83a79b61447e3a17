import numpy as np
import pytest

from logsched.core import (
    Request,
    ScheduleDecision,
    StatisticLog,
    Step,
    TimeWindow,
    group_into_steps,
    new_statistic_log,
)


def test_request_fields():
    r = Request(object_id=7, offset=128.0, length=3.5)
    assert (r.object_id, r.offset, r.length) == (7, 128.0, 3.5)


def test_request_validation():
    with pytest.raises(ValueError):
        Request(object_id=-1, offset=0.0, length=1.0)
    with pytest.raises(ValueError):
        Request(object_id=0, offset=-0.5, length=1.0)
    with pytest.raises(ValueError):
        Request(object_id=0, offset=0.0, length=0.0)
    with pytest.raises(ValueError):
        Request(object_id=0, offset=0.0, length=-2.0)


def test_new_statistic_log_uniform_probs():
    log = new_statistic_log(4, [10.0, 20.0, 30.0, 40.0])
    assert log.num_servers == 4
    assert np.allclose(log.probs, 0.25)
    assert log.probs.sum() == pytest.approx(1.0, abs=1e-15)
    assert list(log.loads) == [10.0, 20.0, 30.0, 40.0]


def test_new_statistic_log_copies_input():
    loads = np.array([1.0, 2.0])
    log = new_statistic_log(2, loads)
    loads[0] = 99.0
    assert log.loads[0] == 1.0


def test_new_statistic_log_validation():
    with pytest.raises(ValueError):
        new_statistic_log(0, [])
    with pytest.raises(ValueError):
        new_statistic_log(3, [1.0, 2.0])
    with pytest.raises(ValueError):
        new_statistic_log(2, [1.0, -1.0])
    with pytest.raises(ValueError):
        new_statistic_log(2, [1.0, float("nan")])
    with pytest.raises(ValueError):
        new_statistic_log(2, [1.0, float("inf")])


def test_statistic_log_copy_is_independent():
    log = new_statistic_log(3, [1.0, 2.0, 3.0])
    dup = log.copy()
    dup.loads[0] = 50.0
    dup.probs[0] = 0.9
    assert log.loads[0] == 1.0
    assert log.probs[0] == pytest.approx(1 / 3)


def test_statistic_log_servers_view():
    log = new_statistic_log(2, [5.0, 6.0])
    entries = log.servers
    assert [e.server_id for e in entries] == [0, 1]
    assert [e.load for e in entries] == [5.0, 6.0]
    assert entries[0].prob == pytest.approx(0.5)


def test_step_total_length_computed():
    reqs = [Request(3, 0.0, 2.0), Request(3, 10.0, 5.0)]
    step = Step(object_id=3, requests=reqs)
    assert step.total_length == pytest.approx(7.0)


def test_step_rejects_mixed_objects():
    with pytest.raises(ValueError):
        Step(object_id=3, requests=[Request(3, 0.0, 1.0), Request(4, 0.0, 1.0)])
    with pytest.raises(ValueError):
        Step(object_id=1, requests=[])


def test_group_into_steps_insertion_order():
    win = TimeWindow(index=0)
    win.requests = [
        Request(5, 0.0, 1.0),
        Request(2, 0.0, 2.0),
        Request(5, 8.0, 3.0),
        Request(9, 0.0, 4.0),
        Request(2, 4.0, 5.0),
    ]
    steps = group_into_steps(win)
    assert [s.object_id for s in steps] == [5, 2, 9]
    assert [len(s.requests) for s in steps] == [2, 2, 1]
    assert steps[0].total_length == pytest.approx(4.0)
    assert steps[1].total_length == pytest.approx(7.0)


def test_group_into_steps_empty_window():
    assert group_into_steps(TimeWindow(index=0)) == []


def test_decision_redirect_consistency_enforced():
    with pytest.raises(ValueError):
        ScheduleDecision(
            step_object_id=1, length=2.0, default_server=0, chosen_server=1, redirected=False
        )
    with pytest.raises(ValueError):
        ScheduleDecision(
            step_object_id=1, length=2.0, default_server=0, chosen_server=0, redirected=True
        )


def test_decision_equality_ignores_target():
    a = ScheduleDecision(1, 2.0, 0, 1, True, target_server=1, window_index=3)
    b = ScheduleDecision(1, 2.0, 0, 1, True, target_server=2, window_index=3)
    c = ScheduleDecision(1, 2.0, 0, 1, True, target_server=1, window_index=4)
    assert a == b
    assert a != c
