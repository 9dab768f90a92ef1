import random

import pytest

from cnnbench.engine import (
    BISHOP,
    DECAY_VERTICAL,
    OnlineServer,
    ROOK,
    run,
    trace_from_json,
    trace_to_json,
    trace_trajectory,
)
from cnnbench.generators import HALF_STEP, random_orthogonal
from cnnbench.geometry import pt, vec
from cnnbench.model import Instance, ModelError, RequestSegment, validate_alignment
from cnnbench.scalar import Scalar, SQRT3, ZERO, ONE


def seg(dx, dy, length):
    return RequestSegment(vec(dx, dy), Scalar.coerce(length))


def fuzz_traces(n, seed=101, segments=8, bound=4):
    rng = random.Random(seed)
    for _ in range(n):
        pair = random_orthogonal(rng.randrange(10**9), segments, bound)
        yield run(pair.instance)


# -- concrete schedules --------------------------------------------------------


def test_empty_instance():
    tr = run(Instance(pt(2, 3), ()))
    assert tr.final_cost == ZERO
    assert tr.final_server == pt(2, 3)
    assert len(tr.events) == 1
    assert tr.events[0].kind == "cycle-start"


def test_request_running_away_costs_nothing():
    # server stays while the request departs straight down
    tr = run(Instance(pt(0, 0), (seg(0, -1, 5),)))
    assert tr.final_cost == ZERO
    assert tr.final_server == pt(0, 0)


def test_diagonal_chase_and_meet():
    # gap 1 opens, then a unit horizontal move closes it diagonally
    tr = run(Instance(pt(0, 1), (seg(0, -1, 1), seg(1, 0, 1))))
    assert tr.final_cost == Scalar(2)
    assert tr.final_server == pt(1, 0)
    phases = [e.phase for e in tr.events]
    assert ROOK in phases


def test_vertical_ride_consumes_offset():
    # after the meet, riding down 1/(1+sqrt3) spends the whole offset
    c = HALF_STEP
    tr = run(Instance(pt(0, 1), (seg(0, -1, 1), seg(1, 0, 1), seg(0, -1, c))))
    assert tr.final_cost == Scalar(2) + c
    assert tr.final_server == pt(1, -c)
    assert tr.events[-1].phase == BISHOP
    assert tr.events[-1].offset_mag == ZERO


def test_horizontal_drag():
    # request crosses the server's column and drags it left
    tr = run(Instance(pt(0, 1), (seg(0, -1, 1), seg(1, 0, 1), seg(-1, 0, 2))))
    # drag length = min(remaining gap crossing, offset 1) = 1
    assert tr.final_cost == Scalar(3)
    assert tr.final_server == pt(0, 0)


def test_rook_retreat_is_free():
    # moving away from the offset halfplane never moves the server
    tr = run(Instance(pt(0, 1), (seg(0, -1, 1), seg(1, 0, 1), seg(1, 0, 3))))
    assert tr.final_cost == Scalar(2)
    assert tr.final_server == pt(1, 0)


def test_requires_axis_parallel():
    diag = Instance(pt(0, 0), (RequestSegment(vec(1, 1), ONE),))
    with pytest.raises(ModelError):
        run(diag)


def test_feed_interface_matches_batch():
    pair = random_orthogonal(99, 10, 3)
    srv = OnlineServer(pair.instance.start)
    for s in pair.instance.segments:
        srv.feed(s.direction, s.length)
    tr = run(pair.instance)
    assert srv.position == tr.final_server
    assert srv.cost == tr.final_cost


def test_trace_json_roundtrip():
    tr = run(Instance(pt(0, 1), (seg(0, -1, 1), seg(1, 0, 1))))
    again = trace_from_json(trace_to_json(tr))
    assert again == tr


# -- invariant suites ----------------------------------------------------------


def test_bishop_moves_are_diagonal():
    # criterion suite: |dx| = |dy| exactly for every bishop motion
    checked = 0
    for tr in fuzz_traces(1000):
        for e0, e1 in zip(tr.events, tr.events[1:]):
            if e0.phase != BISHOP or e0.server == e1.server:
                continue
            d = e1.server - e0.server
            assert abs(d.dx) == abs(d.dy)
            checked += 1
    assert checked >= 1000


def test_rook_keeps_y_alignment_and_x_inequality():
    # criterion suite: canonical y equality and x inequality during rook
    checked = 0
    for tr in fuzz_traces(1000):
        req = tr.instance.position_at
        for e in tr.events:
            if e.phase != ROOK:
                continue
            cs = e.frame.apply(e.server)
            cr = e.frame.apply(req(e.s))
            assert cs.y == cr.y
            assert cs.x <= cr.x
            checked += 1
    assert checked >= 1000


def test_offset_decay_rates():
    # criterion suite: the three tabulated decay rates, exactly
    checked = 0
    for tr in fuzz_traces(1000):
        for e0, e1 in zip(tr.events, tr.events[1:]):
            if e0.phase != ROOK or e1.s == e0.s or e0.frame != e1.frame:
                continue
            step = e1.s - e0.s
            drop = e0.offset_mag - e1.offset_mag
            moved = e1.cost_on - e0.cost_on
            cy0 = e0.frame.apply(e0.server).y
            cy1 = e0.frame.apply(e1.server).y
            if moved == ZERO:
                assert drop == ZERO  # retreat or gap-closing: rate 0
            elif cy1 != cy0:
                assert drop == DECAY_VERTICAL * step  # ride: rate 1 + sqrt3
            else:
                assert drop == step  # horizontal drag: rate 1
            checked += 1
    assert checked >= 1000


def test_every_trace_is_feasible():
    # criterion suite: the server polyline itself passes the alignment check
    for tr in fuzz_traces(1000):
        traj = trace_trajectory(tr)
        assert validate_alignment(traj, tr.instance).feasible


def test_cost_matches_server_path_length():
    for tr in fuzz_traces(300, seed=77):
        assert trace_trajectory(tr).path_cost() == tr.final_cost


def test_events_monotone_in_s_and_cost():
    for tr in fuzz_traces(300, seed=55):
        for e0, e1 in zip(tr.events, tr.events[1:]):
            assert e0.s <= e1.s
            assert e0.cost_on <= e1.cost_on
