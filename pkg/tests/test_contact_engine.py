import math

import numpy as np
import pytest

from oppcompose.contact_engine import (
    ContactEvent,
    ContactTrace,
    contact_sequence_oracle,
    contacts_from_positions,
    load_contacts_csv,
    relay_cost_oracle,
    save_contacts_csv,
    _pairs_in_range_dense,
    _pairs_in_range_grid,
)
from oppcompose.mobility import LevyWalkParams, PositionTrace, generate_levy


def make_trace(positions, interval=30.0, width=1000.0, height=1000.0):
    return PositionTrace(np.asarray(positions, dtype=float), interval, width, height)


def test_stationary_pair_in_range_single_event():
    # Two nodes 50 m apart for 600 s at 30 s sampling.
    n_samples = 21
    pos = np.zeros((2, n_samples, 2))
    pos[1, :, 0] = 50.0
    contacts = contacts_from_positions(make_trace(pos), 100.0)
    assert len(contacts.events) == 1
    ev = contacts.events[0]
    assert (ev.start, ev.end) == (0.0, 600.0)


def test_stationary_pair_out_of_range_no_events():
    pos = np.zeros((2, 21, 2))
    pos[1, :, 0] = 150.0
    contacts = contacts_from_positions(make_trace(pos), 100.0)
    assert contacts.events == []


def test_crossing_nodes_three_samples_in_range():
    # Node 1 fixed at x=0; node 0 moves along x from -250 at 60 m per
    # sample: in range (<=100) at samples 3,4,5 only (x=-70, -10, +50).
    n_samples = 10
    pos = np.zeros((2, n_samples, 2))
    pos[0, :, 0] = -250.0 + 60.0 * np.arange(n_samples)
    contacts = contacts_from_positions(
        PositionTrace(pos, 30.0, 1000.0, 1000.0, None), 100.0)
    assert len(contacts.events) == 1
    ev = contacts.events[0]
    assert ev.start == 90.0 and ev.end == 150.0
    assert ev.end - ev.start == 2 * 30.0


def test_single_sample_contact_is_dropped():
    # In range at exactly one sample: no usable window at this resolution.
    pos = np.zeros((2, 5, 2))
    pos[0, :, 0] = [-300.0, -150.0, 0.0, 150.0, 300.0]
    pos[1, :, 0] = 0.0
    contacts = contacts_from_positions(make_trace(pos), 100.0)
    assert contacts.events == []


def test_in_contact_queries_match_position_oracle():
    params = LevyWalkParams(area=(300.0, 300.0), speed_classes=((5, (1.0, 1.0)), (5, (10.0, 10.0))))
    trace = generate_levy(params, 10, 3600, seed=8)
    contacts = contacts_from_positions(trace, 100.0)
    times = trace.sample_times()
    for ti in range(0, trace.n_samples, 7):
        pos = trace.positions[:, ti, :]
        for a in range(10):
            for b in range(a + 1, 10):
                dist = float(np.linalg.norm(pos[a] - pos[b]))
                expected = dist <= 100.0
                got = contacts.in_contact(a, b, times[ti])
                if expected != got:
                    # Single-sample runs are dropped; only those may differ.
                    assert expected and not got
                assert contacts.in_contact(a, b, times[ti]) == contacts.in_contact(b, a, times[ti])


def test_in_contact_between_events_false():
    events = [ContactEvent(0.0, 60.0, 0, 1), ContactEvent(300.0, 360.0, 0, 1)]
    trace = ContactTrace(events, 2, 600.0)
    assert trace.in_contact(0, 1, 30.0)
    assert not trace.in_contact(0, 1, 120.0)
    assert trace.in_contact(1, 0, 330.0)


def test_events_maximal_no_overlap():
    with pytest.raises(ValueError):
        ContactTrace([ContactEvent(0.0, 60.0, 0, 1), ContactEvent(60.0, 120.0, 0, 1)], 2, 600.0)


def test_grid_and_dense_pair_scan_agree():
    rng = np.random.default_rng(3)
    for _ in range(20):
        pos = rng.uniform(0, 500, size=(40, 2))
        assert _pairs_in_range_dense(pos, 70.0) == _pairs_in_range_grid(pos, 70.0)


def test_oracle_zero_when_in_contact():
    trace = ContactTrace([ContactEvent(0.0, 120.0, 0, 1)], 2, 600.0)
    assert contact_sequence_oracle(trace, 0, 1, 60.0) == 0.0


def test_oracle_infinite_without_contacts():
    trace = ContactTrace([], 3, 600.0)
    assert contact_sequence_oracle(trace, 0, 2, 500.0) == math.inf


def test_oracle_three_node_relay_chain():
    # a-b contact ending at t=100, b-c ending at t=200: information
    # leaving a at 100 reaches c at 200; queried at t=300 the most recent
    # such departure is 100, so 200 s have elapsed.
    trace = ContactTrace(
        [ContactEvent(70.0, 100.0, 0, 1), ContactEvent(170.0, 200.0, 1, 2)], 3, 600.0)
    assert contact_sequence_oracle(trace, 0, 2, 300.0) == 200.0
    # The reverse direction has no valid ordering (b-c before a-b).
    assert contact_sequence_oracle(trace, 2, 0, 300.0) == math.inf


def test_oracle_self_distance_zero():
    trace = ContactTrace([], 2, 600.0)
    assert contact_sequence_oracle(trace, 1, 1, 100.0) == 0.0


def test_oracle_monotone_under_added_contacts():
    rng = np.random.default_rng(11)
    base_events = []
    t = 0.0
    for _ in range(12):
        t += float(rng.integers(1, 5)) * 30.0
        a, b = rng.choice(5, size=2, replace=False)
        base_events.append(ContactEvent(t, t + 30.0, int(min(a, b)), int(max(a, b))))
    extra = ContactEvent(t + 60.0, t + 90.0, 0, 4)
    small = ContactTrace(base_events, 5, t + 200.0)
    big = ContactTrace(base_events + [extra], 5, t + 200.0)
    for s in range(5):
        for d in range(5):
            assert (contact_sequence_oracle(big, s, d, t + 150.0)
                    <= contact_sequence_oracle(small, s, d, t + 150.0))


def test_relay_cost_oracle_reduces_to_plain_oracle():
    trace = ContactTrace(
        [ContactEvent(70.0, 100.0, 0, 1), ContactEvent(170.0, 200.0, 1, 2)], 3, 600.0)
    assert relay_cost_oracle(trace, 0, 2, 300.0, 0.0) == contact_sequence_oracle(trace, 0, 2, 300.0)


def test_relay_cost_oracle_charges_hops():
    trace = ContactTrace(
        [ContactEvent(70.0, 100.0, 0, 1), ContactEvent(170.0, 200.0, 1, 2)], 3, 600.0)
    # Two transfers (a->b, b->c): elapsed 200 plus 2 hops at 15 s each.
    assert relay_cost_oracle(trace, 0, 2, 300.0, 15.0) == 230.0


def test_relay_cost_oracle_prefers_fewer_hops_when_cheaper():
    # Direct late contact vs an earlier 2-hop chain: with a large hop cost
    # the single-hop route wins even though its elapsed time is longer.
    events = [
        ContactEvent(10.0, 40.0, 0, 1),
        ContactEvent(50.0, 80.0, 1, 2),
        ContactEvent(100.0, 130.0, 0, 2),
    ]
    trace = ContactTrace(events, 3, 600.0)
    t = 200.0
    assert relay_cost_oracle(trace, 0, 2, t, 0.0) == t - 130.0
    assert relay_cost_oracle(trace, 0, 2, t, 1000.0) == (t - 130.0) + 1000.0


def test_boundary_pairs_cover_events():
    events = [ContactEvent(30.0, 90.0, 0, 1), ContactEvent(60.0, 120.0, 1, 2)]
    trace = ContactTrace(events, 3, 150.0)
    per_boundary = trace.boundary_pairs(30.0)
    assert per_boundary[0] == []
    assert per_boundary[1] == [(0, 1)]
    assert per_boundary[2] == [(0, 1), (1, 2)]
    assert per_boundary[3] == [(0, 1), (1, 2)]
    assert per_boundary[4] == [(1, 2)]
    assert per_boundary[5] == []


def test_contacts_csv_round_trip(tmp_path):
    params = LevyWalkParams(area=(400.0, 400.0), speed_classes=((5, (1.0, 1.0)), (5, (10.0, 10.0))))
    trace = generate_levy(params, 10, 3600, seed=2)
    contacts = contacts_from_positions(trace, 100.0)
    path = tmp_path / "contacts.csv"
    save_contacts_csv(contacts, path)
    again = load_contacts_csv(path)
    assert again.n_nodes == contacts.n_nodes
    assert len(again.events) == len(contacts.events)
    assert [(e.a, e.b, e.start, e.end) for e in again.events] == [
        (min(e.a, e.b), max(e.a, e.b), e.start, e.end) for e in contacts.events]
