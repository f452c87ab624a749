import math

import numpy as np
import pytest

from oppcompose.contact_engine import ContactEvent, ContactTrace, contacts_from_positions
from oppcompose.forwarding import Scheme
from oppcompose.mobility import LevyWalkParams, generate_levy
from oppcompose.service_model import Service, enumerate_services, assign_services
from oppcompose.sim_core import (
    RequestPattern,
    SimConfig,
    read_records_csv,
    run,
    write_records_csv,
)


def small_catalog():
    return enumerate_services(4)


def placement_of(assignments):
    from oppcompose.service_model import ServicePlacement

    by_node = {n: tuple(sorted(s)) for n, s in assignments.items()}
    inv = {}
    for n, svcs in by_node.items():
        for s in svcs:
            inv.setdefault(s, []).append(n)
    return ServicePlacement(by_node=by_node,
                            by_service={s: tuple(sorted(v)) for s, v in inv.items()},
                            repetition=1)


def full_contact_trace(n, duration):
    events = [ContactEvent(0.0, duration, a, b) for a in range(n) for b in range(a + 1, n)]
    return ContactTrace(events, n, duration)


def no_contact_trace(n, duration):
    return ContactTrace([], n, duration)


def default_config(**kw):
    catalog = enumerate_services(7, excluded={Service(1, 7)})
    rng = np.random.default_rng(99)
    placement = assign_services(catalog, list(range(20)), 2, rng)
    pattern = RequestPattern.min_functionality(catalog, 4)
    base = dict(catalog=catalog, placement=placement, pattern=pattern, seed=3)
    base.update(kw)
    return SimConfig(**base)


def levy_contacts(seed=3, area=500.0, duration=18000.0):
    params = LevyWalkParams(area=(area, area))
    return contacts_from_positions(generate_levy(params, 20, duration, seed=seed), 100.0)


# -- patterns -----------------------------------------------------------------

def test_pattern_min_k_enumeration():
    catalog = enumerate_services(7, excluded={Service(1, 7)})
    pattern = RequestPattern.min_functionality(catalog, 4)
    assert set(pattern.pairs) == {(1, 5), (1, 6), (1, 7), (2, 6), (2, 7), (3, 7)}


def test_pattern_fixed_length_ring():
    catalog = enumerate_services(20, ring=True)
    pattern = RequestPattern.fixed_length(catalog, 2)
    assert (1, 3) in pattern.pairs and (19, 1) in pattern.pairs
    assert len(pattern.pairs) == 20


def test_pattern_rejects_empty():
    with pytest.raises(ValueError):
        RequestPattern(pairs=())


def test_expected_request_volume():
    # 0.4/min over 20 nodes for the generation window of a 10 h trace.
    cfg = default_config()
    contacts = no_contact_trace(20, 36000.0)
    result = run(cfg, contacts)
    window_min = (36000.0 - cfg.timeout_s) / 60.0
    expected = 0.4 * 20 * window_min
    assert abs(len(result.records) - expected) / expected < 0.1


def test_zero_rate_zero_records():
    cfg = default_config(request_rate_per_min=0.0)
    result = run(cfg, no_contact_trace(20, 3600.0))
    assert result.records == []


# -- local execution ------------------------------------------------------------

def test_local_exact_service_completes_with_zero_hops():
    catalog = small_catalog()
    placement = placement_of({0: [Service(1, 4)]})
    cfg = SimConfig(
        catalog=catalog, placement=placement,
        pattern=RequestPattern(pairs=((1, 4),)),
        scripted_requests=((60.0, 0, 1, 4),),
        seed=1,
    )
    result = run(cfg, no_contact_trace(1, 3600.0))
    rec = result.records[0]
    assert rec.status == "completed"
    assert rec.hops == 0
    assert rec.stages[0][0] == Service(1, 4)
    assert rec.delay > 0


def test_deterministic_exec_time_exact():
    catalog = small_catalog()
    placement = placement_of({0: [Service(1, 4)]})
    cfg = SimConfig(
        catalog=catalog, placement=placement,
        pattern=RequestPattern(pairs=((1, 4),)),
        scripted_requests=((60.0, 0, 1, 4),),
        exec_deterministic=True,
        seed=1,
    )
    rec = run(cfg, no_contact_trace(1, 3600.0)).records[0]
    assert rec.delay == 30.0


def test_fifo_queueing_two_simultaneous_requests():
    catalog = small_catalog()
    placement = placement_of({0: [Service(1, 4)]})
    cfg = SimConfig(
        catalog=catalog, placement=placement,
        pattern=RequestPattern(pairs=((1, 4),)),
        scripted_requests=((60.0, 0, 1, 4), (60.0, 0, 1, 4)),
        exec_deterministic=True,
        seed=1,
    )
    recs = sorted(run(cfg, no_contact_trace(1, 3600.0)).records, key=lambda r: r.id)
    assert recs[0].delay == 30.0
    assert recs[1].delay == 60.0  # waits for the first to finish


def test_exec_sampler_mean():
    # Single node, no contention: delays are raw execution samples.
    catalog = small_catalog()
    placement = placement_of({0: [Service(1, 4)]})
    script = tuple((600.0 * (k + 1), 0, 1, 4) for k in range(50))
    cfg = SimConfig(
        catalog=catalog, placement=placement,
        pattern=RequestPattern(pairs=((1, 4),)),
        scripted_requests=script,
        timeout_s=590.0,
        seed=7,
    )
    recs = run(cfg, no_contact_trace(1, 40000.0)).records
    delays = [r.delay for r in recs if r.status == "completed"]
    assert len(delays) >= 45
    assert 20.0 < float(np.mean(delays)) < 40.0


# -- multi-stage over a fully connected static network ----------------------------

def test_fully_connected_chain_exact_delay():
    catalog = small_catalog()
    placement = placement_of({
        0: [],
        1: [Service(1, 2)],
        2: [Service(2, 3)],
        3: [Service(3, 4)],
    })
    cfg = SimConfig(
        catalog=catalog, placement=placement,
        pattern=RequestPattern(pairs=((1, 4),)),
        scripted_requests=((300.0, 0, 1, 4),),
        exec_deterministic=True,
        awareness="perfect",
        seed=1,
    )
    result = run(cfg, full_contact_trace(4, 7200.0))
    rec = result.records[0]
    assert rec.status == "completed"
    # Three stages, each 30 s, transfers instantaneous over live contacts.
    assert rec.delay == 90.0
    assert rec.hops >= 2
    assert [s.input for s, _, _ in rec.stages] == [1, 2, 3]


def test_stage_advances_input_type():
    catalog = small_catalog()
    placement = placement_of({0: [Service(1, 3)], 1: [Service(3, 4)]})
    cfg = SimConfig(
        catalog=catalog, placement=placement,
        pattern=RequestPattern(pairs=((1, 4),)),
        scripted_requests=((60.0, 0, 1, 4),),
        exec_deterministic=True,
        awareness="perfect",
        seed=1,
    )
    rec = run(cfg, full_contact_trace(2, 3600.0)).records[0]
    assert rec.status == "completed"
    assert [(s.input, s.output) for s, _, _ in rec.stages] == [(1, 3), (3, 4)]


# -- deadlines ----------------------------------------------------------------------

def test_unreachable_request_times_out():
    catalog = small_catalog()
    placement = placement_of({0: [], 1: [Service(1, 4)]})
    cfg = SimConfig(
        catalog=catalog, placement=placement,
        pattern=RequestPattern(pairs=((1, 4),)),
        scripted_requests=((60.0, 0, 1, 4),),
        seed=1,
    )
    rec = run(cfg, no_contact_trace(2, 3600.0)).records[0]
    assert rec.status == "timed-out"
    assert rec.completed is None


def test_queued_requests_time_out_under_overload():
    catalog = small_catalog()
    placement = placement_of({0: [Service(1, 4)]})
    script = tuple((60.0, 0, 1, 4) for _ in range(40))
    cfg = SimConfig(
        catalog=catalog, placement=placement,
        pattern=RequestPattern(pairs=((1, 4),)),
        scripted_requests=script,
        exec_deterministic=True,
        timeout_s=300.0,
        seed=1,
    )
    result = run(cfg, no_contact_trace(1, 7200.0))
    counts = result.counts()
    assert counts["completed"] == 10  # 300 s window at 30 s per execution
    assert counts["timed-out"] == 30
    for rec in result.records:
        if rec.status == "completed":
            assert rec.completed <= rec.deadline


def test_result_in_transit_at_deadline_not_counted():
    # Provider meets the requester only after the deadline has passed.
    catalog = small_catalog()
    placement = placement_of({0: [], 1: [Service(1, 4)]})
    events = [ContactEvent(0.0, 30.0, 0, 1), ContactEvent(1500.0, 1560.0, 0, 1)]
    cfg = SimConfig(
        catalog=catalog, placement=placement,
        pattern=RequestPattern(pairs=((1, 4),)),
        scripted_requests=((30.0, 0, 1, 4),),
        exec_deterministic=True,
        timeout_s=900.0,
        scheme=Scheme("direct"),
        seed=1,
    )
    result = run(cfg, ContactTrace(events, 2, 3600.0))
    rec = result.records[0]
    assert rec.status == "timed-out"
    assert len(rec.stages) == 1  # executed remotely, result never made it home


def test_result_routes_home_on_next_contact():
    catalog = small_catalog()
    placement = placement_of({0: [], 1: [Service(1, 4)]})
    events = [ContactEvent(0.0, 30.0, 0, 1), ContactEvent(600.0, 660.0, 0, 1)]
    cfg = SimConfig(
        catalog=catalog, placement=placement,
        pattern=RequestPattern(pairs=((1, 4),)),
        scripted_requests=((30.0, 0, 1, 4),),
        exec_deterministic=True,
        scheme=Scheme("direct"),
        seed=1,
    )
    rec = run(cfg, ContactTrace(events, 2, 3600.0)).records[0]
    assert rec.status == "completed"
    assert rec.completed == 600.0
    assert rec.hops == 2  # request out, result back


def test_remote_completion_needs_at_least_two_hops():
    cfg = default_config()
    result = run(cfg, levy_contacts())
    for rec in result.records:
        if rec.status != "completed":
            continue
        if any(node != rec.origin for _, node, _ in rec.stages):
            assert rec.hops >= 2
        if rec.hops == 0:
            assert all(node == rec.origin for _, node, _ in rec.stages)


# -- conservation and determinism ----------------------------------------------------

def test_conservation_every_run():
    for seed in (1, 2, 3):
        cfg = default_config(seed=seed)
        result = run(cfg, levy_contacts(seed=seed))
        counts = result.counts()
        assert counts["completed"] + counts["timed-out"] + counts["in-flight"] == len(result.records)
        for rec in result.records:
            if rec.status == "completed":
                assert rec.completed <= rec.deadline + 1e-9


def test_identical_config_reproduces_csv_bytes(tmp_path):
    contacts = levy_contacts(seed=5)
    paths = []
    for tag in ("a", "b"):
        cfg = default_config(seed=5)
        result = run(cfg, contacts)
        path = tmp_path / f"run_{tag}.csv"
        write_records_csv(result, path)
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_different_seed_differs(tmp_path):
    contacts = levy_contacts(seed=5)
    blobs = []
    for seed in (5, 6):
        cfg = default_config(seed=seed)
        result = run(cfg, contacts)
        path = tmp_path / f"run_{seed}.csv"
        write_records_csv(result, path)
        blobs.append(path.read_bytes())
    assert blobs[0] != blobs[1]


def test_records_csv_round_trip(tmp_path):
    cfg = default_config()
    result = run(cfg, levy_contacts())
    path = tmp_path / "records.csv"
    write_records_csv(result, path)
    rows = read_records_csv(path)
    assert len(rows) == len(result.records)
    by_id = {r.id: r for r in result.records}
    for row in rows:
        rec = by_id[row["id"]]
        assert row["status"] == rec.status
        assert row["hops"] == rec.hops
        if rec.delay is not None:
            assert abs(row["delay_s"] - rec.delay) < 1e-3


# -- single copy invariant -------------------------------------------------------------

def test_single_copy_every_request_single_position():
    # Every executed stage sequence chains correctly, which would break if
    # two copies of one request advanced independently.
    cfg = default_config()
    result = run(cfg, levy_contacts())
    for rec in result.records:
        cur = rec.input
        for service, _, _ in rec.stages:
            assert service.input == cur
            cur = service.output
        if rec.status == "completed":
            assert cur == rec.output


def test_estimated_cost_recorded_when_path_exists():
    cfg = default_config(awareness="perfect")
    result = run(cfg, levy_contacts())
    with_est = [r for r in result.records if r.estimated_cost_s is not None]
    assert len(with_est) > 0.8 * len(result.records)
    assert all(r.estimated_cost_s >= 0 for r in with_est)
