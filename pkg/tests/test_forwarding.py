import math

import numpy as np
import pytest

from oppcompose.forwarding import DIRECT, EBR, MT, TT, EncounterStats, Scheme, should_relay


def timers(n, **values):
    out = np.full(n, math.inf)
    for k, v in values.items():
        out[int(k[1:])] = v
    return out


def test_scheme_parameters():
    assert TT.t_av == 20.0
    assert MT.t_av == 1.0
    assert EBR.window == 600.0
    with pytest.raises(ValueError):
        Scheme("flooding")


def test_direct_relays_only_to_destination():
    assert should_relay(DIRECT, 0, 2, 2, None, None, None, 0.0)
    assert not should_relay(DIRECT, 0, 1, 2, None, None, None, 0.0)


def test_destination_always_accepted_any_scheme():
    for scheme in (DIRECT, TT, EBR, MT):
        assert should_relay(scheme, 0, 2, 2, timers(3), timers(3), EncounterStats(3), 0.0)


def test_timer_rule_relays_on_big_improvement():
    carrier = timers(3, n2=40.0)
    candidate = timers(3, n2=10.0)
    assert should_relay(TT, 0, 1, 2, carrier, candidate, None, 0.0)  # 10 < 40 - 20
    assert should_relay(MT, 0, 1, 2, carrier, candidate, None, 0.0)


def test_timer_rule_guard():
    carrier = timers(3, n2=25.0)
    candidate = timers(3, n2=10.0)
    assert not should_relay(TT, 0, 1, 2, carrier, candidate, None, 0.0)  # 10 >= 25 - 20
    assert should_relay(MT, 0, 1, 2, carrier, candidate, None, 0.0)  # 10 < 25 - 1


def test_timer_rule_shift_invariant():
    rng = np.random.default_rng(2)
    for _ in range(50):
        a, b = float(rng.integers(0, 60)), float(rng.integers(0, 60))
        shift = float(rng.integers(1, 100))
        base = should_relay(MT, 0, 1, 2, timers(3, n2=a), timers(3, n2=b), None, 0.0)
        shifted = should_relay(MT, 0, 1, 2, timers(3, n2=a + shift), timers(3, n2=b + shift), None, 0.0)
        assert base == shifted


def test_unknown_timers_relay_toward_knowledge():
    carrier = timers(3)                 # knows nothing about 2
    candidate = timers(3, n2=5.0)
    assert should_relay(MT, 0, 1, 2, carrier, candidate, None, 0.0)
    assert not should_relay(MT, 0, 1, 2, candidate, carrier, None, 0.0)


def test_encounter_window_counts():
    stats = EncounterStats(2, window=600.0)
    for t in (0.0, 100.0, 200.0):
        stats.record(0, t)
    assert stats.rate(0, 200.0) == 3
    assert stats.rate(0, 650.0) == 2  # the t=0 encounter has left the window
    assert stats.rate(1, 200.0) == 0


def test_ebr_compares_rates():
    stats = EncounterStats(3, window=600.0)
    for t in (10.0, 20.0, 30.0):
        stats.record(1, t)
    stats.record(0, 10.0)
    assert should_relay(EBR, 0, 1, 2, None, None, stats, 40.0)
    assert not should_relay(EBR, 1, 0, 2, None, None, stats, 40.0)


def test_ebr_flips_after_burst():
    stats = EncounterStats(2, window=600.0)
    stats.record(0, 0.0)
    stats.record(0, 10.0)
    stats.record(1, 20.0)
    assert not should_relay(EBR, 0, 1, 2, None, None, stats, 30.0)
    for t in (40.0, 50.0, 60.0):
        stats.record(1, t)
    assert should_relay(EBR, 0, 1, 2, None, None, stats, 70.0)
