"""Gate schedules, edge conventions, and region lookup."""

import numpy as np
import pytest

from ciboost.modulation import build_schedule, region_of, schedule_csv, state_at
from ciboost.params import ModulationCommand, table2_defaults

PARAMS, CMD, OP = table2_defaults()
T = OP.t_period


def bridge_windows(schedule, n=4000):
    """Sampled polarity over one period."""
    taus = np.arange(n) * (schedule.t_period / n)
    return np.array([state_at(schedule, float(t)).bridge_polarity for t in taus])


class TestBuildSchedule:
    def test_nominal_positive_window(self):
        # d=0.5, phi=0.15: bridge positive exactly on [3 us, 13 us)
        sched = build_schedule(CMD, OP)
        assert state_at(sched, 2.9e-6).bridge_polarity == -1
        assert state_at(sched, 3.0e-6).bridge_polarity == +1
        assert state_at(sched, 12.9e-6).bridge_polarity == +1
        assert state_at(sched, 13.0e-6).bridge_polarity == -1

    def test_zero_phase_shift_in_phase_with_primary(self):
        sched = build_schedule(ModulationCommand(d=0.5, phi=0.0), OP)
        for tau in np.linspace(0, T, 100, endpoint=False):
            s = state_at(sched, float(tau))
            assert (s.bridge_polarity == +1) == s.m1

    def test_passive_mode_gates_off(self):
        sched = build_schedule(CMD, OP, mode="passive")
        for tau in np.linspace(0, T, 50, endpoint=False):
            s = state_at(sched, float(tau))
            assert not (s.q1 or s.q2 or s.q3 or s.q4)
            assert s.bridge_polarity == 0
            assert not s.rectifier_active

    def test_leg_complementarity(self):
        sched = build_schedule(CMD, OP)
        for tau in np.linspace(0, T, 200, endpoint=False):
            s = state_at(sched, float(tau))
            assert not (s.m1 and s.m2)
            assert s.q1 != s.q2 and s.q3 != s.q4  # no dead time configured
            assert s.q1 == s.q4 and s.q2 == s.q3

    def test_dead_time_inserts_both_off_windows(self):
        dead = 0.5e-6
        sched = build_schedule(CMD, OP, dead_time=dead)
        s0 = state_at(sched, 0.1e-6)       # just after the M1 turn-on edge
        assert not s0.m1 and not s0.m2
        s1 = state_at(sched, dead + 1e-9)
        assert s1.m1
        sq = state_at(sched, 3.0e-6 + 0.1e-6)  # just after the bridge flip
        assert sq.bridge_polarity == 0

    def test_invalid_commands_rejected(self):
        with pytest.raises(ValueError):
            build_schedule(ModulationCommand(d=0.5, phi=0.3), OP)
        with pytest.raises(ValueError):
            build_schedule(ModulationCommand(d=1.2, phi=0.1), OP)
        with pytest.raises(ValueError):
            build_schedule(CMD, OP, mode="weird")


class TestStateAt:
    def test_interval_start_belongs_to_following_state(self):
        sched = build_schedule(CMD, OP)
        assert state_at(sched, 0.0).m1
        s_edge = state_at(sched, 0.5 * T)
        assert not s_edge.m1 and s_edge.m2

    def test_periodicity(self):
        sched = build_schedule(CMD, OP)
        for tau in (0.0, 1e-6, 7.3e-6, 19.99e-6):
            a, b = state_at(sched, tau), state_at(sched, tau + T)
            assert a == b
        assert state_at(sched, T + 1e-6) == state_at(sched, 1e-6)

    def test_negative_time_rejected(self):
        sched = build_schedule(CMD, OP)
        with pytest.raises(ValueError):
            state_at(sched, -1e-9)


class TestRegionOf:
    def test_nominal_lookup(self):
        assert region_of(1e-6, CMD, OP) == 1
        assert region_of(5e-6, CMD, OP) == 2
        assert region_of(11e-6, CMD, OP) == 3
        assert region_of(19e-6, CMD, OP) == 4

    def test_windows_partition_the_period(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            d = float(rng.uniform(0.3, 0.7))
            phi = float(rng.uniform(0.0, min(0.25, d, 1.0 - d)))
            cmd = ModulationCommand(d=d, phi=phi)
            taus = np.linspace(0, T, 977, endpoint=False)
            regions = np.array([region_of(float(t), cmd, OP) for t in taus])
            # covers 1..4 in order with no gaps
            changes = np.nonzero(np.diff(regions))[0]
            assert set(regions) <= {1, 2, 3, 4}
            assert np.all(np.diff(changes) > 0)
            # boundary positions: phi*T, d*T, (d+phi)*T
            for t_b, before, after in ((phi * T, 1, 2), (d * T, 2, 3),
                                       ((d + phi) * T, 3, 4)):
                if 0.0 < t_b < T:
                    assert region_of(t_b, cmd, OP) == after
                    assert region_of(t_b - 1e-12, cmd, OP) in (before, after)

    def test_polarity_matches_region_sign(self):
        # active-mode commanded polarity equals the region voltage sign
        signs = {1: -1, 2: +1, 3: +1, 4: -1}
        sched = build_schedule(CMD, OP)
        for tau in np.linspace(0, T, 400, endpoint=False):
            reg = region_of(float(tau), CMD, OP)
            assert state_at(sched, float(tau)).bridge_polarity == signs[reg]


class TestPhaseShiftProperty:
    def test_shift_moves_secondary_edges_only(self):
        delta = 0.03
        base = build_schedule(ModulationCommand(d=0.5, phi=0.10), OP)
        shifted = build_schedule(ModulationCommand(d=0.5, phi=0.13), OP)
        taus = np.linspace(0, T, 2000, endpoint=False)
        for tau in taus:
            a = state_at(base, float(tau))
            b = state_at(shifted, float(tau))
            assert a.m1 == b.m1 and a.m2 == b.m2  # primary untouched
        # secondary pattern delayed by exactly delta * T
        pol_base = bridge_windows(base)
        pol_shift = bridge_windows(shifted)
        roll = int(round(delta * len(pol_base)))
        assert np.array_equal(np.roll(pol_base, roll), pol_shift)


def test_schedule_csv_dump(tmp_path):
    sched = build_schedule(CMD, OP)
    path = tmp_path / "sched.csv"
    schedule_csv(sched, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,m1,m2,q1,q2,q3,q4,polarity"
    assert len(lines) == len(sched.edges) + 1
    first = lines[1].split(",")
    assert float(first[0]) == 0.0 and first[1] == "1"
