"""Closed-form region model: slopes, boundary currents, power transfer.

Frozen expected values were computed by direct evaluation of the defining
expressions with the table2 constants (N*V_bat = 80/9 V, V_aux = 15 V,
L_e = 64 uH, T = 20 us) and cross-checked by integrating the piecewise
current region by region.
"""

import numpy as np
import pytest

from ciboost.params import ModulationCommand, table2_defaults
from ciboost.power_transfer import (
    FluxImbalanceError,
    aux_power,
    boundary_currents,
    phase_shift_power,
    power_curve,
    region_coefficients,
    region_schedule,
)

PARAMS, CMD, OP = table2_defaults()

A_EXPECTED = 373263.8888888889    # (80/9 + 15) / 64e-6
B_EXPECTED = -95486.11111111111   # (80/9 - 15) / 64e-6


class TestRegionCoefficients:
    def test_table2_slopes(self):
        co = region_coefficients(PARAMS, OP)
        assert co.a_slope == pytest.approx(A_EXPECTED, rel=1e-12)
        assert co.b_slope == pytest.approx(B_EXPECTED, rel=1e-12)
        # negative transfer-region slope: energy moving to the auxiliary side
        assert co.b_slope < 0

    def test_region_slope_pattern(self):
        co = region_coefficients(PARAMS, OP)
        assert co.region_slopes == (co.a_slope, co.b_slope,
                                    -co.a_slope, -co.b_slope)

    def test_zero_aux_voltage_degenerates(self):
        import dataclasses
        op0 = dataclasses.replace(OP, v_aux=0.0)
        co = region_coefficients(PARAMS, op0)
        assert co.a_slope == co.b_slope
        assert co.a_slope == pytest.approx(
            PARAMS.n_ratio * PARAMS.v_bat / PARAMS.l_e, rel=1e-12)

    def test_slope_difference_identity(self):
        # a - b = 2 * v_aux / l_e for any positive operating point
        rng = np.random.default_rng(7)
        import dataclasses
        for _ in range(50):
            op = dataclasses.replace(OP, v_aux=float(rng.uniform(0.1, 60.0)))
            co = region_coefficients(PARAMS, op)
            assert co.a_slope - co.b_slope == pytest.approx(
                2.0 * op.v_aux / PARAMS.l_e, rel=1e-12)
            assert co.a_slope > abs(co.b_slope)


class TestRegionSchedule:
    def test_table2_durations(self):
        sched = region_schedule(CMD, OP)
        assert sched.durations == pytest.approx((3e-6, 7e-6, 3e-6, 7e-6), rel=1e-12)
        assert sched.voltage_signs == (-1, 1, 1, -1)

    def test_durations_sum_exactly_to_period(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            d = float(rng.uniform(0.3, 0.75))
            phi = float(rng.uniform(0.0, min(0.25, d, 1.0 - d)))
            sched = region_schedule(ModulationCommand(d=d, phi=phi), OP)
            assert sum(sched.durations) == OP.t_period
            assert all(dur >= 0.0 for dur in sched.durations)

    def test_zero_phase_shift_collapses_regions_one_and_three(self):
        sched = region_schedule(ModulationCommand(d=0.5, phi=0.0), OP)
        assert sched.durations[0] == 0.0 and sched.durations[2] == 0.0

    def test_half_duty_makes_regions_two_and_four_equal(self):
        for phi in (0.0, 0.05, 0.17, 0.25):
            sched = region_schedule(ModulationCommand(d=0.5, phi=phi), OP)
            assert sched.durations[1] == pytest.approx(sched.durations[3], rel=1e-12)

    def test_ill_ordered_pattern_rejected(self):
        with pytest.raises(ValueError):
            region_schedule(ModulationCommand(d=0.2, phi=0.25), OP)


class TestBoundaryCurrents:
    def test_table2_nominal(self):
        bc = boundary_currents(PARAMS, CMD, OP)
        assert bc.i1 == pytest.approx(-0.2256944444444445, rel=1e-12)
        assert bc.i2 == pytest.approx(+0.8940972222222222, rel=1e-12)
        assert bc.i3 == pytest.approx(+0.2256944444444445, rel=1e-12)
        assert bc.i4 == pytest.approx(-0.8940972222222222, rel=1e-12)
        assert bc.i_avg[0] == pytest.approx(+0.3342013888888889, rel=1e-12)

    def test_zero_phase_shift(self):
        bc = boundary_currents(PARAMS, ModulationCommand(d=0.5, phi=0.0), OP)
        assert bc.i1 == pytest.approx(0.4774305555555556, rel=1e-12)
        assert bc.i2 == bc.i1
        assert bc.i3 == -bc.i1

    def test_half_wave_symmetry_for_all_phase_shifts(self):
        for phi in np.linspace(0.0, 0.25, 26):
            bc = boundary_currents(PARAMS, ModulationCommand(d=0.5, phi=float(phi)), OP)
            assert bc.i3 == pytest.approx(-bc.i1, abs=1e-12)
            assert bc.i4 == pytest.approx(-bc.i2, abs=1e-12)

    def test_increment_structure(self):
        co = region_coefficients(PARAMS, OP)
        bc = boundary_currents(PARAMS, CMD, OP)
        t = OP.t_period
        assert bc.i2 - bc.i1 == pytest.approx(co.a_slope * 0.15 * t, rel=1e-12)
        assert bc.i3 - bc.i2 == pytest.approx(co.b_slope * 0.35 * t, rel=1e-12)
        assert bc.i4 - bc.i3 == pytest.approx(-co.a_slope * 0.15 * t, rel=1e-12)

    def test_averages_match_endpoint_means(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            phi = float(rng.uniform(0.0, 0.25))
            bc = boundary_currents(PARAMS, ModulationCommand(d=0.5, phi=phi), OP)
            ends = (bc.i1, bc.i2, bc.i3, bc.i4, bc.i1)
            for k in range(4):
                assert bc.i_avg[k] == pytest.approx(
                    (ends[k] + ends[k + 1]) / 2.0, rel=1e-12, abs=1e-15)

    def test_off_nominal_duty_raises_with_residual(self):
        cmd = ModulationCommand(d=0.53, phi=0.15)
        with pytest.raises(FluxImbalanceError) as excinfo:
            boundary_currents(PARAMS, cmd, OP)
        co = region_coefficients(PARAMS, OP)
        expected = co.b_slope * OP.t_period * (2 * 0.53 - 1.0)
        assert excinfo.value.residual == pytest.approx(expected, rel=1e-12)

    def test_increments_sum_to_flux_residual(self):
        # the four per-region increments close only at 50% duty
        co = region_coefficients(PARAMS, OP)
        t = OP.t_period
        rng = np.random.default_rng(5)
        for _ in range(100):
            d = float(rng.uniform(0.3, 0.7))
            phi = float(rng.uniform(0.0, min(0.25, d, 1.0 - d)))
            inc = (co.a_slope * phi * t,
                   co.b_slope * (d - phi) * t,
                   -co.a_slope * phi * t,
                   -co.b_slope * (1.0 - phi - d) * t)
            assert sum(inc) == pytest.approx(
                co.b_slope * t * (2.0 * d - 1.0), rel=1e-9, abs=1e-12)


class TestAuxPower:
    def test_table2_nominal_power(self):
        assert aux_power(PARAMS, CMD, OP) == pytest.approx(4.375, rel=1e-12)

    def test_zero_phase_shift_zero_power(self):
        assert aux_power(PARAMS, ModulationCommand(d=0.5, phi=0.0), OP) == 0.0

    def test_power_maximum_at_quarter_period(self):
        p_max = aux_power(PARAMS, ModulationCommand(d=0.5, phi=0.25), OP)
        assert p_max == pytest.approx(5.208333333333334, rel=1e-12)
        for phi in np.linspace(0.0, 0.25, 30):
            assert aux_power(PARAMS, ModulationCommand(d=0.5, phi=float(phi)), OP) \
                <= p_max + 1e-12

    def test_off_nominal_duty_requires_boundary_current(self):
        with pytest.raises(ValueError):
            aux_power(PARAMS, ModulationCommand(d=0.53, phi=0.15), OP)
        # with i1 supplied, the call succeeds and the extra term appears
        p = aux_power(PARAMS, ModulationCommand(d=0.53, phi=0.15), OP, i1=0.1)
        p0 = aux_power(PARAMS, ModulationCommand(d=0.53, phi=0.15), OP, i1=0.0)
        assert p - p0 == pytest.approx(OP.v_aux * 0.1 * 0.06, rel=1e-9)

    def test_slope_form_matches_compact_form_at_half_duty(self):
        # the i1 term carries the (2d-1) factor, so at d = 0.5 any i1 value
        # gives the same power and both closed forms agree
        co = region_coefficients(PARAMS, OP)
        rng = np.random.default_rng(13)
        for _ in range(100):
            phi = float(rng.uniform(0.0, 0.25))
            i1 = float(rng.uniform(-5.0, 5.0))
            p_slope = phase_shift_power(OP.v_aux, 0.5, phi, co.a_slope,
                                        co.b_slope, OP.t_period, i1=i1)
            p_compact = aux_power(PARAMS, ModulationCommand(d=0.5, phi=phi), OP)
            assert p_slope == pytest.approx(p_compact, rel=1e-9, abs=1e-12)

    def test_slope_form_matches_compact_form_off_nominal(self):
        # algebraic identity between the slope expansion and the product form
        co = region_coefficients(PARAMS, OP)
        rng = np.random.default_rng(17)
        for _ in range(200):
            d = float(rng.uniform(0.3, 0.7))
            phi = float(rng.uniform(0.0, min(0.25, d)))
            i1 = float(rng.uniform(-3.0, 3.0))
            p_slope = phase_shift_power(OP.v_aux, d, phi, co.a_slope,
                                        co.b_slope, OP.t_period, i1=i1)
            p_compact = aux_power(PARAMS, ModulationCommand(d=d, phi=phi), OP, i1=i1)
            assert p_slope == pytest.approx(p_compact, rel=1e-9, abs=1e-12)

    def test_power_symmetric_about_quarter_duty(self):
        # P(phi) = P(d - phi) at d = 0.5 over the full [0, d] span of the
        # slope-form expression
        co = region_coefficients(PARAMS, OP)
        for phi in np.linspace(0.0, 0.5, 51):
            p1 = phase_shift_power(OP.v_aux, 0.5, float(phi),
                                   co.a_slope, co.b_slope, OP.t_period)
            p2 = phase_shift_power(OP.v_aux, 0.5, 0.5 - float(phi),
                                   co.a_slope, co.b_slope, OP.t_period)
            assert p1 == pytest.approx(p2, rel=1e-9, abs=1e-12)

    def test_power_matches_region_average_integration(self):
        # independent oracle: average polarity-weighted current region by
        # region and multiply by the bridge voltage
        signs = (-1, 1, 1, -1)
        for phi in np.linspace(0.0, 0.25, 11):
            cmd = ModulationCommand(d=0.5, phi=float(phi))
            bc = boundary_currents(PARAMS, cmd, OP)
            sched = region_schedule(cmd, OP)
            p_oracle = OP.v_aux * sum(
                s * ia * dur
                for s, ia, dur in zip(signs, bc.i_avg, sched.durations)
            ) / OP.t_period
            assert aux_power(PARAMS, cmd, OP) == pytest.approx(
                p_oracle, rel=1e-9, abs=1e-12)


class TestPowerCurve:
    def test_reference_grid(self):
        curve = power_curve(PARAMS, OP, 0.5, [0.0, 0.05, 0.15, 0.25])
        values = [p for _, p in curve]
        assert values[0] == 0.0
        assert values[1] == pytest.approx(1.875, rel=1e-12)
        assert values[2] == pytest.approx(4.375, rel=1e-12)
        assert values[3] == pytest.approx(5.208333333333334, rel=1e-12)

    def test_monotone_up_to_half_duty(self):
        grid = np.linspace(0.0, 0.25, 40)
        curve = power_curve(PARAMS, OP, 0.5, grid)
        values = np.array([p for _, p in curve])
        assert np.all(np.diff(values) >= -1e-12)

    def test_singleton_matches_aux_power(self):
        (phi, p), = power_curve(PARAMS, OP, 0.5, [0.12])
        assert p == aux_power(PARAMS, ModulationCommand(d=0.5, phi=0.12), OP)

    def test_reversed_grid_reverses_output(self):
        fwd = power_curve(PARAMS, OP, 0.5, [0.0, 0.1, 0.2])
        rev = power_curve(PARAMS, OP, 0.5, [0.2, 0.1, 0.0])
        assert fwd == rev[::-1]
