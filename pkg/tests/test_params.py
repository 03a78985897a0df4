"""Parameter sets, operating points, and validation rules."""

import dataclasses

import numpy as np
import pytest

from ciboost.params import (
    ConverterParams,
    ModulationCommand,
    OperatingPoint,
    ParameterError,
    table2_defaults,
    table3_defaults,
    validate,
)


class TestDefaults:
    def test_table2_values(self):
        params, cmd, op = table2_defaults()
        assert params.f_sw == 50e3
        assert params.l_e == 64e-6
        assert params.l_mag == 4.92e-3
        assert params.c_out == 156e-6
        assert params.c_aux == 97e-6
        assert params.v_bat == 40.0
        assert params.n_ratio == pytest.approx(2.0 / 9.0, rel=1e-15)
        assert cmd.d == 0.5 and cmd.phi == 0.15
        assert op.v_out == 80.0 and op.v_aux == 15.0

    def test_table2_period_is_exactly_inverse_frequency(self):
        params, _, op = table2_defaults()
        assert op.t_period == 1.0 / params.f_sw
        assert op.t_period == 2e-5
        assert params.t_period == op.t_period

    def test_table3_values(self):
        params, _, op = table3_defaults()
        assert params.l_e == 53.3e-6
        assert params.l_mag == 5.7e-3
        assert params.c_out == 160e-6
        assert params.c_aux == 100e-6
        assert op.v_aux == 14.0
        # same switching frequency as the simulation set
        assert params.f_sw == table2_defaults()[0].f_sw == 50e3

    def test_defaults_validate_clean(self):
        for factory in (table2_defaults, table3_defaults):
            params, cmd, _ = factory()
            report = validate(params, cmd)
            assert report.ok, report.errors
            assert report.warnings == ()


class TestValidate:
    def test_table2_nominal_passes(self):
        params, _, _ = table2_defaults()
        report = validate(params, ModulationCommand(d=0.5, phi=0.15))
        assert report.ok

    def test_phase_shift_above_quarter_period_is_hard_failure(self):
        params, _, _ = table2_defaults()
        report = validate(params, ModulationCommand(d=0.5, phi=0.30))
        assert not report.ok
        assert any("phase shift" in e for e in report.errors)
        with pytest.raises(ParameterError):
            report.raise_if_failed()

    def test_zero_leakage_is_hard_failure(self):
        params, cmd, _ = table2_defaults()
        bad = dataclasses.replace(params, l_e=0.0)
        report = validate(bad, cmd)
        assert not report.ok
        assert any("l_e" in e for e in report.errors)

    def test_duty_outside_unit_interval_is_hard_failure(self):
        params, _, _ = table2_defaults()
        for d in (0.0, 1.0, -0.2, 1.7):
            assert not validate(params, ModulationCommand(d=d, phi=0.1)).ok

    def test_duty_deviation_warns_but_passes(self):
        params, _, _ = table2_defaults()
        for d in (0.53, 0.47):
            report = validate(params, ModulationCommand(d=d, phi=0.15))
            assert report.ok
            assert report.warnings

    def test_negative_loop_resistance_rejected(self):
        params, cmd, _ = table2_defaults()
        assert not validate(dataclasses.replace(params, r_le=-0.1), cmd).ok

    def test_accepted_commands_are_inside_the_limits(self):
        # round-trip property: anything validate passes obeys the bounds
        params, _, _ = table2_defaults()
        rng = np.random.default_rng(42)
        accepted = 0
        for _ in range(500):
            cmd = ModulationCommand(d=float(rng.uniform(-0.2, 1.2)),
                                    phi=float(rng.uniform(-0.1, 0.4)))
            if validate(params, cmd).ok:
                accepted += 1
                assert 0.0 < cmd.d < 1.0
                assert 0.0 <= cmd.phi <= 0.25
        assert accepted > 50
