"""Small-signal plants and PI synthesis against the reference design."""

import math

import numpy as np
import pytest

from ciboost.params import ModulationCommand, table2_defaults
from ciboost.smallsignal import (
    TABLE2_REFERENCE,
    aux_plant,
    bandwidth_separation_report,
    boost_plant,
    design_aux_loop,
    design_chain,
    design_main_loop,
    design_report,
    gaux_magnitude,
    gvd_magnitude,
)

PARAMS, CMD, OP = table2_defaults()


def gvd_oracle(plant, omega):
    # independent complex evaluation of the boost response
    s = 1j * omega
    return abs(plant.dc_gain * (1 - s / plant.omega_rhp)
               / (1 + s / (plant.q_factor * plant.omega_n) + (s / plant.omega_n) ** 2))


class TestBoostPlant:
    def test_table2_constants(self):
        plant = boost_plant(PARAMS, 0.5, 40.0)
        assert plant.dc_gain == 160.0
        assert plant.omega_rhp == pytest.approx(2032.520325203252, rel=1e-12)
        assert plant.omega_n == pytest.approx(570.7227094572852, rel=1e-12)
        assert plant.q_factor == pytest.approx(3.56130970701346, rel=1e-12)

    def test_constants_near_reference_design(self):
        plant = boost_plant(PARAMS, 0.5, 40.0)
        assert abs(plant.omega_rhp - 2028.0) / 2028.0 < 0.003
        assert abs(plant.omega_n - 562.9) / 562.9 < 0.014

    def test_invalid_duty_rejected(self):
        with pytest.raises(ValueError):
            boost_plant(PARAMS, 1.0, 40.0)


class TestGvdMagnitude:
    def test_dc_limit(self):
        plant = boost_plant(PARAMS, 0.5, 40.0)
        assert gvd_magnitude(plant, 1e-9) == pytest.approx(160.0, rel=1e-6)

    def test_resonance_gain(self):
        plant = boost_plant(PARAMS, 0.5, 40.0)
        assert gvd_magnitude(plant, plant.omega_n) == pytest.approx(
            591.8470468197576, rel=1e-9)

    def test_matches_independent_evaluation(self):
        plant = boost_plant(PARAMS, 0.5, 40.0)
        for omega in (10.0, 405.2, 570.7, 1200.0, 5000.0):
            assert gvd_magnitude(plant, omega) == pytest.approx(
                gvd_oracle(plant, omega), rel=1e-12)


class TestMainLoopDesign:
    def test_crossover_placement(self):
        plant = boost_plant(PARAMS, 0.5, 40.0)
        loop = design_main_loop(plant)
        assert loop.omega_c == plant.omega_rhp / 5.0
        assert loop.omega_z == loop.omega_c / 10.0
        assert abs(loop.omega_c - 405.2) / 405.2 < 0.005

    def test_unity_gain_at_crossover(self):
        plant = boost_plant(PARAMS, 0.5, 40.0)
        loop = design_main_loop(plant)
        mag = loop.kp * abs(1 + loop.omega_z / (1j * loop.omega_c)) \
            * gvd_oracle(plant, loop.omega_c)
        assert abs(mag - 1.0) < 1e-9

    def test_gains_near_reference(self):
        loop = design_main_loop(boost_plant(PARAMS, 0.5, 40.0))
        assert loop.kp == pytest.approx(0.0032426, rel=1e-3)
        assert abs(loop.kp - TABLE2_REFERENCE["kp_main"]) \
            / TABLE2_REFERENCE["kp_main"] < 0.15

    def test_gain_pair_identity(self):
        loop = design_main_loop(boost_plant(PARAMS, 0.5, 40.0))
        assert loop.ki == loop.kp * loop.omega_z

    def test_reference_pairs_satisfy_identity_to_four_figures(self):
        assert 0.00297 * 40.52 == pytest.approx(0.1203, rel=5e-4)
        assert 0.1201 * 4.052 == pytest.approx(0.4866, rel=5e-4)


class TestAuxPlant:
    def test_table2_linearization(self):
        plant = aux_plant(PARAMS, ModulationCommand(d=0.5, phi=0.15), OP, 7.5)
        assert plant.k_phi == pytest.approx(16.666666666666668, rel=1e-12)
        assert plant.dc_gain == pytest.approx(8.333333333333334, rel=1e-12)
        assert plant.pole == pytest.approx(1374.5704467353953, rel=1e-12)

    def test_gain_collapses_at_power_maximum(self):
        with pytest.warns(UserWarning, match="no authority"):
            plant = aux_plant(PARAMS, ModulationCommand(d=0.5, phi=0.25), OP, 7.5)
        assert plant.k_phi == 0.0

    def test_gain_sign_tracks_distance_from_power_peak(self):
        for phi0, sign in ((0.05, 1), (0.2, 1), (0.24, 1)):
            plant = aux_plant(PARAMS, ModulationCommand(d=0.5, phi=phi0), OP, 7.5)
            expected = 2 * PARAMS.n_ratio * PARAMS.v_bat * OP.v_aux \
                / (PARAMS.l_e * PARAMS.f_sw) * (0.5 - 2 * phi0)
            assert plant.k_phi == pytest.approx(expected, rel=1e-12)
            assert (plant.k_phi > 0) == (phi0 < 0.25)


class TestAuxLoopDesign:
    def test_crossover_decade_below_main(self):
        _, main, aux, loop = design_chain(PARAMS, OP)
        assert loop.omega_c == main.omega_c / 10.0
        assert loop.omega_z == loop.omega_c / 10.0
        assert abs(loop.omega_c - 40.52) / 40.52 < 0.005

    def test_gains_near_reference(self):
        _, _, _, loop = design_chain(PARAMS, OP)
        assert loop.kp == pytest.approx(0.119457, rel=1e-3)
        assert abs(loop.kp - TABLE2_REFERENCE["kp_aux"]) \
            / TABLE2_REFERENCE["kp_aux"] < 0.15
        assert loop.ki == loop.kp * loop.omega_z

    def test_unity_gain_at_crossover(self):
        _, main, aux, loop = design_chain(PARAMS, OP)
        mag = loop.kp * abs(1 + loop.omega_z / (1j * loop.omega_c)) \
            * gaux_magnitude(aux, loop.omega_c)
        assert abs(mag - 1.0) < 1e-9


class TestBandwidthSeparation:
    def test_designed_chain_passes_at_ten(self):
        _, main, _, loop = design_chain(PARAMS, OP)
        report = bandwidth_separation_report(main, loop)
        assert report.ratio == pytest.approx(10.0, rel=1e-12)
        assert report.ok

    def test_violations_fail(self):
        _, main, _, loop = design_chain(PARAMS, OP)
        import dataclasses
        doubled = dataclasses.replace(loop, omega_c=loop.omega_c * 2.0)
        assert bandwidth_separation_report(main, doubled).ratio == pytest.approx(5.0)
        assert not bandwidth_separation_report(main, doubled).ok
        assert not bandwidth_separation_report(main, main).ok


class TestDeterminismAndReport:
    def test_design_chain_is_bit_deterministic(self):
        a = design_chain(PARAMS, OP)
        b = design_chain(PARAMS, OP)
        assert a == b

    def test_report_contains_reference_deltas(self):
        text = design_report(PARAMS, OP, reference=TABLE2_REFERENCE)
        assert "omega_rhp" in text and "kp_aux" in text
        assert "bandwidth_separation" in text and "pass" in text
