"""Small-signal plants and PI synthesis for both regulation loops.

The main loop regulates the boosted output through the duty ratio; its
control-to-output response is the standard ideal-CCM boost model: second
order, load-damped, with a right-half-plane zero that caps the usable
bandwidth.  The auxiliary loop regulates the auxiliary voltage through the
phase shift; linearizing the closed-form power transfer about the operating
phase shift gives a first-order plant with no RHP zero.

Design rules: the main crossover sits at one fifth of the RHP zero, the
auxiliary crossover one decade below the main one, and each PI zero one
decade below its own crossover.  Proportional gains come from exact
unity-gain crossover including the PI-zero magnitude factor.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .params import ConverterParams, ModulationCommand, OperatingPoint

CROSSOVER_RHP_DIVISOR = 5.0    # omega_c_main = omega_rhp / 5
PI_ZERO_DECADE_DIVISOR = 10.0  # omega_z = omega_c / 10, both loops
AUX_BANDWIDTH_DIVISOR = 10.0   # omega_c_aux = omega_c_main / 10

# Reference design constants for the table2 parameter set, used by the
# design report to show deltas and by the regression tests.
TABLE2_REFERENCE = {
    "omega_n": 562.9,
    "omega_rhp": 2028.0,
    "omega_c_main": 405.2,
    "omega_z_main": 40.52,
    "omega_c_aux": 40.52,
    "omega_z_aux": 4.052,
    "main_dc_gain": 160.0,
    "aux_dc_gain": 8.333,
    "kp_main": 0.00297,
    "ki_main": 0.1203,
    "kp_aux": 0.1201,
    "ki_aux": 0.4866,
}


@dataclass(frozen=True)
class BoostPlant:
    """Duty-to-output-voltage model of the boost stage."""

    dc_gain: float    # v_bat / (1 - D)^2 [V]
    omega_n: float    # natural frequency [rad/s]
    q_factor: float   # load damping
    omega_rhp: float  # right-half-plane zero [rad/s]


@dataclass(frozen=True)
class AuxPlant:
    """Phase-shift-to-auxiliary-voltage model, first order."""

    k_phi: float    # dP/dphi at the linearization point [W per p.u.]
    dc_gain: float  # (k_phi / v_aux0) * r_aux [V per p.u.]
    pole: float     # 1 / (r_aux * c_aux) [rad/s]


@dataclass(frozen=True)
class LoopDesign:
    """Crossover, PI zero, and the resulting PI gains for one loop."""

    omega_c: float
    omega_z: float
    kp: float
    ki: float


@dataclass(frozen=True)
class BandwidthReport:
    ratio: float
    target: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return abs(self.ratio - self.target) <= self.tolerance * self.target


def boost_plant(params: ConverterParams, duty: float, r_load: float) -> BoostPlant:
    """Boost control-to-output constants at a DC operating duty."""
    if not 0.0 < duty < 1.0:
        raise ValueError(f"duty must lie in (0, 1), got {duty!r}")
    dp = 1.0 - duty
    return BoostPlant(
        dc_gain=params.v_bat / dp**2,
        omega_n=dp / math.sqrt(params.l_mag * params.c_out),
        q_factor=dp * r_load * math.sqrt(params.c_out / params.l_mag),
        omega_rhp=r_load * dp**2 / params.l_mag,
    )


def gvd(plant: BoostPlant, omega: float) -> complex:
    """Complex duty-to-output response of the boost plant at ``omega``."""
    s = 1j * omega
    num = plant.dc_gain * (1.0 - s / plant.omega_rhp)
    den = 1.0 + s / (plant.q_factor * plant.omega_n) + (s / plant.omega_n) ** 2
    return num / den


def gvd_magnitude(plant: BoostPlant, omega: float) -> float:
    return abs(gvd(plant, omega))


def _pi_kp(plant_gain_at_wc: float, omega_c: float, omega_z: float) -> float:
    # Unity loop gain at crossover: |kp * (1 + wz/s) * G(jwc)| = 1.
    return 1.0 / (plant_gain_at_wc * abs(1.0 + omega_z / (1j * omega_c)))


def design_main_loop(plant: BoostPlant) -> LoopDesign:
    """PI for the boost loop: crossover at omega_rhp/5, zero a decade below."""
    omega_c = plant.omega_rhp / CROSSOVER_RHP_DIVISOR
    omega_z = omega_c / PI_ZERO_DECADE_DIVISOR
    kp = _pi_kp(gvd_magnitude(plant, omega_c), omega_c, omega_z)
    return LoopDesign(omega_c=omega_c, omega_z=omega_z, kp=kp, ki=kp * omega_z)


def aux_plant(
    params: ConverterParams,
    cmd: ModulationCommand,
    op: OperatingPoint,
    r_aux: float,
) -> AuxPlant:
    """Linearized phase-shift plant about the operating point ``cmd.phi``.

    The power-to-phase gain is ``2*n*v_bat*v_aux/(l_e*f) * (d - 2*phi0)``;
    it collapses to zero at phi0 = d/2 where the power transfer peaks, which
    leaves the loop without control authority, hence the warning.
    """
    phi0 = cmd.phi
    k_phi = (
        2.0 * params.n_ratio * params.v_bat * op.v_aux
        / (params.l_e * params.f_sw)
        * (cmd.d - 2.0 * phi0)
    )
    if k_phi == 0.0:
        warnings.warn(
            "phase-shift plant gain is zero at phi0 = d/2 (power maximum); "
            "the auxiliary loop has no authority here",
            stacklevel=2,
        )
    return AuxPlant(
        k_phi=k_phi,
        dc_gain=k_phi / op.v_aux * r_aux,
        pole=1.0 / (r_aux * params.c_aux),
    )


def gaux(plant: AuxPlant, omega: float) -> complex:
    """Complex phase-shift-to-voltage response at ``omega``."""
    return plant.dc_gain / (1.0 + 1j * omega / plant.pole)


def gaux_magnitude(plant: AuxPlant, omega: float) -> float:
    return abs(gaux(plant, omega))


def design_aux_loop(aux: AuxPlant, main: LoopDesign) -> LoopDesign:
    """PI for the auxiliary loop, one decade below the main crossover."""
    omega_c = main.omega_c / AUX_BANDWIDTH_DIVISOR
    omega_z = omega_c / PI_ZERO_DECADE_DIVISOR
    kp = _pi_kp(gaux_magnitude(aux, omega_c), omega_c, omega_z)
    return LoopDesign(omega_c=omega_c, omega_z=omega_z, kp=kp, ki=kp * omega_z)


def bandwidth_separation_report(
    main: LoopDesign, aux: LoopDesign, target: float = 10.0, tolerance: float = 0.05
) -> BandwidthReport:
    """Ratio of the two crossovers with a pass/fail at target (default 10x)."""
    return BandwidthReport(
        ratio=main.omega_c / aux.omega_c, target=target, tolerance=tolerance
    )


def design_chain(
    params: ConverterParams,
    op: OperatingPoint,
    duty: float = 0.5,
    phi0: float = 0.15,
    r_load: float | None = None,
    r_aux: float | None = None,
) -> tuple[BoostPlant, LoopDesign, AuxPlant, LoopDesign]:
    """Run the full design sequence: both plants, then both PI loops."""
    r_load = params.r_load if r_load is None else r_load
    r_aux = params.r_aux if r_aux is None else r_aux
    plant = boost_plant(params, duty, r_load)
    main = design_main_loop(plant)
    aux = aux_plant(params, ModulationCommand(d=duty, phi=phi0), op, r_aux)
    aux_loop = design_aux_loop(aux, main)
    return plant, main, aux, aux_loop


def design_report(
    params: ConverterParams,
    op: OperatingPoint,
    duty: float = 0.5,
    phi0: float = 0.15,
    reference: dict | None = None,
) -> str:
    """Plain-text design report: plant constants, gains, reference deltas."""
    plant, main, aux, aux_loop = design_chain(params, op, duty=duty, phi0=phi0)
    sep = bandwidth_separation_report(main, aux_loop)

    rows = [
        ("main_dc_gain", plant.dc_gain, "V"),
        ("omega_n", plant.omega_n, "rad/s"),
        ("q_factor", plant.q_factor, ""),
        ("omega_rhp", plant.omega_rhp, "rad/s"),
        ("omega_c_main", main.omega_c, "rad/s"),
        ("omega_z_main", main.omega_z, "rad/s"),
        ("kp_main", main.kp, ""),
        ("ki_main", main.ki, "1/s"),
        ("k_phi", aux.k_phi, "W/p.u."),
        ("aux_dc_gain", aux.dc_gain, "V/p.u."),
        ("aux_pole", aux.pole, "rad/s"),
        ("omega_c_aux", aux_loop.omega_c, "rad/s"),
        ("omega_z_aux", aux_loop.omega_z, "rad/s"),
        ("kp_aux", aux_loop.kp, ""),
        ("ki_aux", aux_loop.ki, "1/s"),
    ]
    lines = ["quantity,value,unit,reference,delta_pct"]
    for name, value, unit in rows:
        ref = (reference or {}).get(name)
        if ref is not None:
            delta = 100.0 * (value - ref) / ref
            lines.append(f"{name},{value:.6g},{unit},{ref:.6g},{delta:+.2f}")
        else:
            lines.append(f"{name},{value:.6g},{unit},,")
    lines.append(
        f"bandwidth_separation,{sep.ratio:.6g},x,{sep.target:.6g},"
        f"{'pass' if sep.ok else 'FAIL'}"
    )
    return "\n".join(lines) + "\n"
