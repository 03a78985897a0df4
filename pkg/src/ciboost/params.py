"""Converter parameter sets, operating points, and validation.

Two named parameter sets ship with the package: ``table2`` (the values used
for the simulation design study) and ``table3`` (the hardware prototype).
All quantities are SI.
"""

from __future__ import annotations

from dataclasses import dataclass

PHI_MAX = 0.25          # hard phase-shift limit [p.u. of the switching period]
DUTY_NOMINAL = 0.5
DUTY_WARN_BAND = 0.01   # |d - 0.5| beyond this degrades waveform symmetry

# Rated port powers of the table2/table3 designs.  The auxiliary rating is a
# design-table figure; see the eq32-validation report for how it compares to
# the power the phase-shift mechanism can actually deliver.
MAIN_RATED_POWER_W = 160.0
AUX_RATED_POWER_W = 30.0
AUX_RATED_PHI = 0.15


class ParameterError(ValueError):
    """Raised when a parameter set or modulation command is not physical."""


@dataclass(frozen=True)
class ConverterParams:
    """Electrical constants of both converter stages.

    ``n_ratio`` is the coupled-inductor turns ratio expressed as
    secondary/primary, so the voltage induced on the auxiliary side is
    ``n_ratio * v_primary``.  ``l_mag`` is the primary magnetizing inductance
    (it plays the boost-inductor role); ``l_e`` is the series leakage
    inductance of the secondary loop that mediates phase-shift power
    transfer.
    """

    v_bat: float    # input/battery voltage [V]
    n_ratio: float  # turns ratio, secondary/primary
    l_mag: float    # primary magnetizing inductance [H]
    l_e: float      # secondary-loop leakage inductance [H]
    c_out: float    # main output capacitor [F]
    c_aux: float    # auxiliary output capacitor [F]
    f_sw: float     # switching frequency [Hz]
    r_load: float   # main-port design load [ohm]
    r_aux: float    # auxiliary-port design load [ohm]
    c_bat: float = 0.0  # input capacitor [F]; 0 = ideal source
    # Series resistance of the secondary loop [ohm].  The ideal (0) model
    # leaves the loop's circulating DC component undamped, because the
    # bridge applies a zero-mean voltage and a DC offset in i_le paired
    # with -n_ratio times itself in i_mag draws no net primary charge.
    # Any real winding resistance collapses that mode onto the symmetric
    # steady state; measurement-grade studies set a few tens of milliohms.
    r_le: float = 0.0

    @property
    def t_period(self) -> float:
        return 1.0 / self.f_sw


@dataclass(frozen=True)
class ModulationCommand:
    """The two control variables: main-switch duty and bridge phase shift.

    ``phi`` is the delay of the secondary-bridge pattern relative to the
    primary square wave, in per-unit of the switching period.
    """

    d: float    # duty ratio of the main switch, (0, 1)
    phi: float  # phase shift [p.u.], [0, PHI_MAX]


@dataclass(frozen=True)
class OperatingPoint:
    """Steady-state port voltages and the switching period."""

    v_out: float     # main output voltage [V]
    v_aux: float     # auxiliary output voltage [V]
    t_period: float  # switching period [s], exactly 1/f_sw


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors

    def raise_if_failed(self) -> None:
        if self.errors:
            raise ParameterError("; ".join(self.errors))


def validate(params: ConverterParams, cmd: ModulationCommand) -> ValidationReport:
    """Check a parameter set and modulation command against the operating limits.

    Hard errors: non-physical passives, duty outside (0, 1), phase shift
    outside [0, PHI_MAX].  Operation away from 50% duty is legal but degraded
    (waveform asymmetry raises auxiliary-side ripple), so it only warns.
    """
    errors: list[str] = []
    warnings: list[str] = []

    for name in ("l_mag", "l_e", "c_out", "c_aux", "f_sw", "r_load", "r_aux", "v_bat"):
        value = getattr(params, name)
        if not value > 0.0:
            errors.append(f"{name} must be strictly positive, got {value!r}")
    if params.c_bat < 0.0:
        errors.append(f"c_bat must be >= 0, got {params.c_bat!r}")
    if params.r_le < 0.0:
        errors.append(f"r_le must be >= 0, got {params.r_le!r}")
    if not params.n_ratio > 0.0:
        errors.append(f"n_ratio must be strictly positive, got {params.n_ratio!r}")

    if not 0.0 < cmd.d < 1.0:
        errors.append(f"duty ratio must lie in (0, 1), got {cmd.d!r}")
    if not 0.0 <= cmd.phi <= PHI_MAX:
        errors.append(
            f"phase shift must lie in [0, {PHI_MAX}], got {cmd.phi!r}"
        )

    if not errors and abs(cmd.d - DUTY_NOMINAL) > DUTY_WARN_BAND:
        warnings.append(
            f"duty {cmd.d} deviates from the nominal 0.5 point; auxiliary-side "
            "ripple and phase-shift margin degrade away from 50% duty"
        )

    return ValidationReport(errors=tuple(errors), warnings=tuple(warnings))


def table2_defaults() -> tuple[ConverterParams, ModulationCommand, OperatingPoint]:
    """Parameter set used by the simulation design study.

    The turns ratio is 9:2 primary:secondary, i.e. n_ratio = 2/9; with that
    direction the auxiliary small-signal DC gain evaluates to the published
    8.333 with the 7.5 ohm rated load.  The auxiliary design load is the
    30 W rating at 15 V.
    """
    params = ConverterParams(
        v_bat=40.0,
        n_ratio=2.0 / 9.0,
        l_mag=4.92e-3,
        l_e=64e-6,
        c_out=156e-6,
        c_aux=97e-6,
        f_sw=50e3,
        r_load=40.0,
        r_aux=7.5,
    )
    cmd = ModulationCommand(d=0.5, phi=0.15)
    op = OperatingPoint(v_out=80.0, v_aux=15.0, t_period=1.0 / params.f_sw)
    return params, cmd, op


def table3_defaults() -> tuple[ConverterParams, ModulationCommand, OperatingPoint]:
    """Hardware-prototype parameter set.

    Same stage voltages and switching frequency as table2 with the measured
    prototype magnetics and filter values; the auxiliary regulation target is
    14 V.  The auxiliary design load is again the 30 W rating, at 14 V.
    """
    params = ConverterParams(
        v_bat=40.0,
        n_ratio=2.0 / 9.0,
        l_mag=5.7e-3,
        l_e=53.3e-6,
        c_out=160e-6,
        c_aux=100e-6,
        f_sw=50e3,
        r_load=40.0,
        r_aux=14.0**2 / AUX_RATED_POWER_W,
    )
    cmd = ModulationCommand(d=0.5, phi=0.15)
    op = OperatingPoint(v_out=80.0, v_aux=14.0, t_period=1.0 / params.f_sw)
    return params, cmd, op
