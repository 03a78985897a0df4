"""Closed-form model of the leakage-inductor current and auxiliary power.

With the primary at 50% duty the leakage current is piecewise linear over
four regions per switching period.  Region boundaries follow from the duty
``d`` and phase shift ``phi``; the bridge voltage sign pattern over the
regions is (-, +, +, -).  The slopes are

    region I   : +a    a = (n*v_p + v_s) / l_e
    region II  : +b    b = (n*v_p - v_s) / l_e
    region III : -a
    region IV  : -b

where ``v_p`` is the primary square-wave amplitude (the battery voltage at
50% duty) and ``v_s`` the bridge-applied auxiliary voltage.  Averaging the
current region by region yields the closed-form auxiliary port power; see
:func:`aux_power`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .params import ConverterParams, ModulationCommand, OperatingPoint

REGION_VOLTAGE_SIGNS = (-1, +1, +1, -1)


class FluxImbalanceError(ValueError):
    """Leakage current does not close over one period at the given duty.

    The four per-region current increments sum to ``b * t_period * (2d - 1)``;
    a nonzero residual means no periodic steady state exists for the
    symmetric-slope model, which happens exactly when d != 0.5.
    """

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(
            f"leakage current increments do not close over one period "
            f"(residual {residual:+.6g} A); the four-region closure is only "
            "defined at d = 0.5"
        )


@dataclass(frozen=True)
class RegionCoefficients:
    """Slope magnitudes of the piecewise-linear leakage current [A/s]."""

    a_slope: float  # (n*v_p + v_s)/l_e, regions I (+) and III (-)
    b_slope: float  # (n*v_p - v_s)/l_e, regions II (+) and IV (-)

    @property
    def region_slopes(self) -> tuple[float, float, float, float]:
        return (self.a_slope, self.b_slope, -self.a_slope, -self.b_slope)


@dataclass(frozen=True)
class RegionSchedule:
    """Durations [s] and bridge-voltage signs of regions I..IV."""

    durations: tuple[float, float, float, float]
    voltage_signs: tuple[int, int, int, int] = REGION_VOLTAGE_SIGNS


@dataclass(frozen=True)
class BoundaryCurrents:
    """Region-boundary values and per-region averages of the leakage current [A]."""

    i1: float
    i2: float
    i3: float
    i4: float
    i_avg: tuple[float, float, float, float]


def region_coefficients(params: ConverterParams, op: OperatingPoint) -> RegionCoefficients:
    """Slopes of the four-region leakage-current waveform.

    The primary amplitude is taken as ``v_bat`` (symmetric square wave at
    50% duty) and the bridge voltage as ``op.v_aux``.
    """
    e = params.n_ratio * params.v_bat
    return RegionCoefficients(
        a_slope=(e + op.v_aux) / params.l_e,
        b_slope=(e - op.v_aux) / params.l_e,
    )


def region_schedule(cmd: ModulationCommand, op: OperatingPoint) -> RegionSchedule:
    """Region durations (phi*T, (d-phi)*T, phi*T, remainder) for one period.

    The final duration is computed as the exact remainder so the four always
    sum to ``t_period``.  Requires phi <= d and d + phi <= 1 for the regions
    to be well ordered.
    """
    d, phi, t = cmd.d, cmd.phi, op.t_period
    if phi > d or d + phi > 1.0:
        raise ValueError(
            f"region pattern requires phi <= d and d + phi <= 1, got d={d}, phi={phi}"
        )
    d1 = phi * t
    d2 = (d - phi) * t
    d3 = phi * t
    d4 = t - d1 - d2 - d3
    return RegionSchedule(durations=(d1, d2, d3, d4))


def boundary_currents(
    params: ConverterParams, cmd: ModulationCommand, op: OperatingPoint
) -> BoundaryCurrents:
    """Steady-state region-boundary currents I1..I4 and per-region averages.

    The recursion fixes I2..I4 relative to I1 but leaves I1 free; it is
    closed by half-wave symmetry (I3 = -I1), which holds at 50% duty where
    the second half-period mirrors the first.  Away from d = 0.5 the
    increments do not sum to zero and :class:`FluxImbalanceError` is raised
    carrying the residual.
    """
    coeffs = region_coefficients(params, op)
    a, b = coeffs.a_slope, coeffs.b_slope
    d, phi, t = cmd.d, cmd.phi, op.t_period

    residual = b * t * (2.0 * d - 1.0)
    if d != 0.5:
        raise FluxImbalanceError(residual)

    rise_1 = a * phi * t          # increment over region I
    rise_2 = b * (d - phi) * t    # increment over region II
    i1 = -(rise_1 + rise_2) / 2.0
    i2 = i1 + rise_1
    i3 = i1 + rise_1 + rise_2
    i4 = i1 + rise_2
    i_avg = (
        i1 + rise_1 / 2.0,
        i1 + rise_1 + rise_2 / 2.0,
        i1 + rise_2 + rise_1 / 2.0,
        i1 + rise_2 / 2.0,
    )
    return BoundaryCurrents(i1=i1, i2=i2, i3=i3, i4=i4, i_avg=i_avg)


def phase_shift_power(
    v_s: float,
    d: float,
    phi: float,
    a_slope: float,
    b_slope: float,
    t_period: float,
    i1: float = 0.0,
) -> float:
    """Auxiliary port power from the slope-form closed expression [W].

    This is the region-averaged power in terms of the slopes; the ``i1``
    term multiplies ``(2d - 1)`` and therefore vanishes at 50% duty.
    Positive values mean power delivered into the auxiliary port.
    """
    a, b, t = a_slope, b_slope, t_period
    return v_s * (
        i1 * (2.0 * d - 1.0)
        + a * phi * t * (d - phi)
        + b * t * phi * (d - phi)
        + b * t * (d - phi) ** 2 / 2.0
        - b * t * (d - phi) * (1.0 - d - phi) / 2.0
    )


def aux_power(
    params: ConverterParams,
    cmd: ModulationCommand,
    op: OperatingPoint,
    i1: float | None = None,
) -> float:
    """Closed-form power delivered to the auxiliary port [W].

    At d = 0.5 this reduces to the compact product form

        P = v_aux * (d - phi) / (l_e * f) * [2*n*v_bat*phi
            + (n*v_bat - v_aux)/2 * (2d - 1)]

    whose second bracket term vanishes.  Away from 50% duty the expression
    keeps an ``i1 * (2d - 1)`` term that the four-region model leaves
    unclosed, so the caller must supply ``i1`` explicitly.
    """
    if cmd.d != 0.5 and i1 is None:
        raise ValueError(
            "auxiliary power at d != 0.5 depends on the unclosed boundary "
            "current i1; pass it explicitly"
        )
    n_v = params.n_ratio * params.v_bat
    bracket = 2.0 * n_v * cmd.phi + (n_v - op.v_aux) / 2.0 * (2.0 * cmd.d - 1.0)
    p = op.v_aux * (cmd.d - cmd.phi) / (params.l_e * params.f_sw) * bracket
    if i1 is not None:
        p += op.v_aux * i1 * (2.0 * cmd.d - 1.0)
    return p


def power_curve(
    params: ConverterParams,
    op: OperatingPoint,
    d: float,
    phi_grid,
) -> list[tuple[float, float]]:
    """Evaluate :func:`aux_power` pointwise over a phase-shift grid."""
    out = []
    for phi in phi_grid:
        cmd = ModulationCommand(d=d, phi=float(phi))
        out.append((float(phi), aux_power(params, cmd, op)))
    return out
