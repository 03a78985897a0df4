"""Fixed-step time-domain simulation of the switched converter circuit.

Circuit model: the coupled inductor is a primary magnetizing inductance plus
an ideal transformer (ratio ``n_ratio`` secondary/primary) with the leakage
inductance in the secondary loop.  The primary winding current is
``i_mag + n_ratio * i_le``.  With the main switch on, the winding sees the
battery voltage; with the rectifying path on it sees battery minus output.
The bridge applies ``polarity * v_aux`` across the secondary loop; in
passive mode the body diodes pick the polarity (conduct with the current,
block when the induced voltage cannot forward-bias a pair).

Integration is fixed-step Heun with switch edges snapped to the step grid
(default 2000 steps per period).  ``resolve_network``/``integrate_step``
form a plain-Python reference path used for inspection and tests; the
production runners drive the compiled kernel in ``_kernel``, which
implements identical dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernel
from .control import ControlStack, SupervisorPlan, supervisor_step, validate_plan
from .modulation import SwitchState
from .params import ConverterParams, ModulationCommand, validate
from .waveforms import Waveform

DEFAULT_STEPS_PER_PERIOD = 2000

LEG_M1 = _kernel.LEG_M1
LEG_M2 = _kernel.LEG_M2
LEG_OPEN = _kernel.LEG_OPEN


class SimulationError(RuntimeError):
    """Integration failure or inconsistent conduction pattern."""


@dataclass(frozen=True)
class StateVector:
    """Simulator state: magnetizing and leakage currents, both port voltages."""

    i_mag: float = 0.0
    i_le: float = 0.0
    v_out: float = 0.0
    v_aux: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.i_mag, self.i_le, self.v_out, self.v_aux])

    @classmethod
    def from_array(cls, x) -> "StateVector":
        return cls(i_mag=float(x[0]), i_le=float(x[1]),
                   v_out=float(x[2]), v_aux=float(x[3]))


def initial_state(params: ConverterParams) -> StateVector:
    """Default start: output pre-charged through the rectifying path, rest at zero."""
    return StateVector(i_mag=0.0, i_le=0.0, v_out=params.v_bat, v_aux=0.0)


@dataclass(frozen=True)
class AffineModel:
    """Affine ODE dx/dt = m @ x + b for one conduction pattern.

    ``bridge_diodes`` flags which body diodes carry the loop current when the
    bridge is not gated (order q1, q2, q3, q4); gated conduction leaves them
    False.
    """

    m: np.ndarray
    b: np.ndarray
    leg: int
    bridge_polarity: int
    m2_conducting: bool
    bridge_diodes: tuple[bool, bool, bool, bool]


def _resolve_leg(gates: SwitchState, state: StateVector, params: ConverterParams,
                 main_leg: str) -> int:
    i_pri = state.i_mag + params.n_ratio * state.i_le
    if gates.m1:
        return LEG_M1
    if gates.m2 and main_leg == "synchronous":
        return LEG_M2
    # diode in the M2 position (asynchronous mode or a dead-time window)
    if i_pri > 0.0:
        return LEG_M2
    if not gates.m2 and not gates.m1 and i_pri < 0.0:
        return LEG_M1  # M1 body diode clamps the switch node
    # winding open: check whether the diode would be forward-biased
    pol_g = 1.0 if state.i_le > 0.0 else (-1.0 if state.i_le < 0.0 else 0.0)
    n, l_mag, l_e = params.n_ratio, params.l_mag, params.l_e
    v_p_open = n * l_mag * pol_g * state.v_aux / (l_e + n * n * l_mag)
    if params.v_bat - v_p_open > state.v_out:
        return LEG_M2
    return LEG_OPEN


def _primary_voltage(leg: int, state: StateVector, params: ConverterParams,
                     pol: int) -> float:
    if leg == LEG_M1:
        return params.v_bat
    if leg == LEG_M2:
        return params.v_bat - state.v_out
    n, l_mag, l_e = params.n_ratio, params.l_mag, params.l_e
    return n * l_mag * pol * state.v_aux / (l_e + n * n * l_mag)


def resolve_network(
    gates: SwitchState,
    state: StateVector,
    params: ConverterParams,
    mode: str = "active",
    main_leg: str = "synchronous",
    r_load: float | None = None,
    r_aux: float | None = None,
) -> AffineModel:
    """Affine dynamics for the conduction pattern implied by gates and state.

    In active mode the commanded bridge polarity defines the pattern; in
    passive mode (or a commanded polarity of 0) the ideal-diode rule picks
    it: conduct with the sign of the loop current, and from rest conduct
    only if the induced voltage exceeds the auxiliary voltage.  Raises
    :class:`SimulationError` if the chosen pattern is inconsistent, which
    would indicate a solver bug for this topology.
    """
    if mode not in ("active", "passive"):
        raise ValueError(f"mode must be 'active' or 'passive', got {mode!r}")
    if main_leg not in ("synchronous", "diode"):
        raise ValueError(f"main_leg must be 'synchronous' or 'diode', got {main_leg!r}")
    r_load = params.r_load if r_load is None else r_load
    r_aux = params.r_aux if r_aux is None else r_aux
    n, l_mag, l_e = params.n_ratio, params.l_mag, params.l_e
    c_out, c_aux, v_bat = params.c_out, params.c_aux, params.v_bat

    leg = _resolve_leg(gates, state, params, main_leg)

    commanded = mode == "active" and gates.bridge_polarity != 0
    diodes = (False, False, False, False)
    if commanded:
        pol = gates.bridge_polarity
    else:
        if state.i_le > 0.0:
            pol = 1
        elif state.i_le < 0.0:
            pol = -1
        else:
            e_sec = n * _primary_voltage(leg, state, params, 0)
            if e_sec > state.v_aux:
                pol = 1
            elif e_sec < -state.v_aux:
                pol = -1
            else:
                pol = 0
        if pol == 1:
            diodes = (True, False, False, True)
        elif pol == -1:
            diodes = (False, True, True, False)

    # consistency traps; unreachable for this topology unless resolution is buggy
    if not commanded and pol != 0 and pol * state.i_le < 0.0:
        raise SimulationError("conducting bridge diodes carry reverse current")
    if not commanded and pol == 0 and state.i_le != 0.0:
        raise SimulationError("blocked bridge cannot carry leakage current")

    m = np.zeros((4, 4))
    b = np.zeros(4)
    if leg == LEG_M1:
        b[0] = v_bat / l_mag
        m[2, 2] = -1.0 / (r_load * c_out)
        if pol != 0:
            b[1] = n * v_bat / l_e
            m[1, 1] = -params.r_le / l_e
            m[1, 3] = -pol / l_e
    elif leg == LEG_M2:
        b[0] = v_bat / l_mag
        m[0, 2] = -1.0 / l_mag
        m[2, 0] = 1.0 / c_out
        m[2, 1] = n / c_out
        m[2, 2] = -1.0 / (r_load * c_out)
        if pol != 0:
            b[1] = n * v_bat / l_e
            m[1, 1] = -params.r_le / l_e
            m[1, 2] = -n / l_e
            m[1, 3] = -pol / l_e
    else:
        m[2, 2] = -1.0 / (r_load * c_out)
        if pol != 0:
            open_ind = l_e + n * n * l_mag
            m[1, 1] = -params.r_le / open_ind
            m[1, 3] = -pol / open_ind
            m[0, 1] = n * params.r_le / open_ind
            m[0, 3] = n * pol / open_ind
    if pol != 0:
        m[3, 1] = pol / c_aux
    m[3, 3] = -1.0 / (r_aux * c_aux)

    return AffineModel(
        m=m, b=b, leg=leg, bridge_polarity=pol,
        m2_conducting=leg == LEG_M2, bridge_diodes=diodes,
    )


def integrate_step(model: AffineModel, state: StateVector, dt: float) -> StateVector:
    """One Heun step of the affine ODE; aborts on a non-finite result."""
    x = state.as_array()
    d1 = model.m @ x + model.b
    d2 = model.m @ (x + dt * d1) + model.b
    x_new = x + 0.5 * dt * (d1 + d2)
    if not np.all(np.isfinite(x_new)):
        raise SimulationError(
            f"state became non-finite during integration: {x_new!r} "
            f"(leg={model.leg}, polarity={model.bridge_polarity})"
        )
    return StateVector.from_array(x_new)


def _gates_for_step(s: int, spp: int, d_steps: int, phi_steps: int,
                    mode: str) -> SwitchState:
    m1 = s < d_steps
    pol = 0
    if mode == "active":
        ds = (s - phi_steps) % spp
        pol = 1 if ds < d_steps else -1
    return SwitchState(
        m1=m1, m2=not m1,
        q1=pol == 1, q2=pol == -1, q3=pol == -1, q4=pol == 1,
        bridge_polarity=pol, rectifier_active=mode == "active",
    )


def run_reference(
    params: ConverterParams,
    cmd: ModulationCommand,
    mode: str,
    n_periods: int,
    steps_per_period: int,
    initial: StateVector,
    r_load: float | None = None,
    r_aux: float | None = None,
) -> np.ndarray:
    """Plain-Python fixed-command run; returns states at every step boundary.

    Slow; exists as the inspectable counterpart of the compiled kernel and
    is the baseline of the kernel-equivalence test.
    """
    spp = steps_per_period
    dt = params.t_period / spp
    d_steps = int(cmd.d * spp + 0.5)
    phi_steps = int(cmd.phi * spp + 0.5)
    state = initial
    out = np.empty((n_periods * spp + 1, 4))
    out[0] = state.as_array()
    for g in range(n_periods * spp):
        gates = _gates_for_step(g % spp, spp, d_steps, phi_steps, mode)
        model = resolve_network(gates, state, params, mode, "synchronous",
                                r_load, r_aux)
        new = integrate_step(model, state, dt)
        if mode == "passive" and model.bridge_polarity != 0 \
                and new.i_le * model.bridge_polarity < 0.0:
            new = replace(new, i_le=0.0)
        state = new
        out[g + 1] = state.as_array()
    return out


def _steps_per_period(params: ConverterParams, dt: float | None,
                      steps_per_period: int | None) -> int:
    if dt is not None and steps_per_period is not None:
        raise ValueError("give either dt or steps_per_period, not both")
    spp = steps_per_period or DEFAULT_STEPS_PER_PERIOD
    if dt is not None:
        spp = int(round(params.t_period / dt))
    if spp < 8 or spp % 2:
        raise ValueError(f"steps per period must be even and >= 8, got {spp}")
    return spp


def _empty_refs(n: int) -> np.ndarray:
    return np.full(n, np.nan)


def _run_kernel(params, spp, decim, arrays, gains, state, pi_state,
                sync_main, dead_pri, dead_sec, t_offset=0.0):
    n_periods = len(arrays["mode"])
    if spp % decim:
        raise ValueError(f"decimation {decim} must divide steps per period {spp}")
    dt = params.t_period / spp
    n_samples = n_periods * spp // decim
    samples = np.empty((n_samples, _kernel.N_SAMPLE_COLS))
    stats = np.empty((n_periods, _kernel.N_STATS_COLS))
    x = state.as_array()
    pi = np.array(pi_state)
    status = _kernel.run_span(
        x, pi, spp, dt,
        arrays["mode"], arrays["duty_ovr"], arrays["phi_ovr"],
        arrays["main_ref"], arrays["aux_ref"],
        arrays["r_load"], arrays["r_aux"],
        params.v_bat, params.n_ratio, params.l_mag, params.l_e,
        params.c_out, params.c_aux, params.r_le,
        gains["kp_m"], gains["ki_m"], gains["kp_a"], gains["ki_a"],
        gains["d_min"], gains["d_max"], gains["phi_min"], gains["phi_max"],
        sync_main, dead_pri, dead_sec,
        samples, decim, stats,
    )
    if status >= 0:
        raise SimulationError(
            f"state became non-finite in period {status} "
            f"(t = {t_offset + status * params.t_period:.6g} s)"
        )
    return samples, stats, x, pi


def _build_waveform(params, spp, decim, samples, stats, t_offset,
                    final_x, final_pi) -> Waveform:
    dt = params.t_period / spp
    t = t_offset + np.arange(samples.shape[0]) * (decim * dt)
    channels = {
        name: samples[:, i].copy() for i, name in enumerate(_kernel.SAMPLE_CHANNELS)
    }
    period_stats: dict[str, np.ndarray] = {
        "t0": t_offset + np.arange(stats.shape[0]) * params.t_period,
    }
    for k, name in enumerate(_kernel.STATS_CHANNELS):
        period_stats[f"{name}_mean"] = stats[:, 4 * k].copy()
        period_stats[f"{name}_min"] = stats[:, 4 * k + 1].copy()
        period_stats[f"{name}_max"] = stats[:, 4 * k + 2].copy()
        period_stats[f"{name}_rms"] = stats[:, 4 * k + 3].copy()
    base = 4 * len(_kernel.STATS_CHANNELS)
    for j, name in enumerate(_kernel.STATS_EXTRAS):
        period_stats[name] = stats[:, base + j].copy()
    return Waveform(
        t=t, channels=channels, f_sw=params.f_sw, dt=dt,
        sample_period=decim * dt, period_stats=period_stats,
        final_state=StateVector.from_array(final_x),
        final_pi=(float(final_pi[0]), float(final_pi[1])),
    )


_ZERO_GAINS = dict(kp_m=0.0, ki_m=0.0, kp_a=0.0, ki_a=0.0,
                   d_min=0.0, d_max=1.0, phi_min=0.0, phi_max=0.25)


def run_open_loop(
    params: ConverterParams,
    cmd: ModulationCommand,
    mode: str = "active",
    duration: float = 0.01,
    dt: float | None = None,
    *,
    steps_per_period: int | None = None,
    decimation: int = 20,
    r_load: float | None = None,
    r_aux: float | None = None,
    initial: StateVector | None = None,
    main_leg: str = "synchronous",
    dead_time: float = 0.0,
    t_offset: float = 0.0,
) -> Waveform:
    """Simulate with a fixed modulation command.

    Steady-state measurements want at least a couple hundred periods of run
    so start-up transients wash out; pass ``initial`` (e.g. a previous run's
    ``final_state``) to continue or warm-start.  ``t_offset`` only shifts
    the reported time axis.
    """
    validate(params, cmd).raise_if_failed()
    if mode not in ("active", "passive"):
        raise ValueError(f"mode must be 'active' or 'passive', got {mode!r}")
    spp = _steps_per_period(params, dt, steps_per_period)
    n_periods = max(1, int(round(duration / params.t_period)))
    n = n_periods
    arrays = {
        "mode": np.full(n, 1.0 if mode == "active" else 0.0),
        "duty_ovr": np.full(n, cmd.d),
        "phi_ovr": np.full(n, cmd.phi),
        "main_ref": _empty_refs(n),
        "aux_ref": _empty_refs(n),
        "r_load": np.full(n, params.r_load if r_load is None else r_load),
        "r_aux": np.full(n, params.r_aux if r_aux is None else r_aux),
    }
    dead_steps = int(round(dead_time * spp / params.t_period))
    state = initial if initial is not None else initial_state(params)
    samples, stats, x, pi = _run_kernel(
        params, spp, decimation, arrays, _ZERO_GAINS, state, (0.0, 0.0),
        main_leg == "synchronous", dead_steps, dead_steps, t_offset,
    )
    return _build_waveform(params, spp, decimation, samples, stats,
                           t_offset, x, pi)


def run_with_controller(
    params: ConverterParams,
    hooks,
    plan: SupervisorPlan,
    duration: float,
    dt: float | None = None,
    *,
    steps_per_period: int | None = None,
    decimation: int = 200,
    initial: StateVector | None = None,
    initial_pi: tuple[float, float] = (0.0, 0.0),
    main_leg: str = "synchronous",
    dead_time: float = 0.0,
    t_offset: float = 0.0,
) -> Waveform:
    """Closed-loop run under a supervisor plan.

    ``hooks`` is either a :class:`~ciboost.control.ControlStack` (the two PI
    loops execute inside the compiled kernel, once per period) or any
    callable ``hook(t, meas: dict) -> (duty, phi)`` invoked once per period
    with the sampled measurements; either way the commands are held for
    exactly one period.  Plan events apply from the first period boundary
    at or after their times.
    """
    validate(params, ModulationCommand(d=0.5, phi=0.0)).raise_if_failed()
    validate_plan(plan, duration + t_offset)
    spp = _steps_per_period(params, dt, steps_per_period)
    n = max(1, int(round(duration / params.t_period)))
    t_period = params.t_period

    arrays = {
        "mode": np.empty(n), "duty_ovr": np.empty(n), "phi_ovr": np.empty(n),
        "main_ref": np.empty(n), "aux_ref": np.empty(n),
        "r_load": np.empty(n), "r_aux": np.empty(n),
    }
    for p in range(n):
        sup = supervisor_step(plan, t_offset + p * t_period)
        arrays["mode"][p] = 1.0 if sup.active else 0.0
        arrays["duty_ovr"][p] = np.nan if sup.duty_override is None else sup.duty_override
        arrays["phi_ovr"][p] = np.nan if sup.phi_override is None else sup.phi_override
        arrays["main_ref"][p] = sup.main_ref
        arrays["aux_ref"][p] = sup.aux_ref
        arrays["r_load"][p] = sup.r_load
        arrays["r_aux"][p] = sup.r_aux

    dead_steps = int(round(dead_time * spp / t_period))
    state = initial if initial is not None else initial_state(params)

    if isinstance(hooks, ControlStack):
        gains = dict(
            kp_m=hooks.main.kp, ki_m=hooks.main.ki,
            kp_a=hooks.aux.kp, ki_a=hooks.aux.ki,
            d_min=hooks.duty_limits[0], d_max=hooks.duty_limits[1],
            phi_min=hooks.phi_limits[0], phi_max=hooks.phi_limits[1],
        )
        samples, stats, x, pi = _run_kernel(
            params, spp, decimation, arrays, gains, state, initial_pi,
            main_leg == "synchronous", dead_steps, dead_steps, t_offset,
        )
        return _build_waveform(params, spp, decimation, samples, stats,
                               t_offset, x, pi)

    if not callable(hooks):
        raise TypeError("hooks must be a ControlStack or a callable")

    # generic hook: one kernel call per period, commands supplied externally
    sample_rows = []
    stat_rows = []
    x_state = state
    for p in range(n):
        t_now = t_offset + p * t_period
        meas = {
            "t": t_now,
            "v_out": x_state.v_out, "v_aux": x_state.v_aux,
            "i_mag": x_state.i_mag, "i_le": x_state.i_le,
            "active": arrays["mode"][p] > 0.5,
        }
        duty_cmd, phi_cmd = hooks(t_now, meas)
        sub = {key: arr[p:p + 1].copy() for key, arr in arrays.items()}
        sub["duty_ovr"][0] = duty_cmd
        sub["phi_ovr"][0] = phi_cmd
        samples, stats, x, _ = _run_kernel(
            params, spp, decimation, sub, _ZERO_GAINS, x_state, (0.0, 0.0),
            main_leg == "synchronous", dead_steps, dead_steps, t_now,
        )
        sample_rows.append(samples)
        stat_rows.append(stats)
        x_state = StateVector.from_array(x)
    samples = np.vstack(sample_rows)
    stats = np.vstack(stat_rows)
    return _build_waveform(params, spp, decimation, samples, stats,
                           t_offset, x_state.as_array(), np.zeros(2))
