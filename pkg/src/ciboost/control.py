"""Discrete-time PI loops and the operating-mode supervisor.

Both loops execute once per switching period on sampled measurements and
hold their outputs for the full period.  The integrator uses backward Euler
at the loop rate; saturation is handled by conditional integration (the
integrator freezes while the output is clamped against the error sign).
The supervisor sequences passive-to-active rectification, reference steps,
and load steps; the auxiliary PI is held reset while rectification is
passive.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .smallsignal import LoopDesign

DUTY_LIMITS = (0.1, 0.9)
PHI_LIMITS = (0.0, 0.25)


@dataclass(frozen=True)
class PiState:
    """Integrator state and output limits of one PI loop."""

    integrator: float = 0.0
    last_output: float = 0.0
    lo: float = 0.0
    hi: float = 1.0
    saturated: bool = False


def pi_step(
    gains: LoopDesign, ref: float, meas: float, state: PiState, dt: float
) -> tuple[float, PiState]:
    """One PI update: u = kp*e + integrator, then clamp with anti-windup.

    The output uses the pre-update integrator, so with zero error the loop
    holds its previous integral action.  When the clamp engages against the
    error sign the integrator keeps its old value.
    """
    e = ref - meas
    u = gains.kp * e + state.integrator
    integ = state.integrator + gains.ki * e * dt
    saturated = False
    if u > state.hi:
        u = state.hi
        saturated = True
        if e > 0.0:
            integ = state.integrator
    elif u < state.lo:
        u = state.lo
        saturated = True
        if e < 0.0:
            integ = state.integrator
    return u, replace(state, integrator=integ, last_output=u, saturated=saturated)


def main_loop_state(initial_duty: float = DUTY_LIMITS[0]) -> PiState:
    return PiState(integrator=initial_duty, last_output=initial_duty,
                   lo=DUTY_LIMITS[0], hi=DUTY_LIMITS[1])


def aux_loop_state() -> PiState:
    return PiState(lo=PHI_LIMITS[0], hi=PHI_LIMITS[1])


def main_loop_step(
    gains: LoopDesign, ref_v_out: float, meas_v_out: float, state: PiState, dt: float
) -> tuple[float, PiState]:
    """Main-voltage loop update; returns the duty ratio for the next period."""
    return pi_step(gains, ref_v_out, meas_v_out, state, dt)


def aux_loop_step(
    gains: LoopDesign, ref_v_aux: float, meas_v_aux: float, state: PiState, dt: float
) -> tuple[float, PiState]:
    """Auxiliary-voltage loop update; returns the phase shift for the next period."""
    return pi_step(gains, ref_v_aux, meas_v_aux, state, dt)


@dataclass(frozen=True)
class SupervisorPlan:
    """Timed operating sequence for one scenario run.

    ``enable_active_at`` is the instant the bridge gates start switching;
    before it the converter rectifies passively and the auxiliary PI is held
    reset.  ``aux_ref_steps`` and ``load_steps`` apply from the first period
    boundary at or after their times.  A non-None ``duty_override`` opens
    the main loop and forces the duty (used by duty-deviation studies).
    """

    main_ref: float
    aux_ref: float
    main_load: float
    aux_load: float
    enable_active_at: float = 0.0
    aux_ref_steps: tuple[tuple[float, float], ...] = ()
    load_steps: tuple[tuple[str, float, float], ...] = ()  # (port, t, ohms)
    duty_override: float | None = None
    phi_override: float | None = None


@dataclass(frozen=True)
class SupervisorState:
    active: bool
    main_ref: float
    aux_ref: float
    r_load: float
    r_aux: float
    duty_override: float | None
    phi_override: float | None


def validate_plan(plan: SupervisorPlan, duration: float | None = None) -> None:
    """Reject unsorted events, misordered activation, and bad loads."""
    times = [t for t, _ in plan.aux_ref_steps]
    if times != sorted(times):
        raise ValueError("auxiliary reference steps must be time-sorted")
    lt = [t for _, t, _ in plan.load_steps]
    if lt != sorted(lt):
        raise ValueError("load steps must be time-sorted")
    for t, _ in plan.aux_ref_steps:
        if t < plan.enable_active_at:
            raise ValueError(
                "active rectification must be enabled before any auxiliary "
                f"reference step (step at {t} s, enable at {plan.enable_active_at} s)"
            )
    for port, _, ohms in plan.load_steps:
        if port not in ("main", "aux"):
            raise ValueError(f"load-step port must be 'main' or 'aux', got {port!r}")
        if not ohms > 0.0:
            raise ValueError(f"load-step resistance must be positive, got {ohms!r}")
    if not plan.main_load > 0.0 or not plan.aux_load > 0.0:
        raise ValueError("initial loads must be positive")
    if duration is not None:
        # an activation instant beyond the run simply keeps the converter
        # passive throughout, so only stepped events must fit
        last = max(
            [0.0]
            + [t for t, _ in plan.aux_ref_steps]
            + [t for _, t, _ in plan.load_steps]
        )
        if last > duration:
            raise ValueError(
                f"plan event at {last} s falls outside the {duration} s run"
            )


def supervisor_step(plan: SupervisorPlan, t: float) -> SupervisorState:
    """Mode, references, and loads in force at time ``t``."""
    aux_ref = plan.aux_ref
    for ts, value in plan.aux_ref_steps:
        if t >= ts:
            aux_ref = value
    r_load, r_aux = plan.main_load, plan.aux_load
    for port, ts, ohms in plan.load_steps:
        if t >= ts:
            if port == "main":
                r_load = ohms
            else:
                r_aux = ohms
    return SupervisorState(
        active=t >= plan.enable_active_at,
        main_ref=plan.main_ref,
        aux_ref=aux_ref,
        r_load=r_load,
        r_aux=r_aux,
        duty_override=plan.duty_override,
        phi_override=plan.phi_override,
    )


@dataclass(frozen=True)
class ControlStack:
    """Gain set and output limits for the two sampled PI loops."""

    main: LoopDesign
    aux: LoopDesign
    duty_limits: tuple[float, float] = DUTY_LIMITS
    phi_limits: tuple[float, float] = PHI_LIMITS
