"""Gate scheduling for the main leg and the secondary full bridge.

Both stages run at the same switching frequency and track the same duty
reference.  The main switch conducts for the first ``d`` fraction of the
period; the bridge applies the same pattern delayed by ``phi * T`` (the
outer phase shift): +1 polarity on [phi*T, (d+phi)*T), -1 elsewhere.  At
50% duty the bridge voltage is zero-mean; away from it the pattern carries
a DC component that drives the leakage loop against nothing but its series
resistance, which is why duty deviation degrades the auxiliary side.

Edge convention: intervals are left-closed, right-open; an edge instant
belongs to the state that follows it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .params import PHI_MAX, ModulationCommand, OperatingPoint


@dataclass(frozen=True)
class SwitchState:
    """Gate levels of all six switches plus the commanded bridge polarity.

    ``bridge_polarity`` is the voltage the bridge applies at its terminals
    as a multiple of the auxiliary voltage: +1, -1, or 0 when no pair is
    commanded (passive rectification or a dead-time window); in that case
    actual conduction is resolved by the simulator's diode rules.
    """

    m1: bool
    m2: bool
    q1: bool
    q2: bool
    q3: bool
    q4: bool
    bridge_polarity: int
    rectifier_active: bool


@dataclass(frozen=True)
class GateSchedule:
    """One period of switching edges; periodic with period ``t_period``."""

    t_period: float
    duty: float
    phi: float
    mode: str                 # "active" | "passive"
    dead_time: float
    edges: tuple[tuple[float, SwitchState], ...]  # (time, post-edge state)


def _check_command(cmd: ModulationCommand) -> None:
    if not 0.0 < cmd.d < 1.0:
        raise ValueError(f"duty ratio must lie in (0, 1), got {cmd.d!r}")
    if not 0.0 <= cmd.phi <= PHI_MAX:
        raise ValueError(f"phase shift must lie in [0, {PHI_MAX}], got {cmd.phi!r}")


def _state_at_time(
    tau: float, cmd: ModulationCommand, t_period: float, mode: str, dead_time: float
) -> SwitchState:
    """Closed-form switch state at tau in [0, T)."""
    t_on = cmd.d * t_period
    # incoming device waits out the dead time after each leg edge
    m1 = dead_time <= tau < t_on
    m2 = t_on + dead_time <= tau

    polarity = 0
    active = mode == "active"
    if active:
        # +1 window starts at phi*T and lasts d*T (delayed primary pattern)
        t_plus = cmd.phi * t_period
        t_minus = (t_plus + cmd.d * t_period) % t_period
        since_plus = (tau - t_plus) % t_period
        since_minus = (tau - t_minus) % t_period
        if since_plus < cmd.d * t_period:
            polarity = +1 if since_plus >= dead_time else 0
        else:
            polarity = -1 if since_minus >= dead_time else 0

    return SwitchState(
        m1=m1,
        m2=m2,
        q1=polarity == +1,
        q2=polarity == -1,
        q3=polarity == -1,
        q4=polarity == +1,
        bridge_polarity=polarity,
        rectifier_active=active,
    )


def build_schedule(
    cmd: ModulationCommand,
    op: OperatingPoint,
    mode: str = "active",
    dead_time: float = 0.0,
) -> GateSchedule:
    """Construct the synchronized gate schedule for one switching period."""
    _check_command(cmd)
    if mode not in ("active", "passive"):
        raise ValueError(f"mode must be 'active' or 'passive', got {mode!r}")
    t = op.t_period
    if not 0.0 <= dead_time < t / 4.0:
        raise ValueError(f"dead_time must lie in [0, T/4), got {dead_time!r}")

    event_times = {0.0, cmd.d * t}
    if dead_time > 0.0:
        event_times |= {dead_time, cmd.d * t + dead_time}
    if mode == "active":
        t_plus = cmd.phi * t
        t_minus = (t_plus + cmd.d * t) % t
        event_times |= {t_plus, t_minus}
        if dead_time > 0.0:
            event_times |= {(t_plus + dead_time) % t, (t_minus + dead_time) % t}

    edges = []
    last = None
    for tau in sorted(tm % t for tm in event_times):
        state = _state_at_time(tau, cmd, t, mode, dead_time)
        if state != last:
            edges.append((tau, state))
            last = state
    return GateSchedule(
        t_period=t,
        duty=cmd.d,
        phi=cmd.phi,
        mode=mode,
        dead_time=dead_time,
        edges=tuple(edges),
    )


def state_at(schedule: GateSchedule, t: float) -> SwitchState:
    """Switch state at absolute time t >= 0 (periodic lookup)."""
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    tau = t % schedule.t_period
    cmd = ModulationCommand(d=schedule.duty, phi=schedule.phi)
    return _state_at_time(tau, cmd, schedule.t_period, schedule.mode, schedule.dead_time)


def region_of(t: float, cmd: ModulationCommand, op: OperatingPoint) -> int:
    """Region index 1..4 of the four-region pattern containing time t.

    Boundaries are 0, phi*T, d*T, (d+phi)*T, T; intervals are left-closed.
    """
    _check_command(cmd)
    if cmd.phi > cmd.d or cmd.d + cmd.phi > 1.0:
        raise ValueError(
            f"region pattern requires phi <= d and d + phi <= 1, "
            f"got d={cmd.d}, phi={cmd.phi}"
        )
    tau = (t % op.t_period) / op.t_period
    if tau < cmd.phi:
        return 1
    if tau < cmd.d:
        return 2
    if tau < cmd.d + cmd.phi:
        return 3
    return 4


def schedule_csv(schedule: GateSchedule, path) -> None:
    """Dump the edge list as CSV: t, m1, m2, q1..q4, polarity."""
    lines = ["t,m1,m2,q1,q2,q3,q4,polarity"]
    for tau, s in schedule.edges:
        lines.append(
            f"{tau!r},{int(s.m1)},{int(s.m2)},{int(s.q1)},{int(s.q2)},"
            f"{int(s.q3)},{int(s.q4)},{s.bridge_polarity}"
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
