"""Scenario files: load, validate, and run batch simulation studies.

A scenario is a small TOML document selecting a parameter set, a supervisor
plan (references, activation instant, reference/load steps, optional duty
or phase-shift overrides), run settings, and initial conditions.  Unknown
keys are rejected so typos fail loudly.  The schema is documented in the
README and mirrored by the bundled ``*.scenario`` files.
"""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .control import ControlStack, SupervisorPlan, validate_plan
from .measurements import AnalysisReport, settle_metrics, steady_mean, steady_power, steady_ripple
from .params import (
    PHI_MAX,
    ConverterParams,
    ModulationCommand,
    OperatingPoint,
    table2_defaults,
    table3_defaults,
    validate,
)
from .simulator import StateVector, initial_state, run_with_controller
from .smallsignal import design_chain
from .waveforms import Waveform

TAIL_PERIODS = 50  # every plan event needs at least this much run after it

_PARAM_SETS = {"table2": table2_defaults, "table3": table3_defaults}
_PARAM_FIELDS = {f.name for f in dataclasses.fields(ConverterParams)}
_PLAN_KEYS = {
    "main_ref", "aux_ref", "main_load", "aux_load", "enable_active_at",
    "duty_override", "phi_override", "aux_ref_steps", "load_steps",
}
_RUN_KEYS = {"duration", "steps_per_period", "decimation", "main_leg", "dead_time"}
_CONTROLLER_KEYS = {"phi0", "phi_max", "duty_min", "duty_max"}
_INIT_KEYS = {"i_mag", "i_le", "v_out", "v_aux"}
_TOP_KEYS = {"params", "controller", "plan", "init", "run", "measure"}


class ScenarioError(ValueError):
    """Scenario file cannot be parsed or fails validation."""


def _require_number(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"key {key!r} must be a number, got {value!r}")
    return float(value)


def _check_keys(section: dict, allowed: set, path: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ScenarioError(f"unknown key(s) {unknown} in [{path}]")


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully validated scenario, ready to run."""

    name: str
    params: ConverterParams
    op: OperatingPoint           # nominal design operating point of the set
    plan: SupervisorPlan
    duration: float
    steps_per_period: int
    decimation: int
    steady_window: float
    phi0: float
    phi_max: float
    duty_limits: tuple[float, float]
    initial: StateVector | None
    main_leg: str
    dead_time: float


def load_scenario(path) -> ScenarioConfig:
    """Parse and validate a scenario file; defaults fill anything omitted.

    An empty file is legal and means: table2 parameters, static references
    at the nominal operating point, active rectification from t = 0.
    """
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ScenarioError(f"scenario file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: parse error: {exc}") from None
    return scenario_from_dict(doc, name=path.stem)


def scenario_from_dict(doc: dict, name: str = "scenario") -> ScenarioConfig:
    _check_keys(doc, _TOP_KEYS, "top level")

    p_sec = dict(doc.get("params", {}))
    set_name = p_sec.pop("set", "table2")
    if set_name not in _PARAM_SETS:
        raise ScenarioError(
            f"params.set must be one of {sorted(_PARAM_SETS)}, got {set_name!r}"
        )
    params, _, op = _PARAM_SETS[set_name]()
    _check_keys(p_sec, _PARAM_FIELDS, "params")
    if p_sec:
        params = dataclasses.replace(
            params, **{k: _require_number(v, f"params.{k}") for k, v in p_sec.items()}
        )

    c_sec = doc.get("controller", {})
    _check_keys(c_sec, _CONTROLLER_KEYS, "controller")
    phi0 = _require_number(c_sec.get("phi0", 0.15), "controller.phi0")
    phi_max = _require_number(c_sec.get("phi_max", PHI_MAX), "controller.phi_max")
    duty_min = _require_number(c_sec.get("duty_min", 0.1), "controller.duty_min")
    duty_max = _require_number(c_sec.get("duty_max", 0.9), "controller.duty_max")
    if not 0.0 < phi_max <= PHI_MAX:
        raise ScenarioError(
            f"controller.phi_max must lie in (0, {PHI_MAX}], got {phi_max}"
        )
    if not 0.0 <= phi0 < 0.25:
        raise ScenarioError(f"controller.phi0 must lie in [0, 0.25), got {phi0}")
    if not 0.0 < duty_min < duty_max < 1.0:
        raise ScenarioError(
            f"controller duty limits must satisfy 0 < min < max < 1, "
            f"got ({duty_min}, {duty_max})"
        )

    pl = doc.get("plan", {})
    _check_keys(pl, _PLAN_KEYS, "plan")
    ref_steps = []
    for i, step in enumerate(pl.get("aux_ref_steps", [])):
        _check_keys(step, {"t", "value"}, f"plan.aux_ref_steps[{i}]")
        ref_steps.append((_require_number(step["t"], "t"),
                          _require_number(step["value"], "value")))
    load_steps = []
    for i, step in enumerate(pl.get("load_steps", [])):
        _check_keys(step, {"port", "t", "ohms"}, f"plan.load_steps[{i}]")
        load_steps.append((str(step["port"]),
                           _require_number(step["t"], "t"),
                           _require_number(step["ohms"], "ohms")))
    plan = SupervisorPlan(
        main_ref=_require_number(pl.get("main_ref", op.v_out), "plan.main_ref"),
        aux_ref=_require_number(pl.get("aux_ref", op.v_aux), "plan.aux_ref"),
        main_load=_require_number(pl.get("main_load", params.r_load), "plan.main_load"),
        aux_load=_require_number(pl.get("aux_load", params.r_aux), "plan.aux_load"),
        enable_active_at=_require_number(
            pl.get("enable_active_at", 0.0), "plan.enable_active_at"),
        aux_ref_steps=tuple(ref_steps),
        load_steps=tuple(load_steps),
        duty_override=(None if "duty_override" not in pl
                       else _require_number(pl["duty_override"], "plan.duty_override")),
        phi_override=(None if "phi_override" not in pl
                      else _require_number(pl["phi_override"], "plan.phi_override")),
    )

    init_sec = doc.get("init", {})
    _check_keys(init_sec, _INIT_KEYS, "init")
    initial = None
    if init_sec:
        base = initial_state(params)
        initial = dataclasses.replace(
            base, **{k: _require_number(v, f"init.{k}") for k, v in init_sec.items()}
        )

    r_sec = doc.get("run", {})
    _check_keys(r_sec, _RUN_KEYS, "run")
    duration = _require_number(r_sec.get("duration", 0.1), "run.duration")
    spp = int(_require_number(r_sec.get("steps_per_period", 2000),
                              "run.steps_per_period"))
    decimation = int(_require_number(r_sec.get("decimation", 200), "run.decimation"))
    main_leg = str(r_sec.get("main_leg", "synchronous"))
    dead_time = _require_number(r_sec.get("dead_time", 0.0), "run.dead_time")
    if main_leg not in ("synchronous", "diode"):
        raise ScenarioError(
            f"run.main_leg must be 'synchronous' or 'diode', got {main_leg!r}"
        )
    if spp < 8 or spp % 2:
        raise ScenarioError(f"run.steps_per_period must be even and >= 8, got {spp}")
    if decimation < 1 or spp % decimation:
        raise ScenarioError(
            f"run.decimation must divide steps_per_period ({spp}), got {decimation}"
        )

    m_sec = doc.get("measure", {})
    _check_keys(m_sec, {"steady_window"}, "measure")
    steady_window = _require_number(m_sec.get("steady_window", 0.02),
                                    "measure.steady_window")

    # cross-checks
    cmd = ModulationCommand(d=plan.duty_override if plan.duty_override is not None
                            else 0.5,
                            phi=plan.phi_override if plan.phi_override is not None
                            else 0.0)
    report = validate(params, cmd)
    if not report.ok:
        raise ScenarioError("; ".join(report.errors))
    try:
        validate_plan(plan)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    t_period = params.t_period
    # an activation instant beyond the run means passive throughout, so it
    # is excluded from the coverage rule (stepped events are not)
    last_event = max(
        [0.0]
        + [t for t, _ in plan.aux_ref_steps]
        + [t for _, t, _ in plan.load_steps]
    )
    if duration < last_event + TAIL_PERIODS * t_period:
        raise ScenarioError(
            f"run.duration {duration} s must cover the last plan event "
            f"({last_event} s) plus {TAIL_PERIODS} periods of tail"
        )

    return ScenarioConfig(
        name=name,
        params=params,
        op=op,
        plan=plan,
        duration=duration,
        steps_per_period=spp,
        decimation=decimation,
        steady_window=steady_window,
        phi0=phi0,
        phi_max=phi_max,
        duty_limits=(duty_min, duty_max),
        initial=initial,
        main_leg=main_leg,
        dead_time=dead_time,
    )


def bundled_scenario_path(name: str) -> Path:
    """Filesystem path of a scenario file shipped with the package."""
    ref = resources.files("ciboost.data") / f"{name}.scenario"
    with resources.as_file(ref) as path:
        return Path(path)


def control_stack_for(config: ScenarioConfig) -> ControlStack:
    """Design both PI loops for the scenario's parameter set."""
    _, main, _, aux_loop = design_chain(
        config.params, config.op, duty=0.5, phi0=config.phi0
    )
    return ControlStack(
        main=main,
        aux=aux_loop,
        duty_limits=config.duty_limits,
        phi_limits=(0.0, config.phi_max),
    )


def run_scenario(config: ScenarioConfig) -> tuple[Waveform, AnalysisReport]:
    """Execute a scenario and build its standard analysis report."""
    stack = control_stack_for(config)
    wf = run_with_controller(
        config.params,
        stack,
        config.plan,
        config.duration,
        steps_per_period=config.steps_per_period,
        decimation=config.decimation,
        initial=config.initial,
        main_leg=config.main_leg,
        dead_time=config.dead_time,
    )
    report = AnalysisReport(title=f"scenario {config.name}")
    window = (config.duration - config.steady_window, config.duration)
    for ch in ("v_out", "v_aux"):
        report.values[f"{ch} steady mean [V]"] = steady_mean(wf, ch, window)
        try:
            report.ripple_pct[ch] = steady_ripple(wf, ch, window)
        except ValueError:
            pass
    for port in ("input", "main", "aux"):
        report.powers_w[port] = steady_power(wf, port, window)
    for port, t_step, ohms in config.plan.load_steps:
        ch = "v_out" if port == "main" else "v_aux"
        ref = config.plan.main_ref if port == "main" else _aux_ref_at(config.plan, t_step)
        metrics = settle_metrics(wf, ch, ref, t_step, band=0.01 * abs(ref))
        report.settling[f"{ch} after {port} load step to {ohms:g} ohm"] = metrics
    for t_step, value in config.plan.aux_ref_steps:
        metrics = settle_metrics(wf, "v_aux", value, t_step, band=0.01 * abs(value))
        report.settling[f"v_aux after reference step to {value:g} V"] = metrics
    return wf, report


def _aux_ref_at(plan: SupervisorPlan, t: float) -> float:
    ref = plan.aux_ref
    for ts, value in plan.aux_ref_steps:
        if t >= ts:
            ref = value
    return ref
