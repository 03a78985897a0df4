"""Named batch experiments: scripted studies with reports and artifacts.

Each experiment runs deterministic simulations, writes waveform/report
artifacts into its own output directory, and returns an
:class:`ExperimentResult` whose checks decide the process exit code.
Experiment constants (loads, event times, durations) are chosen so every
study reaches steady state within its run; the ``eq32-validation`` study
also prints the rated-versus-computed auxiliary power discrepancy, which
is deliberately reported rather than reconciled.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .control import ControlStack, SupervisorPlan
from .measurements import (
    AnalysisReport,
    settle_metrics,
    steady_mean,
    steady_power,
    steady_ripple,
    steady_rms,
)
from .params import (
    AUX_RATED_PHI,
    AUX_RATED_POWER_W,
    ModulationCommand,
    table2_defaults,
)
from .power_transfer import aux_power, boundary_currents, region_coefficients
from .scenarios import (
    ScenarioConfig,
    bundled_scenario_path,
    control_stack_for,
    load_scenario,
    run_scenario,
)
from .simulator import StateVector, run_open_loop, run_with_controller
from .smallsignal import TABLE2_REFERENCE, bandwidth_separation_report, design_chain, design_report
from .waveforms import Waveform, emit_csv, emit_period_stats_csv

# hardware steady-state ripple figures, reported for reference only; they
# include parasitics this model does not carry and are never pass/fail
REFERENCE_RIPPLE_PCT = {
    "main voltage": 3.125,
    "main current": 5.25,
    "aux voltage": 3.57,
    "aux current": 8.13,
}

EQ32_PHI_GRID = (0.02, 0.05, 0.10, 0.15, 0.20, 0.24)
EQ32_TOLERANCE_PCT = 5.0
EQ32_SMOOTHNESS_FACTOR = 3.0


@dataclass
class ExperimentResult:
    name: str
    passed: bool
    report: AnalysisReport
    artifacts: list[Path]
    metrics: dict


def _out_dir(base, name: str) -> Path:
    path = Path(base) / name
    path.mkdir(parents=True, exist_ok=True)
    return path


def _apply_overrides(config: ScenarioConfig, overrides: dict) -> ScenarioConfig:
    changes = {}
    if overrides.get("duration") is not None:
        changes["duration"] = float(overrides["duration"])
    if overrides.get("dt") is not None:
        spp = int(round(config.params.t_period / float(overrides["dt"])))
        changes["steps_per_period"] = spp
    if overrides.get("decimation") is not None:
        changes["decimation"] = int(overrides["decimation"])
    return dataclasses.replace(config, **changes) if changes else config


def _emit(wf: Waveform, report: AnalysisReport, out: Path, stem: str,
          decimation: int = 1) -> list[Path]:
    paths = [out / f"{stem}.csv", out / f"{stem}_periods.csv", out / "report.txt"]
    emit_csv(wf, paths[0], decimation=decimation)
    emit_period_stats_csv(wf, paths[1])
    paths[2].write_text(report.render())
    return paths


def _periods_mean(wf: Waveform, key: str, window) -> float:
    sl = wf.period_window_slice(window)
    return float(np.mean(wf.period_stats[key][sl]))


# --------------------------------------------------------------------------
# individual experiments


def run_fig3(out_dir, overrides) -> ExperimentResult:
    """Open-loop nominal operation: waveforms against the four-region model."""
    config = _apply_overrides(load_scenario(bundled_scenario_path("fig3")), overrides)
    wf, report = run_scenario(config)
    report.title = "fig3-openloop: open-loop operation at the nominal point"

    params, op = config.params, config.op
    cmd = ModulationCommand(d=0.5, phi=0.15)
    spp = config.steps_per_period
    fine = run_open_loop(
        params, cmd, "active", duration=2 * params.t_period,
        steps_per_period=spp, decimation=1, r_aux=config.plan.aux_load,
        initial=wf.final_state, t_offset=config.duration,
    )
    i_le = fine.channels["i_le"][:spp]

    coeffs = region_coefficients(params, op)
    bounds = [0, int(0.15 * spp), spp // 2, int(0.65 * spp), spp]
    expected = coeffs.region_slopes
    margin = max(2, spp // 100)
    slope_errs = []
    for k in range(4):
        lo, hi = bounds[k] + margin, bounds[k + 1] - margin
        t_seg = np.arange(lo, hi) * fine.dt
        slope = np.polyfit(t_seg, i_le[lo:hi], 1)[0]
        err = abs(slope - expected[k]) / abs(expected[k])
        slope_errs.append(err)
        report.values[f"region {k + 1} slope [A/s]"] = slope
        report.check(f"region {k + 1} slope within 1% of closed form", err <= 0.01)

    half = spp // 2
    sym = float(np.max(np.abs(i_le[:half] + i_le[half:2 * half])) / np.max(np.abs(i_le)))
    report.values["half-wave symmetry residual [fraction of peak]"] = sym
    report.check("half-wave symmetry within 1% of peak", sym <= 0.01)

    window = (config.duration - config.steady_window, config.duration)
    v_out = steady_mean(wf, "v_out", window)
    report.values["v_out steady mean [V]"] = v_out
    report.check("v_out within 2% of the ideal conversion ratio (80 V)",
                 abs(v_out - 80.0) <= 0.02 * 80.0)

    p_sim = steady_power(wf, "aux", window)
    p_ana = aux_power(params, cmd, op)
    report.powers_w["aux (simulated)"] = p_sim
    report.powers_w["aux (closed form)"] = p_ana
    report.check("auxiliary power within 5% of the closed form",
                 abs(p_sim - p_ana) <= 0.05 * p_ana)

    artifacts = _emit(fine, report, _out_dir(out_dir, "fig3-openloop"), "waveform")
    metrics = {"slope_errs": slope_errs, "symmetry": sym, "p_sim": p_sim,
               "p_ana": p_ana, "v_out": v_out, "waveform": wf, "fine": fine}
    return ExperimentResult("fig3-openloop", report.passed, report, artifacts, metrics)


def _forced_duty_run(config: ScenarioConfig, duty: float):
    stack = control_stack_for(config)
    plan = dataclasses.replace(config.plan, duty_override=duty)
    initial = dataclasses.replace(
        config.initial if config.initial is not None
        else StateVector(0.0, 0.0, config.params.v_bat, 0.0),
        v_out=config.params.v_bat / (1.0 - duty),
    )
    return run_with_controller(
        config.params, stack, plan, config.duration,
        steps_per_period=config.steps_per_period, decimation=config.decimation,
        initial=initial, initial_pi=(0.0, 0.1),
    )


def run_fig4(out_dir, overrides) -> ExperimentResult:
    """Duty-deviation study: auxiliary stress at 0.50 vs 0.53 vs 0.47 duty."""
    config = _apply_overrides(load_scenario(bundled_scenario_path("fig4")), overrides)
    report = AnalysisReport(title="fig4-dutysweep: duty deviation vs auxiliary stress")
    out = _out_dir(out_dir, "fig4-dutysweep")
    window = (config.duration - config.steady_window, config.duration)

    rows = {}
    artifacts = []
    for duty in (0.50, 0.53, 0.47):
        wf = _forced_duty_run(config, duty)
        rows[duty] = {
            "ripple": steady_ripple(wf, "v_aux", window),
            "rms": steady_rms(wf, "i_c_aux", window),
            "phi": _periods_mean(wf, "phi", window),
            "v_aux": steady_mean(wf, "v_aux", window),
            "v_out": steady_mean(wf, "v_out", window),
        }
        path = out / f"periods_d{duty:.2f}.csv"
        emit_period_stats_csv(wf, path)
        artifacts.append(path)
        for key, value in rows[duty].items():
            report.values[f"d={duty:.2f} {key}"] = value

    r50, r53, r47 = rows[0.50], rows[0.53], rows[0.47]
    report.check("aux voltage ripple at d=0.53 exceeds d=0.50",
                 r53["ripple"] > r50["ripple"])
    report.check("aux voltage ripple at d=0.47 exceeds d=0.50",
                 r47["ripple"] > r50["ripple"])
    report.check("aux capacitor RMS current at d=0.53 exceeds d=0.50",
                 r53["rms"] > r50["rms"])
    report.check("aux capacitor RMS current at d=0.47 exceeds d=0.50",
                 r47["rms"] > r50["rms"])
    report.check("effective phase shift at d=0.53 closer to the 0.25 limit",
                 abs(0.25 - r53["phi"]) < abs(0.25 - r50["phi"]))
    report.notes.append(
        "hardware reference ripple figures (not reproduced at this model's "
        "fidelity, reference only): "
        + ", ".join(f"{k} {v}%" for k, v in REFERENCE_RIPPLE_PCT.items())
    )
    report_path = out / "report.txt"
    report_path.write_text(report.render())
    artifacts.append(report_path)
    return ExperimentResult("fig4-dutysweep", report.passed, report, artifacts,
                            {"rows": rows})


def run_fig7(out_dir, overrides) -> ExperimentResult:
    """Closed-loop run with the published auxiliary load step (15 to 8 ohm).

    The auxiliary branch of this scenario demands more power at 15 V than
    the phase-shift mechanism can deliver with these parameters (see the
    eq32-validation report), so the auxiliary checks fail by construction;
    they are asserted as published rather than weakened.
    """
    config = _apply_overrides(load_scenario(bundled_scenario_path("fig7")), overrides)
    wf, report = run_scenario(config)
    report.title = "fig7-loadstep: closed-loop regulation with auxiliary load step"
    step_t = config.plan.load_steps[0][1]

    pre = (step_t - config.steady_window, step_t)
    v_out_pre = steady_mean(wf, "v_out", pre)
    v_aux_pre = steady_mean(wf, "v_aux", pre)
    report.values["v_out before step [V]"] = v_out_pre
    report.values["v_aux before step [V]"] = v_aux_pre
    report.check("v_out settles to 80 V within 1% before the step",
                 abs(v_out_pre - 80.0) <= 0.8)
    report.check("v_aux settles to 15 V within 1% before the step",
                 abs(v_aux_pre - 15.0) <= 0.15)

    aux_rec = settle_metrics(wf, "v_aux", 15.0, step_t, band=0.15)
    report.settling["v_aux after the load step"] = aux_rec
    report.check("v_aux recovers to 15 V within 1% after the step",
                 aux_rec.settled and aux_rec.recovery_time < np.inf)
    out_exc = settle_metrics(wf, "v_out", 80.0, step_t, band=4.0)
    report.settling["v_out during the load step"] = out_exc
    report.check("v_out excursion stays within 5% of 80 V",
                 out_exc.peak_deviation <= 4.0)

    p_max = aux_power(config.params, ModulationCommand(d=0.5, phi=0.25), config.op)
    report.notes.append(
        f"auxiliary feasibility: the 15 ohm load at 15 V draws 15 W and the "
        f"8 ohm load 28.1 W, but the phase-shift transfer peaks at "
        f"{p_max:.3f} W for a 15 V auxiliary rail with this parameter set; "
        f"the loop saturates at the 0.25 p.u. limit and the rail settles "
        f"near the power-balance point instead of the reference."
    )
    artifacts = _emit(wf, report, _out_dir(out_dir, "fig7-loadstep"), "waveform")
    metrics = {"v_out_pre": v_out_pre, "v_aux_pre": v_aux_pre, "waveform": wf}
    return ExperimentResult("fig7-loadstep", report.passed, report, artifacts, metrics)


def run_fig10(out_dir, overrides) -> ExperimentResult:
    """Passive rectification baseline: natural auxiliary plateau."""
    config = _apply_overrides(load_scenario(bundled_scenario_path("fig10")), overrides)
    wf, report = run_scenario(config)
    report.title = "fig10-passive: passive rectification baseline"
    window = (config.duration - config.steady_window, config.duration)
    plateau = steady_mean(wf, "v_aux", window)
    v_out = steady_mean(wf, "v_out", window)
    min_bridge = float(np.min(wf.period_stats["i_bridge_min"]))
    report.values["passive auxiliary plateau [V]"] = plateau
    report.values["v_out steady mean [V]"] = v_out
    report.values["min bridge current [A]"] = min_bridge
    report.check("plateau is strictly positive", plateau > 0.0)
    report.check("plateau sits strictly below the active-mode setpoint",
                 plateau < config.plan.aux_ref)
    report.check("v_out within 2% of 80 V", abs(v_out - 80.0) <= 1.6)
    report.check("bridge diode current never negative", min_bridge >= 0.0)
    artifacts = _emit(wf, report, _out_dir(out_dir, "fig10-passive"), "waveform")
    return ExperimentResult("fig10-passive", report.passed, report, artifacts,
                            {"plateau": plateau, "waveform": wf})


def run_fig11(out_dir, overrides) -> ExperimentResult:
    """Activation sequence: passive plateau, active tracking, reference step."""
    config = _apply_overrides(load_scenario(bundled_scenario_path("fig11")), overrides)
    wf, report = run_scenario(config)
    report.title = "fig11-activation: passive start, activation, reference step"
    enable_t = config.plan.enable_active_at
    step_t, step_v = config.plan.aux_ref_steps[0]

    plateau = steady_mean(wf, "v_aux", (enable_t - config.steady_window, enable_t))
    report.values["passive plateau [V]"] = plateau
    report.check("passive plateau below the first reference",
                 0.0 < plateau < config.plan.aux_ref)

    before_step = steady_mean(wf, "v_aux", (step_t - config.steady_window, step_t))
    report.values["v_aux before reference step [V]"] = before_step
    report.check("tracks the first reference within 1%",
                 abs(before_step - config.plan.aux_ref) <= 0.01 * config.plan.aux_ref)

    final = steady_mean(wf, "v_aux",
                        (config.duration - config.steady_window, config.duration))
    report.values["v_aux final [V]"] = final
    report.check("tracks the stepped reference within 1% (zero steady-state error)",
                 abs(final - step_v) <= 0.01 * step_v)

    ps = wf.period_stats
    i_step = int(np.searchsorted(ps["t0"], step_t))
    overshoot = float(np.max(ps["v_aux_max"][i_step:])) - step_v
    report.values["overshoot after the reference step [V]"] = overshoot
    report.check("no windup overshoot after the step (< 5% of the reference)",
                 overshoot <= 0.05 * step_v)
    i_final = int(np.searchsorted(ps["t0"], config.duration - config.steady_window))
    report.check("phase-shift clamp released in steady state",
                 not ps["sat_aux"][i_final:].any())
    artifacts = _emit(wf, report, _out_dir(out_dir, "fig11-activation"), "waveform")
    metrics = {"plateau": plateau, "final": final, "overshoot": overshoot,
               "waveform": wf}
    return ExperimentResult("fig11-activation", report.passed, report, artifacts,
                            metrics)


# shared operating point for the cross-coupling pair: both loops regulating
# comfortably inside the feasible region (see eq32-validation), equal -50%
# resistance steps on either port
_XC_MAIN_LOAD = 80.0
_XC_AUX_LOAD = 90.0
_XC_STEP_T = 0.5
# the auxiliary loop's dominant closed-loop pole sits a few rad/s above its
# PI zero, so 1%-band recovery after a load step needs the better part of a
# second of tail
_XC_DURATION = 1.6


def _cross_coupling_run(step_port: str, overrides) -> tuple[Waveform, SupervisorPlan]:
    params, _, op = table2_defaults()
    params = dataclasses.replace(params, r_le=0.05)
    _, main, _, aux = design_chain(params, op)
    stack = ControlStack(main=main, aux=aux)
    steps = (("main", _XC_STEP_T, _XC_MAIN_LOAD / 2.0),) if step_port == "main" \
        else (("aux", _XC_STEP_T, _XC_AUX_LOAD / 2.0),)
    plan = SupervisorPlan(
        main_ref=80.0, aux_ref=15.0,
        main_load=_XC_MAIN_LOAD, aux_load=_XC_AUX_LOAD, load_steps=steps,
    )
    # warm start at the pre-step operating point
    p_in = 80.0**2 / _XC_MAIN_LOAD + 15.0**2 / _XC_AUX_LOAD
    initial = StateVector(i_mag=p_in / 40.0, i_le=0.0, v_out=80.0, v_aux=15.0)
    duration = float(overrides.get("duration") or _XC_DURATION)
    wf = run_with_controller(
        params, stack, plan, duration,
        decimation=int(overrides.get("decimation") or 2000),
        initial=initial, initial_pi=(0.5, 0.0652),
    )
    return wf, plan


def run_fig12(out_dir, overrides) -> ExperimentResult:
    """Main-port load step: disturbance it causes on the auxiliary rail."""
    wf, plan = _cross_coupling_run("main", overrides)
    report = AnalysisReport(title="fig12-mainstep: main load step, auxiliary response")
    aux_dev = settle_metrics(wf, "v_aux", 15.0, _XC_STEP_T, band=0.15)
    out_rec = settle_metrics(wf, "v_out", 80.0, _XC_STEP_T, band=0.8)
    report.settling["v_aux during the main load step"] = aux_dev
    report.settling["v_out after its own load step"] = out_rec
    report.values["v_aux relative deviation"] = aux_dev.peak_deviation_rel
    report.check("main output recovers to 1% after its load step", out_rec.settled)
    report.check("auxiliary rail recovers to 1%", aux_dev.settled)
    artifacts = _emit(wf, report, _out_dir(out_dir, "fig12-mainstep"), "waveform")
    return ExperimentResult("fig12-mainstep", report.passed, report, artifacts,
                            {"aux_rel_dev": aux_dev.peak_deviation_rel, "waveform": wf})


def run_fig13(out_dir, overrides) -> ExperimentResult:
    """Auxiliary-port load step: disturbance it causes on the main rail."""
    wf, plan = _cross_coupling_run("aux", overrides)
    report = AnalysisReport(title="fig13-auxstep: auxiliary load step, main response")
    out_dev = settle_metrics(wf, "v_out", 80.0, _XC_STEP_T, band=0.8)
    aux_rec = settle_metrics(wf, "v_aux", 15.0, _XC_STEP_T, band=0.15)
    report.settling["v_out during the auxiliary load step"] = out_dev
    report.settling["v_aux after its own load step"] = aux_rec
    report.values["v_out relative deviation"] = out_dev.peak_deviation_rel
    report.check("auxiliary rail recovers to 1% after its load step", aux_rec.settled)
    report.check("main rail stays within 2% during the auxiliary step",
                 out_dev.peak_deviation <= 1.6)
    artifacts = _emit(wf, report, _out_dir(out_dir, "fig13-auxstep"), "waveform")
    return ExperimentResult("fig13-auxstep", report.passed, report, artifacts,
                            {"out_rel_dev": out_dev.peak_deviation_rel, "waveform": wf})


def run_eq32(out_dir, overrides) -> ExperimentResult:
    """Cross-validate the closed-form auxiliary power against simulation.

    Runs the stiff-rail configuration over the phase-shift grid, tabulates
    formula vs simulation, and reports the rated-power discrepancy: the
    design table rates the auxiliary port for 30 W at 0.15 p.u. phase
    shift, while both the closed form and the simulator put the transfer
    near 4.4 W there.  The numbers are printed side by side; nothing is
    rescaled to hide the gap.
    """
    base = _apply_overrides(load_scenario(bundled_scenario_path("eq32")), overrides)
    params_ideal, _, op = table2_defaults()
    report = AnalysisReport(title="eq32-validation: closed-form power vs simulation")
    out = _out_dir(out_dir, "eq32-validation")

    rows = []
    for phi in EQ32_PHI_GRID:
        cmd = ModulationCommand(d=0.5, phi=phi)
        p_ana = aux_power(params_ideal, cmd, op)
        i_mag0 = (80.0**2 / 40.0 + p_ana) / 40.0
        wf = run_open_loop(
            base.params, cmd, "active", duration=base.duration,
            steps_per_period=base.steps_per_period, decimation=base.decimation,
            r_aux=base.plan.aux_load,
            initial=StateVector(i_mag0, 0.0, 80.0, 15.0),
        )
        window = (base.duration - 20 * base.params.t_period, base.duration)
        p_sim = steady_power(wf, "aux", window)
        err_pct = 100.0 * abs(p_sim - p_ana) / p_ana
        rows.append((phi, p_ana, p_sim, err_pct))
        report.values[f"phi={phi:.2f}: err %"] = err_pct

    errs = np.array([r[3] for r in rows])
    for phi, p_ana, p_sim, err_pct in rows:
        report.check(
            f"phi={phi:.2f}: simulation within {EQ32_TOLERANCE_PCT:.0f}% "
            f"(formula {p_ana:.4f} W, simulated {p_sim:.4f} W)",
            err_pct <= EQ32_TOLERANCE_PCT,
        )
    median_err = float(np.median(errs))
    report.check(
        f"error is smooth over the grid (max {errs.max():.3f}% <= "
        f"{EQ32_SMOOTHNESS_FACTOR:.0f}x median {median_err:.3f}%)",
        errs.max() <= EQ32_SMOOTHNESS_FACTOR * max(median_err, 1e-12),
    )

    cmd_rated = ModulationCommand(d=0.5, phi=AUX_RATED_PHI)
    p_rated_formula = aux_power(params_ideal, cmd_rated, op)
    p_rated_sim = next(r[2] for r in rows if abs(r[0] - AUX_RATED_PHI) < 1e-12)
    report.notes.append(
        f"DISCREPANCY: the design table rates the auxiliary port at "
        f"{AUX_RATED_POWER_W:.0f} W with a maximum phase shift of "
        f"{AUX_RATED_PHI} p.u., but the closed form gives "
        f"{p_rated_formula:.3f} W at that phase shift and the simulator "
        f"measures {p_rated_sim:.3f} W.  The inconsistency is inherent to "
        f"the published parameter set; no parameter was rescaled to force "
        f"agreement."
    )

    table_path = out / "eq32_table.csv"
    lines = ["phi,p_formula_w,p_simulated_w,error_pct"]
    lines += [f"{phi:.2f},{pa:.6f},{ps:.6f},{e:.4f}" for phi, pa, ps, e in rows]
    table_path.write_text("\n".join(lines) + "\n")
    report_path = out / "report.txt"
    report_path.write_text(report.render())
    return ExperimentResult("eq32-validation", report.passed, report,
                            [table_path, report_path],
                            {"rows": rows, "p_rated_formula": p_rated_formula,
                             "p_rated_sim": p_rated_sim})


def run_table2_design(out_dir, overrides) -> ExperimentResult:
    """Regression of the full design chain against the reference constants."""
    params, _, op = table2_defaults()
    plant, main, aux, aux_loop = design_chain(params, op)
    report = AnalysisReport(title="table2-design: design-chain regression")
    ref = TABLE2_REFERENCE

    def within(name, value, target, rel):
        report.values[name] = value
        report.check(f"{name} within {100 * rel:g}% of {target:g}",
                     abs(value - target) <= rel * abs(target))

    within("omega_rhp [rad/s]", plant.omega_rhp, ref["omega_rhp"], 0.02)
    within("omega_n [rad/s]", plant.omega_n, ref["omega_n"], 0.02)
    report.values["main dc gain [V]"] = plant.dc_gain
    report.check("main dc gain exactly 160 V", plant.dc_gain == 160.0)
    within("omega_c_main [rad/s]", main.omega_c, ref["omega_c_main"], 0.02)
    report.check("omega_c_aux = omega_c_main / 10 exactly",
                 aux_loop.omega_c == main.omega_c / 10.0)
    report.check("PI zeros one decade below crossover exactly",
                 main.omega_z == main.omega_c / 10.0
                 and aux_loop.omega_z == aux_loop.omega_c / 10.0)
    report.values["aux dc gain [V/p.u.]"] = aux.dc_gain
    report.check("aux dc gain equals 8.333 to 4 significant figures",
                 abs(aux.dc_gain - 8.333) < 5e-4)
    report.check("gain-pair identity ki = kp * omega_z (1e-12 relative)",
                 abs(main.ki - main.kp * main.omega_z) <= 1e-12 * main.ki
                 and abs(aux_loop.ki - aux_loop.kp * aux_loop.omega_z)
                 <= 1e-12 * aux_loop.ki)
    within("kp_main", main.kp, ref["kp_main"], 0.15)
    within("kp_aux", aux_loop.kp, ref["kp_aux"], 0.15)
    sep = bandwidth_separation_report(main, aux_loop)
    report.values["bandwidth separation"] = sep.ratio
    report.check("bandwidth separation 10x within 5%", sep.ok)

    out = _out_dir(out_dir, "table2-design")
    report_path = out / "report.txt"
    design_path = out / "design_report.csv"
    design_path.write_text(design_report(params, op, reference=ref))
    report_path.write_text(report.render())
    return ExperimentResult("table2-design", report.passed, report,
                            [design_path, report_path],
                            {"plant": plant, "main": main, "aux": aux,
                             "aux_loop": aux_loop})


EXPERIMENTS = {
    "fig3-openloop": run_fig3,
    "fig4-dutysweep": run_fig4,
    "fig7-loadstep": run_fig7,
    "fig10-passive": run_fig10,
    "fig11-activation": run_fig11,
    "fig12-mainstep": run_fig12,
    "fig13-auxstep": run_fig13,
    "eq32-validation": run_eq32,
    "table2-design": run_table2_design,
}


def run_experiment(name: str, out_dir=".", **overrides) -> ExperimentResult:
    """Run one named experiment; artifacts land in ``out_dir/<name>/``."""
    try:
        runner = EXPERIMENTS[name]
    except KeyError:
        raise ValueError(
            f"unknown experiment {name!r}; available: {sorted(EXPERIMENTS)}"
        ) from None
    return runner(out_dir, overrides)
