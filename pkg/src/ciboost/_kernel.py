"""JIT-compiled fixed-step integration kernel.

One switching period is ``spp`` integration steps of length ``dt``; switch
edges land on the step grid.  Per step the conduction topology is resolved
from the gate pattern and the current state, then the affine dynamics are
advanced with one Heun (explicit trapezoidal) step.  The per-period control
update (sample-and-hold PI on duty and phase shift, supervisor-driven
references and loads) runs inside the kernel so a full scenario is a single
compiled call.

The bridge polarity pattern is the primary pattern delayed by the phase
shift: +1 for ``d_steps`` starting at ``phi_steps``, -1 for the rest.  Away
from 50% duty this pattern has a nonzero mean, so the leakage loop carries
a DC component limited only by ``r_le``; duty-deviation studies must set a
realistic winding resistance or the ideal loop integrates without bound.

State layout: [i_mag, i_le, v_out, v_aux].
"""

import numpy as np
from numba import njit

SAMPLE_CHANNELS = (
    "i_mag", "i_le", "v_out", "v_aux", "v_p", "v_bridge", "i_bridge",
    "i_c_aux", "i_bat", "p_in", "p_main", "p_aux", "duty", "phi", "mode",
)
STATS_CHANNELS = (
    "i_mag", "i_le", "v_out", "v_aux", "i_bridge", "i_c_aux",
    "p_in", "p_main", "p_aux",
)
STATS_EXTRAS = (
    "duty", "phi", "mode", "r_load", "r_aux",
    "e_main", "u_main", "sat_main", "e_aux", "u_aux", "sat_aux",
)
N_SAMPLE_COLS = len(SAMPLE_CHANNELS)
N_STATS_COLS = 4 * len(STATS_CHANNELS) + len(STATS_EXTRAS)

# primary-leg conduction: main switch on / rectifying path on / winding open
LEG_M1 = 0
LEG_M2 = 1
LEG_OPEN = 2


@njit(cache=True, inline="always")
def _derivs(i_mag, i_le, v_out, v_aux, leg, pol,
            v_bat, n, l_mag, l_e, c_out, c_aux, r_load, r_aux, r_le):
    if leg == LEG_M1:
        v_p = v_bat
        di_mag = v_bat / l_mag
        dv_out = -v_out / (r_load * c_out)
        di_le = (n * v_p - pol * v_aux - r_le * i_le) / l_e if pol != 0.0 else 0.0
    elif leg == LEG_M2:
        v_p = v_bat - v_out
        di_mag = v_p / l_mag
        dv_out = (i_mag + n * i_le - v_out / r_load) / c_out
        di_le = (n * v_p - pol * v_aux - r_le * i_le) / l_e if pol != 0.0 else 0.0
    else:
        # winding open: primary current pinned at zero, so the magnetizing
        # and reflected leakage currents move together
        if pol != 0.0:
            di_le = (-pol * v_aux - r_le * i_le) / (l_e + n * n * l_mag)
        else:
            di_le = 0.0
        di_mag = -n * di_le
        v_p = l_mag * di_mag
        dv_out = -v_out / (r_load * c_out)
    dv_aux = (pol * i_le - v_aux / r_aux) / c_aux
    return di_mag, di_le, dv_out, dv_aux, v_p


@njit(cache=True)
def run_span(
    x, pi_state,
    spp, dt,
    mode_arr, duty_ovr, phi_ovr, main_ref, aux_ref, r_load_arr, r_aux_arr,
    v_bat, n, l_mag, l_e, c_out, c_aux, r_le,
    kp_m, ki_m, kp_a, ki_a, d_min, d_max, phi_min, phi_max,
    sync_main, dead_pri, dead_sec,
    samples, decim, stats,
):
    """Advance ``len(mode_arr)`` switching periods; fill samples and stats.

    Returns -1 on success, else the index of the period where the state
    went non-finite.
    """
    n_periods = mode_arr.shape[0]
    loop_dt = spp * dt
    open_ind = l_e + n * n * l_mag

    i_mag, i_le, v_out, v_aux = x[0], x[1], x[2], x[3]
    integ_m, integ_a = pi_state[0], pi_state[1]
    row = 0

    vals = np.empty(9)
    acc_sum = np.empty(9)
    acc_sq = np.empty(9)
    acc_mn = np.empty(9)
    acc_mx = np.empty(9)

    for p in range(n_periods):
        active = mode_arr[p] > 0.5
        r_load = r_load_arr[p]
        r_aux = r_aux_arr[p]

        # --- per-period control update, sample-and-hold at period start ---
        if not np.isnan(duty_ovr[p]):
            duty = duty_ovr[p]
            e_m = np.nan
            sat_m = 0.0
        else:
            e_m = main_ref[p] - v_out
            u = kp_m * e_m + integ_m
            integ_new = integ_m + ki_m * e_m * loop_dt
            sat_m = 0.0
            if u > d_max:
                u = d_max
                sat_m = 1.0
                if e_m > 0.0:
                    integ_new = integ_m
            elif u < d_min:
                u = d_min
                sat_m = 1.0
                if e_m < 0.0:
                    integ_new = integ_m
            integ_m = integ_new
            duty = u

        if not active:
            # auxiliary loop held reset while passive
            integ_a = 0.0
            phi = 0.0
            e_a = np.nan
            sat_a = 0.0
        elif not np.isnan(phi_ovr[p]):
            phi = phi_ovr[p]
            e_a = np.nan
            sat_a = 0.0
        else:
            e_a = aux_ref[p] - v_aux
            u = kp_a * e_a + integ_a
            integ_new = integ_a + ki_a * e_a * loop_dt
            sat_a = 0.0
            if u > phi_max:
                u = phi_max
                sat_a = 1.0
                if e_a > 0.0:
                    integ_new = integ_a
            elif u < phi_min:
                u = phi_min
                sat_a = 1.0
                if e_a < 0.0:
                    integ_new = integ_a
            integ_a = integ_new
            phi = u

        d_steps = int(duty * spp + 0.5)
        phi_steps = int(phi * spp + 0.5)

        for k in range(9):
            acc_sum[k] = 0.0
            acc_sq[k] = 0.0
            acc_mn[k] = 1e300
            acc_mx[k] = -1e300

        for s in range(spp):
            i_pri = i_mag + n * i_le

            # primary leg
            in_dead_pri = (s < dead_pri) or (d_steps <= s < d_steps + dead_pri)
            if in_dead_pri:
                if i_pri > 0.0:
                    leg = LEG_M2
                elif i_pri < 0.0:
                    leg = LEG_M1
                else:
                    leg = LEG_OPEN
            elif s < d_steps:
                leg = LEG_M1
            elif sync_main:
                leg = LEG_M2
            else:
                if i_pri > 0.0:
                    leg = LEG_M2
                else:
                    pol_g = 1.0 if i_le > 0.0 else (-1.0 if i_le < 0.0 else 0.0)
                    v_p_open = n * l_mag * pol_g * v_aux / open_ind
                    leg = LEG_M2 if v_bat - v_p_open > v_out else LEG_OPEN

            # bridge: commanded polarity in active mode outside dead windows,
            # ideal-diode resolution otherwise
            commanded = False
            bridge_plus = False
            if active:
                ds = s - phi_steps
                if ds < 0:
                    ds += spp
                bridge_plus = ds < d_steps
                in_dead_sec = ds < dead_sec or (d_steps <= ds < d_steps + dead_sec)
                commanded = not in_dead_sec
            if commanded:
                pol = 1.0 if bridge_plus else -1.0
            elif i_le > 0.0:
                pol = 1.0
            elif i_le < 0.0:
                pol = -1.0
            else:
                if leg == LEG_M1:
                    e_sec = n * v_bat
                elif leg == LEG_M2:
                    e_sec = n * (v_bat - v_out)
                else:
                    e_sec = 0.0
                if e_sec > v_aux:
                    pol = 1.0
                elif e_sec < -v_aux:
                    pol = -1.0
                else:
                    pol = 0.0

            d1 = _derivs(i_mag, i_le, v_out, v_aux, leg, pol,
                         v_bat, n, l_mag, l_e, c_out, c_aux, r_load, r_aux, r_le)

            # recorded/aggregated quantities use the pre-step state
            v_p = d1[4]
            i_br = pol * i_le
            i_c = i_br - v_aux / r_aux
            p_in = v_bat * i_pri
            p_main = v_out * v_out / r_load
            p_aux = v_aux * i_br

            if s % decim == 0:
                samples[row, 0] = i_mag
                samples[row, 1] = i_le
                samples[row, 2] = v_out
                samples[row, 3] = v_aux
                samples[row, 4] = v_p
                samples[row, 5] = pol * v_aux
                samples[row, 6] = i_br
                samples[row, 7] = i_c
                samples[row, 8] = i_pri
                samples[row, 9] = p_in
                samples[row, 10] = p_main
                samples[row, 11] = p_aux
                samples[row, 12] = duty
                samples[row, 13] = phi
                samples[row, 14] = mode_arr[p]
                row += 1

            vals[0] = i_mag
            vals[1] = i_le
            vals[2] = v_out
            vals[3] = v_aux
            vals[4] = i_br
            vals[5] = i_c
            vals[6] = p_in
            vals[7] = p_main
            vals[8] = p_aux
            for k in range(9):
                v = vals[k]
                acc_sum[k] += v
                acc_sq[k] += v * v
                if v < acc_mn[k]:
                    acc_mn[k] = v
                if v > acc_mx[k]:
                    acc_mx[k] = v

            # Heun step on the frozen topology
            im1 = i_mag + dt * d1[0]
            il1 = i_le + dt * d1[1]
            vo1 = v_out + dt * d1[2]
            va1 = v_aux + dt * d1[3]
            d2 = _derivs(im1, il1, vo1, va1, leg, pol,
                         v_bat, n, l_mag, l_e, c_out, c_aux, r_load, r_aux, r_le)
            i_mag += 0.5 * dt * (d1[0] + d2[0])
            i_le += 0.5 * dt * (d1[1] + d2[1])
            v_out += 0.5 * dt * (d1[2] + d2[2])
            v_aux += 0.5 * dt * (d1[3] + d2[3])

            # a diode pair cannot carry current through a sign change;
            # land on the boundary and let the next step re-resolve
            if not commanded and pol != 0.0 and i_le * pol < 0.0:
                i_le = 0.0

        for k in range(9):
            stats[p, 4 * k] = acc_sum[k] / spp
            stats[p, 4 * k + 1] = acc_mn[k]
            stats[p, 4 * k + 2] = acc_mx[k]
            stats[p, 4 * k + 3] = np.sqrt(acc_sq[k] / spp)
        base = 4 * 9
        stats[p, base] = duty
        stats[p, base + 1] = phi
        stats[p, base + 2] = mode_arr[p]
        stats[p, base + 3] = r_load
        stats[p, base + 4] = r_aux
        stats[p, base + 5] = e_m
        stats[p, base + 6] = duty
        stats[p, base + 7] = sat_m
        stats[p, base + 8] = e_a
        stats[p, base + 9] = phi
        stats[p, base + 10] = sat_a

        if not (np.isfinite(i_mag) and np.isfinite(i_le)
                and np.isfinite(v_out) and np.isfinite(v_aux)):
            x[0], x[1], x[2], x[3] = i_mag, i_le, v_out, v_aux
            return p

    x[0], x[1], x[2], x[3] = i_mag, i_le, v_out, v_aux
    pi_state[0], pi_state[1] = integ_m, integ_a
    return -1
