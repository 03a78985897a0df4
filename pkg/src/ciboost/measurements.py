"""Waveform analysis: ripple, cycle-averaged power, RMS, settling metrics.

Sample-based measurements (:func:`measure_ripple`, :func:`average_power`)
operate on the stored sample grid and are only as sharp as the sampling.
The ``steady_*`` variants read the per-period aggregates the simulator
accumulates on the full integration grid, which is what scenario reports
use for switching-frequency quantities.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .waveforms import Waveform

RIPPLE_MIN_PERIODS = 20
_MEAN_FLOOR = 1e-9

# power channel per port: input from the battery, main load, auxiliary port
_PORT_CHANNELS = {"input": "p_in", "main": "p_main", "aux": "p_aux"}


class UndefinedRippleError(ValueError):
    """Peak-to-peak over mean is meaningless for a near-zero-mean channel."""


def measure_ripple(w: Waveform, channel: str, window: tuple[float, float]) -> float:
    """Ripple percentage 100*(max-min)/mean of a channel over a window.

    The window must span at least RIPPLE_MIN_PERIODS switching periods so a
    representative set of cycles contributes.
    """
    t0, t1 = window
    if t1 - t0 < RIPPLE_MIN_PERIODS * w.t_period:
        raise ValueError(
            f"ripple window must span >= {RIPPLE_MIN_PERIODS} switching "
            f"periods ({RIPPLE_MIN_PERIODS * w.t_period:.3g} s), got {t1 - t0:.3g} s"
        )
    sl = w.window_slice(window)
    series = w.channel(channel)[sl]
    if not len(series):
        raise ValueError(f"window {window} contains no samples")
    mean = float(np.mean(series))
    if abs(mean) < _MEAN_FLOOR or (np.max(series) - np.min(series)) > 100.0 * abs(mean):
        raise UndefinedRippleError(
            f"channel {channel!r} mean {mean:.3g} is too small for a "
            "peak-to-peak/mean ripple figure"
        )
    return 100.0 * float(np.max(series) - np.min(series)) / mean


def steady_ripple(w: Waveform, channel: str, window: tuple[float, float]) -> float:
    """Ripple percentage from the full-rate per-period extrema."""
    sl = w.period_window_slice(window)
    if sl.stop - sl.start < RIPPLE_MIN_PERIODS:
        raise ValueError(
            f"window {window} covers {sl.stop - sl.start} full periods; "
            f">= {RIPPLE_MIN_PERIODS} required"
        )
    hi = float(np.max(w.period_stats[f"{channel}_max"][sl]))
    lo = float(np.min(w.period_stats[f"{channel}_min"][sl]))
    mean = float(np.mean(w.period_stats[f"{channel}_mean"][sl]))
    if abs(mean) < _MEAN_FLOOR or (hi - lo) > 100.0 * abs(mean):
        raise UndefinedRippleError(
            f"channel {channel!r} mean {mean:.3g} is too small for a "
            "peak-to-peak/mean ripple figure"
        )
    return 100.0 * (hi - lo) / mean


def steady_mean(w: Waveform, channel: str, window: tuple[float, float]) -> float:
    sl = w.period_window_slice(window)
    return float(np.mean(w.period_stats[f"{channel}_mean"][sl]))


def steady_rms(w: Waveform, channel: str, window: tuple[float, float]) -> float:
    sl = w.period_window_slice(window)
    return float(math.sqrt(np.mean(w.period_stats[f"{channel}_rms"][sl] ** 2)))


def average_power(w: Waveform, port: str, window: tuple[float, float]) -> float:
    """Mean instantaneous power of a port over an integer number of periods.

    A window that is not an integer period count is rounded to the nearest
    one (with a warning) so the switching-frequency component averages out.
    """
    if port not in _PORT_CHANNELS:
        raise ValueError(f"port must be one of {sorted(_PORT_CHANNELS)}, got {port!r}")
    t0, t1 = window
    n_periods = (t1 - t0) / w.t_period
    n_rounded = max(1, round(n_periods))
    if abs(n_periods - n_rounded) > 1e-9:
        warnings.warn(
            f"power window of {n_periods:.3f} periods rounded to {n_rounded}",
            stacklevel=2,
        )
        t1 = t0 + n_rounded * w.t_period
    sl = w.window_slice((t0, t1))
    series = w.channel(_PORT_CHANNELS[port])[sl]
    if not len(series):
        raise ValueError(f"window {window} contains no samples")
    return float(np.mean(series))


def steady_power(w: Waveform, port: str, window: tuple[float, float]) -> float:
    """Cycle-averaged port power from per-period means (exact per period)."""
    return steady_mean(w, _PORT_CHANNELS[port], window)


@dataclass(frozen=True)
class SettleMetrics:
    """Disturbance response of one channel after a timed event."""

    peak_deviation: float      # max |x - ref| after the event [channel units]
    peak_deviation_rel: float  # relative to ref
    recovery_time: float       # first time after the event staying in band [s]
    settled: bool


def settle_metrics(
    w: Waveform,
    channel: str,
    ref: float,
    event_t: float,
    band: float,
    window_end: float | None = None,
) -> SettleMetrics:
    """Peak deviation and in-band recovery after ``event_t``.

    ``band`` is the absolute tolerance around ``ref``; recovery is the first
    period-boundary time from which the per-period envelope stays inside the
    band through ``window_end`` (default: end of run).
    """
    t0 = w.period_stats["t0"]
    end = window_end if window_end is not None else float(t0[-1]) + w.t_period
    mask = (t0 >= event_t) & (t0 + w.t_period <= end)
    if not np.any(mask):
        raise ValueError(f"no full periods between {event_t} and {end}")
    hi = w.period_stats[f"{channel}_max"][mask]
    lo = w.period_stats[f"{channel}_min"][mask]
    times = t0[mask]
    dev = np.maximum(np.abs(hi - ref), np.abs(lo - ref))
    peak = float(np.max(dev))
    inside = dev <= band
    # last excursion outside the band defines recovery
    outside_idx = np.nonzero(~inside)[0]
    if len(outside_idx) == 0:
        recovery, settled = 0.0, True
    elif outside_idx[-1] == len(inside) - 1:
        recovery, settled = math.inf, False
    else:
        recovery = float(times[outside_idx[-1] + 1] - event_t)
        settled = True
    return SettleMetrics(
        peak_deviation=peak,
        peak_deviation_rel=peak / abs(ref) if ref else math.inf,
        recovery_time=recovery,
        settled=settled,
    )


@dataclass
class AnalysisReport:
    """Accumulated measurements of one run, renderable as plain text."""

    title: str
    ripple_pct: dict[str, float] = field(default_factory=dict)
    powers_w: dict[str, float] = field(default_factory=dict)
    settling: dict[str, SettleMetrics] = field(default_factory=dict)
    values: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    checks: list[tuple[str, bool]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)

    def check(self, label: str, ok: bool) -> bool:
        self.checks.append((label, bool(ok)))
        return bool(ok)

    def render(self) -> str:
        lines = [self.title, "=" * len(self.title)]
        if self.values:
            lines.append("")
            for k, v in self.values.items():
                lines.append(f"{k}: {v:.6g}")
        if self.ripple_pct:
            lines.append("")
            for k, v in self.ripple_pct.items():
                lines.append(f"ripple {k}: {v:.4g} %")
        if self.powers_w:
            lines.append("")
            for k, v in self.powers_w.items():
                lines.append(f"power {k}: {v:.6g} W")
        if self.settling:
            lines.append("")
            for k, s in self.settling.items():
                rec = f"{s.recovery_time:.4g} s" if s.settled else "not settled"
                lines.append(
                    f"settle {k}: peak deviation {s.peak_deviation:.4g} "
                    f"({100 * s.peak_deviation_rel:.3g} %), recovery {rec}"
                )
        if self.notes:
            lines.append("")
            lines.extend(self.notes)
        if self.checks:
            lines.append("")
            for label, ok in self.checks:
                lines.append(f"[{'pass' if ok else 'FAIL'}] {label}")
            lines.append(f"result: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"
