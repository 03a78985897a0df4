"""Waveform containers and CSV export.

A simulation run produces uniformly sampled channel series plus exact
per-period aggregates (mean/min/max/rms on the integration grid).  The
aggregates exist because meaningful ripple and power measurements need
full-rate data, which is rarely worth storing for runs that span tens of
thousands of switching periods.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Waveform:
    """Sampled simulation output.

    ``channels`` maps channel names to arrays aligned with ``t``.
    ``period_stats`` maps keys like ``"v_aux_mean"``/``"i_le_max"`` (plus the
    applied ``duty``/``phi``/``mode``, runtime loads, and controller
    telemetry) to per-switching-period arrays; ``"t0"`` holds each period's
    start time.
    """

    t: np.ndarray
    channels: dict[str, np.ndarray]
    f_sw: float
    dt: float
    sample_period: float
    period_stats: dict[str, np.ndarray] = field(default_factory=dict)
    final_state: object = None       # StateVector at the end of the run
    final_pi: tuple = (0.0, 0.0)     # PI integrators, for continuation runs

    @property
    def t_period(self) -> float:
        return 1.0 / self.f_sw

    @property
    def duration(self) -> float:
        return float(self.t[-1]) + self.sample_period if len(self.t) else 0.0

    def channel(self, name: str) -> np.ndarray:
        try:
            return self.channels[name]
        except KeyError:
            raise KeyError(
                f"unknown channel {name!r}; available: {sorted(self.channels)}"
            ) from None

    def window_slice(self, window: tuple[float, float]) -> slice:
        """Index slice of samples with t in [window[0], window[1])."""
        t0, t1 = window
        i0, i1 = np.searchsorted(self.t, [t0, t1])
        return slice(int(i0), int(i1))

    def period_window_slice(self, window: tuple[float, float]) -> slice:
        """Index slice of periods fully contained in [window[0], window[1])."""
        t0 = self.period_stats["t0"]
        i0 = int(np.searchsorted(t0, window[0]))
        i1 = int(np.searchsorted(t0, window[1] - self.t_period, side="right"))
        return slice(i0, i1)


def emit_csv(waveform: Waveform, path, decimation: int = 1) -> None:
    """Write sampled channels as CSV: header ``t,<channel>...``, SI units.

    Values are written at full float precision (round-trip exact).  With
    decimation > 1 every ``decimation``-th sample is kept; the first sample
    is always kept and the final kept row is replaced by the last sample so
    both endpoints survive.
    """
    if decimation < 1:
        raise ValueError(f"decimation must be >= 1, got {decimation}")
    names = sorted(waveform.channels)
    n = len(waveform.t)
    idx = np.arange(0, n, decimation)
    if len(idx) and idx[-1] != n - 1:
        idx[-1] = n - 1
    data = np.column_stack(
        [waveform.t[idx]] + [waveform.channels[name][idx] for name in names]
    )
    header = ",".join(["t"] + names)
    np.savetxt(path, data, delimiter=",", fmt="%.17g", header=header, comments="")


def emit_period_stats_csv(waveform: Waveform, path) -> None:
    """Write the per-period aggregates (incl. controller telemetry) as CSV."""
    stats = waveform.period_stats
    if not stats:
        raise ValueError("waveform carries no period statistics")
    names = ["t0"] + sorted(k for k in stats if k != "t0")
    data = np.column_stack([stats[name] for name in names])
    np.savetxt(path, data, delimiter=",", fmt="%.17g",
               header=",".join(names), comments="")
