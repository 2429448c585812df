"""Asynchronous sampling intervals for a networked loop.

Intervals are drawn i.i.d. uniform on ``[ts_min, ts_max]`` and each step
gets a Bernoulli packet-loss flag.  Both come from NumPy's PCG64 generator;
intervals and loss flags use independent child streams of the same
``SeedSequence`` so changing ``loss_probability`` never changes the timing.
"""

import csv
from dataclasses import dataclass

import numpy as np

__all__ = ["TimingSpec", "TimingTrace", "generate_trace", "write_trace_csv"]


@dataclass(frozen=True)
class TimingSpec:
    ts_min: float = 0.01
    ts_max: float = 0.03
    distribution: str = "uniform"
    seed: int = 0
    loss_probability: float = 0.0

    def __post_init__(self):
        if not self.ts_min > 0:
            raise ValueError(f"ts_min must be positive, got {self.ts_min}")
        if self.ts_max < self.ts_min:
            raise ValueError(f"ts_max ({self.ts_max}) must be >= ts_min ({self.ts_min})")
        if self.distribution != "uniform":
            raise ValueError(f"unsupported distribution {self.distribution!r}")
        if not 0.0 <= self.loss_probability < 1.0:
            raise ValueError(f"loss_probability must be in [0, 1), got {self.loss_probability}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a non-negative 64-bit integer")


@dataclass(frozen=True)
class TimingTrace:
    intervals: tuple
    loss_flags: tuple

    def __len__(self):
        return len(self.intervals)

    @property
    def times(self):
        """Start time of every interval."""
        return np.concatenate([[0.0], np.cumsum(self.intervals)[:-1]])


def generate_trace(spec, duration):
    """Draw intervals until their sum reaches ``duration``."""
    if not duration > 0:
        raise ValueError(f"duration must be positive, got {duration}")
    timing_rng, loss_rng = (np.random.Generator(np.random.PCG64(s))
                            for s in np.random.SeedSequence(int(spec.seed)).spawn(2))
    intervals = []
    total = 0.0
    chunk = max(16, int(duration / (0.5 * (spec.ts_min + spec.ts_max))) + 16)
    while total < duration:
        if spec.ts_min == spec.ts_max:
            draw = np.full(chunk, spec.ts_min)
        else:
            draw = timing_rng.uniform(spec.ts_min, spec.ts_max, chunk)
        for ts in draw:
            intervals.append(float(ts))
            total += ts
            if total >= duration:
                break
    lost = loss_rng.random(len(intervals)) < spec.loss_probability
    return TimingTrace(intervals=tuple(intervals), loss_flags=tuple(bool(x) for x in lost))


def write_trace_csv(trace, path):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "t", "Ts", "lost"])
            for k, (t, ts, lost) in enumerate(zip(trace.times, trace.intervals, trace.loss_flags)):
                w.writerow([k, repr(float(t)), repr(ts), int(lost)])
    except OSError as exc:
        raise OSError(f"cannot write timing trace to {path}: {exc}") from exc
