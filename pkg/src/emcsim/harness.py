"""Closed-loop scenario runner, metrics and CSV output.

A scenario wires the timing trace, one controller (EMC or PI) and the truth
plant into a lockstep loop.  At the start of interval ``k`` the encoder
speed over the previous interval is measured, the controller computes the
command for interval ``k`` and the plant is propagated over ``Ts_k`` with
that command held.  A lost packet drops both directions for the step: the
controller reuses its last measurement and the plant keeps the last
delivered voltage.
"""

import csv
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import baseline_pi, emc, netmodel, plant
from .netmodel import TimingSpec
from .plant import DisturbanceProfile, PlantParams

__all__ = [
    "EmcConfig",
    "PiConfig",
    "Scenario",
    "SampleRecord",
    "Metrics",
    "ConfigError",
    "reference_value",
    "run_scenario",
    "compute_metrics",
    "write_csv",
    "write_metrics_csv",
    "run_pair",
    "timing_family",
]


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the field."""


@dataclass(frozen=True)
class EmcConfig:
    spec: emc.ContinuousEigenSpec = emc.DEFAULT_SPEC
    options: emc.EmcOptions = emc.EmcOptions()
    kind = "emc"


@dataclass(frozen=True)
class PiConfig:
    params: baseline_pi.PiParams = baseline_pi.DEFAULT_PI
    # pole of the first-order reference shaper, same role as mu_R for EMC
    shaper_mu: float = emc.DEFAULT_SPEC.mu_R
    kind = "pi"


@dataclass(frozen=True)
class Scenario:
    name: str
    duration: float
    timing: TimingSpec = TimingSpec()
    controller: object = EmcConfig()
    plant: PlantParams = PlantParams()
    disturbance: DisturbanceProfile = DisturbanceProfile()
    reference: tuple = ((0.0, 0.0),)
    output_path: str = ""
    metrics_window_start: float = 0.0

    def __post_init__(self):
        if not self.duration > 0:
            raise ConfigError(f"scenario.duration: must be positive, got {self.duration}")
        ref = tuple((float(t), float(r)) for t, r in self.reference)
        object.__setattr__(self, "reference", ref)
        if not ref or ref[0][0] != 0.0:
            raise ConfigError("reference.schedule: must start at time 0")
        if any(b[0] <= a[0] for a, b in zip(ref, ref[1:])):
            raise ConfigError("reference.schedule: times must be strictly increasing")
        if not 0 <= self.metrics_window_start < self.duration:
            raise ConfigError("scenario.metrics_window_start: must lie in [0, duration)")


@dataclass(frozen=True)
class SampleRecord:
    k: int
    t: float
    ts: float
    r_bar: float
    y_ref: float
    y_true: float
    y_meas: float
    y_m: float
    e_m: float
    e_bar: float
    u: float
    u_trk: float
    u_d: float
    u_ff: float
    x_d1: float
    x_d2: float
    lost: bool


@dataclass(frozen=True)
class Metrics:
    """Signal statistics over ``t >= window_start``.

    Model-error entries are NaN for controllers without an internal model.
    ``settling_time`` is the worst case over reference changes and is
    infinite if some change never settles.
    """

    rmse_tracking: float
    rms_model_error: float
    max_abs_model_error: float
    settling_time: float
    window_start: float
    window_end: float
    n_samples: int
    rms_u_trk: float = field(default=math.nan)


def reference_value(schedule, t):
    value = schedule[0][1]
    for t0, r in schedule:
        if t0 <= t:
            value = r
        else:
            break
    return value


def _nan():
    return math.nan


def run_scenario(sc, trace=None):
    """Simulate ``sc``; returns ``(records, metrics)``."""
    if trace is None:
        trace = netmodel.generate_trace(sc.timing, sc.duration)
    p = sc.plant
    ctrl = sc.controller
    if ctrl.kind == "emc":
        c_state = emc.EmcState()
    elif ctrl.kind == "pi":
        c_state = baseline_pi.PiState()
        pi_params = baseline_pi.PiParams(ctrl.params.k_p_pi, ctrl.params.k_i_pi, p.v_max)
        shaped = 0.0
    else:
        raise ConfigError(f"controller.type: unknown controller {ctrl.kind!r}")

    records = []
    p_state = plant.PlantState()
    p_prev = p_state
    t = 0.0
    ts_prev = None
    y_meas = 0.0
    v_applied = 0.0
    for k, (ts, lost) in enumerate(zip(trace.intervals, trace.loss_flags)):
        if t >= sc.duration:
            break
        if ts_prev is not None and not lost:
            y_meas = plant.measure_speed(p_prev, p_state, p, ts_prev)
        r_bar = reference_value(sc.reference, t)

        if ctrl.kind == "emc":
            c_state, u, tel = emc.emc_step(c_state, p, ctrl.spec, ts, r_bar, y_meas, ctrl.options)
        else:
            y_ref = shaped
            c_state, u = baseline_pi.pi_step(c_state, pi_params, y_ref, y_meas, ts)
            lam = math.exp(ctrl.shaper_mu * ts)
            shaped = lam * shaped + (1.0 - lam) * r_bar
            tel = dict(y_ref=y_ref, y_m=_nan(), e_m=_nan(), e_bar=y_ref - y_meas, u=u,
                       u_trk=u, u_d=0.0, u_ff=0.0, x_d1=_nan(), x_d2=_nan())

        records.append(SampleRecord(
            k=k, t=t, ts=ts, r_bar=r_bar, y_ref=tel["y_ref"], y_true=p_state.omega,
            y_meas=y_meas, y_m=tel["y_m"], e_m=tel["e_m"], e_bar=tel["e_bar"], u=u,
            u_trk=tel["u_trk"], u_d=tel["u_d"], u_ff=tel["u_ff"], x_d1=tel["x_d1"],
            x_d2=tel["x_d2"], lost=bool(lost),
        ))

        if not lost:
            v_applied = u
        p_prev = p_state
        p_state = plant.plant_step(p_state, p, v_applied, sc.disturbance, t, ts)
        ts_prev = ts
        t += ts

    resolution = plant.encoder_resolution(p, sc.timing.ts_min)
    return records, compute_metrics(records, sc.metrics_window_start, resolution)


def _settling_time(t, err, r_bar, resolution, hold=0.5):
    changes = [0] + [i for i in range(1, len(r_bar)) if r_bar[i] != r_bar[i - 1]]
    bounds = changes[1:] + [len(t)]
    worst = 0.0
    for start, stop in zip(changes, bounds):
        ok = np.abs(err[start:stop]) < resolution
        settled = math.inf
        for i in range(start, stop):
            if t[i] + hold > t[stop - 1]:
                break
            j = np.searchsorted(t[start:stop], t[i] + hold, side="right") + start
            if ok[i - start:j - start].all():
                settled = t[i] - t[start]
                break
        worst = max(worst, settled)
    return worst


def compute_metrics(records, window_start=0.0, resolution=2.0 * math.pi / 720 / 0.01):
    """Per-sample (not time-weighted) statistics of a run.

    ``resolution`` is the speed band used for the settling criterion,
    one encoder count over the shortest sampling interval by default.
    """
    if not records:
        raise ValueError("no records to evaluate")
    t = np.array([r.t for r in records])
    sel = t >= window_start
    if not sel.any():
        raise ValueError(f"empty metrics window: no samples at t >= {window_start}")
    y_ref = np.array([r.y_ref for r in records])
    y = np.array([r.y_true for r in records])
    e_m = np.array([r.e_m for r in records])[sel]
    u_trk = np.array([r.u_trk for r in records])[sel]
    r_bar = np.array([r.r_bar for r in records])
    err = y_ref - y
    has_model = not np.isnan(e_m).all()
    return Metrics(
        rmse_tracking=float(np.sqrt(np.mean(err[sel] ** 2))),
        rms_model_error=float(np.sqrt(np.mean(e_m ** 2))) if has_model else math.nan,
        max_abs_model_error=float(np.max(np.abs(e_m))) if has_model else math.nan,
        settling_time=_settling_time(t, err, r_bar, resolution),
        window_start=float(window_start),
        window_end=float(t[sel][-1]),
        n_samples=int(sel.sum()),
        rms_u_trk=float(np.sqrt(np.mean(u_trk ** 2))),
    )


def _fmt(v):
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (complex, np.complexfloating)):
        raise TypeError("complex values must be split into columns before writing")
    return repr(float(v))


def write_csv(rows, path):
    """Write dataclass rows (or a report with ``.rows()``) as CSV.

    Floats are written with ``repr`` so values round-trip exactly and
    identical inputs give byte-identical files.
    """
    if hasattr(rows, "rows"):
        header, body = rows.rows()
    else:
        rows = list(rows)
        if not rows:
            raise ValueError("nothing to write")
        header = [f.name for f in fields(rows[0])]
        body = [[getattr(r, h) for h in header] for r in rows]
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in body:
                w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def write_metrics_csv(named_metrics, path):
    """One row per ``(label, Metrics)`` pair."""
    named_metrics = list(named_metrics)
    header = ["controller"] + [f.name for f in fields(Metrics)]
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for label, m in named_metrics:
                w.writerow([label] + [_fmt(getattr(m, f)) for f in header[1:]])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def run_pair(emc_scenario, pi_scenario):
    """Run both controllers on one shared timing trace."""
    trace = netmodel.generate_trace(emc_scenario.timing, emc_scenario.duration)
    return run_scenario(emc_scenario, trace), run_scenario(pi_scenario, trace)


def timing_family(sc, ts_max_values):
    """Copies of ``sc`` differing only in the upper sampling bound."""
    return [
        replace(sc, name=f"{sc.name}_tsmax{ts_max:g}", timing=replace(sc.timing, ts_max=float(ts_max)))
        for ts_max in ts_max_values
    ]
