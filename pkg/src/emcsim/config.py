"""Scenario configuration files.

Configurations are INI files (``configparser``) with the sections
``scenario``, ``timing``, ``controller``, ``emc``, ``pi``, ``plant``,
``disturbance``, ``reference``, ``stability``, ``sweep`` and ``benchmark``.  Every section
and key is optional except ``scenario.name``; missing values take the
defaults documented in ``docs/config.md``.  Unknown sections or keys are
rejected so typos fail loudly.
"""

import configparser
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from . import baseline_pi, emc
from .harness import ConfigError, EmcConfig, PiConfig, Scenario
from .netmodel import TimingSpec
from .plant import DisturbanceProfile, PlantParams

__all__ = ["Config", "load_config", "parse_config", "preset_path", "PRESETS"]

PRESETS = ("distrej", "critical", "benchmark")

_KEYS = {
    "scenario": {"name", "duration", "metrics_window_start", "output"},
    "timing": {"ts_min", "ts_max", "distribution", "seed", "loss_probability"},
    "controller": {"type"},
    "emc": {"mu_r", "mu_k", "mu_n", "controller_matrix", "disturbance_pole", "ordering"},
    "pi": {"k_p", "k_i", "shaper_mu"},
    "plant": {"tau_m", "tau_a", "k_v", "v_max", "encoder_cpr"},
    "disturbance": {"kind", "magnitude", "start_time", "frequency"},
    "reference": {"schedule"},
    "stability": {"ts_min", "ts_max", "n_points"},
    "sweep": {"ts_max"},
    "benchmark": {"seeds"},
}


@dataclass(frozen=True)
class Config:
    """A parsed configuration file.

    ``scenario`` uses the controller selected by ``controller.type``; the
    ``emc`` and ``pi`` members are always populated so benchmark runs can
    swap controllers on the same timing trace.
    """

    scenario: Scenario
    emc: EmcConfig
    pi: PiConfig
    stability: tuple
    sweep_ts_max: tuple
    benchmark_seeds: tuple

    def with_seed(self, seed):
        timing = replace(self.scenario.timing, seed=int(seed))
        return replace(self, scenario=replace(self.scenario, timing=timing))

    def with_controller(self, kind):
        ctrl = {"emc": self.emc, "pi": self.pi}[kind]
        return replace(self.scenario, controller=ctrl, name=f"{self.scenario.name}_{kind}")


def _get(cp, section, key, conv, default):
    if not cp.has_option(section, key):
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}.{key}: cannot parse {raw!r} ({exc})") from exc


def _floats(raw):
    return tuple(float(v) for v in raw.replace(";", ",").split(",") if v.strip())


def _int(raw):
    return int(raw, 0)


def _schedule(raw):
    out = []
    for item in raw.replace("\n", ",").split(","):
        if not item.strip():
            continue
        t, sep, r = item.partition(":")
        if not sep:
            raise ValueError(f"expected 'time: value', got {item.strip()!r}")
        out.append((float(t), float(r)))
    return tuple(out)


def _build(section, fn, **kwargs):
    try:
        return fn(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}: {exc}") from exc


def parse_config(text, source="<string>"):
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text, source=str(source))
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    for section in cp.sections():
        if section not in _KEYS:
            raise ConfigError(f"{section}: unknown section")
        for key in cp[section]:
            if key not in _KEYS[section]:
                raise ConfigError(f"{section}.{key}: unknown key")
    if not cp.has_option("scenario", "name"):
        raise ConfigError("scenario.name: required")

    timing = _build("timing", TimingSpec,
                    ts_min=_get(cp, "timing", "ts_min", float, 0.01),
                    ts_max=_get(cp, "timing", "ts_max", float, 0.03),
                    distribution=_get(cp, "timing", "distribution", str.strip, "uniform"),
                    seed=_get(cp, "timing", "seed", _int, 0),
                    loss_probability=_get(cp, "timing", "loss_probability", float, 0.0))

    defaults = PlantParams()
    plant = _build("plant", PlantParams,
                   tau_m=_get(cp, "plant", "tau_m", float, defaults.tau_m),
                   tau_a=_get(cp, "plant", "tau_a", float, defaults.tau_a),
                   k_v=_get(cp, "plant", "k_v", float, defaults.k_v),
                   v_max=_get(cp, "plant", "v_max", float, defaults.v_max),
                   encoder_cpr=_get(cp, "plant", "encoder_cpr", _int, defaults.encoder_cpr))

    spec = _build("emc", emc.ContinuousEigenSpec,
                  mu_R=_get(cp, "emc", "mu_r", float, emc.DEFAULT_SPEC.mu_R),
                  mu_K=_get(cp, "emc", "mu_k", _floats, emc.DEFAULT_SPEC.mu_K),
                  mu_N=_get(cp, "emc", "mu_n", _floats, emc.DEFAULT_SPEC.mu_N))
    if not spec.left_half_plane:
        raise ConfigError("emc: all continuous eigenvalues must be strictly negative")
    options = _build("emc", emc.EmcOptions,
                     controller_matrix=_get(cp, "emc", "controller_matrix", str.strip, "conventional"),
                     disturbance_pole=_get(cp, "emc", "disturbance_pole", str.strip, "as_printed"),
                     ordering=_get(cp, "emc", "ordering", str.strip, "predictor"))
    emc_cfg = EmcConfig(spec=spec, options=options)

    pi_params = _build("pi", baseline_pi.PiParams,
                       k_p_pi=_get(cp, "pi", "k_p", float, baseline_pi.DEFAULT_PI.k_p_pi),
                       k_i_pi=_get(cp, "pi", "k_i", float, baseline_pi.DEFAULT_PI.k_i_pi),
                       v_max=plant.v_max)
    pi_cfg = PiConfig(params=pi_params, shaper_mu=_get(cp, "pi", "shaper_mu", float, spec.mu_R))

    kind = _get(cp, "controller", "type", str.strip, "emc")
    if kind not in ("emc", "pi"):
        raise ConfigError(f"controller.type: expected 'emc' or 'pi', got {kind!r}")

    disturbance = _build("disturbance", DisturbanceProfile,
                         kind=_get(cp, "disturbance", "kind", str.strip, "none"),
                         magnitude=_get(cp, "disturbance", "magnitude", float, 0.0),
                         start_time=_get(cp, "disturbance", "start_time", float, 0.0),
                         frequency=_get(cp, "disturbance", "frequency", float, 0.0))

    name = cp.get("scenario", "name").strip()
    scenario = _build("scenario", Scenario,
                      name=name,
                      duration=_get(cp, "scenario", "duration", float, 10.0),
                      timing=timing,
                      controller=emc_cfg if kind == "emc" else pi_cfg,
                      plant=plant,
                      disturbance=disturbance,
                      reference=_get(cp, "reference", "schedule", _schedule, ((0.0, 0.0),)),
                      output_path=_get(cp, "scenario", "output", str.strip, f"{name}.csv"),
                      metrics_window_start=_get(cp, "scenario", "metrics_window_start", float, 0.0))

    stab = (
        _get(cp, "stability", "ts_min", float, timing.ts_min),
        _get(cp, "stability", "ts_max", float, timing.ts_max),
        _get(cp, "stability", "n_points", _int, 21),
    )
    sweep_ts = _get(cp, "sweep", "ts_max", _floats, ())
    if any(t < timing.ts_min for t in sweep_ts):
        raise ConfigError("sweep.ts_max: every value must be >= timing.ts_min")
    seeds = _get(cp, "benchmark", "seeds", lambda raw: tuple(_int(v.strip()) for v in raw.split(",") if v.strip()), ())
    return Config(scenario=scenario, emc=emc_cfg, pi=pi_cfg, stability=stab,
                  sweep_ts_max=sweep_ts, benchmark_seeds=seeds)


def load_config(path):
    path = Path(path)
    if not path.exists() and str(path) in PRESETS:
        path = preset_path(str(path))
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read configuration ({exc})") from exc
    return parse_config(text, source=path)


def preset_path(name):
    """Filesystem path of a bundled preset (``distrej``, ``critical``, ``benchmark``)."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return Path(str(resources.files("emcsim") / "presets" / f"{name}.ini"))
