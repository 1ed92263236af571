"""Run configuration: flat dotted-key files, defaults, validation, builders.

The file format is `section.key = value`, one per line, with `#` comments;
sections are plc.*, vlc.*, cascade.*, mc.*, plus optional sweep.* and run.*
for self-contained experiment recipes. Every omitted key takes the standard
indoor-parameter default; unknown keys are rejected so that typos cannot
silently fall back to defaults.

Mean SNRs are accepted in dB here and converted to linear exactly once;
everything downstream is linear-scale.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .cascade import CascadeModel, MetricConfig, ModulationParams
from .mc import McConfig
from .plc import (FitConfig, LognormalFading, PlcLinkParams, PlcModel, PlcNoise,
                  PlcTopology, mean_branch_snr_from_link, normalize_fading)
from .vlc import ReceiverParams, VlcGeometry, VlcModel


class ConfigError(Exception):
    """Base class for configuration problems; carries the CLI exit code."""

    exit_code = 3


class ConfigParseError(ConfigError):
    exit_code = 2


class ConfigValidationError(ConfigError):
    exit_code = 3


class ConfigConflictError(ConfigError):
    exit_code = 3


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


SWEEP_VARIABLES = (
    "vlc_mean_snr_db", "plc_mean_snr_db", "num_relays", "num_leds",
    "num_wires", "semiangle_deg", "fov_deg", "vertical_len_m",
)
_INTEGER_SWEEP_VARIABLES = {"num_relays", "num_leds", "num_wires"}


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable on a linear or logarithmic grid."""

    variable: str
    start: float
    stop: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigValidationError(
                f"sweep.variable = {self.variable}: must be one of {', '.join(SWEEP_VARIABLES)}")
        if not self.start < self.stop:
            raise ConfigValidationError("sweep: start must be < stop")
        if self.points < 2:
            raise ConfigValidationError("sweep.points: must be >= 2")
        if self.scale not in ("linear", "log"):
            raise ConfigValidationError("sweep.scale: must be 'linear' or 'log'")
        if self.scale == "log" and self.start <= 0:
            raise ConfigValidationError("sweep: log scale requires start > 0")
        if self.variable in _INTEGER_SWEEP_VARIABLES:
            for v in self.values():
                if abs(v - round(v)) > 1e-9:
                    raise ConfigValidationError(
                        f"sweep: integer variable {self.variable} needs an integer grid, got {v}")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class RunConfig:
    """Full system parameter set with standard indoor defaults."""

    # plc topology and fading
    plc_m: int = 1
    plc_k: int = 3
    plc_mu_h: float | None = None          # None: derived from K via normalize_fading
    plc_sigma2_h: float = 1.0
    # plc SNR, direct or computed from the physical link
    plc_snr_source: str = "direct"
    plc_mean_snr_db: float = 10.0
    plc_tx_power: float | None = None
    plc_alpha1: float = 0.0093
    plc_alpha2: float = 0.0051
    plc_k_att: float = 1.0
    plc_freq_mhz: float = 20.0
    plc_length_m: float = 5.0
    plc_impulse_prob: float = 0.05
    plc_bg_var: float = 1.0
    plc_imp_var: float = 10.0
    # lognormal-sum fit controls
    plc_fit_samples: int = 10_000_000
    plc_fit_seed: int = 1905
    plc_fit_points: int = 512
    plc_fit_qlo: float = 0.001
    plc_fit_qhi: float = 0.999
    # vlc
    vlc_n: int = 1
    vlc_snr_source: str = "direct"
    vlc_mean_snr_db: float = 30.0
    vlc_tx_power: float | None = None
    vlc_noise_var: float | None = None
    vlc_conv_efficiency: float = 0.64
    vlc_semiangle_deg: float = 60.0
    vlc_fov_deg: float = 60.0
    vlc_pd_area: float = 1e-4
    vlc_responsivity: float = 1.0
    vlc_filter_gain: float = 1.0
    vlc_refr_index: float = 1.5
    vlc_vertical_len_m: float = 2.5
    vlc_cell_radius_m: float = 2.5
    # cascade metrics
    cascade_gamma_th_db: float = 0.0
    cascade_p_mod: float = 0.5
    cascade_q_mod: float = 1.0
    cascade_quad_order: int = 64
    # monte carlo
    mc_trials: int = 100_000
    mc_seed: int = 12345
    mc_batch_size: int = 250_000
    mc_streams: int = 4
    mc_z_threshold: float = 3.0
    # optional recipe extras
    run_metric: str | None = None
    sweep: SweepSpec | None = None

    def replacing(self, **kwargs) -> "RunConfig":
        return dataclasses.replace(self, **kwargs)

    def with_sweep_value(self, variable: str, value: float) -> "RunConfig":
        if variable == "vlc_mean_snr_db":
            return self.replacing(vlc_mean_snr_db=float(value), vlc_snr_source="direct")
        if variable == "plc_mean_snr_db":
            return self.replacing(plc_mean_snr_db=float(value), plc_snr_source="direct")
        if variable == "num_relays":
            return self.replacing(plc_m=int(round(value)))
        if variable == "num_leds":
            return self.replacing(vlc_n=int(round(value)))
        if variable == "num_wires":
            return self.replacing(plc_k=int(round(value)))
        if variable == "semiangle_deg":
            return self.replacing(vlc_semiangle_deg=float(value))
        if variable == "fov_deg":
            return self.replacing(vlc_fov_deg=float(value))
        if variable == "vertical_len_m":
            return self.replacing(vlc_vertical_len_m=float(value))
        raise ConfigValidationError(f"unknown sweep variable {variable}")


# key -> (RunConfig field, converter); converters raise ValueError on bad input
def _as_int(text: str) -> int:
    value = float(text)
    if abs(value - round(value)) > 1e-9:
        raise ValueError(f"expected an integer, got {text}")
    return int(round(value))


_KEYMAP: dict[str, tuple[str, object]] = {
    "plc.m": ("plc_m", _as_int),
    "plc.k": ("plc_k", _as_int),
    "plc.mu_h": ("plc_mu_h", float),
    "plc.sigma2_h": ("plc_sigma2_h", float),
    "plc.snr_source": ("plc_snr_source", str),
    "plc.mean_snr_db": ("plc_mean_snr_db", float),
    "plc.tx_power": ("plc_tx_power", float),
    "plc.alpha1": ("plc_alpha1", float),
    "plc.alpha2": ("plc_alpha2", float),
    "plc.k_att": ("plc_k_att", float),
    "plc.freq_mhz": ("plc_freq_mhz", float),
    "plc.length_m": ("plc_length_m", float),
    "plc.impulse_prob": ("plc_impulse_prob", float),
    "plc.bg_var": ("plc_bg_var", float),
    "plc.imp_var": ("plc_imp_var", float),
    "plc.fit_samples": ("plc_fit_samples", _as_int),
    "plc.fit_seed": ("plc_fit_seed", _as_int),
    "plc.fit_points": ("plc_fit_points", _as_int),
    "plc.fit_qlo": ("plc_fit_qlo", float),
    "plc.fit_qhi": ("plc_fit_qhi", float),
    "vlc.n": ("vlc_n", _as_int),
    "vlc.snr_source": ("vlc_snr_source", str),
    "vlc.mean_snr_db": ("vlc_mean_snr_db", float),
    "vlc.tx_power": ("vlc_tx_power", float),
    "vlc.noise_var": ("vlc_noise_var", float),
    "vlc.conv_efficiency": ("vlc_conv_efficiency", float),
    "vlc.semiangle_deg": ("vlc_semiangle_deg", float),
    "vlc.fov_deg": ("vlc_fov_deg", float),
    "vlc.pd_area": ("vlc_pd_area", float),
    "vlc.responsivity": ("vlc_responsivity", float),
    "vlc.filter_gain": ("vlc_filter_gain", float),
    "vlc.refr_index": ("vlc_refr_index", float),
    "vlc.vertical_len_m": ("vlc_vertical_len_m", float),
    "vlc.cell_radius_m": ("vlc_cell_radius_m", float),
    "cascade.gamma_th_db": ("cascade_gamma_th_db", float),
    "cascade.p_mod": ("cascade_p_mod", float),
    "cascade.q_mod": ("cascade_q_mod", float),
    "cascade.quad_order": ("cascade_quad_order", _as_int),
    "mc.trials": ("mc_trials", _as_int),
    "mc.seed": ("mc_seed", _as_int),
    "mc.batch_size": ("mc_batch_size", _as_int),
    "mc.streams": ("mc_streams", _as_int),
    "mc.z_threshold": ("mc_z_threshold", float),
    "run.metric": ("run_metric", str),
    "sweep.variable": (None, str),
    "sweep.start": (None, float),
    "sweep.stop": (None, float),
    "sweep.points": (None, _as_int),
    "sweep.scale": (None, str),
}


def parse_config_text(text: str, origin: str = "<config>") -> RunConfig:
    fields: dict[str, object] = {}
    sweep_raw: dict[str, object] = {}
    provided: set[str] = set()
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"{origin}:{lineno}: expected 'key = value', got {raw_line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEYMAP:
            raise ConfigValidationError(f"{origin}:{lineno}: unknown key {key!r}")
        if key in provided:
            raise ConfigParseError(f"{origin}:{lineno}: duplicate key {key!r}")
        provided.add(key)
        field, conv = _KEYMAP[key]
        try:
            parsed = conv(value)
        except ValueError as exc:
            raise ConfigParseError(f"{origin}:{lineno}: bad value for {key}: {exc}") from exc
        if field is None:
            sweep_raw[key.split(".", 1)[1]] = parsed
        else:
            fields[field] = parsed

    if sweep_raw:
        missing = {"variable", "start", "stop", "points"} - set(sweep_raw)
        if missing:
            raise ConfigValidationError(f"{origin}: sweep section missing keys: {sorted(missing)}")
        fields["sweep"] = SweepSpec(
            variable=sweep_raw["variable"], start=float(sweep_raw["start"]),
            stop=float(sweep_raw["stop"]), points=int(sweep_raw["points"]),
            scale=str(sweep_raw.get("scale", "linear")))

    cfg = RunConfig(**fields)
    _validate(cfg, provided)
    return cfg


def load_config(path: str) -> RunConfig:
    """Parse and fully validate one config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigParseError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text, origin=path)


_CHECKS = (
    # (key, predicate over cfg, constraint description)
    ("plc.m", lambda c: 1 <= c.plc_m <= 16, "integer in [1, 16]"),
    ("plc.k", lambda c: 1 <= c.plc_k <= 16, "integer in [1, 16]"),
    ("plc.sigma2_h", lambda c: c.plc_sigma2_h > 0, "> 0"),
    ("plc.snr_source", lambda c: c.plc_snr_source in ("direct", "computed"), "'direct' or 'computed'"),
    ("plc.alpha1", lambda c: c.plc_alpha1 >= 0, ">= 0"),
    ("plc.alpha2", lambda c: c.plc_alpha2 >= 0, ">= 0"),
    ("plc.k_att", lambda c: c.plc_k_att > 0, "> 0"),
    ("plc.freq_mhz", lambda c: c.plc_freq_mhz > 0, "> 0"),
    ("plc.length_m", lambda c: c.plc_length_m >= 0, ">= 0"),
    ("plc.impulse_prob", lambda c: 0 <= c.plc_impulse_prob <= 1, "in [0, 1]"),
    ("plc.bg_var", lambda c: c.plc_bg_var > 0, "> 0"),
    ("plc.imp_var", lambda c: c.plc_imp_var >= 0, ">= 0"),
    ("plc.fit_samples", lambda c: c.plc_fit_samples >= 10_000, ">= 10000"),
    ("plc.fit_points", lambda c: c.plc_fit_points >= 8, ">= 8"),
    ("plc.fit_qlo", lambda c: 0 < c.plc_fit_qlo < c.plc_fit_qhi, "in (0, fit_qhi)"),
    ("plc.fit_qhi", lambda c: c.plc_fit_qlo < c.plc_fit_qhi < 1, "in (fit_qlo, 1)"),
    ("vlc.n", lambda c: 1 <= c.vlc_n <= 16, "integer in [1, 16]"),
    ("vlc.snr_source", lambda c: c.vlc_snr_source in ("direct", "computed"), "'direct' or 'computed'"),
    ("vlc.conv_efficiency", lambda c: c.vlc_conv_efficiency > 0, "> 0"),
    ("vlc.semiangle_deg", lambda c: 0 < c.vlc_semiangle_deg < 90, "in (0, 90)"),
    ("vlc.fov_deg", lambda c: 0 < c.vlc_fov_deg <= 90, "in (0, 90]"),
    ("vlc.pd_area", lambda c: c.vlc_pd_area > 0, "> 0"),
    ("vlc.responsivity", lambda c: c.vlc_responsivity > 0, "> 0"),
    ("vlc.filter_gain", lambda c: c.vlc_filter_gain > 0, "> 0"),
    ("vlc.refr_index", lambda c: c.vlc_refr_index > 0, "> 0"),
    ("vlc.vertical_len_m", lambda c: c.vlc_vertical_len_m > 0, "> 0"),
    ("vlc.cell_radius_m", lambda c: c.vlc_cell_radius_m > 0, "> 0"),
    ("cascade.p_mod", lambda c: c.cascade_p_mod > 0, "> 0"),
    ("cascade.q_mod", lambda c: c.cascade_q_mod > 0, "> 0"),
    ("cascade.quad_order", lambda c: 8 <= c.cascade_quad_order <= 256, "in [8, 256]"),
    ("mc.trials", lambda c: c.mc_trials >= 1_000, ">= 1000"),
    ("mc.streams", lambda c: c.mc_streams >= 1, ">= 1"),
    ("mc.z_threshold", lambda c: c.mc_z_threshold > 0, "> 0"),
    ("run.metric", lambda c: c.run_metric in (None, "op", "bep", "capacity"), "'op', 'bep' or 'capacity'"),
)


def _validate(cfg: RunConfig, provided: set[str]) -> None:
    for key, ok, constraint in _CHECKS:
        value = getattr(cfg, _KEYMAP[key][0])
        if not ok(cfg):
            raise ConfigValidationError(f"{key} = {value}: must be {constraint}")
    if "mc.batch_size" in provided and not (1 <= cfg.mc_batch_size <= cfg.mc_trials):
        raise ConfigValidationError(
            f"mc.batch_size = {cfg.mc_batch_size}: must be in [1, mc.trials]")

    for side in ("plc", "vlc"):
        source = getattr(cfg, f"{side}_snr_source")
        if source == "computed":
            if f"{side}.mean_snr_db" in provided:
                raise ConfigConflictError(
                    f"{side}.snr_source = computed conflicts with an explicit {side}.mean_snr_db; "
                    "give one SNR path only")
            if getattr(cfg, f"{side}_tx_power") is None:
                raise ConfigValidationError(
                    f"{side}.snr_source = computed requires {side}.tx_power")
            if side == "vlc" and cfg.vlc_noise_var is None:
                raise ConfigValidationError("vlc.snr_source = computed requires vlc.noise_var")


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def fading_of(cfg: RunConfig) -> LognormalFading:
    if cfg.plc_mu_h is not None:
        return LognormalFading(mu_h=cfg.plc_mu_h, sigma2_h=cfg.plc_sigma2_h)
    return normalize_fading(cfg.plc_k, cfg.plc_sigma2_h)


def fit_config_of(cfg: RunConfig) -> FitConfig:
    return FitConfig(samples=cfg.plc_fit_samples, seed=cfg.plc_fit_seed,
                     n_points=cfg.plc_fit_points, q_lo=cfg.plc_fit_qlo, q_hi=cfg.plc_fit_qhi)


def plc_mean_snr_of(cfg: RunConfig) -> float:
    if cfg.plc_snr_source == "computed":
        link = PlcLinkParams(alpha1=cfg.plc_alpha1, alpha2=cfg.plc_alpha2, k_att=cfg.plc_k_att,
                             freq_mhz=cfg.plc_freq_mhz, length_m=cfg.plc_length_m,
                             tx_power=cfg.plc_tx_power)
        noise = PlcNoise(impulse_prob=cfg.plc_impulse_prob, bg_var=cfg.plc_bg_var,
                         imp_var=cfg.plc_imp_var)
        return mean_branch_snr_from_link(link, noise)
    return db_to_linear(cfg.plc_mean_snr_db)


def vlc_mean_snr_of(cfg: RunConfig) -> float:
    if cfg.vlc_snr_source == "computed":
        return cfg.vlc_tx_power * cfg.vlc_conv_efficiency / cfg.vlc_noise_var
    return db_to_linear(cfg.vlc_mean_snr_db)


def build_plc_model(cfg: RunConfig) -> PlcModel:
    topology = PlcTopology(num_relays=cfg.plc_m, num_wires=cfg.plc_k)
    return PlcModel.build(topology, fading_of(cfg), plc_mean_snr_of(cfg), fit_config_of(cfg))


def build_vlc_model(cfg: RunConfig) -> VlcModel:
    geometry = VlcGeometry(vertical_len=cfg.vlc_vertical_len_m, cell_radius=cfg.vlc_cell_radius_m)
    rx = ReceiverParams(pd_area=cfg.vlc_pd_area, responsivity=cfg.vlc_responsivity,
                        filter_gain=cfg.vlc_filter_gain, refr_index=cfg.vlc_refr_index,
                        fov_half_angle=cfg.vlc_fov_deg)
    return VlcModel.build(geometry, rx, cfg.vlc_semiangle_deg, vlc_mean_snr_of(cfg), cfg.vlc_n)


def build_cascade_model(cfg: RunConfig) -> CascadeModel:
    return CascadeModel(plc=build_plc_model(cfg), vlc=build_vlc_model(cfg))


def metric_config_of(cfg: RunConfig) -> MetricConfig:
    return MetricConfig(quad_order=cfg.cascade_quad_order,
                        gamma_th=db_to_linear(cfg.cascade_gamma_th_db))


def modulation_of(cfg: RunConfig) -> ModulationParams:
    return ModulationParams(p_mod=cfg.cascade_p_mod, q_mod=cfg.cascade_q_mod)


def mc_config_of(cfg: RunConfig) -> McConfig:
    return McConfig(trials=cfg.mc_trials, seed=cfg.mc_seed,
                    batch_size=min(cfg.mc_batch_size, cfg.mc_trials), streams=cfg.mc_streams)
