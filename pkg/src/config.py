import os
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, Optional

import numpy as np
import yaml

from src.cavity import CavityParams
from src.circuits import DeviceErrorConfig
from src.constants import CANONICAL_GRIDS, DEFAULT_WORKERS, GAMMA_OVER_KAPPA, HAAR_SAMPLES
from src.devices import ClonerConfig, CpbsError, HwpError, SwitchCoeffs
from src.logger import get_logger

logger = get_logger()

AXES = ("kappa_s_over_kappa", "g_over_kappa", "err", "p_sw")
SCALES = ("linear", "log")
ERROR_MODES = ("exact", "uniform")
ENSEMBLES = ("calibration", "basis4", "superposition4", "haar_product")


class ConfigError(ValueError):
    """Raised for unknown keys and out-of-range values; the message names the key."""


def _default_workers() -> int:
    return int(os.getenv("CNOTSIM_WORKERS", DEFAULT_WORKERS))


@dataclass(frozen=True)
class SimConfig:
    circuit: str = "baseline"
    g_over_kappa: float = 2.5
    kappa_s_over_kappa: float = 0.05
    gamma_over_kappa: float = GAMMA_OVER_KAPPA
    xi1: float = 0.0
    xi2: float = 0.0
    tau_r1: float = 0.0
    tau_l1: float = 0.0
    tau_r2: float = 0.0
    tau_l2: float = 0.0
    tau_r3: float = 0.0
    tau_l3: float = 0.0
    tau_r4: float = 0.0
    tau_l4: float = 0.0
    error_level: Optional[float] = None
    error_mode: str = "exact"
    sw1_t12: float = 1.0
    sw1_t21: float = 1.0
    sw1_r11: float = 1.0
    sw1_r22: float = 1.0
    sw2_t12: float = 1.0
    sw2_t21: float = 1.0
    sw2_r11: float = 1.0
    sw2_r22: float = 1.0
    cloner_fidelity: float = 1.0
    cloner_mode: str = "scalar"
    ensemble: str = "calibration"
    haar_samples: int = HAAR_SAMPLES
    branch_convention: str = "heralded"
    axis1: str = "kappa_s_over_kappa"
    axis1_lo: Optional[float] = None
    axis1_hi: Optional[float] = None
    axis1_points: Optional[int] = None
    axis1_scale: Optional[str] = None
    axis2: str = "g_over_kappa"
    axis2_lo: Optional[float] = None
    axis2_hi: Optional[float] = None
    axis2_points: Optional[int] = None
    axis2_scale: Optional[str] = None
    output: str = "sweep.csv"
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        _validate(self)

    def cavity_params(self) -> CavityParams:
        return CavityParams(self.g_over_kappa, self.kappa_s_over_kappa, self.gamma_over_kappa)

    def device_errors(self, point_index: int = 0) -> DeviceErrorConfig:
        """
        Device errors of this configuration.

        In uniform error mode each xi and tau is drawn from
        U[0.5, 1.5] * error_level, seeded by (seed, point_index).
        """
        xis = [self.xi1, self.xi2]
        taus = [self.tau_r1, self.tau_l1, self.tau_r2, self.tau_l2,
                self.tau_r3, self.tau_l3, self.tau_r4, self.tau_l4]
        if self.error_level is not None:
            if self.error_mode == "uniform":
                rng = np.random.default_rng([self.seed, point_index])
                draws = rng.uniform(0.5, 1.5, size=10) * self.error_level
                xis = [float(min(v, 1.0)) for v in draws[:2]]
                taus = [float(min(v, 1.0)) for v in draws[2:]]
            else:
                xis = [self.error_level] * 2
                taus = [self.error_level] * 8
        return DeviceErrorConfig(
            xi1=HwpError(xis[0]),
            xi2=HwpError(xis[1]),
            cpbs=tuple(CpbsError(taus[2 * i], taus[2 * i + 1]) for i in range(4)),
            sw1=SwitchCoeffs(self.sw1_t12, self.sw1_t21, self.sw1_r11, self.sw1_r22),
            sw2=SwitchCoeffs(self.sw2_t12, self.sw2_t21, self.sw2_r11, self.sw2_r22),
            cloner=ClonerConfig(self.cloner_fidelity, self.cloner_mode),
        )

    def axis(self, n: int) -> Dict[str, Any]:
        """Grid of axis n (1 or 2) with the canonical grid filling unset fields."""
        name = getattr(self, f"axis{n}")
        grid = dict(CANONICAL_GRIDS[name])
        for key in ("lo", "hi", "points", "scale"):
            value = getattr(self, f"axis{n}_{key}")
            if value is not None:
                grid[key] = value
        return {"name": name, **grid}


def _require(condition: bool, key: str, constraint: str, value: Any) -> None:
    if not condition:
        raise ConfigError(f"{key}: {constraint} (got {value!r})")


def _validate(cfg: SimConfig) -> None:
    _require(cfg.circuit in ("baseline", "optimized"), "circuit", "must be baseline or optimized", cfg.circuit)
    for key in ("g_over_kappa", "kappa_s_over_kappa", "gamma_over_kappa"):
        _require(getattr(cfg, key) >= 0, key, "must be >= 0", getattr(cfg, key))
    for key in ("xi1", "xi2"):
        _require(abs(getattr(cfg, key)) <= 1, key, "must satisfy |xi| <= 1", getattr(cfg, key))
    probabilities = [f"tau_{p}{i}" for i in range(1, 5) for p in ("r", "l")]
    probabilities += [f"sw{s}_{c}" for s in (1, 2) for c in ("t12", "t21", "r11", "r22")]
    for key in probabilities:
        _require(0 <= getattr(cfg, key) <= 1, key, "must be in [0, 1]", getattr(cfg, key))
    if cfg.error_level is not None:
        _require(0 <= cfg.error_level <= 1, "error_level", "must be in [0, 1]", cfg.error_level)
    _require(cfg.error_mode in ERROR_MODES, "error_mode", f"must be one of {ERROR_MODES}", cfg.error_mode)
    _require(0.5 <= cfg.cloner_fidelity <= 1, "cloner_fidelity", "must be in [0.5, 1]", cfg.cloner_fidelity)
    _require(cfg.cloner_mode in ("scalar", "universal"), "cloner_mode", "must be scalar or universal", cfg.cloner_mode)
    _require(cfg.ensemble in ENSEMBLES, "ensemble", f"must be one of {ENSEMBLES}", cfg.ensemble)
    _require(cfg.haar_samples >= 1, "haar_samples", "must be >= 1", cfg.haar_samples)
    _require(cfg.branch_convention in ("raw", "heralded", "renormalized"), "branch_convention",
             "must be raw, heralded or renormalized", cfg.branch_convention)
    _require(cfg.axis1 in AXES, "axis1", f"must be one of {AXES}", cfg.axis1)
    _require(cfg.axis2 in AXES, "axis2", f"must be one of {AXES}", cfg.axis2)
    _require(cfg.axis1 != cfg.axis2, "axis2", "must differ from axis1", cfg.axis2)
    for n in (1, 2):
        grid = cfg.axis(n)
        _require(grid["lo"] < grid["hi"], f"axis{n}_lo", "must be below the axis upper bound", grid["lo"])
        _require(int(grid["points"]) >= 2, f"axis{n}_points", "must be >= 2", grid["points"])
        _require(grid["scale"] in SCALES, f"axis{n}_scale", f"must be one of {SCALES}", grid["scale"])
        if grid["scale"] == "log":
            _require(grid["lo"] > 0, f"axis{n}_lo", "must be > 0 on a log axis", grid["lo"])
    _require(cfg.workers >= 1, "workers", "must be >= 1", cfg.workers)


_FIELD_TYPES = {f.name: f.type for f in fields(SimConfig)}


def _coerce(key: str, value: Any) -> Any:
    kind = _FIELD_TYPES[key]
    if value is None:
        if kind in (float, int, str):
            raise ConfigError(f"{key}: must not be empty")
        return None
    try:
        if kind is str or kind == Optional[str]:
            return str(value)
        if kind is int or kind == Optional[int]:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError("not an integer")
            return int(value)
        return float(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{key}: cannot read {value!r} ({e})") from e


def config_from_mapping(values: Dict[str, Any]) -> SimConfig:
    unknown = sorted(set(values) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown configuration key (valid keys: {', '.join(_FIELD_TYPES)})")
    parsed = {key: _coerce(key, value) for key, value in values.items()}
    parsed.setdefault("workers", _default_workers())
    return SimConfig(**parsed)


def load_config(path: str) -> SimConfig:
    """
    Load a run configuration.

    Args:
    path (str): YAML file with a flat key/value mapping

    Returns:
    SimConfig: configuration with defaults applied
    """
    with open(path, "r", encoding="utf-8") as config_file:
        try:
            values = yaml.safe_load(config_file)
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}: not valid YAML ({e})") from e
    if values is None:
        values = {}
    if not isinstance(values, dict):
        raise ConfigError(f"{path}: expected a flat mapping of keys to values")
    nested = [key for key, value in values.items() if isinstance(value, (dict, list))]
    if nested:
        raise ConfigError(f"{nested[0]}: nested values are not supported")
    cfg = config_from_mapping(values)
    logger.info(f"Loaded configuration from {path} (circuit={cfg.circuit})")
    return cfg


def save_config(cfg: SimConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as config_file:
        yaml.safe_dump(asdict(cfg), config_file, sort_keys=False)


def with_overrides(cfg: SimConfig, **overrides: Any) -> SimConfig:
    return replace(cfg, **overrides)
