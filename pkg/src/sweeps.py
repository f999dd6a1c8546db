from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np
import pandas as pd

from src.config import AXES, SCALES, ConfigError, SimConfig, with_overrides
from src.constants import F_UC, REGIMES
from src.fidelity import FidelityReport, average_fidelity, calibrate_ensemble, make_ensemble
from src.logger import get_logger

logger = get_logger()

COUPLING_AXES = ("kappa_s_over_kappa", "g_over_kappa")
ERR_PSW_AXES = ("err", "p_sw")


@dataclass(frozen=True)
class AxisSpec:
    name: str
    lo: float
    hi: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in AXES:
            raise ConfigError(f"axis: must be one of {AXES} (got {self.name!r})")
        if not self.lo < self.hi:
            raise ConfigError(f"{self.name}: lo must be below hi (got {self.lo}, {self.hi})")
        if self.points < 2:
            raise ConfigError(f"{self.name}: needs at least 2 points (got {self.points})")
        if self.scale not in SCALES:
            raise ConfigError(f"{self.name}: scale must be one of {SCALES} (got {self.scale!r})")
        if self.scale == "log" and self.lo <= 0:
            raise ConfigError(f"{self.name}: log scale needs lo > 0 (got {self.lo})")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class SweepGrid:
    axis1: AxisSpec
    axis2: AxisSpec

    def __post_init__(self):
        if self.axis1.name == self.axis2.name:
            raise ConfigError(f"axis2: must differ from axis1 (both {self.axis1.name!r})")

    @classmethod
    def from_config(cls, cfg: SimConfig) -> "SweepGrid":
        specs = []
        for n in (1, 2):
            grid = cfg.axis(n)
            specs.append(AxisSpec(grid["name"], float(grid["lo"]), float(grid["hi"]), int(grid["points"]), grid["scale"]))
        return cls(*specs)

    def points(self) -> List[Tuple[float, float]]:
        return [(float(a), float(b)) for a in self.axis1.values() for b in self.axis2.values()]

    def __len__(self) -> int:
        return self.axis1.points * self.axis2.points


def result_columns(cfg: SimConfig) -> List[str]:
    axes = [cfg.axis1, cfg.axis2]
    if cfg.circuit == "baseline":
        return axes + ["f_up", "f_down", "f_both", "success_up", "success_down", "status"]
    return axes + ["f_both", "success_total", "status"]


def apply_axis(cfg: SimConfig, name: str, value: float) -> SimConfig:
    """Configuration with one axis value substituted."""
    if name in COUPLING_AXES:
        return with_overrides(cfg, **{name: value})
    if name == "err":
        return with_overrides(cfg, error_level=value)
    if name == "p_sw":
        return with_overrides(cfg, **{f"sw{s}_{c}": value for s in (1, 2) for c in ("t12", "t21", "r11", "r22")})
    raise ConfigError(f"axis: must be one of {AXES} (got {name!r})")


def resolve_ensemble(cfg: SimConfig) -> str:
    return calibrate_ensemble(cfg.haar_samples) if cfg.ensemble == "calibration" else cfg.ensemble


def evaluate_point(cfg: SimConfig, point_index: int = 0, ensemble: str = "basis4") -> Dict[str, Any]:
    """
    Fidelity row for one configuration.

    Domain errors at the point give a row with NaN fidelities and the error
    message in the status column.
    """
    row: Dict[str, Any] = {}
    try:
        report = average_fidelity(cfg.circuit, cfg.cavity_params(), cfg.device_errors(point_index),
                                  make_ensemble(ensemble, cfg.haar_samples, cfg.seed), cfg.branch_convention)
    except ValueError as e:
        logger.warning(f"Point {point_index} failed: {e}")
        keys = ("f_up", "f_down", "f_both", "success_up", "success_down", "success_total")
        row.update({key: float("nan") for key in keys})
        row["status"] = f"error: {e}"
        return row
    row.update(f_up=report.f_up, f_down=report.f_down, f_both=report.f_both,
               success_up=report.success_up, success_down=report.success_down,
               success_total=report.success_total, status=_status(report))
    return row


def _status(report: FidelityReport) -> str:
    if report.bounded:
        return "ok"
    return (f"warning: {report.over_norm} outputs above norm 1 (max {report.max_norm:.6g}); "
            f"{report.clamped} fidelities clipped")


def _evaluate_task(task: Tuple[SimConfig, int, Tuple[float, float], str]) -> Dict[str, Any]:
    cfg, index, (v1, v2), ensemble = task
    point = {cfg.axis1: v1, cfg.axis2: v2}
    try:
        point_cfg = apply_axis(apply_axis(cfg, cfg.axis1, v1), cfg.axis2, v2)
    except ValueError as e:
        return {**point, "status": f"error: {e}"}
    return {**point, **evaluate_point(point_cfg, index, ensemble)}


def run_sweep(cfg: SimConfig, workers: int = None) -> pd.DataFrame:
    """
    Evaluate every grid point of the configuration.

    Args:
    cfg (SimConfig): run configuration including both axes
    workers (int): process count; defaults to cfg.workers

    Returns:
    pd.DataFrame: one row per grid point, axis 1 outer
    """
    workers = workers or cfg.workers
    grid = SweepGrid.from_config(cfg)
    ensemble = resolve_ensemble(cfg)
    tasks = [(cfg, i, point, ensemble) for i, point in enumerate(grid.points())]
    logger.info(f"Sweeping {len(tasks)} points ({grid.axis1.name} x {grid.axis2.name}, {cfg.circuit}, "
                f"ensemble {ensemble}, {workers} worker(s))")

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(_evaluate_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        rows = [_evaluate_task(task) for task in tasks]

    failed = sum(1 for row in rows if str(row.get("status")).startswith("error"))
    flagged = sum(1 for row in rows if str(row.get("status")).startswith("warning"))
    if failed:
        logger.warning(f"{failed} of {len(rows)} grid points ended with an error status")
    if flagged:
        logger.warning(f"{flagged} of {len(rows)} grid points exceeded the norm or fidelity bound")
    logger.info("Sweep completed")
    return pd.DataFrame(rows).reindex(columns=result_columns(cfg))


def sweep_coupling(cfg: SimConfig, workers: int = None) -> pd.DataFrame:
    """Fidelity surface over kappa_s/kappa and g/kappa."""
    if {cfg.axis1, cfg.axis2} != set(COUPLING_AXES):
        raise ConfigError(f"axis1: a coupling sweep needs axes {COUPLING_AXES} (got {cfg.axis1}, {cfg.axis2})")
    return run_sweep(cfg, workers)


def err_psw_config(cfg: SimConfig) -> SimConfig:
    """Pin the optimized circuit, the strong-coupling cavity and the optimal cloner."""
    strong = REGIMES["strong"]
    pinned = dict(circuit="optimized", g_over_kappa=strong["g_over_kappa"],
                  kappa_s_over_kappa=strong["kappa_s_over_kappa"], cloner_fidelity=F_UC)
    if {cfg.axis1, cfg.axis2} != set(ERR_PSW_AXES):
        pinned.update(axis1="err", axis2="p_sw", axis1_lo=None, axis1_hi=None, axis1_points=None,
                      axis1_scale=None, axis2_lo=None, axis2_hi=None, axis2_points=None, axis2_scale=None)
    changed = {key: value for key, value in pinned.items() if getattr(cfg, key) != value}
    if changed:
        logger.info(f"err x p_sw sweep overrides {changed}")
    return with_overrides(cfg, **pinned)


def sweep_err_psw(cfg: SimConfig, workers: int = None) -> pd.DataFrame:
    """Optimized-circuit fidelity over the common error level and switch probability."""
    return run_sweep(err_psw_config(cfg), workers)


def sweep_for_axes(cfg: SimConfig, workers: int = None) -> pd.DataFrame:
    """Run the sweep named by the axis pair; grids over other pairs run unpinned."""
    axes = {cfg.axis1, cfg.axis2}
    if axes == set(COUPLING_AXES):
        return sweep_coupling(cfg, workers)
    if axes == set(ERR_PSW_AXES):
        return sweep_err_psw(cfg, workers)
    logger.info(f"Generic sweep over {cfg.axis1} x {cfg.axis2}")
    return run_sweep(cfg, workers)
