# harness/trial_config.py
"""
Configuración de experimentos: TrialConfig y su carga desde YAML.

- Las claves ausentes toman el valor de `Config`.
- Las claves desconocidas son un error (evita erratas silenciosas en los barridos).
- El ruido de giróscopo se escribe en deg/s (`sigma_g_deg_s`) y se convierte a rad/s aquí.
- Un bloque `sweep` define casos `{name, overrides}` con rutas punteadas
  (`noise.sigma_v: 3.0`, `group_size: 16`, `map.resolution: low`).
"""
from __future__ import annotations

import copy
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml

from config import Config
from magnetic_pf.particles import PfConfig
from ranging_ekf.ekf import EkfConfig
from world.reference import ControllerGains
from world.sensors import NoiseConfig

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class ConfigError(ValueError):
    """Fichero de experimento inválido."""


def default_config_dict() -> Dict[str, Any]:
    """Plantilla completa con los valores de `Config` (misma forma que el YAML)."""
    return {
        "name": "baseline",
        "group_size": Config.GROUP_SIZE,
        "duration_s": Config.DURATION_S,
        "ts": Config.TS,
        "odometry_substeps": Config.ODOMETRY_SUBSTEPS,
        "init_position_sigma": Config.INIT_POSITION_SIGMA,
        "warmup_s": Config.WARMUP_S,
        "master_seed": Config.MASTER_SEED,
        "n_trials": Config.N_TRIALS,
        "workers": Config.WORKERS,
        "noise": {
            "sigma_r": Config.SIGMA_R,
            "sigma_m": Config.SIGMA_M,
            "sigma_v": Config.SIGMA_V,
            "sigma_g_deg_s": Config.SIGMA_G_DEG_S,
            "bias_fraction": Config.BIAS_FRACTION,
            "bias_v": None,
            "bias_g_deg_s": None,
        },
        "reference": {
            "amplitude": Config.VEL_AMPLITUDE,
            "baseline": Config.VEL_BASELINE,
            "angular_frequency": Config.VEL_ANGULAR_FREQUENCY,
            "track_spacing": Config.TRACK_SPACING,
            "random_phase": Config.RANDOM_PHASE,
        },
        "controller": {
            "k_cross": Config.K_CROSS,
            "k_heading": Config.K_HEADING,
            "omega_limit": Config.OMEGA_LIMIT,
        },
        "ekf": {
            "q_inflation": Config.Q_INFLATION,
            "init_position_std": Config.EKF_INIT_POSITION_STD,
            "init_heading_std_deg": Config.EKF_INIT_HEADING_STD_DEG,
        },
        "pf": {
            "particle_count": Config.PARTICLE_COUNT,
            "position_std": Config.PF_POSITION_STD,
            "heading_std": Config.PF_HEADING_STD,
            "gamma_std": Config.PF_GAMMA_STD,
            "magnetic_sigma": Config.MAGNETIC_SIGMA,
            "magnetic_sigma_floor": Config.MAGNETIC_SIGMA_FLOOR,
            "resample_threshold": Config.RESAMPLE_THRESHOLD,
            "init_position_std": Config.PF_INIT_POSITION_STD,
            "init_heading_std_deg": Config.PF_INIT_HEADING_STD_DEG,
            "init_gamma_std_deg": Config.PF_INIT_GAMMA_STD_DEG,
            "all_uavs": Config.PF_ALL_UAVS,
        },
        "map": {
            "grid_path": None,
            "seed": Config.MAP_SEED,
            "cell_size": Config.MAP_CELL_SIZE,
            "baseline": Config.MAP_BASELINE,
            "bumps_per_km2": Config.MAP_BUMPS_PER_KM2,
            "bump_count": Config.MAP_BUMP_COUNT,
            "amplitude_range": list(Config.MAP_AMPLITUDE_RANGE),
            "sigma_range": list(Config.MAP_SIGMA_RANGE),
            "margin": Config.MAP_MARGIN,
            "resolution": Config.MAP_RESOLUTION,
            "lowres_method": Config.LOWRES_METHOD,
            "smoothing_sigma": Config.SMOOTHING_SIGMA,
            "upward_height": Config.UPWARD_HEIGHT,
        },
        "comm": {
            "packet_loss": Config.PACKET_LOSS,
        },
        "sweep": [],
    }


# --------------------------------------------------------------------------------------
# Secciones
# --------------------------------------------------------------------------------------
@dataclass(frozen=True)
class ReferenceSettings:
    amplitude: float
    baseline: float
    angular_frequency: float
    track_spacing: float
    random_phase: bool

    @property
    def max_velocity(self) -> float:
        return self.baseline + self.amplitude


@dataclass(frozen=True)
class EkfSettings:
    q_inflation: float
    init_position_std: float
    init_heading_std: float   # rad


@dataclass(frozen=True)
class MapSettings:
    grid_path: Optional[str]
    seed: int
    cell_size: float
    baseline: float
    bumps_per_km2: Optional[float]
    bump_count: Optional[int]
    amplitude_range: Tuple[float, float]
    sigma_range: Tuple[float, float]
    margin: float
    resolution: str
    lowres_method: str
    smoothing_sigma: float
    upward_height: float

    @property
    def source(self) -> str:
        return "file" if self.grid_path else "synthetic"

    def base_key(self) -> tuple:
        """Identifica el mapa de alta resolución (sin los campos de la variante de baja resolución)."""
        return (
            self.grid_path, self.seed, self.cell_size, self.baseline, self.bumps_per_km2,
            self.bump_count, self.amplitude_range, self.sigma_range, self.margin,
        )


@dataclass(frozen=True)
class SweepCase:
    name: str
    overrides: Dict[str, Any] = field(default_factory=dict)


@dataclass
class TrialConfig:
    """Descripción completa de un experimento."""

    name: str
    group_size: int
    duration: float
    ts: float
    odometry_substeps: int
    init_position_sigma: float
    warmup: float
    master_seed: int
    n_trials: int
    workers: int
    noise: NoiseConfig
    reference: ReferenceSettings
    controller: ControllerGains
    ekf: EkfSettings
    pf: PfConfig
    pf_all_uavs: bool
    map: MapSettings
    packet_loss: float
    sweep: List[SweepCase] = field(default_factory=list)
    raw: Dict[str, Any] = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.ts))

    def ekf_config(self) -> EkfConfig:
        return EkfConfig.from_noise(self.noise, ts=self.ts, inflation=self.ekf.q_inflation)

    def to_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self.raw)


# --------------------------------------------------------------------------------------
# Construcción / validación
# --------------------------------------------------------------------------------------
def _deep_merge(base: Dict[str, Any], user: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    out = copy.deepcopy(base)
    for key, value in (user or {}).items():
        path = f"{prefix}{key}"
        if key not in base:
            raise ConfigError(f"clave desconocida en la configuración: '{path}'")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"'{path}' debe ser una sección")
            out[key] = _deep_merge(base[key], value, prefix=f"{path}.")
        else:
            out[key] = copy.deepcopy(value)
    return out


def _pair(value, key: str) -> Tuple[float, float]:
    try:
        lo, hi = (float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{key}' debe ser una lista [min, max]") from None
    return lo, hi


def from_dict(data: Dict[str, Any]) -> TrialConfig:
    """
    Construye un TrialConfig a partir de un diccionario con la forma del YAML.

    Raises:
        ConfigError: claves desconocidas o valores fuera de rango
    """
    raw = _deep_merge(default_config_dict(), data or {})
    n, rf, ctl, ek, pf, mp = raw["noise"], raw["reference"], raw["controller"], raw["ekf"], raw["pf"], raw["map"]

    try:
        group_size = int(raw["group_size"])
        duration = float(raw["duration_s"])
        ts = float(raw["ts"])
        if group_size < 1:
            raise ConfigError(f"group_size debe ser >= 1 (recibido {group_size})")
        if not duration > 0:
            raise ConfigError(f"duration_s debe ser > 0 (recibido {duration})")
        if not ts > 0:
            raise ConfigError(f"ts debe ser > 0 (recibido {ts})")
        if int(raw["n_trials"]) < 1:
            raise ConfigError("n_trials debe ser >= 1")

        noise = NoiseConfig(
            sigma_r=float(n["sigma_r"]),
            sigma_m=float(n["sigma_m"]),
            sigma_v=float(n["sigma_v"]),
            sigma_g=math.radians(float(n["sigma_g_deg_s"])),
            bias_fraction=float(n["bias_fraction"]),
            bias_v=None if n["bias_v"] is None else float(n["bias_v"]),
            bias_g=None if n["bias_g_deg_s"] is None else math.radians(float(n["bias_g_deg_s"])),
        )
        reference = ReferenceSettings(
            amplitude=float(rf["amplitude"]),
            baseline=float(rf["baseline"]),
            angular_frequency=float(rf["angular_frequency"]),
            track_spacing=float(rf["track_spacing"]),
            random_phase=bool(rf["random_phase"]),
        )
        if not reference.baseline > reference.amplitude >= 0:
            raise ConfigError("reference: se requiere baseline > amplitude >= 0")
        controller = ControllerGains(float(ctl["k_cross"]), float(ctl["k_heading"]), float(ctl["omega_limit"]))
        ekf = EkfSettings(
            q_inflation=float(ek["q_inflation"]),
            init_position_std=float(ek["init_position_std"]),
            init_heading_std=math.radians(float(ek["init_heading_std_deg"])),
        )

        # σ_m de la verosimilitud: override explícito, si no el del sensor con suelo
        magnetic_sigma = pf["magnetic_sigma"]
        if magnetic_sigma is None:
            magnetic_sigma = max(noise.sigma_m, float(pf["magnetic_sigma_floor"]))
        pf_cfg = PfConfig(
            particle_count=int(pf["particle_count"]),
            position_std=float(pf["position_std"]),
            heading_std=float(pf["heading_std"]),
            gamma_std=float(pf["gamma_std"]),
            magnetic_sigma=float(magnetic_sigma),
            resample_threshold=float(pf["resample_threshold"]),
            ts=ts,
            init_position_std=float(pf["init_position_std"]),
            init_heading_std=math.radians(float(pf["init_heading_std_deg"])),
            init_gamma_std=math.radians(float(pf["init_gamma_std_deg"])),
        )

        map_settings = MapSettings(
            grid_path=mp["grid_path"],
            seed=int(mp["seed"]),
            cell_size=float(mp["cell_size"]),
            baseline=float(mp["baseline"]),
            bumps_per_km2=None if mp["bumps_per_km2"] is None else float(mp["bumps_per_km2"]),
            bump_count=None if mp["bump_count"] is None else int(mp["bump_count"]),
            amplitude_range=_pair(mp["amplitude_range"], "map.amplitude_range"),
            sigma_range=_pair(mp["sigma_range"], "map.sigma_range"),
            margin=float(mp["margin"]),
            resolution=str(mp["resolution"]),
            lowres_method=str(mp["lowres_method"]),
            smoothing_sigma=float(mp["smoothing_sigma"]),
            upward_height=float(mp["upward_height"]),
        )
        if map_settings.resolution not in ("high", "low"):
            raise ConfigError(f"map.resolution debe ser 'high' o 'low' (recibido {map_settings.resolution!r})")
        if map_settings.lowres_method not in ("gaussian", "upward"):
            raise ConfigError(f"map.lowres_method desconocido: {map_settings.lowres_method!r}")
        if map_settings.bump_count is None and map_settings.bumps_per_km2 is None and not map_settings.grid_path:
            raise ConfigError("map: defina bump_count o bumps_per_km2 (o grid_path)")

        packet_loss = float(raw["comm"]["packet_loss"])
        if not 0 <= packet_loss < 1:
            raise ConfigError(f"comm.packet_loss debe estar en [0, 1) (recibido {packet_loss})")

        sweep = []
        for i, case in enumerate(raw.get("sweep") or []):
            if not isinstance(case, dict) or "name" not in case:
                raise ConfigError(f"sweep[{i}] debe tener 'name' y 'overrides'")
            extra = set(case) - {"name", "overrides"}
            if extra:
                raise ConfigError(f"sweep[{i}]: claves desconocidas {sorted(extra)}")
            sweep.append(SweepCase(name=str(case["name"]), overrides=dict(case.get("overrides") or {})))

        return TrialConfig(
            name=str(raw["name"]),
            group_size=group_size,
            duration=duration,
            ts=ts,
            odometry_substeps=int(raw["odometry_substeps"]),
            init_position_sigma=float(raw["init_position_sigma"]),
            warmup=float(raw["warmup_s"]),
            master_seed=int(raw["master_seed"]),
            n_trials=int(raw["n_trials"]),
            workers=int(raw["workers"]),
            noise=noise,
            reference=reference,
            controller=controller,
            ekf=ekf,
            pf=pf_cfg,
            pf_all_uavs=bool(pf["all_uavs"]),
            map=map_settings,
            packet_loss=packet_loss,
            sweep=sweep,
            raw=raw,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"configuración inválida: {e}") from e


def load_config(path: PathLike) -> TrialConfig:
    """Lee un YAML de experimento (yaml.safe_load) y lo completa con los valores por defecto."""
    cfg_path = Path(path)
    with open(cfg_path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{cfg_path}: el documento YAML debe ser un mapa")
    cfg = from_dict(data)
    logger.info(f"📄 Configuración '{cfg.name}' cargada de {cfg_path.as_posix()}")
    return cfg


def set_dotted(data: Dict[str, Any], dotted_key: str, value: Any) -> None:
    """Asigna `value` en `data` siguiendo una ruta 'a.b.c'."""
    parts = dotted_key.split(".")
    node = data
    for part in parts[:-1]:
        if part not in node or not isinstance(node[part], dict):
            raise ConfigError(f"ruta de override inválida: '{dotted_key}'")
        node = node[part]
    if parts[-1] not in node:
        raise ConfigError(f"ruta de override inválida: '{dotted_key}'")
    node[parts[-1]] = value


def with_overrides(cfg: TrialConfig, overrides: Dict[str, Any], name: Optional[str] = None) -> TrialConfig:
    """Copia de `cfg` con overrides de rutas punteadas (sin el bloque sweep)."""
    data = cfg.to_dict()
    data["sweep"] = []
    for key, value in (overrides or {}).items():
        set_dotted(data, key, value)
    if name is not None:
        data["name"] = name
    return from_dict(data)


def sweep_cases(cfg: TrialConfig) -> List[Tuple[str, TrialConfig]]:
    """(nombre, config) por caso del barrido; sin bloque sweep devuelve el caso base."""
    if not cfg.sweep:
        return [(cfg.name, with_overrides(cfg, {}))]
    return [(case.name, with_overrides(cfg, case.overrides, name=case.name)) for case in cfg.sweep]
