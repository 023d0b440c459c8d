# harness/monte_carlo.py
"""
Lotes Monte Carlo y barridos.

- Semillas por ensayo derivadas de la semilla maestra con SeedSequence.spawn.
- Con workers > 1 los ensayos se reparten en un ProcessPoolExecutor; el mapa se
  entrega una vez por proceso (initializer). La agregación sigue el orden de ensayo,
  no el de finalización.
- Los barridos reutilizan las mismas semillas en todos los casos (números aleatorios comunes).
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from harness.maps import maps_for_cases
from harness.metrics import boxplot_stats, empirical_cdf, summarize
from harness.trial import TrialResult, run_trial
from harness.trial_config import TrialConfig, sweep_cases
from magmap.grid import MagneticMap

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = (
    "avg_position_error",
    "dr_avg_error",
    "dr_final_error",
    "measured_pair_error",
    "unmeasured_pair_error",
)
FLAG_COLUMNS = ("weight_resets", "off_map_updates", "left_map", "incomplete_packets")


def trial_seeds(master_seed: int, n_trials: int) -> List[int]:
    """Semillas de 64 bits reproducibles, una por ensayo."""
    children = np.random.SeedSequence(master_seed).spawn(n_trials)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


@dataclass
class MonteCarloSummary:
    """Agregado de un lote: tabla por ensayo, medias/desviaciones, CDF y cuartiles."""

    case: str
    group_size: int
    results: List[TrialResult]
    trials: pd.DataFrame
    stats: Dict[str, Dict[str, float]]
    cdf: pd.DataFrame
    boxplot: pd.DataFrame
    flags: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "group_size": self.group_size,
            "n_trials": int(len(self.trials)),
            "stats": self.stats,
            "flags": self.flags,
            "boxplot": self.boxplot.to_dict(orient="records"),
            "cdf": self.cdf.to_dict(orient="list"),
        }


def summarize_trials(case: str, trials: pd.DataFrame, results: Optional[List[TrialResult]] = None) -> MonteCarloSummary:
    """
    Agrega una tabla trials.csv (o su DataFrame equivalente).
    Es la misma función que usa `analyze` para recomputar desde disco.
    """
    trials = trials.sort_values("trial", kind="mergesort").reset_index(drop=True)
    stats = {col: summarize(trials[col]) for col in SUMMARY_COLUMNS if col in trials}
    flags = {col: int(trials[col].sum()) for col in FLAG_COLUMNS if col in trials}

    pf_box = boxplot_stats(trials["avg_position_error"])
    dr_box = boxplot_stats(trials["dr_avg_error"])
    boxplot = pd.DataFrame([{"series": "pf", **pf_box}, {"series": "dead_reckoning", **dr_box}])

    group_size = int(trials["group_size"].iloc[0]) if len(trials) else 0
    return MonteCarloSummary(
        case=case,
        group_size=group_size,
        results=results or [],
        trials=trials,
        stats=stats,
        cdf=empirical_cdf(trials["avg_position_error"]),
        boxplot=boxplot,
        flags=flags,
    )


# --------------------------------------------------------------------------------------
# Pool de procesos
# --------------------------------------------------------------------------------------
_worker_state: Dict[str, object] = {}


def _init_worker(cfg: TrialConfig, magnetic_map: MagneticMap, keep_traces: bool) -> None:
    _worker_state["cfg"] = cfg
    _worker_state["map"] = magnetic_map
    _worker_state["keep_traces"] = keep_traces


def _run_indexed(job: Tuple[int, int]) -> TrialResult:
    index, seed = job
    return run_trial(
        _worker_state["cfg"],
        seed,
        magnetic_map=_worker_state["map"],
        trial_index=index,
        keep_traces=_worker_state["keep_traces"],
    )


def run_monte_carlo(
    cfg: TrialConfig,
    n_trials: Optional[int] = None,
    master_seed: Optional[int] = None,
    workers: Optional[int] = None,
    magnetic_map: Optional[MagneticMap] = None,
    keep_traces: bool = False,
) -> MonteCarloSummary:
    """
    Ejecuta `n_trials` ensayos de `cfg` y agrega los resultados.

    Args:
        cfg: configuración del caso
        n_trials: por defecto cfg.n_trials
        master_seed: por defecto cfg.master_seed
        workers: procesos; 1 = secuencial en este proceso
        magnetic_map: mapa ya construido (si no, se construye para este caso)
        keep_traces: conservar trazas por paso en cada TrialResult

    Returns:
        MonteCarloSummary
    """
    n_trials = cfg.n_trials if n_trials is None else int(n_trials)
    if n_trials < 1:
        raise ValueError(f"n_trials debe ser >= 1 (recibido {n_trials})")
    master_seed = cfg.master_seed if master_seed is None else int(master_seed)
    workers = cfg.workers if workers is None else int(workers)
    if magnetic_map is None:
        magnetic_map = maps_for_cases([cfg])[0]

    seeds = trial_seeds(master_seed, n_trials)
    jobs = list(enumerate(seeds))
    logger.info(
        f"⏳ Caso '{cfg.name}': {n_trials} ensayos, N={cfg.group_size}, "
        f"{cfg.duration:.0f} s, {cfg.pf.particle_count} partículas, workers={workers}"
    )

    if workers <= 1:
        results = [run_trial(cfg, seed, magnetic_map, trial_index=i, keep_traces=keep_traces) for i, seed in jobs]
    else:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(cfg, magnetic_map, keep_traces),
        ) as executor:
            results = list(executor.map(_run_indexed, jobs))

    results.sort(key=lambda r: r.trial)
    trials = pd.DataFrame([r.to_row() for r in results])
    summary = summarize_trials(cfg.name, trials, results)

    flagged = sum(1 for r in results if r.flags.has_issues)
    pos = summary.stats["avg_position_error"]
    logger.info(
        f"✅ Caso '{cfg.name}': error medio {pos['mean']:.2f} ± {pos['std']:.2f} m "
        f"({flagged} ensayos con banderas de calidad)"
    )
    return summary


def run_sweep(
    cfg: TrialConfig,
    n_trials: Optional[int] = None,
    master_seed: Optional[int] = None,
    workers: Optional[int] = None,
    keep_traces: bool = False,
) -> List[MonteCarloSummary]:
    """
    Un lote Monte Carlo por caso del bloque `sweep`, con las mismas semillas en todos.
    Los casos que comparten ajustes de mapa vuelan sobre el mismo mapa base.
    """
    cases = sweep_cases(cfg)
    case_cfgs = [c for _, c in cases]
    maps = maps_for_cases(case_cfgs)
    logger.info(f"🔁 Barrido '{cfg.name}': {len(cases)} casos")
    return [
        run_monte_carlo(case_cfg, n_trials, master_seed, workers, magnetic_map=case_map, keep_traces=keep_traces)
        for case_cfg, case_map in zip(case_cfgs, maps)
    ]
