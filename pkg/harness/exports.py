# harness/exports.py
"""
Exportación de resultados a disco.

- trials.csv               : una fila por ensayo (sin marcas de tiempo -> idéntico byte a byte
                             para la misma configuración y semilla)
- cdf_<case>.csv           : CDF empírica del error medio de posición por ensayo
- boxplot_<case>.csv       : cuartiles del error (filtro vs dead reckoning)
- summary.json             : medias, desviaciones, banderas y CDF por caso
- traces/<case>/*_<i>.csv  : trazas por paso opcionales (verdad, EKF, PF, paquetes)

Resolución de rutas (_resolve_out_path):
- Si out_dir se especifica → <out_dir>/<default_name>
- Si default_name incluye ruta (relativa con directorio o absoluta) → se respeta TAL CUAL.
- En caso contrario → <Config.OUTPUT_DIR>/run_<ts>/<default_name>
"""
from __future__ import annotations

import json
import logging
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

import pandas as pd

from config import Config
from harness.monte_carlo import MonteCarloSummary, summarize_trials

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

TRACE_COLUMNS = {
    "truth": ["k", "uav", "x_true", "y_true", "theta_true"],
    "ekf": ["k", "uav", "x_est", "y_est", "theta_est", "cov_trace"],
    "pf": ["k", "uav", "x_pf", "y_pf", "theta_pf", "gamma_pf", "ess"],
    "packets": ["k", "uav", "field", "value"],
}


def _resolve_out_path(default_name: str, out_dir: Optional[PathLike]) -> Path:
    if out_dir is not None:
        rd = Path(out_dir)
        rd.mkdir(parents=True, exist_ok=True)
        return rd / default_name

    p = Path(default_name)
    if p.is_absolute() or len(p.parts) > 1:
        p.parent.mkdir(parents=True, exist_ok=True)
        return p

    ts = datetime.now(timezone.utc).strftime("%Y%m%d_%H%M%S")
    rd = Path(Config.OUTPUT_DIR) / f"run_{ts}"
    rd.mkdir(parents=True, exist_ok=True)
    return rd / default_name


def _safe_case(case: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in case)


def _clean_json(obj):
    """NaN/inf no son JSON válido: se escriben como null."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean_json(v) for v in obj]
    return obj


def export_trials_to_csv(summary: MonteCarloSummary, filename: str = "trials.csv", *, out_dir: Optional[PathLike] = None) -> Path:
    """Tabla por ensayo. Siempre crea el archivo."""
    out_path = _resolve_out_path(filename, out_dir)
    summary.trials.to_csv(out_path, index=False)
    logger.info(f"📝 {len(summary.trials)} ensayos exportados a {out_path.as_posix()}")
    return out_path


def export_cdf_to_csv(summary: MonteCarloSummary, *, out_dir: Optional[PathLike] = None) -> Path:
    out_path = _resolve_out_path(f"cdf_{_safe_case(summary.case)}.csv", out_dir)
    summary.cdf.to_csv(out_path, index=False)
    return out_path


def export_boxplot_to_csv(summary: MonteCarloSummary, *, out_dir: Optional[PathLike] = None) -> Path:
    out_path = _resolve_out_path(f"boxplot_{_safe_case(summary.case)}.csv", out_dir)
    summary.boxplot.to_csv(out_path, index=False)
    return out_path


def export_summary_to_json(
    summaries: Iterable[MonteCarloSummary],
    filename: str = "summary.json",
    *,
    out_dir: Optional[PathLike] = None,
    config_echo: Optional[dict] = None,
) -> Path:
    out_path = _resolve_out_path(filename, out_dir)
    payload = {
        "cases": [s.to_dict() for s in summaries],
    }
    if config_echo is not None:
        payload["config"] = config_echo
    with open(out_path, "w", encoding="utf-8") as f:
        json.dump(_clean_json(payload), f, indent=2, ensure_ascii=False)
    logger.info(f"📝 Resumen escrito en {out_path.as_posix()}")
    return out_path


def export_traces(summary: MonteCarloSummary, *, out_dir: PathLike) -> List[Path]:
    """Trazas por paso de cada ensayo que las conserve: <out_dir>/traces/<case>/<tipo>_<i>.csv"""
    trace_dir = Path(out_dir) / "traces" / _safe_case(summary.case)
    written = []
    for result in summary.results:
        if not result.traces:
            continue
        for kind, df in result.traces.items():
            frame = df if not df.empty else pd.DataFrame(columns=TRACE_COLUMNS[kind])
            path = _resolve_out_path(f"{kind}_{result.trial}.csv", trace_dir)
            frame.to_csv(path, index=False)
            written.append(path)
    if written:
        logger.info(f"📁 {len(written)} trazas escritas en {trace_dir.as_posix()}")
    return written


def export_case(summary: MonteCarloSummary, out_dir: PathLike, trials_subdir: bool = False) -> Dict[str, Path]:
    """trials.csv + cdf + boxplot (+ trazas) de un caso."""
    out_dir = Path(out_dir)
    trials_dir = out_dir / _safe_case(summary.case) if trials_subdir else out_dir
    paths = {
        "trials": export_trials_to_csv(summary, out_dir=trials_dir),
        "cdf": export_cdf_to_csv(summary, out_dir=out_dir),
        "boxplot": export_boxplot_to_csv(summary, out_dir=out_dir),
    }
    export_traces(summary, out_dir=out_dir)
    return paths


def load_trials(in_dir: PathLike) -> List[MonteCarloSummary]:
    """
    Recalcula los agregados a partir de todos los trials.csv bajo `in_dir`.
    Un mismo fichero puede contener varios casos (columna `case`).
    """
    in_dir = Path(in_dir)
    files = sorted(in_dir.rglob("trials.csv"))
    if not files:
        raise FileNotFoundError(f"no hay trials.csv bajo {in_dir.as_posix()}")
    frames = [pd.read_csv(f) for f in files]
    df = pd.concat(frames, ignore_index=True)
    summaries = []
    for case, group in df.groupby("case", sort=False):
        summaries.append(summarize_trials(str(case), group))
    logger.info(f"📂 {len(files)} ficheros trials.csv leídos, {len(summaries)} casos")
    return summaries
