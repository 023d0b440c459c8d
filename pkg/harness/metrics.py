"""
harness/metrics.py

Métricas puras para evaluar ensayos de localización cooperativa.
No depende del simulador y puede importarse desde tests u otros módulos.

Funciones expuestas:
- pair_distance_errors(truth_positions, est_positions)
- compute_distance_errors(truth_positions, est_positions, n_uavs)
- compute_position_errors(truth_xy, est_xy, dr_xy, ts, warmup)
- empirical_cdf(values)
- boxplot_stats(values)
- summarize(values)

Notas de uso:
- Las posiciones son arrays (T, N, 2) en metros; los pasos sin estimado se marcan con NaN
  y se excluyen de los promedios.
- Los pares medidos son los de E0 ∪ E1 ∪ E2; el resto nunca se mide con ranging.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple, Union

import numpy as np
import pandas as pd

from comm.schedule import measured_pairs, unmeasured_pairs

Number = Union[int, float, np.number]
ArrayLike = Union[Iterable[Number], np.ndarray, pd.Series]


__all__ = [
    "DistanceErrors",
    "PositionErrors",
    "pair_distance_errors",
    "compute_distance_errors",
    "compute_position_errors",
    "empirical_cdf",
    "boxplot_stats",
    "summarize",
]


def _to_series(x: ArrayLike, name: str) -> pd.Series:
    """Convierte entrada a pd.Series y elimina NaNs/Inf."""
    if isinstance(x, pd.Series):
        s = x.astype(float).copy()
    else:
        s = pd.Series(list(x), dtype=float, name=name)
    s = s.replace([np.inf, -np.inf], np.nan).dropna()
    return s


@dataclass
class DistanceErrors:
    """Error medio de distancia entre UAV (m). None si la categoría no tiene pares (N/A)."""

    measured: Optional[float]
    unmeasured: Optional[float]
    per_pair: Dict[Tuple[int, int], float]


@dataclass
class PositionErrors:
    series: np.ndarray
    dr_series: np.ndarray
    average: float
    dr_average: float
    dr_final: float


def pair_distance_errors(truth_positions: np.ndarray, est_positions: np.ndarray) -> Dict[Tuple[int, int], np.ndarray]:
    """
    Error absoluto por paso |d̂_ij - d_ij| para cada par i < j (ids base 1).

    Parámetros
    ----------
    truth_positions, est_positions : np.ndarray
        Arrays (T, N, 2).

    Retorna
    -------
    dict
        (i, j) -> array (T,) con NaN donde no hay estimado.
    """
    truth = np.asarray(truth_positions, dtype=float)
    est = np.asarray(est_positions, dtype=float)
    n = truth.shape[1]
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            d_true = np.linalg.norm(truth[:, i] - truth[:, j], axis=-1)
            d_est = np.linalg.norm(est[:, i] - est[:, j], axis=-1)
            out[(i + 1, j + 1)] = np.abs(d_est - d_true)
    return out


def compute_distance_errors(truth_positions: np.ndarray, est_positions: np.ndarray, n_uavs: int) -> DistanceErrors:
    """
    Error medio de distancia para pares medidos y no medidos.

    Cada par se promedia en el tiempo y luego se promedia sobre los pares de su categoría.
    Con N <= 4 no hay pares sin medir y `unmeasured` es None; con N = 1 ambos son None.
    """
    per_pair_series = pair_distance_errors(truth_positions, est_positions)
    per_pair = {}
    for pair, series in per_pair_series.items():
        s = _to_series(series, "pair_error")
        per_pair[pair] = float(s.mean()) if not s.empty else float("nan")

    def _category_mean(pairs) -> Optional[float]:
        values = [per_pair[p] for p in sorted(pairs) if not np.isnan(per_pair[p])]
        if not values:
            return None
        return float(np.mean(values))

    return DistanceErrors(
        measured=_category_mean(measured_pairs(n_uavs)),
        unmeasured=_category_mean(unmeasured_pairs(n_uavs)),
        per_pair=per_pair,
    )


def compute_position_errors(
    truth_xy: np.ndarray,
    est_xy: np.ndarray,
    dr_xy: np.ndarray,
    ts: float,
    warmup: float = 0.0,
) -> PositionErrors:
    """
    Error de posición euclídeo por paso del estimado y de la sombra de dead reckoning.

    Parámetros
    ----------
    truth_xy, est_xy, dr_xy : np.ndarray
        Arrays (T, 2) del UAV reportado; el índice t corresponde a t·ts segundos.
    ts : float
        Periodo de muestreo (s).
    warmup : float
        Los promedios usan sólo los pasos con t·ts >= warmup. Si no queda ninguno,
        se promedia la serie entera.

    Retorna
    -------
    PositionErrors
        Series y promedios; `dr_final` es el error del último paso de la sombra.
    """
    truth = np.asarray(truth_xy, dtype=float)
    err = np.linalg.norm(np.asarray(est_xy, dtype=float) - truth, axis=-1)
    dr_err = np.linalg.norm(np.asarray(dr_xy, dtype=float) - truth, axis=-1)

    times = np.arange(err.size) * ts
    window = times >= warmup - 1e-9
    if not window.any():
        window = np.ones_like(window)

    avg = _to_series(err[window], "position_error")
    dr_avg = _to_series(dr_err[window], "dr_error")
    dr_all = _to_series(dr_err, "dr_error")
    return PositionErrors(
        series=err,
        dr_series=dr_err,
        average=float(avg.mean()) if not avg.empty else float("nan"),
        dr_average=float(dr_avg.mean()) if not dr_avg.empty else float("nan"),
        dr_final=float(dr_all.iloc[-1]) if not dr_all.empty else float("nan"),
    )


def empirical_cdf(values: ArrayLike) -> pd.DataFrame:
    """
    CDF empírica de los errores por ensayo.

    Retorna
    -------
    pd.DataFrame
        Columnas `error`, `cdf`. Empieza en (mínimo, 0) y termina en (máximo, 1);
        no decreciente.
    """
    s = _to_series(values, "error").sort_values(kind="mergesort").reset_index(drop=True)
    if s.empty:
        return pd.DataFrame({"error": [], "cdf": []})
    n = len(s)
    errors = np.concatenate([[s.iloc[0]], s.to_numpy()])
    cdf = np.concatenate([[0.0], np.arange(1, n + 1) / n])
    return pd.DataFrame({"error": errors, "cdf": cdf})


def boxplot_stats(values: ArrayLike) -> Dict[str, float]:
    """min, q1, mediana, q3, max, media, desviación (ddof=0) y n."""
    s = _to_series(values, "error")
    if s.empty:
        nan = float("nan")
        return {"min": nan, "q1": nan, "median": nan, "q3": nan, "max": nan, "mean": nan, "std": nan, "n": 0}
    return {
        "min": float(s.min()),
        "q1": float(s.quantile(0.25)),
        "median": float(s.median()),
        "q3": float(s.quantile(0.75)),
        "max": float(s.max()),
        "mean": float(s.mean()),
        "std": float(s.std(ddof=0)),
        "n": int(s.size),
    }


def summarize(values: ArrayLike) -> Dict[str, float]:
    """Media y desviación típica poblacional (ddof=0) de una columna; NaN si está vacía."""
    s = _to_series(values, "value")
    if s.empty:
        return {"mean": float("nan"), "std": float("nan"), "n": 0}
    return {"mean": float(s.mean()), "std": float(s.std(ddof=0)), "n": int(s.size)}
