# magnetic_pf/resampling.py
"""Remuestreo sistemático y tamaño efectivo de muestra."""
from __future__ import annotations

import numpy as np


def effective_sample_size(weights: np.ndarray) -> float:
    """ESS = 1 / Σ w² (pesos normalizados)."""
    w = np.asarray(weights, dtype=float)
    return float(1.0 / np.sum(w * w))


def systematic_resample_indices(weights: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    Índices del remuestreo sistemático: u_m = (U + m) / M con un único U ~ U[0, 1).

    Las partículas con peso 0 nunca se seleccionan (searchsorted con side='right').
    """
    w = np.asarray(weights, dtype=float)
    m = w.size
    positions = (rng.random() + np.arange(m)) / m
    cumulative = np.cumsum(w)
    cumulative[-1] = 1.0
    idx = np.searchsorted(cumulative, positions, side="right")
    return np.clip(idx, 0, m - 1)
