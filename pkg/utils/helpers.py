"""
Funciones auxiliares y utilidades numéricas compartidas
"""

from __future__ import annotations

import io
import math
import sys
from typing import Optional

import numpy as np


def setup_console_encoding():
    """Configura encoding UTF-8 para la consola (necesario en Windows)"""
    if sys.platform.startswith("win"):
        sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding='utf-8')
        sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding='utf-8')


def wrap_angle(angle):
    """
    Envuelve un ángulo (o array de ángulos) al intervalo (-π, π].

    Args:
        angle: escalar o np.ndarray en radianes

    Returns:
        Mismo tipo que la entrada, envuelto
    """
    wrapped = math.pi - np.mod(math.pi - np.asarray(angle, dtype=float), 2.0 * math.pi)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def circular_mean(angles: np.ndarray, weights: Optional[np.ndarray] = None) -> float:
    """Media circular ponderada: atan2 de las sumas ponderadas de seno y coseno."""
    angles = np.asarray(angles, dtype=float)
    if weights is None:
        weights = np.full(angles.shape, 1.0 / max(angles.size, 1))
    s = float(np.sum(weights * np.sin(angles)))
    c = float(np.sum(weights * np.cos(angles)))
    return wrap_angle(math.atan2(s, c))


def safe_float(value, default=0.0) -> float:
    """
    Convierte cualquier valor a float de forma segura

    Args:
        value: Valor a convertir (str, int, float, None)
        default: Valor por defecto si la conversión falla

    Returns:
        float: Valor convertido o default
    """
    if value is None:
        return default
    try:
        return float(value)
    except (TypeError, ValueError):
        return default


def fmt_optional(value: Optional[float], digits: int = 3, empty: str = "N/A") -> str:
    """Formatea un float opcional para tablas de texto (NaN/None -> 'N/A')."""
    v = safe_float(value, default=math.nan)
    if math.isnan(v):
        return empty
    return f"{v:.{digits}f}"
