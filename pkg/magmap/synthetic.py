# magmap/synthetic.py
"""
Generación de mapas sintéticos y variantes de baja resolución.

- generate_synthetic: línea base + suma de gaussianas isótropas deterministas por semilla.
- degrade_resolution: filtro gaussiano paso-bajo (scipy.ndimage.gaussian_filter).
- upward_continue: continuación ascendente en el dominio de Fourier, exp(-|k|·Δh).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.ndimage import gaussian_filter

from magmap.grid import MagneticMap

logger = logging.getLogger(__name__)

# Ventana de ±_WINDOW_SIGMAS·sigma por gaussiana: fuera, exp(-r²/2σ²) < 1e-17 y se pierde
# por debajo del redondeo de float64 frente a la amplitud
_WINDOW_SIGMAS = 9.0


class InvalidSpecError(ValueError):
    """Especificación de mapa sintético inválida."""


@dataclass(frozen=True)
class SyntheticBump:
    east: float
    north: float
    amplitude: float
    sigma: float


@dataclass(frozen=True)
class SyntheticMapSpec:
    """
    Descripción de un mapa sintético.

    Args:
        seed: semilla del generador
        extent: (ancho este, alto norte) en metros
        cell_size: tamaño de celda (m)
        baseline: nivel base (nT)
        bump_count: número de gaussianas
        bump_amplitude_range: intervalo de amplitudes (nT), puede incluir negativos
        bump_sigma_range: intervalo de desviaciones típicas (m)
        origin_east / origin_north: nodo sur-oeste (m)
    """

    seed: int
    extent: Tuple[float, float]
    cell_size: float
    baseline: float = 0.0
    bump_count: int = 0
    bump_amplitude_range: Tuple[float, float] = (-300.0, 300.0)
    bump_sigma_range: Tuple[float, float] = (250.0, 1500.0)
    origin_east: float = 0.0
    origin_north: float = 0.0

    def validate(self) -> None:
        width, height = self.extent
        if not (width > 0 and height > 0):
            raise InvalidSpecError(f"extent debe ser positivo (recibido {self.extent})")
        if not self.cell_size > 0:
            raise InvalidSpecError(f"cell_size debe ser > 0 (recibido {self.cell_size})")
        if width < self.cell_size or height < self.cell_size:
            raise InvalidSpecError("extent debe cubrir al menos una celda en cada eje")
        if self.bump_count < 0:
            raise InvalidSpecError(f"bump_count debe ser >= 0 (recibido {self.bump_count})")
        a_lo, a_hi = self.bump_amplitude_range
        if not (np.isfinite(a_lo) and np.isfinite(a_hi) and a_lo <= a_hi):
            raise InvalidSpecError(f"bump_amplitude_range inválido: {self.bump_amplitude_range}")
        s_lo, s_hi = self.bump_sigma_range
        if not (s_lo > 0 and np.isfinite(s_hi) and s_lo <= s_hi):
            raise InvalidSpecError(f"bump_sigma_range inválido: {self.bump_sigma_range}")

    @property
    def shape(self) -> Tuple[int, int]:
        """(n_rows, n_cols) de la rejilla resultante."""
        width, height = self.extent
        n_cols = int(round(width / self.cell_size)) + 1
        n_rows = int(round(height / self.cell_size)) + 1
        return n_rows, n_cols


def draw_bumps(spec: SyntheticMapSpec) -> List[SyntheticBump]:
    """Sortea centros, amplitudes y anchuras de forma determinista a partir de `spec.seed`."""
    rng = np.random.default_rng(spec.seed)
    width, height = spec.extent
    n = spec.bump_count
    east = spec.origin_east + rng.uniform(0.0, width, n)
    north = spec.origin_north + rng.uniform(0.0, height, n)
    amplitude = rng.uniform(*spec.bump_amplitude_range, n)
    sigma = rng.uniform(*spec.bump_sigma_range, n)
    return [SyntheticBump(float(e), float(nn), float(a), float(s)) for e, nn, a, s in zip(east, north, amplitude, sigma)]


def render_bumps(spec: SyntheticMapSpec, bumps: Sequence[SyntheticBump]) -> MagneticMap:
    """
    Evalúa baseline + Σ A·exp(-r²/2σ²) sobre la rejilla descrita por `spec`.

    Cada gaussiana se suma sólo en ±9σ alrededor de su centro; el resto de la suma
    queda por debajo de 1e-17·|A|, así que el campo coincide con la suma completa
    hasta el redondeo.
    """
    spec.validate()
    n_rows, n_cols = spec.shape
    eastings = spec.origin_east + np.arange(n_cols) * spec.cell_size
    northings = spec.origin_north + np.arange(n_rows) * spec.cell_size  # ascendente
    field = np.full((n_rows, n_cols), float(spec.baseline))

    for b in bumps:
        half = _WINDOW_SIGMAS * b.sigma
        c0 = max(int(np.floor((b.east - half - spec.origin_east) / spec.cell_size)), 0)
        c1 = min(int(np.ceil((b.east + half - spec.origin_east) / spec.cell_size)) + 1, n_cols)
        r0 = max(int(np.floor((b.north - half - spec.origin_north) / spec.cell_size)), 0)
        r1 = min(int(np.ceil((b.north + half - spec.origin_north) / spec.cell_size)) + 1, n_rows)
        if c0 >= c1 or r0 >= r1:
            continue
        de = eastings[c0:c1] - b.east
        dn = northings[r0:r1] - b.north
        # separable: exp(-(de²+dn²)/2σ²) = exp(-dn²/2σ²)·exp(-de²/2σ²)
        gn = np.exp(-0.5 * (dn / b.sigma) ** 2)
        ge = np.exp(-0.5 * (de / b.sigma) ** 2)
        field[r0:r1, c0:c1] += b.amplitude * np.outer(gn, ge)

    # fila 0 del mapa = más al norte
    return MagneticMap(spec.origin_east, spec.origin_north, spec.cell_size, np.flipud(field))


def generate_synthetic(spec: SyntheticMapSpec) -> MagneticMap:
    """
    Mapa sintético = baseline + suma de `bump_count` gaussianas isótropas.
    Función pura de `spec`: misma semilla -> matrices idénticas bit a bit.

    Raises:
        InvalidSpecError: extensión o tamaño de celda no positivos, rangos inválidos
    """
    spec.validate()
    bumps = draw_bumps(spec)
    magnetic_map = render_bumps(spec, bumps)
    logger.info(
        f"🗺️  Mapa sintético generado: {magnetic_map.n_rows}x{magnetic_map.n_cols} nodos, "
        f"{len(bumps)} anomalías, semilla={spec.seed}"
    )
    return magnetic_map


def degrade_resolution(magnetic_map: MagneticMap, smoothing_sigma: float) -> MagneticMap:
    """
    Variante de baja resolución por filtrado gaussiano.

    Parámetros
    ----------
    magnetic_map : MagneticMap
        Mapa de alta resolución.
    smoothing_sigma : float
        Desviación típica del núcleo en metros (se divide por cell_size).

    Retorna
    -------
    MagneticMap
        Misma geometría, valores suavizados. Con sigma 0 devuelve el mismo mapa.

    Notas
    -----
    - mode="reflect" conserva la media y no aumenta la varianza de la matriz.
    """
    if smoothing_sigma < 0:
        raise ValueError(f"smoothing_sigma debe ser >= 0 (recibido {smoothing_sigma})")
    if smoothing_sigma == 0:
        return magnetic_map
    sigma_cells = smoothing_sigma / magnetic_map.cell_size
    smoothed = gaussian_filter(np.asarray(magnetic_map.values, dtype=float), sigma=sigma_cells, mode="reflect")
    return magnetic_map.with_values(smoothed)


def upward_continue(magnetic_map: MagneticMap, height: float, pad_fraction: float = 0.5) -> MagneticMap:
    """
    Continuación ascendente de un campo potencial Δh metros: multiplica el espectro por exp(-|k|·Δh).

    La rejilla se extiende por reflexión (`pad_fraction` del tamaño en cada borde)
    antes de la FFT para limitar los efectos de periodicidad.
    """
    if height < 0:
        raise ValueError(f"height debe ser >= 0 (recibido {height})")
    if height == 0:
        return magnetic_map

    values = np.asarray(magnetic_map.values, dtype=float)
    n_rows, n_cols = values.shape
    pr = min(int(n_rows * pad_fraction), n_rows - 1)
    pc = min(int(n_cols * pad_fraction), n_cols - 1)
    mean = float(values.mean())
    padded = np.pad(values - mean, ((pr, pr), (pc, pc)), mode="reflect")

    ky = 2.0 * np.pi * np.fft.fftfreq(padded.shape[0], d=magnetic_map.cell_size)
    kx = 2.0 * np.pi * np.fft.rfftfreq(padded.shape[1], d=magnetic_map.cell_size)
    k = np.sqrt(ky[:, None] ** 2 + kx[None, :] ** 2)
    spectrum = np.fft.rfft2(padded) * np.exp(-k * height)
    continued = np.fft.irfft2(spectrum, s=padded.shape)[pr:pr + n_rows, pc:pc + n_cols] + mean
    return magnetic_map.with_values(continued)


def lowres_variant(
    magnetic_map: MagneticMap,
    method: str = "gaussian",
    smoothing_sigma: Optional[float] = None,
    height: Optional[float] = None,
) -> MagneticMap:
    """Selecciona el modelo de baja resolución ('gaussian' | 'upward')."""
    if method == "gaussian":
        return degrade_resolution(magnetic_map, float(smoothing_sigma or 0.0))
    if method == "upward":
        return upward_continue(magnetic_map, float(height or 0.0))
    raise ValueError(f"método de baja resolución desconocido: {method!r}")
