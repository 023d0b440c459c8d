# magmap/grid.py
"""
Mapa de anomalía magnética sobre una rejilla regular y su lectura/escritura.

Convenciones:
- Coordenadas locales este/norte en metros (tierra plana).
- `values[r, c]` guarda la fila r en el orden del fichero: la fila 0 es la más al norte.
  La fila r está en la northing `origin_north + (n_rows - 1 - r) * cell_size`.
- El origen es el nodo sur-oeste de la rejilla.
- El muestreo es interpolación bilineal (RegularGridInterpolator, method="linear").

Formato de fichero de rejilla (texto):
    ncols <int>
    nrows <int>
    origin_east <float>
    origin_north <float>
    cellsize <float>
    <nrows líneas de ncols floats, la fila más al norte primero>
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from scipy.interpolate import RegularGridInterpolator

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_HEADER_KEYS = ("ncols", "nrows", "origin_east", "origin_north", "cellsize")


class OutOfBoundsError(ValueError):
    """Punto de consulta fuera de la extensión del mapa."""


class GridParseError(ValueError):
    """Fichero de rejilla mal formado."""


class DimensionMismatchError(GridParseError):
    """La cabecera y el cuerpo del fichero no coinciden en dimensiones."""


@dataclass(frozen=True, eq=False)
class MagneticMap:
    """
    Rejilla uniforme de anomalía magnética (nT). Inmutable tras construirse.

    Args:
        origin_east: coordenada este del nodo sur-oeste (m)
        origin_north: coordenada norte del nodo sur-oeste (m)
        cell_size: tamaño de celda en ambos ejes (m)
        values: matriz (n_rows, n_cols), fila 0 = más al norte
    """

    origin_east: float
    origin_north: float
    cell_size: float
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError(f"values debe ser 2D, recibido ndim={values.ndim}")
        if not np.isfinite(self.cell_size) or self.cell_size <= 0:
            raise ValueError(f"cell_size debe ser finito y > 0 (recibido {self.cell_size})")
        if values.shape[0] < 2 or values.shape[1] < 2:
            raise ValueError(f"la rejilla necesita al menos 2x2 nodos (recibido {values.shape})")
        if not np.all(np.isfinite(values)):
            raise ValueError("la rejilla contiene valores no finitos")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "origin_east", float(self.origin_east))
        object.__setattr__(self, "origin_north", float(self.origin_north))
        object.__setattr__(self, "cell_size", float(self.cell_size))

    # ------------------------------------------------------------------
    # Geometría
    # ------------------------------------------------------------------
    @property
    def n_rows(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_cols(self) -> int:
        return int(self.values.shape[1])

    @property
    def east_max(self) -> float:
        return self.origin_east + (self.n_cols - 1) * self.cell_size

    @property
    def north_max(self) -> float:
        return self.origin_north + (self.n_rows - 1) * self.cell_size

    @property
    def extent(self) -> Tuple[float, float, float, float]:
        """(east_min, east_max, north_min, north_max)"""
        return (self.origin_east, self.east_max, self.origin_north, self.north_max)

    def eastings(self) -> np.ndarray:
        return self.origin_east + np.arange(self.n_cols) * self.cell_size

    def northings(self) -> np.ndarray:
        """Northings ascendentes (sur -> norte)."""
        return self.origin_north + np.arange(self.n_rows) * self.cell_size

    def contains(self, east, north) -> np.ndarray:
        east = np.asarray(east, dtype=float)
        north = np.asarray(north, dtype=float)
        return (
            (east >= self.origin_east) & (east <= self.east_max)
            & (north >= self.origin_north) & (north <= self.north_max)
        )

    def with_values(self, values: np.ndarray) -> "MagneticMap":
        """Mismo georreferenciado, valores nuevos."""
        return MagneticMap(self.origin_east, self.origin_north, self.cell_size, values)

    # ------------------------------------------------------------------
    # Interpolación
    # ------------------------------------------------------------------
    @cached_property
    def _interpolator(self) -> RegularGridInterpolator:
        # eje 0 = northing ascendente, eje 1 = easting
        return RegularGridInterpolator(
            (self.northings(), self.eastings()),
            np.flipud(self.values).copy(),
            method="linear",
            bounds_error=False,
            fill_value=np.nan,
        )

    def sample_points(self, east, north) -> np.ndarray:
        """
        Muestreo vectorizado. Los puntos fuera de la extensión devuelven NaN
        (el filtro de partículas los convierte en verosimilitud nula).
        """
        east = np.asarray(east, dtype=float)
        north = np.asarray(north, dtype=float)
        shape = np.broadcast(east, north).shape
        pts = np.column_stack([
            np.broadcast_to(north, shape).ravel(),
            np.broadcast_to(east, shape).ravel(),
        ])
        out = self._interpolator(pts)
        out[~self.contains(pts[:, 1], pts[:, 0])] = np.nan
        return out.reshape(shape)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MagneticMap):
            return NotImplemented
        return (
            self.origin_east == other.origin_east
            and self.origin_north == other.origin_north
            and self.cell_size == other.cell_size
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"MagneticMap(origin=({self.origin_east:.1f}, {self.origin_north:.1f}), "
            f"cell={self.cell_size:.1f} m, shape={self.n_rows}x{self.n_cols})"
        )


def sample(magnetic_map: MagneticMap, east: float, north: float) -> float:
    """
    Anomalía (nT) en (east, north) por interpolación bilineal.

    Raises:
        OutOfBoundsError: si el punto queda fuera de la extensión del mapa
    """
    if not bool(magnetic_map.contains(east, north)):
        e0, e1, n0, n1 = magnetic_map.extent
        raise OutOfBoundsError(
            f"punto ({east:.2f}, {north:.2f}) fuera del mapa "
            f"[{e0:.1f}, {e1:.1f}] x [{n0:.1f}, {n1:.1f}]"
        )
    return float(magnetic_map.sample_points(east, north))


# --------------------------------------------------------------------------------------
# Ficheros de rejilla
# --------------------------------------------------------------------------------------
def save_grid(magnetic_map: MagneticMap, path: PathLike) -> Path:
    """Escribe el mapa en formato texto. `%.17g` garantiza ida y vuelta exacta."""
    out_path = Path(path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    header = (
        f"ncols {magnetic_map.n_cols}\n"
        f"nrows {magnetic_map.n_rows}\n"
        f"origin_east {magnetic_map.origin_east!r}\n"
        f"origin_north {magnetic_map.origin_north!r}\n"
        f"cellsize {magnetic_map.cell_size!r}"
    )
    np.savetxt(out_path, magnetic_map.values, fmt="%.17g", header=header, comments="")
    logger.info(f"💾 Rejilla guardada en {out_path.as_posix()} ({magnetic_map.n_rows}x{magnetic_map.n_cols})")
    return out_path


def _parse_header(lines: list, path: Path) -> dict:
    header = {}
    for lineno, key in enumerate(_HEADER_KEYS, start=1):
        if lineno > len(lines):
            raise GridParseError(f"{path}: línea {lineno}: falta la cabecera '{key}'")
        parts = lines[lineno - 1].split()
        if len(parts) != 2 or parts[0].lower() != key:
            raise GridParseError(f"{path}: línea {lineno}: se esperaba '{key} <valor>', encontrado {lines[lineno - 1]!r}")
        try:
            header[key] = int(parts[1]) if key in ("ncols", "nrows") else float(parts[1])
        except ValueError:
            raise GridParseError(f"{path}: línea {lineno}: valor inválido para '{key}': {parts[1]!r}") from None
    return header


def load_grid(path: PathLike) -> MagneticMap:
    """
    Lee un fichero de rejilla.

    Raises:
        GridParseError: cabecera o valores mal formados (con línea y campo)
        DimensionMismatchError: filas/columnas distintas de las declaradas
    """
    in_path = Path(path)
    lines = [ln for ln in in_path.read_text(encoding="utf-8").splitlines()]
    header = _parse_header(lines, in_path)
    ncols, nrows = header["ncols"], header["nrows"]

    body = [(i, ln) for i, ln in enumerate(lines[len(_HEADER_KEYS):], start=len(_HEADER_KEYS) + 1) if ln.strip()]
    if len(body) != nrows:
        raise DimensionMismatchError(f"{in_path}: la cabecera declara {nrows} filas pero hay {len(body)}")

    values = np.empty((nrows, ncols), dtype=float)
    for r, (lineno, ln) in enumerate(body):
        tokens = ln.split()
        if len(tokens) != ncols:
            raise DimensionMismatchError(
                f"{in_path}: línea {lineno}: la cabecera declara {ncols} columnas pero la fila tiene {len(tokens)}"
            )
        for c, tok in enumerate(tokens):
            try:
                values[r, c] = float(tok)
            except ValueError:
                raise GridParseError(f"{in_path}: línea {lineno}, columna {c + 1}: valor no numérico {tok!r}") from None

    try:
        return MagneticMap(header["origin_east"], header["origin_north"], header["cellsize"], values)
    except ValueError as e:
        raise GridParseError(f"{in_path}: {e}") from None
