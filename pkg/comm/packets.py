# comm/packets.py
"""
Paquetes de datos por paso de tiempo y almacén local de cada UAV.

Cada UAV guarda un PacketStore con los paquetes de [now - s, now]. Los paquetes
pueden estar incompletos; en cada intercambio los dos miembros de una pareja se
envían todo su almacén y cada uno fusiona lo que le falta. Los filtros sólo leen
el paquete (completo) de k - s.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, fields
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


class ConflictingEntryError(RuntimeError):
    """Dos paquetes traen valores distintos para el mismo (k, uav, campo)."""


class IncompletePacketError(RuntimeError):
    """Se pidió un paquete que no contiene los datos de todos los UAV."""


@dataclass(frozen=True)
class UavRecord:
    """
    Registro d_k de un UAV: odometría media del paso, lectura de magnetómetro
    y, si tuvo pareja en k, la distancia medida y el id del compañero.
    """

    v: float
    omega: float
    mag: float
    range_m: Optional[float] = None
    partner: Optional[int] = None

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class Packet:
    time_index: int
    entries: Dict[int, UavRecord] = field(default_factory=dict)

    def is_complete(self, n_uavs: int) -> bool:
        return all(uav in self.entries for uav in range(1, n_uavs + 1))

    def missing(self, n_uavs: int) -> List[int]:
        return [uav for uav in range(1, n_uavs + 1) if uav not in self.entries]

    def copy(self) -> "Packet":
        return Packet(self.time_index, dict(self.entries))

    def controls(self, n_uavs: int) -> np.ndarray:
        """Matriz (N, 2) de [v, omega] por UAV (requiere paquete completo)."""
        return np.array([[self.entries[u].v, self.entries[u].omega] for u in range(1, n_uavs + 1)], dtype=float)

    def magnetics(self, n_uavs: int) -> np.ndarray:
        return np.array([self.entries[u].mag for u in range(1, n_uavs + 1)], dtype=float)

    def ranges(self) -> List[Tuple[int, int, float]]:
        """(i, j, d_ij) con i < j, una vez por pareja."""
        out = []
        for uav in sorted(self.entries):
            rec = self.entries[uav]
            if rec.partner is not None and rec.range_m is not None and uav < rec.partner:
                out.append((uav, rec.partner, rec.range_m))
        return out

    def rows(self) -> Iterator[dict]:
        """Filas (k, uav, field, value) para la traza CSV."""
        for uav in sorted(self.entries):
            for name, value in self.entries[uav].to_dict().items():
                if value is None:
                    continue
                yield {"k": self.time_index, "uav": uav, "field": name, "value": value}


def _merge_record(existing: UavRecord, incoming: UavRecord, k: int, uav: int) -> None:
    for f in fields(UavRecord):
        a, b = getattr(existing, f.name), getattr(incoming, f.name)
        if a != b:
            raise ConflictingEntryError(
                f"conflicto en paquete k={k}, uav={uav}, campo '{f.name}': {a!r} != {b!r}"
            )


class PacketStore:
    """
    Almacén de paquetes de un UAV con horizonte `horizon` (= s pasos).

    Args:
        n_uavs: tamaño del grupo
        horizon: pasos retenidos; se conservan los paquetes de [now - horizon, now]
    """

    def __init__(self, n_uavs: int, horizon: int):
        if horizon < 0:
            raise ValueError(f"horizon debe ser >= 0 (recibido {horizon})")
        self.n_uavs = n_uavs
        self.horizon = horizon
        self.packets: Dict[int, Packet] = {}
        self.now: Optional[int] = None

    def __len__(self) -> int:
        return len(self.packets)

    def __contains__(self, k: int) -> bool:
        return k in self.packets

    def time_indices(self) -> List[int]:
        return sorted(self.packets)

    def packet(self, k: int) -> Optional[Packet]:
        return self.packets.get(k)

    def complete_packet(self, k: int) -> Packet:
        """
        Raises:
            IncompletePacketError: si el paquete k falta o le faltan UAV
        """
        pkt = self.packets.get(k)
        if pkt is None:
            raise IncompletePacketError(f"no hay paquete para k={k}")
        if not pkt.is_complete(self.n_uavs):
            raise IncompletePacketError(f"paquete k={k} incompleto, faltan UAV {pkt.missing(self.n_uavs)}")
        return pkt

    def add_own(self, k: int, uav: int, record: UavRecord) -> "PacketStore":
        """Registra el dato propio de k y avanza `now` a k."""
        return self.merge([Packet(k, {uav: record})], now=k)

    def prune(self) -> None:
        """Descarta los paquetes anteriores a now - horizon, con el reloj del propio almacén."""
        if self.now is None:
            return
        oldest = self.now - self.horizon
        for k in [k for k in self.packets if k < oldest]:
            del self.packets[k]

    def merge(self, incoming: Iterable[Packet], now: int) -> "PacketStore":
        """
        Unión de entradas por (time_index, uav). Modifica el almacén y lo devuelve.
        El reloj del almacén sólo avanza: un `now` atrasado no reabre el horizonte.

        Raises:
            ConflictingEntryError: misma clave con valores distintos
            ValueError: paquete con time_index posterior al reloj del almacén
        """
        self.now = now if self.now is None else max(self.now, now)
        oldest = self.now - self.horizon
        for pkt in incoming:
            k = pkt.time_index
            if k > self.now:
                raise ValueError(f"paquete del futuro: k={k} > now={self.now}")
            if k < oldest:
                continue
            own = self.packets.get(k)
            if own is None:
                self.packets[k] = pkt.copy()
                continue
            for uav, rec in pkt.entries.items():
                if uav in own.entries:
                    _merge_record(own.entries[uav], rec, k, uav)
                else:
                    own.entries[uav] = rec
        self.prune()
        return self

    def outgoing(self) -> List[Packet]:
        """Copia de todos los paquetes retenidos, para enviar al compañero."""
        return [self.packets[k].copy() for k in sorted(self.packets)]


def merge(store: PacketStore, incoming: Sequence[Packet], now: int) -> PacketStore:
    """Forma funcional de PacketStore.merge."""
    return store.merge(incoming, now)


def exchange(
    stores: Dict[int, PacketStore],
    edges: Sequence[Tuple[int, int]],
    now: int,
    packet_loss: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> int:
    """
    Intercambio simultáneo por parejas: cada pareja (i, j) comparte su almacén completo.

    Args:
        stores: uav_id -> PacketStore
        edges: pares activos en este paso
        now: paso actual
        packet_loss: probabilidad de perder el intercambio de una pareja
        rng: generador para las pérdidas (obligatorio si packet_loss > 0)

    Returns:
        Número de intercambios perdidos
    """
    if packet_loss > 0 and rng is None:
        raise ValueError("packet_loss > 0 requiere un rng")
    dropped = 0
    for i, j in edges:
        if packet_loss > 0 and rng.random() < packet_loss:
            dropped += 1
            logger.debug(f"intercambio perdido k={now} ({i},{j})")
            continue
        out_i = stores[i].outgoing()
        out_j = stores[j].outgoing()
        stores[i].merge(out_j, now)
        stores[j].merge(out_i, now)
    return dropped
