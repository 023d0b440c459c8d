"""
comm package

Calendario de comunicación por parejas (E0/E1/E2), análisis de propagación
y almacén de paquetes con fusión de paquetes incompletos.
"""

from .schedule import (
    edge_set,
    partner_map,
    measured_pairs,
    unmeasured_pairs,
    vertices_reached,
    steps_lower_bound,
    reach_counts,
    propagation_steps,
)
from .packets import (
    UavRecord,
    Packet,
    PacketStore,
    ConflictingEntryError,
    IncompletePacketError,
    merge,
    exchange,
)

__all__ = [
    "edge_set",
    "partner_map",
    "measured_pairs",
    "unmeasured_pairs",
    "vertices_reached",
    "steps_lower_bound",
    "reach_counts",
    "propagation_steps",
    "UavRecord",
    "Packet",
    "PacketStore",
    "ConflictingEntryError",
    "IncompletePacketError",
    "merge",
    "exchange",
]
