# comm/schedule.py
"""
Rotación de emparejamientos para comunicación por parejas.

Tres matchings fijos sobre los UAV 1..n (n par):
    E0 = {(1,2), (3,4), ..., (n-1,n)}
    E1 = {(2,3), (4,5), ..., (n-2,n-1), (n,1)}
    E2 = {(i, i+n/2) : i = 1..n/2}
El paso k usa E_{k mod 3}. Con N impar se construye el conjunto para N+1 y se
eliminan las aristas que tocan el vértice fantasma N+1.

Además: vértices alcanzados tras k pasos (forma cerrada), cota inferior de pasos
para difundir un dato a todo el grupo y su valor exacto por BFS sobre el grafo
expandido en el tiempo.
"""
from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations
from typing import FrozenSet, List, Optional, Set, Tuple

Edge = Tuple[int, int]

N_PHASES = 3


def _even_base(n_uavs: int) -> int:
    return n_uavs + (n_uavs % 2)


@lru_cache(maxsize=None)
def _edge_set_cached(n_uavs: int, phase: int) -> Tuple[Edge, ...]:
    n = _even_base(n_uavs)
    half = n // 2
    if phase == 0:
        edges = [(i, i + 1) for i in range(1, n, 2)]
    elif phase == 1:
        edges = [(i, i + 1) for i in range(2, n, 2)] + [(1, n)]
    else:
        edges = [(i, i + half) for i in range(1, half + 1)]
    # pares ordenados (menor, mayor), sin duplicados (n=2 repite la arista)
    edges = sorted({(min(a, b), max(a, b)) for a, b in edges})
    if n != n_uavs:
        edges = [e for e in edges if n not in e]
    return tuple(edges)


def edge_set(n_uavs: int, k: int) -> Tuple[Edge, ...]:
    """
    Pares de UAV (ids base 1, ordenados) que se comunican en el paso k.

    Args:
        n_uavs: tamaño del grupo N (N=1 no tiene aristas)
        k: índice de paso (>= 0); fase = k mod 3

    Returns:
        Tupla ordenada de pares (i, j) con i < j
    """
    if n_uavs < 1:
        raise ValueError(f"n_uavs debe ser >= 1 (recibido {n_uavs})")
    if n_uavs == 1:
        return ()
    return _edge_set_cached(int(n_uavs), int(k) % N_PHASES)


def partner_map(n_uavs: int, k: int) -> dict:
    """uav_id -> compañero en el paso k (sólo UAV cubiertos)."""
    out = {}
    for i, j in edge_set(n_uavs, k):
        out[i] = j
        out[j] = i
    return out


def measured_pairs(n_uavs: int) -> FrozenSet[Edge]:
    """Pares medidos alguna vez: E0 ∪ E1 ∪ E2."""
    if n_uavs < 2:
        return frozenset()
    return frozenset(e for phase in range(N_PHASES) for e in edge_set(n_uavs, phase))


def unmeasured_pairs(n_uavs: int) -> FrozenSet[Edge]:
    """Pares que nunca se miden con el sensor de ranging."""
    all_pairs = frozenset(combinations(range(1, n_uavs + 1), 2))
    return all_pairs - measured_pairs(n_uavs)


def vertices_reached(k: int, n_uavs: Optional[int] = None) -> int:
    """
    Número de vértices alcanzados por un dato tras los intercambios de los pasos 0..k:
        m = 2(k+1)                 si k <= 1
        m = 4k - 4·floor((k-2)/3)  en otro caso
    Con `n_uavs` dado, se satura en N.
    """
    if k < 0:
        raise ValueError(f"k debe ser >= 0 (recibido {k})")
    m = 2 * (k + 1) if k <= 1 else 4 * k - 4 * ((k - 2) // 3)
    if n_uavs is not None:
        m = min(m, int(n_uavs))
    return m


def steps_lower_bound(n_uavs: int) -> int:
    """Cota inferior ⌈3N/8⌉ de pasos para que un dato llegue a los N UAV."""
    if n_uavs < 2:
        raise ValueError(f"n_uavs debe ser >= 2 (recibido {n_uavs})")
    return math.ceil(3 * n_uavs / 8)


def reach_counts(n_uavs: int, n_steps: int, source: int = 1, start_phase: int = 0) -> List[int]:
    """
    BFS sobre el grafo expandido en el tiempo: tamaño del conjunto informado
    tras cada uno de los `n_steps` intercambios, empezando en `start_phase`.
    """
    informed: Set[int] = {source}
    counts = []
    for t in range(n_steps):
        for i, j in edge_set(n_uavs, start_phase + t):
            if i in informed or j in informed:
                informed.add(i)
                informed.add(j)
        counts.append(len(informed))
    return counts


def _steps_to_cover(n_uavs: int, source: int, start_phase: int, max_steps: int) -> int:
    informed: Set[int] = {source}
    for t in range(max_steps):
        for i, j in edge_set(n_uavs, start_phase + t):
            if i in informed or j in informed:
                informed.add(i)
                informed.add(j)
        if len(informed) == n_uavs:
            return t + 1
    raise RuntimeError(f"el grafo de comunicación no cubre los {n_uavs} UAV en {max_steps} pasos")


@lru_cache(maxsize=None)
def propagation_steps(n_uavs: int) -> int:
    """
    Pasos exactos para que el dato de cualquier UAV llegue a todo el grupo:
    máximo sobre las tres fases de arranque y todos los orígenes.
    N=1 devuelve 0 (no hay nada que propagar).
    """
    if n_uavs < 1:
        raise ValueError(f"n_uavs debe ser >= 1 (recibido {n_uavs})")
    if n_uavs == 1:
        return 0
    max_steps = 3 * n_uavs + N_PHASES
    return max(
        _steps_to_cover(n_uavs, source, phase, max_steps)
        for phase in range(N_PHASES)
        for source in range(1, n_uavs + 1)
    )
