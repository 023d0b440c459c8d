# tests/test_comm.py
"""
Pruebas del calendario de parejas (E0/E1/E2, difusión) y de los almacenes de paquetes.

Cómo ejecutar solo este módulo:
    python -m pytest tests/test_comm.py -q
"""
from collections import Counter

import numpy as np
import pytest

from comm.packets import (
    ConflictingEntryError,
    IncompletePacketError,
    Packet,
    PacketStore,
    UavRecord,
    exchange,
    merge,
)
from comm.schedule import (
    edge_set,
    measured_pairs,
    partner_map,
    propagation_steps,
    reach_counts,
    steps_lower_bound,
    unmeasured_pairs,
    vertices_reached,
)


# ------------------------------------------------------------
# Calendario
# ------------------------------------------------------------

def test_edge_sets_for_eight_uavs():
    assert edge_set(8, 0) == ((1, 2), (3, 4), (5, 6), (7, 8))
    assert edge_set(8, 1) == ((1, 8), (2, 3), (4, 5), (6, 7))
    assert edge_set(8, 2) == ((1, 5), (2, 6), (3, 7), (4, 8))


def test_schedule_is_periodic():
    for k in range(9):
        assert edge_set(16, k) == edge_set(16, k % 3)


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10, 16, 20])
def test_even_groups_get_perfect_matchings(n):
    for phase in range(3):
        counts = Counter(u for edge in edge_set(n, phase) for u in edge)
        assert sorted(counts) == list(range(1, n + 1))
        assert set(counts.values()) == {1}


def test_odd_group_drops_phantom_vertex():
    assert edge_set(7, 0) == ((1, 2), (3, 4), (5, 6))
    assert edge_set(7, 1) == ((2, 3), (4, 5), (6, 7))
    assert edge_set(7, 2) == ((1, 5), (2, 6), (3, 7))
    for phase in range(3):
        assert all(max(e) <= 7 for e in edge_set(7, phase))


def test_single_uav_has_no_edges():
    assert edge_set(1, 0) == ()
    assert partner_map(1, 0) == {}
    with pytest.raises(ValueError):
        edge_set(0, 0)


def test_partner_map_is_symmetric():
    partners = partner_map(8, 2)
    assert partners[1] == 5 and partners[5] == 1
    assert len(partners) == 8


def test_measured_and_unmeasured_pairs():
    assert len(measured_pairs(4)) == 6
    assert unmeasured_pairs(4) == frozenset()
    assert len(measured_pairs(8)) == 12
    assert len(unmeasured_pairs(8)) == 16
    assert (1, 3) in unmeasured_pairs(8)
    assert measured_pairs(1) == frozenset()


def test_vertices_reached_closed_form():
    assert [vertices_reached(k) for k in range(7)] == [2, 4, 8, 12, 16, 16, 20]
    assert vertices_reached(10, n_uavs=8) == 8
    with pytest.raises(ValueError):
        vertices_reached(-1)


def test_closed_form_matches_breadth_first_dissemination():
    n = 64
    expected = [vertices_reached(k) for k in range(11)]
    assert expected == [2, 4, 8, 12, 16, 16, 20, 24, 24, 28, 32]
    assert reach_counts(n, 11, source=1, start_phase=0) == expected


def test_steps_lower_bound():
    assert steps_lower_bound(8) == 3
    assert steps_lower_bound(16) == 6
    assert steps_lower_bound(3) == 2
    with pytest.raises(ValueError):
        steps_lower_bound(1)


def test_propagation_steps_small_groups():
    assert propagation_steps(1) == 0
    assert propagation_steps(2) == 1


@pytest.mark.parametrize("n", range(2, 21))
def test_propagation_steps_cover_every_source_and_phase(n):
    s = propagation_steps(n)
    assert s >= steps_lower_bound(n)
    for phase in range(3):
        for source in range(1, n + 1):
            assert reach_counts(n, s, source=source, start_phase=phase)[-1] == n


# ------------------------------------------------------------
# Paquetes
# ------------------------------------------------------------

def _record(uav, k, partner=None):
    return UavRecord(v=50.0 + uav, omega=0.001 * k, mag=10.0 * uav + k,
                     range_m=None if partner is None else 1000.0, partner=partner)


def test_packet_ranges_once_per_pair():
    pkt = Packet(3, {1: _record(1, 3, partner=2), 2: _record(2, 3, partner=1), 3: _record(3, 3)})
    assert pkt.ranges() == [(1, 2, 1000.0)]
    assert pkt.missing(4) == [4]
    assert not pkt.is_complete(4)
    assert pkt.controls(3).shape == (3, 2)


def test_merge_is_union_and_idempotent():
    store = PacketStore(n_uavs=3, horizon=2)
    store.add_own(1, 1, _record(1, 1))
    incoming = [Packet(1, {2: _record(2, 1)}), Packet(1, {3: _record(3, 1)})]
    merge(store, incoming, now=1)
    merge(store, incoming, now=1)
    assert store.packet(1).is_complete(3)
    assert store.packet(1).entries[2] == _record(2, 1)


def test_merge_conflict_raises():
    store = PacketStore(n_uavs=2, horizon=2)
    store.add_own(1, 1, _record(1, 1))
    bad = UavRecord(v=0.0, omega=0.0, mag=0.0)
    with pytest.raises(ConflictingEntryError, match="uav=1"):
        store.merge([Packet(1, {1: bad})], now=1)


def test_merge_rejects_future_packets():
    store = PacketStore(n_uavs=2, horizon=2)
    with pytest.raises(ValueError):
        store.merge([Packet(5, {1: _record(1, 5)})], now=4)


def test_store_prunes_beyond_horizon():
    store = PacketStore(n_uavs=2, horizon=2)
    for k in range(1, 6):
        store.add_own(k, 1, _record(1, k))
    assert store.time_indices() == [3, 4, 5]
    # paquetes viejos recibidos se descartan
    store.merge([Packet(1, {2: _record(2, 1)})], now=5)
    assert 1 not in store


def test_store_clock_does_not_move_backwards():
    store = PacketStore(n_uavs=2, horizon=2)
    for k in range(1, 11):
        store.add_own(k, 1, _record(1, k))
    # un llamador atrasado no reabre el horizonte del almacén
    store.merge([Packet(6, {2: _record(2, 6)}), Packet(8, {2: _record(2, 8)})], now=6)
    assert store.now == 10
    assert store.time_indices() == [8, 9, 10]
    assert store.packet(8).entries.keys() == {1, 2}


def test_complete_packet_requires_all_uavs():
    store = PacketStore(n_uavs=2, horizon=1)
    store.add_own(1, 1, _record(1, 1))
    with pytest.raises(IncompletePacketError):
        store.complete_packet(1)
    with pytest.raises(IncompletePacketError):
        store.complete_packet(7)


@pytest.mark.parametrize("n", [2, 3, 5, 8, 16])
def test_packets_complete_after_propagation_steps(n):
    s = propagation_steps(n)
    stores = {u: PacketStore(n, s) for u in range(1, n + 1)}
    k_last = 3 * s + 3
    for k in range(1, k_last + 1):
        for u in range(1, n + 1):
            stores[u].add_own(k, u, _record(u, k))
        exchange(stores, edge_set(n, k), k)
        j = k - s
        if j >= 1:
            for u in range(1, n + 1):
                assert stores[u].complete_packet(j).is_complete(n)


def test_exchange_with_losses():
    n = 8
    stores = {u: PacketStore(n, 3) for u in range(1, n + 1)}
    for u in range(1, n + 1):
        stores[u].add_own(1, u, _record(u, 1))
    rng = np.random.default_rng(0)
    dropped = exchange(stores, edge_set(n, 1), 1, packet_loss=0.999, rng=rng)
    assert dropped == 4
    assert all(len(stores[u].packet(1).entries) == 1 for u in range(1, n + 1))
    with pytest.raises(ValueError):
        exchange(stores, edge_set(n, 1), 1, packet_loss=0.5)
