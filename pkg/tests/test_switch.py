"""Switch state machine: cloning gate, filtering, state tracking, reset."""

import itertools
import random

import numpy as np
import pytest
from scipy import stats

from netclone_sim import (ActionKind, CloStatus, InsufficientServers, MsgType,
                          NetClonePacket, NonPositiveLatency, SwitchMode,
                          SwitchState, UnknownGroup, build_group_table,
                          capacity_estimate, hash_slot, process_request,
                          process_response)


def req(grp=0, idx=0, src=0):
    return NetClonePacket(msg_type=MsgType.REQ, grp=grp, idx=idx, src=src)


def resp(req_id, sid=0, state=0, clo=CloStatus.CLONED_ORIGINAL, idx=0, dst=0):
    return NetClonePacket(msg_type=MsgType.RESP, req_id=req_id, sid=sid,
                          state=state, clo=clo, idx=idx, dst=dst)


# -- group table --------------------------------------------------------------


def test_group_table_two_servers():
    assert build_group_table(2) == {0: (0, 1), 1: (1, 0)}


def test_group_table_six_servers_covers_all_ordered_pairs():
    table = build_group_table(6)
    assert len(table) == 30  # 6 * 5 ordered pairs
    pairs = set(table.values())
    assert pairs == {(i, j) for i in range(6) for j in range(6) if i != j}
    assert sorted(table) == list(range(30))


def test_group_table_rejects_single_server():
    with pytest.raises(InsufficientServers):
        build_group_table(1)


# -- request processing -------------------------------------------------------


def test_idle_pair_clones_and_recirculates():
    st = SwitchState(2)
    pkt = req(grp=0, idx=1)
    action = process_request(st, pkt)
    assert action.kind == ActionKind.FORWARD_AND_RECIRCULATE
    assert action.endpoint == st.addr_table[0]
    assert pkt.clo == CloStatus.CLONED_ORIGINAL
    assert pkt.sid == 1  # clone target stashed in SID
    clone = action.clone
    assert clone.recirculating
    assert (clone.req_id, clone.grp, clone.idx) == (pkt.req_id, pkt.grp, pkt.idx)

    # Second pipeline pass addresses the clone and marks it CLO=2.
    second = process_request(st, clone)
    assert second.kind == ActionKind.FORWARD
    assert second.endpoint == st.addr_table[1]
    assert clone.clo == CloStatus.CLONE
    assert pkt.clo == CloStatus.CLONED_ORIGINAL


def test_busy_first_candidate_blocks_cloning():
    st = SwitchState(2)
    st.state_table[0] = 3
    st.shadow_table[0] = 3
    pkt = req(grp=0)
    action = process_request(st, pkt)
    assert action.kind == ActionKind.FORWARD
    assert action.endpoint == st.addr_table[0]
    assert pkt.clo == CloStatus.NOT_CLONED
    assert st.seq == 1  # sequence number advances even without cloning


def test_busy_second_candidate_blocks_cloning():
    st = SwitchState(2)
    st.state_table[1] = 1
    st.shadow_table[1] = 1
    action = process_request(st, req(grp=0))
    assert action.kind == ActionKind.FORWARD
    assert action.endpoint == st.addr_table[0]


def test_req_ids_gap_free():
    st = SwitchState(3)
    ids = []
    for i in range(50):
        p = req(grp=i % 6)
        process_request(st, p)
        ids.append(p.req_id)
    assert ids == list(range(1, 51))


def test_recirculated_packets_do_not_touch_seq():
    st = SwitchState(2)
    action = process_request(st, req(grp=0))
    seq_before = st.seq
    process_request(st, action.clone)
    assert st.seq == seq_before


def test_unknown_group_rejected_without_seq_bump():
    st = SwitchState(2)
    with pytest.raises(UnknownGroup):
        process_request(st, req(grp=99))
    assert st.seq == 0


def test_racksched_routes_to_smaller_tracked_load():
    # Exhaustive two-server load grid against the obvious min-with-tie oracle.
    for load1, load2 in itertools.product(range(6), range(6)):
        st = SwitchState(2, mode=SwitchMode.RACKSCHED)
        st.state_table = [load1, load2]
        st.shadow_table = [load1, load2]
        pkt = req(grp=0)  # candidates (0, 1)
        action = process_request(st, pkt)
        if load1 == 0 and load2 == 0:
            assert action.kind == ActionKind.FORWARD_AND_RECIRCULATE
        else:
            expected = 1 if load2 < load1 else 0  # tie -> first candidate
            assert action.kind == ActionKind.FORWARD
            assert action.endpoint == st.addr_table[expected]


def test_netclone_mode_ignores_relative_loads():
    st = SwitchState(2, mode=SwitchMode.NETCLONE)
    st.state_table = [5, 1]
    st.shadow_table = [5, 1]
    action = process_request(st, req(grp=0))
    assert action.endpoint == st.addr_table[0]  # always first candidate


def test_filter_off_mode_still_clones():
    st = SwitchState(2, mode=SwitchMode.FILTER_OFF)
    action = process_request(st, req(grp=0))
    assert action.kind == ActionKind.FORWARD_AND_RECIRCULATE


# -- response processing ------------------------------------------------------


def test_first_response_inserts_fingerprint_and_forwards():
    st = SwitchState(2)
    r = resp(req_id=7, idx=1, dst=42)
    action = process_response(st, r)
    assert action.kind == ActionKind.FORWARD_TO_CLIENT
    assert action.endpoint == 42
    slot = hash_slot(7, st.filter_slots)
    assert st.filter_tables[1][slot] == 7


def test_second_response_clears_slot_and_drops():
    st = SwitchState(2)
    process_response(st, resp(req_id=7, idx=1, clo=CloStatus.CLONED_ORIGINAL))
    action = process_response(st, resp(req_id=7, idx=1, clo=CloStatus.CLONE, sid=1))
    assert action.kind == ActionKind.DROP
    slot = hash_slot(7, st.filter_slots)
    assert st.filter_tables[1][slot] == 0
    assert st.filter_drops == 1


def test_different_table_index_avoids_interference():
    # Two request ids landing in the same slot number but different tables.
    st = SwitchState(2)
    a, b = 7, 8
    slots = st.filter_slots
    # Make them collide on the slot index by brute force if they don't already.
    while hash_slot(a, slots) != hash_slot(b, slots):
        b += 1
    process_response(st, resp(req_id=a, idx=1))
    action = process_response(st, resp(req_id=b, idx=0))
    assert action.kind == ActionKind.FORWARD_TO_CLIENT
    assert st.filter_tables[1][hash_slot(a, slots)] == a
    assert st.filter_tables[0][hash_slot(b, slots)] == b


def test_same_table_collision_overwrites():
    st = SwitchState(2, filter_slots=1, filter_tables=1)
    process_response(st, resp(req_id=1, idx=0))
    action = process_response(st, resp(req_id=2, idx=0))
    assert action.kind == ActionKind.FORWARD_TO_CLIENT  # overwrite, not drop
    assert st.filter_tables[0][0] == 2
    # The slower response of request 1 now sails through: blocked only by luck.
    action = process_response(st, resp(req_id=1, idx=0, sid=1))
    assert action.kind == ActionKind.FORWARD_TO_CLIENT


def test_noncloned_responses_never_filtered():
    st = SwitchState(2)
    for i in range(1, 20):
        action = process_response(st, resp(req_id=5, clo=CloStatus.NOT_CLONED, sid=i % 2))
        assert action.kind == ActionKind.FORWARD_TO_CLIENT
    assert all(v == 0 for t in st.filter_tables for v in t[:64])


def test_filter_off_mode_forwards_everything_but_tracks_state():
    st = SwitchState(2, mode=SwitchMode.FILTER_OFF)
    for clo in (CloStatus.CLONED_ORIGINAL, CloStatus.CLONE):
        action = process_response(st, resp(req_id=9, clo=clo, sid=1, state=4))
        assert action.kind == ActionKind.FORWARD_TO_CLIENT
    assert st.state_table[1] == 4
    assert st.shadow_table[1] == 4
    slot = hash_slot(9, st.filter_slots)
    assert st.filter_tables[0][slot] == 0


def test_state_and_shadow_always_updated_together():
    st = SwitchState(4)
    rng = random.Random(3)
    for _ in range(500):
        sid = rng.randrange(4)
        state = rng.randrange(10)
        clo = rng.choice(list(CloStatus))
        process_response(st, resp(req_id=rng.randrange(1, 100), sid=sid,
                                  state=state, clo=clo, idx=rng.randrange(2)))
        assert st.state_table == st.shadow_table


def test_clone_gate_matches_tracked_state():
    # CLONE-GATE: recirculation happens exactly when both tracked entries are 0.
    st = SwitchState(4)
    rng = random.Random(11)
    for _ in range(2000):
        if rng.random() < 0.5:
            process_response(st, resp(req_id=rng.randrange(1, 10 ** 6),
                                      sid=rng.randrange(4), state=rng.randrange(3),
                                      clo=CloStatus.NOT_CLONED))
        grp = rng.randrange(12)
        srv1, srv2 = st.grp_table[grp]
        both_idle = st.state_table[srv1] == 0 and st.shadow_table[srv2] == 0
        action = process_request(st, req(grp=grp))
        assert (action.kind == ActionKind.FORWARD_AND_RECIRCULATE) == both_idle


def test_exactly_one_forwarded_over_all_response_orderings():
    # Three cloned requests; replay every interleaving of their six
    # responses and check one forward + one drop per request, slot clean.
    ids = [1, 2, 3]
    slots = 2 ** 17
    assert len({hash_slot(i, slots) for i in ids}) == 3  # no slot collisions
    responses = []
    for i in ids:
        responses.append(("orig", i))
        responses.append(("clone", i))
    for perm in itertools.permutations(range(6)):
        st = SwitchState(2, filter_slots=slots)
        outcomes = {i: [] for i in ids}
        for k in perm:
            kind, rid = responses[k]
            clo = CloStatus.CLONED_ORIGINAL if kind == "orig" else CloStatus.CLONE
            action = process_response(st, resp(req_id=rid, clo=clo, idx=0))
            outcomes[rid].append(action.kind)
        for rid in ids:
            assert outcomes[rid][0] == ActionKind.FORWARD_TO_CLIENT
            assert outcomes[rid][1] == ActionKind.DROP
            assert st.filter_tables[0][hash_slot(rid, slots)] == 0


# -- hash ----------------------------------------------------------------------


def test_hash_slot_deterministic():
    for x in (0, 1, 7, 12345, 2 ** 32 - 1):
        assert hash_slot(x, 1 << 17) == hash_slot(x, 1 << 17)


def test_hash_slot_single_slot_table():
    assert all(hash_slot(x, 1) == 0 for x in range(100))


def test_hash_slot_uniformity_chi_square():
    slots = 1 << 17
    n = 10 ** 6
    counts = np.bincount([hash_slot(i, slots) for i in range(1, n + 1)],
                         minlength=slots)
    expected = n / slots
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    p_value = stats.chi2.sf(chi2, slots - 1)
    assert p_value > 0.001


# -- reset and capacity --------------------------------------------------------


def test_reset_restarts_sequence_and_clears_soft_state():
    st = SwitchState(2)
    for _ in range(5):
        process_request(st, req(grp=0))
    process_response(st, resp(req_id=3, sid=1, state=2))
    st.reset_soft_state()
    assert st.seq == 0
    assert st.state_table == [0, 0]
    assert st.shadow_table == [0, 0]
    assert all(v == 0 for t in st.filter_tables for v in t)
    grp_before = dict(st.grp_table)
    addr_before = dict(st.addr_table)
    p = req(grp=0)
    process_request(st, p)
    assert p.req_id == 1  # restarted
    assert st.grp_table == grp_before and st.addr_table == addr_before


def test_reset_then_responses_repopulate_state():
    st = SwitchState(2)
    st.reset_soft_state()
    process_response(st, resp(req_id=9, sid=0, state=5, clo=CloStatus.NOT_CLONED))
    assert st.state_table[0] == 5 and st.shadow_table[0] == 5


def test_reset_idempotent_on_fresh_state():
    st = SwitchState(3)
    before = (st.seq, list(st.state_table), [list(t) for t in st.filter_tables])
    st.reset_soft_state()
    after = (st.seq, list(st.state_table), [list(t) for t in st.filter_tables])
    assert before == after


def test_capacity_estimate_matches_slot_arithmetic():
    assert capacity_estimate(2 ** 18, 50e-6) == pytest.approx(5.24288e9)
    assert capacity_estimate(1, 50e-6) == pytest.approx(20_000)
    with pytest.raises(NonPositiveLatency):
        capacity_estimate(2 ** 18, 0.0)
