"""Walk through the in-switch response filter, step by step.

The switch keeps T hash-indexed fingerprint tables.  The faster response of
a cloned pair writes its request id into a slot; the slower one finds its
own id there, clears the slot, and gets dropped.  Collisions between
different requests are survivable because (a) the client spreads requests
across tables via the IDX field and (b) overwriting is allowed, trading a
rare duplicate delivery for never wedging a slot.
"""

from netclone_sim import (ActionKind, CloStatus, MsgType, NetClonePacket,
                          SwitchState, hash_slot, process_response)


def resp(req_id, idx, clo=CloStatus.CLONED_ORIGINAL, sid=0):
    return NetClonePacket(msg_type=MsgType.RESP, req_id=req_id, idx=idx,
                          clo=clo, sid=sid)


def show(st, label):
    occupied = {(t, i): v for t, table in enumerate(st.filter_tables)
                for i, v in enumerate(table) if v}
    print(f"  {label}: occupied slots = {occupied or '{}'}")


def main():
    st = SwitchState(n_servers=2, filter_tables=3, filter_slots=8)
    print("Fresh switch: 3 filter tables x 8 slots, all empty.")

    print("\n1) Faster response of request 7 (table idx=1) arrives:")
    action = process_response(st, resp(7, idx=1))
    print(f"   -> {action.kind.name} (forwarded to the client, fingerprint stored)")
    show(st, "after insert")

    print("\n2) Slower response of request 7 arrives:")
    action = process_response(st, resp(7, idx=1, clo=CloStatus.CLONE, sid=1))
    print(f"   -> {action.kind.name} (redundant copy blocked, slot recycled)")
    show(st, "after drop")

    # Find a request id that shares the slot index with id 7.
    collider = 8
    while hash_slot(collider, st.filter_slots) != hash_slot(7, st.filter_slots):
        collider += 1
    print(f"\n3) Request ids 7 and {collider} share slot "
          f"{hash_slot(7, st.filter_slots)}, but use different tables:")
    process_response(st, resp(7, idx=1))
    action = process_response(st, resp(collider, idx=0))
    print(f"   -> {action.kind.name}; both fingerprints coexist")
    show(st, "different tables")

    print(f"\n4) Same table, same slot: {collider} overwrites 7 (idx=1):")
    st.reset_soft_state()
    process_response(st, resp(7, idx=1))
    process_response(st, resp(collider, idx=1))
    show(st, "after overwrite")
    action = process_response(st, resp(7, idx=1, clo=CloStatus.CLONE, sid=1))
    print(f"   slower response of 7 now -> {action.kind.name} "
          "(a duplicate reaches the client; the client's own dedupe absorbs it)")

    print("\n5) Responses of non-cloned requests never touch the filter:")
    st.reset_soft_state()
    action = process_response(st, resp(99, idx=0, clo=CloStatus.NOT_CLONED))
    print(f"   -> {action.kind.name}")
    show(st, "still empty")


if __name__ == "__main__":
    main()
