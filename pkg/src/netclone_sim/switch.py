"""In-switch request cloning, response filtering, and state tracking.

This is a pure state machine: `process_request` and `process_response`
mutate a SwitchState and return a SwitchAction describing what the data
plane would do with the packet.  The driving engine turns actions into
timed events; nothing here knows about simulated time.
"""

from __future__ import annotations

import enum
import zlib

from .errors import InsufficientServers, NonPositiveLatency, UnknownGroup
from .model import CloStatus, MsgType, NetClonePacket


class SwitchMode(enum.Enum):
    NETCLONE = "netclone"          # idle/busy gate on tracked state == 0
    RACKSCHED = "racksched"        # same gate, JSQ-of-two fallback when busy
    FILTER_OFF = "filter_off"      # cloning as NETCLONE, response filter disabled


class ActionKind(enum.IntEnum):
    FORWARD = 0                    # request toward a server
    FORWARD_AND_RECIRCULATE = 1    # request toward srv1 plus a looped-back clone
    DROP = 2                       # redundant slower response
    FORWARD_TO_CLIENT = 3          # response toward its client


class SwitchAction:
    """Outcome of one pipeline pass over a packet."""

    __slots__ = ("kind", "endpoint", "clone")

    def __init__(self, kind: ActionKind, endpoint: int | None = None,
                 clone: NetClonePacket | None = None):
        self.kind = kind
        self.endpoint = endpoint
        self.clone = clone

    def __repr__(self):
        return f"SwitchAction({self.kind.name}, endpoint={self.endpoint})"


def build_group_table(n: int) -> dict[int, tuple[int, int]]:
    """Map group ids 0..n(n-1)-1 to ordered server pairs.

    Every unordered pair appears in both orders so that the first-candidate
    fallback (used whenever cloning conditions fail) stays uniform over
    servers.  Requires n >= 2.
    """
    if n < 2:
        raise InsufficientServers(f"group table needs at least 2 servers, got {n}")
    table: dict[int, tuple[int, int]] = {}
    g = 0
    for i in range(n):
        for j in range(i + 1, n):
            table[g] = (i, j)
            table[g + 1] = (j, i)
            g += 2
    return table


def hash_slot(req_id: int, slots: int) -> int:
    """Deterministic slot index for a request id; `slots` must be a power of two."""
    return zlib.crc32(req_id.to_bytes(4, "big")) & (slots - 1)


def capacity_estimate(total_slots: int, avg_latency_s: float) -> float:
    """Requests per second the filter slots can absorb if each slot is
    occupied for one average request latency."""
    if avg_latency_s <= 0:
        raise NonPositiveLatency(f"average latency must be > 0, got {avg_latency_s}")
    return total_slots / avg_latency_s


class SwitchState:
    """All switch-resident soft state plus the control-plane tables.

    The state table and its shadow copy are updated together on every
    response, so reads of two different servers in one pass stay coherent.
    Filter tables hold 32-bit request-id fingerprints; slot value 0 means
    empty, which is why request ids start at 1.
    """

    def __init__(
        self,
        n_servers: int,
        mode: SwitchMode = SwitchMode.NETCLONE,
        filter_tables: int = 2,
        filter_slots: int = 2 ** 17,
        addr_table: dict[int, int] | None = None,
    ):
        if filter_slots & (filter_slots - 1):
            raise ValueError(f"filter_slots must be a power of two, got {filter_slots}")
        self.n_servers = n_servers
        self.mode = mode
        self.seq = 0
        self.grp_table = build_group_table(n_servers)
        # Identity endpoint mapping by default; the engine overrides it.
        self.addr_table = dict(addr_table) if addr_table else {i: i for i in range(n_servers)}
        self.state_table = [0] * n_servers
        self.shadow_table = [0] * n_servers
        self.n_filter_tables = filter_tables
        self.filter_slots = filter_slots
        self.filter_tables = [[0] * filter_slots for _ in range(filter_tables)]
        # Run counters, reported in metrics.
        self.clones_emitted = 0
        self.filter_drops = 0

    def reset_soft_state(self) -> None:
        """Clear everything a power cycle would lose.

        The group and address tables survive (control-plane installed); the
        sequence number, tracked server states, and filter fingerprints do
        not.  Request ids restart at 1 afterwards.
        """
        self.seq = 0
        n = self.n_servers
        self.state_table = [0] * n
        self.shadow_table = [0] * n
        self.filter_tables = [[0] * self.filter_slots for _ in range(self.n_filter_tables)]


def process_request(st: SwitchState, pkt: NetClonePacket) -> SwitchAction:
    """One ingress pass over a request packet.

    Fresh requests get the next sequence number as their id, then either
    clone (both candidates tracked idle) or forward to the first candidate
    (RACKSCHED mode: to the shorter-queued candidate).  Recirculated clones
    get CLO=2 and the address of their stored target server.
    """
    if pkt.recirculating:
        # Second pipeline pass of a clone: finish addressing and forward.
        pkt.recirculating = False
        pkt.clo = CloStatus.CLONE
        pkt.dst = st.addr_table[pkt.sid]
        return SwitchAction(ActionKind.FORWARD, pkt.dst)

    pair = st.grp_table.get(pkt.grp)
    if pair is None:
        raise UnknownGroup(f"group {pkt.grp} not installed (n={st.n_servers})")
    st.seq += 1
    pkt.req_id = st.seq
    srv1, srv2 = pair
    pkt.dst = st.addr_table[srv1]

    load1 = st.state_table[srv1]
    load2 = st.shadow_table[srv2]
    if load1 == 0 and load2 == 0:
        # Both candidates considered idle: mark the original, stash the
        # clone's target in SID, and loop a copy back through the pipeline.
        pkt.clo = CloStatus.CLONED_ORIGINAL
        pkt.sid = srv2
        clone = pkt.copy()
        clone.recirculating = True
        st.clones_emitted += 1
        return SwitchAction(ActionKind.FORWARD_AND_RECIRCULATE, pkt.dst, clone)

    if st.mode is SwitchMode.RACKSCHED and load2 < load1:
        pkt.dst = st.addr_table[srv2]
        return SwitchAction(ActionKind.FORWARD, pkt.dst)

    # NETCLONE / FILTER_OFF (and RACKSCHED ties): first candidate.
    return SwitchAction(ActionKind.FORWARD, pkt.dst)


def process_response(st: SwitchState, pkt: NetClonePacket) -> SwitchAction:
    """One ingress pass over a response packet.

    Always refreshes both copies of the tracked state for the responding
    server.  Responses of cloned requests then hit the fingerprint filter:
    a matching slot means the faster copy already passed, so the slot is
    cleared and this one dropped; otherwise the id is written (overwriting
    whatever was there) and the response forwarded.
    """
    sid = pkt.sid
    st.state_table[sid] = pkt.state
    st.shadow_table[sid] = pkt.state

    if pkt.clo != CloStatus.NOT_CLONED and st.mode is not SwitchMode.FILTER_OFF:
        table = st.filter_tables[pkt.idx]
        # Inlined hash_slot(); the two must stay in sync.
        h = zlib.crc32(pkt.req_id.to_bytes(4, "big")) & (st.filter_slots - 1)
        if table[h] == pkt.req_id:
            table[h] = 0
            st.filter_drops += 1
            return SwitchAction(ActionKind.DROP)
        table[h] = pkt.req_id
    return SwitchAction(ActionKind.FORWARD_TO_CLIENT, pkt.dst)
