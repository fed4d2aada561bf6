"""Core domain types: the cloning header, scheme identifiers, and the wire codec.

All simulation modules exchange `NetClonePacket` values.  The header part of
the packet round-trips through a fixed 12-byte big-endian layout so the same
types could back a real wire implementation later; the remaining fields are
simulation metadata and never touch the wire.
"""

from __future__ import annotations

import enum
import struct

from .errors import InvalidType, TruncatedHeader


class MsgType(enum.IntEnum):
    REQ = 1
    RESP = 2


class CloStatus(enum.IntEnum):
    """Wire values of the CLO field."""

    NOT_CLONED = 0
    CLONED_ORIGINAL = 1
    CLONE = 2


class SchemeId(enum.Enum):
    """Dispatch scheme simulated by a run; exactly one per run."""

    BASELINE = "baseline"
    CCLONE = "cclone"
    LAEDGE = "laedge"
    NETCLONE = "netclone"
    NETCLONE_RACKSCHED = "netclone_racksched"
    NETCLONE_NOFILTER = "netclone_nofilter"

    @classmethod
    def parse(cls, name: str) -> "SchemeId":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown scheme {name!r}; expected one of: {valid}") from None


# Header layout, big-endian:
#   TYPE(1) REQ_ID(4) GRP(2) SID(1) STATE(1) CLO(1) IDX(1) + 1 pad byte
_HEADER = struct.Struct(">BIHBBBBx")
HEADER_LEN = _HEADER.size  # 12

# STATE is a single byte on the wire; queue lengths saturate at this value.
STATE_MAX = 0xFF


class NetClonePacket:
    """One request or response message plus simulation metadata.

    Header fields (on the wire): msg_type, req_id, grp, sid, state, clo, idx.
    Metadata (never on the wire): src/dst endpoint ids, created_at/enqueued_at
    timestamps in integer nanoseconds, and the internal recirculating flag a
    clone carries while looping back through the switch.
    """

    __slots__ = (
        "msg_type",
        "req_id",
        "grp",
        "sid",
        "state",
        "clo",
        "idx",
        "src",
        "dst",
        "created_at",
        "enqueued_at",
        "recirculating",
    )

    def __init__(
        self,
        msg_type: int = MsgType.REQ,
        req_id: int = 0,
        grp: int = 0,
        sid: int = 0,
        state: int = 0,
        clo: int = CloStatus.NOT_CLONED,
        idx: int = 0,
        src: int = 0,
        dst: int = 0,
        created_at: int = 0,
        enqueued_at: int = 0,
        recirculating: bool = False,
    ):
        self.msg_type = msg_type
        self.req_id = req_id
        self.grp = grp
        self.sid = sid
        self.state = state
        self.clo = clo
        self.idx = idx
        self.src = src
        self.dst = dst
        self.created_at = created_at
        self.enqueued_at = enqueued_at
        self.recirculating = recirculating

    def header(self) -> tuple:
        """The wire-visible fields, for equality checks and hashing."""
        return (
            int(self.msg_type),
            self.req_id,
            self.grp,
            self.sid,
            self.state,
            int(self.clo),
            self.idx,
        )

    def copy(self) -> "NetClonePacket":
        p = NetClonePacket.__new__(NetClonePacket)
        p.msg_type = self.msg_type
        p.req_id = self.req_id
        p.grp = self.grp
        p.sid = self.sid
        p.state = self.state
        p.clo = self.clo
        p.idx = self.idx
        p.src = self.src
        p.dst = self.dst
        p.created_at = self.created_at
        p.enqueued_at = self.enqueued_at
        p.recirculating = self.recirculating
        return p

    def __eq__(self, other):
        if not isinstance(other, NetClonePacket):
            return NotImplemented
        return self.header() == other.header()

    def __repr__(self):
        kind = "REQ" if self.msg_type == MsgType.REQ else "RESP"
        return (
            f"NetClonePacket({kind}, req_id={self.req_id}, grp={self.grp}, "
            f"sid={self.sid}, state={self.state}, clo={int(self.clo)}, idx={self.idx})"
        )


def encode_header(pkt: NetClonePacket) -> bytes:
    """Serialize the header fields to the fixed 12-byte layout."""
    return _HEADER.pack(
        int(pkt.msg_type),
        pkt.req_id,
        pkt.grp,
        pkt.sid,
        pkt.state,
        int(pkt.clo),
        pkt.idx,
    )


def decode_header(buf: bytes) -> NetClonePacket:
    """Parse a header; inverse of encode_header.  Metadata comes back zeroed.

    Raises TruncatedHeader when the buffer is shorter than the header and
    InvalidType when the TYPE byte is not a known message type.
    """
    if len(buf) < HEADER_LEN:
        raise TruncatedHeader(f"need {HEADER_LEN} bytes, got {len(buf)}")
    msg_type, req_id, grp, sid, state, clo, idx = _HEADER.unpack_from(buf)
    if msg_type not in (MsgType.REQ, MsgType.RESP):
        raise InvalidType(f"TYPE byte {msg_type} is not REQ or RESP")
    return NetClonePacket(
        msg_type=MsgType(msg_type),
        req_id=req_id,
        grp=grp,
        sid=sid,
        state=state,
        clo=clo,
        idx=idx,
    )
