"""Header codec: round-trips, fixed length, malformed input."""

import random

import pytest

from netclone_sim import (HEADER_LEN, CloStatus, InvalidType, MsgType,
                          NetClonePacket, TruncatedHeader, decode_header,
                          encode_header)

FIELD_RANGES = {
    "req_id": (0, 2 ** 32 - 1),
    "grp": (0, 2 ** 16 - 1),
    "sid": (0, 255),
    "state": (0, 255),
    "idx": (0, 255),
}


def make(msg_type=MsgType.REQ, **kw):
    return NetClonePacket(msg_type=msg_type, **kw)


def test_round_trip_known_values():
    # A cloned-original request in the second filter table.
    pkt = make(req_id=7, grp=0, sid=0, state=0, clo=CloStatus.CLONED_ORIGINAL, idx=1)
    out = decode_header(encode_header(pkt))
    assert out.header() == pkt.header()


def test_zero_header_is_all_zero_bytes_except_type():
    pkt = make()
    raw = encode_header(pkt)
    assert len(raw) == HEADER_LEN
    assert raw[0] == int(MsgType.REQ)
    assert raw[1:] == b"\x00" * (HEADER_LEN - 1)


def test_header_length_constant():
    small = encode_header(make())
    big = encode_header(make(MsgType.RESP, req_id=2 ** 32 - 1, grp=2 ** 16 - 1,
                             sid=255, state=255, clo=CloStatus.CLONE, idx=255))
    assert len(small) == len(big) == HEADER_LEN


def test_round_trip_boundary_and_random_values():
    rng = random.Random(42)
    cases = []
    # Every field pinned at each boundary while the others are random.
    for name, (lo, hi) in FIELD_RANGES.items():
        for bound in (lo, hi):
            kw = {f: rng.randint(*FIELD_RANGES[f]) for f in FIELD_RANGES}
            kw[name] = bound
            cases.append(kw)
    for _ in range(1000):
        cases.append({f: rng.randint(*FIELD_RANGES[f]) for f in FIELD_RANGES})
    for kw in cases:
        for msg_type in (MsgType.REQ, MsgType.RESP):
            for clo in CloStatus:
                pkt = make(msg_type, clo=clo, **kw)
                out = decode_header(encode_header(pkt))
                assert out.header() == pkt.header()


def test_decode_zeroes_simulation_metadata():
    pkt = make(req_id=5, src=9, dst=12, created_at=777, enqueued_at=888)
    out = decode_header(encode_header(pkt))
    assert (out.src, out.dst, out.created_at, out.enqueued_at) == (0, 0, 0, 0)
    assert out.recirculating is False


def test_truncated_header_rejected():
    with pytest.raises(TruncatedHeader):
        decode_header(b"\x01\x02\x03")
    with pytest.raises(TruncatedHeader):
        decode_header(encode_header(make())[:-1])


def test_invalid_type_byte_rejected():
    raw = bytearray(encode_header(make()))
    valid = {int(MsgType.REQ), int(MsgType.RESP)}
    for bad in range(256):
        if bad in valid:
            continue
        raw[0] = bad
        with pytest.raises(InvalidType):
            decode_header(bytes(raw))


def test_decode_accepts_trailing_bytes():
    raw = encode_header(make(req_id=3)) + b"payload"
    assert decode_header(raw).req_id == 3
