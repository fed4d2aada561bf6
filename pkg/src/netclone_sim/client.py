"""Open-loop request source and response sink.

Arrivals follow a Poisson process whose rate never reacts to completions,
so queueing delay is fully exposed.  Response handling is serialized behind
a single receiver resource with a fixed per-packet cost: redundant
responses burn real receive capacity even though they are discarded, which
is exactly what in-network response filtering saves.
"""

from __future__ import annotations

import random
from collections import deque
from enum import Enum

from .errors import NonPositiveRate
from .model import CloStatus, MsgType, NetClonePacket


class ResponseOutcome(Enum):
    RECORDED = "recorded"
    DUPLICATE_IGNORED = "duplicate_ignored"


# Dedupe horizon: duplicates of one request arrive within microseconds of
# each other, so 50ms is orders of magnitude more than needed, while still
# letting request ids be reused safely after a switch soft-state reset.
DEDUP_WINDOW_NS = 50_000_000


class ClientModel:
    """Aggregate open-loop client.

    `receiver_cost_ns` is the busy time one response costs the receiver
    resource; multiple physical client machines are modeled by dividing the
    per-response cost across `n_clients`.  Latency samples and throughput
    counters only cover the measurement window [measure_from_ns,
    measure_until_ns], which the engine uses to discard warmup.
    """

    def __init__(
        self,
        rate_rps: float,
        group_count: int,
        table_count: int,
        rng: random.Random,
        endpoint: int = 0,
        receiver_cost_ns: int = 300,
        n_clients: int = 1,
        measure_from_ns: int = 0,
        measure_until_ns: int = 2 ** 62,
        timeline_bucket_ns: int = 0,
        latency_cap: int = 4_000_000,
        dedup_window_ns: int = DEDUP_WINDOW_NS,
    ):
        if rate_rps <= 0:
            raise NonPositiveRate(f"offered rate must be > 0, got {rate_rps}")
        self.rate_rps = rate_rps
        self._rate_per_ns = rate_rps / 1e9
        self.group_count = group_count
        self.table_count = table_count
        self.rng = rng
        self.endpoint = endpoint
        self.receiver_cost_ns = max(1, round(receiver_cost_ns / max(1, n_clients)))
        self.receiver_busy_until = 0
        self.measure_from_ns = measure_from_ns
        self.measure_until_ns = measure_until_ns
        self.latency_cap = latency_cap

        self.generated = 0            # all requests issued
        self.recorded = 0             # first responses processed
        self.duplicates = 0
        self.window_generated = 0     # created inside the measurement window
        self.window_recorded = 0      # ... and completed inside it
        self.latency_sum_ns = 0       # over window_recorded
        self.latencies_ns: list[int] = []
        self._local_id = 0            # for schemes that do not use the switch sequencer

        self.timeline_bucket_ns = timeline_bucket_ns
        self.completion_buckets: dict[int, int] = {}
        self.duplicate_buckets: dict[int, int] = {}

        self.dedup_window_ns = dedup_window_ns
        self._seen: dict[int, int] = {}     # req_id -> completion time (ns)
        self._expiry: deque[tuple[int, int]] = deque()

    def next_arrival_gap(self) -> int:
        """Exponential inter-arrival gap in integer ns, strictly positive."""
        return max(1, round(self.rng.expovariate(self._rate_per_ns)))

    def next_local_id(self) -> int:
        self._local_id += 1
        return self._local_id

    def build_request(self, now: int) -> NetClonePacket:
        """Fresh request: group and filter-table index drawn uniformly, the
        request id left 0 for the switch to assign."""
        self.generated += 1
        if self.measure_from_ns <= now <= self.measure_until_ns:
            self.window_generated += 1
        rnd = self.rng.random
        pkt = NetClonePacket.__new__(NetClonePacket)
        pkt.msg_type = MsgType.REQ
        pkt.req_id = 0
        pkt.grp = int(rnd() * self.group_count) if self.group_count > 1 else 0
        pkt.sid = 0
        pkt.state = 0
        pkt.clo = CloStatus.NOT_CLONED
        pkt.idx = int(rnd() * self.table_count) if self.table_count > 1 else 0
        pkt.src = self.endpoint
        pkt.dst = 0
        pkt.created_at = now
        pkt.enqueued_at = 0
        pkt.recirculating = False
        return pkt

    def on_response(self, pkt: NetClonePacket, arrived_at: int):
        """Process one response through the receiver resource.

        Every response costs receiver time, duplicate or not.  Returns
        (outcome, done_at); done_at is when the receiver finished, which is
        the instant latency is measured at.
        """
        busy = self.receiver_busy_until
        start = arrived_at if arrived_at > busy else busy
        done = start + self.receiver_cost_ns
        self.receiver_busy_until = done

        seen = self._seen
        expiry = self._expiry
        horizon = done - self.dedup_window_ns
        while expiry and expiry[0][0] < horizon:
            _, old = expiry.popleft()
            if seen.get(old, 1 << 62) < horizon:
                del seen[old]

        key = pkt.req_id
        if key in seen:
            self.duplicates += 1
            if self.timeline_bucket_ns:
                b = done // self.timeline_bucket_ns
                self.duplicate_buckets[b] = self.duplicate_buckets.get(b, 0) + 1
            return ResponseOutcome.DUPLICATE_IGNORED, done

        seen[key] = done
        expiry.append((done, key))
        self.recorded += 1
        if self.timeline_bucket_ns:
            b = done // self.timeline_bucket_ns
            self.completion_buckets[b] = self.completion_buckets.get(b, 0) + 1
        if pkt.created_at >= self.measure_from_ns and done <= self.measure_until_ns:
            self.window_recorded += 1
            latency = done - pkt.created_at
            self.latency_sum_ns += latency
            if len(self.latencies_ns) < self.latency_cap:
                self.latencies_ns.append(latency)
            else:
                # Reservoir sampling keeps percentiles unbiased past the cap.
                j = self.rng.randrange(self.window_recorded)
                if j < self.latency_cap:
                    self.latencies_ns[j] = latency
        return ResponseOutcome.RECORDED, done
