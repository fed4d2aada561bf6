"""Worker-server model: one FCFS queue feeding k parallel worker slots.

Arrivals either start service immediately (a worker is free), wait in FIFO
order, or (for clone copies only) get dropped when the waiting queue is
non-empty, because a backlog means the tracked idle state that triggered
the clone was stale.  Responses piggyback the waiting-queue length so the
switch can track server state.
"""

from __future__ import annotations

import random
from collections import deque
from enum import Enum

from .model import CloStatus, MsgType, NetClonePacket, STATE_MAX
from .workload import ServiceDistribution, sample_service


class ArrivalOutcome(Enum):
    ENQUEUED = "enqueued"
    DROPPED_CLONE = "dropped_clone"


class ServerModel:
    """One simulated worker server.

    Service times come from `service_sampler` (microseconds, converted to
    integer nanoseconds here).  Dropped clones are not free: each one adds
    `drop_cost_ns` of dispatch overhead that is charged to the next service
    start on this server, modeling the CPU the dispatcher burns discarding
    them.
    """

    __slots__ = ("id", "endpoint", "workers", "busy_workers", "queue", "dist",
                 "rng", "drops", "drop_cost_ns", "drop_counts_in_service",
                 "_debt_ns")

    def __init__(
        self,
        server_id: int,
        workers: int,
        dist: ServiceDistribution,
        rng: random.Random,
        endpoint: int | None = None,
        drop_cost_ns: int = 300,
        drop_counts_in_service: bool = False,
    ):
        if workers < 1:
            raise ValueError(f"server needs at least 1 worker, got {workers}")
        self.id = server_id
        self.endpoint = endpoint if endpoint is not None else server_id
        self.workers = workers
        self.busy_workers = 0
        self.queue: deque[NetClonePacket] = deque()
        self.dist = dist
        self.rng = rng
        self.drops = 0
        self.drop_cost_ns = drop_cost_ns
        self.drop_counts_in_service = drop_counts_in_service
        self._debt_ns = 0

    def _service_ns(self) -> int:
        ns = int(sample_service(self.dist, self.rng) * 1000.0) + self._debt_ns
        self._debt_ns = 0
        return max(1, ns)

    def on_request_arrival(self, pkt: NetClonePacket, now: int):
        """Accept or drop an arriving request.

        Returns (outcome, completion_at): completion_at is the service-done
        time in ns when the request starts immediately, else None.
        """
        if pkt.clo == CloStatus.CLONE:
            busy = bool(self.queue) or (self.drop_counts_in_service
                                        and self.busy_workers >= self.workers)
            if busy:
                self.drops += 1
                self._debt_ns += self.drop_cost_ns
                return ArrivalOutcome.DROPPED_CLONE, None
        if self.busy_workers < self.workers:
            self.busy_workers += 1
            return ArrivalOutcome.ENQUEUED, now + self._service_ns()
        self.queue.append(pkt)
        return ArrivalOutcome.ENQUEUED, None

    def on_service_complete(self, pkt: NetClonePacket, now: int):
        """Finish `pkt`, emit its response, and start the next queued request.

        Returns (response, next_pkt, next_completion_at); the latter two are
        None when the queue was empty.  The piggybacked state is the waiting
        count at the emission instant, sampled before the freed worker takes
        the next request.
        """
        queue = self.queue
        response = NetClonePacket.__new__(NetClonePacket)
        response.msg_type = MsgType.RESP
        response.req_id = pkt.req_id
        response.grp = pkt.grp
        response.sid = self.id
        qlen = len(queue)
        response.state = qlen if qlen < STATE_MAX else STATE_MAX
        response.clo = pkt.clo
        response.idx = pkt.idx
        response.src = self.endpoint
        response.dst = pkt.src
        response.created_at = pkt.created_at
        response.enqueued_at = 0
        response.recirculating = False
        if queue:
            nxt = queue.popleft()
            return response, nxt, now + self._service_ns()
        self.busy_workers -= 1
        return response, None, None

    def waiting(self) -> int:
        return len(self.queue)
