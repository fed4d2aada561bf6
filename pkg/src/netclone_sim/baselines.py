"""Comparison schemes: random dispatch, client-side cloning, and the
coordinator-based dynamic cloner.

The coordinator is the interesting one: it clones only when at least two
servers are provably idle, buffers requests when none are, and pays a fixed
CPU cost for every message it touches, including redundant slower
responses.  That single serialized resource is what caps its throughput.
"""

from __future__ import annotations

import random
from collections import deque

from .errors import InsufficientServers
from .model import NetClonePacket


def baseline_route(n: int, rng: random.Random) -> int:
    """Uniform random server pick, no cloning."""
    if n < 1:
        raise InsufficientServers(f"need at least 1 server, got {n}")
    return rng.randrange(n)


def cclone_route(n: int, rng: random.Random) -> tuple[int, int]:
    """Two distinct uniform servers; the request is sent to both."""
    if n < 2:
        raise InsufficientServers(f"client cloning needs at least 2 servers, got {n}")
    a = rng.randrange(n)
    b = rng.randrange(n - 1)
    if b >= a:
        b += 1
    return a, b


# Dedupe ring size for completed request ids at the coordinator.
_COMPLETED_WINDOW = 1 << 20


class CoordinatorState:
    """Single-CPU cloning coordinator.

    Every handled message (request or response) occupies the coordinator
    for `per_message_delay_ns`, serialized behind `busy_until`.  A server
    is in the idle FIFO exactly when the coordinator has seen its response
    and not yet dispatched new work to it.
    """

    def __init__(self, n_servers: int, per_message_delay_ns: int = 2000):
        self.n_servers = n_servers
        self.per_message_delay_ns = per_message_delay_ns
        self.busy_until = 0
        self.idle: deque[int] = deque(range(n_servers))   # FIFO by time entered idle
        self.idle_set: set[int] = set(range(n_servers))
        self.pending: deque[NetClonePacket] = deque()
        self.outstanding: list[int | None] = [None] * n_servers  # server -> req_id
        self.clones_emitted = 0
        self.messages_handled = 0
        self._completed: set[int] = set()
        self._completed_order: list[int] = []
        self._ring_pos = 0

    def _serialize(self, now: int) -> int:
        start = now if now > self.busy_until else self.busy_until
        done = start + self.per_message_delay_ns
        self.busy_until = done
        self.messages_handled += 1
        return done

    def _take_idle(self) -> int:
        s = self.idle.popleft()
        self.idle_set.discard(s)
        return s

    def _dispatch(self, pkt: NetClonePacket, server: int) -> tuple[int, NetClonePacket]:
        self.outstanding[server] = pkt.req_id
        return server, pkt

    def on_request(self, pkt: NetClonePacket, now: int):
        """Handle an incoming request.

        Returns (dispatches, done_at) where dispatches is a list of
        (server_id, packet) pairs leaving the coordinator at done_at; empty
        when the request was buffered.
        """
        done = self._serialize(now)
        if len(self.idle) >= 2:
            s1 = self._take_idle()
            s2 = self._take_idle()
            clone = pkt.copy()
            self.clones_emitted += 1
            return [self._dispatch(pkt, s1), self._dispatch(clone, s2)], done
        if len(self.idle) == 1:
            s = self._take_idle()
            return [self._dispatch(pkt, s)], done
        self.pending.append(pkt)
        return [], done

    def on_response(self, pkt: NetClonePacket, now: int):
        """Handle a response from server `pkt.sid`.

        Returns (forward, dispatches, done_at): `forward` is the response to
        pass on to the client (None for a redundant slower copy), and
        dispatches holds the head-of-line request if this response freed a
        server while work was buffered.
        """
        done = self._serialize(now)
        server = pkt.sid
        dispatches: list[tuple[int, NetClonePacket]] = []
        if self.outstanding[server] is not None:
            self.outstanding[server] = None
            if self.pending:
                dispatches.append(self._dispatch(self.pending.popleft(), server))
            elif server not in self.idle_set:
                self.idle.append(server)
                self.idle_set.add(server)

        req = pkt.req_id
        if req in self._completed:
            return None, dispatches, done
        self._remember(req)
        return pkt, dispatches, done

    def _remember(self, key: int) -> None:
        if len(self._completed_order) < _COMPLETED_WINDOW:
            self._completed_order.append(key)
        else:
            old = self._completed_order[self._ring_pos]
            self._completed.discard(old)
            self._completed_order[self._ring_pos] = key
            self._ring_pos = (self._ring_pos + 1) % _COMPLETED_WINDOW
        self._completed.add(key)
