"""Deterministic discrete-event core: event loop, network model, metrics.

Time is integer nanoseconds throughout; events are processed in (time,
creation-order) order so identical (config, seed) pairs replay identical
traces.  One `Simulation` owns one run; runs share nothing mutable, so
sweeps can execute them in parallel processes.

Topology: client(s) -- switch -- servers, with a fixed one-way link delay
per hop and a per-packet switch traversal delay.  Schemes that use the
in-switch logic go through explicit switch events; schemes that only need
plain forwarding (random dispatch, client cloning, the coordinator) fold
the switch traversal into the hop delay, with the traversal instant still
checked against the failure window.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field, replace
from heapq import heappop, heappush
from random import Random
from typing import NamedTuple, Optional
from zlib import crc32

from .baselines import CoordinatorState, baseline_route, cclone_route
from .client import ClientModel, ResponseOutcome
from .errors import BadWindow, ConfigError, EmptySamples
from .model import MsgType, NetClonePacket, SchemeId
from .server import ArrivalOutcome, ServerModel
from .switch import ActionKind, SwitchMode, SwitchState, process_request, process_response
from .workload import ServiceDistribution, parse_distribution


class EventKind:
    CLIENT_SEND = 0
    SWITCH_INGRESS = 1
    RECIRCULATED = 2
    SERVER_ARRIVE = 3
    SERVICE_COMPLETE = 4
    SWITCH_RESPONSE = 5
    CLIENT_RECEIVE = 6
    SWITCH_RESET = 7
    # Coordinator legs of the coordinator-based scheme.
    COORD_REQUEST = 8
    COORD_RESPONSE = 9


class Event(NamedTuple):
    """Heap entry; ordering is (at, seqno) so payloads are never compared."""

    at: int
    seqno: int
    kind: int
    payload: Optional[NetClonePacket]


# Endpoint ids: 0 is the client aggregate, 1 the coordinator (when present),
# servers start at 2.
EP_CLIENT = 0
EP_COORD = 1
EP_SERVER_BASE = 2

_SCHEMES_WITH_SWITCH_LOGIC = (
    SchemeId.NETCLONE,
    SchemeId.NETCLONE_RACKSCHED,
    SchemeId.NETCLONE_NOFILTER,
)

_SWITCH_MODE = {
    SchemeId.NETCLONE: SwitchMode.NETCLONE,
    SchemeId.NETCLONE_RACKSCHED: SwitchMode.RACKSCHED,
    SchemeId.NETCLONE_NOFILTER: SwitchMode.FILTER_OFF,
}


@dataclass
class RunConfig:
    """Everything one run needs; validated before any event fires."""

    scheme: SchemeId
    n_servers: int
    rate_rps: float
    duration_s: float
    distribution: ServiceDistribution | str = "exp:25"
    workers_per_server: list[int] | int = 15
    load: float = 0.0                  # label on the record (fraction of saturation)
    warmup_fraction: float = 0.1
    seed: int = 1
    filter_tables: int = 2
    filter_slots: int = 2 ** 17
    link_delay_ns: int = 1500
    switch_delay_ns: int = 500
    recirc_delay_ns: int = 800
    client_cost_ns: int = 300
    n_clients: int = 2
    server_drop_cost_ns: int = 300
    clone_drop_counts_in_service: bool = False
    laedge_per_message_ns: int = 2000
    failure_down_s: Optional[float] = None
    failure_up_s: Optional[float] = None
    drain: bool = False
    collect_trace_hash: bool = False
    timeline_bucket_s: float = 0.0
    latency_cap: int = 4_000_000

    def normalized(self) -> "RunConfig":
        """Return a copy with shorthand fields expanded and checked."""
        cfg = replace(self)
        if isinstance(cfg.distribution, str):
            try:
                cfg.distribution = parse_distribution(cfg.distribution)
            except ValueError as e:
                raise ConfigError(f"distribution: {e}") from None
        if isinstance(cfg.workers_per_server, int):
            cfg.workers_per_server = [cfg.workers_per_server] * cfg.n_servers
        else:
            cfg.workers_per_server = list(cfg.workers_per_server)
        _validate(cfg)
        return cfg


def _validate(cfg: RunConfig) -> None:
    if not isinstance(cfg.scheme, SchemeId):
        raise ConfigError(f"scheme: expected a SchemeId, got {cfg.scheme!r}")
    min_servers = 1 if cfg.scheme is SchemeId.BASELINE else 2
    if cfg.n_servers < min_servers:
        raise ConfigError(f"n_servers: {cfg.scheme.value} needs >= {min_servers}, got {cfg.n_servers}")
    if len(cfg.workers_per_server) != cfg.n_servers:
        raise ConfigError(
            f"workers_per_server: length {len(cfg.workers_per_server)} != n_servers {cfg.n_servers}")
    if any(w < 1 for w in cfg.workers_per_server):
        raise ConfigError("workers_per_server: every entry must be >= 1")
    if cfg.rate_rps <= 0:
        raise ConfigError(f"rate_rps: must be > 0, got {cfg.rate_rps}")
    if cfg.duration_s <= 0:
        raise ConfigError(f"duration_s: must be > 0, got {cfg.duration_s}")
    if not 0.0 <= cfg.warmup_fraction < 1.0:
        raise ConfigError(f"warmup_fraction: must be in [0,1), got {cfg.warmup_fraction}")
    if cfg.filter_tables < 1:
        raise ConfigError(f"filter_tables: must be >= 1, got {cfg.filter_tables}")
    if cfg.filter_slots < 1 or (cfg.filter_slots & (cfg.filter_slots - 1)):
        raise ConfigError(f"filter_slots: must be a power of two, got {cfg.filter_slots}")
    for name in ("link_delay_ns", "switch_delay_ns", "recirc_delay_ns",
                 "client_cost_ns", "laedge_per_message_ns"):
        if getattr(cfg, name) <= 0:
            raise ConfigError(f"{name}: must be > 0, got {getattr(cfg, name)}")
    if cfg.server_drop_cost_ns < 0:
        raise ConfigError(f"server_drop_cost_ns: must be >= 0, got {cfg.server_drop_cost_ns}")
    if cfg.n_clients < 1:
        raise ConfigError(f"n_clients: must be >= 1, got {cfg.n_clients}")
    if (cfg.failure_down_s is None) != (cfg.failure_up_s is None):
        raise ConfigError("failure window: both failure_down_s and failure_up_s required")
    if cfg.failure_down_s is not None:
        if not (0.0 < cfg.failure_down_s < cfg.failure_up_s < cfg.duration_s):
            raise BadWindow(
                f"failure window [{cfg.failure_down_s}, {cfg.failure_up_s}) must satisfy "
                f"0 < down < up < duration ({cfg.duration_s})")


@dataclass
class MetricsRecord:
    """Per-run aggregate; exactly the columns of one CSV row."""

    scheme: str
    load: float
    offered_rps: float
    achieved_rps: float
    mean_us: float
    p50_us: float
    p99_us: float
    clone_rate: float
    server_drop_rate: float
    filter_drops: int
    duplicate_deliveries: int
    seed: int
    duration_s: float


CSV_COLUMNS = [
    "scheme", "load", "offered_rps", "achieved_rps", "mean_us", "p50_us",
    "p99_us", "clone_rate", "server_drop_rate", "filter_drops",
    "duplicate_deliveries", "seed", "duration_s",
]

TIMELINE_COLUMNS = ["scheme", "seed", "second", "completed_rps", "duplicates"]


def record_to_row(r: MetricsRecord) -> list[str]:
    """Stable string formatting so identical runs emit identical bytes."""
    return [
        r.scheme,
        f"{r.load:g}",
        f"{r.offered_rps:.1f}",
        f"{r.achieved_rps:.1f}",
        f"{r.mean_us:.3f}",
        f"{r.p50_us:.3f}",
        f"{r.p99_us:.3f}",
        f"{r.clone_rate:.6f}",
        f"{r.server_drop_rate:.6f}",
        str(r.filter_drops),
        str(r.duplicate_deliveries),
        str(r.seed),
        f"{r.duration_s:g}",
    ]


@dataclass
class RunResult:
    """MetricsRecord plus diagnostics that do not fit the CSV schema."""

    record: MetricsRecord
    generated: int = 0
    recorded: int = 0
    in_flight: int = 0
    lost_packets: int = 0
    duplicates: int = 0
    clones_emitted: int = 0
    server_drops: int = 0
    filter_drops: int = 0
    responses_total: int = 0
    responses_idle: int = 0
    mean_sojourn_us: float = 0.0
    sojourn_count: int = 0
    events_processed: int = 0
    trace_hash: int = 0
    completion_buckets: dict[int, int] = field(default_factory=dict)
    duplicate_buckets: dict[int, int] = field(default_factory=dict)

    @property
    def empty_queue_fraction(self) -> float:
        return self.responses_idle / self.responses_total if self.responses_total else 1.0


def percentile(samples, q: float) -> float:
    """Nearest-rank percentile: element ceil(q/100 * N) (1-based) when sorted."""
    if samples is None or len(samples) == 0:
        raise EmptySamples("percentile of an empty sample set")
    if not 0.0 <= q <= 100.0:
        raise ValueError(f"q must be in [0, 100], got {q}")
    data = sorted(samples)
    rank = math.ceil(q / 100.0 * len(data))
    return data[max(rank, 1) - 1]


class Simulation:
    """One deterministic run of one scheme at one offered rate."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg = cfg.normalized()
        self.end_ns = int(cfg.duration_s * 1e9)
        self.warmup_ns = int(cfg.duration_s * cfg.warmup_fraction * 1e9)
        self.down_ns = int(cfg.failure_down_s * 1e9) if cfg.failure_down_s is not None else -1
        self.up_ns = int(cfg.failure_up_s * 1e9) if cfg.failure_up_s is not None else -1
        scheme = cfg.scheme

        self.uses_switch = scheme in _SCHEMES_WITH_SWITCH_LOGIC
        n = cfg.n_servers
        if self.uses_switch:
            self.switch = SwitchState(
                n,
                mode=_SWITCH_MODE[scheme],
                filter_tables=cfg.filter_tables,
                filter_slots=cfg.filter_slots,
                addr_table={i: EP_SERVER_BASE + i for i in range(n)},
            )
            group_count = n * (n - 1)
            table_count = cfg.filter_tables
        else:
            self.switch = None
            group_count = 1
            table_count = 1

        bucket_ns = int(cfg.timeline_bucket_s * 1e9) if cfg.timeline_bucket_s > 0 else 0
        self.client = ClientModel(
            rate_rps=cfg.rate_rps,
            group_count=group_count,
            table_count=table_count,
            rng=Random(f"{cfg.seed}:client"),
            endpoint=EP_CLIENT,
            receiver_cost_ns=cfg.client_cost_ns,
            n_clients=cfg.n_clients,
            measure_from_ns=self.warmup_ns,
            measure_until_ns=self.end_ns,
            timeline_bucket_ns=bucket_ns,
            latency_cap=cfg.latency_cap,
        )
        dist = cfg.distribution
        self.servers = [
            ServerModel(
                i,
                cfg.workers_per_server[i],
                dist,
                Random(f"{cfg.seed}:server:{i}"),
                endpoint=EP_SERVER_BASE + i,
                drop_cost_ns=cfg.server_drop_cost_ns,
                drop_counts_in_service=cfg.clone_drop_counts_in_service,
            )
            for i in range(n)
        ]
        self.coord = (CoordinatorState(n, cfg.laedge_per_message_ns)
                      if scheme is SchemeId.LAEDGE else None)

        # Hop delays.  host_hop folds link-switch-link for schemes without
        # in-switch logic; the switch-passing instant for those is at +link.
        self.link_ns = cfg.link_delay_ns
        self.switch_ns = cfg.switch_delay_ns
        self.recirc_ns = cfg.recirc_delay_ns
        self.host_hop_ns = 2 * cfg.link_delay_ns + cfg.switch_delay_ns

        self._heap: list[Event] = []
        self._seqno = 0
        self.lost_packets = 0
        self.sojourn_sum_ns = 0
        self.sojourn_count = 0
        self.responses_total = 0
        self.responses_idle = 0
        self.events_processed = 0
        self.trace_hash = 0

        send = {
            SchemeId.BASELINE: self._send_baseline,
            SchemeId.CCLONE: self._send_cclone,
            SchemeId.LAEDGE: self._send_laedge,
        }
        self._send_request = send.get(scheme, self._send_switched)
        self._handlers = [
            self._on_client_send,       # CLIENT_SEND
            self._on_switch_ingress,    # SWITCH_INGRESS
            self._on_recirculated,      # RECIRCULATED
            self._on_server_arrive,     # SERVER_ARRIVE
            self._on_service_complete,  # SERVICE_COMPLETE
            self._on_switch_response,   # SWITCH_RESPONSE
            self._on_client_receive,    # CLIENT_RECEIVE
            self._on_switch_reset,      # SWITCH_RESET
            self._on_coord_request,     # COORD_REQUEST
            self._on_coord_response,    # COORD_RESPONSE
        ]

    # -- scheduling ------------------------------------------------------

    def _schedule(self, at: int, kind: int, payload) -> None:
        # Heap entries are plain tuples with the Event field order; tuple
        # construction is measurably cheaper in this hot path.
        self._seqno += 1
        heappush(self._heap, (at, self._seqno, kind, payload))

    def _switch_down(self, at: int) -> bool:
        return self.down_ns <= at < self.up_ns

    # -- request fan-out per scheme ---------------------------------------

    def _send_switched(self, pkt: NetClonePacket, now: int) -> None:
        self._schedule(now + self.link_ns, EventKind.SWITCH_INGRESS, pkt)

    def _send_baseline(self, pkt: NetClonePacket, now: int) -> None:
        pkt.req_id = self.client.next_local_id()
        sid = baseline_route(self.cfg.n_servers, self.client.rng)
        pkt.dst = EP_SERVER_BASE + sid
        if self._switch_down(now + self.link_ns):
            self.lost_packets += 1
            return
        self._schedule(now + self.host_hop_ns, EventKind.SERVER_ARRIVE, pkt)

    def _send_cclone(self, pkt: NetClonePacket, now: int) -> None:
        pkt.req_id = self.client.next_local_id()
        a, b = cclone_route(self.cfg.n_servers, self.client.rng)
        copy = pkt.copy()
        pkt.dst = EP_SERVER_BASE + a
        copy.dst = EP_SERVER_BASE + b
        for p in (pkt, copy):
            if self._switch_down(now + self.link_ns):
                self.lost_packets += 1
            else:
                self._schedule(now + self.host_hop_ns, EventKind.SERVER_ARRIVE, p)

    def _send_laedge(self, pkt: NetClonePacket, now: int) -> None:
        pkt.req_id = self.client.next_local_id()
        pkt.dst = EP_COORD
        if self._switch_down(now + self.link_ns):
            self.lost_packets += 1
            return
        self._schedule(now + self.host_hop_ns, EventKind.COORD_REQUEST, pkt)

    # -- event handlers ----------------------------------------------------

    def _on_client_send(self, now: int, _payload) -> None:
        pkt = self.client.build_request(now)
        self._send_request(pkt, now)
        nxt = now + self.client.next_arrival_gap()
        if nxt <= self.end_ns:
            self._schedule(nxt, EventKind.CLIENT_SEND, None)

    def _on_switch_ingress(self, now: int, pkt: NetClonePacket) -> None:
        if self._switch_down(now):
            self.lost_packets += 1
            return
        action = process_request(self.switch, pkt)
        after = now + self.switch_ns
        self._schedule(after + self.link_ns, EventKind.SERVER_ARRIVE, pkt)
        if action.kind == ActionKind.FORWARD_AND_RECIRCULATE:
            self._schedule(after + self.recirc_ns, EventKind.RECIRCULATED, action.clone)

    def _on_recirculated(self, now: int, clone: NetClonePacket) -> None:
        if self._switch_down(now):
            self.lost_packets += 1
            return
        process_request(self.switch, clone)  # addresses the clone
        self._schedule(now + self.switch_ns + self.link_ns, EventKind.SERVER_ARRIVE, clone)

    def _on_server_arrive(self, now: int, pkt: NetClonePacket) -> None:
        srv = self.servers[pkt.dst - EP_SERVER_BASE]
        pkt.enqueued_at = now
        outcome, done_at = srv.on_request_arrival(pkt, now)
        if outcome is ArrivalOutcome.DROPPED_CLONE:
            return
        if done_at is not None:
            self._schedule(done_at, EventKind.SERVICE_COMPLETE, pkt)

    def _on_service_complete(self, now: int, pkt: NetClonePacket) -> None:
        srv = self.servers[pkt.dst - EP_SERVER_BASE]
        resp, nxt, nxt_done = srv.on_service_complete(pkt, now)
        self.sojourn_sum_ns += now - pkt.enqueued_at
        self.sojourn_count += 1
        self.responses_total += 1
        if resp.state == 0:
            self.responses_idle += 1
        if nxt is not None:
            self._schedule(nxt_done, EventKind.SERVICE_COMPLETE, nxt)
        if self.uses_switch:
            self._schedule(now + self.link_ns, EventKind.SWITCH_RESPONSE, resp)
        elif self.coord is not None:
            if self._switch_down(now + self.link_ns):
                self.lost_packets += 1
            else:
                self._schedule(now + self.host_hop_ns, EventKind.COORD_RESPONSE, resp)
        else:
            if self._switch_down(now + self.link_ns):
                self.lost_packets += 1
            else:
                self._schedule(now + self.host_hop_ns, EventKind.CLIENT_RECEIVE, resp)

    def _on_switch_response(self, now: int, resp: NetClonePacket) -> None:
        if self._switch_down(now):
            self.lost_packets += 1
            return
        action = process_response(self.switch, resp)
        if action.kind == ActionKind.FORWARD_TO_CLIENT:
            self._schedule(now + self.switch_ns + self.link_ns,
                           EventKind.CLIENT_RECEIVE, resp)

    def _on_client_receive(self, now: int, resp: NetClonePacket) -> None:
        self.client.on_response(resp, now)

    def _on_switch_reset(self, now: int, _payload) -> None:
        if self.switch is not None:
            self.switch.reset_soft_state()

    def _on_coord_request(self, now: int, pkt: NetClonePacket) -> None:
        dispatches, done = self.coord.on_request(pkt, now)
        self._dispatch_from_coord(dispatches, done)

    def _on_coord_response(self, now: int, resp: NetClonePacket) -> None:
        forward, dispatches, done = self.coord.on_response(resp, now)
        self._dispatch_from_coord(dispatches, done)
        if forward is not None:
            if self._switch_down(done + self.link_ns):
                self.lost_packets += 1
            else:
                forward.dst = EP_CLIENT
                self._schedule(done + self.host_hop_ns, EventKind.CLIENT_RECEIVE, forward)

    def _dispatch_from_coord(self, dispatches, done: int) -> None:
        for server_id, pkt in dispatches:
            pkt.dst = EP_SERVER_BASE + server_id
            if self._switch_down(done + self.link_ns):
                self.lost_packets += 1
            else:
                self._schedule(done + self.host_hop_ns, EventKind.SERVER_ARRIVE, pkt)

    # -- main loop ---------------------------------------------------------

    def run(self) -> RunResult:
        cfg = self.cfg
        if self.down_ns >= 0 and self.uses_switch:
            self._schedule(self.up_ns, EventKind.SWITCH_RESET, None)
        self._schedule(self.client.next_arrival_gap(), EventKind.CLIENT_SEND, None)

        heap = self._heap
        handlers = self._handlers
        hard_end = (1 << 62) if cfg.drain else self.end_ns
        hashing = cfg.collect_trace_hash
        h = 0
        n_events = 0
        pack = struct.Struct("<qqB").pack
        pop = heappop
        while heap:
            at, _seq, kind, payload = pop(heap)
            if at > hard_end:
                break
            if hashing:
                h = crc32(pack(at, (payload.req_id if payload is not None else -1),
                               kind), h)
            n_events += 1
            handlers[kind](at, payload)
        self.events_processed = n_events
        self.trace_hash = h
        return self._collect()

    # -- metrics -----------------------------------------------------------

    def _collect(self) -> RunResult:
        cfg = self.cfg
        cl = self.client
        window_s = (self.end_ns - self.warmup_ns) / 1e9
        offered = cl.window_generated / window_s
        achieved = cl.window_recorded / window_s
        if cl.latencies_ns:
            lat_sorted = sorted(cl.latencies_ns)
            k = len(lat_sorted)
            p50 = lat_sorted[max(math.ceil(0.50 * k), 1) - 1] / 1000.0
            p99 = lat_sorted[max(math.ceil(0.99 * k), 1) - 1] / 1000.0
            mean = cl.latency_sum_ns / cl.window_recorded / 1000.0
        else:
            p50 = p99 = mean = 0.0

        clones = (self.switch.clones_emitted if self.switch is not None
                  else self.coord.clones_emitted if self.coord is not None
                  else cl.generated if cfg.scheme is SchemeId.CCLONE else 0)
        server_drops = sum(s.drops for s in self.servers)
        filter_drops = self.switch.filter_drops if self.switch is not None else 0
        generated = cl.generated

        record = MetricsRecord(
            scheme=cfg.scheme.value,
            load=cfg.load if cfg.load > 0 else 0.0,
            offered_rps=offered,
            achieved_rps=achieved,
            mean_us=mean,
            p50_us=p50,
            p99_us=p99,
            clone_rate=clones / generated if generated else 0.0,
            server_drop_rate=server_drops / generated if generated else 0.0,
            filter_drops=filter_drops,
            duplicate_deliveries=cl.duplicates,
            seed=cfg.seed,
            duration_s=cfg.duration_s,
        )
        return RunResult(
            record=record,
            generated=generated,
            recorded=cl.recorded,
            in_flight=generated - cl.recorded,
            lost_packets=self.lost_packets,
            duplicates=cl.duplicates,
            clones_emitted=clones,
            server_drops=server_drops,
            filter_drops=filter_drops,
            responses_total=self.responses_total,
            responses_idle=self.responses_idle,
            mean_sojourn_us=(self.sojourn_sum_ns / self.sojourn_count / 1000.0
                             if self.sojourn_count else 0.0),
            sojourn_count=self.sojourn_count,
            events_processed=self.events_processed,
            trace_hash=self.trace_hash,
            completion_buckets=dict(cl.completion_buckets),
            duplicate_buckets=dict(cl.duplicate_buckets),
        )


def run_detailed(cfg: RunConfig) -> RunResult:
    """Run one configuration to completion and return record + diagnostics."""
    return Simulation(cfg).run()


def run(cfg: RunConfig) -> MetricsRecord:
    """Run one configuration and return its aggregate metrics row."""
    return run_detailed(cfg).record


def empty_queue_fraction(cfg: RunConfig) -> float:
    """Fraction of responses that report an empty waiting queue."""
    return run_detailed(cfg).empty_queue_fraction


def inject_switch_failure(cfg: RunConfig, down_at_s: float, up_at_s: float):
    """Run with a switch outage in [down_at_s, up_at_s) and return the
    per-second achieved-throughput series (list of completions per second,
    one entry per whole second of the run) plus the detailed result."""
    if not (0.0 < down_at_s < up_at_s < cfg.duration_s):
        raise BadWindow(
            f"failure window [{down_at_s}, {up_at_s}) must satisfy 0 < down < up < "
            f"duration ({cfg.duration_s})")
    cfg = replace(cfg, failure_down_s=down_at_s, failure_up_s=up_at_s,
                  timeline_bucket_s=1.0)
    result = run_detailed(cfg)
    seconds = int(cfg.duration_s)
    series = [result.completion_buckets.get(s, 0) for s in range(seconds)]
    return series, result


def analytic_capacity_rps(cfg: RunConfig) -> float:
    """Upper-bound service capacity in requests/s, used to seed saturation
    searches: total worker slots over the mean service time, halved for the
    client-cloning scheme (every request is served twice), and capped by the
    coordinator message budget for the coordinator scheme."""
    cfg = cfg.normalized()
    mean_s = cfg.distribution.analytic_mean_us() / 1e6
    cap = sum(cfg.workers_per_server) / mean_s
    if cfg.scheme is SchemeId.CCLONE:
        cap /= 2.0
    if cfg.scheme is SchemeId.LAEDGE:
        # Two coordinator messages per request (one request, one response).
        cap = min(cap, 1e9 / (2.0 * cfg.laedge_per_message_ns))
    return cap


def find_saturation(
    cfg: RunConfig,
    threshold: float = 0.98,
    probe_duration_s: float = 0.25,
    rel_tol: float = 0.02,
    max_iters: int = 24,
) -> float:
    """Highest offered rate whose achieved/offered ratio stays >= threshold.

    Exponential bracketing from the analytic capacity guess, then bisection
    to `rel_tol` relative resolution.  Probes reuse cfg's seed, so the
    search is deterministic.
    """
    base = replace(cfg, duration_s=probe_duration_s, warmup_fraction=0.3,
                   drain=False, collect_trace_hash=False, timeline_bucket_s=0.0,
                   failure_down_s=None, failure_up_s=None)

    def stable(rate: float) -> bool:
        r = run(replace(base, rate_rps=rate, load=0.0))
        return r.achieved_rps / r.offered_rps >= threshold if r.offered_rps else False

    guess = analytic_capacity_rps(cfg)
    lo, hi = None, None
    rate = guess
    for _ in range(max_iters):
        if stable(rate):
            lo = rate
            if hi is not None:
                break
            rate *= 2.0
        else:
            hi = rate
            if lo is not None:
                break
            rate /= 2.0
    if lo is None:
        raise ConfigError("rate_rps: no stable rate found during saturation search")
    if hi is None:
        hi = rate
    while (hi - lo) / hi > rel_tol and max_iters > 0:
        max_iters -= 1
        mid = (lo + hi) / 2.0
        if stable(mid):
            lo = mid
        else:
            hi = mid
    return lo
