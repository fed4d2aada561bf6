"""Discrete-event simulator for in-switch dynamic request cloning.

Models a rack of worker servers behind a programmable top-of-rack switch
that clones requests to a second server when both candidates look idle and
filters the redundant slower response with in-switch fingerprints.  Ships
with comparison schemes (uniform random dispatch, static client-side
cloning, a CPU-based cloning coordinator) and a JSQ-of-two scheduling
variant, plus the experiment tooling used to sweep load points and emit
CSV results.
"""

from .baselines import CoordinatorState, baseline_route, cclone_route
from .client import ClientModel, ResponseOutcome
from .engine import (CSV_COLUMNS, TIMELINE_COLUMNS, Event, EventKind,
                     MetricsRecord, RunConfig, RunResult, Simulation,
                     analytic_capacity_rps, empty_queue_fraction,
                     find_saturation, inject_switch_failure, percentile,
                     record_to_row, run, run_detailed)
from .errors import (BadWindow, ConfigError, EmptySamples, InsufficientServers,
                     InvalidType, IoError, NonPositiveLatency, NonPositiveRate,
                     SchemaError, SimulationError, TruncatedHeader, UnknownGroup)
from .model import (HEADER_LEN, CloStatus, MsgType, NetClonePacket, SchemeId,
                    decode_header, encode_header)
from .server import ArrivalOutcome, ServerModel
from .switch import (ActionKind, SwitchAction, SwitchMode, SwitchState,
                     build_group_table, capacity_estimate, hash_slot,
                     process_request, process_response)
from .workload import (PRESETS, ServiceDistribution, ZipfSampler,
                       parse_distribution, sample_service, zipf_key)

__version__ = "0.1.0"
