"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class TruncatedHeader(SimulationError):
    """Byte sequence shorter than the fixed header length."""


class InvalidType(SimulationError):
    """Header TYPE byte is not a known message type."""


class InsufficientServers(SimulationError):
    """Operation needs more servers than the cluster has."""


class UnknownGroup(SimulationError):
    """Request carries a group id with no group-table entry."""


class NonPositiveLatency(SimulationError):
    """Latency argument must be strictly positive."""


class NonPositiveRate(SimulationError):
    """Arrival rate must be strictly positive."""


class EmptySamples(SimulationError):
    """Percentile of an empty sample set is undefined."""


class BadWindow(SimulationError):
    """Failure-injection window does not fit inside the run."""


class ConfigError(SimulationError):
    """Run configuration failed validation; message names the field."""


class IoError(SimulationError):
    """File could not be read or written (includes output collisions)."""


class SchemaError(SimulationError):
    """CSV header does not match the documented column set."""
