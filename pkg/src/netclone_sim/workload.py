"""Service-time distributions and key-access patterns that drive server costs.

Distributions are described by compact spec strings so config files stay
flat:

    exp:25                                        exponential, mean 25us
    bimodal:0.9:25:250                            90% take 25us, 10% take 250us
    kv:get=2:scan=100:zipf=0.99:keys=1000000:scanfrac=0.01
    exp:25:jitter=0.01:15                         1% of draws multiplied by 15

The jitter suffix models rare service-time spikes: with probability
jitter_p the sampled duration is multiplied by jitter_factor.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ServiceDistribution:
    """Immutable description of a service-time law, durations in microseconds."""

    kind: str                       # "exp" | "bimodal" | "kv"
    mean_us: float = 0.0            # exp
    p_short: float = 0.0            # bimodal
    short_us: float = 0.0
    long_us: float = 0.0
    get_us: float = 0.0             # kv
    scan_factor: float = 100.0
    zipf_alpha: float = 0.99
    key_count: int = 1_000_000
    scan_fraction: float = 0.0
    key_bytes: int = 16             # recorded for fidelity; no cost impact
    value_bytes: int = 64
    jitter_p: float = 0.0
    jitter_factor: float = 15.0
    spec: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind == "exp" and self.mean_us <= 0:
            raise ValueError(f"exponential mean must be > 0, got {self.mean_us}")
        if self.kind == "bimodal":
            if not 0.0 <= self.p_short <= 1.0:
                raise ValueError(f"p_short must be in [0,1], got {self.p_short}")
            if self.short_us <= 0 or self.long_us <= 0:
                raise ValueError("bimodal durations must be > 0")
        if self.kind == "kv":
            if self.get_us <= 0:
                raise ValueError(f"kv get cost must be > 0, got {self.get_us}")
            if not 0.0 <= self.scan_fraction <= 1.0:
                raise ValueError(f"scan fraction must be in [0,1], got {self.scan_fraction}")
        if not 0.0 <= self.jitter_p <= 1.0:
            raise ValueError(f"jitter probability must be in [0,1], got {self.jitter_p}")
        if self.jitter_factor < 1.0:
            raise ValueError(f"jitter factor must be >= 1, got {self.jitter_factor}")

    def analytic_mean_us(self) -> float:
        """Expected service time including jitter, used for capacity estimates."""
        if self.kind == "exp":
            base = self.mean_us
        elif self.kind == "bimodal":
            base = self.p_short * self.short_us + (1.0 - self.p_short) * self.long_us
        else:
            base = (1.0 - self.scan_fraction) * self.get_us + \
                self.scan_fraction * self.get_us * self.scan_factor
        return base * (1.0 - self.jitter_p + self.jitter_p * self.jitter_factor)


def sample_service(d: ServiceDistribution, rng: random.Random) -> float:
    """Draw one service duration in microseconds (> 0).

    The jitter multiplier applies to the sampled value, not the mean, so a
    jittered draw keeps the shape of its base distribution.
    """
    if d.kind == "exp":
        v = rng.expovariate(1.0 / d.mean_us)
        while v <= 0.0:
            v = rng.expovariate(1.0 / d.mean_us)
    elif d.kind == "bimodal":
        v = d.short_us if rng.random() < d.p_short else d.long_us
    else:  # kv
        v = d.get_us * d.scan_factor if rng.random() < d.scan_fraction else d.get_us
    if d.jitter_p > 0.0 and rng.random() < d.jitter_p:
        v *= d.jitter_factor
    return v


class ZipfSampler:
    """Zipf(alpha) over ranks 1..key_count via a precomputed CDF.

    P(k) is proportional to 1/k^alpha; draws cost one binary search.
    """

    def __init__(self, key_count: int, alpha: float):
        if key_count < 1:
            raise ValueError(f"key_count must be >= 1, got {key_count}")
        if alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {alpha}")
        weights = np.arange(1, key_count + 1, dtype=np.float64) ** (-alpha)
        self.harmonic = float(weights.sum())
        self.cdf = np.cumsum(weights / self.harmonic)
        self.cdf[-1] = 1.0

    def sample(self, rng: random.Random) -> int:
        """Key rank in 1..key_count."""
        return int(np.searchsorted(self.cdf, rng.random(), side="right")) + 1


def zipf_key(key_count: int, alpha: float, rng: random.Random) -> int:
    """One-shot Zipf draw; build a ZipfSampler for repeated use."""
    return ZipfSampler(key_count, alpha).sample(rng)


def parse_distribution(spec: str) -> ServiceDistribution:
    """Parse a distribution spec string (see module docstring)."""
    s = spec.strip()
    jitter_p, jitter_factor = 0.0, 15.0
    if ":jitter=" in s:
        s, jit = s.split(":jitter=", 1)
        parts = jit.split(":")
        if len(parts) != 2:
            raise ValueError(f"jitter suffix must be jitter=p:factor, got {jit!r}")
        jitter_p, jitter_factor = float(parts[0]), float(parts[1])

    fields = s.split(":")
    kind = fields[0].lower()
    if kind == "exp":
        if len(fields) != 2:
            raise ValueError(f"exponential spec must be exp:MEAN_US, got {spec!r}")
        return ServiceDistribution(kind="exp", mean_us=float(fields[1]),
                                   jitter_p=jitter_p, jitter_factor=jitter_factor, spec=spec)
    if kind == "bimodal":
        if len(fields) != 4:
            raise ValueError(f"bimodal spec must be bimodal:P_SHORT:SHORT_US:LONG_US, got {spec!r}")
        return ServiceDistribution(kind="bimodal", p_short=float(fields[1]),
                                   short_us=float(fields[2]), long_us=float(fields[3]),
                                   jitter_p=jitter_p, jitter_factor=jitter_factor, spec=spec)
    if kind == "kv":
        kv = {"get": 2.0, "scan": 100.0, "zipf": 0.99, "keys": 1_000_000, "scanfrac": 0.01}
        for item in fields[1:]:
            if "=" not in item:
                raise ValueError(f"kv spec items must be key=value, got {item!r}")
            k, v = item.split("=", 1)
            if k not in kv:
                raise ValueError(f"unknown kv spec key {k!r}")
            kv[k] = float(v)
        return ServiceDistribution(kind="kv", get_us=kv["get"], scan_factor=kv["scan"],
                                   zipf_alpha=kv["zipf"], key_count=int(kv["keys"]),
                                   scan_fraction=kv["scanfrac"],
                                   jitter_p=jitter_p, jitter_factor=jitter_factor, spec=spec)
    raise ValueError(f"unknown distribution kind {kind!r} in {spec!r}")


# Workload presets used throughout the experiments.
PRESETS = {
    "exp25": "exp:25",
    "exp50": "exp:50",
    "exp500": "exp:500",
    "bimodal_90_25_10_250": "bimodal:0.9:25:250",
}


def exponential_median_us(mean_us: float) -> float:
    """Median of Exp(mean): mean * ln 2.  Handy analytic oracle."""
    return mean_us * math.log(2.0)
