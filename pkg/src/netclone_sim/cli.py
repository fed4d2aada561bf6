"""Experiment runner: config files in, CSV out, plus a results summarizer.

A config file is flat INI (sections of key = value, comma-separated lists,
no nesting).  A sweep is the cross product of schemes x load points x
seeds; each tuple becomes one deterministic run and one CSV row.  Load
points given as fractions are normalized to the measured saturation
throughput of the random-dispatch baseline, mirroring how the result
figures put "load" on the x axis.

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from importlib import resources

from .engine import (CSV_COLUMNS, TIMELINE_COLUMNS, MetricsRecord, RunConfig,
                     find_saturation, record_to_row, run_detailed)
from .errors import BadWindow, ConfigError, IoError, SchemaError
from .model import SchemeId

_KNOWN_KEYS = {
    "experiment": {"schemes", "seeds", "duration_s", "warmup_fraction", "loads",
                   "rates_rps", "saturation_rps"},
    "cluster": {"n_servers", "workers_per_server"},
    "workload": {"distribution", "jitter"},
    "switch": {"filter_tables", "filter_slots", "per_packet_delay_ns",
               "recirc_delay_ns"},
    "network": {"link_delay_us"},
    "client": {"per_packet_cost_us", "n_clients"},
    "server": {"drop_cost_us", "drop_counts_in_service"},
    "laedge": {"per_message_delay_us"},
    "failure": {"window"},
    "output": {"csv"},
}


def _floats(raw: str, field: str) -> list[float]:
    vals = [v.strip() for v in raw.split(",") if v.strip()]
    if not vals:
        raise ConfigError(f"{field}: empty list")
    try:
        return [float(v) for v in vals]
    except ValueError as e:
        raise ConfigError(f"{field}: {e}") from None


def _ints(raw: str, field: str) -> list[int]:
    return [int(v) for v in _floats(raw, field)]


def _parse_window(raw: str, field: str) -> tuple[float, float]:
    parts = raw.split(":")
    if len(parts) != 2:
        raise ConfigError(f"{field}: expected START:END, got {raw!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as e:
        raise ConfigError(f"{field}: {e}") from None


class ExperimentConfig:
    """Parsed sweep description: base RunConfig plus the sweep axes."""

    def __init__(self, schemes, seeds, load_points, loads_are_fractions,
                 base: RunConfig, saturation_rps, output_csv):
        self.schemes = schemes
        self.seeds = seeds
        self.load_points = load_points
        self.loads_are_fractions = loads_are_fractions
        self.base = base
        self.saturation_rps = saturation_rps
        self.output_csv = output_csv


def preset_path(name: str) -> str | None:
    """Resolve a shipped preset config name to a real path, if it exists."""
    ref = resources.files("netclone_sim").joinpath("configs", f"{name}.ini")
    return str(ref) if ref.is_file() else None


def list_presets() -> list[str]:
    cfg_dir = resources.files("netclone_sim").joinpath("configs")
    return sorted(p.name[:-4] for p in cfg_dir.iterdir() if p.name.endswith(".ini"))


def load_config(path: str) -> ExperimentConfig:
    """Parse and validate an experiment config file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise IoError(f"config file {path!r} not found or unreadable")

    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in parser[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    def get(section, key, fallback=None):
        return parser.get(section, key, fallback=fallback)

    exp = parser["experiment"] if parser.has_section("experiment") else {}
    if "schemes" not in exp:
        raise ConfigError("experiment.schemes: required")
    try:
        schemes = [SchemeId.parse(s) for s in exp["schemes"].split(",") if s.strip()]
    except ValueError as e:
        raise ConfigError(f"experiment.schemes: {e}") from None
    if not schemes:
        raise ConfigError("experiment.schemes: empty list")
    seeds = _ints(exp.get("seeds", "1"), "experiment.seeds")
    duration_s = float(exp.get("duration_s", "1.0"))
    warmup = float(exp.get("warmup_fraction", "0.1"))

    has_loads = "loads" in exp
    has_rates = "rates_rps" in exp
    if has_loads == has_rates:
        raise ConfigError("experiment: exactly one of 'loads' or 'rates_rps' required")
    if has_loads:
        load_points = _floats(exp["loads"], "experiment.loads")
        if any(not 0.0 < p <= 1.5 for p in load_points):
            raise ConfigError("experiment.loads: fractions must be in (0, 1.5]")
    else:
        load_points = _floats(exp["rates_rps"], "experiment.rates_rps")
        if any(p <= 0 for p in load_points):
            raise ConfigError("experiment.rates_rps: rates must be > 0")
    saturation_rps = (float(exp["saturation_rps"])
                      if "saturation_rps" in exp else None)

    n_servers = int(get("cluster", "n_servers", "6"))
    workers_raw = get("cluster", "workers_per_server", "15")
    workers = _ints(workers_raw, "cluster.workers_per_server")
    workers_per_server = workers * n_servers if len(workers) == 1 else workers

    distribution = get("workload", "distribution", "exp:25")
    jitter = get("workload", "jitter", None)
    if jitter is not None:
        if ":jitter=" in distribution:
            raise ConfigError("workload.jitter: jitter given twice "
                              "(both key and distribution suffix)")
        p, factor = _parse_window(jitter, "workload.jitter")
        distribution = f"{distribution}:jitter={p:g}:{factor:g}"

    failure_window = None
    if parser.has_section("failure") and get("failure", "window"):
        failure_window = _parse_window(get("failure", "window"), "failure.window")

    base = RunConfig(
        scheme=schemes[0],
        n_servers=n_servers,
        rate_rps=1.0,  # placeholder, set per load point
        duration_s=duration_s,
        distribution=distribution,
        workers_per_server=workers_per_server,
        warmup_fraction=warmup,
        filter_tables=int(get("switch", "filter_tables", "2")),
        filter_slots=int(get("switch", "filter_slots", str(2 ** 17))),
        switch_delay_ns=int(get("switch", "per_packet_delay_ns", "500")),
        recirc_delay_ns=int(get("switch", "recirc_delay_ns", "800")),
        link_delay_ns=round(float(get("network", "link_delay_us", "1.5")) * 1000),
        client_cost_ns=round(float(get("client", "per_packet_cost_us", "0.3")) * 1000),
        n_clients=int(get("client", "n_clients", "2")),
        server_drop_cost_ns=round(float(get("server", "drop_cost_us", "0.3")) * 1000),
        clone_drop_counts_in_service=(get("server", "drop_counts_in_service", "false")
                                      .lower() in ("1", "true", "yes")),
        laedge_per_message_ns=round(float(get("laedge", "per_message_delay_us", "2.0")) * 1000),
        failure_down_s=failure_window[0] if failure_window else None,
        failure_up_s=failure_window[1] if failure_window else None,
        timeline_bucket_s=1.0 if failure_window else 0.0,
    )
    # Fail fast on anything the per-run validator would reject.
    replace(base, scheme=schemes[0], rate_rps=1.0).normalized()

    return ExperimentConfig(
        schemes=schemes,
        seeds=seeds,
        load_points=load_points,
        loads_are_fractions=has_loads,
        base=base,
        saturation_rps=saturation_rps,
        output_csv=get("output", "csv", "results.csv"),
    )


def _log(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _run_one(cfg: RunConfig):
    res = run_detailed(cfg)
    return res.record, res.completion_buckets, res.duplicate_buckets


def run_experiment(config_path: str, *, scheme: str | None = None,
                   load: float | None = None, seed: int | None = None,
                   duration: float | None = None, output: str | None = None,
                   force: bool = False, failure: tuple[float, float] | None = None,
                   jobs: int = 1):
    """Execute a sweep and write its CSV; returns the list of records."""
    exp = load_config(config_path)
    base = exp.base
    schemes = exp.schemes
    if scheme is not None:
        wanted = SchemeId.parse(scheme)
        if wanted not in schemes:
            _log(f"note: scheme {wanted.value} not in config list; running it anyway")
        schemes = [wanted]
    seeds = [seed] if seed is not None else exp.seeds
    load_points = [load] if load is not None else exp.load_points
    if duration is not None:
        base = replace(base, duration_s=duration)
    if failure is not None:
        base = replace(base, failure_down_s=failure[0], failure_up_s=failure[1],
                       timeline_bucket_s=1.0)

    out_path = output if output is not None else exp.output_csv
    to_stdout = out_path == "-"
    if not to_stdout and os.path.exists(out_path) and not force:
        raise IoError(f"output file {out_path!r} already exists; pass --force to overwrite")

    if exp.loads_are_fractions:
        if exp.saturation_rps is not None:
            sat = exp.saturation_rps
            _log(f"using configured baseline saturation: {sat:.0f} rps")
        else:
            _log("measuring baseline saturation throughput ...")
            sat_cfg = replace(base, scheme=SchemeId.BASELINE, rate_rps=1.0,
                              seed=seeds[0], failure_down_s=None, failure_up_s=None,
                              timeline_bucket_s=0.0)
            sat = find_saturation(sat_cfg)
            _log(f"baseline saturation: {sat:.0f} rps")
    else:
        sat = None

    cfgs: list[RunConfig] = []
    for sch in schemes:
        for pt in load_points:
            rate = pt * sat if sat is not None else pt
            for sd in seeds:
                cfgs.append(replace(base, scheme=sch, rate_rps=rate,
                                    load=pt if sat is not None else pt, seed=sd))

    _log(f"running {len(cfgs)} simulations "
         f"({len(schemes)} schemes x {len(load_points)} loads x {len(seeds)} seeds)")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_run_one, cfgs))
    else:
        outputs = []
        for i, cfg in enumerate(cfgs, 1):
            outputs.append(_run_one(cfg))
            _log(f"  [{i}/{len(cfgs)}] {cfg.scheme.value} load={cfg.load:g} "
                 f"seed={cfg.seed} done")

    # Deterministic row order regardless of execution order.
    order = sorted(range(len(cfgs)),
                   key=lambda i: (cfgs[i].scheme.value, cfgs[i].load, cfgs[i].seed))
    records = [outputs[i][0] for i in order]

    sink = sys.stdout if to_stdout else open(out_path, "w", newline="")
    try:
        writer = csv.writer(sink)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(record_to_row(rec))
    finally:
        if not to_stdout:
            sink.close()
            _log(f"wrote {len(records)} rows to {out_path}")

    has_failure = base.failure_down_s is not None
    if has_failure and not to_stdout:
        tl_path = _timeline_path(out_path)
        with open(tl_path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(TIMELINE_COLUMNS)
            for i in order:
                cfg, (_, comp, dup) = cfgs[i], outputs[i]
                for second in range(int(cfg.duration_s)):
                    writer.writerow([cfg.scheme.value, cfg.seed, second,
                                     comp.get(second, 0), dup.get(second, 0)])
        _log(f"wrote failure timeline to {tl_path}")
    return records


def _timeline_path(csv_path: str) -> str:
    root, ext = os.path.splitext(csv_path)
    return f"{root}.timeline{ext or '.csv'}"


def summarize(csv_path: str) -> str:
    """Per-scheme summary: saturation throughput, p99 by load, and the
    improvement ratio baseline_p99 / scheme_p99 averaged across loads."""
    try:
        f = open(csv_path, newline="")
    except OSError as e:
        raise IoError(f"cannot read {csv_path!r}: {e}") from None
    with f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != CSV_COLUMNS:
            raise SchemaError(f"unexpected CSV header {header!r}; "
                              f"expected {CSV_COLUMNS!r}")
        rows = [dict(zip(CSV_COLUMNS, row)) for row in reader]
    if not rows:
        raise SchemaError("CSV has a header but no data rows")

    by_scheme: dict[str, dict[float, list[float]]] = {}
    achieved: dict[str, float] = {}
    for row in rows:
        sch = row["scheme"]
        load = float(row["load"])
        by_scheme.setdefault(sch, {}).setdefault(load, []).append(float(row["p99_us"]))
        achieved[sch] = max(achieved.get(sch, 0.0), float(row["achieved_rps"]))

    def p99_at(sch: str, load: float) -> float:
        vals = by_scheme[sch][load]
        return sum(vals) / len(vals)

    lines = []
    header_line = f"{'scheme':<22}{'sat_rps':>12}  {'p99_us by load':<40}{'improvement':>12}"
    lines.append(header_line)
    lines.append("-" * len(header_line))
    baseline_key = SchemeId.BASELINE.value
    for sch in sorted(by_scheme):
        loads = sorted(by_scheme[sch])
        p99s = " ".join(f"{ld:g}:{p99_at(sch, ld):.1f}" for ld in loads)
        if baseline_key in by_scheme and sch != baseline_key:
            shared = [ld for ld in loads if ld in by_scheme[baseline_key]]
            ratios = [p99_at(baseline_key, ld) / p99_at(sch, ld)
                      for ld in shared if p99_at(sch, ld) > 0]
            improvement = f"{sum(ratios) / len(ratios):.2f}x" if ratios else "n/a"
        elif sch == baseline_key:
            improvement = "1.00x"
        else:
            improvement = "n/a"
        lines.append(f"{sch:<22}{achieved[sch]:>12.0f}  {p99s:<40}{improvement:>12}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="netclone-sim",
        description="Run request-cloning simulations and summarize their CSVs.")
    p.add_argument("--config", help="experiment config file or preset name")
    p.add_argument("--scheme", help="run only this scheme")
    p.add_argument("--load", type=float, help="run only this load point")
    p.add_argument("--seed", type=int, help="run only this seed")
    p.add_argument("--duration", type=float, help="override duration (seconds)")
    p.add_argument("--output", help="output CSV path ('-' for stdout)")
    p.add_argument("--force", action="store_true",
                   help="overwrite an existing output file")
    p.add_argument("--failure", help="inject a switch outage, START:END seconds")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--summarize", metavar="CSV",
                   help="print a summary table for an existing results CSV")
    p.add_argument("--list-presets", action="store_true",
                   help="list shipped experiment presets")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.list_presets:
            for name in list_presets():
                print(name)
            return 0
        if args.summarize:
            print(summarize(args.summarize))
            return 0
        if not args.config:
            raise ConfigError("--config is required unless --summarize is given")
        config_path = args.config
        if not os.path.exists(config_path):
            preset = preset_path(config_path)
            if preset is None:
                raise IoError(f"config {config_path!r}: no such file or preset")
            config_path = preset
        failure = _parse_window(args.failure, "--failure") if args.failure else None
        run_experiment(
            config_path,
            scheme=args.scheme,
            load=args.load,
            seed=args.seed,
            duration=args.duration,
            output=args.output,
            force=args.force,
            failure=failure,
            jobs=max(1, args.jobs),
        )
        return 0
    except (ConfigError, BadWindow, ValueError) as e:
        _log(f"config error: {e}")
        return 2
    except (IoError, SchemaError, OSError) as e:
        _log(f"error: {e}")
        return 3


if __name__ == "__main__":
    sys.exit(main())
