"""Kill the switch mid-run and watch throughput collapse and recover.

All switch state is soft: the request-id counter, the tracked server
states, and the response fingerprints.  When the switch comes back empty,
responses repopulate the state tables within microseconds and the sequence
number simply restarts, so the outage causes loss while it lasts and
nothing afterwards.
"""

from netclone_sim import RunConfig, SchemeId, inject_switch_failure

DOWN_AT, UP_AT = 5.0, 7.0


def main():
    cfg = RunConfig(scheme=SchemeId.NETCLONE, n_servers=2, workers_per_server=1,
                    rate_rps=30_000, duration_s=15.0, distribution="exp:25",
                    seed=7, warmup_fraction=0.05)
    print(f"switch outage injected at [{DOWN_AT}s, {UP_AT}s)")
    series, result = inject_switch_failure(cfg, DOWN_AT, UP_AT)
    peak = max(series)
    print(f"\n{'t':>3} {'completions/s':>14}")
    for second, completed in enumerate(series):
        bar = "#" * round(46 * completed / peak) if peak else ""
        marker = " <- switch down" if DOWN_AT <= second < UP_AT else ""
        print(f"{second:>3} {completed:>14,} {bar}{marker}")
    lost = result.lost_packets
    print(f"\npackets dropped by the dead switch: {lost:,}")
    print(f"requests never answered: {result.generated - result.recorded:,} "
          f"(of {result.generated:,} sent)")


if __name__ == "__main__":
    main()
