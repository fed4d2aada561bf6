"""How trustworthy is the empty-queue signal that gates cloning?

Servers piggyback their waiting-queue length on every response; the switch
clones a request only when both candidates last reported zero.  This demo
sweeps offered load and records the fraction of responses reporting an
empty queue: high at low load (cloning is almost always on), never quite
zero even near saturation (queues drain between bursts).

Writes eqf.csv in the empty-queue-fraction schema consumed by the plot
tool:  plot --csv eqf.csv --kind empty_queue_fraction --out eqf.svg
"""

import csv

from netclone_sim import RunConfig, SchemeId, analytic_capacity_rps, run_detailed

LOADS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
SEEDS = (1, 2, 3)


def main():
    base = RunConfig(scheme=SchemeId.NETCLONE, n_servers=6, workers_per_server=2,
                     rate_rps=1.0, duration_s=0.2,
                     distribution="exp:25:jitter=0.01:15", seed=1)
    capacity = analytic_capacity_rps(base)
    print(f"cluster capacity ~ {capacity:.0f} rps")
    print(f"{'load':>5} {'empty-queue fraction':>22} {'clone rate':>11}")

    rows = []
    for load in LOADS:
        fracs, clones = [], []
        for seed in SEEDS:
            cfg = RunConfig(**{**base.__dict__, "rate_rps": load * capacity,
                               "seed": seed})
            res = run_detailed(cfg)
            fracs.append(res.empty_queue_fraction)
            clones.append(res.record.clone_rate)
            rows.append(("netclone", load, seed, res.empty_queue_fraction))
        mean = sum(fracs) / len(fracs)
        bar = "#" * round(40 * mean)
        print(f"{load:>5.1f} {mean:>10.3f} {bar:<40.40} {sum(clones)/len(clones):>6.3f}")

    with open("eqf.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["scheme", "load", "seed", "empty_queue_fraction"])
        writer.writerows(rows)
    print("wrote eqf.csv")


if __name__ == "__main__":
    main()
