"""Validate the simulator core against M/M/1 and M/M/c closed forms.

A single random-dispatch server with one worker is a textbook M/M/1 queue:
mean time in system is 1/(mu - lambda).  With c workers it becomes M/M/c,
where the Erlang-C formula gives the mean wait.  If the event engine,
arrival process, and service sampling are right, the simulated sojourn
times must land on these curves.
"""

import math

from netclone_sim import RunConfig, SchemeId, run_detailed

MEAN_SERVICE_US = 25.0


def erlang_c(c: int, offered: float) -> float:
    """Probability an arrival waits in an M/M/c queue (Erlang C)."""
    inv = sum(offered ** k / math.factorial(k) for k in range(c))
    last = offered ** c / (math.factorial(c) * (1 - offered / c))
    return last / (inv + last)


def mmc_mean_sojourn_us(c: int, rate_rps: float) -> float:
    mu = 1e6 / MEAN_SERVICE_US  # per-worker service rate, 1/s
    offered = rate_rps / mu
    wait = erlang_c(c, offered) / (c * mu - rate_rps)
    return wait * 1e6 + MEAN_SERVICE_US


def simulate(c: int, rho: float) -> float:
    mu = 1e6 / MEAN_SERVICE_US
    rate = rho * c * mu
    cfg = RunConfig(scheme=SchemeId.BASELINE, n_servers=1, workers_per_server=c,
                    rate_rps=rate, duration_s=8.0, distribution=f"exp:{MEAN_SERVICE_US}",
                    seed=42)
    return run_detailed(cfg).mean_sojourn_us


def main():
    print(f"{'workers':>7} {'rho':>5} {'simulated':>10} {'analytic':>10} {'error':>7}")
    for c in (1, 2, 4):
        for rho in (0.3, 0.5, 0.7, 0.9):
            mu = 1e6 / MEAN_SERVICE_US
            sim = simulate(c, rho)
            ana = mmc_mean_sojourn_us(c, rho * c * mu)
            print(f"{c:>7} {rho:>5.1f} {sim:>9.2f}us {ana:>9.2f}us "
                  f"{abs(sim - ana) / ana:>6.1%}")


if __name__ == "__main__":
    main()
