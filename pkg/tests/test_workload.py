"""Service-time distributions: analytic means, jitter, Zipf keys, parsing."""

import math
import random

import numpy as np
import pytest
from scipy import stats

from netclone_sim import (PRESETS, ServiceDistribution, ZipfSampler,
                          parse_distribution, sample_service, zipf_key)


def draws(spec, n, seed=1):
    d = parse_distribution(spec)
    rng = random.Random(seed)
    return [sample_service(d, rng) for _ in range(n)]


def test_bimodal_mean_matches_analytic():
    # 0.9 * 25 + 0.1 * 250 = 47.5
    xs = draws("bimodal:0.9:25:250", 10 ** 6)
    assert np.mean(xs) == pytest.approx(47.5, rel=0.01)


def test_always_jittered_exponential_mean():
    # Every draw multiplied by 15: mean 15 * 25 = 375.
    xs = draws("exp:25:jitter=1:15", 10 ** 6)
    assert np.mean(xs) == pytest.approx(375.0, rel=0.01)


def test_zero_jitter_probability_keeps_base_distribution():
    base = draws("exp:25", 20000, seed=9)
    jitterless = draws("exp:25:jitter=0:15", 20000, seed=9)
    assert base == jitterless  # same stream, untouched


def test_jitter_probability_respected():
    d = parse_distribution("bimodal:1:10:10:jitter=0.01:15")
    rng = random.Random(4)
    xs = [sample_service(d, rng) for _ in range(10 ** 5)]
    jittered = sum(1 for x in xs if x > 10)
    assert jittered == pytest.approx(1000, rel=0.25)
    assert all(x in (10.0, 150.0) for x in xs)  # multiplier on the sampled value


def test_all_draws_strictly_positive():
    for spec in ("exp:0.5", "bimodal:0.5:1:100", "kv:get=2", "exp:25:jitter=0.5:15"):
        assert all(x > 0 for x in draws(spec, 5000))


def test_fixed_seed_reproduces_stream():
    assert draws("exp:25:jitter=0.01:15", 5000, seed=3) == \
        draws("exp:25:jitter=0.01:15", 5000, seed=3)


def test_paper_style_presets_parse():
    for spec in PRESETS.values():
        d = parse_distribution(spec)
        assert d.analytic_mean_us() > 0
    assert parse_distribution(PRESETS["bimodal_90_25_10_250"]).p_short == 0.9


def test_kv_scan_cost_is_scan_factor_times_get():
    d = parse_distribution("kv:get=2:scan=100:scanfrac=0.5")
    rng = random.Random(8)
    xs = {sample_service(d, rng) for _ in range(1000)}
    assert xs == {2.0, 200.0}


def test_kv_mix_mean():
    d = parse_distribution("kv:get=2:scan=100:scanfrac=0.01")
    assert d.analytic_mean_us() == pytest.approx(0.99 * 2 + 0.01 * 200)


def test_analytic_mean_includes_jitter():
    d = parse_distribution("exp:25:jitter=0.01:15")
    assert d.analytic_mean_us() == pytest.approx(25 * (0.99 + 0.01 * 15))


# -- zipf ----------------------------------------------------------------------


def test_zipf_alpha_zero_is_uniform():
    sampler = ZipfSampler(50, 0.0)
    rng = random.Random(5)
    n = 10 ** 5
    counts = np.bincount([sampler.sample(rng) for _ in range(n)], minlength=51)[1:]
    chi2, p = stats.chisquare(counts)
    assert p > 0.001


def test_zipf_rank_one_frequency_matches_harmonic():
    key_count, alpha = 10 ** 6, 0.99
    # Independent oracle: P(rank 1) = 1 / H where H = sum k^-alpha.
    harmonic = float(np.sum(np.arange(1, key_count + 1, dtype=np.float64) ** -alpha))
    expected = 1.0 / harmonic
    sampler = ZipfSampler(key_count, alpha)
    rng = random.Random(6)
    n = 2 * 10 ** 5
    hits = sum(1 for _ in range(n) if sampler.sample(rng) == 1)
    assert hits / n == pytest.approx(expected, rel=0.10)


def test_zipf_singleton_key_space():
    rng = random.Random(7)
    assert all(zipf_key(1, 0.99, rng) == 1 for _ in range(20))


def test_zipf_keys_in_range():
    sampler = ZipfSampler(100, 0.99)
    rng = random.Random(8)
    assert all(1 <= sampler.sample(rng) <= 100 for _ in range(5000))


# -- spec parsing ---------------------------------------------------------------


def test_parse_rejects_malformed_specs():
    for bad in ("exp", "exp:25:7", "bimodal:0.9:25", "gamma:3", "kv:unknown=1",
                "exp:25:jitter=0.01", "exp:-5", "bimodal:2:25:250"):
        with pytest.raises(ValueError):
            parse_distribution(bad)


def test_invalid_distribution_parameters_rejected():
    with pytest.raises(ValueError):
        ServiceDistribution(kind="exp", mean_us=0)
    with pytest.raises(ValueError):
        ServiceDistribution(kind="exp", mean_us=5, jitter_p=1.5)
    with pytest.raises(ValueError):
        ServiceDistribution(kind="exp", mean_us=5, jitter_factor=0.5)
