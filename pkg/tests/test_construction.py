import math

import numpy as np
import pytest

from polarfb.channels import bec, bsc
from polarfb.construction import (ReliabilityProfile, bec_bhattacharyya_profile,
                                  build_code, load_profile,
                                  mc_reliability_profile, optimal_threshold,
                                  reliability_profile, select_frozen_set)
from polarfb.errors import InvalidArgumentError


def test_bec_profile_small():
    assert np.allclose(bec_bhattacharyya_profile(0.5, 2), [0.75, 0.25])
    assert np.allclose(bec_bhattacharyya_profile(0.5, 4),
                       [0.9375, 0.5625, 0.4375, 0.0625])


def test_bec_profile_conservation():
    for p in (0.3, 0.5, 0.7):
        for n in (4, 10, 14):
            z = bec_bhattacharyya_profile(p, 1 << n)
            assert abs(math.fsum(z) - (1 << n) * p) < 1e-12


def test_bec_profile_validation():
    with pytest.raises(InvalidArgumentError):
        bec_bhattacharyya_profile(1.2, 4)
    with pytest.raises(InvalidArgumentError):
        bec_bhattacharyya_profile(0.5, 3)


def test_optimal_threshold():
    assert optimal_threshold(1024) == pytest.approx(0.1)
    assert optimal_threshold(2) == pytest.approx(1.0)
    assert optimal_threshold(2048) == pytest.approx(1.0 / 11.0)
    with pytest.raises(InvalidArgumentError):
        optimal_threshold(1)


def _profile(pe):
    pe = np.asarray(pe, dtype=float)
    return ReliabilityProfile(bsc(0.11), pe.size, pe, "monte-carlo")


def test_select_frozen_set_examples():
    cfg = select_frozen_set(_profile([0.1958, 0.11]), 0.15)
    assert np.array_equal(cfg.frozen, [1])
    assert np.array_equal(cfg.info, [2])
    cfg = select_frozen_set(_profile([0.1958, 0.11]), 0.05)
    assert np.array_equal(cfg.frozen, [1, 2])
    assert cfg.num_info_bits == 0
    # ties go to the information set (strict inequality)
    cfg = select_frozen_set(_profile([0.15, 0.15]), 0.15)
    assert cfg.num_info_bits == 2


def test_select_frozen_set_threshold_validation():
    with pytest.raises(InvalidArgumentError):
        select_frozen_set(_profile([0.1, 0.2]), 0.0)
    with pytest.raises(InvalidArgumentError):
        select_frozen_set(_profile([0.1, 0.2]), 1.0)


def test_frozen_set_monotone_in_threshold():
    profile = reliability_profile(bec(0.5), 64)
    sets = [set(select_frozen_set(profile, t).frozen.tolist())
            for t in (0.05, 0.1, 0.2, 0.4)]
    for smaller_threshold, larger_threshold in zip(sets, sets[1:]):
        assert smaller_threshold >= larger_threshold


def test_mc_profile_noiseless():
    profile = mc_reliability_profile(bec(0.0), 8, trials=500, seed=0)
    assert not profile.pe.any()


def test_mc_profile_matches_exact_bec():
    trials = 100_000
    profile = mc_reliability_profile(bec(0.5), 2, trials=trials, seed=2)
    exact = bec_bhattacharyya_profile(0.5, 2) / 2
    sigma = np.sqrt(exact * (1 - exact) / trials)
    assert np.all(np.abs(profile.pe - exact) < 3 * sigma)


def test_mc_profile_bsc_n2_map_values():
    # exact MAP analysis: first index errs iff exactly one flip; second index
    # errs with probability p (two agreeing looks or a fairly broken tie)
    p = 0.11
    trials = 100_000
    profile = mc_reliability_profile(bsc(p), 2, trials=trials, seed=3)
    exact = np.array([2 * p * (1 - p), p])
    sigma = np.sqrt(exact * (1 - exact) / trials)
    assert np.all(np.abs(profile.pe - exact) < 3 * sigma)


def test_worker_count_invariance():
    a = mc_reliability_profile(bsc(0.2), 16, trials=800, seed=5, jobs=1)
    b = mc_reliability_profile(bsc(0.2), 16, trials=800, seed=5, jobs=2)
    assert np.array_equal(a.pe, b.pe)


def test_profile_cache_round_trip(tmp_path):
    ch = bsc(0.2)
    first = reliability_profile(ch, 16, trials=600, seed=7, cache_dir=tmp_path)
    loaded = load_profile(ch, 16, 600, 7, tmp_path)
    assert loaded is not None
    assert np.array_equal(loaded.pe, first.pe)
    again = reliability_profile(ch, 16, trials=600, seed=7, cache_dir=tmp_path)
    assert np.array_equal(again.pe, first.pe)


def test_build_code_uses_scaled_threshold():
    cfg = build_code(bec(0.5), 6, threshold_scale=2.0)
    assert cfg.threshold == pytest.approx(optimal_threshold(64) / 2.0)
    assert cfg.num_info_bits > 0
