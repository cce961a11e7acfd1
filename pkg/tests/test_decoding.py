import numpy as np
import pytest

from conftest import bec_config
from polarfb import rng as prng
from polarfb.channels import bec, bsc, channel_llr, transmit
from polarfb.construction import all_info_config
from polarfb.decoding import (DecoderWorkspace, ga_sc_decode, sc_decode,
                              sc_decode_with_corrections)
from polarfb.errors import InvalidArgumentError
from polarfb.transform import polar_transform


def test_noiseless_round_trip():
    g = np.random.default_rng(0)
    for n in (1, 3, 6):
        N = 1 << n
        cfg = all_info_config(N)
        for _ in range(30):
            u = g.integers(0, 2, N).astype(np.uint8)
            llr = np.where(polar_transform(u) == 0, 300.0, -300.0)
            coins = g.integers(0, 2, N).astype(np.uint8)
            assert np.array_equal(sc_decode(cfg, llr, coins), u)


def test_bec_n2_worked_example():
    cfg = all_info_config(2)
    # no erasures: both bits recovered
    u = np.array([0, 1], dtype=np.uint8)
    llr = channel_llr(bec(0.5), polar_transform(u).astype(float))
    out = sc_decode(cfg, llr, np.array([0, 0], dtype=np.uint8), erasure_mode=True)
    assert np.array_equal(out, u)
    # both erased, coins forced wrong: both decisions err
    erased = np.array([0.0, 0.0])
    wrong_coins = np.array([1, 1], dtype=np.uint8)
    out = sc_decode(cfg, erased, wrong_coins, erasure_mode=True)
    assert np.array_equal(out, [1, 1])
    errors = ga_sc_decode(cfg, erased, np.zeros(2, dtype=np.uint8), wrong_coins,
                          erasure_mode=True)
    assert np.array_equal(errors, [1, 2])
    fixed = sc_decode_with_corrections(cfg, erased, errors, wrong_coins,
                                       erasure_mode=True)
    assert np.array_equal(fixed, [0, 0])


def test_ga_noiseless_returns_empty():
    cfg = all_info_config(8)
    u = np.array([1, 0, 1, 1, 0, 0, 1, 0], dtype=np.uint8)
    llr = np.where(polar_transform(u) == 0, 300.0, -300.0)
    errors = ga_sc_decode(cfg, llr, u, np.zeros(8, dtype=np.uint8))
    assert errors.size == 0


def test_ga_mean_error_count_bec_n2():
    cfg = all_info_config(2)
    ch = bec(0.5)
    trials = 100_000
    total = 0
    ws = DecoderWorkspace(2)
    for t in range(trials):
        g = prng.substream(13, prng.MC_TRIAL, t)
        u = g.integers(0, 2, 2).astype(np.uint8)
        llr = channel_llr(ch, transmit(ch, polar_transform(u), g))
        coins = g.integers(0, 2, 2).astype(np.uint8)
        total += ga_sc_decode(cfg, llr, u, coins, erasure_mode=True,
                              workspace=ws).size
    mean = total / trials
    # exhaustive pattern analysis: E = (0.75 + 0.25)/2
    assert abs(mean - 0.5) < 3 * np.sqrt(0.5 / trials) + 0.005


def _random_instance(g, cfg, channel):
    N = cfg.block_length
    u = np.zeros(N, dtype=np.uint8)
    u[cfg.info_zero_based] = g.integers(0, 2, cfg.num_info_bits)
    llr = channel_llr(channel, transmit(channel, polar_transform(u), g))
    coins = g.integers(0, 2, N).astype(np.uint8)
    return u, llr, coins


def test_empty_corrections_equals_plain_decode():
    cfg = bec_config(16, threshold=0.3)
    ch = bsc(0.2)
    g = np.random.default_rng(5)
    for _ in range(200):
        u, llr, coins = _random_instance(g, cfg, ch)
        plain = sc_decode(cfg, llr, coins)
        same = sc_decode_with_corrections(cfg, llr, [], coins)
        assert np.array_equal(plain, same)


@pytest.mark.parametrize("channel,erasure,threshold",
                         [(bsc(0.2), False, 0.08), (bec(0.5), True, 0.25)])
def test_success_equivalence_and_replay(channel, erasure, threshold):
    cfg = bec_config(64, threshold=threshold)
    g = np.random.default_rng(6)
    ws = DecoderWorkspace(64)
    successes = 0
    for _ in range(1500):
        u, llr, coins = _random_instance(g, cfg, channel)
        errors = ga_sc_decode(cfg, llr, u, coins, erasure_mode=erasure, workspace=ws)
        plain = sc_decode(cfg, llr, coins, erasure_mode=erasure, workspace=ws)
        assert np.array_equal(plain, u) == (errors.size == 0)
        successes += errors.size == 0
        fixed = sc_decode_with_corrections(cfg, llr, errors, coins,
                                           erasure_mode=erasure, workspace=ws)
        assert np.array_equal(fixed, u)
    assert 0 < successes < 1500  # both branches exercised


def test_payload_invariance_of_error_count():
    # symmetric channel + fair coins: |T| under random payloads matches all-zero
    cfg = bec_config(32, threshold=0.3)
    ch = bsc(0.25)
    trials = 4000
    hists = []
    for tag, random_payload in ((21, True), (22, False)):
        hist = np.zeros(cfg.num_info_bits + 1)
        ws = DecoderWorkspace(32)
        for t in range(trials):
            g = prng.substream(tag, prng.MC_TRIAL, t)
            u = np.zeros(32, dtype=np.uint8)
            if random_payload:
                u[cfg.info_zero_based] = g.integers(0, 2, cfg.num_info_bits)
            else:
                g.integers(0, 2, cfg.num_info_bits)  # same stream consumption
            llr = channel_llr(ch, transmit(ch, polar_transform(u), g))
            coins = g.integers(0, 2, 32).astype(np.uint8)
            hist[ga_sc_decode(cfg, llr, u, coins, workspace=ws).size] += 1
        hists.append(hist)
    a, b = hists
    pooled = a + b
    keep = pooled >= 10
    a = np.append(a[keep], a[~keep].sum())
    b = np.append(b[keep], b[~keep].sum())
    expected = (a + b) / 2
    chi2 = (((a - expected) ** 2 + (b - expected) ** 2) / expected).sum()
    from scipy.stats import chi2 as chi2_dist
    assert chi2_dist.sf(chi2, max(1, a.size - 1)) > 0.001


def test_update_counter_is_n_log_n():
    cfg = all_info_config(16)
    ws = DecoderWorkspace(16)
    llr = np.ones(16)
    sc_decode(cfg, llr, np.zeros(16, dtype=np.uint8), workspace=ws)
    assert ws.updates == 16 * 4
    sc_decode(cfg, llr, np.zeros(16, dtype=np.uint8), workspace=ws)
    assert ws.updates == 2 * 16 * 4


def test_input_validation():
    cfg = bec_config(8, threshold=0.4)
    coins = np.zeros(8, dtype=np.uint8)
    with pytest.raises(InvalidArgumentError):
        sc_decode(cfg, np.ones(4), coins)
    with pytest.raises(InvalidArgumentError):
        ga_sc_decode(cfg, np.ones(8), np.ones(8, dtype=np.uint8), coins)
    frozen_index = int(cfg.frozen[0])
    with pytest.raises(InvalidArgumentError):
        sc_decode_with_corrections(cfg, np.ones(8), [frozen_index], coins)
    with pytest.raises(InvalidArgumentError):
        sc_decode_with_corrections(cfg, np.ones(8), [9], coins)
    with pytest.raises(InvalidArgumentError):
        sc_decode(cfg, np.ones(8), np.zeros(4, dtype=np.uint8))


def test_exact_f_combine_value():
    # the --exact-f path must realize the tanh rule, checked at a single node
    cfg = all_info_config(2)
    ws = DecoderWorkspace(2)
    g = np.random.default_rng(9)
    for _ in range(100):
        a, b = g.normal(scale=3.0, size=2)
        sc_decode(cfg, np.array([a, b]), np.zeros(2, dtype=np.uint8),
                  exact_f=True, workspace=ws)
        expected = 2.0 * np.arctanh(np.tanh(a / 2.0) * np.tanh(b / 2.0))
        assert ws.llr_stages[1, 0] == pytest.approx(expected, abs=1e-9)


def test_exact_f_decodes_biawgn():
    from polarfb.channels import biawgn
    cfg = bec_config(32, threshold=0.3)
    ch = biawgn(0.4)  # high SNR: min-sum and tanh-rule trajectories agree
    g = np.random.default_rng(10)
    for _ in range(100):
        u, llr, coins = _random_instance(g, cfg, ch)
        a = ga_sc_decode(cfg, llr, u, coins)
        b = ga_sc_decode(cfg, llr, u, coins, exact_f=True)
        assert np.array_equal(a, b)
        assert np.all(cfg.frozen_mask[a - 1] == 0)
