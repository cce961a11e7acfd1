import math

import numpy as np
import pytest
from scipy.special import erfc

from polarfb.errors import InvalidArgumentError
from polarfb.sk import (SKParams, analytic_residual_variance, awgn_capacity,
                        sk_error_bound, sk_simulate)


def test_params_validation():
    with pytest.raises(InvalidArgumentError):
        SKParams(power=0.0, rate=0.1, rounds=5)
    with pytest.raises(InvalidArgumentError):
        SKParams(power=1.0, rate=0.5, rounds=5)  # rate == capacity
    with pytest.raises(InvalidArgumentError):
        SKParams(power=1.0, rate=0.6, rounds=5)
    with pytest.raises(InvalidArgumentError):
        sk_error_bound(1.0, 0.5, 5)
    assert SKParams(power=1.0, rate=0.4, rounds=10).message_count == 16
    assert SKParams(power=1.0, rate=0.1, rounds=2).message_count == 2  # clamp


def test_single_round_variance():
    params = SKParams(power=1.0, rate=0.2, rounds=1)
    res = sk_simulate(params, 200_000, seed=0)
    assert res.residual_variance == pytest.approx(1.0, rel=0.02)
    assert analytic_residual_variance(1.0, 1) == 1.0


def test_variance_schedule():
    params = SKParams(power=1.0, rate=0.4, rounds=10)
    res = sk_simulate(params, 100_000, seed=1)
    assert res.residual_variance == pytest.approx(2.0 ** -9, rel=0.05)
    # per-round shrinkage 1/(P+1)
    ratios = (res.residual_variance_by_round[1:]
              / res.residual_variance_by_round[:-1])
    assert np.allclose(ratios, 0.5, rtol=0.05)


def test_bound_oracle_identity():
    # 2Q(sqrt(3)/2^{NR}/sqrt(Var)) must equal 2Q(delta 2^{N(C-R)})
    for P in (1.0, 3.0, 7.5):
        for N in (5, 10, 12):
            C = awgn_capacity(P)
            for frac in (0.25, 0.5, 0.8):
                R = frac * C
                direct_arg = (math.sqrt(3.0) / 2 ** (N * R)
                              / math.sqrt(analytic_residual_variance(P, N)))
                direct = erfc(direct_arg / math.sqrt(2.0))
                assert sk_error_bound(P, R, N) == pytest.approx(direct, rel=1e-10)


def test_bound_limits():
    P = 2.0
    C = awgn_capacity(P)
    delta = math.sqrt(3.0 * P / (P + 1.0))
    near_capacity = sk_error_bound(P, C - 1e-12, 8)
    assert near_capacity == pytest.approx(erfc(delta / math.sqrt(2.0)), rel=1e-6)
    assert sk_error_bound(P, 0.25 * C, 60) == pytest.approx(0.0, abs=1e-300)


def test_error_rate_within_bound():
    params = SKParams(power=3.0, rate=0.8 * awgn_capacity(3.0), rounds=12)
    res = sk_simulate(params, 100_000, seed=2)
    bound = sk_error_bound(3.0, params.rate, 12)
    sigma = math.sqrt(max(res.error_rate, 1e-9) * (1 - res.error_rate)
                      / res.trials)
    assert res.error_rate <= bound + 3 * sigma


def test_doubly_exponential_trend():
    # log(-log Pe) grows roughly linearly in N at fixed R below capacity
    P, R = 1.0, 0.4
    values = []
    for N in (5, 10, 15):
        res = sk_simulate(SKParams(power=P, rate=R, rounds=N), 100_000,
                          seed=3)
        assert 0 < res.error_rate < 1
        values.append(math.log(-math.log(res.error_rate)))
    assert values[0] < values[1] < values[2]


def test_simulation_reproducible():
    params = SKParams(power=1.0, rate=0.3, rounds=6)
    a = sk_simulate(params, 5000, seed=4)
    b = sk_simulate(params, 5000, seed=4)
    assert a.error_rate == b.error_rate
    assert np.array_equal(a.residual_variance_by_round,
                          b.residual_variance_by_round)
