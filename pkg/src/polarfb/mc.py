"""Trial-parallel genie-aided Monte Carlo engine.

One generator is derived per trial from (seed, MC_TRIAL, trial index), so the
census is reproducible and independent of the worker count; workers merge
per-index counters and |T|-size histograms by plain summation.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .channels import BEC, channel_llr, transmit
from .decoding import DecoderWorkspace, ga_sc_decode
from .transform import assemble_u, polar_transform


@dataclass
class ErrorCensus:
    trials: int
    index_error_counts: np.ndarray  # per-position genie-aided first-decision errors
    size_histogram: np.ndarray      # histogram of the error-set size, length K+1


def _run_range(channel, config, seed, lo, hi, exact_f):
    N = config.block_length
    K = config.num_info_bits
    erasure = channel.kind == BEC
    ws = DecoderWorkspace(N)
    counts = np.zeros(N, dtype=np.int64)
    hist = np.zeros(K + 1, dtype=np.int64)
    for trial in range(lo, hi):
        g = rng.substream(seed, rng.MC_TRIAL, trial)
        bits = g.integers(0, 2, size=K + N, dtype=np.uint8)  # payload then tie coins
        u = assemble_u(config, bits[:K])
        obs = transmit(channel, polar_transform(u), g)
        errors = ga_sc_decode(config, channel_llr(channel, obs, validate=False),
                              u, bits[K:], erasure_mode=erasure, exact_f=exact_f,
                              workspace=ws, validate=False)
        counts[errors - 1] += 1
        hist[errors.size] += 1
    return counts, hist


def ga_error_census(channel, config, trials, seed, jobs=1, exact_f=False) -> ErrorCensus:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    jobs = max(1, int(jobs))
    if jobs == 1:
        counts, hist = _run_range(channel, config, seed, 0, trials, exact_f)
        return ErrorCensus(trials, counts, hist)
    edges = np.linspace(0, trials, jobs * 4 + 1, dtype=np.int64)
    counts = np.zeros(config.block_length, dtype=np.int64)
    hist = np.zeros(config.num_info_bits + 1, dtype=np.int64)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [
            pool.submit(_run_range, channel, config, seed, int(lo), int(hi), exact_f)
            for lo, hi in zip(edges[:-1], edges[1:])
            if hi > lo
        ]
        for fut in futures:
            c, h = fut.result()
            counts += c
            hist += h
    return ErrorCensus(trials, counts, hist)
