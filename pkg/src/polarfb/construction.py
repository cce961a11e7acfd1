"""Per-index reliability profiles and threshold-based frozen-set selection.

BEC profiles are exact (half the Bhattacharyya parameter); other channels use
genie-aided Monte Carlo estimation of the first-decision error rates, cached
to disk keyed by (channel, N, trials, seed).
"""

import csv
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channels import BEC, Channel
from .errors import InvalidArgumentError
from .mc import ga_error_census
from .transform import CodeConfig, _require_power_of_two

DEFAULT_MC_TRIALS = 100_000

CACHE_ENV_VAR = "POLARFB_CACHE_DIR"


def bec_bhattacharyya_profile(p: float, N: int) -> np.ndarray:
    """Bhattacharyya parameters of the N synthetic channels of a BEC(p).

    Applies (z, z) -> (2z - z^2, z^2) recursively from z = p; the vector sum
    is conserved at N*p.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError("erasure probability must be in [0, 1]")
    _require_power_of_two(N)
    z = np.array([p], dtype=np.float64)
    while z.size < N:
        nxt = np.empty(2 * z.size, dtype=np.float64)
        sq = z * z
        nxt[0::2] = 2.0 * z - sq
        nxt[1::2] = sq
        z = nxt
    return z


def optimal_threshold(N: int) -> float:
    """The rate-optimal freezing threshold 1/log2(N)."""
    if N < 2:
        raise InvalidArgumentError("N must be >= 2")
    return 1.0 / math.log2(N)


@dataclass(eq=False)
class ReliabilityProfile:
    """Per-index error probabilities P_e(U_i | U_1^{i-1}, Y) in natural order."""

    channel: Channel
    block_length: int
    pe: np.ndarray
    source: str  # 'exact-bec' | 'monte-carlo'
    trials: int = 0
    seed: int = 0


def all_info_config(N: int) -> CodeConfig:
    """Configuration with an empty frozen set (used for profile estimation)."""
    return CodeConfig(N, np.empty(0, dtype=np.int64), np.arange(1, N + 1), 0.0)


def exact_bec_profile(channel: Channel, N: int) -> ReliabilityProfile:
    if channel.kind != BEC:
        raise InvalidArgumentError("exact profiles exist only for the BEC")
    pe = bec_bhattacharyya_profile(channel.param, N) / 2.0
    return ReliabilityProfile(channel, N, pe, "exact-bec")


def mc_reliability_profile(channel: Channel, N: int, trials: int, seed: int = 0,
                           jobs: int = 1, exact_f: bool = False) -> ReliabilityProfile:
    """Estimate the profile by counting genie-aided first-decision errors."""
    census = ga_error_census(channel, all_info_config(N), trials, seed,
                             jobs=jobs, exact_f=exact_f)
    pe = census.index_error_counts / float(trials)
    return ReliabilityProfile(channel, N, pe, "monte-carlo", trials=trials, seed=seed)


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "polarfb"


def _cache_stem(channel, N, trials, seed, exact_f=False):
    suffix = "_exactf" if exact_f else ""
    return f"profile_{channel.kind}_{channel.param:g}_N{N}_t{trials}_s{seed}{suffix}"


def save_profile(profile: ReliabilityProfile, cache_dir, exact_f=False) -> Path:
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    stem = _cache_stem(profile.channel, profile.block_length, profile.trials,
                       profile.seed, exact_f)
    csv_path = cache_dir / f"{stem}.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "pe"])
        for i, v in enumerate(profile.pe):
            writer.writerow([i, repr(float(v))])
    sidecar = {
        "channel": profile.channel.spec_string,
        "block_length": profile.block_length,
        "trials": profile.trials,
        "seed": profile.seed,
        "source": profile.source,
        "exact_f": exact_f,
    }
    with open(cache_dir / f"{stem}.json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path


def load_profile(channel: Channel, N: int, trials: int, seed: int, cache_dir,
                 exact_f=False):
    stem = _cache_stem(channel, N, trials, seed, exact_f)
    csv_path = Path(cache_dir) / f"{stem}.csv"
    if not csv_path.exists():
        return None
    pe = np.zeros(N, dtype=np.float64)
    with open(csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            pe[int(row["index"])] = float(row["pe"])
    return ReliabilityProfile(channel, N, pe, "monte-carlo", trials=trials, seed=seed)


def reliability_profile(channel: Channel, N: int, trials: int = DEFAULT_MC_TRIALS,
                        seed: int = 0, cache_dir=None, jobs: int = 1,
                        exact_f: bool = False) -> ReliabilityProfile:
    """Exact profile for the BEC; cached Monte Carlo estimate otherwise."""
    if channel.kind == BEC:
        return exact_bec_profile(channel, N)
    cache_dir = default_cache_dir() if cache_dir is None else Path(cache_dir)
    cached = load_profile(channel, N, trials, seed, cache_dir, exact_f)
    if cached is not None:
        return cached
    profile = mc_reliability_profile(channel, N, trials, seed, jobs=jobs,
                                     exact_f=exact_f)
    save_profile(profile, cache_dir, exact_f)
    return profile


def select_frozen_set(profile: ReliabilityProfile, threshold: float) -> CodeConfig:
    """Freeze the indices whose error probability strictly exceeds the threshold."""
    if not 0.0 < threshold < 1.0:
        raise InvalidArgumentError("threshold must be in (0, 1)")
    frozen = np.flatnonzero(profile.pe > threshold).astype(np.int64) + 1
    info = np.flatnonzero(profile.pe <= threshold).astype(np.int64) + 1
    return CodeConfig(profile.block_length, frozen, info, threshold)


def build_code(channel: Channel, n: int, threshold_scale: float = 1.0,
               trials: int = DEFAULT_MC_TRIALS, seed: int = 0, cache_dir=None,
               jobs: int = 1, exact_f: bool = False) -> CodeConfig:
    """Construct a code at threshold eps*/scale for block length 2^n."""
    if threshold_scale <= 0:
        raise InvalidArgumentError("threshold scale must be > 0")
    N = 1 << int(n)
    profile = reliability_profile(channel, N, trials=trials, seed=seed,
                                  cache_dir=cache_dir, jobs=jobs, exact_f=exact_f)
    return select_frozen_set(profile, optimal_threshold(N) / threshold_scale)
