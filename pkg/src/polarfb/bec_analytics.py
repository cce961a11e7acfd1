"""Exact second-order analysis of the genie-aided error count on the BEC.

On a BEC every synthetic channel is again a BEC, so the per-index erasure
indicators have an exactly computable joint second moment.  The covariance
matrix of those indicators obeys a level-doubling recursion: writing c for
the parent-level covariance and Z_a, Z_b for the parent Bhattacharyya
parameters, children combine as

    odd,  odd   2(1-Z_a)(1-Z_b) c + c^2      (both erasures are ORs)
    odd,  even  2(1-Z_a) Z_b    c - c^2
    even, odd   2 Z_a (1-Z_b)   c - c^2
    even, even  2 Z_a Z_b       c + c^2      (both erasures are ANDs)

The even-even plus sign follows from Cov[A1 A2, B1 B2] =
(c + Z_a Z_b)^2 - Z_a^2 Z_b^2 for two independent parent uses, and is what
the exhaustive-pattern oracle confirms; it also makes the recursion exact on
the diagonal (Bernoulli variance Z(1-Z)), which we still write explicitly to
pin it at machine precision.

An erased information decision errs with probability 1/2 (fair tie coin),
independently across positions, so the error-set size given an erased set S
is Binomial(|S ∩ I|, 1/2).  That yields

    E[|T|]   = 1/2 sum_{i in I} Z_i
    Var[|T|] = 1/2 E[|T|] + 1/4 sum_{i,j in I} C(i,j)

and, for N <= 16, an exact pmf by enumerating all 2^N erasure patterns.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from .channels import Channel
from .construction import bec_bhattacharyya_profile
from .errors import InvalidArgumentError, ResourceLimitError
from .mc import ga_error_census
from .transform import CodeConfig, bit_reversal_permutation, _require_power_of_two

FULL_MATRIX_CAP = 1 << 12
STREAMING_CAP = 1 << 13
BRUTE_FORCE_CAP = 16


@dataclass
class ErrorCountStats:
    mean: float
    variance: float
    source: str  # 'exact-recursion' | 'brute-force' | 'monte-carlo'
    degenerate: bool = False
    pmf: np.ndarray | None = None


@dataclass(eq=False)
class CovarianceMatrix:
    block_length: int
    matrix: np.ndarray


def _child_z(z):
    out = np.empty(2 * z.size, dtype=np.float64)
    sq = z * z
    out[0::2] = 2.0 * z - sq
    out[1::2] = sq
    return out


def _next_level(C, z):
    """One doubling step of the covariance recursion (diagonal pinned)."""
    C2 = C * C
    zo = 1.0 - z  # odd children come from the OR branch
    m = z.size
    out = np.empty((2 * m, 2 * m), dtype=np.float64)
    out[0::2, 0::2] = 2.0 * np.outer(zo, zo) * C + C2
    out[0::2, 1::2] = 2.0 * np.outer(zo, z) * C - C2
    out[1::2, 0::2] = 2.0 * np.outer(z, zo) * C - C2
    out[1::2, 1::2] = 2.0 * np.outer(z, z) * C + C2
    zc = _child_z(z)
    np.fill_diagonal(out, zc * (1.0 - zc))
    return out, zc


def covariance_matrix(p: float, N: int) -> CovarianceMatrix:
    """Full N-by-N covariance matrix of the erasure indicators for a BEC(p)."""
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError("erasure probability must be in [0, 1]")
    _require_power_of_two(N)
    if N > FULL_MATRIX_CAP:
        raise ResourceLimitError(
            f"full covariance matrix capped at N={FULL_MATRIX_CAP}; "
            "use info_block_covariance_sum for larger blocks"
        )
    C = np.array([[p * (1.0 - p)]], dtype=np.float64)
    z = np.array([p], dtype=np.float64)
    while C.shape[0] < N:
        C, z = _next_level(C, z)
    return CovarianceMatrix(N, C)


def info_block_covariance_sum(p: float, N: int, info_one_based,
                              row_chunk: int = 512) -> float:
    """Sum of covariance entries over the info-set block without holding C_N.

    Builds the full parent matrix at N/2 and streams the final level in row
    chunks, so block lengths up to twice the full-matrix cap are reachable.
    """
    _require_power_of_two(N)
    if N > STREAMING_CAP:
        raise ResourceLimitError(f"covariance block sums capped at N={STREAMING_CAP}")
    info0 = np.asarray(info_one_based, dtype=np.int64) - 1
    if info0.size == 0:
        return 0.0
    if N <= 2:
        C = covariance_matrix(p, N).matrix
        return float(C[np.ix_(info0, info0)].sum())

    C = np.array([[p * (1.0 - p)]], dtype=np.float64)
    z = np.array([p], dtype=np.float64)
    while C.shape[0] < N // 2:
        C, z = _next_level(C, z)

    zc = _child_z(z)
    diag = zc * (1.0 - zc)
    mask = np.zeros(N, dtype=bool)
    mask[info0] = True
    w_col = np.where(np.arange(N) % 2 == 0, 1.0 - np.repeat(z, 2), np.repeat(z, 2))
    t_col = np.where(np.arange(N) % 2 == 0, 1.0, -1.0)
    cols = np.flatnonzero(mask)
    pcols = cols // 2
    total = 0.0
    for lo in range(0, N, row_chunk):
        hi = min(lo + row_chunk, N)
        rows = np.arange(lo, hi)[mask[lo:hi]]
        if rows.size == 0:
            continue
        prow = rows // 2
        Cp = C[np.ix_(prow, pcols)]
        block = (2.0 * np.outer(w_col[rows], w_col[cols]) * Cp
                 + np.outer(t_col[rows], t_col[cols]) * Cp * Cp)
        on_diag = rows[:, None] == cols[None, :]
        block[on_diag] = diag[rows[np.any(on_diag, axis=1)]]
        total += float(block.sum())
    return total


def exact_error_count_stats(p: float, config: CodeConfig,
                            cov: CovarianceMatrix | None = None) -> ErrorCountStats:
    """Theorem-style exact mean/variance of the error-set size on a BEC(p)."""
    if config.num_info_bits == 0:
        return ErrorCountStats(0.0, 0.0, "exact-recursion", degenerate=True)
    z = bec_bhattacharyya_profile(p, config.block_length)
    mean = 0.5 * float(z[config.info_zero_based].sum())
    if cov is not None:
        if cov.block_length != config.block_length:
            raise InvalidArgumentError("covariance matrix size mismatch")
        block = float(cov.matrix[np.ix_(config.info_zero_based,
                                        config.info_zero_based)].sum())
    else:
        block = info_block_covariance_sum(p, config.block_length, config.info)
    variance = 0.5 * mean + 0.25 * block
    return ErrorCountStats(mean, variance, "exact-recursion")


@dataclass
class BruteForceResult:
    stats: ErrorCountStats
    pmf: np.ndarray               # exact distribution of the error-set size
    covariance: np.ndarray        # exact erasure-indicator covariance matrix
    bhattacharyya: np.ndarray     # exact per-index erasure probabilities


def brute_force_erasure_stats(p: float, config: CodeConfig) -> BruteForceResult:
    """Independent oracle: enumerate all 2^N erasure patterns exactly.

    Erasure indicators propagate through the polar tree (OR at f-levels, AND
    at genie-fed g-levels); conditioned on the erased information count m,
    the error count is Binomial(m, 1/2).
    """
    N = config.block_length
    if N > BRUTE_FORCE_CAP:
        raise ResourceLimitError(f"brute force capped at N={BRUTE_FORCE_CAP}")
    n = config.n
    npat = 1 << N
    ids = np.arange(npat, dtype=np.int64)
    erased = ((ids[:, None] >> np.arange(N)) & 1).astype(bool)
    k = erased.sum(axis=1)
    weights = (p ** k) * ((1.0 - p) ** (N - k))

    blocks = [erased[:, bit_reversal_permutation(n)]]
    while blocks[0].shape[1] > 1:
        nxt = []
        for blk in blocks:
            h = blk.shape[1] // 2
            nxt.append(blk[:, :h] | blk[:, h:])
            nxt.append(blk[:, :h] & blk[:, h:])
        blocks = nxt
    leaf = np.concatenate(blocks, axis=1)

    zvec = weights @ leaf
    covariance = (leaf * weights[:, None]).T @ leaf.astype(np.float64) - np.outer(zvec, zvec)

    K = config.num_info_bits
    m = leaf[:, config.info_zero_based].sum(axis=1)
    p_m = np.bincount(m, weights=weights, minlength=K + 1)
    sizes = np.arange(K + 1)
    binom = comb(sizes[:, None], sizes[None, :]) * 0.5 ** sizes[:, None]  # row m, col t
    pmf = p_m @ binom
    mean = float(sizes @ pmf)
    variance = float((sizes - mean) ** 2 @ pmf)
    stats = ErrorCountStats(mean, variance, "brute-force", pmf=pmf)
    return BruteForceResult(stats, pmf, covariance, zvec)


def mc_error_count_stats(channel: Channel, config: CodeConfig, trials: int,
                         seed: int = 0, jobs: int = 1,
                         exact_f: bool = False) -> ErrorCountStats:
    """Sample mean/variance and empirical pmf of the error-set size."""
    census = ga_error_census(channel, config, trials, seed, jobs=jobs, exact_f=exact_f)
    hist = census.size_histogram
    sizes = np.arange(hist.size, dtype=np.float64)
    mean = float(sizes @ hist) / trials
    if trials > 1:
        variance = float(((sizes - mean) ** 2) @ hist) / (trials - 1)
    else:
        variance = 0.0
    return ErrorCountStats(mean, variance, "monte-carlo", pmf=hist / trials)
