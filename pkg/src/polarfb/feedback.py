"""Chained feedback-protocol simulator.

Each round carries the previous round's genie-aided error positions (fixed
n-bit, zero-based serialization) followed by fresh information bits filling
the code dimension.  The receiver runs plain SC per round; success detection
is an idealized genie comparison.  On a success, earlier pending blocks are
recovered in reverse order by replaying SC with the corrections parsed from
the already-decoded payload chain, which reproduces the genie trajectory
bit-exactly.  A block's delay is the number of rounds from its transmission
to its resolution (>= 1); blocks not resolved within d_max count as errors.

Framing of the index count is ideal (side information) by default, so the
rate accounting is exactly K - |T| n new bits per round; ``count_header``
instead spends an explicit fixed-width count field.  When an error set does
not fit the current block, the excess indices are deferred FIFO to later
rounds and the fresh-bit count clamps at zero.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from . import rng
from .channels import BEC, channel_llr, transmit
from .decoding import (DecoderWorkspace, ga_sc_decode, sc_decode,
                       sc_decode_with_corrections)
from .errors import InsufficientDataError, InvalidArgumentError
from .transform import CodeConfig, assemble_u, polar_transform


def _serialize_values(values, n_bits: int) -> np.ndarray:
    """Fixed-width MSB-first bits of zero-based values, in the given order."""
    values = np.asarray(values, dtype=np.int64)
    out = np.zeros(values.size * n_bits, dtype=np.uint8)
    for k, value in enumerate(values):
        for b in range(n_bits):
            out[k * n_bits + b] = (value >> (n_bits - 1 - b)) & 1
    return out


def encode_error_set(indices_one_based, n_bits: int) -> np.ndarray:
    """Serialize one-based indices ascending as fixed-width zero-based bits."""
    idx = np.asarray(indices_one_based, dtype=np.int64)
    if idx.size and (idx.min() < 1 or idx.max() > (1 << n_bits)):
        raise InvalidArgumentError(f"index out of range for {n_bits}-bit encoding")
    return _serialize_values(np.sort(idx) - 1, n_bits)


def decode_error_set(bits, count: int, n_bits: int | None = None) -> np.ndarray:
    """Inverse of encode_error_set; returns sorted one-based indices."""
    bits = np.asarray(bits, dtype=np.uint8)
    if count == 0:
        return np.empty(0, dtype=np.int64)
    if n_bits is None:
        if bits.size % count:
            raise InvalidArgumentError("bit length must be a multiple of the count")
        n_bits = bits.size // count
    if bits.size != count * n_bits:
        raise InvalidArgumentError("bit length does not match count * width")
    weights = 1 << np.arange(n_bits - 1, -1, -1, dtype=np.int64)
    values = bits.reshape(count, n_bits).astype(np.int64) @ weights
    return np.sort(values) + 1


@dataclass
class RoundRecord:
    round_index: int
    t_prev_size: int
    new_info_bits: int
    decode_success: bool
    resolved_at_round: int | None = None
    failed: bool = False

    @property
    def delay(self) -> int | None:
        if self.resolved_at_round is None:
            return None
        return self.resolved_at_round - self.round_index + 1


@dataclass
class SessionStats:
    rounds: int
    avg_rate: float
    avg_delay: float
    delay_histogram: dict
    bler_at_dmax: float
    pending_blocks: int
    resolved_blocks: int
    failed_blocks: int
    success_rate: float
    verified_exact: int  # resolved blocks whose recovered bits matched the truth


@dataclass
class _Block:
    llrs: np.ndarray
    u_true: np.ndarray
    slot_sources: list  # source round of each transmitted index slot
    new_info_bits: int


class _Session:
    def __init__(self, config, channel, seed, count_header, exact_f):
        self.config = config
        self.channel = channel
        self.seed = seed
        self.exact_f = exact_f
        self.erasure = channel.kind == BEC
        self.workspace = DecoderWorkspace(config.block_length)
        K, n = config.num_info_bits, config.n
        self.max_slots = K // n if n else 0
        self.header_bits = 0
        if count_header:
            self.header_bits = max(1, int(np.ceil(np.log2(self.max_slots + 1))))
        self.queue = deque()   # (source_round, one_based_index) awaiting transmission
        self.pending = {}      # round -> _Block
        self.parsed = {}       # source round -> one-based indices recovered so far
        self.records = []
        self.delay_hist = {}
        self.resolved = self.failed = self.verified = self.successes = 0
        self.delivered_bits = 0
        self.delay_sum = 0

    def parse_payload(self, u_hat, block):
        n = self.config.n
        payload = u_hat[self.config.info_zero_based]
        pos = self.header_bits
        for src in block.slot_sources:
            bits = payload[pos:pos + n].astype(np.int64)
            value = int(bits @ (1 << np.arange(n - 1, -1, -1, dtype=np.int64)))
            self.parsed.setdefault(src, []).append(value + 1)
            pos += n

    def resolve(self, i, at_round, u_hat):
        block = self.pending.pop(i)
        rec = self.records[i - 1]
        rec.resolved_at_round = at_round
        self.delay_hist[rec.delay] = self.delay_hist.get(rec.delay, 0) + 1
        self.delay_sum += rec.delay
        self.resolved += 1
        self.delivered_bits += rec.new_info_bits
        if np.array_equal(u_hat, block.u_true):
            self.verified += 1
        self.parse_payload(u_hat, block)

    def corrections_complete(self, i):
        # |T_i| is side information: it is the slot budget round i+1 declared
        return len(self.parsed.get(i, [])) >= self.records[i].t_prev_size

    def run_round(self, j, prev_error_set):
        cfg, n, K = self.config, self.config.n, self.config.num_info_bits
        for idx in prev_error_set:
            self.queue.append((j - 1, int(idx)))

        budget = K - self.header_bits
        take = min(len(self.queue), budget // n) if n else 0
        slots = [self.queue.popleft() for _ in range(take)]
        new_info = budget - take * n
        fresh = rng.substream(self.seed, rng.ROUND_PAYLOAD, j).integers(
            0, 2, size=new_info, dtype=np.uint8)
        parts = []
        if self.header_bits:
            parts.append(_serialize_values([take], self.header_bits))
        if take:
            parts.append(_serialize_values([v - 1 for _, v in slots], n))
        parts.append(fresh)
        payload = np.concatenate(parts)

        u = assemble_u(cfg, payload)
        obs = transmit(self.channel, polar_transform(u),
                       rng.substream(self.seed, rng.ROUND_CHANNEL, j))
        llrs = channel_llr(self.channel, obs)
        coins = rng.tie_stream(self.seed, j).integers(0, 2, size=cfg.block_length,
                                                      dtype=np.uint8)

        u_hat = sc_decode(cfg, llrs, coins, erasure_mode=self.erasure,
                          exact_f=self.exact_f, workspace=self.workspace)
        success = bool(np.array_equal(u_hat, u))  # idealized CRC
        error_set = ga_sc_decode(cfg, llrs, u, coins, erasure_mode=self.erasure,
                                 exact_f=self.exact_f, workspace=self.workspace)

        self.records.append(
            RoundRecord(j, int(prev_error_set.size), int(new_info), success))
        self.pending[j] = _Block(llrs, u, [src for src, _ in slots], int(new_info))

        if success:
            self.successes += 1
            self.resolve(j, j, u_hat)
            # newest-first: resolving a block may complete older blocks' sets
            for i in sorted((k for k in self.pending if k < j), reverse=True):
                if not self.corrections_complete(i):
                    continue
                block = self.pending[i]
                corrections = np.sort(np.asarray(self.parsed[i], dtype=np.int64))
                replay_coins = rng.tie_stream(self.seed, i).integers(
                    0, 2, size=cfg.block_length, dtype=np.uint8)
                u_fixed = sc_decode_with_corrections(
                    cfg, block.llrs, corrections, replay_coins,
                    erasure_mode=self.erasure, exact_f=self.exact_f,
                    workspace=self.workspace)
                self.resolve(i, j, u_fixed)
        return error_set

    def age_out(self, j, d_max):
        cutoff = j - d_max + 1
        for i in sorted(self.pending):
            if i > cutoff:
                break
            self.records[i - 1].failed = True
            self.failed += 1
            del self.pending[i]


def run_feedback_session(config: CodeConfig, channel, rounds: int,
                         d_max: int | None = None, seed: int = 0,
                         count_header: bool = False, exact_f: bool = False):
    """Simulate ``rounds`` chained blocks; returns (SessionStats, [RoundRecord])."""
    if rounds < 1:
        raise InvalidArgumentError("rounds must be >= 1")
    if d_max is not None and d_max < 1:
        raise InvalidArgumentError("d_max must be >= 1 (or None for unbounded)")
    session = _Session(config, channel, seed, count_header, exact_f)
    prev_error_set = np.empty(0, dtype=np.int64)
    for j in range(1, rounds + 1):
        prev_error_set = session.run_round(j, prev_error_set)
        if d_max is not None:
            session.age_out(j, d_max)

    outcomes = session.resolved + session.failed
    N = config.block_length
    stats = SessionStats(
        rounds=rounds,
        avg_rate=session.delivered_bits / (N * rounds),
        avg_delay=(session.delay_sum / session.resolved) if session.resolved else 0.0,
        delay_histogram=session.delay_hist,
        bler_at_dmax=(session.failed / outcomes) if outcomes else 0.0,
        pending_blocks=len(session.pending),
        resolved_blocks=session.resolved,
        failed_blocks=session.failed,
        success_rate=session.successes / rounds,
        verified_exact=session.verified,
    )
    return stats, session.records


def delay_distribution_check(records, min_resolved: int = 1000) -> dict:
    """Chi-square goodness of fit of resolved delays against geometric(p_hat)."""
    delays = [r.delay for r in records if r.resolved_at_round is not None]
    if len(delays) < min_resolved:
        raise InsufficientDataError(
            f"need >= {min_resolved} resolved blocks, have {len(delays)}")
    p_hat = sum(r.decode_success for r in records) / len(records)
    delays = np.asarray(delays)
    n_obs = delays.size

    # pool the geometric tail so every bin expects >= 5 counts
    cut = 1
    while (n_obs * (1.0 - p_hat) ** cut >= 5.0
           and n_obs * p_hat * (1.0 - p_hat) ** (cut - 1) >= 5.0):
        cut += 1
    observed = np.array([(delays == d).sum() for d in range(1, cut)]
                        + [(delays >= cut).sum()], dtype=np.float64)
    expected = np.array([n_obs * p_hat * (1.0 - p_hat) ** (d - 1)
                         for d in range(1, cut)]
                        + [n_obs * (1.0 - p_hat) ** (cut - 1)], dtype=np.float64)
    stat = float(((observed - expected) ** 2 / expected).sum())
    dof = max(1, cut - 2)  # one parameter estimated from the data
    return {
        "chi2": stat,
        "dof": dof,
        "p_value": float(chi2.sf(stat, dof)),
        "p_hat": p_hat,
        "mean_delay": float(delays.mean()),
        "geometric_mean_delay": 1.0 / p_hat if p_hat > 0 else float("inf"),
        "n_resolved": int(n_obs),
    }
