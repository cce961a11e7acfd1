"""LLR-based successive cancellation decoding.

Three entry points share one sweep kernel:

* ``sc_decode``            -- plain SC; decisions fed forward as made.
* ``ga_sc_decode``         -- genie-aided SC; raw decisions are recorded but
  the true bits are fed forward, so there is no error propagation.  Returns
  the one-based information positions whose first decision was wrong.
* ``sc_decode_with_corrections`` -- SC with the given positions' raw
  decisions flipped before feeding.  With the tie coins replayed and the
  corrections taken from ``ga_sc_decode`` on the same inputs, the output is
  exactly the true input vector.

LLRs are accepted in transmit order; the bit-reversal to tree order happens
here.  A decision value of exactly 0 (BEC erasure included) is resolved by a
fair coin from the caller's replayable stream.
"""

import numpy as np

from . import _kernels
from .errors import InvalidArgumentError
from .transform import CodeConfig, bit_reversal_permutation, _require_power_of_two


class DecoderWorkspace:
    """Reusable per-worker scratch arrays; a workspace is single-threaded."""

    def __init__(self, block_length: int):
        _require_power_of_two(block_length)
        n = int(np.log2(block_length))
        self.block_length = block_length
        self.llr_stages = np.zeros((n + 1, block_length), dtype=np.float64)
        self.bit_stages = np.zeros((n + 1, block_length), dtype=np.uint8)
        self.decisions = np.zeros(block_length, dtype=np.uint8)
        self.updates = 0  # cumulative f/g evaluations


def _coerce_coins(tie, N):
    if isinstance(tie, np.random.Generator):
        return tie.integers(0, 2, size=N, dtype=np.uint8)
    coins = np.ascontiguousarray(tie, dtype=np.uint8)
    if coins.size != N or np.any(coins > 1):
        raise InvalidArgumentError("tie coins must be N bits")
    return coins


def _run(config, llrs, tie, feed, flip, erasure_mode, exact_f, workspace):
    N = config.block_length
    llrs = np.ascontiguousarray(llrs, dtype=np.float64)
    if llrs.size != N:
        raise InvalidArgumentError(f"LLR length {llrs.size} != block length {N}")
    if workspace is None:
        workspace = DecoderWorkspace(N)
    elif workspace.block_length != N:
        raise InvalidArgumentError("workspace size mismatch")
    coins = _coerce_coins(tie, N)
    tree = np.ascontiguousarray(llrs[bit_reversal_permutation(config.n)])
    workspace.updates += _kernels.impl.sc_run(
        tree, config.frozen_mask, coins, feed, flip,
        bool(erasure_mode), bool(exact_f),
        workspace.llr_stages, workspace.bit_stages, workspace.decisions,
    )
    return workspace.decisions


def sc_decode(config: CodeConfig, llrs, tie, *, erasure_mode=False, exact_f=False,
              workspace=None) -> np.ndarray:
    """Plain SC decode; returns the length-N hard-decision vector (U domain)."""
    out = _run(config, llrs, tie, None, None, erasure_mode, exact_f, workspace)
    return out.copy()


def ga_sc_decode(config: CodeConfig, llrs, true_u, tie, *, erasure_mode=False,
                 exact_f=False, workspace=None, validate=True) -> np.ndarray:
    """Genie-aided SC; returns sorted one-based error positions (subset of info set)."""
    true_u = np.ascontiguousarray(true_u, dtype=np.uint8)
    if validate:
        if true_u.size != config.block_length:
            raise InvalidArgumentError("true_u length mismatch")
        if np.any(true_u[config.frozen - 1]):
            raise InvalidArgumentError("frozen positions of true_u must be zero")
    out = _run(config, llrs, tie, true_u, None, erasure_mode, exact_f, workspace)
    return np.flatnonzero(out != true_u).astype(np.int64) + 1


def sc_decode_with_corrections(config: CodeConfig, llrs, corrections, tie, *,
                               erasure_mode=False, exact_f=False,
                               workspace=None) -> np.ndarray:
    """SC decode flipping the raw decision at each correction position.

    Tie coins must replay the original attempt for the correction set to
    reproduce the genie trajectory.
    """
    corrections = np.asarray(corrections, dtype=np.int64)
    flip = np.zeros(config.block_length, dtype=np.uint8)
    if corrections.size:
        if corrections.min() < 1 or corrections.max() > config.block_length:
            raise InvalidArgumentError("correction index out of range")
        if np.any(config.frozen_mask[corrections - 1]):
            raise InvalidArgumentError("corrections must lie in the information set")
        flip[corrections - 1] = 1
    out = _run(config, llrs, tie, None, flip, erasure_mode, exact_f, workspace)
    return out.copy()
