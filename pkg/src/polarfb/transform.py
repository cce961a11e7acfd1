"""Bit-level polar transform, bit-reversal permutation, and U-vector assembly.

Indices in code configurations are one-based (1..N); serialized formats and
numpy index arrays used internally are zero-based.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError
from . import _kernels


def _require_power_of_two(N):
    if N < 1 or (N & (N - 1)) != 0:
        raise InvalidArgumentError(f"length {N} is not a power of two")


@lru_cache(maxsize=None)
def bit_reversal_permutation(n: int) -> np.ndarray:
    """Zero-based bit-reversal permutation of [0..2^n-1]; an involution.

    Entry j is the index whose n-bit binary representation reverses j's;
    the one-based form is perm + 1 (n=2: [0, 2, 1, 3], i.e. (1, 3, 2, 4)).
    """
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    idx = np.arange(1 << n)
    rev = np.zeros(1 << n, dtype=np.int64)
    for _ in range(n):
        rev = (rev << 1) | (idx & 1)
        idx = idx >> 1
    rev.flags.writeable = False
    return rev


def polar_transform(u) -> np.ndarray:
    """Encode x = u G_N over GF(2), bit-reversal included; an involution."""
    u = np.ascontiguousarray(u, dtype=np.uint8)
    N = u.size
    _require_power_of_two(N)
    if u.max(initial=0) > 1:
        raise InvalidArgumentError("input bits must be 0/1")
    x = u.copy()
    _kernels.impl.butterfly_inplace(x)
    if N > 1:
        x = np.ascontiguousarray(x[bit_reversal_permutation(int(np.log2(N)))])
    return x


@dataclass(eq=False)
class CodeConfig:
    """Block length, frozen/information sets (one-based), and the threshold
    used to pick them."""

    block_length: int
    frozen: np.ndarray
    info: np.ndarray
    threshold: float
    frozen_mask: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        _require_power_of_two(self.block_length)
        if self.block_length < 2:
            raise InvalidArgumentError("block length must be >= 2")
        self.frozen = np.asarray(self.frozen, dtype=np.int64)
        self.info = np.asarray(self.info, dtype=np.int64)
        for name, s in (("frozen", self.frozen), ("info", self.info)):
            if s.size and (np.any(np.diff(s) <= 0) or s[0] < 1 or s[-1] > self.block_length):
                raise InvalidArgumentError(f"{name} set must be sorted, unique, within 1..N")
        if self.frozen.size + self.info.size != self.block_length or (
            np.intersect1d(self.frozen, self.info).size > 0
        ):
            raise InvalidArgumentError("frozen and info sets must partition 1..N")
        mask = np.zeros(self.block_length, dtype=np.uint8)
        mask[self.frozen - 1] = 1
        mask.flags.writeable = False
        self.frozen_mask = mask

    @property
    def n(self) -> int:
        return int(np.log2(self.block_length))

    @property
    def num_info_bits(self) -> int:
        return int(self.info.size)

    @property
    def info_zero_based(self) -> np.ndarray:
        return self.info - 1

    def to_dict(self):
        """JSON-friendly form; index sets serialized zero-based."""
        return {
            "block_length": self.block_length,
            "threshold": self.threshold,
            "frozen_zero_based": (self.frozen - 1).tolist(),
            "info_zero_based": (self.info - 1).tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            block_length=int(d["block_length"]),
            frozen=np.asarray(d["frozen_zero_based"], dtype=np.int64) + 1,
            info=np.asarray(d["info_zero_based"], dtype=np.int64) + 1,
            threshold=float(d["threshold"]),
        )


def assemble_u(config: CodeConfig, payload) -> np.ndarray:
    """Place payload bits at the information positions; frozen bits are zero."""
    payload = np.ascontiguousarray(payload, dtype=np.uint8)
    if payload.size != config.num_info_bits:
        raise InvalidArgumentError(
            f"payload length {payload.size} != |info set| {config.num_info_bits}"
        )
    u = np.zeros(config.block_length, dtype=np.uint8)
    u[config.info_zero_based] = payload
    return u
