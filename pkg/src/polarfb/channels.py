"""Binary-input symmetric channels: BEC(p), BSC(p), BIAWGN(sigma) with BPSK.

Observations are float64 arrays; NaN marks a BEC erasure.  LLRs use natural
log and the convention positive <=> bit 0 (BPSK maps 0 -> +1, 1 -> -1).  For
the BEC, an erasure has LLR exactly 0.0 and unerased symbols saturate at
+/-SATURATION_LLR so mixed code paths never see infinities.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import InvalidArgumentError

SATURATION_LLR = 300.0

BEC = "bec"
BSC = "bsc"
BIAWGN = "biawgn"


@dataclass(frozen=True)
class Channel:
    kind: str
    param: float  # erasure prob / crossover prob / noise std

    def __post_init__(self):
        if self.kind == BEC:
            if not 0.0 <= self.param <= 1.0:
                raise InvalidArgumentError("BEC erasure probability must be in [0, 1]")
        elif self.kind == BSC:
            if not 0.0 < self.param < 0.5:
                raise InvalidArgumentError("BSC crossover probability must be in (0, 0.5)")
        elif self.kind == BIAWGN:
            if not self.param > 0.0:
                raise InvalidArgumentError("BIAWGN noise std must be > 0")
        else:
            raise InvalidArgumentError(f"unknown channel kind {self.kind!r}")

    @property
    def spec_string(self) -> str:
        return f"{self.kind}:{self.param:g}"

    def __str__(self):
        return self.spec_string


def bec(p: float) -> Channel:
    return Channel(BEC, float(p))


def bsc(p: float) -> Channel:
    return Channel(BSC, float(p))


def biawgn(sigma: float) -> Channel:
    return Channel(BIAWGN, float(sigma))


def parse_channel(spec: str) -> Channel:
    """Parse 'bec:<p>' / 'bsc:<p>' / 'biawgn:<sigma>'."""
    try:
        kind, _, value = spec.partition(":")
        return Channel(kind.strip().lower(), float(value))
    except (ValueError, TypeError) as exc:
        if isinstance(exc, InvalidArgumentError):
            raise
        raise InvalidArgumentError(f"bad channel spec {spec!r}") from exc


def transmit(channel: Channel, x, rng: np.random.Generator) -> np.ndarray:
    """Element-wise independent channel action on a bit vector.

    Deterministic given the generator state; callers derive one stream per
    trial so results do not depend on worker scheduling.
    """
    x = np.asarray(x, dtype=np.uint8)
    if x.size == 0:
        raise InvalidArgumentError("cannot transmit an empty vector")
    if channel.kind == BEC:
        out = x.astype(np.float64)
        out[rng.random(x.size) < channel.param] = np.nan
        return out
    if channel.kind == BSC:
        flips = rng.random(x.size) < channel.param
        return (x ^ flips).astype(np.float64)
    # BIAWGN with unit-amplitude BPSK
    return (1.0 - 2.0 * x) + channel.param * rng.standard_normal(x.size)


def is_erased(obs) -> np.ndarray:
    return np.isnan(obs)


def channel_llr(channel: Channel, obs, validate: bool = True) -> np.ndarray:
    """Per-symbol LLR of the observation(s); vectorized, scalar in scalar out.

    ``validate=False`` skips the observation/channel type check (internal
    hot paths that just produced the observations themselves).
    """
    obs = np.asarray(obs, dtype=np.float64)
    if channel.kind == BEC:
        if validate and np.any((~np.isnan(obs)) & (obs != 0.0) & (obs != 1.0)):
            raise InvalidArgumentError("BEC observations must be bits or erasures")
        llr = SATURATION_LLR - (2.0 * SATURATION_LLR) * obs
        if llr.ndim:
            llr[np.isnan(llr)] = 0.0  # erasures carry exactly zero information
        elif np.isnan(llr):
            llr = np.float64(0.0)
    elif channel.kind == BSC:
        if validate and (np.any(np.isnan(obs)) or np.any((obs != 0.0) & (obs != 1.0))):
            raise InvalidArgumentError("BSC observations must be bits")
        llr = (1.0 - 2.0 * obs) * math.log((1.0 - channel.param) / channel.param)
    else:
        if validate and np.any(np.isnan(obs)):
            raise InvalidArgumentError("BIAWGN observations must be real numbers")
        llr = 2.0 * obs / (channel.param ** 2)
    return llr if llr.ndim else float(llr)


def _binary_entropy(q: float) -> float:
    if q in (0.0, 1.0):
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def capacity(channel: Channel) -> float:
    """Shannon capacity in bits per channel use."""
    if channel.kind == BEC:
        return 1.0 - channel.param
    if channel.kind == BSC:
        return 1.0 - _binary_entropy(channel.param)
    sigma = channel.param

    def integrand(z):
        # E over noise of log2(1 + exp(-LLR)) given x = 0; softplus keeps it stable
        llr = 2.0 * (1.0 + sigma * z) / (sigma * sigma)
        t = -llr
        softplus = t + math.log1p(math.exp(-t)) if t > 0 else math.log1p(math.exp(t))
        return math.exp(-z * z / 2.0) / math.sqrt(2.0 * math.pi) * softplus / math.log(2.0)

    loss, _ = quad(integrand, -40.0, 40.0, epsabs=1e-9, limit=200)
    return 1.0 - loss
