"""Negative-binomial model of the genie-aided error count and its predictions.

Moment matching: given mean E and variance V of the error count with V > E,
the fitted parameters are r = E^2/(V - E) and p = E/V; the model then drives
every downstream prediction -- per-round success probability p^r, geometric
delay with mean p^-r, block error rate (1 - p^r)^D_max under a delay cap,
model entropy, and a Huffman dictionary for compressing the count.

Underdispersed inputs (V <= E) fall back to Poisson(E), the r -> infinity
limit; a zero mean degenerates to a point mass at 0.
"""

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import InvalidArgumentError

DEFAULT_TAIL_MASS = 1e-9


@dataclass(frozen=True)
class NBModel:
    r: float | None
    p: float | None
    fallback: str = "none"  # 'none' | 'poisson' | 'zero'
    lam: float = 0.0        # Poisson rate when fallback == 'poisson'

    @property
    def mean(self) -> float:
        if self.fallback == "none":
            return self.r * (1.0 - self.p) / self.p
        return self.lam if self.fallback == "poisson" else 0.0

    @property
    def variance(self) -> float:
        if self.fallback == "none":
            return self.r * (1.0 - self.p) / self.p ** 2
        return self.lam if self.fallback == "poisson" else 0.0


def fit_nb(mean: float, variance: float) -> NBModel:
    """Moment-match a negative binomial; Poisson/degenerate fallbacks as needed."""
    if mean < 0 or variance < 0:
        raise InvalidArgumentError("moments must be nonnegative")
    if mean == 0:
        return NBModel(None, None, fallback="zero")
    if variance <= mean:
        return NBModel(None, None, fallback="poisson", lam=mean)
    return NBModel(r=mean * mean / (variance - mean), p=mean / variance)


def nb_pmf(model: NBModel, x) -> np.ndarray:
    """P(X = x) for scalar or array x (log-Gamma form, stable for real r)."""
    x = np.asarray(x)
    xf = x.astype(np.float64)
    if np.any(xf < 0) or np.any(xf != np.floor(xf)):
        raise InvalidArgumentError("support is the nonnegative integers")
    if model.fallback == "zero":
        out = np.where(xf == 0, 1.0, 0.0)
    elif model.fallback == "poisson":
        out = np.exp(xf * math.log(model.lam) - model.lam - gammaln(xf + 1.0))
    else:
        r, p = model.r, model.p
        out = np.exp(gammaln(r + xf) - gammaln(r) - gammaln(xf + 1.0)
                     + r * math.log(p) + xf * math.log1p(-p))
    return out if out.ndim else float(out)


@dataclass
class DiscretePmf:
    """Probabilities over the support 0..len-1, normalized after truncation.

    ``tail_mass`` records the probability cut off by the truncation (before
    renormalization); the Huffman builder routes it to an escape symbol.
    """

    probs: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.size == 0 or np.any(self.probs < 0):
            raise InvalidArgumentError("pmf must be nonempty and nonnegative")
        if abs(self.probs.sum() - 1.0) > 1e-9:
            raise InvalidArgumentError("pmf must sum to 1 within 1e-9")


def truncated_pmf(model: NBModel, tail_mass: float = DEFAULT_TAIL_MASS) -> DiscretePmf:
    """Truncate the model where the cumulative mass reaches 1 - tail_mass."""
    if model.fallback == "zero":
        return DiscretePmf(np.array([1.0]), 0.0)
    hi = 64
    while True:
        probs = nb_pmf(model, np.arange(hi + 1))
        cum = np.cumsum(probs)
        idx = np.searchsorted(cum, 1.0 - tail_mass)
        if idx < hi:
            probs = probs[: idx + 1]
            residual = max(0.0, 1.0 - float(cum[idx]))
            return DiscretePmf(probs / probs.sum(), residual)
        hi *= 2


def predict_success_and_delay(model: NBModel) -> dict:
    """Per-round success probability P(X = 0) and mean geometric delay."""
    success = float(nb_pmf(model, 0))
    if success == 0.0:
        return {"success_prob": 0.0, "avg_delay": math.inf, "infinite_delay": True}
    return {"success_prob": success, "avg_delay": 1.0 / success, "infinite_delay": False}


def predict_bler(model: NBModel, d_max: int) -> float:
    """Probability that no success occurs within d_max rounds."""
    if d_max < 1:
        raise InvalidArgumentError("d_max must be >= 1")
    return (1.0 - float(nb_pmf(model, 0))) ** d_max


def pmf_entropy(probs) -> float:
    """Shannon entropy in bits; zero entries contribute nothing."""
    probs = np.asarray(probs, dtype=np.float64)
    nz = probs[probs > 0]
    return float(-(nz * np.log2(nz)).sum())


def nb_entropy(model: NBModel, tail_mass: float = DEFAULT_TAIL_MASS) -> float:
    """Entropy of the truncated-and-renormalized model distribution, in bits."""
    return pmf_entropy(truncated_pmf(model, tail_mass).probs)


ESCAPE = "escape"


@dataclass
class HuffmanCode:
    """Prefix-free code over 0..x_max plus an optional escape symbol.

    Symbols beyond the table cost the escape codeword plus a fixed-width
    payload carrying the raw count.
    """

    codewords: dict = field(default_factory=dict)  # symbol -> bit string
    escape_payload_bits: int = 0

    def length(self, symbol: int) -> int:
        if symbol in self.codewords:
            return len(self.codewords[symbol])
        if ESCAPE not in self.codewords:
            raise InvalidArgumentError(
                f"symbol {symbol} outside the table and the code has no escape"
            )
        return len(self.codewords[ESCAPE]) + self.escape_payload_bits


def build_huffman(pmf: DiscretePmf, max_symbol: int | None = None) -> HuffmanCode:
    """Binary Huffman code for the pmf; the truncated tail gets an escape symbol.

    ``max_symbol`` bounds the values the escape payload must express
    (defaults to the table's own maximum).
    """
    symbols = list(range(pmf.probs.size))
    weights = list(pmf.probs)
    has_escape = pmf.tail_mass > 0.0
    if has_escape:
        symbols.append(ESCAPE)
        weights.append(pmf.tail_mass)
    if max_symbol is None:
        max_symbol = pmf.probs.size - 1
    payload = math.ceil(math.log2(max_symbol + 1)) if max_symbol > 0 else 1

    if len(symbols) == 1:
        return HuffmanCode({symbols[0]: "0"}, payload)

    heap = [(w, i, sym) for i, (w, sym) in enumerate(zip(weights, symbols))]
    heapq.heapify(heap)
    uid = len(heap)
    merges = {}
    while len(heap) > 1:
        w1, _, a = heapq.heappop(heap)
        w2, _, b = heapq.heappop(heap)
        merges[uid] = (a, b)
        heapq.heappush(heap, (w1 + w2, uid, uid))
        uid += 1

    codewords = {}

    def assign(node, prefix):
        if node in merges:
            a, b = merges[node]
            assign(a, prefix + "0")
            assign(b, prefix + "1")
        else:
            codewords[node] = prefix

    assign(heap[0][2], "")
    return HuffmanCode(codewords, payload)


def avg_code_length(code: HuffmanCode, reference_pmf: DiscretePmf) -> float:
    """Expected codeword length of ``code`` under the reference distribution."""
    return float(sum(p * code.length(x)
                     for x, p in enumerate(reference_pmf.probs) if p > 0))
