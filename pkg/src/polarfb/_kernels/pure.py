"""Pure-numpy kernels; the reference semantics the compiled core must match.

The SC sweep works on tree-ordered LLR symbols (the caller applies the
bit-reversal permutation), descending with f = sign-min combining on the
left branch and g(a, b, u) = b + (-1)^u a on the right.  In erasure mode the
symbols live in {-1, 0, +1} and g-outputs are clamped to their sign, which
realizes exact BEC behavior: an f-output is erased iff either input is, a
g-output iff both are (conflicting known inputs cancel to an erasure).
A decision value of exactly 0 is resolved by the positional tie coin.
"""

import numpy as np

IS_COMPILED = False


def butterfly_inplace(bits):
    """In-place GF(2) butterfly (the bit-reversal-free Kronecker power)."""
    N = bits.shape[0]
    step = 1
    while step < N:
        view = bits.reshape(-1, 2 * step)
        view[:, :step] ^= view[:, step:]
        step *= 2


def _combine_f(a, b, exact_f):
    out = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    if exact_f:
        out = out + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))
    return out


def sc_run(llr_tree, frozen, coins, feed, flip, erasure_mode, exact_f, L, B, out):
    """One SC sweep; returns the number of f/g node updates (= N log2 N).

    feed: when given, the true bits are fed forward after each raw decision
    is recorded in `out` (genie-aided mode).  flip: when given, raw decisions
    are XORed with it before being fed and recorded (correction replay).
    """
    N = llr_tree.shape[0]
    L[0, :] = llr_tree
    updates = 0

    def descend(depth, base, size):
        nonlocal updates
        if size == 1:
            i = base
            if frozen[i]:
                raw = 0
            else:
                v = L[depth, i]
                raw = 0 if v > 0 else (1 if v < 0 else int(coins[i]))
            if feed is not None:
                out[i] = raw
                fed = feed[i]
            else:
                if flip is not None:
                    raw ^= int(flip[i])
                out[i] = raw
                fed = raw
            B[depth, i] = fed
            return
        half = size // 2
        a = L[depth, base:base + half]
        b = L[depth, base + half:base + size]
        L[depth + 1, base:base + half] = _combine_f(a, b, exact_f)
        updates += half
        descend(depth + 1, base, half)
        left = B[depth + 1, base:base + half]
        g = b + (1.0 - 2.0 * left) * a
        if erasure_mode:
            g = np.sign(g)
        L[depth + 1, base + half:base + size] = g
        updates += half
        descend(depth + 1, base + half, half)
        right = B[depth + 1, base + half:base + size]
        B[depth, base:base + half] = left ^ right
        B[depth, base + half:base + size] = right

    descend(0, 0, N)
    return updates
