"""Deterministic random-stream derivation.

Every stochastic component draws from a Philox generator keyed by
(master seed, purpose tag, index...), so results are reproducible and
independent of how trials are scheduled across workers.
"""

import numpy as np

# purpose tags; values are part of the reproducibility contract
MC_TRIAL = 1        # one stream per Monte Carlo trial
ROUND_CHANNEL = 2   # feedback session: channel noise per round
ROUND_TIES = 3      # feedback session: tie coins per (round, attempt)
ROUND_PAYLOAD = 4   # feedback session: fresh information bits per round
SK_TRIALS = 5       # iterative Gaussian feedback simulator


def substream(master_seed, *path):
    """Return a Generator derived from the master seed and an integer path."""
    seq = np.random.SeedSequence((int(master_seed),) + tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(seq))


def tie_stream(master_seed, block, attempt=0):
    """Tie-coin stream for one decode attempt; replays regenerate it exactly."""
    return substream(master_seed, ROUND_TIES, block, attempt)
