"""End-to-end experiment recipes with checked-in tolerance bands.

Three desk-scale campaigns over BSC(0.11) and friends: the threshold sweep of
the feedback protocol (rate/delay table), the error-count compression table
(entropies and Huffman average length), and the SC BLER prediction sweep.
The `repro` CLI subcommand runs them and diffs results against the bands.
"""

from dataclasses import dataclass

import numpy as np

from .bec_analytics import mc_error_count_stats
from .channels import bsc, parse_channel
from .construction import DEFAULT_MC_TRIALS, build_code, optimal_threshold
from .feedback import run_feedback_session
from .nbmodel import (DiscretePmf, avg_code_length, build_huffman, fit_nb,
                      nb_entropy, nb_pmf, pmf_entropy, truncated_pmf)

THRESHOLD_SCALES = (3.0, 2.0, 1.5, 1.0, 0.8, 0.5)

RATE_DELAY_BANDS = {
    "channel": "bsc:0.11",
    "n": 10,
    "scales": THRESHOLD_SCALES,
    "rates": (0.407, 0.416, 0.422, 0.426, 0.424, 0.407),
    "rate_tol": 0.010,
    "delays": (2.168, 3.102, 4.879, 10.340, 22.847, 131.933),
    "delay_rel_tol": 0.20,
}

COMPRESSION_BANDS = {
    "channel": "bsc:0.11",
    "n": 10,
    "scales": THRESHOLD_SCALES,
    "entropy_empirical": (2.0978, 2.5739, 3.0224, 3.5746, 3.9960, 4.5965),
    "entropy_model": (2.0983, 2.5751, 3.0240, 3.5748, 3.9928, 4.5844),
    "avg_length": (2.1026, 2.6248, 3.0611, 3.6002, 4.0369, 4.6164),
    "tol_bits": 0.08,
}

BLER_SWEEP_BANDS = {
    "channels": ("bec:0.5", "bsc:0.11", "biawgn:0.97865"),
    "n": 11,
    "scales": (0.5, 1.0, 2.0, 4.0, 8.0),
    "abs_tol": 0.05,
    "window": (0.05, 0.95),
}

CONSTRUCTION_SEED = 1


@dataclass
class CheckLine:
    label: str
    ok: bool
    detail: str

    def __str__(self):
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.label}: {self.detail}"


def rate_delay_run(rounds=20_000, seed=0, trials=DEFAULT_MC_TRIALS, jobs=1,
                   cache_dir=None):
    """Feedback sessions over the threshold sweep; one row per scale.

    Runs with the exact tanh-rule combine: min-sum's fair-coin ties on the
    BSC LLR lattice cost about 0.005 in rate, which the published figures do
    not exhibit.
    """
    channel = parse_channel(RATE_DELAY_BANDS["channel"])
    rows = []
    for k, scale in enumerate(RATE_DELAY_BANDS["scales"]):
        config = build_code(channel, RATE_DELAY_BANDS["n"], scale,
                            trials=trials, seed=CONSTRUCTION_SEED,
                            cache_dir=cache_dir, jobs=jobs, exact_f=True)
        stats, _ = run_feedback_session(config, channel, rounds,
                                        d_max=None, seed=seed + 1000 * k,
                                        exact_f=True)
        rows.append({
            "threshold_scale": scale,
            "threshold": config.threshold,
            "num_info_bits": config.num_info_bits,
            "avg_rate": stats.avg_rate,
            "avg_delay": stats.avg_delay,
            "success_rate": stats.success_rate,
            "resolved": stats.resolved_blocks,
        })
    return rows


def check_rate_delay(rows):
    bands = RATE_DELAY_BANDS
    lines = []
    for row, rate, delay in zip(rows, bands["rates"], bands["delays"]):
        ok_rate = abs(row["avg_rate"] - rate) <= bands["rate_tol"]
        ok_delay = abs(row["avg_delay"] - delay) <= bands["delay_rel_tol"] * delay
        lines.append(CheckLine(
            f"rate-delay scale={row['threshold_scale']:g}",
            ok_rate and ok_delay,
            f"rate {row['avg_rate']:.4f} (band {rate}±{bands['rate_tol']}), "
            f"delay {row['avg_delay']:.3f} (band {delay}±20%)",
        ))
    rates = [row["avg_rate"] for row in rows]
    peak = rows[int(np.argmax(rates))]["threshold_scale"]
    lines.append(CheckLine("rate peak at the optimal threshold", peak == 1.0,
                           f"argmax scale = {peak:g}"))
    return lines


def compression_run(trials=DEFAULT_MC_TRIALS, seed=0, jobs=1, cache_dir=None):
    """Error-count entropy/compression table over the threshold sweep.

    The i.i.d. Bernoulli(0.11) source experiment is reproduced through its
    channel-coding dual: genie-aided decoding over BSC(0.11) with the same
    transform has identically distributed error counts.
    """
    channel = bsc(0.11)
    rows = []
    for k, scale in enumerate(COMPRESSION_BANDS["scales"]):
        config = build_code(channel, COMPRESSION_BANDS["n"], scale,
                            trials=trials, seed=CONSTRUCTION_SEED,
                            cache_dir=cache_dir, jobs=jobs, exact_f=True)
        stats = mc_error_count_stats(channel, config, trials,
                                     seed=seed + 1000 * k, jobs=jobs,
                                     exact_f=True)
        empirical = DiscretePmf(stats.pmf)
        model = fit_nb(stats.mean, stats.variance)
        model_pmf = truncated_pmf(model)
        code = build_huffman(model_pmf, max_symbol=config.num_info_bits)
        hi = max(empirical.probs.size, model_pmf.probs.size)
        emp_pad = np.pad(empirical.probs, (0, hi - empirical.probs.size))
        mod_pad = np.pad(model_pmf.probs, (0, hi - model_pmf.probs.size))
        rows.append({
            "threshold_scale": scale,
            "mean": stats.mean,
            "variance": stats.variance,
            "entropy_empirical": pmf_entropy(empirical.probs),
            "entropy_model": nb_entropy(model),
            "avg_length": avg_code_length(code, empirical),
            "tv_distance": 0.5 * float(np.abs(emp_pad - mod_pad).sum()),
        })
    return rows


def check_compression(rows):
    bands = COMPRESSION_BANDS
    lines = []
    for row, h_emp, h_mod, avg_len in zip(rows, bands["entropy_empirical"],
                                          bands["entropy_model"],
                                          bands["avg_length"]):
        ok = (abs(row["entropy_empirical"] - h_emp) <= bands["tol_bits"]
              and abs(row["entropy_model"] - h_mod) <= bands["tol_bits"]
              and abs(row["avg_length"] - avg_len) <= bands["tol_bits"])
        bound = (row["entropy_empirical"] <= row["avg_length"]
                 < row["entropy_empirical"] + 1.0)
        lines.append(CheckLine(
            f"compression scale={row['threshold_scale']:g}", ok and bound,
            f"H {row['entropy_empirical']:.4f}/{h_emp}, "
            f"H_model {row['entropy_model']:.4f}/{h_mod}, "
            f"L {row['avg_length']:.4f}/{avg_len} (±{bands['tol_bits']})",
        ))
    return lines


def bler_sweep_run(channel, n, scales, trials=DEFAULT_MC_TRIALS, seed=0, jobs=1,
                   cache_dir=None, exact_f=False):
    """Empirical SC block error rate vs the model prediction, one row per scale."""
    rows = []
    N = 1 << n
    for k, scale in enumerate(scales):
        config = build_code(channel, n, scale, trials=trials,
                            seed=CONSTRUCTION_SEED, cache_dir=cache_dir,
                            jobs=jobs, exact_f=exact_f)
        stats = mc_error_count_stats(channel, config, trials,
                                     seed=seed + 1000 * k, jobs=jobs,
                                     exact_f=exact_f)
        model = fit_nb(stats.mean, stats.variance)
        rows.append({
            "threshold_scale": scale,
            "threshold": optimal_threshold(N) / scale,
            "empirical_bler": 1.0 - float(stats.pmf[0]),
            "predicted_bler": 1.0 - float(nb_pmf(model, 0)),
            "mean": stats.mean,
            "variance": stats.variance,
            "r": model.r if model.fallback == "none" else float("nan"),
            "p": model.p if model.fallback == "none" else float("nan"),
            "fallback": model.fallback,
        })
    return rows


def check_bler_sweep(rows, channel_spec):
    lo, hi = BLER_SWEEP_BANDS["window"]
    tol = BLER_SWEEP_BANDS["abs_tol"]
    lines = []
    for row in rows:
        gap = abs(row["predicted_bler"] - row["empirical_bler"])
        in_window = lo <= row["empirical_bler"] <= hi
        ok = (gap <= tol) if in_window else True
        note = "outside check window" if not in_window else f"|gap| {gap:.4f} <= {tol}"
        lines.append(CheckLine(
            f"bler {channel_spec} scale={row['threshold_scale']:g}", ok,
            f"empirical {row['empirical_bler']:.4f}, "
            f"predicted {row['predicted_bler']:.4f}, {note}",
        ))
    return lines
