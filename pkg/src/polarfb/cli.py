"""Command-line surface binding the library into reproducible experiments.

Every experiment is fully determined by its flags plus --seed; outputs are
CSV for per-point data and JSON for summaries (JSON goes to stdout unless
--json-out is given).  Serialized indices are zero-based.

Exit codes: 0 success, 2 invalid arguments, 3 resource limits,
4 insufficient data, 1 reproduction-band mismatch.
"""

import argparse
import csv
import json
import sys

import numpy as np

from . import _kernels, repro
from .bec_analytics import (covariance_matrix, exact_error_count_stats,
                            mc_error_count_stats)
from .channels import bec, parse_channel
from .construction import (DEFAULT_MC_TRIALS, build_code, optimal_threshold,
                           reliability_profile, save_profile, select_frozen_set)
from .errors import (InsufficientDataError, InvalidArgumentError,
                     ResourceLimitError)
from .feedback import delay_distribution_check, run_feedback_session
from .nbmodel import (DiscretePmf, NBModel, avg_code_length, build_huffman,
                      fit_nb, nb_entropy, nb_pmf, pmf_entropy,
                      predict_bler, predict_success_and_delay, truncated_pmf)
from .sk import SKParams, sk_error_bound, sk_simulate


def _emit_json(payload, path=None):
    text = json.dumps(payload, indent=2, sort_keys=True, default=float) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _code_flags(sub, default_scale=1.0):
    sub.add_argument("--channel", required=True, help="bec:<p> | bsc:<p> | biawgn:<sigma>")
    sub.add_argument("--n", type=int, required=True, help="log2 of the block length")
    sub.add_argument("--threshold-scale", type=float, default=default_scale,
                     help="freeze at (optimal threshold)/scale")
    sub.add_argument("--construction-trials", type=int, default=DEFAULT_MC_TRIALS)
    sub.add_argument("--construction-seed", type=int, default=repro.CONSTRUCTION_SEED)
    sub.add_argument("--cache-dir", default=None)
    sub.add_argument("--jobs", type=int, default=1)
    sub.add_argument("--exact-f", action="store_true",
                     help="exact tanh-rule combine instead of min-sum")


def _build_code(args):
    return build_code(parse_channel(args.channel), args.n, args.threshold_scale,
                      trials=args.construction_trials, seed=args.construction_seed,
                      cache_dir=args.cache_dir, jobs=args.jobs,
                      exact_f=args.exact_f)


def cmd_construct(args):
    channel = parse_channel(args.channel)
    N = 1 << args.n
    profile = reliability_profile(channel, N, trials=args.construction_trials,
                                  seed=args.construction_seed,
                                  cache_dir=args.cache_dir, jobs=args.jobs,
                                  exact_f=args.exact_f)
    if args.profile_out:
        rows = [(i, repr(float(v))) for i, v in enumerate(profile.pe)]
        _write_csv(args.profile_out, ["index", "pe"], rows)
    threshold = (args.threshold if args.threshold is not None
                 else optimal_threshold(N) / args.threshold_scale)
    config = select_frozen_set(profile, threshold)
    payload = {
        "channel": channel.spec_string,
        "profile_source": profile.source,
        "construction_trials": profile.trials,
        "construction_seed": profile.seed,
        "num_info_bits": config.num_info_bits,
        "rate": config.num_info_bits / N,
        **config.to_dict(),
    }
    _emit_json(payload, args.out)
    return 0


def cmd_mc_estimate(args):
    channel = parse_channel(args.channel)
    config = _build_code(args)
    stats = mc_error_count_stats(channel, config, args.trials, seed=args.seed,
                                 jobs=args.jobs, exact_f=args.exact_f)
    if args.out:
        rows = [(k, int(round(p * args.trials))) for k, p in enumerate(stats.pmf)]
        _write_csv(args.out, ["count", "frequency"], rows)
    _emit_json({
        "channel": channel.spec_string,
        "n": args.n,
        "threshold_scale": args.threshold_scale,
        "trials": args.trials,
        "seed": args.seed,
        "mean": stats.mean,
        "variance": stats.variance,
        "empirical_bler": 1.0 - float(stats.pmf[0]),
    }, args.json_out)
    return 0


def cmd_cov_bec(args):
    if not 0.0 <= args.p <= 1.0:
        raise InvalidArgumentError("--p must be in [0, 1]")
    N = 1 << args.n
    cov = covariance_matrix(args.p, N)
    if args.out:
        rows = [(i, j, repr(float(cov.matrix[i, j])))
                for i in range(N) for j in range(i, N)]
        _write_csv(args.out, ["i", "j", "cov"], rows)
    profile = reliability_profile(bec(args.p), N)
    threshold = optimal_threshold(N) / args.threshold_scale
    config = select_frozen_set(profile, threshold)
    stats = exact_error_count_stats(args.p, config, cov)
    _emit_json({
        "p": args.p,
        "n": args.n,
        "threshold": threshold,
        "num_info_bits": config.num_info_bits,
        "mean": stats.mean,
        "variance": stats.variance,
    }, args.json_out)
    return 0


def _model_from_args(args):
    if args.hist:
        counts, freqs = [], []
        with open(args.hist, newline="") as fh:
            for row in csv.DictReader(fh):
                counts.append(int(row["count"]))
                freqs.append(float(row["frequency"]))
        total = sum(freqs)
        if total <= 0:
            raise InvalidArgumentError("histogram has no mass")
        counts = np.asarray(counts, dtype=np.float64)
        freqs = np.asarray(freqs, dtype=np.float64)
        mean = float((counts * freqs).sum() / total)
        variance = float((freqs * (counts - mean) ** 2).sum() / max(total - 1, 1))
        return fit_nb(mean, variance), mean, variance
    if args.mean is None or args.variance is None:
        raise InvalidArgumentError("provide --hist or both --mean and --variance")
    return fit_nb(args.mean, args.variance), args.mean, args.variance


def cmd_fit_nb(args):
    model, mean, variance = _model_from_args(args)
    pred = predict_success_and_delay(model)
    _emit_json({
        "mean": mean,
        "variance": variance,
        "r": model.r,
        "p": model.p,
        "fallback": model.fallback,
        "success_prob": pred["success_prob"],
        "avg_delay": pred["avg_delay"],
        "entropy_bits": nb_entropy(model),
    }, args.out)
    return 0


def cmd_predict_bler(args):
    if args.r is not None and args.p is not None:
        model = NBModel(r=args.r, p=args.p)
    else:
        model, _, _ = _model_from_args(args)
    pred = predict_success_and_delay(model)
    _emit_json({
        "success_prob": pred["success_prob"],
        "avg_delay": pred["avg_delay"],
        "d_max": args.dmax,
        "predicted_bler": predict_bler(model, args.dmax),
    }, args.out)
    return 0


def cmd_simulate_feedback(args):
    channel = parse_channel(args.channel)
    config = _build_code(args)
    d_max = None if args.dmax in (None, 0) else args.dmax
    stats, records = run_feedback_session(config, channel, args.rounds,
                                          d_max=d_max, seed=args.seed,
                                          count_header=args.count_header,
                                          exact_f=args.exact_f)
    if args.out:
        rows = [(r.round_index, r.t_prev_size, r.new_info_bits,
                 int(r.decode_success),
                 -1 if r.failed else ("" if r.delay is None else r.delay))
                for r in records]
        _write_csv(args.out, ["round", "t_prev_size", "new_info_bits",
                              "success", "delay"], rows)
    summary = {
        "channel": channel.spec_string,
        "n": args.n,
        "threshold_scale": args.threshold_scale,
        "rounds": args.rounds,
        "d_max": d_max,
        "seed": args.seed,
        "count_header": bool(args.count_header),
        "num_info_bits": config.num_info_bits,
        "avg_rate": stats.avg_rate,
        "avg_delay": stats.avg_delay,
        "success_rate": stats.success_rate,
        "bler_at_dmax": stats.bler_at_dmax,
        "resolved_blocks": stats.resolved_blocks,
        "failed_blocks": stats.failed_blocks,
        "pending_blocks": stats.pending_blocks,
        "verified_exact": stats.verified_exact,
        "delay_histogram": {str(k): v for k, v in sorted(stats.delay_histogram.items())},
    }
    if args.delay_fit:
        summary["delay_fit"] = delay_distribution_check(records)
    _emit_json(summary, args.json_out)
    return 0


def cmd_sk_sim(args):
    params = SKParams(power=args.power,
                      rate=args.rate_frac * 0.5 * np.log2(1.0 + args.power),
                      rounds=args.rounds)
    result = sk_simulate(params, args.trials, seed=args.seed)
    _emit_json({
        "power": args.power,
        "rate": params.rate,
        "rounds": args.rounds,
        "trials": args.trials,
        "seed": args.seed,
        "message_count": result.message_count,
        "error_rate": result.error_rate,
        "residual_variance": result.residual_variance,
        "analytic_residual_variance": (1.0 / args.power)
        * (1.0 / (args.power + 1.0)) ** (args.rounds - 1),
        "error_bound": sk_error_bound(args.power, params.rate, args.rounds),
    }, args.out)
    return 0


def cmd_compress_t(args):
    channel = parse_channel(args.channel)
    config = _build_code(args)
    stats = mc_error_count_stats(channel, config, args.trials, seed=args.seed,
                                 jobs=args.jobs, exact_f=args.exact_f)
    empirical = DiscretePmf(stats.pmf)
    model = fit_nb(stats.mean, stats.variance)
    model_pmf = truncated_pmf(model, args.tail_mass)
    code = build_huffman(model_pmf, max_symbol=config.num_info_bits)
    if args.dict_out:
        rows = [(sym, code.codewords[sym]) for sym in code.codewords]
        _write_csv(args.dict_out, ["symbol", "codeword"], rows)
    _emit_json({
        "channel": channel.spec_string,
        "n": args.n,
        "threshold_scale": args.threshold_scale,
        "trials": args.trials,
        "seed": args.seed,
        "entropy_empirical_bits": pmf_entropy(empirical.probs),
        "entropy_model_bits": nb_entropy(model, args.tail_mass),
        "avg_code_length_bits": avg_code_length(code, empirical),
    }, args.json_out)
    return 0


def cmd_bler_sweep(args):
    channel = parse_channel(args.channel)
    scales = [float(a) for a in args.alphas.split(",")]
    rows = repro.bler_sweep_run(channel, args.n, scales, trials=args.trials,
                                seed=args.seed, jobs=args.jobs,
                                cache_dir=args.cache_dir, exact_f=args.exact_f)
    header = ["alpha", "threshold", "empirical_bler", "predicted_bler",
              "mean", "variance", "r", "p"]
    if args.out:
        _write_csv(args.out, header, [
            (row["threshold_scale"], row["threshold"], row["empirical_bler"],
             row["predicted_bler"], row["mean"], row["variance"],
             row["r"], row["p"])
            for row in rows
        ])
    _emit_json({"channel": channel.spec_string, "n": args.n,
                "trials": args.trials, "seed": args.seed, "rows": rows},
               args.json_out)
    return 0


RECIPES = ("rate-delay", "compression", "bler")


def cmd_repro(args):
    if args.list:
        for name in RECIPES:
            print(name)
        return 0
    which = args.only.split(",") if args.only else list(RECIPES)
    lines = []
    if "rate-delay" in which:
        rows = repro.rate_delay_run(rounds=args.rounds, seed=args.seed,
                                    trials=args.trials, jobs=args.jobs,
                                    cache_dir=args.cache_dir)
        lines += repro.check_rate_delay(rows)
    if "compression" in which:
        rows = repro.compression_run(trials=args.trials, seed=args.seed,
                                     jobs=args.jobs, cache_dir=args.cache_dir)
        lines += repro.check_compression(rows)
    if "bler" in which:
        for spec in repro.BLER_SWEEP_BANDS["channels"]:
            rows = repro.bler_sweep_run(parse_channel(spec),
                                        repro.BLER_SWEEP_BANDS["n"],
                                        repro.BLER_SWEEP_BANDS["scales"],
                                        trials=args.trials, seed=args.seed,
                                        jobs=args.jobs, cache_dir=args.cache_dir)
            lines += repro.check_bler_sweep(rows, spec)
    for line in lines:
        print(line)
    return 0 if all(line.ok for line in lines) else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="polarfb",
        description="Polar coding with an ideal feedback link: construction, "
                    "analytics, and protocol simulation.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s 0.1.0 ({_kernels.BACKEND} kernels)")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("construct", help="build a code and emit it as JSON")
    _code_flags(sub)
    sub.add_argument("--threshold", type=float, default=None,
                     help="absolute threshold (overrides --threshold-scale)")
    sub.add_argument("--profile-out", default=None, help="write the profile CSV")
    sub.add_argument("--out", default=None, help="code JSON path (default stdout)")
    sub.set_defaults(func=cmd_construct)

    sub = subs.add_parser("mc-estimate",
                          help="Monte Carlo error-count statistics for a code")
    _code_flags(sub)
    sub.add_argument("--trials", type=int, default=DEFAULT_MC_TRIALS)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", default=None, help="histogram CSV (count,frequency)")
    sub.add_argument("--json-out", default=None)
    sub.set_defaults(func=cmd_mc_estimate)

    sub = subs.add_parser("cov-bec",
                          help="exact erasure-indicator covariance for a BEC")
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--threshold-scale", type=float, default=1.0)
    sub.add_argument("--out", default=None, help="upper-triangle CSV (i,j,cov)")
    sub.add_argument("--json-out", default=None)
    sub.set_defaults(func=cmd_cov_bec)

    sub = subs.add_parser("fit-nb", help="moment-fit the error-count model")
    sub.add_argument("--mean", type=float, default=None)
    sub.add_argument("--variance", type=float, default=None)
    sub.add_argument("--hist", default=None, help="histogram CSV (count,frequency)")
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=cmd_fit_nb)

    sub = subs.add_parser("predict-bler",
                          help="block error rate under a delay cap")
    sub.add_argument("--mean", type=float, default=None)
    sub.add_argument("--variance", type=float, default=None)
    sub.add_argument("--hist", default=None)
    sub.add_argument("--r", type=float, default=None)
    sub.add_argument("--p", type=float, default=None)
    sub.add_argument("--dmax", type=int, required=True)
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=cmd_predict_bler)

    sub = subs.add_parser("simulate-feedback",
                          help="run the chained feedback protocol")
    _code_flags(sub)
    sub.add_argument("--rounds", type=int, required=True)
    sub.add_argument("--dmax", type=int, default=0,
                     help="delay cap; 0 means unbounded")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--count-header", action="store_true",
                     help="spend an explicit fixed-width index-count field")
    sub.add_argument("--delay-fit", action="store_true",
                     help="add a geometric goodness-of-fit report")
    sub.add_argument("--out", default=None,
                     help="per-round CSV (round,t_prev_size,new_info_bits,success,delay)")
    sub.add_argument("--json-out", default=None)
    sub.set_defaults(func=cmd_simulate_feedback)

    sub = subs.add_parser("sk-sim",
                          help="iterative MMSE feedback scheme on the AWGN channel")
    sub.add_argument("--power", type=float, required=True)
    sub.add_argument("--rate-frac", type=float, required=True,
                     help="rate as a fraction of capacity, in (0, 1)")
    sub.add_argument("--rounds", type=int, required=True)
    sub.add_argument("--trials", type=int, default=100_000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=cmd_sk_sim)

    sub = subs.add_parser("compress-t",
                          help="Huffman-compress the error count via the fitted model")
    _code_flags(sub)
    sub.add_argument("--trials", type=int, default=DEFAULT_MC_TRIALS)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--tail-mass", type=float, default=1e-9)
    sub.add_argument("--dict-out", default=None, help="codeword table CSV")
    sub.add_argument("--json-out", default=None)
    sub.set_defaults(func=cmd_compress_t)

    sub = subs.add_parser("bler-sweep",
                          help="empirical vs predicted SC BLER over thresholds")
    sub.add_argument("--channel", required=True)
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--alphas", default="0.5,1,2,4,8",
                     help="comma-separated threshold scales")
    sub.add_argument("--trials", type=int, default=DEFAULT_MC_TRIALS)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--jobs", type=int, default=1)
    sub.add_argument("--cache-dir", default=None)
    sub.add_argument("--exact-f", action="store_true",
                     help="exact tanh-rule combine instead of min-sum")
    sub.add_argument("--out", default=None)
    sub.add_argument("--json-out", default=None)
    sub.set_defaults(func=cmd_bler_sweep)

    sub = subs.add_parser("repro",
                          help="run the reproduction recipes against their bands")
    sub.add_argument("--only", default=None,
                     help=f"comma-separated subset of {','.join(RECIPES)}")
    sub.add_argument("--list", action="store_true", help="list recipes and exit")
    sub.add_argument("--rounds", type=int, default=20_000)
    sub.add_argument("--trials", type=int, default=DEFAULT_MC_TRIALS)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--jobs", type=int, default=1)
    sub.add_argument("--cache-dir", default=None)
    sub.set_defaults(func=cmd_repro)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
