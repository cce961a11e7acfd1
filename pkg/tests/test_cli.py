import csv
import json

import numpy as np
import pytest

from polarfb.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_construct_json_and_determinism(tmp_path, capsys):
    out1 = tmp_path / "code1.json"
    out2 = tmp_path / "code2.json"
    args = ["construct", "--channel", "bec:0.5", "--n", "4", "--out"]
    assert main(args + [str(out1)]) == 0
    assert main(args + [str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    payload = json.loads(out1.read_text())
    assert payload["block_length"] == 16
    assert payload["profile_source"] == "exact-bec"
    assert sorted(payload["frozen_zero_based"] + payload["info_zero_based"]) \
        == list(range(16))


def test_construct_profile_csv(tmp_path, capsys):
    prof = tmp_path / "profile.csv"
    code, _ = run_cli(capsys, "construct", "--channel", "bec:0.5", "--n", "2",
                      "--profile-out", str(prof), "--out", str(tmp_path / "c.json"))
    assert code == 0
    rows = list(csv.DictReader(prof.open()))
    assert [r["index"] for r in rows] == ["0", "1", "2", "3"]
    pe = [float(r["pe"]) for r in rows]
    assert pe == pytest.approx([0.46875, 0.28125, 0.21875, 0.03125])


def test_bad_channel_exit_code(capsys):
    code, _ = run_cli(capsys, "construct", "--channel", "junk:1", "--n", "3")
    assert code == 2


def test_cov_bec_outputs_and_cap(tmp_path, capsys):
    cov = tmp_path / "cov.csv"
    stats = tmp_path / "stats.json"
    code, _ = run_cli(capsys, "cov-bec", "--p", "0.5", "--n", "1",
                      "--threshold-scale", "2", "--out", str(cov),
                      "--json-out", str(stats))
    assert code == 0
    rows = list(csv.DictReader(cov.open()))
    assert [(r["i"], r["j"]) for r in rows] == [("0", "0"), ("0", "1"), ("1", "1")]
    assert float(rows[1]["cov"]) == pytest.approx(0.0625)
    payload = json.loads(stats.read_text())
    assert payload["mean"] == pytest.approx(0.5)
    assert payload["variance"] == pytest.approx(0.375)
    code, _ = run_cli(capsys, "cov-bec", "--p", "0.5", "--n", "13")
    assert code == 3


def test_fit_nb_from_flags(capsys):
    code, out = run_cli(capsys, "fit-nb", "--mean", "2", "--variance", "4")
    assert code == 0
    payload = json.loads(out)
    assert payload["r"] == 2.0 and payload["p"] == 0.5
    assert payload["success_prob"] == 0.25
    assert payload["avg_delay"] == 4.0


def test_fit_nb_from_histogram(tmp_path, capsys):
    hist = tmp_path / "hist.csv"
    with hist.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["count", "frequency"])
        for k, f in ((0, 50), (1, 30), (2, 12), (3, 8)):
            w.writerow([k, f])
    code, out = run_cli(capsys, "fit-nb", "--hist", str(hist))
    assert code == 0
    payload = json.loads(out)
    assert payload["mean"] == pytest.approx(0.78)
    assert payload["fallback"] in ("none", "poisson")


def test_fit_nb_requires_input(capsys):
    code, _ = run_cli(capsys, "fit-nb")
    assert code == 2


def test_predict_bler(capsys):
    code, out = run_cli(capsys, "predict-bler", "--r", "2", "--p", "0.5",
                        "--dmax", "2")
    assert code == 0
    assert json.loads(out)["predicted_bler"] == pytest.approx(0.5625)


def test_simulate_feedback_csv_and_summary(tmp_path, capsys):
    rounds_csv = tmp_path / "rounds.csv"
    code, out = run_cli(capsys, "simulate-feedback", "--channel", "bec:0.4",
                        "--n", "6", "--rounds", "80", "--seed", "3",
                        "--out", str(rounds_csv))
    assert code == 0
    summary = json.loads(out)
    assert summary["rounds"] == 80
    assert summary["seed"] == 3
    assert summary["channel"] == "bec:0.4"
    assert summary["verified_exact"] == summary["resolved_blocks"]
    rows = list(csv.DictReader(rounds_csv.open()))
    assert len(rows) == 80
    assert list(rows[0]) == ["round", "t_prev_size", "new_info_bits",
                             "success", "delay"]


def test_simulate_feedback_delay_fit_insufficient(capsys):
    code, _ = run_cli(capsys, "simulate-feedback", "--channel", "bec:0.4",
                      "--n", "6", "--rounds", "30", "--delay-fit")
    assert code == 4


def test_sk_sim_json(capsys):
    code, out = run_cli(capsys, "sk-sim", "--power", "1", "--rate-frac", "0.8",
                        "--rounds", "5", "--trials", "5000", "--seed", "1")
    assert code == 0
    payload = json.loads(out)
    assert payload["message_count"] == 4
    assert payload["error_rate"] <= payload["error_bound"] + 0.02


def test_mc_estimate_and_compress(tmp_path, capsys):
    hist = tmp_path / "hist.csv"
    code, out = run_cli(capsys, "mc-estimate", "--channel", "bec:0.5", "--n", "5",
                        "--trials", "2000", "--seed", "2", "--out", str(hist))
    assert code == 0
    payload = json.loads(out)
    assert payload["trials"] == 2000
    rows = list(csv.DictReader(hist.open()))
    assert sum(int(r["frequency"]) for r in rows) == pytest.approx(2000, abs=2)

    code, out = run_cli(capsys, "compress-t", "--channel", "bec:0.5", "--n", "5",
                        "--trials", "2000", "--seed", "2",
                        "--dict-out", str(tmp_path / "dict.csv"))
    assert code == 0
    payload = json.loads(out)
    assert payload["entropy_empirical_bits"] <= payload["avg_code_length_bits"]
    assert payload["avg_code_length_bits"] < payload["entropy_empirical_bits"] + 1.0


def test_bler_sweep_csv(tmp_path, capsys):
    sweep = tmp_path / "sweep.csv"
    code, out = run_cli(capsys, "bler-sweep", "--channel", "bec:0.5", "--n", "6",
                        "--alphas", "1,2", "--trials", "2000", "--seed", "5",
                        "--out", str(sweep))
    assert code == 0
    rows = list(csv.DictReader(sweep.open()))
    assert [r["alpha"] for r in rows] == ["1.0", "2.0"]
    payload = json.loads(out)
    # pipeline consistency: the prediction column is 1 - pmf(0) of the fit
    for row in payload["rows"]:
        assert 0.0 <= row["predicted_bler"] <= 1.0


def test_repro_list(capsys):
    code, out = run_cli(capsys, "repro", "--list")
    assert code == 0
    assert out.split() == ["rate-delay", "compression", "bler"]
