import json

import numpy as np
import pytest

from karma.arma import arma_forecast, fit_arma
from karma.cli import main
from karma.core import TimeSeriesCollection
from karma.io import CsvFormatError, format_json, load_csv, parse_config_file, save_csv
from karma.preprocess import fit_deterministic, remove_deterministic
from karma.synth import ScenarioSpec, generate


@pytest.fixture
def synth_csv(tmp_path):
    path = tmp_path / "data.csv"
    save_csv(generate(ScenarioSpec(ny=3, N=300, coupling=0.8, seed=2)), path)
    return path


def run_cli(*args):
    return main([str(a) for a in args])


def test_load_csv_basic(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n3,4\n")
    c = load_csv(p)
    np.testing.assert_array_equal(c.values, [[1, 2], [3, 4]])
    assert c.channel_names == ("a", "b")


@pytest.mark.parametrize(
    "text, where",
    [
        ("a,b\n1,2\n3\n", ":3:"),
        ("a,b\n1,x\n", ":2: column 2"),
        ("a,a\n1,2\n", ":1:"),
        ("a,b\n1,nan\n", ":2:"),
    ],
)
def test_load_csv_errors_name_location(tmp_path, text, where):
    p = tmp_path / "x.csv"
    p.write_text(text)
    with pytest.raises(CsvFormatError, match=where):
        load_csv(p)


def test_csv_round_trip(tmp_path, rng):
    for trial in range(5):
        c = TimeSeriesCollection(rng.normal(size=(20, 3)) * 10.0 ** rng.integers(-8, 8), ("x", "y", "z"))
        save_csv(c, tmp_path / "r.csv")
        back = load_csv(tmp_path / "r.csv")
        np.testing.assert_array_equal(back.values, c.values)
        assert back.channel_names == c.channel_names


def test_config_file_parsing(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("# comment\nhorizon = 10\ntrain-len=50  # trailing\n\n")
    assert parse_config_file(p) == {"horizon": "10", "train_len": "50"}


def test_format_json_precision():
    text = format_json({"x": 0.1 + 0.2, "n": float("nan")})
    assert json.loads(text)["x"] == 0.1 + 0.2
    assert json.loads(text)["n"] is None


def test_run_both_smoke(tmp_path, synth_csv, capsys):
    out = tmp_path / "out"
    assert run_cli("run", "--data", synth_csv, "--method", "both", "--train-len", 280, "--horizon", 20, "--out", out) == 0
    report = json.loads((out / "report.json").read_text())
    assert set(report["methods"]) == {"parma", "karma"}
    for m in ("parma", "karma"):
        assert report["methods"][m]["pq_norm"] >= 0
        for ch in ("ch1", "ch2", "ch3"):
            assert (out / f"{m}_{ch}.svg").read_text().lstrip().startswith("<?xml")
    # the PARMA path never realizes a state-space model
    assert "realization" not in report["methods"]["parma"]["stages"]
    assert "realization" in report["methods"]["karma"]["stages"]
    header = (out / "predictions.csv").read_text().splitlines()[0].split(",")
    assert header[:2] == ["time", "ch1_true"] and "ch3_karma" in header
    assert "|PQ|" in capsys.readouterr().out


def test_train_len_too_long(tmp_path, synth_csv):
    assert run_cli("run", "--data", synth_csv, "--train-len", 300, "--out", tmp_path / "o") == 2
    assert not (tmp_path / "o").exists()


def test_exit_codes(tmp_path, synth_csv):
    assert run_cli("run", "--data", tmp_path / "missing.csv", "--out", tmp_path / "o") == 3
    assert run_cli("run", "--data", synth_csv, "--orders", "0,1,0", "--out", tmp_path / "o") == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run_cli("run", "--config", bad, "--data", synth_csv) == 2


def test_parma_single_channel_matches_arma_forecast(tmp_path):
    series = generate(ScenarioSpec(ny=1, N=200, seed=8))
    save_csv(series, tmp_path / "one.csv")
    out = tmp_path / "o"
    assert run_cli("run", "--data", tmp_path / "one.csv", "--method", "parma", "--train-len", 180,
                   "--horizon", 10, "--orders", "2,0,1", "--trend", 1, "--out", out) == 0
    pred = load_csv(out / "predictions.csv")
    train = series.head(180)
    det = fit_deterministic(train, 1)
    resid = remove_deterministic(train, det).channel(0)
    expected = arma_forecast(fit_arma(resid, 2, 1), resid, 10) + det.evaluate(np.arange(180, 190))[:, 0]
    np.testing.assert_array_equal(pred.values[:, pred.channel_names.index("ch1_parma")], expected)


def test_config_file_and_flag_override(tmp_path, synth_csv):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"data = {synth_csv}\nmethod = parma\nhorizon = 5\nout = {tmp_path / 'a'}\n")
    assert run_cli("run", "--config", cfg, "--horizon", 7) == 0
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    assert report["config"]["horizon"] == 7
    assert list(report["methods"]) == ["parma"]


def test_report_deterministic_modulo_timestamp(tmp_path, synth_csv):
    texts = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        assert run_cli("run", "--data", synth_csv, "--seed", 3, "--out", out) == 0
        report = json.loads((out / "report.json").read_text())
        report.pop("timestamp")
        report["data"].pop("path")
        texts.append(format_json(report))
    assert texts[0] == texts[1]


def test_synth_subcommand(tmp_path):
    path = tmp_path / "s.csv"
    assert run_cli("synth", "--channels", 2, "--length", 50, "--lags", "0,1", "--seed", 1, "--out", path) == 0
    c = load_csv(path)
    assert c.values.shape == (50, 2)
    assert run_cli("synth", "--coupling", 2.0, "--out", path) == 2


def test_search_subcommand(tmp_path, synth_csv):
    out = tmp_path / "s"
    assert run_cli("search", "--data", synth_csv, "--horizon", 10, "--swarm-size", 3, "--iterations", 1, "--out", out) == 0
    info = json.loads((out / "search.json").read_text())
    assert set(info["structural_indices"]) == {"p", "na", "nb", "nc"}
    assert all(b >= a for a, b in zip(info["history"], info["history"][1:]))
