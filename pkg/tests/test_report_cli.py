import csv
import json

import numpy as np
import pytest

from sirs_activity.cli import main
from sirs_activity.model import mean_activity
from sirs_activity.report import CSV_COLUMNS, compare, run_and_report, write_csv
from sirs_activity.scenarios import preset, resolve


def _read(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]])


@pytest.fixture(scope="module")
def bench_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    sc = preset("benchmark").with_overrides(horizon=1500)
    return out, sc, run_and_report(sc, out)


def test_outputs_written(bench_report):
    out, sc, rep = bench_report
    d = out / sc.name
    assert {p.name for p in d.iterdir()} == {"decentralized.csv", "centralized.csv", "summary.json", "paths.svg"}
    summary = json.loads((d / "summary.json").read_text())
    for kind in ("decentralized", "centralized"):
        entry = summary["kinds"][kind]
        assert set(entry["ever_infected"]) == {"365", "730", "1095"}
        for key in ("peak_infected", "peak_day", "long_run_activity_p", "welfare"):
            assert key in entry
    assert (d / "paths.svg").read_text().lstrip().startswith("<?xml")


def test_csv_columns_and_sums(bench_report):
    out, sc, rep = bench_report
    header, data = _read(out / sc.name / "centralized.csv")
    assert tuple(header) == CSV_COLUMNS
    assert np.array_equal(data[:, 0], np.arange(1500))
    assert np.max(np.abs(data[:, 1:6].sum(axis=1) - 1)) <= 1e-9
    col = {c: data[:, k] for k, c in enumerate(header)}
    np.testing.assert_allclose(col["infected_total"], col["i_p"] + col["i_q"], atol=1e-15)
    np.testing.assert_allclose(col["secondary_total"], col["s_q"] + col["i_q"] + col["r"], atol=1e-15)
    np.testing.assert_allclose(col["ever_infected"], 1 - col["s_p"], atol=1e-15)
    np.testing.assert_allclose(
        col["mean_activity"],
        col["s_p"] * col["a_p"] + col["s_q"] * col["a_q"] + col["i_p"] + col["i_q"] + col["r"], atol=1e-15)


def test_csv_full_precision(bench_report, tmp_path):
    out, sc, rep = bench_report
    sol = rep["solutions"][sc.kinds[1]]
    header, data = _read(out / sc.name / "centralized.csv")
    assert np.array_equal(data[:, 6], sol.activities.a_p)


def test_csv_deterministic(tmp_path):
    sc = preset("today-benchmark").with_overrides(horizon=800, kinds="centralized")
    a = run_and_report(sc, tmp_path / "a")
    b = run_and_report(sc, tmp_path / "b")
    for name in ("centralized.csv", "summary.json", "paths.svg"):
        assert (tmp_path / "a" / sc.name / name).read_bytes() == (tmp_path / "b" / sc.name / name).read_bytes()


def test_today_mean_activity_weight(tmp_path):
    sc = preset("today-benchmark").with_overrides(horizon=600, kinds="decentralized")
    rep = run_and_report(sc, tmp_path, plots=False)
    header, data = _read(tmp_path / sc.name / "decentralized.csv")
    col = {c: data[:, k] for k, c in enumerate(header)}
    expected = (col["s_p"] * col["a_p"] + col["s_q"] * col["a_q"]
                + 0.7 * (col["i_p"] + col["i_q"]) + col["r"])
    np.testing.assert_allclose(col["mean_activity"], expected, atol=1e-15)
    sol = rep["solutions"][sc.kinds[0]]
    np.testing.assert_allclose(mean_activity(sol.states, sol.activities, sc.policy), expected, atol=1e-15)


def test_disease_free_scenario(tmp_path):
    sc = preset("benchmark").with_overrides(initial_infected=0.0, horizon=400)
    rep = run_and_report(sc, tmp_path, plots=False)
    for kind in ("decentralized", "centralized"):
        header, data = _read(tmp_path / sc.name / f"{kind}.csv")
        assert np.all(data[:, 6] == 1.0) and np.all(data[:, 7] == 1.0)
        assert rep["kinds"][kind]["welfare"] == 0.0


def test_compare_identical_ratios_one(tmp_path):
    sc = preset("benchmark").with_overrides(horizon=1000)
    table = compare([sc, sc], tmp_path)
    assert table["columns"] == [f"{sc.name}/decentralized", f"{sc.name}/centralized"] * 2
    for name, vals in table["rows"].items():
        if name.startswith("ratio_"):
            assert vals == [1.0] * 4
    assert (tmp_path / "comparison.csv").exists()


def test_compare_peak_examples(tmp_path):
    table = compare([resolve("low-delta:alpha_days=750"), resolve("low-delta:alpha_days=inf")],
                    tmp_path, kinds=["centralized"])
    assert table["rows"]["ratio_peak_infected"][1] > 20
    bench = compare([preset("benchmark"), preset("benchmark")], tmp_path / "b")
    peaks = dict(zip(bench["columns"], bench["rows"]["peak_infected"]))
    assert peaks["benchmark/decentralized"] > peaks["benchmark/centralized"]


def test_compare_needs_two(tmp_path):
    with pytest.raises(ValueError):
        compare([preset("benchmark")], tmp_path)


# -- CLI -------------------------------------------------------------------------

def test_cli_presets(capsys):
    assert main(["presets"]) == 0
    assert capsys.readouterr().out.split() == list(preset.__globals__["PRESETS"])


def test_cli_run(tmp_path, capsys):
    code = main(["run", "immunity-permanent:horizon=1200", "--kind", "decentralized",
                 "--out", str(tmp_path), "--no-plots"])
    assert code == 0
    rep = json.loads(capsys.readouterr().out)
    assert list(rep["kinds"]) == ["decentralized"]
    assert (tmp_path / "immunity-permanent_horizon=1200" / "decentralized.csv").exists()


def test_cli_run_file(tmp_path, capsys):
    f = tmp_path / "s.txt"
    f.write_text("preset = het-sigma\nhorizon = 900\nkinds = centralized\n")
    assert main(["run", str(f), "--out", str(tmp_path / "o"), "--no-plots"]) == 0


def test_cli_steady_state(capsys):
    assert main(["steady-state", "benchmark", "--kind", "centralized"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["centralized"]["endemic"] and 0.4 < out["centralized"]["a_p"] < 0.5
    assert main(["steady-state", "immunity-permanent"]) == 0
    assert main(["steady-state", "het-beta", "--kind", "decentralized"]) == 0


def test_cli_compare(tmp_path, capsys):
    assert main(["compare", "benchmark:horizon=600", "immunity-10m:horizon=600",
                 "--kind", "decentralized", "--out", str(tmp_path)]) == 0
    assert "ratio_peak_infected" in capsys.readouterr().out


def test_cli_verify_subset(capsys):
    assert main(["verify", "--horizons", "2", "--grid-step", "0.05"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


@pytest.mark.parametrize("argv,code", [
    ([], 1),
    (["explode"], 1),
    (["compare", "benchmark"], 1),
    (["run", "nope"], 3),
    (["run", "benchmark:beta_q_ratio=2"], 3),
    (["run", "benchmark:horizon=300,tolerance=1e-300,damping=0.001", "--no-plots"], 2),
])
def test_cli_exit_codes(tmp_path, argv, code, capsys):
    if argv and argv[0] == "run":
        argv = argv + ["--out", str(tmp_path)]
    try:
        got = main(argv)
    except SystemExit as exc:
        got = exc.code
    assert got == code
