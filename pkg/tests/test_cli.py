import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bessel_means import verify as V
from bessel_means.cli import ConfigError, RunConfig, main


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


def test_mean_radius_squared(tmp_path):
    out = tmp_path / "m.csv"
    ts = np.linspace(0, 2, 9)
    code = main(["mean", "--gamma", "1,1", "--field", "radius-squared", "--points", "1,1",
                 "--radii", ",".join(map(str, ts)), "--out", str(out)])
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["x1", "x2", "t", "value"]
    for row in rows:
        t, v = float(row[2]), float(row[3])
        assert abs(v - (2 + t * t)) < 1e-8


def test_epd_minus_one_is_identity(tmp_path):
    out = tmp_path / "e.csv"
    code = main(["epd-solve", "--gamma", "1,1", "--k", "-1", "--field", "b-harmonic",
                 "--points", "0.5,0.7;1,0.2", "--times", "0,0.5,1,2", "--out", str(out)])
    assert code == 0
    _, rows = read_csv(out)
    from bessel_means.fields import b_harmonic_product
    f = b_harmonic_product([1, 1])
    for row in rows:
        assert float(row[3]) == f(np.array([float(row[0]), float(row[1])]))
        assert row[4] == "exceptional"


def test_output_is_byte_identical(tmp_path, monkeypatch):
    args = ["iterated-mean", "--gamma", "0.8,1.7", "--field", "gauss", "--points", "0.2,0.3;0.9,0.4",
            "--radii", "0.3,0.7", "--radii2", "1.2", "--order", "16", "--sphere-order", "12", "--radial-order", "16"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    monkeypatch.setenv("BESSEL_MEANS_THREADS", "1")
    assert main(args + ["--out", str(a)]) == 0
    monkeypatch.setenv("BESSEL_MEANS_THREADS", "4")
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 5


def test_seventeen_significant_digits(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["shift", "--gamma", "1", "--field", "gauss", "--points", "0.1", "--shifts", "0.3", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert rows[0][0] == format(0.1, ".17g")


def test_json_output(tmp_path):
    out = tmp_path / "s.json"
    assert main(["shift", "--gamma", "1,2", "--field", "one", "--points", "0.1,0.2", "--shifts", "0.3,0.4;0,0",
                 "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["columns"][-1] == "value" and len(data["rows"]) == 2
    assert all(abs(r[-1] - 1) < 1e-12 for r in data["rows"])


def test_asgeirsson_command(tmp_path):
    out = tmp_path / "a.csv"
    assert main(["asgeirsson-check", "--gamma", "3", "--gamma2", "1,1", "--points", "0.5", "--points2", "0.3,0.6",
                 "--xi1", "1.4142135623730951", "--xi2", "1,1", "--radii", "0.5,1", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header[-1] == "gap" and all(float(r[-1]) < 1e-8 for r in rows)


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "mean", "gamma": [1, 1], "field": "one", "points": [[1, 1]], "radii": [0.5]}))
    out = tmp_path / "o.csv"
    assert main(["mean", "--config", str(cfg), "--field", "radius-squared", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert abs(float(rows[0][3]) - 2.25) < 1e-10


@pytest.mark.parametrize(
    "argv,field",
    [
        (["epd-solve", "--gamma", "1,1", "--points", "1,1", "--times", "1"], "k"),
        (["mean", "--gamma", "1,0", "--points", "1,1", "--radii", "1"], "gamma"),
        (["mean", "--gamma", "1,1", "--dimension", "3", "--points", "1,1", "--radii", "1"], "dimension"),
        (["mean", "--gamma", "1,1", "--points", "1,1", "--radii", "1", "--order", "2"], "shift_order"),
        (["mean", "--gamma", "1,1", "--points", "1,1,1", "--radii", "1"], "points"),
        (["mean", "--gamma", "1,1", "--points", "1,1"], "radii"),
        (["mean", "--gamma", "1,1", "--points", "1,1", "--radii", "1", "--field", "bogus"], "field"),
        (["asgeirsson-check", "--gamma", "1,1", "--points", "1,1", "--radii", "1"], "gamma2"),
        (["verify", "--checks", "99"], "checks"),
        (["mean", "--gamma", "a,b"], "arguments"),
    ],
)
def test_invalid_config_exit_two(argv, field, capsys):
    assert main(argv) == 2
    assert field in capsys.readouterr().err


def test_bad_config_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert main(["mean", "--config", str(bad)]) == 2
    bad.write_text(json.dumps({"command": "mean", "colour": 1}))
    assert main(["mean", "--config", str(bad)]) == 2
    assert "colour" in capsys.readouterr().err


def test_verify_subset_passes(tmp_path):
    out = tmp_path / "manifest.json"
    assert main(["verify", "--checks", "1,5", "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["all_passed"] and [c["criterion"] for c in data["checks"]] == [1, 5]
    assert all("seconds" not in c for c in data["checks"])


def test_verify_failure_exit_one(monkeypatch, tmp_path):
    def broken():
        return V.CheckResult(1, "broken", 1.0, 1e-12, False)

    monkeypatch.setitem(V.CHECKS, 1, broken)
    assert main(["verify", "--checks", "1", "--out", str(tmp_path / "m.csv")]) == 1
    assert "false" in (tmp_path / "m.csv").read_text()


def test_verify_exception_counts_as_failure(monkeypatch, tmp_path):
    def boom():
        raise RuntimeError("nan everywhere")

    monkeypatch.setitem(V.CHECKS, 1, boom)
    assert main(["verify", "--checks", "1", "--out", str(tmp_path / "m.csv")]) == 1


coords = st.lists(st.floats(-10, 10, allow_nan=False), min_size=2, max_size=2)


@settings(max_examples=50, deadline=None)
@given(
    gamma=st.lists(st.floats(0.01, 10), min_size=2, max_size=2),
    k=st.one_of(st.none(), st.floats(-5, 10)),
    points=st.lists(coords, min_size=1, max_size=3),
    times=st.lists(st.floats(0, 5), min_size=1, max_size=4),
    order=st.integers(4, 128),
    fmt=st.sampled_from(["csv", "json"]),
    alt_const=st.booleans(),
    reading=st.sampled_from(["t", "t2"]),
)
def test_config_round_trip(tmp_path_factory, gamma, k, points, times, order, fmt, alt_const, reading):
    cfg = RunConfig(
        command="epd-solve" if k is not None else "mean",
        gamma=tuple(gamma),
        dimension=2,
        k=k,
        points=tuple(tuple(p) for p in points),
        radii=tuple(times),
        times=tuple(times),
        shift_order=order,
        output_format=fmt,
        output_path="out.csv",
        flags={"paper_constant": alt_const, "fractional_reading": reading},
    )
    path = tmp_path_factory.mktemp("rt") / "cfg.json"
    path.write_text(cfg.to_json())
    assert RunConfig.from_json(path.read_text()) == cfg


def test_config_from_json_rejects_non_object():
    with pytest.raises(ConfigError):
        RunConfig.from_json("[1, 2]")


def test_console_script_entry_point(tmp_path):
    out = tmp_path / "m.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "bessel_means.cli", "mean", "--gamma", "1", "--field", "one",
         "--points", "0.5", "--radii", "0.2", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().startswith("x1,t,value\n")
