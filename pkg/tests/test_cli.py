import json
import math
import os
import stat

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eberhard_sim import cli
from eberhard_sim.counts import JMode
from eberhard_sim.model import settings_from_theta
from eberhard_sim.simulate import run_point


def run(tmp_path, *args):
    return cli.main(["--output-dir", str(tmp_path), *args])


def test_format_examples():
    assert cli.format_datafile([(0.0, 12)]) == "0 12\n"
    assert cli.format_datafile([(10.0, -3), (20.0, 5)]) == "10 -3\n20 5\n"
    assert cli.format_datafile([(12.5, 7)], precision=1) == "12.5 7\n"


@given(
    st.lists(st.tuples(st.integers(-36000, 36000), st.integers(-(10**9), 10**9)), min_size=1, max_size=30),
    st.integers(0, 2),
)
def test_datafile_round_trip(rows, precision):
    scaled = [(t / 10**precision, j) for t, j in rows]
    assert cli.parse_datafile(cli.format_datafile(scaled, precision)) == scaled


def test_emit_datafile(tmp_path):
    results = [run_point(settings_from_theta(math.radians(d)), 0.0, 40, 1, i, theta=math.radians(d)) for i, d in enumerate((10, 20))]
    path = tmp_path / "curve"
    cli.emit_datafile(results, JMode.FULL, path)
    assert path.read_bytes() == f"10 {results[0].j_full}\n20 {results[1].j_full}\n".encode()
    with pytest.raises(ValueError):
        cli.emit_datafile([], JMode.FULL, path)


def test_minimal_run(tmp_path):
    assert run(tmp_path, "--trials", "4", "--theta-start", "0", "--theta-end", "0") == 0
    lines = (tmp_path / "eberhard_without_threshold").read_text().splitlines()
    assert len(lines) == 1 and lines[0].startswith("0 ")
    summary = cli.load_summary(tmp_path / "summary.json")
    (point,) = summary["points"]
    assert all(point["tables"][k]["trials"] == 1 for k in ("11", "12", "21", "22"))
    assert summary["config"]["trials"] == 4


def test_both_modes_with_threshold(tmp_path):
    args = ["--trials", "4000", "--threshold", "-0.995", "--mode", "both", "--theta-step", "30", "--emit-oracle"]
    assert run(tmp_path, *args) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == [
        "deleted_with_threshold",
        "eberhard_with_threshold",
        "oracle_deleted_with_threshold",
        "oracle_eberhard_with_threshold",
        "summary.json",
    ]
    thetas = [float(line.split()[0]) for line in (tmp_path / "deleted_with_threshold").read_text().splitlines()]
    assert thetas == [0, 30, 60, 90, 120, 150, 180]
    oracle_rows = (tmp_path / "oracle_deleted_with_threshold").read_text().splitlines()
    assert float(oracle_rows[4].split()[1]) < 0  # 120 degrees


def test_fractional_step_formatting(tmp_path):
    assert run(tmp_path, "--trials", "4", "--theta-start", "0", "--theta-end", "1", "--theta-step", "0.25") == 0
    thetas = [line.split()[0] for line in (tmp_path / "eberhard_without_threshold").read_text().splitlines()]
    assert thetas == ["0.00", "0.25", "0.50", "0.75", "1.00"]


def test_summary_consistency(tmp_path):
    assert run(tmp_path, "--trials", "4000", "--threshold", "-0.995", "--theta-step", "45") == 0
    summary = cli.load_summary(tmp_path / "summary.json")
    rows = cli.parse_datafile((tmp_path / "eberhard_with_threshold").read_text())
    assert [j for _, j in rows] == [p["j_full"] for p in summary["points"]]
    for p in summary["points"]:
        assert p["empirical_efficiency"] == p["detected"] / 8000


def test_tampered_summary_is_detected(tmp_path):
    run(tmp_path, "--trials", "400", "--theta-end", "0")
    path = tmp_path / "summary.json"
    data = json.loads(path.read_text())
    data["points"][0]["j_full"] += 1
    path.write_text(json.dumps(data))
    with pytest.raises(ValueError, match="J mismatch"):
        cli.load_summary(path)


def test_repeat_runs_byte_identical(tmp_path):
    args = ["--trials", "4000", "--threshold", "-0.995", "--mode", "both", "--theta-step", "20"]
    first, second = tmp_path / "a", tmp_path / "b"
    run(first, *args)
    run(second, *args, "--workers", "3")
    for name in ("eberhard_with_threshold", "deleted_with_threshold"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    s1 = json.loads((first / "summary.json").read_text())
    s2 = json.loads((second / "summary.json").read_text())
    s1["config"].pop("output_dir"), s2["config"].pop("output_dir")
    assert s1 == s2


@pytest.mark.parametrize(
    "args",
    [
        ["--theta-step", "0"],
        ["--theta-start", "10", "--theta-end", "0"],
        ["--trials", "0"],
        ["--trials", "6"],
        ["--threshold", "0.2"],
        ["--threshold", "nan"],
        ["--seed", "-1"],
        ["--mode", "nope"],
        ["--workers", "0"],
        ["--bogus"],
    ],
)
def test_invalid_flags_exit_1(tmp_path, capsys, args):
    assert run(tmp_path, *args) == 1
    err = capsys.readouterr().err
    assert "usage:" in err
    assert not any(tmp_path.iterdir())


def test_out_of_range_threshold_override(tmp_path):
    assert run(tmp_path, "--trials", "40", "--theta-end", "0", "--threshold", "-1.5", "--allow-out-of-range-threshold") == 0
    assert (tmp_path / "eberhard_with_threshold").read_text() == "0 0\n"


@pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
def test_io_failure_exit_2(tmp_path):
    tmp_path.chmod(stat.S_IRUSR | stat.S_IXUSR)
    try:
        assert run(tmp_path / "out", "--trials", "4", "--theta-end", "0") == 2
    finally:
        tmp_path.chmod(stat.S_IRWXU)


def test_io_failure_removes_partial_outputs(tmp_path, monkeypatch, capsys):
    real = cli._write

    def flaky(path, text, written):
        if path.name == cli.SUMMARY_NAME:
            raise OSError("disk full")
        real(path, text, written)

    monkeypatch.setattr(cli, "_write", flaky)
    assert run(tmp_path, "--trials", "4", "--theta-end", "0", "--mode", "both") == 2
    assert list(tmp_path.iterdir()) == []
    assert "disk full" in capsys.readouterr().err


def test_output_dir_is_a_file(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run(blocker, "--trials", "4", "--theta-end", "0") == 2
