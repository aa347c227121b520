import csv
import io
import json
from fractions import Fraction

import pytest

from cubeperc import __version__
from cubeperc.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_exact_connectivity_json(capsys):
    code, out, _ = run(capsys, "connectivity", "--dim", "3", "--p", "0.5", "--exact")
    assert code == EXIT_OK
    report = json.loads(out)
    assert set(report) == {"version", "command", "config", "result", "provenance", "duration_ms"}
    assert report["version"] == __version__
    assert Fraction(report["result"]["fraction"]) == Fraction(1083, 4096)
    assert report["config"]["exact"] is True


@pytest.mark.parametrize(
    "argv",
    [
        ["connectivity", "--dim", "0", "--p", "0.5", "--exact"],
        ["connectivity", "--dim", "3", "--p", "1.5", "--exact"],
        ["connectivity", "--dim", "3", "--p", "0.5"],
        ["connectivity", "--dim", "4", "--p", "0.5", "--exact"],
        ["hitting", "--dim", "5"],
        ["hitting", "--dim", "5", "--seed", "0"],
        ["hitting", "--dim", "5", "--seed", str(2**64)],
        ["hitting", "--dim", "5", "--seed", "1", "--trials", "0"],
        ["hitting", "--dim", "5", "--seed", "1", "--workers", "0"],
        ["hitting", "--dim", "40", "--seed", "1"],
        ["verify", "--dim", "5"],
        ["tworound", "--dim", "3", "--p", "0.02", "--epsilon", "0.05", "--seed", "1"],
        ["census", "--dim", "5", "--p", "0.5", "--seed", "1", "--threshold", "0"],
        ["bounds", "--dim", "8", "--p", "0.4", "--epsilon", "1.0"],
        ["frobnicate"],
        ["hitting", "--dim", "5", "--seed", "1", "--bogus"],
        [],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert out == ""
    assert "error" in err


def test_unknown_command_prints_usage(capsys):
    _, _, err = run(capsys, "frobnicate")
    assert err.startswith("usage:")


def test_verify_reports_zero_violations(capsys):
    code, out, _ = run(capsys, "verify", "--dim", "4")
    assert code == EXIT_OK
    result = json.loads(out)["result"]
    assert len(result) == 3
    assert all(r["holds"] and r["violations"] == [] for r in result.values())


def test_verify_csv(capsys):
    code, out, _ = run(capsys, "verify", "--dim", "3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and len(rows) == 3
    assert all(r["violations"] == "0" for r in rows)
    assert out.endswith("\r\n")


def test_bounds_grid_csv(capsys):
    code, out, _ = run(
        capsys, "bounds", "--dim", "8", "12", "--p", "0.4", "0.45", "0.5", "--epsilon", "0.05", "--format", "csv"
    )
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6
    assert [(r["d"], r["p"]) for r in rows[:3]] == [("8", "0.4"), ("8", "0.45"), ("8", "0.5")]


def test_bounds_json_spells_out_infinity(capsys):
    code, out, _ = run(capsys, "bounds", "--dim", "16", "--p", "0.45", "--epsilon", "0.05")
    assert code == EXIT_OK
    point = json.loads(out)["result"]["points"][0]
    assert point["sprinkling_failure_bound"] == "inf"


def test_csv_quoting_is_rfc4180():
    from cubeperc.cli import render_csv

    text = render_csv([{"name": 'a "quoted", value', "x": 1}])
    assert text == 'name,x\r\n"a ""quoted"", value",1\r\n'
    assert next(csv.reader(io.StringIO(text.splitlines()[1]))) == ['a "quoted", value', "1"]


STOCHASTIC = [
    ["hitting", "--dim", "6", "--trials", "300"],
    ["connectivity", "--dim", "6", "--p", "0.5", "--trials", "300"],
    ["census", "--dim", "7", "--p", "0.45", "--trials", "100"],
    ["process", "--dim", "6", "--index", "3"],
    ["tworound", "--dim", "2", "--p", "0.45", "--epsilon", "0.05", "--trials", "2000"],
]


@pytest.mark.parametrize("argv", STOCHASTIC, ids=lambda a: a[0])
def test_reproducible_output_is_byte_identical(capsys, argv):
    outputs = [
        run(capsys, *argv, "--seed", "20240601", "--workers", workers, "--reproducible")[1]
        for workers in ("1", "8", "1")
    ]
    assert outputs[0] == outputs[1] == outputs[2]
    report = json.loads(outputs[0])
    assert report["duration_ms"] is None and report["config"]["workers"] is None
    assert report["provenance"]["seed"] == 20240601


def test_without_flag_only_timing_and_workers_differ(capsys):
    argv = ["hitting", "--dim", "6", "--trials", "200", "--seed", "99"]
    _, a, _ = run(capsys, *argv, "--workers", "1")
    _, b, _ = run(capsys, *argv, "--workers", "4")
    ra, rb = json.loads(a), json.loads(b)
    assert isinstance(ra["duration_ms"], float)
    for r in (ra, rb):
        del r["duration_ms"]
        del r["config"]["workers"]
    assert ra == rb


def test_different_seeds_differ(capsys):
    _, a, _ = run(capsys, "process", "--dim", "6", "--seed", "1", "--reproducible")
    _, b, _ = run(capsys, "process", "--dim", "6", "--seed", "2", "--reproducible")
    assert a != b


def test_process_dump(capsys):
    code, out, _ = run(capsys, "process", "--dim", "5", "--seed", "0x2a", "--index", "7")
    assert code == EXIT_OK
    result = json.loads(out)["result"]
    assert 1 <= result["tau_d"] <= result["tau_c"] <= 80
    assert result["provenance"] == {"seed": 42, "label": "process:d=5", "index": 7}
    assert len(result["order_digest"]) == 16


def test_tworound_passes_and_fails(capsys):
    ok, out, _ = run(capsys, "tworound", "--dim", "2", "--p", "0.45", "--epsilon", "0.05",
                     "--trials", "100000", "--seed", "5")
    assert ok == EXIT_OK and json.loads(out)["result"]["passed"]
    # a tolerance far below the sampling noise must fail the marginal check
    bad, out, _ = run(capsys, "tworound", "--dim", "2", "--p", "0.45", "--epsilon", "0.05",
                      "--trials", "2000", "--seed", "5", "--tolerance", "1e-9")
    assert bad == EXIT_FAILED
    assert not json.loads(out)["result"]["passed"]


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.csv"
    code, out, _ = run(capsys, "hitting", "--dim", "4", "--trials", "50", "--seed", "3",
                       "--format", "csv", "--out", str(target))
    assert code == EXIT_OK and out == ""
    rows = list(csv.DictReader(io.StringIO(target.read_text())))
    assert len(rows) == 1 and rows[0]["trials"] == "50"


def test_census_result(capsys):
    code, out, _ = run(capsys, "census", "--dim", "8", "--p", "0.6", "--trials", "50", "--seed", "8")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["provenance"]["label"].startswith("census:d=8")
