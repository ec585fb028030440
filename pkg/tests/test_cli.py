"""CLI tests: flag validation, artifact formats, exit codes, determinism."""

import importlib.resources
import json
import math
import re

import jsonschema
import pytest

from ippp.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def load_schema():
    text = (
        importlib.resources.files("ippp").joinpath("output.schema.json").read_text()
    )
    return json.loads(text)


def parse_csv_points(out):
    lines = out.splitlines()
    assert lines[0].startswith("# ippp ")
    assert lines[1] == "rep,point"
    rows = []
    for line in lines[2:]:
        rep, _, point = line.partition(",")
        rows.append((int(rep), float(point) if point else None))
    return rows


# ------------------------------------------------------------- intensity


def test_intensity_prints_bare_decimal(capsys):
    code, out, err = run(capsys, "intensity", "--rate", "x", "--window", "0", "2")
    assert code == 0
    assert err == ""
    assert out == "2.0\n"


def test_intensity_family(capsys):
    code, out, _ = run(
        capsys,
        "intensity",
        "--rate-family",
        "constant",
        "--params",
        "c=3",
        "--window",
        "0",
        "4",
    )
    assert code == 0
    assert float(out) == pytest.approx(12.0, abs=1e-9)


def test_intensity_rejects_seed(capsys):
    code, _, err = run(capsys, "intensity", "--rate", "1", "--window", "0", "1", "--seed", "3")
    assert code == 2
    assert "--seed" in err


def test_intensity_tolerance_failure_exits_1(capsys):
    code, out, err = run(
        capsys, "intensity", "--rate", "2+sin(x)", "--window", "0", "1", "--tol", "1e-30"
    )
    assert code == 1
    assert out == ""
    assert "tolerance" in err.lower()


# ---------------------------------------------------------- rate sources


def test_conflicting_rate_sources(capsys):
    code, _, err = run(
        capsys,
        "simulate",
        "--rate",
        "x",
        "--rate-family",
        "constant",
        "--params",
        "c=1",
        "--window",
        "0",
        "1",
        "--seed",
        "3",
    )
    assert code == 2
    assert "conflicting rate sources" in err


def test_missing_rate_source(capsys):
    code, _, err = run(capsys, "intensity", "--window", "0", "1")
    assert code == 2
    assert "rate source" in err


def test_rate_parse_error_names_flag(capsys):
    code, _, err = run(capsys, "intensity", "--rate", "x+", "--window", "0", "1")
    assert code == 2
    assert "--rate" in err


def test_params_without_family(capsys):
    code, _, err = run(
        capsys, "intensity", "--rate", "x", "--params", "c=1", "--window", "0", "1"
    )
    assert code == 2
    assert "--params" in err


def test_family_without_params(capsys):
    code, _, err = run(
        capsys, "intensity", "--rate-family", "linear", "--window", "0", "1"
    )
    assert code == 2
    assert "--params" in err


@pytest.mark.parametrize(
    "params,fragment",
    [
        ("d=1", "missing required parameter 'c'"),
        ("c=1,d=2", "unknown parameter"),
        ("c=abc", "must be a number"),
        ("c=1,c=2", "duplicate key"),
        ("c", "expected key=value"),
    ],
)
def test_bad_family_params(capsys, params, fragment):
    code, _, err = run(
        capsys,
        "intensity",
        "--rate-family",
        "constant",
        "--params",
        params,
        "--window",
        "0",
        "1",
    )
    assert code == 2
    assert fragment in err


def test_invalid_family_parameters_exit_2(capsys):
    # sinusoidal needs offset >= |amplitude|
    code, _, err = run(
        capsys,
        "intensity",
        "--rate-family",
        "sin",
        "--params",
        "a=1,b=5",
        "--window",
        "0",
        "1",
    )
    assert code == 2
    assert "--params" in err


def test_pwconst_family(capsys):
    code, out, _ = run(
        capsys,
        "intensity",
        "--rate-family",
        "pwconst",
        "--params",
        "breaks=0:1:2,levels=2:5",
        "--window",
        "0",
        "2",
    )
    assert code == 0
    assert float(out) == pytest.approx(7.0, abs=1e-8)


def test_sin_family_defaults(capsys):
    code, out, _ = run(
        capsys,
        "intensity",
        "--rate-family",
        "sin",
        "--params",
        "a=2,b=1",
        "--window",
        "0",
        str(2.0 * math.pi),
    )
    assert code == 0
    assert float(out) == pytest.approx(4.0 * math.pi, abs=1e-8)


# -------------------------------------------------------------- simulate


def test_simulate_csv_artifact(capsys):
    code, out, err = run(
        capsys,
        "simulate",
        "--rate-family",
        "constant",
        "--params",
        "c=1",
        "--window",
        "0",
        "10",
        "--seed",
        "7",
    )
    assert code == 0
    first = out.splitlines()[0]
    assert re.fullmatch(
        r"# ippp \d+\.\d+\.\d+ seed=7 stream=0 cmd=ippp simulate "
        r"--rate-family constant --params c=1 --window 0 10 --seed 7",
        first,
    )
    rows = parse_csv_points(out)
    assert all(rep == 0 for rep, _ in rows)
    assert all(0.0 <= p <= 10.0 for _, p in rows)


def test_simulate_requires_seed(capsys):
    code, _, err = run(
        capsys, "simulate", "--rate", "1", "--window", "0", "1"
    )
    assert code == 2
    assert "--seed" in err


def test_simulate_deterministic(capsys):
    argv = (
        "simulate",
        "--rate",
        "2+sin(x)",
        "--window",
        "0",
        "6",
        "--seed",
        "11",
    )
    _, out1, _ = run(capsys, *argv)
    _, out2, _ = run(capsys, *argv)
    assert out1 == out2


def test_simulate_stream_changes_output(capsys):
    base = (
        "simulate",
        "--rate-family",
        "constant",
        "--params",
        "c=2",
        "--window",
        "0",
        "8",
        "--seed",
        "4",
    )
    _, out1, _ = run(capsys, *base)
    _, out2, _ = run(capsys, *base, "--stream", "1")
    assert out1.splitlines()[2:] != out2.splitlines()[2:]


def test_simulate_reps_use_per_rep_streams(capsys):
    base = (
        "simulate",
        "--rate-family",
        "constant",
        "--params",
        "c=2",
        "--window",
        "0",
        "5",
        "--seed",
        "21",
    )
    _, one, _ = run(capsys, *base)
    _, two, _ = run(capsys, *base, "--reps", "2")
    rows_one = parse_csv_points(one)
    rows_two = parse_csv_points(two)
    assert [p for r, p in rows_two if r == 0] == [p for _, p in rows_one]
    assert {r for r, _ in rows_two} == {0, 1}


def test_simulate_json_validates_against_schema(capsys):
    code, out, _ = run(
        capsys,
        "simulate",
        "--rate",
        "1+x",
        "--window",
        "0",
        "3",
        "--seed",
        "9",
        "--format",
        "json",
    )
    assert code == 0
    body = json.loads(out)
    jsonschema.validate(body, load_schema())
    assert body["meta"]["seed"] == 9
    assert body["meta"]["stream"] == 0
    assert all(0.0 <= row["point"] <= 3.0 for row in body["points"])


def test_simulate_window_order_checked(capsys):
    code, _, err = run(
        capsys, "simulate", "--rate", "1", "--window", "5", "1", "--seed", "2"
    )
    assert code == 2
    assert "--window" in err


# ------------------------------------------------------------ simulate-n


def test_simulate_n_exact_counts(capsys):
    code, out, _ = run(
        capsys,
        "simulate-n",
        "--rate",
        "x",
        "--window",
        "0",
        "4",
        "--count",
        "6",
        "--seed",
        "13",
        "--reps",
        "3",
    )
    assert code == 0
    rows = parse_csv_points(out)
    for rep in range(3):
        assert sum(1 for r, _ in rows if r == rep) == 6


def test_simulate_n_rejects_negative_count(capsys):
    code, _, err = run(
        capsys,
        "simulate-n",
        "--rate",
        "1",
        "--window",
        "0",
        "1",
        "--count",
        "-2",
        "--seed",
        "1",
    )
    assert code == 2
    assert "--count" in err


# ------------------------------------------------------------ next-point


def test_next_point_rows(capsys):
    code, out, _ = run(
        capsys,
        "next-point",
        "--rate",
        "1",
        "--from",
        "0",
        "--n",
        "3",
        "--direction",
        "up",
        "--seed",
        "5",
        "--reps",
        "4",
    )
    assert code == 0
    rows = parse_csv_points(out)
    assert [r for r, _ in rows] == [0, 1, 2, 3]
    assert all(p > 0.0 for _, p in rows)


def test_next_point_no_point_is_empty_csv_field(capsys):
    code, out, _ = run(
        capsys,
        "next-point",
        "--rate-family",
        "pwconst",
        "--params",
        "breaks=0:1,levels=0.5",
        "--from",
        "1",
        "--n",
        "1",
        "--direction",
        "up",
        "--seed",
        "3",
        "--reps",
        "2",
    )
    assert code == 0
    rows = parse_csv_points(out)
    assert rows == [(0, None), (1, None)]
    assert out.splitlines()[2] == "0,"


def test_next_point_no_point_is_json_null(capsys):
    code, out, _ = run(
        capsys,
        "next-point",
        "--rate-family",
        "pwconst",
        "--params",
        "breaks=0:1,levels=0.5",
        "--from",
        "1",
        "--n",
        "1",
        "--direction",
        "up",
        "--seed",
        "3",
        "--format",
        "json",
    )
    assert code == 0
    body = json.loads(out)
    jsonschema.validate(body, load_schema())
    assert body["points"] == [{"rep": 0, "point": None}]


def test_next_point_direction_down(capsys):
    code, out, _ = run(
        capsys,
        "next-point",
        "--rate",
        "1",
        "--from",
        "0",
        "--n",
        "1",
        "--direction",
        "down",
        "--seed",
        "8",
    )
    assert code == 0
    rows = parse_csv_points(out)
    assert rows[0][1] < 0.0


def test_next_point_rejects_bad_direction(capsys):
    code, _, err = run(
        capsys,
        "next-point",
        "--rate",
        "1",
        "--from",
        "0",
        "--n",
        "1",
        "--direction",
        "sideways",
        "--seed",
        "8",
    )
    assert code == 2
    assert "--direction" in err or "invalid choice" in err


def test_next_point_rejects_bad_n(capsys):
    code, _, err = run(
        capsys,
        "next-point",
        "--rate",
        "1",
        "--from",
        "0",
        "--n",
        "0",
        "--direction",
        "up",
        "--seed",
        "8",
    )
    assert code == 2
    assert "--n" in err


# --------------------------------------------------------------- density


def test_density_order_stat_table(capsys):
    code, out, _ = run(
        capsys,
        "density",
        "order-stat",
        "--rate-family",
        "constant",
        "--params",
        "c=2",
        "--window",
        "0",
        "1",
        "--k",
        "1",
        "--m",
        "2",
        "--grid",
        "0",
        "1",
        "5",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# ippp ")
    assert "seed=none stream=none" in lines[0]
    assert lines[1] == "x,value"
    table = [tuple(map(float, line.split(","))) for line in lines[2:]]
    assert len(table) == 5
    # first of two uniform points has density 2*(1-x)
    for x, value in table:
        assert value == pytest.approx(2.0 * (1.0 - x), abs=1e-8)


def test_density_order_stat_validates_indices(capsys):
    base = (
        "density",
        "order-stat",
        "--rate",
        "1",
        "--window",
        "0",
        "1",
        "--grid",
        "0",
        "1",
        "3",
    )
    code, _, err = run(capsys, *base, "--k", "0", "--m", "2")
    assert code == 2
    assert "--k" in err
    code, _, err = run(capsys, *base, "--k", "3", "--m", "2")
    assert code == 2
    assert "--m" in err


def test_density_grid_validation(capsys):
    code, _, err = run(
        capsys,
        "density",
        "order-stat",
        "--rate",
        "1",
        "--window",
        "0",
        "1",
        "--k",
        "1",
        "--m",
        "1",
        "--grid",
        "0",
        "1",
        "2.5",
    )
    assert code == 2
    assert "--grid" in err


def test_density_rejects_seed(capsys):
    code, _, err = run(
        capsys,
        "density",
        "order-stat",
        "--rate",
        "1",
        "--window",
        "0",
        "1",
        "--k",
        "1",
        "--m",
        "1",
        "--grid",
        "0",
        "1",
        "3",
        "--seed",
        "4",
    )
    assert code == 2
    assert "--seed" in err


def test_density_nth_point_reports_mass(capsys):
    code, out, _ = run(
        capsys,
        "density",
        "nth-point",
        "--rate-family",
        "pwconst",
        "--params",
        "breaks=0:1,levels=0.5",
        "--from",
        "0",
        "--n",
        "1",
        "--direction",
        "up",
        "--grid",
        "0",
        "1",
        "5",
    )
    assert code == 0
    lines = out.splitlines()
    mass_line = lines[1]
    assert mass_line.startswith("# mass=")
    mass = float(mass_line.removeprefix("# mass="))
    assert mass == pytest.approx(1.0 - math.exp(-0.5), abs=1e-8)
    assert lines[2] == "x,value"


def test_density_nth_point_json_mass_and_schema(capsys):
    code, out, _ = run(
        capsys,
        "density",
        "nth-point",
        "--rate",
        "1",
        "--from",
        "0",
        "--n",
        "2",
        "--direction",
        "up",
        "--grid",
        "0",
        "4",
        "9",
        "--format",
        "json",
    )
    assert code == 0
    body = json.loads(out)
    jsonschema.validate(body, load_schema())
    assert body["meta"]["mass"] == pytest.approx(1.0, abs=1e-9)
    assert body["meta"]["seed"] is None
    by_x = {row["x"]: row["value"] for row in body["table"]}
    assert by_x[2.0] == pytest.approx(2.0 * math.exp(-2.0), abs=1e-8)


# ------------------------------------------------------------- plumbing


def test_out_writes_file_and_keeps_stdout_quiet(tmp_path, capsys):
    target = tmp_path / "artifact.csv"
    code, out, _ = run(
        capsys,
        "simulate",
        "--rate",
        "1",
        "--window",
        "0",
        "5",
        "--seed",
        "2",
        "--out",
        str(target),
    )
    assert code == 0
    assert out == ""
    text = target.read_text()
    assert text.startswith("# ippp ")
    _, rerun_out, _ = run(
        capsys, "simulate", "--rate", "1", "--window", "0", "5", "--seed", "2"
    )
    assert text.splitlines()[1:] == rerun_out.splitlines()[1:]


def test_cmd_field_quotes_expression(capsys):
    _, out, _ = run(
        capsys, "simulate", "--rate", "2+sin(x)", "--window", "0", "1", "--seed", "1"
    )
    assert "cmd=ippp simulate --rate '2+sin(x)' --window 0 1 --seed 1" in out.splitlines()[0]


def test_version_flag(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == 0
    assert out.startswith("ippp ")


def test_help_exits_zero(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0
    assert "intensity" in out


def test_reps_validation(capsys):
    code, _, err = run(
        capsys,
        "simulate",
        "--rate",
        "1",
        "--window",
        "0",
        "1",
        "--seed",
        "1",
        "--reps",
        "0",
    )
    assert code == 2
    assert "--reps" in err


def test_tol_validation(capsys):
    code, _, err = run(
        capsys, "intensity", "--rate", "1", "--window", "0", "1", "--tol", "-1"
    )
    assert code == 2
    assert "--tol" in err


def test_numeric_error_surfaces_verbatim(capsys):
    code, out, err = run(capsys, "intensity", "--rate", "x-10", "--window", "0", "2")
    assert code == 1
    assert out == ""
    assert "negative" in err
    assert "x=" in err
