"""CLI contract: flag validation (exit 2), output schemas, CSV/JSON
field parity, value round-tripping, reproducibility, and the numeric
failure path (exit 3)."""

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from fpcount import MODE_FLOAT, CounterParams, sweep_moments
from fpcount.cli import build_parser, main, parse_args


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "fpcount", *args],
        capture_output=True,
    )


def rows_of(stdout_bytes):
    return list(csv.DictReader(io.StringIO(stdout_bytes.decode())))


class TestParsing:
    def test_defaults(self):
        config = parse_args(["trajectory", "--counter", "fp", "--d", "4", "--n", "100"])
        assert config.seed == 1
        assert config.output == "csv"
        assert config.checkpoints == [1, 2, 4, 8, 16, 32, 64, 100]
        assert config.params == CounterParams.fp(4)

    def test_explicit_checkpoints(self):
        config = parse_args(
            ["trajectory", "--counter", "morris", "--n", "50", "--checkpoints", "9,3,27"]
        )
        assert config.checkpoints == [3, 9, 27]

    @pytest.mark.parametrize(
        "argv",
        [
            ["trajectory", "--counter", "fp", "--n", "10"],  # fp without --d
            ["trajectory", "--counter", "qary", "--n", "10"],  # qary without --r
            ["trajectory", "--counter", "morris", "--d", "1", "--n", "10"],
            ["oracle", "--counter", "qary", "--r", "4", "--n", "5", "--mode", "exact"],
            ["trajectory", "--counter", "fp", "--d", "4", "--n", "10",
             "--checkpoints", "zap"],
            ["trajectory", "--counter", "fp", "--d", "4", "--n", "10",
             "--checkpoints", "5,11"],
            ["table-demo", "--counter", "morris"],
            ["table-demo", "--counter", "fp", "--d", "6", "--width", "6"],
            ["ensemble", "--counter", "fp", "--d", "4", "--n", "10"],  # no replicates
            ["bits", "--counter", "fp", "--d", "4", "--n", "0"],
        ],
    )
    def test_usage_errors_exit_2(self, argv):
        with pytest.raises(SystemExit) as excinfo:
            parse_args(argv)
        assert excinfo.value.code == 2

    def test_parser_lists_all_commands(self):
        text = build_parser().format_help()
        for command in ("trajectory", "ensemble", "oracle", "bounds", "bits", "table-demo"):
            assert command in text


class TestCommands:
    def test_trajectory_schema(self):
        proc = run_cli(
            "trajectory", "--counter", "fp", "--d", "4", "--seed", "7", "--n", "1000"
        )
        assert proc.returncode == 0
        rows = rows_of(proc.stdout)
        assert list(rows[0]) == [
            "family", "param", "seed", "n", "k", "estimate", "rel_error",
        ]
        assert [int(r["n"]) for r in rows] == [1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1000]
        for r in rows:
            assert r["family"] == "fp" and r["param"] == "4"
            n, est = int(r["n"]), float(r["estimate"])
            assert float(r["rel_error"]) == (est - n) / n

    def test_morris_param_column_empty(self):
        proc = run_cli("bounds", "--counter", "morris")
        row = rows_of(proc.stdout)[0]
        assert row["param"] == ""
        assert float(row["lower"]) == float(row["upper"]) == pytest.approx(math.sqrt(0.5))

    def test_oracle_worked_example(self):
        proc = run_cli("oracle", "--counter", "morris", "--n", "2", "--mode", "exact")
        row = rows_of(proc.stdout)[0]
        assert float(row["mean"]) == 2.0
        assert float(row["variance"]) == 1.0

    def test_bits_worked_example(self):
        proc = run_cli("bits", "--counter", "fp", "--d", "0", "--n", "2")
        row = rows_of(proc.stdout)[0]
        assert row["expected_bits"] == "1.25"
        assert float(row["alt_expected_bits"]) == pytest.approx(7 / 6, rel=1e-15)

    def test_bounds_fp4(self):
        proc = run_cli("bounds", "--counter", "fp", "--d", "4")
        row = rows_of(proc.stdout)[0]
        assert float(row["lower"]) == pytest.approx(math.sqrt(1 / 47), rel=1e-15)
        assert float(row["upper"]) == pytest.approx(math.sqrt(3 / 125), rel=1e-15)

    def test_ensemble_schema_and_oracle_column(self):
        proc = run_cli(
            "ensemble", "--counter", "fp", "--d", "2", "--n", "256",
            "--replicates", "8", "--seed", "3",
        )
        rows = rows_of(proc.stdout)
        assert list(rows[0]) == [
            "family", "param", "n", "replicates", "mean", "sample_std",
            "oracle_std", "outliers_2sigma", "mean_bits",
        ]
        cps = [int(r["n"]) for r in rows]
        recs = sweep_moments(CounterParams.fp(2), cps, MODE_FLOAT)
        for row, rec in zip(rows, recs):
            assert int(row["replicates"]) == 8
            assert float(row["oracle_std"]) == pytest.approx(
                math.sqrt(rec.variance), rel=1e-12
            )

    def test_table_demo(self):
        proc = run_cli(
            "table-demo", "--counter", "fp", "--d", "2", "--slots", "4",
            "--width", "8", "--n", "200", "--seed", "5",
        )
        rows = rows_of(proc.stdout)
        assert [int(r["slot"]) for r in rows] == [0, 1, 2, 3]
        for r in rows:
            assert 0 < int(r["k"]) < 256
            assert int(r["lower_bound"]) in (0, 1)

    def test_json_mirrors_csv(self):
        argv = ["oracle", "--counter", "fp", "--d", "4", "--n", "300"]
        csv_row = rows_of(run_cli(*argv).stdout)[0]
        json_row = json.loads(run_cli(*argv, "--output", "json").stdout)[0]
        assert set(json_row) == set(csv_row)
        for key, value in json_row.items():
            if isinstance(value, float):
                assert float(csv_row[key]) == value
            else:
                assert str(value) == csv_row[key]

    def test_reruns_byte_identical(self):
        argv = (
            "ensemble", "--counter", "qary", "--r", "16", "--n", "512",
            "--replicates", "16", "--seed", "11",
        )
        first = run_cli(*argv)
        second = run_cli(*argv)
        assert first.returncode == second.returncode == 0
        assert first.stdout == second.stdout

    def test_floats_reparse_to_emitted_value(self):
        # shortest-repr formatting: text -> float -> text is the identity
        proc = run_cli(
            "trajectory", "--counter", "qary", "--r", "16", "--seed", "2", "--n", "700"
        )
        for row in rows_of(proc.stdout):
            for field in ("estimate", "rel_error"):
                assert repr(float(row[field])) == row[field]


class TestFailurePaths:
    def test_numeric_failure_exits_3(self, monkeypatch, capsys):
        import fpcount.cli as cli_module

        def blow_up(*args, **kwargs):
            raise OverflowError("synthetic range failure")

        monkeypatch.setattr(cli_module, "run_trajectory", blow_up)
        code = main(["trajectory", "--counter", "fp", "--d", "4", "--n", "10"])
        captured = capsys.readouterr()
        assert code == 3
        assert "numeric range failure" in captured.err
        assert captured.out == ""

    def test_unknown_command_exits_2(self):
        proc = run_cli("frobnicate")
        assert proc.returncode == 2
