# tests/test_cli.py
import csv

import pytest

from lmrate.presentation.cli import _parse_h_hat, build_parser, collect_overrides, main
from lmrate.shared.exceptions import ConfigError

FAST = ["--grid", "100", "--snr", "0,5", "--mode", "lm-uniform"]


def _rows(path):
    with open(path, encoding="utf-8") as f:
        return list(csv.DictReader(line for line in f if not line.startswith("#")))


def test_check_exits_zero():
    assert main(["check"]) == 0


def test_solve_writes_table(tmp_path):
    assert main(["solve", *FAST, "--output", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "solve.csv")
    assert [row["snr_db"] for row in rows] == ["0.0", "5.0"]
    assert {row["mode"] for row in rows} == {"lm-uniform"}


def test_baseline_forces_uniform_input(tmp_path):
    args = ["baseline", "--grid", "100", "--snr", "0", "--mode", "clm"]
    code = main([*args, "--output", str(tmp_path)])
    assert code == 0
    assert [row["mode"] for row in _rows(tmp_path / "solve.csv")] == ["lm-uniform"]


def test_sweep_over_parameter_pairs(tmp_path):
    code = main(
        ["sweep", *FAST, "--etas", "0.9,0.8", "--thetas", "pi/18", "--output", str(tmp_path)]
    )
    assert code == 0
    rows = _rows(tmp_path / "sweep.csv")
    assert [(row["eta"], row["snr_db"]) for row in rows] == [
        ("0.8", "0.0"),
        ("0.8", "5.0"),
        ("0.9", "0.0"),
        ("0.9", "5.0"),
    ]


def test_infeasible_budget_exits_one(tmp_path):
    args = ["solve", "--grid", "100", "--snr", "0", "--mode", "clm", "--gamma", "0.1"]
    assert main([*args, "--output", str(tmp_path)]) == 1
    rows = _rows(tmp_path / "solve.csv")
    assert rows[0]["term"] == "numerical_failure"


@pytest.mark.parametrize(
    "flags",
    [["--grid", "2501"], ["--theta", "pi/0"], ["--h-hat", "1,0,0"], ["--scheme", "8PSK"]],
)
def test_configuration_errors_exit_two(tmp_path, flags):
    assert main(["solve", *flags, "--output", str(tmp_path)]) == 2
    assert not (tmp_path / "solve.csv").exists()


def test_missing_config_file_exits_two(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "absent.toml")]) == 2


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as error:
        main(["solve", "--no-such-flag"])
    assert error.value.code == 2


def test_config_file_with_flag_override(tmp_path):
    config = tmp_path / "exp.toml"
    config.write_text(
        f'grid_n = 100\nsnr_db = [0]\nmode = "lm-uniform"\noutput = "{tmp_path.as_posix()}"\n'
        "[solver]\nmax_iter = 5\n",
        encoding="utf-8",
    )
    assert main(["solve", "--config", str(config), "--snr", "5"]) == 0
    rows = _rows(tmp_path / "solve.csv")
    assert [row["snr_db"] for row in rows] == ["5.0"]
    assert int(rows[0]["iters"]) <= 5


def test_collect_overrides_skips_unset():
    args = build_parser().parse_args(["solve", "--eta", "0.8", "--max-iter", "7"])
    assert collect_overrides(args) == {"eta": 0.8, "solver": {"max_iter": 7}}


def test_parse_h_hat():
    assert _parse_h_hat("identity") == "identity"
    assert _parse_h_hat("true-H") == "true"
    assert _parse_h_hat("1, 0, 0, 0.5") == [[1.0, 0.0], [0.0, 0.5]]
    with pytest.raises(ConfigError):
        _parse_h_hat("1,2,3")


@pytest.mark.slow
def test_verify_passes():
    assert main(["verify"]) == 0
