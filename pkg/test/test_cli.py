import json
import math
import pytest

from pylaplace.cli import CliConfig, extended_real, format_json, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_approx_stirling_json(capsys):
    code, out, err = run(
        capsys, "approx", "--h", "log(x)-x", "--a", "0", "--b", "inf", "--n", "10", "--json"
    )
    assert code == 0
    data = json.loads(out)
    assert data["m"] == 1
    assert data["xi0"] == pytest.approx(1.0, abs=1e-12)
    assert data["estimate"] == pytest.approx(math.exp(-10.0) * math.sqrt(2 * math.pi / 10))
    # n = 0 is not integrable on the half line: advisory only
    assert "warning: c1 warn" in err


def test_approx_strict_turns_warnings_into_exit_2(capsys):
    code, _, _ = run(
        capsys, "approx", "--h", "log(x)-x", "--a", "0", "--b", "inf", "--n", "10", "--strict"
    )
    assert code == 2


def test_approx_reports_unrepresentable_estimates(capsys):
    code, out, _ = run(
        capsys, "approx", "--phi", "exp(-x^2)", "--h", "-x^2", "--n", "1000000", "--json"
    )
    assert code == 0
    data = json.loads(out)
    assert data["estimate"] == pytest.approx(math.sqrt(math.pi / 1000000))
    assert data["log_estimate"] == pytest.approx(0.5 * math.log(math.pi / 1e6))

    code, out, _ = run(capsys, "approx", "--phi", "exp(-x^2)", "--h", "1-x^2", "--n", "1000")
    assert code == 0
    assert "unrepresentable" in out


def test_negative_literals_are_values(capsys):
    code, out, _ = run(
        capsys, "approx", "--phi", "exp(-x^2)", "--h", "-x^4", "--a", "-inf", "--n", "16", "--json"
    )
    assert code == 0
    assert json.loads(out)["m"] == 2


@pytest.mark.parametrize(
    "argv, error",
    [
        (["approx", "--h", "x", "--a", "0", "--b", "1", "--n", "5"], "BoundaryMaximum"),
        (["approx", "--h", "x^3", "--a", "-1", "--b", "1", "--n", "5"], "BoundaryMaximum"),
        (["approx", "--phi", "x", "--h", "-x^2", "--n", "5"], "ZeroAmplitude"),
        (
            ["approx", "--phi", "x-1", "--h", "log(x)-x", "--a", "0", "--b", "inf", "--n", "100"],
            "ZeroAmplitude",
        ),
        (["approx", "--h", "-x^2 +", "--n", "5"], "ExpressionSyntaxError"),
        (["approx", "--h", "-x^2", "--a", "2", "--b", "1", "--n", "5"], "ValueError"),
        (["approx", "--h", "-x^2"], "ValueError"),
    ],
)
def test_errors_exit_with_1(capsys, argv, error):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert out == ""
    assert err.startswith(f"error: {error}:")
    assert len(err.strip().splitlines()) == 1


def test_usage_errors_exit_with_1(capsys):
    with pytest.raises(SystemExit) as info:
        main(["approx", "--h", "-x^2", "--n", "5", "--n-list", "1,2"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["approx", "--h", "-x^2", "--max-order", "3"])
    assert info.value.code == 1


def test_verify_table(capsys):
    code, out, _ = run(
        capsys,
        "verify",
        "--h",
        "log(x)-x",
        "--a",
        "0",
        "--b",
        "inf",
        "--n-list",
        "10,100",
        "--json",
    )
    assert code == 0
    rows = json.loads(out)
    assert [row["n"] for row in rows] == [10, 100]
    assert rows[0]["ratio"] == pytest.approx(1.008365359132, rel=1e-8)
    assert rows[1]["abs_ratio_minus_one"] < rows[0]["abs_ratio_minus_one"]


def test_verify_runs_the_hypothesis_checks(capsys):
    argv = ["verify", "--h", "log(x)-x", "--a", "0", "--b", "inf", "--n-list", "10,100"]
    code, out, err = run(capsys, *argv)
    assert code == 0
    assert "c1 warn" in err
    assert out
    code, out, _ = run(capsys, *argv, "--strict")
    assert code == 2
    assert out

    quartic = ["--h", "-x^4 + x^6/2", "--a", "-0.5", "--b", "0.5", "--n-list", "100,1000"]
    code, _, err = run(capsys, "verify", *quartic, "--strict")
    assert code == 0
    assert "warning: c" not in err


def test_prooftrace_single_n(capsys):
    code, out, _ = run(
        capsys, "prooftrace", "--h", "log(x)-x", "--a", "0", "--b", "inf", "--n", "100", "--json"
    )
    assert code == 0
    data = json.loads(out)
    assert data["flags"]["derivative_bracket"] is False
    assert data["tail_bound"] == "inf"

    code, _, _ = run(
        capsys, "prooftrace", "--h", "log(x)-x", "--a", "0", "--b", "inf", "--n", "100", "--strict"
    )
    assert code == 2


def test_prooftrace_ladder(capsys):
    code, out, _ = run(
        capsys,
        "prooftrace",
        "--h",
        "log(x)-x",
        "--a",
        "0",
        "--b",
        "inf",
        "--n-list",
        "100,10000,1000000",
        "--json",
    )
    assert code == 0
    data = json.loads(out)
    assert [row["n"] for row in data["rows"]] == [100, 10000, 1000000]
    assert all(data["verdicts"].values())


def test_prooftrace_window_error(capsys):
    code, _, err = run(
        capsys, "prooftrace", "--h", "-x^4 + x^6/2", "--a", "-0.5", "--b", "0.5", "--n", "1000"
    )
    assert code == 1
    assert "WindowExceedsInterval" in err
    assert "16777217" in err


def test_check_text_output(capsys):
    code, out, _ = run(capsys, "check", "--h", "-x^2 + 0.5*sin(8*x)", "--a", "-5", "--b", "5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("c1: pass")
    assert lines[1].startswith("c3: fail")
    assert "witness" in lines[1]
    assert lines[2].startswith("c4: fail")
    assert lines[3].startswith("c5: pass")

    code, _, _ = run(
        capsys, "check", "--h", "-x^2 + 0.5*sin(8*x)", "--a", "-5", "--b", "5", "--strict"
    )
    assert code == 2


def test_demo_stirling(capsys):
    code, out, _ = run(capsys, "demo-stirling", "--json")
    assert code == 0
    rows = json.loads(out)
    assert [row["n"] for row in rows] == [10, 100, 1000, 10000]
    assert rows[0]["ratio_to_sqrt_2pi"] == pytest.approx(1.008365359132, rel=1e-11)

    code, out, _ = run(capsys, "demo-stirling", "--n", "5")
    assert code == 0
    assert out.startswith("sqrt(2 pi) = 2.5066282746")


def test_format_json():
    text = format_json({"b": math.inf, "a": [1, 0.1, None, True], "c": math.nan})
    assert text == '{"a": [1, 0.10000000000000001, null, true], "b": "inf", "c": "nan"}'


def test_extended_real_and_config():
    assert extended_real("-inf") == -math.inf
    assert extended_real("+INF") == math.inf
    assert extended_real("2.5") == 2.5
    with pytest.raises(ValueError):
        CliConfig("approx", h="-x^2", n=0)
    assert CliConfig("verify", h="-x^2", n_list=[1, 2]).ns == [1, 2]
