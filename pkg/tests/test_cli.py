import json

import pytest

from fibtheta.cli import EXIT_USAGE, create_parser, main


def test_digits_xi1(capsys):
    assert main(["digits", "xi1", "--digits", "10"]) == 0
    assert capsys.readouterr().out.strip() == "13.1509666577"


def test_digits_lucas_sum(capsys):
    # (5 - sqrt5)/2 = 1.38196601125...
    assert main(["digits", "lucas_sum", "-n", "10"]) == 0
    assert capsys.readouterr().out.strip() == "1.3819660112"
    assert main(["digits", "lucas_sum", "-n", "10", "--rounding", "nearest"]) == 0
    assert capsys.readouterr().out.strip() == "1.3819660113"


def test_digits_with_quarter_power_at_high_precision(capsys):
    assert main(["digits", "theta2_beta", "--digits", "60"]) == 0
    out = capsys.readouterr().out.strip()
    assert out.startswith("2.5550934")
    assert len(out.split(".")[1]) == 60


def test_digits_with_crosscheck(capsys):
    assert main(["digits", "xi2", "--digits", "12", "--crosscheck"]) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("0.1897891436")
    assert "agrees" in captured.err


def test_unknown_constant_is_usage_error(capsys):
    assert main(["digits", "xi9", "--digits", "10"]) == EXIT_USAGE
    assert "Unknown constant" in capsys.readouterr().err


def test_bad_flag_exits_with_usage_code():
    with pytest.raises(SystemExit) as exc:
        main(["digits", "xi1", "--digits", "ten"])
    assert exc.value.code == EXIT_USAGE


def test_missing_command_exits_with_usage_code():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == EXIT_USAGE


def test_parser_defaults():
    args = create_parser().parse_args(["verify"])
    assert args.precision == 40
    assert args.workers == 1
    assert args.check is None
    assert not args.json


def test_verify_json(capsys):
    assert main(["verify", "--check", "thm1_*", "--precision", "20", "--json"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    reports = [json.loads(line) for line in lines]
    assert [r["name"] for r in reports] == ["thm1_xi1", "thm1_xi2"]
    assert all(r["status"] == "pass" for r in reports)


def test_verify_text(capsys):
    assert main(["verify", "--check", "eq453a", "--precision", "20", "--quiet"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "1 checks: 1 pass, 0 fail, 0 inconclusive" in out


def test_verify_unknown_pattern(capsys):
    assert main(["verify", "--check", "nope*", "--quiet"]) == EXIT_USAGE


def test_series(capsys):
    assert main(["series", "--identity", "tp3", "--order", "100"]) == 0
    assert "all coefficients agree to order 100" in capsys.readouterr().out


def test_series_unknown_identity():
    assert main(["series", "--identity", "tp9"]) == EXIT_USAGE


def test_probe_even_plus(capsys):
    code = main(["probe", "--targets", "even_plus", "--degree", "2", "--height", "100",
                 "--precision", "30", "--json"])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["found"]
    assert data["coefficients"] == [-4, -2, 1]
    assert data["degree"] == 2


def test_probe_text(capsys):
    main(["probe", "--targets", "even_plus", "--degree", "2", "--height", "100",
          "--precision", "30"])
    out = capsys.readouterr().out
    assert "x^2 - 2*x - 4 = 0" in out


def test_probe_pair_finds_nothing_small(capsys):
    main(["probe", "--targets", "xi1,xi2", "--degree", "1", "--height", "1000",
          "--precision", "40"])
    assert "not a proof" in capsys.readouterr().out


def test_probe_too_many_targets():
    assert main(["probe", "--targets", "xi1,xi2,even_plus", "--degree", "1",
                 "--height", "10", "--precision", "20"]) == EXIT_USAGE
