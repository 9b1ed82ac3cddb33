import json
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hamlie.bn import TruncPoly
from hamlie.cli import format_poly, parse_poly, run
from hamlie.errors import ParseError
from hamlie.gf import field_create


def test_parse_examples():
    F = field_create(5)
    assert parse_poly("x1*x2", 5, 2) == TruncPoly.monomial(F, 2, (1, 1))
    assert parse_poly("1+x1", 5, 2) == TruncPoly.one(F, 2) + TruncPoly.var(F, 2, 1)
    with pytest.warns(UserWarning):
        assert parse_poly("x1^5", 5, 2).is_zero()


def test_parse_forms():
    a = parse_poly(" 3 x1 x2^2 - 7 + x2", 5, 2)
    b = parse_poly("3*x1*x2^2 + 3 + x2", 5, 2)
    assert a == b
    assert parse_poly("-x1", 5, 2) == parse_poly("4*x1", 5, 2)
    assert parse_poly("x1*x1", 5, 2) == parse_poly("x1^2", 5, 2)
    assert parse_poly("[1,2]*x1", 5, 2, 2).coeff((1, 0)).rep == (1, 2)


@pytest.mark.parametrize("text,pos", [("", 0), ("x1 +", 4), ("x3", 0), ("2*", 2), ("x1 $ x2", 3), ("[1,2]x1", 0)])
def test_parse_errors(text, pos):
    with pytest.raises(ParseError) as exc:
        parse_poly(text, 5, 2)
    assert exc.value.position == pos


def test_format_canonical():
    assert format_poly(parse_poly("x2 + 2*x1 + 1", 5, 2)) == "1 + 2*x1 + x2"
    assert format_poly(TruncPoly.zero(field_create(5), 2)) == "0"
    assert format_poly(parse_poly("[0,1]*x1 + 3", 5, 2, 2)) == "3 + [0,1]*x1"


@given(st.integers(0, 2**32 - 1), st.sampled_from([(5, 1, 2), (5, 2, 2), (7, 1, 2), (5, 1, 4)]))
def test_parse_format_roundtrip(seed, case):
    p, m, n = case
    ctx = field_create(p, m)
    f = TruncPoly.random(ctx, n, np.random.default_rng(seed))
    text = format_poly(f)
    assert parse_poly(text, p, n, m) == f
    assert format_poly(parse_poly(text, p, n, m)) == text


def test_run_xi(capsys):
    assert run(["xi", "--p", "5", "--r", "1", "--f", "x1*x2"]) == 0
    assert capsys.readouterr().out.strip() == "xi = (4)"


def test_run_nilpotent(capsys):
    assert run(["nilpotent", "--p", "5", "--r", "1", "--f", "x1^2"]) == 0
    assert capsys.readouterr().out.strip() == "nilpotent: true"


def test_run_simple_commands(capsys):
    assert run(["delta", "--coeff=-x1", "--coeff", "x2"]) == 0
    assert "x1*x2" in capsys.readouterr().out
    assert run(["lift", "--images", "2*x1"]) == 0
    assert "alpha = 2" in capsys.readouterr().out
    assert run(["beta", "--coeff", "1+x1", "--format", "json", "--out", "-"]) == 0
    assert json.loads(capsys.readouterr().out)["beta"] == ["4*x1", "1 + x2"]
    assert run(["charpoly", "--f", "x1*x2"]) == 0
    assert "t^25 + 4*t^5" in capsys.readouterr().out


def test_run_usage_errors(capsys):
    assert run(["xi", "--f", "x1 +"]) == 2
    assert "grammar" in capsys.readouterr().err
    assert run(["bogus"]) == 2
    assert run(["xi", "--p", "4", "--f", "x1"]) == 2
    assert run(["xi"]) == 2
    assert run(["verify", "--suite", "nope"]) == 2
    assert run(["xi", "--f", "x1^4*x2^4"]) == 2


def test_run_verify_exit_codes(tmp_path, monkeypatch):
    monkeypatch.setenv("HAMLIE_OUT_DIR", str(tmp_path))
    assert run(["verify", "--suite", "pmap,delta", "--samples", "3", "--format", "json"]) == 0
    out = tmp_path / "verify-p5-r1-m1-s0.json"
    rep = json.loads(out.read_text())
    assert rep["pass"] and [c["name"] for c in rep["checks"]] == ["pmap.pmap_compatible", "delta.delta_section"]
    assert run(["verify", "--suite", "thm43", "--samples", "2", "--fault", "flip",
                "--out", str(tmp_path / "f.json"), "--format", "json"]) == 1
    assert not json.loads((tmp_path / "f.json").read_text())["pass"]


def test_run_density_json_and_csv(tmp_path, capsys):
    args = ["density", "--p", "5", "--r", "1", "--samples", "50", "--seed", "7"]
    assert run(args + ["--format", "json", "--out", str(tmp_path / "d.json")]) in (0, 1)
    d = json.loads((tmp_path / "d.json").read_text())
    assert d["command"] == "density" and d["seed"] == 7 and d["samples"] == 50
    capsys.readouterr()
    assert run(["torus", "--m", "2", "--format", "csv", "--out", "-"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "check,coefficient,exponents,i"


def test_warning_not_fatal(capsys):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert run(["xi", "--f", "x1^5 + x1*x2"]) == 0
    assert "warning" in capsys.readouterr().err
