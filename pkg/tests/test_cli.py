from __future__ import annotations

import io
import json

import pytest

from kpsato.cli import RunConfig, load_config, main
from kpsato.errors import ConfigurationError
from kpsato.parsing import parse_laurent
from kpsato.psido import parse_operator
from kpsato.report import SCHEMA


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_commutator_prints_value():
    assert run("pdo", "comm", "d", "x") == (0, "1\n", "")


def test_kp_derivation_report():
    code, out, _ = run("kp", "derive-kp")
    assert code == 0
    assert out.rstrip().endswith("residual = 0")
    assert "(1): u1_y = u1'' + 2*u2'" in out


def test_kdv_report_flags_printed_coefficient():
    code, out, _ = run("kp", "derive-kdv")
    assert code == 0
    assert "4u_t = u''' + 12uu'" in out
    assert "7u'''" in out


def test_intersection_check():
    code, out, _ = run("lf2", "check-prop4", "--window", "20")
    assert code == 0
    assert "FAILED" not in out


def test_membership():
    code, out, _ = run("lf2", "member", "--ring", "B_C", "--monomial", "u^-2*t")
    assert code == 0 and "True" in out
    code, out, _ = run("lf2", "member", "--ring", "B_C", "--monomial", "u*t")
    assert "False" in out


def test_graded_index_with_negative_range():
    code, out, _ = run("lf2", "graded-index", "--ring", "B_C", "--levels", "-5..5")
    assert code == 0
    assert "level -5 (n' = 5): 6" in out


@pytest.mark.parametrize("argv", [
    ("pdo", "mul", "d^-1", "x"),
    ("pdo", "split", "d^2 + x + d^-1"),
    ("pdo", "pow", "d + x", "--n", "3"),
    ("pdo", "inv", "1 + x*d^-1"),
    ("sato", "image", "x^3*d^3"),
    ("sato", "lift", "z + 2*z^3"),
    ("sato", "dress", "span{1 + z} tail at -1 (mod z^10)", "--trunc-d", "4"),
    ("sato", "verify-thm1", "--n", "2"),
    ("kp", "field", "--n", "3"),
    ("kp", "eqs", "--n", "2", "--count", "2"),
    ("kp", "flow-jet", "--n", "2", "--order", "1", "--u", "x", "--u", "0", "--u", "0", "--u", "0"),
    ("gr", "index", "span{z} tail at 0"),
    ("gr", "bigcell", "span{1 + z} tail at -1"),
    ("gr", "detline", "span{1 + z} tail at -1", "--check"),
    ("kr1", "verify", "nodal-cubic"),
    ("kr1", "cohomology", "cuspidal-cubic"),
    ("kr1", "example", "nodal-cubic", "--check", "all"),
])
def test_commands_succeed(argv):
    code, out, err = run(*argv)
    assert code == 0, err
    assert out and not err


def test_printed_values_reparse():
    _, out, _ = run("pdo", "mul", "d^-1", "x", "--trunc-d", "4")
    assert parse_operator(out.strip(), depth=4) == parse_operator("x*d^-1 - d^-2", depth=4)
    _, out, _ = run("sato", "image", "x^2*d^2 + d^-1")
    assert parse_laurent(out.strip()) == parse_laurent("2 + z (mod z^12)")


def test_parse_errors_exit_2_with_position():
    code, _, err = run("pdo", "comm", "d", "x +")
    assert code == 2
    assert "position 3" in err
    assert "^" in err


def test_domain_errors_exit_2():
    assert run("pdo", "inv", "d")[0] == 2
    assert run("gr", "index", "span{z} tail at x")[0] == 2
    assert run("lf2", "member", "--ring", "nowhere", "--monomial", "u")[0] == 2
    assert run("pdo", "frobnicate", "d")[0] == 2


def test_failed_check_exits_1(tmp_path):
    data = tmp_path / "curve.json"
    data.write_text(json.dumps({"A": {"conditions": [{"derivative": [0, 1]}]}, "genus": 0}))
    code, out, _ = run("kr1", "example", "--data", str(data), "--check", "all")
    assert code == 1
    assert "[FAILED]" in out


def test_serialized_output_is_deterministic():
    a = run("--output", "serialized", "sato", "verify-thm1", "--seed", "4")[1]
    b = run("--output", "serialized", "sato", "verify-thm1", "--seed", "4")[1]
    assert a == b
    doc = json.loads(a)
    assert doc["schema"] == SCHEMA
    assert doc["config"]["seed"] == 4
    assert doc["report"]["ok"] is True


def test_serialized_errors():
    code, out, _ = run("--output", "serialized", "pdo", "comm", "d", "x +")
    assert code == 2
    assert json.loads(out)["error"]["kind"] == "ParseError"


def test_config_file(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"trunc_x": 5, "output_mode": "serialized"}))
    code, out, _ = run("pdo", "comm", "d", "x", "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["config"]["trunc_x"] == 5
    code, out, _ = run("pdo", "comm", "d", "x", "--config", str(cfg), "--trunc-x", "7")
    assert json.loads(out)["config"]["trunc_x"] == 7


def test_config_validation(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"bogus": 1}))
    assert run("pdo", "comm", "d", "x", "--config", str(bad))[0] == 2
    assert run("pdo", "comm", "d", "x", "--trunc-x", "1")[0] == 2
    with pytest.raises(ConfigurationError):
        load_config(None, {"trunc_d": 0})
    assert load_config(None, {}) == RunConfig()


def test_defaults():
    cfg = RunConfig()
    assert (cfg.trunc_x, cfg.trunc_d, cfg.trunc_z, cfg.window) == (8, 8, 12, 20)
