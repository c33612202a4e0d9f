"""Command-line behaviour: exit codes, traces, the REPL and the self-test."""
import io
import json
import re
import subprocess
import sys

import pytest

from gprover.checker import CheckConfig, check_file
from gprover.cli import EXIT_FAILED, EXIT_OK, EXIT_PARSE, Repl, main
from support import CORPUS


def path(name):
    return str(CORPUS / name)


def test_check_ok(capsys):
    assert main(["check", path("fresh.thm")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "ok" in out and "theorems certified" in out
    assert "\033[" not in out


def test_check_failure_exit_code(capsys):
    assert main(["check", path("inconsistent.thm")]) == EXIT_FAILED
    out = capsys.readouterr().out
    assert "FAIL" in out and "inconsistent.thm:3:" in out


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.thm"
    bad.write_text("Kind i type.\nType a j.\n")
    assert main(["check", str(bad)]) == EXIT_PARSE
    assert f"{bad}:2:" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path, capsys):
    assert main(["check", str(tmp_path / "nope.thm")]) == EXIT_PARSE


def test_definition_error_exit_code(tmp_path):
    bad = tmp_path / "strat.thm"
    bad.write_text("Define p : prop by p := p => false.\n")
    assert main(["check", str(bad)]) == EXIT_PARSE


def test_json_trace(tmp_path, capsys):
    out = tmp_path / "traces"
    assert main(["check", path("spec.thm"), "--json-trace", str(out)]) == EXIT_OK
    files = sorted(p.name for p in out.iterdir())
    assert "spec_unique.json" in files
    data = json.loads((out / "spec_mono.json").read_text())
    assert data["theorem"] == "spec_mono"

    rules = data["rules"]
    # preorder with child counts: the whole list must decode to one tree
    pending = 1
    for r in rules:
        assert set(r) == {"tag", "params", "children"} and r["tag"]
        pending += r["children"] - 1
        assert pending >= 0
    assert pending == 0


def test_json_trace_names_with_several_files(tmp_path, capsys):
    assert main(["check", path("fresh.thm"), path("spec.thm"), "--json-trace", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "spec.spec_mono.json").exists()
    assert (tmp_path / "fresh.fig8.json").exists()


def test_show_translated(capsys):
    assert main(["check", path("stlc_uniq.thm"), "--show-translated"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "% member (inductive, level 1)" in out
    assert "|> cntx' _y1" in out


def test_translated_mode(capsys):
    assert main(["check", path("stlc_uniq.thm"), "--translated"]) == EXIT_OK


def test_selftest_small(capsys):
    assert main(["selftest", "--csnas-cases", "40", "--algebra-cases", "100"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 4 and all(l.startswith("PASS") for l in lines)


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "gprover", "check", path("fixpoints.thm")],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr


# ---------------------------------------------------------------- repl

FIG8 = ("Theorem fig8b : forall X1 X2, (nabla z, b z X1 X2) => "
        "exists z, fresh z (X1 :: X2 :: nil) /\\ b z X1 X2.\n")


def test_repl_session():
    repl, report = Repl.from_file(path("fresh.thm"))
    assert report.ok
    out = repl.feed(FIG8)
    assert "=====" in out
    out = repl.feed("intros. case H1. exists n0. split.")
    assert "other subgoal" in out
    assert "Error" in repl.feed("case H9.")
    repl.feed("undo.")
    repl.feed("split.")
    repl.feed("search 1. search 1.")
    assert repl.feed("Qed.") == "fig8b certified."
    assert "fig8b" in repl.certificates


def test_repl_partial_input_waits_for_period():
    repl, _ = Repl.from_file(path("fresh.thm"))
    assert repl.feed("Theorem t : forall X, fresh") == ""
    assert "=====" in repl.feed(" X nil => true.")
    assert "certified" in repl.feed("search.\nQed.")


def test_repl_abort_and_errors():
    repl, _ = Repl.from_file(path("fresh.thm"))
    assert "no theorem" in repl.feed("intros.")
    repl.feed("Theorem t : false.")
    assert "Error" in repl.feed("search.")
    assert repl.feed("abort.") == "Proof aborted."
    assert "already proved" in repl.feed("Theorem fig8 : true.")


def test_repl_stdin(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(sys, "stdin", io.StringIO("Theorem t : true.\nsearch.\nQed.\n"))
    assert main(["repl", path("fixpoints.thm"), "--json-trace", str(tmp_path)]) == EXIT_OK
    assert "t certified." in capsys.readouterr().out
    assert (tmp_path / "t.json").exists()


def test_batch_and_repl_certificates_agree():
    """Replaying a file's scripts interactively yields the same rule trees."""
    from gprover.parser import parse
    src = (CORPUS / "spec.thm").read_text()
    sf = parse(src)
    batch = {r.name: r.certificate.to_json() for r in check_file(path("spec.thm")).results}
    repl = Repl(sf, CheckConfig())
    blocks = re.findall(r"^Theorem.*?^Qed\.", src, re.S | re.M)
    assert len(blocks) == len(sf.theorems)
    for block in blocks:
        assert "certified" in repl.feed(block)
    assert {k: c.to_json() for k, c in repl.certificates.items()} == batch


@pytest.mark.parametrize("flag", ["--no-color"])
def test_no_color_flag(flag, capsys):
    assert main(["check", path("fixpoints.thm"), flag]) == EXIT_OK
    assert "\033[" not in capsys.readouterr().out
