import random
import subprocess
import sys

import pytest

from conftest import CORPUS_DIR, DANGLING_SRC, FRIEND_TEMPLATE_SRC, corpus_files
from minibmc.cli import main as cli_main
from minibmc.driver import (
    RunOptions, Verdict, apply_flags, format_verdict, parse_directives,
    run_corpus, verify_file, verify_source,
)


def test_failed_block_format_exact():
    verdict = verify_source(FRIEND_TEMPLATE_SRC, "tmp2.cpp")
    assert verdict.status == "FAILED"
    text = format_verdict(verdict)
    lines = text.splitlines()
    assert lines[0] == "Violated property:"
    assert lines[1].startswith("  file tmp2.cpp line ")
    assert "function main" in lines[1]
    assert lines[2] == "  assertion"
    assert "  foo<5678>(bring)!=12345678" in lines
    assert "  return_value!=12345678" in lines
    assert lines[-2] == ""
    assert lines[-1] == "VERIFICATION FAILED"


def test_successful_is_single_line():
    verdict = verify_source("int main() { return 0; }", "ok.cpp")
    assert format_verdict(verdict) == "VERIFICATION SUCCESSFUL\n"


def test_dangling_pointer_report_cites_inc():
    verdict = verify_source(DANGLING_SRC, "main6.cpp")
    assert verdict.status == "FAILED"
    assert verdict.violated.property_class == \
        "dereference failure: invalidated dynamic object"
    assert verdict.violated.loc.function == "Inc"
    text = format_verdict(verdict)
    assert "function Inc" in text
    assert "dereference failure: invalidated dynamic object" in text


def test_first_violation_in_program_order():
    verdict = verify_source("""
int main() {
  int x = 1;
  assert(x == 2);
  assert(x == 3);
  return 0;
}
""", "two.cpp")
    assert verdict.status == "FAILED"
    assert verdict.violated.condition == "x==2"


def test_error_verdict_for_unreadable_file(tmp_path):
    verdict = verify_file(tmp_path / "missing.cpp")
    assert verdict.status == "ERROR"
    assert verdict.exit_code == 2


def test_verify_is_deterministic_byte_identical():
    for path in (CORPUS_DIR / "showcase" / "friend_template.cpp",
                 CORPUS_DIR / "showcase" / "override_dispatch.cpp"):
        a = format_verdict(verify_file(path))
        b = format_verdict(verify_file(path))
        assert a == b


def test_exit_codes_via_cli(capsys):
    ok = cli_main([str(CORPUS_DIR / "showcase" / "override_dispatch.cpp")])
    assert ok == 0
    assert capsys.readouterr().out == "VERIFICATION SUCCESSFUL\n"
    bad = cli_main([str(CORPUS_DIR / "showcase" / "friend_template.cpp")])
    assert bad == 1
    assert "VERIFICATION FAILED" in capsys.readouterr().out
    err = cli_main([str(CORPUS_DIR / "errors" / "unsupported_header.cpp")])
    assert err == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "unsupported header" in captured.err


def test_cli_show_goto_prints_and_verifies(capsys):
    code = cli_main([str(CORPUS_DIR / "showcase" / "rvalue_reference.cpp"),
                     "--show-goto"])
    out = capsys.readouterr().out
    assert code == 0
    assert "rref = return_value" in out
    assert "*rref == 10" in out
    assert out.rstrip().endswith("VERIFICATION SUCCESSFUL")


def test_cli_solver_none_gives_no_verdict(capsys):
    code = cli_main([str(CORPUS_DIR / "showcase" / "override_dispatch.cpp"),
                     "--solver", "none", "--show-instances"])
    out = capsys.readouterr().out
    assert code == 0
    assert "VERIFICATION" not in out


def test_emit_smt2_writes_stable_file(tmp_path, capsys):
    target = tmp_path / "out.smt2"
    code = cli_main([str(CORPUS_DIR / "showcase" / "override_dispatch.cpp"),
                     "--emit-smt2", str(target)])
    assert code == 0
    first = target.read_bytes()
    cli_main([str(CORPUS_DIR / "showcase" / "override_dispatch.cpp"),
              "--emit-smt2", str(target)])
    assert target.read_bytes() == first
    assert first.startswith(b"(set-logic QF_BV)")
    capsys.readouterr()


def test_directive_parsing():
    case = parse_directives(
        "// VERDICT: FAILED\n// PROPERTY: memory leak\n"
        "// FLAGS: --unwind 3 --memory-leak-check\nint main() {}\n",
        CORPUS_DIR / "x.cpp")
    assert case.expected_status == "FAILED"
    assert case.expected_property == "memory leak"
    opts = apply_flags(RunOptions(), case.flags)
    assert opts.unwind == 3 and opts.memory_leak_check


def test_directive_missing_verdict_is_harness_error(tmp_path):
    bad = tmp_path / "bad.cpp"
    bad.write_text("int main() { return 0; }\n", encoding="utf-8")
    summary = run_corpus(tmp_path)
    assert not summary.all_passed
    assert "harness error" in summary.text


def test_empty_corpus_warns_and_passes(tmp_path):
    summary = run_corpus(tmp_path)
    assert summary.total == 0
    assert summary.all_passed
    assert "warning" in summary.text
    assert "(100%)" in summary.text


def test_full_corpus_passes():
    summary = run_corpus(CORPUS_DIR)
    assert summary.all_passed, summary.text
    assert summary.total >= 50
    assert summary.text.rstrip().endswith("(100%)")


def test_corpus_run_is_byte_identical():
    a = run_corpus(CORPUS_DIR).text
    b = run_corpus(CORPUS_DIR).text
    assert a == b


def test_property_mismatch_fails_case(tmp_path):
    case = tmp_path / "wrong.cpp"
    case.write_text(
        "// VERDICT: FAILED\n// PROPERTY: operator mismatch\n"
        "int main() { int *p = new int(1); delete p; delete p; return 0; }\n",
        encoding="utf-8")
    summary = run_corpus(tmp_path)
    assert not summary.all_passed
    assert "expected property" in summary.text


def test_timeout_yields_error_verdict():
    verdict = verify_source("""
int main() {
  int total = 0;
  for (int a = 0; a < 50; a++) {
    for (int b = 0; b < 50; b++) {
      for (int c = 0; c < 50; c++) {
        total = total + a * b * c;
      }
    }
  }
  assert(total >= 0 || total < 0);
  return 0;
}
""", "slow.cpp", RunOptions(unwind=50, timeout=0.2))
    assert verdict.status == "ERROR"
    assert "timeout" in verdict.message


def test_parser_fuzzing_never_crashes():
    """Mutated corpus bytes always produce a verdict, never an exception."""
    rng = random.Random(1234)
    sources = [p.read_text(encoding="utf-8") for p in corpus_files()[:12]]
    alphabet = "{}()<>;,*&=+-!~ \nabz019"
    outcomes = set()
    for i in range(60):
        base = rng.choice(sources)
        chars = list(base)
        for _ in range(rng.randint(1, 6)):
            kind = rng.randrange(3)
            pos = rng.randrange(len(chars)) if chars else 0
            if kind == 0 and chars:
                chars[pos] = rng.choice(alphabet)
            elif kind == 1:
                chars.insert(pos, rng.choice(alphabet))
            elif chars:
                del chars[pos]
        verdict = verify_source("".join(chars), f"fuzz{i}.cpp",
                                RunOptions(timeout=10.0))
        outcomes.add(verdict.status)
        assert verdict.status in ("SUCCESSFUL", "FAILED", "ERROR")
    assert "ERROR" in outcomes  # mutations overwhelmingly break the syntax


def test_artifacts_are_byte_identical_across_runs():
    opts = RunOptions(show_goto=True, show_ssa=True, show_layout=True,
                      show_instances=True)
    path = CORPUS_DIR / "showcase" / "friend_template.cpp"
    a = verify_file(path, opts)
    b = verify_file(path, opts)
    assert a.artifacts == b.artifacts
    assert set(a.artifacts) == {"goto", "ssa", "layout", "instances"}
    assert a.artifacts["instances"] == "X<1234>\nfoo<5678>\n"


def test_exit_code_contract_on_every_corpus_case():
    expected_codes = {"SUCCESSFUL": 0, "FAILED": 1, "ERROR": 2}
    for path in corpus_files():
        case = parse_directives(path.read_text(encoding="utf-8"), path)
        verdict = verify_file(path, apply_flags(RunOptions(), case.flags))
        assert verdict.exit_code == expected_codes[case.expected_status], path


def test_cli_rejects_missing_corpus_directory(capsys):
    code = cli_main(["--corpus", "/no/such/dir"])
    assert code == 2
    assert "not a directory" in capsys.readouterr().err
