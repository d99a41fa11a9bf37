import shutil
import subprocess

import pytest

from conftest import corpus_files, to_bundle
from minibmc.driver import RunOptions, parse_directives, apply_flags
from minibmc.solver import terms as T
from minibmc.solver.core import Formula, solve
from minibmc.solver.encode import encode
from minibmc.solver.smt2 import emit_smt2


def sample_formula():
    x = T.bv_var("x!1!1", 8)
    flag = T.bool_var("g!1!1")
    constraints = [T.eq(x, T.bv_const(8, 5)), T.eq(flag, T.TRUE)]
    goal = T.and_(flag, T.ne(x, T.bv_const(8, 5)))
    return Formula(constraints, goal)


def test_smt2_shape():
    text = emit_smt2(sample_formula())
    lines = text.splitlines()
    assert lines[0] == "(set-logic QF_BV)"
    assert "(declare-fun |x!1!1| () (_ BitVec 8))" in lines
    assert "(declare-fun |g!1!1| () Bool)" in lines
    assert lines[-2] == "(check-sat)"
    assert lines[-1] == "(get-model)"
    assert text.count("(assert ") == 2  # one for constraints, one for the goal
    assert text.count("(") == text.count(")")


def test_empty_goal_asserts_false():
    text = emit_smt2(Formula([], T.FALSE))
    assert "(assert false)" in text


def test_smt2_is_byte_stable():
    a = emit_smt2(sample_formula())
    b = emit_smt2(sample_formula())
    assert a == b


def test_bundle_encoding_round_trip():
    bundle = to_bundle("int main() { int x = 3; assert(x == 3); return 0; }")
    text = emit_smt2(encode(bundle))
    assert "(set-logic QF_BV)" in text
    assert "(check-sat)" in text


def find_external_solver():
    for name, args in (("z3", ["-in"]), ("cvc5", ["--lang", "smt2"]),
                       ("cvc4", ["--lang", "smt2"]), ("boolector", ["--smt2"]),
                       ("bitwuzla", []), ("mathsat", []), ("yices-smt2", [])):
        exe = shutil.which(name)
        if exe:
            return name, exe, args
    return None


EXTERNAL = find_external_solver()


@pytest.mark.skipif(EXTERNAL is None, reason="no SMT-LIB2 solver on PATH")
@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
def test_external_solver_agrees_with_builtin(path):
    """Environment-conditional cross-check of the SMT-LIB2 emission."""
    source = path.read_text(encoding="utf-8")
    case = parse_directives(source, path)
    if case.expected_status == "ERROR":
        pytest.skip("front-end error case")
    opts = apply_flags(RunOptions(), case.flags)
    bundle = to_bundle(source, str(path), unwind=opts.unwind,
                       memory_leak_check=opts.memory_leak_check,
                       unwinding_assertions=opts.unwinding_assertions)
    formula = encode(bundle)
    builtin = "sat" if solve(formula) is not None else "unsat"
    name, exe, args = EXTERNAL
    text = emit_smt2(formula).replace("(get-model)", "")
    proc = subprocess.run([exe, *args], input=text, capture_output=True,
                          text=True, timeout=120)
    answer = proc.stdout.strip().splitlines()
    assert answer and answer[0] in ("sat", "unsat")
    assert answer[0] == builtin
