import pytest

from conftest import (
    DANGLING_SRC, EXCEPTION_ORDER_SRC, MOVE_MEMBERS_SRC, POLYMORPHISM_SRC,
    RVALUE_SRC, corpus_files, to_goto,
)
from minibmc.gotoprog import VirtualCallee, emit_goto_text
from minibmc.parser import parse_source


def test_dispatch_lowering_shape():
    prog = to_goto(POLYMORPHISM_SRC)
    main = prog.functions["main"]
    kinds = [i.kind for i in main.instrs]
    # NEW + ctor, pointer assign, three-instruction dispatch, delete, return
    assert kinds == ["DECL", "DECL", "NEW", "FUNCTION_CALL", "ASSIGN",
                     "DECL", "FUNCTION_CALL", "ASSERT", "DELETE", "RETURN",
                     "END_FUNCTION"]
    dispatch = main.instrs[6]
    assert isinstance(dispatch.callee, VirtualCallee)
    assert dispatch.callee.path_root == "Bird"
    assert dispatch.lhs_var.startswith("return_value")
    assert main.instrs[7].property_class == "assertion"


def test_thunk_contains_exactly_one_call():
    prog = to_goto(POLYMORPHISM_SRC)
    thunk = prog.functions["thunk::Penguin::doit(Bird*)"]
    calls = [i for i in thunk.instrs if i.kind == "FUNCTION_CALL"]
    assert len(calls) == 1
    assert calls[0].callee.name == "Penguin::doit"
    text = emit_goto_text(prog)
    assert "Penguin::doit((Penguin*)this)" in text


def test_exception_lowering_bracket_shape():
    prog = to_goto(EXCEPTION_ORDER_SRC)
    main = prog.functions["main"]
    kinds = [i.kind for i in main.instrs]
    assert kinds[0] == "CATCH_BEGIN"
    handlers = main.instrs[0].handlers
    assert [h.tag for h in handlers] == ["tag-Base", "tag-Derived"]
    throw = [i for i in main.instrs if i.kind == "THROW"][0]
    assert throw.tags == ("tag-Derived", "tag-Base")
    assert kinds.count("CATCH_END") == 1
    text = emit_goto_text(prog)
    assert "CATCH_BEGIN: tag-Base->1, tag-Derived->2" in text
    assert text.count("GOTO 3") == 2  # after the try body and the first handler
    assert "THROW: tag-Derived, tag-Base: tmp" in text


def test_rvalue_reference_lowering_text():
    text = emit_goto_text(to_goto(RVALUE_SRC))
    assert "FUNCTION_CALL: return_value = move(&a)" in text
    assert "ASSIGN: rref = return_value" in text
    assert "*rref == 10" in text
    assert "ASSIGN: *rref = 5" in text


def test_move_member_lowering_text():
    text = emit_goto_text(to_goto(MOVE_MEMBERS_SRC))
    assert "FUNCTION_CALL: return_value = move(&a)" in text
    assert "FUNCTION_CALL: MyStruct(&b, return_value)" in text
    assert "a = { .value=10 }" in text


def test_empty_main_lowering():
    text = emit_goto_text(to_goto("int main() {}"))
    main_block = text.split("main:")[1].split("\n\n")[0]
    lines = [l.strip() for l in main_block.strip().splitlines()]
    assert lines == ["RETURN: 0", "END_FUNCTION"]


def test_dangling_pointer_lowering_is_dispatch_free():
    prog = to_goto(DANGLING_SRC)
    text = emit_goto_text(prog)
    assert "DELETE: foo" in text
    assert "FUNCTION_CALL: Inc(foo)" in text  # Inc is not virtual
    main = prog.functions["main"]
    assert not any(isinstance(i.callee, VirtualCallee)
                   for i in main.instrs if i.kind == "FUNCTION_CALL")


def test_catch_brackets_nest_properly_everywhere():
    src = """
int main() {
  try {
    try { throw 1; } catch (int a) { }
  } catch (...) { }
  return 0;
}
"""
    prog = to_goto(src)
    for fn in prog.functions.values():
        depth = 0
        for ins in fn.instrs:
            if ins.kind == "CATCH_BEGIN":
                depth += 1
            elif ins.kind == "CATCH_END":
                depth -= 1
            assert depth >= 0
        assert depth == 0


def test_throw_tag_count_matches_base_chain():
    src = """
struct A {};
struct B : A {};
struct C : B {};
int main() {
  try { throw C(); } catch (...) { return 0; }
  return 1;
}
"""
    prog = to_goto(src)
    throw = [i for i in prog.functions["main"].instrs if i.kind == "THROW"][0]
    assert throw.tags == ("tag-C", "tag-B", "tag-A")


def test_throw_spec_lowered_as_first_instruction():
    src = """
void f() throw(int) { throw 1; }
int main() {
  try { f(); } catch (int e) { return 0; }
  return 1;
}
"""
    prog = to_goto(src)
    f = prog.functions["f"]
    assert f.instrs[0].kind == "THROW_DECL"
    assert f.instrs[0].spec.kind == "dynamic"


def test_every_assert_has_comment_and_location():
    for path in corpus_files():
        try:
            prog = to_goto(path.read_text(encoding="utf-8"), str(path))
        except Exception:
            continue  # front-end error corpus cases
        for fn in prog.functions.values():
            for ins in fn.instrs:
                if ins.kind == "ASSERT":
                    assert ins.comment
                    assert ins.loc.line >= 1 and ins.loc.column >= 1


def test_lowering_is_total_on_corpus():
    lowered = 0
    for path in corpus_files():
        try:
            to_goto(path.read_text(encoding="utf-8"), str(path))
            lowered += 1
        except Exception as ex:
            from minibmc.errors import MiniCxxError
            assert isinstance(ex, MiniCxxError), f"{path}: {ex}"
    assert lowered > 40


def test_callees_exist_including_thunks():
    for source in (POLYMORPHISM_SRC, DANGLING_SRC, MOVE_MEMBERS_SRC):
        prog = to_goto(source)
        for fn in prog.functions.values():
            for ins in fn.instrs:
                if ins.kind != "FUNCTION_CALL":
                    continue
                if isinstance(ins.callee, VirtualCallee):
                    for _, target in ins.callee.candidates:
                        assert target in prog.functions
                else:
                    assert ins.callee.name in prog.functions
