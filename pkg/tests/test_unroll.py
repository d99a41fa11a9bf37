"""The syntactic loop unroller: back-edge removal, relabeling, cut points."""

from conftest import front, to_goto
from minibmc.layout import build_object_models
from minibmc.lower import lower
from minibmc.symex import SymexEngine, SymexOptions


def unrolled_main(source, **kw):
    tp = front(source)
    layouts = build_object_models(tp)
    prog = lower(tp, layouts)
    engine = SymexEngine(prog, tp, layouts, SymexOptions(**kw))
    return engine.unroll(prog.functions["main"].instrs)


def count(instrs, kind):
    return sum(1 for i in instrs if i.kind == kind)


def has_back_edge(instrs):
    label_at = {lbl: i for i, ins in enumerate(instrs) for lbl in ins.labels}
    return any(ins.kind == "GOTO" and label_at.get(ins.target, 1 << 30) <= i
               for i, ins in enumerate(instrs))


def test_unrolled_program_is_acyclic():
    src = "int main() { int i = 0; while (i < 9) { i = i + 1; } return 0; }"
    out = unrolled_main(src, unwind=4)
    assert not has_back_edge(out)


def test_body_copied_k_times_with_final_check():
    src = "int main() { int i = 0; while (i < 9) { i = i + 1; } return 0; }"
    for k in (1, 3, 7):
        out = unrolled_main(src, unwind=k)
        # one body assignment per unrolling, plus the i = 0 initialisation
        assigns = count(out, "ASSIGN")
        assert assigns == k + 1
        # k head checks inside the copies plus the final cut check
        assert count(out, "GOTO") == k + 1
        assert count(out, "ASSUME") == 1


def test_unwinding_assertion_inserted_before_cut():
    src = "int main() { int i = 0; while (i < 9) { i = i + 1; } return 0; }"
    out = unrolled_main(src, unwind=2, unwinding_assertions=True)
    kinds = [i.kind for i in out]
    cut = kinds.index("ASSUME")
    assert kinds[cut - 1] == "ASSERT"
    assert out[cut - 1].property_class == "unwinding assertion"


def test_labels_remain_unique_after_unrolling():
    src = """
int main() {
  for (int i = 0; i < 2; i++) {
    for (int j = 0; j < 2; j++) {
      if (i == j) { int k = 0; }
    }
  }
  return 0;
}
"""
    out = unrolled_main(src, unwind=3)
    seen = set()
    for ins in out:
        for lbl in ins.labels:
            assert lbl not in seen
            seen.add(lbl)
    assert not has_back_edge(out)


def test_nested_loops_multiply():
    src = """
int main() {
  int total = 0;
  for (int i = 0; i < 2; i++) {
    for (int j = 0; j < 2; j++) {
      total = total + 1;
    }
  }
  return 0;
}
"""
    out2 = unrolled_main(src, unwind=2)
    out3 = unrolled_main(src, unwind=3)
    # total = total + 1 appears k*k times (plus i/j increments and inits)
    bodies2 = sum(1 for i in out2 if i.kind == "ASSIGN")
    bodies3 = sum(1 for i in out3 if i.kind == "ASSIGN")
    assert bodies3 > bodies2


def test_catch_handlers_relabelled_inside_loops():
    src = """
int main() {
  for (int i = 0; i < 2; i++) {
    try { throw i; } catch (int e) { }
  }
  return 0;
}
"""
    out = unrolled_main(src, unwind=2)
    label_at = {lbl: i for i, ins in enumerate(out) for lbl in ins.labels}
    catches = [ins for ins in out if ins.kind == "CATCH_BEGIN"]
    assert len(catches) == 2  # one per unrolled iteration
    seen_labels = set()
    for ins in catches:
        for h in ins.handlers:
            assert h.label in label_at, "handler target must exist"
            assert h.label not in seen_labels, "handler targets must be distinct"
            seen_labels.add(h.label)


def test_goto_targets_stay_in_function():
    src = """
int main() {
  int x = 0;
  while (x < 3) {
    if (x == 1) { x = x + 2; } else { x = x + 1; }
  }
  return 0;
}
"""
    out = unrolled_main(src, unwind=4)
    label_at = {lbl: i for i, ins in enumerate(out) for lbl in ins.labels}
    for ins in out:
        if ins.kind == "GOTO":
            assert ins.target in label_at
