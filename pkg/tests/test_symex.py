import pytest

from conftest import POLYMORPHISM_SRC, corpus_files, to_bundle
from minibmc.solver import terms as T
from minibmc.solver.core import Formula, solve


def assertion_claims(bundle):
    return [c for c in bundle.claims if c.property_class == "assertion"]


def test_straight_line_program_single_assertion_claim():
    bundle = to_bundle(POLYMORPHISM_SRC, unwind=1)
    claims = assertion_claims(bundle)
    assert len(claims) == 1
    assert "42" in T.to_text(claims[0].cond) or claims[0].cond is T.TRUE


def test_infinite_loop_generates_no_claims():
    bundle = to_bundle("int main() { while (true) { } return 0; }", unwind=3)
    assert bundle.claims == []


def test_bounded_for_loop_claim_count():
    bundle = to_bundle(
        "int main() { for (int i = 0; i < 2; i++) { assert(i < 2); } return 0; }",
        unwind=2)
    claims = assertion_claims(bundle)
    assert len(claims) == 2
    for c in claims:
        model = solve(Formula(
            [T.eq(_var(eq), eq.rhs) for eq in bundle.equations],
            T.and_(c.guard, T.not_(c.cond))))
        assert model is None  # both unrolled assertions hold


def _var(eq):
    return T.bool_var(eq.lhs) if eq.rhs.is_bool else T.bv_var(eq.lhs, eq.rhs.width)


def test_ssa_single_assignment():
    for source in (POLYMORPHISM_SRC,
                   "int main() { int x = 1; if (x > 0) { x = 2; } else { x = 3; } "
                   "assert(x > 1); return 0; }"):
        bundle = to_bundle(source)
        lhs = [eq.lhs for eq in bundle.equations]
        assert len(lhs) == len(set(lhs))


def test_branch_merge_guard_partition():
    """After an if/else merge the guard is equivalent to the pre-branch guard."""
    bundle = to_bundle("""
int main() {
  int c;
  int x = 0;
  if (c > 0) { x = 1; } else { x = 2; }
  assert(x > 0);
  return 0;
}
""")
    merged = assertion_claims(bundle)[0].guard
    # claim guard must be a tautology: its negation is unsatisfiable
    assert solve(Formula([], T.not_(merged))) is None


def test_merged_value_is_branch_ite():
    bundle = to_bundle("""
int main() {
  int c;
  int x = 0;
  if (c > 0) { x = 1; } else { x = 2; }
  assert(x == 1 || x == 2);
  return 0;
}
""")
    claim = assertion_claims(bundle)[0]
    constraints = [T.eq(_var(eq), eq.rhs) for eq in bundle.equations]
    assert solve(Formula(constraints, T.and_(claim.guard, T.not_(claim.cond)))) is None


def test_no_allocation_means_no_memory_claims():
    bundle = to_bundle("""
int main() {
  int x = 1;
  if (x > 0) { x = x + 1; }
  assert(x == 2);
  return 0;
}
""", memory_leak_check=True)
    banned = {"invalid object in delete", "operator mismatch", "memory leak"}
    assert not [c for c in bundle.claims if c.property_class in banned]


def test_new_creates_valid_object():
    bundle = to_bundle("int main() { int *p = new int(3); assert(*p == 3); "
                       "delete p; return 0; }")
    classes = [c.property_class for c in bundle.claims]
    assert "invalid object in delete" in classes
    assert "operator mismatch" in classes
    for c in bundle.claims:
        constraints = [T.eq(_var(eq), eq.rhs) for eq in bundle.equations]
        assert solve(Formula(constraints, T.and_(c.guard, T.not_(c.cond)))) is None


def test_double_free_second_claim_violated():
    bundle = to_bundle("int main() { int *p = new int(1); delete p; delete p; "
                       "return 0; }")
    deletes = [c for c in bundle.claims if c.property_class == "invalid object in delete"]
    assert len(deletes) == 2
    constraints = [T.eq(_var(eq), eq.rhs) for eq in bundle.equations]
    first = solve(Formula(constraints, T.and_(deletes[0].guard, T.not_(deletes[0].cond))))
    second = solve(Formula(constraints, T.and_(deletes[1].guard, T.not_(deletes[1].cond))))
    assert first is None          # first delete sees a valid object
    assert second is not None     # second delete is a double free


def test_counterexample_path_length_is_bounded():
    from minibmc.solver.encode import encode
    from minibmc.solver.trace import extract_trace
    bundle = to_bundle("int main() { int x = 5; assert(x == 4); return 0; }")
    idx = next(i for i, c in enumerate(bundle.claims)
               if c.property_class == "assertion")
    model = solve(encode(bundle, idx))
    assert model is not None
    trace = extract_trace(model, bundle, bundle.claims[idx])
    assert trace[-1].kind == "violation"
    assert len(trace) <= len(bundle.equations) + 1


def test_zero_length_array_all_derefs_fail_bounds():
    bundle = to_bundle("int main() { int *p = new int[0]; int x = *p; "
                       "delete[] p; return 0; }")
    bounds = [c for c in bundle.claims
              if c.property_class == "dereference failure: array bounds violated"]
    assert bounds
    constraints = [T.eq(_var(eq), eq.rhs) for eq in bundle.equations]
    assert any(
        solve(Formula(constraints, T.and_(c.guard, T.not_(c.cond)))) is not None
        for c in bounds)


def test_new_object_bookkeeping():
    """White-box: the first allocation gets id 1, scalar kind, size one."""
    from conftest import front
    from minibmc.layout import build_object_models
    from minibmc.lower import lower
    from minibmc.symex import SymexEngine, SymexOptions
    tp = front("int main() { int *p = new int(3); delete p; return 0; }")
    layouts = build_object_models(tp)
    prog = lower(tp, layouts)
    engine = SymexEngine(prog, tp, layouts, SymexOptions())
    engine.run()
    heap_objs = [rec for rec in engine.heap.values() if rec.heap]
    assert len(heap_objs) == 1
    rec = heap_objs[0]
    assert rec.obj_id == 1
    assert rec.kind == "scalar"
    assert T.is_const(rec.size) and rec.size.value == 1
    # valid was set true at NEW and false at the matching DELETE
    assert rec.valid.term is T.FALSE


def test_narrow_int_widths_verify():
    from minibmc.driver import RunOptions, verify_source
    src = "int main() { int x = 100; assert(x + 27 == 127); return 0; }"
    for width in (8, 16, 32):
        v = verify_source(src, "w.cpp", RunOptions(int_width=width))
        assert v.status == "SUCCESSFUL", (width, v.message)
    wrap = "int main() { int x = 127; assert(x + 1 > 0); return 0; }"
    assert verify_source(wrap, "wrap.cpp", RunOptions(int_width=8)).status == "FAILED"
    assert verify_source(wrap, "wrap.cpp", RunOptions(int_width=32)).status == "SUCCESSFUL"


def test_contradiction_claim_fails_for_any_input():
    """assert(x != x) on a nondet x: the goal is true for every value."""
    from minibmc.driver import verify_source
    v = verify_source("int main() { int x; assert(x != x); return 0; }", "c.cpp")
    assert v.status == "FAILED"
    assert v.violated.condition == "x!=x"


def test_no_claims_encode_to_constant_false_goal():
    from minibmc.solver.encode import encode
    bundle = to_bundle("int main() { while (true) { } return 0; }", unwind=2)
    assert bundle.claims == []
    formula = encode(bundle)
    assert formula.goal is T.FALSE
    assert solve(formula) is None  # immediately UNSAT: SUCCESSFUL


def test_ssa_well_formedness_across_corpus():
    """Every SSA name read by an equation or claim is defined earlier or is
    a declared input (never assigned anywhere)."""
    from conftest import corpus_files
    from minibmc.driver import RunOptions, apply_flags, parse_directives
    checked = 0
    for path in corpus_files():
        source = path.read_text(encoding="utf-8")
        case = parse_directives(source, path)
        if case.expected_status == "ERROR":
            continue
        opts = apply_flags(RunOptions(), case.flags)
        bundle = to_bundle(source, str(path), unwind=opts.unwind,
                           memory_leak_check=opts.memory_leak_check,
                           unwinding_assertions=opts.unwinding_assertions)
        all_lhs = {eq.lhs for eq in bundle.equations}
        assert len(all_lhs) == len(bundle.equations)  # single assignment
        defined: set[str] = set()
        for eq in bundle.equations:
            for name in T.free_vars(eq.rhs):
                assert name not in all_lhs or name in defined, (path, eq.lhs, name)
            defined.add(eq.lhs)
        for c in bundle.claims:
            for term in (c.guard, c.cond):
                for name in T.free_vars(term):
                    assert name not in all_lhs or name in defined, (path, name)
        checked += 1
    assert checked > 50
