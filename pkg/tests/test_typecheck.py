import pytest

from conftest import MOVE_MEMBERS_SRC, POLYMORPHISM_SRC, RVALUE_SRC, front
from minibmc import nodes as n
from minibmc.errors import NO_LOC, SourceLocation, TypeCheckError
from minibmc.typecheck import is_copy_ctor_of, is_move_ctor_of, typecheck


def test_implicit_members_synthesized():
    tp = front(MOVE_MEMBERS_SRC)
    ms = tp.classes["MyStruct"]
    ctors = [m for m in ms.methods if m.is_ctor]
    assert len(ctors) == 3  # default, copy, move; all implicit
    assert all(m.implicit for m in ctors)
    assert sum(1 for m in ctors if is_move_ctor_of(m.decl, "MyStruct")) == 1
    assert sum(1 for m in ctors if is_copy_ctor_of(m.decl, "MyStruct")) == 1


def test_move_ctor_has_fieldwise_body():
    tp = front(MOVE_MEMBERS_SRC)
    ms = tp.classes["MyStruct"]
    move = [m for m in ms.methods if is_move_ctor_of(m.decl, "MyStruct")][0]
    stmts = move.decl.body.stmts
    assert len(stmts) == 1
    assign = stmts[0]
    assert isinstance(assign.lhs, n.Member) and assign.lhs.name == "value"


def test_rvalue_reference_variable_type():
    tp = front(RVALUE_SRC)
    main = tp.entry
    decl = [s for s in main.body.stmts if isinstance(s, n.DeclStmt) and s.name == "rref"][0]
    assert decl.ty.kind == "rref"
    assert decl.ty.to.kind == "int" and decl.ty.to.width == 32


def test_rvalue_ref_cannot_bind_lvalue():
    with pytest.raises(TypeCheckError, match="rvalue reference"):
        front("int main() { int a = 1; int &&r = a; return 0; }")


def test_rvalue_ref_binds_move_and_temporaries():
    front("int main() { int a = 1; int &&r = std::move(a); return 0; }")
    front("int helper() { return 1; }\nint main() { int &&r = helper(); return 0; }")


def test_override_requires_base_virtual():
    src = """
class A { public: int f() { return 1; } };
class B : public A { public: int f() override { return 2; } };
int main() { return 0; }
"""
    with pytest.raises(TypeCheckError, match="override"):
        front(src)


def test_override_signature_mismatch():
    src = """
class A { public: virtual int f(int x) { return x; } };
class B : public A { public: int f() override { return 2; } };
int main() { return 0; }
"""
    with pytest.raises(TypeCheckError, match="override"):
        front(src)


def test_implicitly_virtual_without_keyword():
    src = """
class A { public: virtual int f() { return 1; } };
class B : public A { public: int f() { return 2; } };
int main() { return 0; }
"""
    tp = front(src)
    b_f = [m for m in tp.classes["B"].methods if m.name == "f"][0]
    assert b_f.is_virtual


def test_unresolved_name():
    with pytest.raises(TypeCheckError, match="unresolved name"):
        front("int main() { return missing; }")


def test_exactly_one_main_required():
    with pytest.raises(TypeCheckError, match="main"):
        front("int helper() { return 0; }")


def test_float_arithmetic_rejected_but_declarations_allowed():
    front("int main() { double d; return 0; }")
    with pytest.raises(TypeCheckError, match="floating-point"):
        front("int main() { double d; double e; int x = d + e; return 0; }")


def test_literal_width_check():
    front("int main() { int x = 12345678; return 0; }")
    with pytest.raises(TypeCheckError, match="does not fit"):
        front("int main() { int x = 300; return 0; }", width=8)


def test_diamond_hierarchy_rejected():
    src = """
class A { public: int x; };
class B : public A {};
class C : public A {};
class D : public B, public C {};
int main() { return 0; }
"""
    with pytest.raises(TypeCheckError, match="repeated base"):
        front(src)


def test_inheritance_cycle_rejected():
    # a cycle requires forward references, so it only arises with self-inheritance
    with pytest.raises(TypeCheckError):
        front("class A : public A {};\nint main() { return 0; }")


def test_typecheck_is_idempotent():
    tp1 = front(POLYMORPHISM_SRC)
    tp2 = typecheck(tp1.program, tp1.int_width)
    assert list(tp2.classes) == list(tp1.classes)
    for name in tp1.classes:
        m1 = [(m.name, m.is_virtual, m.implicit) for m in tp1.classes[name].methods]
        m2 = [(m.name, m.is_virtual, m.implicit) for m in tp2.classes[name].methods]
        assert m1 == m2


def test_single_implicit_default_ctor_for_virtual_classes():
    tp = front(POLYMORPHISM_SRC)
    for cls in ("Bird", "Penguin"):
        defaults = [m for m in tp.classes[cls].methods
                    if m.is_ctor and not m.signature.params]
        assert len(defaults) == 1
        assert defaults[0].implicit


def test_every_node_carries_a_location():
    tp = front(POLYMORPHISM_SRC)
    seen = set()

    def walk(node):
        if id(node) in seen:
            return
        seen.add(id(node))
        assert isinstance(node.loc, SourceLocation)
        for value in node.__dict__.values():
            if isinstance(value, n.Node):
                walk(value)
            elif isinstance(value, tuple):
                for item in value:
                    if isinstance(item, n.Node):
                        walk(item)

    walk(tp.program)
