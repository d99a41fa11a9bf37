import pytest

from conftest import FRIEND_TEMPLATE_SRC
from minibmc import nodes as n
from minibmc.cxxtypes import TypeRepr
from minibmc.errors import TemplateError
from minibmc.parser import parse_source
from minibmc.templates import collect_templates, instantiate, instantiate_program


def test_collect_friend_template_records_both():
    templates, residual = collect_templates(parse_source(FRIEND_TEMPLATE_SRC))
    names = [(t.decl.name, t.enclosing) for t in templates]
    assert names == [("X", ""), ("foo", "X")]
    assert [(p.kind, p.name) for p in templates[0].params] == [("int", "N")]
    assert [(p.kind, p.name) for p in templates[1].params] == [("int", "M")]
    # residual keeps only the non-template declarations
    assert not any(isinstance(d, n.TemplateDecl) for d in residual.decls)
    assert len(residual.decls) == 2  # the global and main


def test_collect_without_templates_is_identity():
    prog = parse_source("int main() { return 0; }")
    templates, residual = collect_templates(prog)
    assert templates == []
    assert residual == prog


def test_shadowing_parameter_rejected():
    src = """
template <int N> struct X
{
  template <int N>
  friend int foo(X const &) { return N; }
};
int main() { return 0; }
"""
    with pytest.raises(TemplateError, match="shadows"):
        collect_templates(parse_source(src))


def test_friend_instantiation_specializes_body():
    out, names = instantiate_program(parse_source(FRIEND_TEMPLATE_SRC))
    assert names == ["X<1234>", "foo<5678>"]
    foo = [d for d in out.decls
           if isinstance(d, n.MethodDecl) and d.name == "foo<5678>"][0]
    ret = foo.body.stmts[0]
    # return 1234 * 10000 + 5678
    assert isinstance(ret, n.ReturnStmt)
    expr = ret.value
    assert isinstance(expr, n.Binary) and expr.op == "+"
    assert expr.lhs == n.Binary("*", n.IntLit(1234), n.IntLit(10000))
    assert expr.rhs == n.IntLit(5678)


def test_deduction_identity():
    src = "template <typename T> T id(T x) { return x; }\nint main() { int y = id(5); return 0; }"
    out, names = instantiate_program(parse_source(src))
    assert names == ["id<int>"]
    inst = [d for d in out.decls if isinstance(d, n.MethodDecl) and d.name == "id<int>"][0]
    assert inst.params[0].ty.kind == "int"


def test_self_recursive_template_stamped_once():
    src = "template <int N> struct R { R<N> *p; };\nint main() { R<7> r; return 0; }"
    out, names = instantiate_program(parse_source(src))
    assert names.count("R<7>") == 1
    assert names == ["R<7>"]


def test_mutual_recursion_respects_depth_cap():
    src = """
template <int N> struct Grow { Grow<N> *p; };
int main() { Grow<1> g; return 0; }
"""
    out, names = instantiate_program(parse_source(src), depth_cap=4)
    assert names == ["Grow<1>"]


def test_unbounded_recursion_hits_cap():
    # each instance demands a distinct deeper instance
    src = """
template <typename T> struct Wrap { T inner; };
template <typename T> int depth(T x) {
  Wrap<T> w;
  return depth(w);
}
int main() { return depth(5); }
"""
    with pytest.raises(TemplateError, match="recursion limit"):
        instantiate_program(parse_source(src), depth_cap=16)


def test_instantiation_is_deterministic():
    a = instantiate_program(parse_source(FRIEND_TEMPLATE_SRC))[1]
    b = instantiate_program(parse_source(FRIEND_TEMPLATE_SRC))[1]
    assert a == b


def test_mangled_names_are_injective():
    src = """
template <typename T> T id(T x) { return x; }
template <int N> struct Box { int pad; };
int main() {
  int a = id(1);
  char c = id('x');
  Box<1> b1;
  Box<2> b2;
  return 0;
}
"""
    _, names = instantiate_program(parse_source(src))
    assert len(set(names)) == len(names)
    assert set(names) == {"id<int>", "id<char>", "Box<1>", "Box<2>"}


def test_no_template_constructs_remain():
    out, _ = instantiate_program(parse_source(FRIEND_TEMPLATE_SRC))

    def check_type(t):
        if isinstance(t, TypeRepr):
            assert t.kind != "tmpl"
            for child in (t.to, t.ret):
                if child is not None:
                    check_type(child)
            for p in t.params:
                check_type(p)

    def walk(node):
        assert not isinstance(node, (n.TemplateDecl, n.TemplateId))
        for value in getattr(node, "__dict__", {}).values():
            if isinstance(value, n.Node):
                walk(value)
            elif isinstance(value, TypeRepr):
                check_type(value)
            elif isinstance(value, tuple):
                for item in value:
                    if isinstance(item, n.Node):
                        walk(item)
                    elif isinstance(item, TypeRepr):
                        check_type(item)

    for d in out.decls:
        walk(d)


def test_argument_kind_mismatch():
    src = "template <int N> struct B { int pad; };\nint main() { B<int> b; return 0; }"
    with pytest.raises(TemplateError, match="expects a value"):
        instantiate_program(parse_source(src))


def test_unresolved_template_name():
    templates, residual = collect_templates(parse_source(FRIEND_TEMPLATE_SRC))
    # drop the class template: every use of it must now fail
    with pytest.raises(TemplateError, match="unresolved template"):
        instantiate([], residual)
