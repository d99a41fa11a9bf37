from __future__ import annotations

from pathlib import Path

import pytest

from minibmc.gotoprog import GotoProgram
from minibmc.layout import build_object_models
from minibmc.lower import lower
from minibmc.parser import parse_source
from minibmc.symex import SymexOptions, symex
from minibmc.templates import instantiate_program
from minibmc.typecheck import typecheck

REPO_ROOT = Path(__file__).resolve().parent.parent
CORPUS_DIR = REPO_ROOT / "corpus"


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS_DIR


def corpus_files() -> list[Path]:
    return sorted(CORPUS_DIR.rglob("*.cpp"))


def front(source: str, filename: str = "test.cpp", width: int = 32):
    """lex/parse/instantiate/typecheck."""
    program, _ = instantiate_program(parse_source(source, filename, width), int_width=width)
    return typecheck(program, width)


def to_goto(source: str, filename: str = "test.cpp") -> GotoProgram:
    tp = front(source, filename)
    return lower(tp, build_object_models(tp))


def to_bundle(source: str, filename: str = "test.cpp", **kw):
    tp = front(source, filename)
    layouts = build_object_models(tp)
    prog = lower(tp, layouts)
    return symex(prog, tp, layouts, SymexOptions(**kw))


POLYMORPHISM_SRC = """\
class Bird {
  public:
  virtual int doit(void) { return 21; }
};

class Penguin: public Bird {
  public:
  int doit(void) override { return 42; }
};

int main() {
  Bird *p = new Penguin();
  assert(p->doit() == 42);
  delete p;
  return 0;
}
"""

FRIEND_TEMPLATE_SRC = """\
#include <cassert>
template <int N> struct X
{
  template <int M>
  friend int foo(X const &)
  {
    return N * 10000 + M;
  }
};
X<1234> bring;

int main() {
  assert(
   foo<5678> (bring)
    !=12345678);
}
"""

DANGLING_SRC = """\
class Foo {
  public:
    Foo() {value = 0;};
    void Inc() {value++;};
  private:
    int value;
};

int main() {
  Foo *foo = new Foo();
  delete foo;
  foo->Inc();
  return 0;
}
"""

RVALUE_SRC = """\
#include <cassert>
#include <utility>
int main() {
    int a = 10;
    int &&rref = std::move(a);
    assert(rref == 10);
    rref = 5;
    assert(rref == 5);
    return 0;
}
"""

MOVE_MEMBERS_SRC = """\
#include <cassert>
#include <utility>
struct MyStruct {
  int value;
};

int main() {
  MyStruct a{10};
  MyStruct b(std::move(a));
  assert(b.value == 10);
}
"""

EXCEPTION_ORDER_SRC = """\
#include <cassert>
struct Base {};
struct Derived : Base{};

int main() {
  try {
    throw Derived();
  }
  catch(Base) {}
  catch(Derived) {assert(0);}
  return 0;
}
"""
