"""Untyped AST for MiniCxx; typecheck annotates nodes in place.

Structural equality ignores source locations and type annotations, so a
parse -> print -> parse round trip compares equal.  Template-dependent
types use TypeRepr kind "tmpl" (see `tmpl`); instantiation replaces them
with concrete class types.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from minibmc.cxxtypes import ThrowSpec, TypeRepr, tag_text_cv
from minibmc.errors import NO_LOC, SourceLocation


def tmpl(name: str, targs: tuple = ()) -> TypeRepr:
    """A not-yet-instantiated template type reference.

    targs items are TypeRepr, int (literal value argument) or str (name of
    an enclosing template parameter).  Empty targs inside the template's
    own body means the current instantiation.
    """
    return TypeRepr("tmpl", name=name, params=targs)


@dataclass
class Node:
    loc: SourceLocation = field(default=NO_LOC, compare=False, kw_only=True, repr=False)


@dataclass
class Expr(Node):
    ty: TypeRepr | None = field(default=None, compare=False, kw_only=True, repr=False)
    is_lvalue: bool = field(default=False, compare=False, kw_only=True, repr=False)


# --- expressions -----------------------------------------------------------

@dataclass
class IntLit(Expr):
    value: int = 0


@dataclass
class BoolLit(Expr):
    value: bool = False


@dataclass
class CharLit(Expr):
    value: str = "\0"


@dataclass
class NullLit(Expr):
    pass


@dataclass
class This(Expr):
    pass


@dataclass
class NameRef(Expr):
    name: str = ""
    # typecheck annotations
    binding: str = field(default="", compare=False, repr=False)  # local|param|global|field|func
    binding_class: str = field(default="", compare=False, repr=False)
    decl_ty: TypeRepr | None = field(default=None, compare=False, repr=False)


@dataclass
class TemplateId(Expr):
    """Explicit template arguments at a call site: foo<5678>."""

    name: str = ""
    args: tuple = ()  # TypeRepr | int | str (parameter name)


@dataclass
class Unary(Expr):
    op: str = ""  # - ! * &
    operand: Expr | None = None


@dataclass
class Binary(Expr):
    op: str = ""  # + - * == != < <= > >= && ||
    lhs: Expr | None = None
    rhs: Expr | None = None


@dataclass
class Call(Expr):
    callee: Expr | None = None  # NameRef | TemplateId | Member
    args: tuple = ()
    # typecheck annotations
    call_kind: str = field(default="", compare=False, repr=False)  # free|method|virtual|move
    call_target: str = field(default="", compare=False, repr=False)  # internal function name
    call_class: str = field(default="", compare=False, repr=False)   # static class of receiver


@dataclass
class Member(Expr):
    obj: Expr | None = None
    name: str = ""
    arrow: bool = False
    field_class: str = field(default="", compare=False, repr=False)  # declaring class


@dataclass
class Index(Expr):
    obj: Expr | None = None
    index: Expr | None = None


@dataclass
class NewExpr(Expr):
    elem_type: TypeRepr | None = None
    args: tuple | None = None   # None: no parens; (): empty parens
    count: Expr | None = None   # array form
    ctor_name: str = field(default="", compare=False, repr=False)


@dataclass
class Move(Expr):
    """std::move(e) builtin."""

    arg: Expr | None = None


@dataclass
class Cast(Expr):
    """Static view change, generated internally (thunks, conversions)."""

    target: TypeRepr | None = None
    arg: Expr | None = None


@dataclass
class StructLit(Expr):
    """Brace initializer resolved to fields: { .value=10 }."""

    class_name: str = ""
    inits: tuple = ()  # ((field name, Expr), ...)


@dataclass
class IncDec(Expr):
    op: str = "+"
    target: Expr | None = None
    prefix: bool = False


# --- statements ------------------------------------------------------------

@dataclass
class Stmt(Node):
    pass


@dataclass
class Block(Stmt):
    stmts: tuple = ()


@dataclass
class DeclStmt(Stmt):
    name: str = ""
    ty: TypeRepr | None = None
    init: tuple | Expr | None = None  # "=": Expr; "call"/"brace": tuple of Expr
    init_kind: str = ""               # "", "=", "call", "brace"
    ctor_name: str = field(default="", compare=False, repr=False)


@dataclass
class ExprStmt(Stmt):
    expr: Expr | None = None


@dataclass
class AssignStmt(Stmt):
    lhs: Expr | None = None
    rhs: Expr | None = None


@dataclass
class IfStmt(Stmt):
    cond: Expr | None = None
    then: Block | None = None
    els: Block | None = None


@dataclass
class WhileStmt(Stmt):
    cond: Expr | None = None
    body: Block | None = None


@dataclass
class ForStmt(Stmt):
    init: Stmt | None = None
    cond: Expr | None = None
    step: Stmt | None = None
    body: Block | None = None


@dataclass
class ReturnStmt(Stmt):
    value: Expr | None = None


@dataclass
class AssertStmt(Stmt):
    cond: Expr | None = None
    # source text of the condition, whitespace removed; derived metadata
    text: str = field(default="", compare=False)


@dataclass
class Handler(Node):
    htype: TypeRepr | None = None  # None = ellipsis
    var: str = ""
    body: Block | None = None


@dataclass
class TryStmt(Stmt):
    body: Block | None = None
    handlers: tuple = ()


@dataclass
class ThrowStmt(Stmt):
    value: Expr | None = None  # None = re-throw


@dataclass
class DeleteStmt(Stmt):
    target: Expr | None = None
    is_array: bool = False


# --- declarations ----------------------------------------------------------

@dataclass
class Param(Node):
    name: str = ""
    ty: TypeRepr | None = None


@dataclass
class MethodDecl(Node):
    name: str = ""
    params: tuple = ()
    ret: TypeRepr | None = None
    body: Block | None = None
    is_virtual: bool = False
    is_override: bool = False
    is_ctor: bool = False
    is_dtor: bool = False
    throw_spec: ThrowSpec | None = None
    defining_class: str = ""  # empty for free functions
    implicit: bool = field(default=False, compare=False)


@dataclass
class FieldDecl(Node):
    name: str = ""
    ty: TypeRepr | None = None


@dataclass
class ClassDecl(Node):
    name: str = ""
    bases: tuple = ()  # base class names, declaration order
    fields: tuple = ()
    methods: tuple = ()
    friend_templates: tuple = ()  # TemplateDecl, enclosing set to this class
    is_struct: bool = False
    origin_template: str = field(default="", compare=False)
    origin_args: tuple = field(default=(), compare=False)


@dataclass
class TParam(Node):
    kind: str = "type"  # "type" | "int"
    name: str = ""


@dataclass
class TemplateDecl(Node):
    params: tuple = ()
    decl: ClassDecl | MethodDecl | None = None
    enclosing: str = ""  # class template name for friend function templates


@dataclass
class GlobalDecl(Node):
    name: str = ""
    ty: TypeRepr | None = None
    init: Expr | None = None


@dataclass
class Program(Node):
    decls: tuple = ()  # ClassDecl | MethodDecl | GlobalDecl | TemplateDecl
    filename: str = field(default="", compare=False)


# --- pretty printer ---------------------------------------------------------

def type_text(t: TypeRepr) -> str:
    """Source-level spelling, including template-dependent types."""
    if t.kind == "tmpl":
        if not t.params:
            base = t.name
        else:
            base = f"{t.name}<{', '.join(_targ_text(a) for a in t.params)}>"
        return f"const {base}" if t.is_const else base
    if t.kind == "ptr":
        if t.to is not None and t.to.kind == "func":
            args = ", ".join(type_text(p) for p in t.to.params)
            return f"{type_text(t.to.ret)}(*)({args})"
        return f"{type_text(t.to)}*" + (" const" if t.is_const else "")
    if t.kind == "lref":
        return f"{type_text(t.to)}&"
    if t.kind == "rref":
        return f"{type_text(t.to)}&&"
    if t.kind == "array":
        n = "" if t.length is None else str(t.length)
        return f"{type_text(t.to)}[{n}]"
    if t.kind == "int":
        base = "int"
    elif t.kind == "func":
        args = ", ".join(type_text(p) for p in t.params)
        return f"{type_text(t.ret)}(*)({args})"
    else:
        base = tag_text_cv(t.strip_const())
    return f"const {base}" if t.is_const else base


def _targ_text(a) -> str:
    if isinstance(a, TypeRepr):
        return type_text(a)
    return str(a)


def expr_text(e: Expr, tight: bool = False) -> str:
    """Render an expression; tight mode drops all spaces (claim comments)."""
    sep = "" if tight else " "

    def rec(x: Expr) -> str:
        if isinstance(x, IntLit):
            return str(x.value)
        if isinstance(x, BoolLit):
            return "true" if x.value else "false"
        if isinstance(x, CharLit):
            c = {"\n": "\\n", "\t": "\\t", "\0": "\\0", "'": "\\'", "\\": "\\\\"}.get(x.value, x.value)
            return f"'{c}'"
        if isinstance(x, NullLit):
            return "nullptr"
        if isinstance(x, This):
            return "this"
        if isinstance(x, NameRef):
            return x.name
        if isinstance(x, TemplateId):
            return f"{x.name}<{', '.join(_targ_text(a) for a in x.args)}>"
        if isinstance(x, Unary):
            return f"{x.op}{_paren(x.operand, rec)}"
        if isinstance(x, Binary):
            return f"{_paren(x.lhs, rec)}{sep}{x.op}{sep}{_paren(x.rhs, rec)}"
        if isinstance(x, Call):
            args = ("," + sep).join(rec(a) for a in x.args)
            return f"{rec(x.callee)}({args})"
        if isinstance(x, Member):
            return f"{rec(x.obj)}{'->' if x.arrow else '.'}{x.name}"
        if isinstance(x, Index):
            return f"{rec(x.obj)}[{rec(x.index)}]"
        if isinstance(x, NewExpr):
            if x.count is not None:
                return f"new {type_text(x.elem_type)}[{rec(x.count)}]"
            if x.args is None:
                return f"new {type_text(x.elem_type)}"
            args = ("," + sep).join(rec(a) for a in x.args)
            return f"new {type_text(x.elem_type)}({args})"
        if isinstance(x, Move):
            return f"std::move({rec(x.arg)})"
        if isinstance(x, Cast):
            return f"({type_text(x.target)}){_paren(x.arg, rec)}"
        if isinstance(x, StructLit):
            inner = ", ".join(f".{n.split('::')[-1]}={rec(v)}" for n, v in x.inits)
            return "{ " + inner + " }"
        if isinstance(x, IncDec):
            op = x.op * 2
            return f"{op}{rec(x.target)}" if x.prefix else f"{rec(x.target)}{op}"
        raise ValueError(f"cannot render {type(x).__name__}")

    return rec(e)


def _paren(x: Expr, rec) -> str:
    if isinstance(x, (Binary,)):
        return f"({rec(x)})"
    return rec(x)


class _Printer:
    def __init__(self):
        self.lines: list[str] = []
        self.depth = 0

    def emit(self, text: str) -> None:
        self.lines.append("  " * self.depth + text)

    def stmt(self, s: Stmt) -> None:
        if isinstance(s, Block):
            self.emit("{")
            self.depth += 1
            for inner in s.stmts:
                self.stmt(inner)
            self.depth -= 1
            self.emit("}")
        elif isinstance(s, DeclStmt):
            if s.ty is not None and s.ty.kind == "array":
                length = "" if s.ty.length is None else str(s.ty.length)
                base = f"{type_text(s.ty.to)} {s.name}[{length}]"
            else:
                base = f"{type_text(s.ty)} {s.name}"
            if s.init_kind == "=":
                self.emit(f"{base} = {expr_text(s.init)};")
            elif s.init_kind == "call":
                args = ", ".join(expr_text(a) for a in s.init)
                self.emit(f"{base}({args});")
            elif s.init_kind == "brace":
                args = ", ".join(expr_text(a) for a in s.init)
                self.emit(f"{base}{{{args}}};")
            else:
                self.emit(f"{base};")
        elif isinstance(s, ExprStmt):
            self.emit(f"{expr_text(s.expr)};")
        elif isinstance(s, AssignStmt):
            self.emit(f"{expr_text(s.lhs)} = {expr_text(s.rhs)};")
        elif isinstance(s, IfStmt):
            self.emit(f"if ({expr_text(s.cond)})")
            self.stmt(s.then)
            if s.els is not None:
                self.emit("else")
                self.stmt(s.els)
        elif isinstance(s, WhileStmt):
            self.emit(f"while ({expr_text(s.cond)})")
            self.stmt(s.body)
        elif isinstance(s, ForStmt):
            init = self._inline_stmt(s.init)
            cond = expr_text(s.cond) if s.cond else ""
            step = self._inline_stmt(s.step)
            self.emit(f"for ({init}; {cond}; {step})")
            self.stmt(s.body)
        elif isinstance(s, ReturnStmt):
            self.emit("return;" if s.value is None else f"return {expr_text(s.value)};")
        elif isinstance(s, AssertStmt):
            self.emit(f"assert({expr_text(s.cond)});")
        elif isinstance(s, TryStmt):
            self.emit("try")
            self.stmt(s.body)
            for h in s.handlers:
                if h.htype is None:
                    self.emit("catch (...)")
                else:
                    var = f" {h.var}" if h.var else ""
                    self.emit(f"catch ({type_text(h.htype)}{var})")
                self.stmt(h.body)
        elif isinstance(s, ThrowStmt):
            self.emit("throw;" if s.value is None else f"throw {expr_text(s.value)};")
        elif isinstance(s, DeleteStmt):
            kw = "delete[]" if s.is_array else "delete"
            self.emit(f"{kw} {expr_text(s.target)};")
        else:
            raise ValueError(f"cannot print {type(s).__name__}")

    def _inline_stmt(self, s: Stmt | None) -> str:
        if s is None:
            return ""
        sub = _Printer()
        sub.stmt(s)
        return sub.lines[0].strip().rstrip(";")

    def method(self, m: MethodDecl) -> None:
        parts = []
        if m.is_virtual:
            parts.append("virtual")
        if not (m.is_ctor or m.is_dtor):
            parts.append(type_text(m.ret))
        name = f"~{m.name[1:]}" if m.is_dtor else m.name
        params = ", ".join(
            f"{type_text(p.ty)} {p.name}".rstrip() for p in m.params)
        sig = f"{name}({params})"
        suffix = ""
        if m.is_override:
            suffix += " override"
        if m.throw_spec is not None:
            if m.throw_spec.kind == "noexcept":
                suffix += " noexcept"
            else:
                types = ", ".join(type_text(t) for t in m.throw_spec.types)
                suffix += f" throw({types})"
        self.emit(" ".join(parts + [sig]) + suffix)
        if m.body is not None:
            self.stmt(m.body)
        else:
            self.lines[-1] += ";"

    def decl(self, d) -> None:
        if isinstance(d, ClassDecl):
            kw = "struct" if d.is_struct else "class"
            bases = (" : " + ", ".join(f"public {b}" for b in d.bases)) if d.bases else ""
            self.emit(f"{kw} {d.name}{bases} {{")
            self.depth += 1
            if not d.is_struct:
                self.emit("public:")
            for f in d.fields:
                if f.ty is not None and f.ty.kind == "array":
                    length = "" if f.ty.length is None else str(f.ty.length)
                    self.emit(f"{type_text(f.ty.to)} {f.name}[{length}];")
                else:
                    self.emit(f"{type_text(f.ty)} {f.name};")
            for m in d.methods:
                if not m.implicit:
                    self.method(m)
            for ft in d.friend_templates:
                self.template(ft, friend=True)
            self.depth -= 1
            self.emit("};")
        elif isinstance(d, MethodDecl):
            self.method(d)
        elif isinstance(d, GlobalDecl):
            if d.ty is not None and d.ty.kind == "array":
                length = "" if d.ty.length is None else str(d.ty.length)
                self.emit(f"{type_text(d.ty.to)} {d.name}[{length}];")
            elif d.init is not None:
                self.emit(f"{type_text(d.ty)} {d.name} = {expr_text(d.init)};")
            else:
                self.emit(f"{type_text(d.ty)} {d.name};")
        elif isinstance(d, TemplateDecl):
            self.template(d)
        else:
            raise ValueError(f"cannot print {type(d).__name__}")

    def template(self, t: TemplateDecl, friend: bool = False) -> None:
        params = ", ".join(
            ("typename " if p.kind == "type" else "int ") + p.name for p in t.params)
        self.emit(f"template <{params}>")
        if friend:
            sub = _Printer()
            sub.depth = self.depth
            sub.method(t.decl)
            sub.lines[0] = sub.lines[0].replace("  " * self.depth, "  " * self.depth + "friend ", 1)
            self.lines.extend(sub.lines)
        else:
            self.decl(t.decl)


def program_text(p: Program) -> str:
    """Render a program back to MiniCxx source."""
    pr = _Printer()
    for d in p.decls:
        pr.decl(d)
    return "\n".join(pr.lines) + "\n"
