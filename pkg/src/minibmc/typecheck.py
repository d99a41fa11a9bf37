"""Type checking and class-hierarchy resolution for template-free programs.

Annotates every expression with its static type and value category,
synthesizes implicit default/copy/move constructors (and destructors when
a base declares one), validates `override`, and enforces the rvalue
reference binding rules.  Re-running on an already-checked program is the
identity.
"""

from __future__ import annotations

from dataclasses import dataclass

from minibmc import nodes as n
from minibmc.cxxtypes import (
    BOOL_T, CHAR_T, ThrowSpec, TypeRepr, VOID, class_t, func_t, int_t, lref,
    ptr, rref, tag_text_cv, types_equal,
)
from minibmc.errors import SourceLocation, TypeCheckError


@dataclass
class MethodInfo:
    name: str
    signature: TypeRepr                 # func kind
    defining_class: str                 # empty for free functions
    decl: n.MethodDecl
    is_virtual: bool = False
    is_override: bool = False
    is_ctor: bool = False
    is_dtor: bool = False
    implicit: bool = False

    @property
    def internal_name(self) -> str:
        """Unique GOTO-level name, e.g. MyStruct::MyStruct(MyStruct&&)."""
        if not self.defining_class:
            return self.name
        if self.is_ctor or self.is_dtor:
            args = ",".join(tag_text_cv(p) for p in self.signature.params)
            return f"{self.defining_class}::{self.name}({args})"
        return f"{self.defining_class}::{self.name}"


@dataclass
class ClassInfo:
    name: str
    bases: tuple[str, ...]
    fields: list[tuple[str, TypeRepr]]
    methods: list[MethodInfo]
    decl: n.ClassDecl
    is_template_instance: bool = False
    origin_template: str = ""
    origin_args: tuple = ()


@dataclass
class TypedProgram:
    classes: dict[str, ClassInfo]       # declaration order
    functions: dict[str, n.MethodDecl]  # free functions with bodies
    globals: list[n.GlobalDecl]
    entry: n.MethodDecl
    program: n.Program
    int_width: int = 32

    # --- hierarchy helpers -------------------------------------------------
    def base_chain(self, name: str) -> list[str]:
        """All transitive bases, breadth-first from the class, no duplicates."""
        out, queue = [], list(self.classes[name].bases)
        while queue:
            b = queue.pop(0)
            if b not in out:
                out.append(b)
                queue.extend(self.classes[b].bases)
        return out

    def is_base_of(self, base: str, derived: str) -> bool:
        return base in self.base_chain(derived)

    def all_fields(self, name: str) -> list[tuple[str, str, TypeRepr]]:
        """(declaring class, field name, type), bases first in base order."""
        out = []
        ci = self.classes[name]
        for b in ci.bases:
            out.extend(self.all_fields(b))
        out.extend((name, f, t) for f, t in ci.fields)
        return out

    def find_field(self, cls: str, fname: str) -> tuple[str, TypeRepr] | None:
        ci = self.classes[cls]
        for f, t in ci.fields:
            if f == fname:
                return cls, t
        for b in ci.bases:
            hit = self.find_field(b, fname)
            if hit is not None:
                return hit
        return None

    def find_method(self, cls: str, mname: str) -> MethodInfo | None:
        ci = self.classes[cls]
        for m in ci.methods:
            if m.name == mname and not (m.is_ctor or m.is_dtor):
                return m
        for b in ci.bases:
            hit = self.find_method(b, mname)
            if hit is not None:
                return hit
        return None

    def ctors(self, cls: str) -> list[MethodInfo]:
        return [m for m in self.classes[cls].methods if m.is_ctor]

    def dtor(self, cls: str) -> MethodInfo | None:
        for m in self.classes[cls].methods:
            if m.is_dtor:
                return m
        return None

    def has_virtuals(self, cls: str) -> bool:
        if any(m.is_virtual for m in self.classes[cls].methods):
            return True
        return any(self.has_virtuals(b) for b in self.classes[cls].bases)


def is_copy_ctor_of(m: n.MethodDecl, cls: str) -> bool:
    if not m.is_ctor or len(m.params) != 1:
        return False
    t = m.params[0].ty
    return t is not None and t.kind == "lref" and t.to.kind == "class" and t.to.name == cls


def is_move_ctor_of(m: n.MethodDecl, cls: str) -> bool:
    if not m.is_ctor or len(m.params) != 1:
        return False
    t = m.params[0].ty
    return t is not None and t.kind == "rref" and t.to.kind == "class" and t.to.name == cls


class _Scope:
    def __init__(self, parent: "_Scope | None" = None):
        self.vars: dict[str, TypeRepr] = {}
        self.parent = parent

    def lookup(self, name: str) -> TypeRepr | None:
        s = self
        while s is not None:
            if name in s.vars:
                return s.vars[name]
            s = s.parent
        return None

    def declare(self, name: str, ty: TypeRepr, loc: SourceLocation) -> None:
        if name in self.vars:
            raise TypeCheckError(f"redeclaration of {name!r}", loc)
        self.vars[name] = ty


class TypeChecker:
    def __init__(self, program: n.Program, int_width: int = 32):
        self.prog = program
        self.width = int_width
        self.classes: dict[str, ClassInfo] = {}
        self.functions: dict[str, n.MethodDecl] = {}
        self.globals: list[n.GlobalDecl] = []
        self.global_scope = _Scope()
        self.current_class = ""
        self.current_ret: TypeRepr = VOID

    # --- driver ---------------------------------------------------------------
    def run(self) -> TypedProgram:
        self.collect_classes()
        self.synthesize_members()
        self.collect_functions_and_globals()
        for ci in self.classes.values():
            self.check_class_bodies(ci)
        for f in self.functions.values():
            self.check_function(f)
        entry = self.functions.get("main")
        if entry is None:
            raise TypeCheckError("no `main` function defined")
        tp = TypedProgram(self.classes, self.functions, self.globals, entry,
                          self.prog, self.width)
        self.tp = tp
        return tp

    # --- pass 1: classes ----------------------------------------------------------
    def collect_classes(self) -> None:
        for d in self.prog.decls:
            if not isinstance(d, n.ClassDecl):
                continue
            if d.name in self.classes:
                raise TypeCheckError(f"duplicate class {d.name!r}", d.loc)
            if len(set(d.bases)) != len(d.bases):
                raise TypeCheckError("duplicate direct base class", d.loc)
            methods = []
            for m in d.methods:
                sig = func_t(tuple(p.ty for p in m.params), m.ret or VOID, m.throw_spec)
                methods.append(MethodInfo(
                    m.name, sig, d.name, m,
                    is_virtual=m.is_virtual, is_override=m.is_override,
                    is_ctor=m.is_ctor, is_dtor=m.is_dtor, implicit=m.implicit))
            self.classes[d.name] = ClassInfo(
                d.name, d.bases, [(f.name, f.ty) for f in d.fields], methods, d,
                is_template_instance=bool(d.origin_template),
                origin_template=d.origin_template, origin_args=d.origin_args)
        for ci in self.classes.values():
            for b in ci.bases:
                if b not in self.classes:
                    raise TypeCheckError(f"unknown base class {b!r}", ci.decl.loc)
        self._check_hierarchy()

    def _check_hierarchy(self) -> None:
        # no inheritance cycles, no repeated (diamond) base subobjects
        for name in self.classes:
            seen: list[str] = []

            def walk(c: str) -> None:
                for b in self.classes[c].bases:
                    if b == name:
                        raise TypeCheckError(
                            f"class {name!r} inherits from itself",
                            self.classes[name].decl.loc)
                    if b in seen:
                        raise TypeCheckError(
                            f"repeated base subobject {b!r} in {name!r} "
                            "(diamond hierarchies are not supported)",
                            self.classes[name].decl.loc)
                    seen.append(b)
                    walk(b)

            walk(name)

    # --- pass 2: implicit members ------------------------------------------------
    def synthesize_members(self) -> None:
        for ci in self.classes.values():
            decl = ci.decl
            cls = ci.name
            have_ctor = any(m.is_ctor for m in ci.methods)
            have_copy = any(is_copy_ctor_of(m.decl, cls) for m in ci.methods)
            have_move = any(is_move_ctor_of(m.decl, cls) for m in ci.methods)
            new_methods: list[n.MethodDecl] = []
            if not have_ctor:
                new_methods.append(n.MethodDecl(
                    cls, (), VOID, n.Block(()), is_ctor=True,
                    defining_class=cls, implicit=True, loc=decl.loc))
            if not have_copy:
                new_methods.append(self._fieldwise_ctor(ci, lref(class_t(cls, const=True))))
            if not have_move:
                new_methods.append(self._fieldwise_ctor(ci, rref(class_t(cls))))
            if not any(m.is_dtor for m in ci.methods) and self._needs_dtor(cls):
                new_methods.append(n.MethodDecl(
                    "~" + cls, (), VOID, n.Block(()), is_dtor=True,
                    defining_class=cls, implicit=True, loc=decl.loc))
            for m in new_methods:
                sig = func_t(tuple(p.ty for p in m.params), m.ret or VOID, None)
                ci.methods.append(MethodInfo(
                    m.name, sig, cls, m, is_ctor=m.is_ctor, is_dtor=m.is_dtor,
                    implicit=True))
            decl.methods = tuple(list(decl.methods) + new_methods)

    def _fieldwise_ctor(self, ci: ClassInfo, param_ty: TypeRepr) -> n.MethodDecl:
        stmts = []
        for decl_cls, fname, fty in self._all_fields_rec(ci.name):
            lhs = n.Member(n.This(loc=ci.decl.loc), fname, arrow=True, loc=ci.decl.loc)
            rhs = n.Member(n.NameRef("other", loc=ci.decl.loc), fname, loc=ci.decl.loc)
            stmts.append(n.AssignStmt(lhs, rhs, loc=ci.decl.loc))
        return n.MethodDecl(
            ci.name, (n.Param("other", param_ty, loc=ci.decl.loc),), VOID,
            n.Block(tuple(stmts), loc=ci.decl.loc), is_ctor=True,
            defining_class=ci.name, implicit=True, loc=ci.decl.loc)

    def _all_fields_rec(self, name: str) -> list[tuple[str, str, TypeRepr]]:
        out = []
        ci = self.classes[name]
        for b in ci.bases:
            out.extend(self._all_fields_rec(b))
        out.extend((name, f, t) for f, t in ci.fields)
        return out

    def _needs_dtor(self, cls: str) -> bool:
        ci = self.classes[cls]
        for b in ci.bases:
            bi = self.classes[b]
            if any(m.is_dtor for m in bi.methods) or self._needs_dtor(b):
                return True
        return False

    # --- pass 3: functions, globals ------------------------------------------------
    def collect_functions_and_globals(self) -> None:
        protos: dict[str, n.MethodDecl] = {}
        for d in self.prog.decls:
            if isinstance(d, n.MethodDecl):
                if d.body is None:
                    protos.setdefault(d.name, d)
                    continue
                if d.name in self.functions:
                    raise TypeCheckError(f"duplicate function {d.name!r}", d.loc)
                self.functions[d.name] = d
            elif isinstance(d, n.GlobalDecl):
                self._check_type(d.ty, d.loc)
                if d.init is not None:
                    ity = self.expr(d.init, self.global_scope)
                    self._require_convertible(ity, d.ty, d.init, d.loc)
                elif d.ty.kind == "class" and d.ty.name not in self.classes:
                    raise TypeCheckError(f"unknown type {d.ty.name!r}", d.loc)
                self.global_scope.declare(d.name, d.ty, d.loc)
                self.globals.append(d)
        # a prototype with no definition is fine until something calls it
        for name, p in protos.items():
            if name not in self.functions:
                self.functions[name] = p

    def check_function(self, f: n.MethodDecl) -> None:
        if f.body is None:
            return
        scope = _Scope(self.global_scope)
        for p in f.params:
            self._check_type(p.ty, p.loc)
            if p.name:
                scope.declare(p.name, p.ty, p.loc)
        self.current_class = ""
        self.current_ret = f.ret or VOID
        self.block(f.body, scope)

    def check_class_bodies(self, ci: ClassInfo) -> None:
        for _, fty in ci.fields:
            self._check_type(fty, ci.decl.loc)
        self._validate_overrides(ci)
        for mi in ci.methods:
            if mi.decl.body is None:
                continue
            scope = _Scope(self.global_scope)
            for p in mi.decl.params:
                self._check_type(p.ty, p.loc)
                if p.name:
                    scope.declare(p.name, p.ty, p.loc)
            self.current_class = ci.name
            self.current_ret = mi.decl.ret or VOID
            self.block(mi.decl.body, scope)
            self.current_class = ""

    def _validate_overrides(self, ci: ClassInfo) -> None:
        for mi in ci.methods:
            if mi.is_ctor or mi.is_dtor:
                continue
            base_m = self._find_base_virtual(ci, mi.name)
            if mi.is_override:
                if base_m is None:
                    raise TypeCheckError(
                        f"{ci.name}::{mi.name} marked override but no base declares "
                        "a virtual method with that name", mi.decl.loc)
                if not types_equal(base_m.signature, mi.signature, ignore_cv=True):
                    raise TypeCheckError(
                        f"signature mismatch on override of {mi.name!r}", mi.decl.loc)
            if base_m is not None and types_equal(base_m.signature, mi.signature,
                                                  ignore_cv=True):
                mi.is_virtual = True       # implicitly virtual, as in C++
                mi.decl.is_virtual = True
                if base_m.is_virtual:
                    mi.is_override = True

    def _find_base_virtual(self, ci: ClassInfo, name: str) -> MethodInfo | None:
        for b in ci.bases:
            bi = self.classes[b]
            for m in bi.methods:
                if m.name == name and m.is_virtual and not (m.is_ctor or m.is_dtor):
                    return m
            hit = self._find_base_virtual(bi, name)
            if hit is not None:
                return hit
        return None

    # --- statements -------------------------------------------------------------------
    def block(self, b: n.Block, scope: _Scope) -> None:
        inner = _Scope(scope)
        for s in b.stmts:
            self.stmt(s, inner)

    def stmt(self, s: n.Stmt, scope: _Scope) -> None:
        if isinstance(s, n.Block):
            self.block(s, scope)
        elif isinstance(s, n.DeclStmt):
            self.decl_stmt(s, scope)
        elif isinstance(s, n.ExprStmt):
            if isinstance(s.expr, n.IncDec):
                self.incdec(s.expr, scope)
            else:
                self.expr(s.expr, scope)
        elif isinstance(s, n.AssignStmt):
            lty = self.expr(s.lhs, scope)
            if not s.lhs.is_lvalue:
                raise TypeCheckError("assignment target is not an lvalue", s.loc)
            rty = self.expr(s.rhs, scope)
            self._no_float(lty, s.loc)
            self._require_convertible(rty, lty, s.rhs, s.loc)
        elif isinstance(s, n.IfStmt):
            self.condition(s.cond, scope)
            self.block(s.then, scope)
            if s.els is not None:
                self.block(s.els, scope)
        elif isinstance(s, n.WhileStmt):
            self.condition(s.cond, scope)
            self.block(s.body, scope)
        elif isinstance(s, n.ForStmt):
            inner = _Scope(scope)
            if s.init is not None:
                self.stmt(s.init, inner)
            if s.cond is not None:
                self.condition(s.cond, inner)
            if s.step is not None:
                self.stmt(s.step, inner)
            self.block(s.body, inner)
        elif isinstance(s, n.ReturnStmt):
            if s.value is not None:
                vty = self.expr(s.value, scope)
                if self.current_ret.is_void:
                    raise TypeCheckError("void function returns a value", s.loc)
                self._require_convertible(vty, self.current_ret, s.value, s.loc)
        elif isinstance(s, n.AssertStmt):
            self.condition(s.cond, scope)
        elif isinstance(s, n.TryStmt):
            self.block(s.body, scope)
            for h in s.handlers:
                inner = _Scope(scope)
                if h.htype is not None:
                    self._check_type(h.htype, h.loc, allow_float=True)
                if h.var:
                    if h.htype is None:
                        raise TypeCheckError("ellipsis handler cannot bind a variable", h.loc)
                    inner.declare(h.var, h.htype, h.loc)
                self.block(h.body, inner)
        elif isinstance(s, n.ThrowStmt):
            if s.value is not None:
                vty = self.expr(s.value, scope)
                if vty.kind == "float":
                    raise TypeCheckError("floating-point values cannot be thrown", s.loc)
        elif isinstance(s, n.DeleteStmt):
            tty = self.expr(s.target, scope)
            if tty.kind != "ptr":
                raise TypeCheckError("delete requires a pointer", s.loc)
        else:
            raise TypeCheckError(f"unsupported statement {type(s).__name__}", s.loc)

    def incdec(self, e: n.IncDec, scope: _Scope) -> None:
        tty = self.expr(e.target, scope)
        if not e.target.is_lvalue:
            raise TypeCheckError("increment target is not an lvalue", e.loc)
        if not tty.strip_const().is_arithmetic:
            raise TypeCheckError("increment requires an arithmetic lvalue", e.loc)
        e.ty = tty
        e.is_lvalue = False

    def decl_stmt(self, s: n.DeclStmt, scope: _Scope) -> None:
        self._check_type(s.ty, s.loc)
        base = s.ty
        if base.is_reference:
            if s.init_kind != "=" or not isinstance(s.init, n.Expr):
                raise TypeCheckError("references must be initialized", s.loc)
            ity = self.expr(s.init, scope)
            self._check_ref_binding(base, ity, s.init, s.loc)
        elif base.kind == "class":
            ci = self.classes.get(base.name)
            if ci is None:
                raise TypeCheckError(f"unknown type {base.name!r}", s.loc)
            if s.init_kind == "brace":
                inits = list(s.init)
                flat = [f for f in self.tp_all_fields(base.name)]
                if len(inits) > len(flat):
                    raise TypeCheckError("too many brace initializers", s.loc)
                for e, (_, fname, fty) in zip(inits, flat):
                    ety = self.expr(e, scope)
                    self._require_convertible(ety, fty, e, s.loc)
            elif s.init_kind == "call":
                args = [self.expr(a, scope) for a in s.init]
                ctor = self.resolve_ctor(base.name, list(s.init), args, s.loc)
                s.ctor_name = ctor.internal_name
            elif s.init_kind == "=":
                ity = self.expr(s.init, scope)
                self._require_convertible(ity, base, s.init, s.loc)
                args = [ity]
                ctor = self.resolve_ctor(base.name, [s.init], args, s.loc)
                s.ctor_name = ctor.internal_name
            else:
                ctor = self.resolve_ctor(base.name, [], [], s.loc)
                s.ctor_name = ctor.internal_name
        else:
            if s.init_kind == "=" and isinstance(s.init, n.Expr):
                ity = self.expr(s.init, scope)
                self._no_float(base, s.loc, allow_decl=True)
                self._require_convertible(ity, base, s.init, s.loc)
            elif s.init_kind == "call" and s.init:
                if len(s.init) != 1:
                    raise TypeCheckError("scalar initializer takes one value", s.loc)
                ity = self.expr(s.init[0], scope)
                self._require_convertible(ity, base, s.init[0], s.loc)
            elif s.init_kind == "brace":
                if len(s.init) > 1:
                    raise TypeCheckError("scalar brace initializer takes one value", s.loc)
                if s.init:
                    ity = self.expr(s.init[0], scope)
                    self._require_convertible(ity, base, s.init[0], s.loc)
        scope.declare(s.name, s.ty, s.loc)

    def tp_all_fields(self, name: str):
        return self._all_fields_rec(name)

    def condition(self, e: n.Expr, scope: _Scope) -> None:
        ty = self.expr(e, scope)
        if not (ty.strip_const().is_arithmetic or ty.kind == "ptr" or ty.kind == "bool"):
            raise TypeCheckError("condition is not convertible to bool", e.loc)

    # --- expressions ----------------------------------------------------------------------
    def expr(self, e: n.Expr, scope: _Scope) -> TypeRepr:
        ty = self._expr(e, scope)
        e.ty = ty
        return ty

    def _expr(self, e: n.Expr, scope: _Scope) -> TypeRepr:
        if isinstance(e, n.IntLit):
            limit = 1 << (self.width - 1)
            if not (-limit <= e.value < limit):
                raise TypeCheckError(
                    f"integer literal {e.value} does not fit in {self.width} bits", e.loc)
            return int_t(self.width)
        if isinstance(e, n.BoolLit):
            return BOOL_T
        if isinstance(e, n.CharLit):
            return CHAR_T
        if isinstance(e, n.NullLit):
            return ptr(VOID)
        if isinstance(e, n.This):
            if not self.current_class:
                raise TypeCheckError("`this` outside a member function", e.loc)
            return ptr(class_t(self.current_class))
        if isinstance(e, n.NameRef):
            return self.name_ref(e, scope)
        if isinstance(e, n.Member):
            return self.member(e, scope)
        if isinstance(e, n.Call):
            return self.call(e, scope)
        if isinstance(e, n.Unary):
            return self.unary(e, scope)
        if isinstance(e, n.Binary):
            return self.binary(e, scope)
        if isinstance(e, n.Index):
            oty = self.expr(e.obj, scope)
            ity = self.expr(e.index, scope)
            if not ity.strip_const().is_arithmetic:
                raise TypeCheckError("array index must be integral", e.loc)
            base = oty.strip_ref()
            if base.kind not in ("array", "ptr"):
                raise TypeCheckError("subscripted value is not an array or pointer", e.loc)
            e.is_lvalue = True
            return base.to
        if isinstance(e, n.NewExpr):
            return self.new_expr(e, scope)
        if isinstance(e, n.Move):
            aty = self.expr(e.arg, scope)
            if not e.arg.is_lvalue:
                raise TypeCheckError("std::move requires an lvalue", e.loc)
            return rref(aty.strip_ref().strip_const())
        if isinstance(e, n.Cast):
            self.expr(e.arg, scope)
            return e.target
        if isinstance(e, n.IncDec):
            raise TypeCheckError("increment is only a statement in MiniCxx", e.loc)
        if isinstance(e, n.StructLit):
            return class_t(e.class_name)
        raise TypeCheckError(f"unsupported expression {type(e).__name__}", e.loc)

    def name_ref(self, e: n.NameRef, scope: _Scope) -> TypeRepr:
        ty = scope.lookup(e.name)
        if ty is not None:
            e.binding = "global" if self.global_scope.lookup(e.name) is ty else "local"
            e.decl_ty = ty
            e.is_lvalue = True
            return ty.strip_ref()  # references are transparent in expressions
        if self.current_class:
            hit = self.find_field_in(self.current_class, e.name)
            if hit is not None:
                decl_cls, fty = hit
                e.binding = "field"
                e.binding_class = decl_cls
                e.decl_ty = fty
                e.is_lvalue = True
                return fty
            m = self.find_method_in(self.current_class, e.name)
            if m is not None:
                e.binding = "method"
                e.binding_class = m.defining_class
                return m.signature
        f = self.functions.get(e.name)
        if f is not None:
            e.binding = "func"
            return func_t(tuple(p.ty for p in f.params), f.ret or VOID, f.throw_spec)
        raise TypeCheckError(f"unresolved name {e.name!r}", e.loc)

    def find_field_in(self, cls: str, fname: str) -> tuple[str, TypeRepr] | None:
        ci = self.classes[cls]
        for f, t in ci.fields:
            if f == fname:
                return cls, t
        for b in ci.bases:
            hit = self.find_field_in(b, fname)
            if hit is not None:
                return hit
        return None

    def find_method_in(self, cls: str, mname: str) -> MethodInfo | None:
        ci = self.classes[cls]
        for m in ci.methods:
            if m.name == mname and not (m.is_ctor or m.is_dtor):
                return m
        for b in ci.bases:
            hit = self.find_method_in(b, mname)
            if hit is not None:
                return hit
        return None

    def member(self, e: n.Member, scope: _Scope) -> TypeRepr:
        oty = self.expr(e.obj, scope).strip_ref()
        if e.arrow:
            if oty.kind != "ptr" or oty.to.strip_const().kind != "class":
                raise TypeCheckError("-> requires a pointer to class", e.loc)
            cls = oty.to.strip_const().name
        else:
            if oty.strip_const().kind != "class":
                raise TypeCheckError(". requires a class object", e.loc)
            cls = oty.strip_const().name
        if cls not in self.classes:
            raise TypeCheckError(f"unknown class {cls!r}", e.loc)
        hit = self.find_field_in(cls, e.name)
        if hit is None:
            m = self.find_method_in(cls, e.name)
            if m is not None:
                e.field_class = m.defining_class
                return m.signature
            raise TypeCheckError(f"class {cls!r} has no member {e.name!r}", e.loc)
        e.field_class, fty = hit
        e.is_lvalue = True
        return fty

    def call(self, e: n.Call, scope: _Scope) -> TypeRepr:
        callee = e.callee
        arg_tys = [self.expr(a, scope) for a in e.args]
        if isinstance(callee, n.Member):
            recv_ty = self.expr(callee.obj, scope).strip_ref()
            cls = recv_ty.to.strip_const().name if callee.arrow else recv_ty.strip_const().name
            if callee.arrow and (recv_ty.kind != "ptr" or recv_ty.to.strip_const().kind != "class"):
                raise TypeCheckError("-> requires a pointer to class", e.loc)
            if not callee.arrow and recv_ty.strip_const().kind != "class":
                raise TypeCheckError(". requires a class object", e.loc)
            m = self.find_method_in(cls, callee.name)
            if m is None:
                raise TypeCheckError(f"class {cls!r} has no method {callee.name!r}", e.loc)
            self._check_args(m.signature, arg_tys, e)
            e.call_kind = "virtual" if m.is_virtual else "method"
            e.call_target = m.internal_name
            e.call_class = cls
            return m.signature.ret
        if isinstance(callee, n.NameRef):
            if callee.name in self.classes:
                # temporary construction: Derived(args...)
                ctor = self.resolve_ctor(callee.name, list(e.args), arg_tys, e.loc)
                e.call_kind = "ctor"
                e.call_target = ctor.internal_name
                e.call_class = callee.name
                return class_t(callee.name)
            # unqualified method call inside a member function
            if self.current_class:
                m = self.find_method_in(self.current_class, callee.name)
                if m is not None:
                    self._check_args(m.signature, arg_tys, e)
                    e.call_kind = "virtual" if m.is_virtual else "method"
                    e.call_target = m.internal_name
                    e.call_class = self.current_class
                    return m.signature.ret
            f = self.functions.get(callee.name)
            if f is None:
                raise TypeCheckError(f"unresolved function {callee.name!r}", e.loc)
            if f.body is None:
                raise TypeCheckError(
                    f"function {callee.name!r} is declared but never defined", e.loc)
            sig = func_t(tuple(p.ty for p in f.params), f.ret or VOID, f.throw_spec)
            self._check_args(sig, arg_tys, e)
            e.call_kind = "free"
            e.call_target = callee.name
            return sig.ret
        raise TypeCheckError("called object is not a function", e.loc)

    def _check_args(self, sig: TypeRepr, arg_tys: list[TypeRepr], e: n.Call) -> None:
        if len(arg_tys) != len(sig.params):
            raise TypeCheckError(
                f"wrong number of arguments: expected {len(sig.params)}, "
                f"got {len(arg_tys)}", e.loc)
        for a, pty, aty in zip(e.args, sig.params, arg_tys):
            if pty.is_reference:
                self._check_ref_binding(pty, aty, a, e.loc)
            else:
                self._require_convertible(aty, pty, a, e.loc)

    def unary(self, e: n.Unary, scope: _Scope) -> TypeRepr:
        oty = self.expr(e.operand, scope)
        if e.op == "&":
            if not e.operand.is_lvalue:
                raise TypeCheckError("cannot take the address of an rvalue", e.loc)
            return ptr(oty)
        if e.op == "*":
            base = oty.strip_ref()
            if base.kind == "array":
                e.is_lvalue = True
                return base.to
            if base.kind != "ptr":
                raise TypeCheckError("cannot dereference a non-pointer", e.loc)
            e.is_lvalue = True
            return base.to
        if e.op == "!":
            self._no_float(oty, e.loc)
            return BOOL_T
        if e.op == "-":
            self._no_float(oty, e.loc)
            if not oty.strip_const().is_arithmetic:
                raise TypeCheckError("unary - requires an arithmetic operand", e.loc)
            return int_t(self.width)
        raise TypeCheckError(f"unsupported unary operator {e.op!r}", e.loc)

    def binary(self, e: n.Binary, scope: _Scope) -> TypeRepr:
        lty = self.expr(e.lhs, scope)
        rty = self.expr(e.rhs, scope)
        self._no_float(lty, e.loc)
        self._no_float(rty, e.loc)
        op = e.op
        if op in ("&&", "||"):
            for t, sub in ((lty, e.lhs), (rty, e.rhs)):
                if not (t.strip_const().is_arithmetic or t.kind in ("ptr", "bool")):
                    raise TypeCheckError("operand is not convertible to bool", sub.loc)
            return BOOL_T
        if op in ("==", "!="):
            if lty.strip_const().kind in ("ptr", "array") or rty.strip_const().kind in ("ptr", "array"):
                return BOOL_T
            if lty.strip_const().is_arithmetic and rty.strip_const().is_arithmetic:
                return BOOL_T
            if types_equal(lty.strip_const(), rty.strip_const(), ignore_cv=True):
                return BOOL_T
            raise TypeCheckError(f"invalid operands to {op}", e.loc)
        if op in ("<", ">", "<=", ">="):
            if not (lty.strip_const().is_arithmetic and rty.strip_const().is_arithmetic):
                raise TypeCheckError(f"{op} requires arithmetic operands", e.loc)
            return BOOL_T
        if op in ("+", "-"):
            lbase, rbase = lty.strip_const(), rty.strip_const()
            if lbase.kind in ("ptr", "array") and rbase.is_arithmetic:
                return ptr(lbase.to) if lbase.kind == "array" else lbase
            if lbase.is_arithmetic and rbase.is_arithmetic:
                return int_t(self.width)
            raise TypeCheckError(f"invalid operands to {op}", e.loc)
        if op == "*":
            if not (lty.strip_const().is_arithmetic and rty.strip_const().is_arithmetic):
                raise TypeCheckError("* requires arithmetic operands", e.loc)
            return int_t(self.width)
        raise TypeCheckError(f"unsupported binary operator {op!r}", e.loc)

    def new_expr(self, e: n.NewExpr, scope: _Scope) -> TypeRepr:
        self._check_type(e.elem_type, e.loc)
        elem = e.elem_type
        if e.count is not None:
            cty = self.expr(e.count, scope)
            if not cty.strip_const().is_arithmetic:
                raise TypeCheckError("array size must be integral", e.loc)
            if elem.kind == "class":
                ctor = self.resolve_ctor(elem.name, [], [], e.loc)
                e.ctor_name = ctor.internal_name
            return ptr(elem)
        if elem.kind == "class":
            args = list(e.args or ())
            arg_tys = [self.expr(a, scope) for a in args]
            ctor = self.resolve_ctor(elem.name, args, arg_tys, e.loc)
            e.ctor_name = ctor.internal_name
        elif e.args:
            if len(e.args) != 1:
                raise TypeCheckError("scalar new takes one initializer", e.loc)
            ity = self.expr(e.args[0], scope)
            self._require_convertible(ity, elem, e.args[0], e.loc)
        return ptr(elem)

    # --- overload resolution -----------------------------------------------------
    def resolve_ctor(self, cls: str, args: list[n.Expr], arg_tys: list[TypeRepr],
                     loc: SourceLocation) -> MethodInfo:
        ci = self.classes.get(cls)
        if ci is None:
            raise TypeCheckError(f"unknown class {cls!r}", loc)
        viable = []
        for m in ci.methods:
            if not m.is_ctor or len(m.signature.params) != len(arg_tys):
                continue
            ok = True
            for a, pty, aty in zip(args, m.signature.params, arg_tys):
                if not self._binding_viable(pty, aty, a):
                    ok = False
                    break
            if ok:
                viable.append(m)
        if not viable:
            raise TypeCheckError(f"no matching constructor for {cls!r}", loc)
        # prefer the move constructor for rvalue arguments
        for m in viable:
            if m.signature.params and m.signature.params[0].kind == "rref":
                return m
        return viable[0]

    def _binding_viable(self, pty: TypeRepr, aty: TypeRepr, arg: n.Expr) -> bool:
        if pty.is_reference:
            try:
                self._check_ref_binding(pty, aty, arg, arg.loc)
                return True
            except TypeCheckError:
                return False
        return self._convertible(aty, pty)

    def _check_ref_binding(self, ref: TypeRepr, src: TypeRepr, arg: n.Expr,
                           loc: SourceLocation) -> None:
        target = ref.to
        src_v = src.strip_ref()
        if not types_equal(target.strip_const(), src_v.strip_const(), ignore_cv=True):
            if not (target.strip_const().kind == "class" and src_v.strip_const().kind == "class"
                    and self._is_base(target.strip_const().name, src_v.strip_const().name)):
                raise TypeCheckError("reference binding to an incompatible type", loc)
        is_rvalue = not arg.is_lvalue or isinstance(arg, n.Move) or src.kind == "rref"
        if ref.kind == "rref":
            if not is_rvalue:
                raise TypeCheckError(
                    "an rvalue reference can bind only to std::move results "
                    "or temporaries", loc)
        else:
            if not target.is_const and not arg.is_lvalue:
                raise TypeCheckError("non-const reference cannot bind to an rvalue", loc)

    def _is_base(self, base: str, derived: str) -> bool:
        if base == derived:
            return True
        ci = self.classes.get(derived)
        if ci is None:
            return False
        return any(self._is_base(base, b) for b in ci.bases)

    # --- conversions -----------------------------------------------------------------
    def _convertible(self, src: TypeRepr, dst: TypeRepr) -> bool:
        s = src.strip_ref().strip_const()
        d = dst.strip_const()
        if types_equal(s, d, ignore_cv=True):
            return True
        if s.is_arithmetic and d.is_arithmetic:
            return True
        if d.kind == "ptr":
            if s.kind == "ptr":
                if s.to.strip_const().kind == "class" and s.to.is_void:
                    pass
                if s.to.is_void or d.to.is_void:
                    return True
                if types_equal(s.to, d.to, ignore_cv=True):
                    return True
                sc, dc = s.to.strip_const(), d.to.strip_const()
                if sc.kind == "class" and dc.kind == "class" and self._is_base(dc.name, sc.name):
                    return True
                return False
            if s.kind == "array":
                return types_equal(s.to, d.to, ignore_cv=True)
            if s.kind == "func":
                return d.to.kind == "func" and types_equal(s, d.to, ignore_cv=True)
            return False
        if d.kind == "bool":
            return s.is_arithmetic or s.kind == "ptr"
        if d.kind == "class" and s.kind == "class":
            return d.name == s.name or self._is_base(d.name, s.name)
        return False

    def _require_convertible(self, src: TypeRepr, dst: TypeRepr, arg: n.Expr,
                             loc: SourceLocation) -> None:
        if dst.is_reference:
            self._check_ref_binding(dst, src, arg, loc)
            return
        if src.kind == "float" or dst.kind == "float":
            raise TypeCheckError("floating-point values are not supported", loc)
        if not self._convertible(src, dst):
            raise TypeCheckError(
                f"cannot convert {tag_text_cv(src)!r} to {tag_text_cv(dst)!r}", loc)

    def _no_float(self, t: TypeRepr, loc: SourceLocation, allow_decl: bool = False) -> None:
        if t.strip_ref().strip_const().kind == "float":
            raise TypeCheckError("floating-point arithmetic is not supported", loc)

    def _check_type(self, t: TypeRepr | None, loc: SourceLocation,
                    allow_float: bool = True) -> None:
        if t is None:
            raise TypeCheckError("missing type", loc)
        if t.kind == "tmpl":
            raise TypeCheckError(f"uninstantiated template type {t.name!r}", loc)
        if t.kind == "class" and not t.is_void and t.name not in self.classes:
            raise TypeCheckError(f"unknown type {t.name!r}", loc)
        for child in (t.to, t.ret):
            if child is not None:
                self._check_type(child, loc, allow_float)
        for p in t.params:
            if isinstance(p, TypeRepr):
                self._check_type(p, loc, allow_float)


def typecheck(program: n.Program, int_width: int = 32) -> TypedProgram:
    """Check a template-free program; annotates the AST in place."""
    return TypeChecker(program, int_width).run()
