"""Template collection and worklist-driven monomorphization.

Runs between parsing and typechecking.  Class and function templates are
removed from the AST, then every demanded (template, arguments) pair is
stamped exactly once under a mangled name like ``X<1234>`` or ``id<int>``.
Friend function templates declared inside class templates become callable
once their enclosing class is instantiated; they are stamped on demand at
call sites with the enclosing class's bindings in scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from minibmc import nodes as n
from minibmc.cxxtypes import TypeRepr, class_t, int_t, ptr, rref, tag_text_cv
from minibmc.errors import SourceLocation, TemplateError

DEFAULT_DEPTH_CAP = 128


def mangle(name: str, args: tuple) -> str:
    rendered = []
    for a in args:
        if isinstance(a, TypeRepr):
            rendered.append(tag_text_cv(a))
        else:
            rendered.append(str(a))
    return f"{name}<{','.join(rendered)}>"


@dataclass
class FriendCandidate:
    templ: n.TemplateDecl
    enclosing_instance: str
    bindings: dict  # enclosing template parameter name -> int | TypeRepr


def collect_templates(program: n.Program) -> tuple[list[n.TemplateDecl], n.Program]:
    """Split a program into its template declarations and the residual AST.

    Friend function templates appear in the returned list with `enclosing`
    set; they stay attached to their class template for instantiation.
    """
    templates: list[n.TemplateDecl] = []
    residual: list = []
    for d in program.decls:
        if isinstance(d, n.TemplateDecl):
            _check_shadowing(d)
            templates.append(d)
            if isinstance(d.decl, n.ClassDecl):
                templates.extend(d.decl.friend_templates)
        else:
            residual.append(d)
    return templates, n.Program(tuple(residual), filename=program.filename)


def _check_shadowing(t: n.TemplateDecl) -> None:
    names = [p.name for p in t.params]
    if len(set(names)) != len(names):
        raise TemplateError("duplicate template parameter name", t.loc)
    if isinstance(t.decl, n.ClassDecl):
        outer = set(names)
        for ft in t.decl.friend_templates:
            for p in ft.params:
                if p.name in outer:
                    raise TemplateError(
                        f"template parameter {p.name!r} shadows an outer template parameter",
                        p.loc)


class Instantiator:
    """Resolves template uses, stamping each demanded instance once."""

    def __init__(self, templates: list[n.TemplateDecl], depth_cap: int = DEFAULT_DEPTH_CAP,
                 int_width: int = 32):
        self.by_name: dict[str, n.TemplateDecl] = {}
        for t in templates:
            if t.enclosing:
                continue  # friends are resolved through their class instances
            if t.decl.name in self.by_name:
                raise TemplateError(f"duplicate template {t.decl.name!r}", t.loc)
            self.by_name[t.decl.name] = t
        self.depth_cap = depth_cap
        self.int_width = int_width
        self.stamped: dict[str, bool] = {}          # mangled name, insertion ordered
        self.instances: list = []                   # appended ClassDecl / MethodDecl
        self.friends: dict[str, list[FriendCandidate]] = {}
        self.instance_meta: dict[str, tuple[str, tuple]] = {}  # mangled -> (origin, args)
        self.globals_env: dict[str, TypeRepr] = {}

    # --- demand -------------------------------------------------------------
    def demand_class(self, name: str, args: tuple, bindings: dict, loc: SourceLocation,
                     depth: int) -> str:
        templ = self.by_name.get(name)
        if templ is None or not isinstance(templ.decl, n.ClassDecl):
            raise TemplateError(f"unresolved template name {name!r}", loc)
        values = self._bind_args(templ, args, bindings, loc)
        mangled = mangle(name, tuple(values.values()))
        if mangled in self.stamped:
            return mangled
        if depth > self.depth_cap:
            raise TemplateError(f"template recursion limit ({self.depth_cap}) exceeded", loc)
        self.stamped[mangled] = True
        decl = templ.decl
        inst = replace(
            decl, name=mangled, friend_templates=(),
            origin_template=name, origin_args=tuple(values.values()))
        self.instance_meta[mangled] = (name, tuple(values.values()))
        for ft in decl.friend_templates:
            self.friends.setdefault(ft.decl.name, []).append(
                FriendCandidate(ft, mangled, dict(values)))
        inst = replace(
            inst,
            fields=tuple(self._field(f, values, name, mangled, depth) for f in decl.fields),
            methods=tuple(self._method(m, values, name, mangled, depth) for m in decl.methods),
        )
        self.instances.append(inst)
        return mangled

    def demand_function(self, name: str, args: tuple, bindings: dict,
                        loc: SourceLocation, depth: int) -> str:
        templ = self.by_name.get(name)
        if templ is None or not isinstance(templ.decl, n.MethodDecl):
            raise TemplateError(f"unresolved template name {name!r}", loc)
        values = self._bind_args(templ, args, bindings, loc)
        mangled = mangle(name, tuple(values.values()))
        if mangled not in self.stamped:
            if depth > self.depth_cap:
                raise TemplateError(f"template recursion limit ({self.depth_cap}) exceeded", loc)
            self.stamped[mangled] = True
            self.instances.append(self._function_instance(templ.decl, mangled, values, depth))
        return mangled

    def demand_friend(self, name: str, own_args: tuple, arg_sketches: list,
                      loc: SourceLocation, depth: int) -> str:
        matches = []
        for cand in self.friends.get(name, ()):
            param_tys = []
            ok = True
            for p in cand.templ.decl.params:
                try:
                    param_tys.append(self._resolve_type(
                        p.ty, dict(cand.bindings), cand.templ.enclosing,
                        cand.enclosing_instance, depth, loc, allow_own=cand.templ.params))
                except TemplateError:
                    ok = False
                    break
            if ok and self._args_compatible(param_tys, arg_sketches):
                matches.append(cand)
        if not matches:
            raise TemplateError(f"unresolved template name {name!r}", loc)
        if len(matches) > 1:
            raise TemplateError(f"ambiguous call to friend template {name!r}", loc)
        cand = matches[0]
        values = self._bind_args(cand.templ, own_args, {}, loc)
        mangled = mangle(name, tuple(values.values()))
        meta = (f"{cand.enclosing_instance}::{name}", tuple(values.values()))
        if mangled in self.stamped:
            if self.instance_meta.get(mangled) != meta:
                raise TemplateError(f"conflicting instantiations of {mangled!r}", loc)
            return mangled
        if depth > self.depth_cap:
            raise TemplateError(f"template recursion limit ({self.depth_cap}) exceeded", loc)
        self.stamped[mangled] = True
        self.instance_meta[mangled] = meta
        merged = dict(cand.bindings)
        merged.update(values)
        inst = self._function_instance(
            cand.templ.decl, mangled, merged, depth,
            enclosing=cand.templ.enclosing, enclosing_instance=cand.enclosing_instance)
        self.instances.append(inst)
        return mangled

    def _function_instance(self, decl: n.MethodDecl, mangled: str, values: dict,
                           depth: int, enclosing: str = "",
                           enclosing_instance: str = "") -> n.MethodDecl:
        ctx = _Ctx(values, enclosing, enclosing_instance, depth + 1)
        params = tuple(
            replace(p, ty=self._resolve_type_ctx(p.ty, ctx, p.loc)) for p in decl.params)
        ret = self._resolve_type_ctx(decl.ret, ctx, decl.loc)
        body = self._resolve_block(decl.body, ctx) if decl.body is not None else None
        return replace(decl, name=mangled, params=params, ret=ret, body=body,
                       defining_class="")

    def _field(self, f: n.FieldDecl, values: dict, origin: str, mangled: str,
               depth: int) -> n.FieldDecl:
        ctx = _Ctx(values, origin, mangled, depth + 1)
        return replace(f, ty=self._resolve_type_ctx(f.ty, ctx, f.loc))

    def _method(self, m: n.MethodDecl, values: dict, origin: str, mangled: str,
                depth: int) -> n.MethodDecl:
        ctx = _Ctx(values, origin, mangled, depth + 1)
        params = tuple(replace(p, ty=self._resolve_type_ctx(p.ty, ctx, p.loc)) for p in m.params)
        ret = self._resolve_type_ctx(m.ret, ctx, m.loc)
        body = self._resolve_block(m.body, ctx) if m.body is not None else None
        name = m.name
        if m.is_ctor:
            name = mangled
        elif m.is_dtor:
            name = "~" + mangled
        return replace(m, name=name, params=params, ret=ret, body=body,
                       defining_class=mangled)

    def _bind_args(self, templ: n.TemplateDecl, args: tuple, bindings: dict,
                   loc: SourceLocation) -> dict:
        params = templ.params
        if len(args) != len(params):
            raise TemplateError(
                f"{templ.decl.name!r} expects {len(params)} template argument(s), "
                f"got {len(args)}", loc)
        values: dict = {}
        for p, a in zip(params, args):
            if isinstance(a, str):
                if a not in bindings:
                    raise TemplateError(f"unbound template parameter {a!r}", loc)
                a = bindings[a]
            if p.kind == "int" and not isinstance(a, int):
                raise TemplateError(f"template parameter {p.name!r} expects a value", loc)
            if p.kind == "type" and not isinstance(a, TypeRepr):
                raise TemplateError(f"template parameter {p.name!r} expects a type", loc)
            values[p.name] = a
        return values

    def _args_compatible(self, param_tys: list[TypeRepr], sketches: list) -> bool:
        if len(param_tys) != len(sketches):
            return False
        for pt, st in zip(param_tys, sketches):
            if st is None:
                continue
            base = pt.strip_ref().strip_const()
            got = st.strip_ref().strip_const()
            if base.kind == "class" and got.kind == "class" and base.name != got.name:
                return False
        return True

    # --- type & AST resolution ------------------------------------------------
    def _resolve_type(self, t: TypeRepr, bindings: dict, enclosing: str,
                      enclosing_instance: str, depth: int, loc: SourceLocation,
                      allow_own: tuple = ()) -> TypeRepr:
        ctx = _Ctx(bindings, enclosing, enclosing_instance, depth + 1)
        own = {p.name for p in allow_own}
        return self._resolve_type_ctx(t, ctx, loc, unresolved_ok=own)

    def _resolve_type_ctx(self, t: TypeRepr | None, ctx: "_Ctx", loc: SourceLocation,
                          unresolved_ok: set | None = None) -> TypeRepr | None:
        if t is None:
            return None
        if t.kind == "tmpl":
            if not t.params:
                bound = ctx.bindings.get(t.name)
                if isinstance(bound, TypeRepr):  # a type parameter
                    if t.is_const:
                        bound = replace(bound, is_const=True)
                    return bound
                if bound is not None:
                    raise TemplateError(
                        f"value parameter {t.name!r} used as a type", loc)
                if t.name == ctx.enclosing and ctx.enclosing_instance:
                    base = class_t(ctx.enclosing_instance)
                    return replace(base, is_const=t.is_const)
                if unresolved_ok is not None and t.name in unresolved_ok:
                    return t
                raise TemplateError(
                    f"template {t.name!r} used without arguments", loc)
            args = tuple(self._resolve_targ(a, ctx, loc) for a in t.params)
            mangled = self.demand_class(t.name, args, ctx.bindings, loc, ctx.depth)
            return replace(class_t(mangled), is_const=t.is_const)
        if t.kind in ("ptr", "lref", "rref", "array"):
            return replace(t, to=self._resolve_type_ctx(t.to, ctx, loc, unresolved_ok))
        if t.kind == "func":
            return replace(
                t,
                params=tuple(self._resolve_type_ctx(p, ctx, loc, unresolved_ok)
                             for p in t.params),
                ret=self._resolve_type_ctx(t.ret, ctx, loc, unresolved_ok))
        return t

    def _resolve_targ(self, a, ctx: "_Ctx", loc: SourceLocation):
        if isinstance(a, str):
            if a not in ctx.bindings:
                raise TemplateError(f"unbound template parameter {a!r}", loc)
            return ctx.bindings[a]
        if isinstance(a, TypeRepr):
            return self._resolve_type_ctx(a, ctx, loc)
        return a

    def _resolve_block(self, b: n.Block, ctx: "_Ctx") -> n.Block:
        saved = dict(ctx.locals)
        stmts = tuple(self._resolve_stmt(s, ctx) for s in b.stmts)
        ctx.locals = saved
        return replace(b, stmts=stmts)

    def _resolve_stmt(self, s: n.Stmt, ctx: "_Ctx") -> n.Stmt:
        if isinstance(s, n.Block):
            return self._resolve_block(s, ctx)
        if isinstance(s, n.DeclStmt):
            ty = self._resolve_type_ctx(s.ty, ctx, s.loc)
            init = s.init
            if isinstance(init, n.Expr):
                init = self._resolve_expr(init, ctx)
            elif isinstance(init, tuple):
                init = tuple(self._resolve_expr(e, ctx) for e in init)
            ctx.locals[s.name] = ty
            return replace(s, ty=ty, init=init)
        if isinstance(s, n.ExprStmt):
            return replace(s, expr=self._resolve_expr(s.expr, ctx))
        if isinstance(s, n.AssignStmt):
            return replace(s, lhs=self._resolve_expr(s.lhs, ctx),
                           rhs=self._resolve_expr(s.rhs, ctx))
        if isinstance(s, n.IfStmt):
            return replace(s, cond=self._resolve_expr(s.cond, ctx),
                           then=self._resolve_block(s.then, ctx),
                           els=self._resolve_block(s.els, ctx) if s.els else None)
        if isinstance(s, n.WhileStmt):
            return replace(s, cond=self._resolve_expr(s.cond, ctx),
                           body=self._resolve_block(s.body, ctx))
        if isinstance(s, n.ForStmt):
            saved = dict(ctx.locals)
            init = self._resolve_stmt(s.init, ctx) if s.init else None
            cond = self._resolve_expr(s.cond, ctx) if s.cond else None
            step = self._resolve_stmt(s.step, ctx) if s.step else None
            body = self._resolve_block(s.body, ctx)
            ctx.locals = saved
            return replace(s, init=init, cond=cond, step=step, body=body)
        if isinstance(s, n.ReturnStmt):
            return replace(s, value=self._resolve_expr(s.value, ctx) if s.value else None)
        if isinstance(s, n.AssertStmt):
            return replace(s, cond=self._resolve_expr(s.cond, ctx))
        if isinstance(s, n.TryStmt):
            handlers = tuple(
                replace(h, htype=self._resolve_type_ctx(h.htype, ctx, h.loc) if h.htype else None,
                        body=self._resolve_block(h.body, ctx))
                for h in s.handlers)
            return replace(s, body=self._resolve_block(s.body, ctx), handlers=handlers)
        if isinstance(s, n.ThrowStmt):
            return replace(s, value=self._resolve_expr(s.value, ctx) if s.value else None)
        if isinstance(s, n.DeleteStmt):
            return replace(s, target=self._resolve_expr(s.target, ctx))
        return s

    def _resolve_expr(self, e: n.Expr, ctx: "_Ctx") -> n.Expr:
        if isinstance(e, n.NameRef):
            bound = ctx.bindings.get(e.name)
            if isinstance(bound, int):
                return n.IntLit(bound, loc=e.loc)
            if isinstance(bound, TypeRepr):
                raise TemplateError(f"type parameter {e.name!r} used as a value", e.loc)
            return e
        if isinstance(e, n.TemplateId):
            args = tuple(self._resolve_targ(a, ctx, e.loc) for a in e.args)
            mangled = self._demand_callable(e.name, args, [], ctx, e.loc)
            return n.NameRef(mangled, loc=e.loc)
        if isinstance(e, n.Call):
            args = tuple(self._resolve_expr(a, ctx) for a in e.args)
            callee = e.callee
            if isinstance(callee, n.TemplateId):
                targs = tuple(self._resolve_targ(a, ctx, e.loc) for a in callee.args)
                sketches = [self._sketch(a, ctx) for a in args]
                mangled = self._demand_callable(callee.name, targs, sketches, ctx, callee.loc)
                callee = n.NameRef(mangled, loc=callee.loc)
            elif isinstance(callee, n.NameRef) and callee.name in self.by_name:
                mangled = self._deduce_call(callee.name, args, ctx, callee.loc)
                callee = n.NameRef(mangled, loc=callee.loc)
            else:
                callee = self._resolve_expr(callee, ctx)
            return replace(e, callee=callee, args=args)
        if isinstance(e, n.Unary):
            return replace(e, operand=self._resolve_expr(e.operand, ctx))
        if isinstance(e, n.Binary):
            return replace(e, lhs=self._resolve_expr(e.lhs, ctx),
                           rhs=self._resolve_expr(e.rhs, ctx))
        if isinstance(e, n.Member):
            return replace(e, obj=self._resolve_expr(e.obj, ctx))
        if isinstance(e, n.Index):
            return replace(e, obj=self._resolve_expr(e.obj, ctx),
                           index=self._resolve_expr(e.index, ctx))
        if isinstance(e, n.NewExpr):
            ty = self._resolve_type_ctx(e.elem_type, ctx, e.loc)
            args = tuple(self._resolve_expr(a, ctx) for a in e.args) if e.args is not None else None
            count = self._resolve_expr(e.count, ctx) if e.count is not None else None
            return replace(e, elem_type=ty, args=args, count=count)
        if isinstance(e, n.Move):
            return replace(e, arg=self._resolve_expr(e.arg, ctx))
        if isinstance(e, n.IncDec):
            return replace(e, target=self._resolve_expr(e.target, ctx))
        if isinstance(e, n.Cast):
            return replace(e, target=self._resolve_type_ctx(e.target, ctx, e.loc),
                           arg=self._resolve_expr(e.arg, ctx))
        return e

    def _demand_callable(self, name: str, targs: tuple, sketches: list,
                         ctx: "_Ctx", loc: SourceLocation) -> str:
        templ = self.by_name.get(name)
        if templ is not None and isinstance(templ.decl, n.MethodDecl):
            return self.demand_function(name, targs, ctx.bindings, loc, ctx.depth)
        if templ is not None and isinstance(templ.decl, n.ClassDecl):
            raise TemplateError(f"class template {name!r} used as a function", loc)
        if name in self.friends:
            return self.demand_friend(name, targs, sketches, loc, ctx.depth)
        raise TemplateError(f"unresolved template name {name!r}", loc)

    def _deduce_call(self, name: str, args: tuple, ctx: "_Ctx",
                     loc: SourceLocation) -> str:
        templ = self.by_name[name]
        if not isinstance(templ.decl, n.MethodDecl):
            raise TemplateError(f"class template {name!r} used as a function", loc)
        mentioned = set()
        for p in templ.decl.params:
            mentioned |= _mentioned_params(p.ty)
        tparam_names = [p.name for p in templ.params]
        if set(tparam_names) - mentioned:
            raise TemplateError(
                f"cannot deduce arguments for {name!r}: parameters do not mention "
                "every template parameter", loc)
        bound: dict = {}
        for p, a in zip(templ.decl.params, args):
            sk = self._sketch(a, ctx)
            if sk is not None:
                _unify(p.ty, sk, bound, loc)
        try:
            targs = tuple(bound[t] for t in tparam_names)
        except KeyError as exc:
            raise TemplateError(
                f"cannot deduce template argument {exc.args[0]!r} for {name!r}", loc)
        return self.demand_function(name, targs, ctx.bindings, loc, ctx.depth)

    def _resolve_method_plain(self, m: n.MethodDecl, ctx: "_Ctx") -> n.MethodDecl:
        sub = _Ctx(ctx.bindings, depth=ctx.depth)
        params = tuple(
            replace(p, ty=self._resolve_type_ctx(p.ty, sub, p.loc)) for p in m.params)
        sub.locals = {p.name: p.ty for p in params if p.name}
        ret = self._resolve_type_ctx(m.ret, sub, m.loc)
        body = self._resolve_block(m.body, sub) if m.body is not None else None
        return replace(m, params=params, ret=ret, body=body)

    # --- sketch typing (pre-typecheck, for deduction only) ----------------------
    def _sketch(self, e: n.Expr, ctx: "_Ctx") -> TypeRepr | None:
        if isinstance(e, n.IntLit):
            return int_t(self.int_width)
        if isinstance(e, n.BoolLit):
            return TypeRepr("bool")
        if isinstance(e, n.CharLit):
            return TypeRepr("char")
        if isinstance(e, n.NullLit):
            return ptr(class_t("void"))
        if isinstance(e, n.NameRef):
            if e.name in ctx.locals:
                return ctx.locals[e.name]
            return self.globals_env.get(e.name)
        if isinstance(e, n.Unary):
            if e.op == "&":
                inner = self._sketch(e.operand, ctx)
                return ptr(inner) if inner is not None else None
            if e.op == "*":
                inner = self._sketch(e.operand, ctx)
                if inner is not None and inner.kind in ("ptr",):
                    return inner.to
                return None
            if e.op == "!":
                return TypeRepr("bool")
            return self._sketch(e.operand, ctx)
        if isinstance(e, n.Binary):
            if e.op in ("==", "!=", "<", ">", "<=", ">=", "&&", "||"):
                return TypeRepr("bool")
            return int_t(self.int_width)
        if isinstance(e, n.Move):
            inner = self._sketch(e.arg, ctx)
            return rref(inner.strip_ref()) if inner is not None else None
        return None


@dataclass
class _Ctx:
    bindings: dict
    enclosing: str = ""
    enclosing_instance: str = ""
    depth: int = 0
    locals: dict = field(default_factory=dict)


def _mentioned_params(t: TypeRepr | None) -> set[str]:
    if t is None:
        return set()
    out: set[str] = set()
    if t.kind == "tmpl":
        if not t.params:
            out.add(t.name)
        for a in t.params:
            if isinstance(a, str):
                out.add(a)
            elif isinstance(a, TypeRepr):
                out |= _mentioned_params(a)
    for child in (t.to, t.ret):
        out |= _mentioned_params(child)
    for p in t.params:
        if isinstance(p, TypeRepr):
            out |= _mentioned_params(p)
    return out


def _unify(pattern: TypeRepr, concrete: TypeRepr, bound: dict, loc: SourceLocation) -> None:
    if pattern.is_reference and not concrete.is_reference:
        _unify(pattern.to.strip_const(), concrete, bound, loc)
        return
    if pattern.kind == "tmpl" and not pattern.params:
        prev = bound.get(pattern.name)
        value = concrete.strip_ref().strip_const()
        if prev is not None and not prev == value:
            raise TemplateError(f"conflicting deductions for {pattern.name!r}", loc)
        bound[pattern.name] = value
        return
    if pattern.kind in ("ptr", "lref", "rref", "array") and concrete.kind == pattern.kind:
        _unify(pattern.to, concrete.to, bound, loc)


def instantiate(templates: list[n.TemplateDecl], residual: n.Program,
                depth_cap: int = DEFAULT_DEPTH_CAP, int_width: int = 32
                ) -> tuple[n.Program, list[str]]:
    """Expand all template uses; the result contains no template constructs."""
    inst = Instantiator(templates, depth_cap, int_width)
    ctx = _Ctx({})
    out: list = []
    for d in residual.decls:
        if isinstance(d, n.GlobalDecl):
            ty = inst._resolve_type_ctx(d.ty, ctx, d.loc)
            init = inst._resolve_expr(d.init, ctx) if d.init is not None else None
            inst.globals_env[d.name] = ty
            out.append(replace(d, ty=ty, init=init))
        elif isinstance(d, n.ClassDecl):
            fields = tuple(
                replace(f, ty=inst._resolve_type_ctx(f.ty, ctx, f.loc)) for f in d.fields)
            methods = tuple(inst._resolve_method_plain(m, ctx) for m in d.methods)
            out.append(replace(d, fields=fields, methods=methods))
        elif isinstance(d, n.MethodDecl):
            out.append(inst._resolve_method_plain(d, ctx))
        else:
            raise TemplateError("unexpected declaration kind", d.loc)
    out.extend(inst.instances)
    program = n.Program(tuple(out), filename=residual.filename)
    return program, list(inst.stamped)


def instantiate_program(program: n.Program, depth_cap: int = DEFAULT_DEPTH_CAP,
                        int_width: int = 32) -> tuple[n.Program, list[str]]:
    """collect_templates + instantiate in one step."""
    templates, residual = collect_templates(program)
    return instantiate(templates, residual, depth_cap, int_width)
