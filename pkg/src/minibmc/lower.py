"""Lowering from the typed AST to the GOTO program.

Virtual calls become slot dispatch through the receiver's vptr with thunk
functions emitted per override; `new`/`delete` become NEW/DELETE plus
constructor calls; rvalue-reference (and lvalue-reference) variables lower
to pointers with implicit dereference on every use; try/catch lowers to
CATCH brackets with fall-through GOTOs; `throw` carries the dynamic type's
tag followed by its bases bottom-up.
"""

from __future__ import annotations

from dataclasses import replace

from minibmc import nodes as n
from minibmc.cxxtypes import (
    BOOL_T, TypeRepr, VOID, class_t, int_t, ptr, type_tag,
)
from minibmc.errors import NO_LOC, SourceLocation, TypeCheckError
from minibmc.gotoprog import (
    DirectCallee, GotoFunction, GotoProgram, HandlerEntry, Instruction,
    VirtualCallee,
)
from minibmc.layout import Layouts, vptr_member
from minibmc.typecheck import MethodInfo, TypedProgram

INIT_FUNCTION = "__initialize_globals"


def _simple_name(internal: str) -> str:
    return internal.split("::")[-1].split("(")[0]


class FunctionLowerer:
    def __init__(self, pl: "ProgramLowerer", name: str, display: str,
                 params: tuple, ret: TypeRepr, throw_spec=None):
        self.pl = pl
        self.tp = pl.tp
        self.layouts = pl.layouts
        self.fn = GotoFunction(name, display, params, ret, throw_spec=throw_spec)
        self.display = display
        self.next_label = 1
        self.pending_labels: list[int] = []
        self.temp_count = 0
        self.tmp_count = 0
        self.scopes: list[list[tuple[str, TypeRepr]]] = [[]]
        self.var_types: dict[str, TypeRepr] = {p: t for p, t in params}
        self.addressable: set[str] = set()
        self.this_class = ""

    # --- emission helpers ----------------------------------------------------
    def emit(self, ins: Instruction) -> Instruction:
        if self.pending_labels:
            ins.labels = tuple(self.pending_labels)
            self.pending_labels = []
        if not ins.loc.function:
            ins.loc = ins.loc.with_function(self.display)
        self.fn.instrs.append(ins)
        return ins

    def fresh_label(self) -> int:
        lbl = self.next_label
        self.next_label += 1
        return lbl

    def place_label(self, lbl: int) -> None:
        self.pending_labels.append(lbl)

    def temp(self, ty: TypeRepr, loc: SourceLocation) -> str:
        name = "return_value" if self.temp_count == 0 else f"return_value${self.temp_count}"
        self.temp_count += 1
        addressable = ty.strip_const().kind in ("class", "array")
        self.emit(Instruction("DECL", loc, var=name, var_type=ty,
                              addressable=addressable))
        self.var_types[name] = ty
        return name

    def throw_temp(self, ty: TypeRepr, loc: SourceLocation) -> str:
        name = "tmp" if self.tmp_count == 0 else f"tmp${self.tmp_count}"
        self.tmp_count += 1
        self.emit(Instruction("DECL", loc, var=name, var_type=ty, addressable=True))
        self.var_types[name] = ty
        self.scopes[-1].append((name, ty))
        return name

    # --- addressability --------------------------------------------------------
    def scan_addressable(self, b: n.Block | None) -> None:
        """Locals whose address is observable live in the object store."""
        if b is None:
            return

        def expr(e):
            if isinstance(e, n.Unary) and e.op == "&" and isinstance(e.operand, n.NameRef):
                self.addressable.add(e.operand.name)
            if isinstance(e, n.Move) and isinstance(e.arg, n.NameRef):
                self.addressable.add(e.arg.name)
            if isinstance(e, n.Call):
                ptys = self.pl.param_types_of(e)
                for a, pty in zip(e.args, ptys):
                    if pty is not None and pty.is_reference and isinstance(a, n.NameRef):
                        self.addressable.add(a.name)
            for child in getattr(e, "__dict__", {}).values():
                if isinstance(child, n.Expr):
                    expr(child)
                elif isinstance(child, tuple):
                    for c in child:
                        if isinstance(c, n.Expr):
                            expr(c)

        def stmt(s):
            if isinstance(s, n.Block):
                for x in s.stmts:
                    stmt(x)
                return
            if isinstance(s, n.DeclStmt):
                if s.ty.strip_const().kind in ("class", "array"):
                    self.addressable.add(s.name)
                if s.ty.is_reference and isinstance(s.init, n.NameRef):
                    self.addressable.add(s.init.name)
            for child in s.__dict__.values():
                if isinstance(child, n.Expr):
                    expr(child)
                elif isinstance(child, (n.Block, n.Stmt)):
                    stmt(child)
                elif isinstance(child, tuple):
                    for c in child:
                        if isinstance(c, n.Expr):
                            expr(c)
                        elif isinstance(c, (n.Block, n.Stmt, n.Handler)):
                            if isinstance(c, n.Handler):
                                stmt(c.body)
                            else:
                                stmt(c)

        stmt(b)

    # --- expressions --------------------------------------------------------------
    def lower_expr(self, e: n.Expr) -> n.Expr:
        """Hoist calls/news/moves into temporaries; return a pure expression."""
        if isinstance(e, n.Call):
            return self.lower_call(e)
        if isinstance(e, n.NewExpr):
            return self.lower_new(e)
        if isinstance(e, n.Move):
            return self.lower_move(e)
        if isinstance(e, n.NameRef):
            return self.name_value(e)
        if isinstance(e, n.Unary):
            return replace(e, operand=self.lower_expr(e.operand))
        if isinstance(e, n.Binary):
            return replace(e, lhs=self.lower_expr(e.lhs), rhs=self.lower_expr(e.rhs))
        if isinstance(e, n.Member):
            return replace(e, obj=self.lower_expr(e.obj))
        if isinstance(e, n.Index):
            return replace(e, obj=self.lower_expr(e.obj), index=self.lower_expr(e.index))
        if isinstance(e, n.Cast):
            return replace(e, arg=self.lower_expr(e.arg))
        return e

    def name_value(self, e: n.NameRef) -> n.Expr:
        if e.binding == "field":
            this = n.This(loc=e.loc)
            this.ty = ptr(class_t(self.this_class))
            m = n.Member(this, e.name, arrow=True, loc=e.loc)
            m.field_class = e.binding_class
            m.ty = e.ty
            m.is_lvalue = True
            return m
        decl_ty = self.var_types.get(e.name, e.decl_ty)
        if decl_ty is not None and decl_ty.is_reference:
            # reference variables are pointers; uses dereference them
            inner = replace(e)
            inner.ty = ptr(decl_ty.to)
            out = n.Unary("*", inner, loc=e.loc)
            out.ty = e.ty
            out.is_lvalue = True
            return out
        if decl_ty is not None and decl_ty.strip_const().kind == "class" \
                and e.name in dict(self.fn.params):
            # class-valued parameters are lowered to pointers
            inner = replace(e)
            inner.ty = ptr(decl_ty.strip_const())
            out = n.Unary("*", inner, loc=e.loc)
            out.ty = e.ty
            out.is_lvalue = True
            return out
        return e

    def lower_call(self, e: n.Call) -> n.Expr:
        callee = e.callee
        if e.call_kind == "ctor":
            cls = e.call_class
            tmp = self.throw_temp(class_t(cls), e.loc)
            ref = n.NameRef(tmp, loc=e.loc)
            ref.ty = class_t(cls)
            ref.is_lvalue = True
            self.emit_ctor_call(e.call_target, self.addr_of(ref, e.loc),
                                tuple(e.args), e.loc)
            out = n.NameRef(tmp, loc=e.loc)
            out.ty = class_t(cls)
            out.is_lvalue = True
            return out
        if e.call_kind in ("method", "virtual"):
            if isinstance(callee, n.Member):
                if callee.arrow:
                    recv = self.lower_expr(callee.obj)
                else:
                    recv = self.addr_of(self.lower_expr(callee.obj), callee.obj.loc)
            else:  # unqualified call inside a member function
                recv = n.This(loc=e.loc)
                recv.ty = ptr(class_t(self.this_class))
            args = (recv,) + tuple(
                self.lower_arg(a, pty)
                for a, pty in zip(e.args, self.pl.param_types_of(e)))
            if e.call_kind == "virtual":
                plan = self.layouts.resolve_virtual_call(e.call_class, _simple_name(e.call_target))
                callee_obj = VirtualCallee(plan.path_root, plan.slot_index,
                                           plan.method_name, e.call_class,
                                           tuple(plan.candidates))
            else:
                callee_obj = DirectCallee(e.call_target, _simple_name(e.call_target))
        else:
            args = tuple(self.lower_arg(a, pty)
                         for a, pty in zip(e.args, self.pl.param_types_of(e)))
            callee_obj = DirectCallee(e.call_target, e.call_target)
        ret = e.ty or VOID
        if ret.is_void:
            self.emit(Instruction("FUNCTION_CALL", e.loc, callee=callee_obj, args=args))
            return n.IntLit(0, loc=e.loc)
        goto_ret = self.lowered_type(ret)
        rv = self.temp(goto_ret, e.loc)
        self.emit(Instruction("FUNCTION_CALL", e.loc, callee=callee_obj, args=args,
                              lhs_var=rv))
        out = n.NameRef(rv, loc=e.loc)
        out.ty = ret.strip_ref()
        out.decl_ty = goto_ret
        if ret.is_reference:
            deref = n.Unary("*", out, loc=e.loc)
            deref.ty = ret.strip_ref()
            deref.is_lvalue = True
            out.ty = goto_ret
            return deref
        if ret.strip_const().kind == "class":
            out.is_lvalue = True  # names the materialized result temporary
        return out

    def lower_arg(self, a: n.Expr, pty: TypeRepr | None) -> n.Expr:
        if pty is not None and pty.is_reference:
            if isinstance(a, n.Move):
                return self.lower_move(a)
            low = self.lower_expr(a)
            if (low.ty or VOID).strip_const().kind == "ptr":
                return low
            if low.is_lvalue or (low.ty or VOID).strip_const().kind == "class":
                return self.addr_of(low, a.loc)
            return self.materialize(low, a.ty or VOID, a.loc)
        if pty is not None and pty.strip_const().kind == "class":
            # pass-by-value of a class: copy into a temporary, pass its address
            low = self.lower_expr(a)
            cls = pty.strip_const().name
            tmp = self.throw_temp(pty.strip_const(), a.loc)
            self.copy_object(tmp, low, cls, a.loc)
            ref = n.NameRef(tmp, loc=a.loc)
            ref.ty = class_t(cls)
            ref.is_lvalue = True
            return self.addr_of(ref, a.loc)
        return self.lower_expr(a)

    def copy_object(self, dst_var: str, src: n.Expr, cls: str, loc: SourceLocation) -> None:
        for decl_cls, fname, fty in self.layouts.models[cls].fields:
            dst = n.NameRef(dst_var, loc=loc)
            dst.ty = class_t(cls)
            dst.is_lvalue = True
            lhs = n.Member(dst, fname, loc=loc)
            lhs.field_class = decl_cls
            lhs.ty = fty
            lhs.is_lvalue = True
            rhs = n.Member(src, fname, loc=loc)
            rhs.field_class = decl_cls
            rhs.ty = fty
            self.emit(Instruction("ASSIGN", loc, lhs=lhs, rhs=rhs))

    def materialize(self, value: n.Expr, ty: TypeRepr, loc: SourceLocation) -> n.Expr:
        """Give a temporary rvalue addressable storage and return its address."""
        name = self.throw_temp(ty.strip_const().strip_ref(), loc)
        ref = n.NameRef(name, loc=loc)
        ref.ty = ty.strip_const().strip_ref()
        ref.is_lvalue = True
        self.emit(Instruction("ASSIGN", loc, lhs=ref, rhs=value))
        return self.addr_of(ref, loc)

    def addr_of(self, e: n.Expr, loc: SourceLocation) -> n.Expr:
        if isinstance(e, n.Unary) and e.op == "*":
            return e.operand
        out = n.Unary("&", e, loc=loc)
        out.ty = ptr(e.ty if e.ty is not None else VOID)
        return out

    def lower_new(self, e: n.NewExpr) -> n.Expr:
        elem = e.elem_type
        pty = ptr(elem)
        tmp = self.temp(pty, e.loc)
        count = self.lower_expr(e.count) if e.count is not None else None
        self.emit(Instruction("NEW", e.loc, lhs_var=tmp, elem_type=elem,
                              count=count, is_array=e.count is not None))
        out = n.NameRef(tmp, loc=e.loc)
        out.ty = pty
        out.decl_ty = pty
        if elem.strip_const().kind == "class":
            cls = elem.strip_const().name
            if e.count is None:
                args = tuple(e.args or ())
                self.emit_ctor_call(e.ctor_name, out, args, e.loc)
            else:
                if not self.pl.ctor_is_trivial(cls):
                    if not isinstance(count, n.IntLit):
                        raise TypeCheckError(
                            "dynamic class arrays with non-trivial constructors "
                            "need a constant size", e.loc)
                    for i in range(count.value):
                        idx = n.Index(out, n.IntLit(i, loc=e.loc), loc=e.loc)
                        idx.ty = class_t(cls)
                        idx.is_lvalue = True
                        self.emit_ctor_call(e.ctor_name, self.addr_of(idx, e.loc), (), e.loc)
        elif e.args:
            init = self.lower_expr(e.args[0])
            deref = n.Unary("*", out, loc=e.loc)
            deref.ty = elem
            deref.is_lvalue = True
            self.emit(Instruction("ASSIGN", e.loc, lhs=deref, rhs=init))
        return out

    def emit_ctor_call(self, ctor_name: str, this_ptr: n.Expr, args: tuple,
                       loc: SourceLocation) -> None:
        cls = ctor_name.split("::")[0] if ctor_name else ""
        if ctor_name and self.pl.ctor_is_trivial_name(ctor_name):
            return
        mi = self.pl.method_by_internal(ctor_name)
        largs = (this_ptr,) + tuple(
            self.lower_arg(a, pty) for a, pty in zip(args, mi.signature.params))
        self.emit(Instruction("FUNCTION_CALL", loc,
                              callee=DirectCallee(ctor_name, _simple_name(ctor_name)),
                              args=largs))

    def lower_move(self, e: n.Move) -> n.Expr:
        arg = self.lower_expr(e.arg)
        addr = self.addr_of(arg, e.loc)
        rty = ptr(e.arg.ty if e.arg.ty is not None else VOID)
        tmp = self.temp(rty, e.loc)
        self.emit(Instruction("FUNCTION_CALL", e.loc,
                              callee=DirectCallee("move", "move"),
                              args=(addr,), lhs_var=tmp))
        out = n.NameRef(tmp, loc=e.loc)
        out.ty = rty
        out.decl_ty = rty
        return out

    def lowered_type(self, t: TypeRepr) -> TypeRepr:
        if t.is_reference:
            return ptr(t.to)
        return t

    # --- statements ------------------------------------------------------------------
    def lower_block(self, b: n.Block) -> None:
        self.scopes.append([])
        for s in b.stmts:
            self.lower_stmt(s)
        self.close_scope(b.loc)

    def close_scope(self, loc: SourceLocation) -> None:
        for name, ty in reversed(self.scopes[-1]):
            self.destroy_local(name, ty, loc)
        for name, _ in reversed(self.scopes[-1]):
            self.emit(Instruction("DEAD", loc, var=name))
        self.scopes.pop()

    def destroy_local(self, name: str, ty: TypeRepr, loc: SourceLocation) -> None:
        base = ty.strip_const()
        if base.kind != "class":
            return
        dtor = self.tp.dtor(base.name)
        if dtor is None:
            return
        ref = n.NameRef(name, loc=loc)
        ref.ty = base
        ref.is_lvalue = True
        self.emit(Instruction("FUNCTION_CALL", loc,
                              callee=DirectCallee(dtor.internal_name, "~" + base.name),
                              args=(self.addr_of(ref, loc),)))

    def lower_stmt(self, s: n.Stmt) -> None:
        if isinstance(s, n.Block):
            self.lower_block(s)
        elif isinstance(s, n.DeclStmt):
            self.lower_decl(s)
        elif isinstance(s, n.ExprStmt):
            if isinstance(s.expr, n.IncDec):
                self.lower_incdec(s.expr)
            else:
                self.lower_expr(s.expr)
        elif isinstance(s, n.AssignStmt):
            self.lower_assign(s.lhs, s.rhs, s.loc)
        elif isinstance(s, n.IfStmt):
            self.lower_if(s)
        elif isinstance(s, n.WhileStmt):
            self.lower_while(s)
        elif isinstance(s, n.ForStmt):
            self.lower_for(s)
        elif isinstance(s, n.ReturnStmt):
            self.lower_return(s)
        elif isinstance(s, n.AssertStmt):
            cond = self.lower_expr(s.cond)
            self.emit(Instruction("ASSERT", s.loc, cond=cond,
                                  property_class="assertion", comment=s.text))
        elif isinstance(s, n.TryStmt):
            self.lower_try(s)
        elif isinstance(s, n.ThrowStmt):
            self.lower_throw(s)
        elif isinstance(s, n.DeleteStmt):
            self.lower_delete(s)
        else:
            raise TypeCheckError(f"cannot lower {type(s).__name__}", s.loc)

    def lower_decl(self, s: n.DeclStmt) -> None:
        goto_ty = self.lowered_type(s.ty)
        addressable = s.name in self.addressable or goto_ty.strip_const().kind in ("class", "array")
        self.emit(Instruction("DECL", s.loc, var=s.name, var_type=goto_ty,
                              addressable=addressable))
        self.var_types[s.name] = s.ty
        self.scopes[-1].append((s.name, s.ty))
        base = s.ty.strip_const()
        if s.ty.is_reference:
            init = s.init
            if isinstance(init, n.Move):
                value = self.lower_move(init)
            else:
                low = self.lower_expr(init)
                if init.is_lvalue:
                    value = self.addr_of(low, s.loc)
                elif (low.ty or VOID).strip_const().kind == "ptr":
                    value = low
                else:
                    value = self.materialize(low, init.ty or VOID, s.loc)
            lhs = n.NameRef(s.name, loc=s.loc)
            lhs.ty = goto_ty
            lhs.is_lvalue = True
            self.emit(Instruction("ASSIGN", s.loc, lhs=lhs, rhs=value))
            return
        if base.kind == "class":
            cls = base.name
            ref = n.NameRef(s.name, loc=s.loc)
            ref.ty = base
            ref.is_lvalue = True
            if s.init_kind == "brace":
                inits = []
                flat = self.layouts.models[cls].fields
                for e, (decl_cls, fname, fty) in zip(s.init, flat):
                    inits.append((f"{decl_cls}::{fname}", self.lower_expr(e)))
                lit = n.StructLit(cls, tuple(inits), loc=s.loc)
                lit.ty = base
                self.emit(Instruction("ASSIGN", s.loc, lhs=ref, rhs=lit))
                self.init_vptrs_direct(s.name, cls, s.loc)
            elif s.init_kind in ("call", "="):
                args = s.init if s.init_kind == "call" else (s.init,)
                self.emit_ctor_call(s.ctor_name, self.addr_of(ref, s.loc),
                                    tuple(args), s.loc)
            else:
                self.emit_ctor_call(s.ctor_name, self.addr_of(ref, s.loc), (), s.loc)
            return
        if s.init_kind in ("=",) and isinstance(s.init, n.Expr):
            rhs = self.lower_expr(s.init)
            lhs = n.NameRef(s.name, loc=s.loc)
            lhs.ty = base
            lhs.decl_ty = s.ty
            lhs.is_lvalue = True
            self.emit(Instruction("ASSIGN", s.loc, lhs=lhs, rhs=rhs))
        elif s.init_kind in ("call", "brace") and s.init:
            rhs = self.lower_expr(s.init[0])
            lhs = n.NameRef(s.name, loc=s.loc)
            lhs.ty = base
            lhs.decl_ty = s.ty
            lhs.is_lvalue = True
            self.emit(Instruction("ASSIGN", s.loc, lhs=lhs, rhs=rhs))

    def init_vptrs_direct(self, var: str, cls: str, loc: SourceLocation) -> None:
        # brace-initialized aggregates never run a constructor; vptrs are
        # impossible there (aggregates have no virtuals), kept for safety
        for p in self.layouts.models[cls].vptr_paths:
            ref = n.NameRef(var, loc=loc)
            ref.ty = class_t(cls)
            ref.is_lvalue = True
            lhs = n.Member(ref, vptr_member(p), loc=loc)
            lhs.field_class = cls
            lhs.ty = int_t(self.tp.int_width)
            lhs.is_lvalue = True
            vid = self.layouts.vtable_id(cls, p)
            self.emit(Instruction("ASSIGN", loc, lhs=lhs, rhs=n.IntLit(vid, loc=loc)))

    def lower_incdec(self, e: n.IncDec) -> None:
        target = self.lower_expr(e.target)
        one = n.IntLit(1, loc=e.loc)
        one.ty = int_t(self.tp.int_width)
        rhs = n.Binary(e.op, target, one, loc=e.loc)
        rhs.ty = int_t(self.tp.int_width)
        self.emit(Instruction("ASSIGN", e.loc, lhs=target, rhs=rhs))

    def lower_assign(self, lhs: n.Expr, rhs: n.Expr, loc: SourceLocation) -> None:
        lty = (lhs.ty or VOID).strip_const()
        if lty.kind == "class":
            llow = self.lower_expr(lhs)
            rlow = self.lower_expr(rhs)
            for decl_cls, fname, fty in self.layouts.models[lty.name].fields:
                l = n.Member(llow, fname, loc=loc)
                l.field_class = decl_cls
                l.ty = fty
                l.is_lvalue = True
                r = n.Member(rlow, fname, loc=loc)
                r.field_class = decl_cls
                r.ty = fty
                self.emit(Instruction("ASSIGN", loc, lhs=l, rhs=r))
            return
        llow = self.lower_expr(lhs)
        rlow = self.lower_expr(rhs)
        self.emit(Instruction("ASSIGN", loc, lhs=llow, rhs=rlow))

    def lower_if(self, s: n.IfStmt) -> None:
        cond = self.lower_expr(s.cond)
        not_cond = n.Unary("!", cond, loc=s.loc)
        not_cond.ty = BOOL_T
        else_lbl = self.fresh_label()
        end_lbl = self.fresh_label() if s.els is not None else else_lbl
        self.emit(Instruction("GOTO", s.loc, cond=not_cond, target=else_lbl))
        self.lower_block(s.then)
        if s.els is not None:
            self.emit(Instruction("GOTO", s.loc, target=end_lbl))
            self.place_label(else_lbl)
            self.lower_block(s.els)
        self.place_label(end_lbl)
        self.emit(Instruction("SKIP", s.loc))

    def lower_while(self, s: n.WhileStmt) -> None:
        head_lbl = self.fresh_label()
        exit_lbl = self.fresh_label()
        self.place_label(head_lbl)
        cond = self.lower_expr(s.cond)
        not_cond = n.Unary("!", cond, loc=s.loc)
        not_cond.ty = BOOL_T
        head = self.emit(Instruction("GOTO", s.loc, cond=not_cond, target=exit_lbl))
        self.lower_block(s.body)
        self.emit(Instruction("GOTO", s.loc, target=head_lbl))
        self.place_label(exit_lbl)
        self.emit(Instruction("SKIP", s.loc))

    def lower_for(self, s: n.ForStmt) -> None:
        self.scopes.append([])
        if s.init is not None:
            self.lower_stmt(s.init)
        head_lbl = self.fresh_label()
        exit_lbl = self.fresh_label()
        self.place_label(head_lbl)
        if s.cond is not None:
            cond = self.lower_expr(s.cond)
            not_cond = n.Unary("!", cond, loc=s.loc)
            not_cond.ty = BOOL_T
            self.emit(Instruction("GOTO", s.loc, cond=not_cond, target=exit_lbl))
        self.lower_block(s.body)
        if s.step is not None:
            self.lower_stmt(s.step)
        self.emit(Instruction("GOTO", s.loc, target=head_lbl))
        self.place_label(exit_lbl)
        self.emit(Instruction("SKIP", s.loc))
        self.close_scope(s.loc)

    def lower_return(self, s: n.ReturnStmt) -> None:
        value = None
        if s.value is not None:
            value = self.lower_expr(s.value)
        # destroy every class local in scope, innermost first
        for scope in reversed(self.scopes):
            for name, ty in reversed(scope):
                self.destroy_local(name, ty, s.loc)
        self.emit(Instruction("RETURN", s.loc, value=value))

    def lower_try(self, s: n.TryStmt) -> None:
        entries = []
        handler_lbls = []
        for h in s.handlers:
            lbl = self.fresh_label()
            handler_lbls.append(lbl)
            if h.htype is None:
                entries.append(HandlerEntry("...", None, lbl, h.var))
            else:
                entries.append(HandlerEntry(type_tag(h.htype), h.htype, lbl, h.var))
        end_lbl = self.fresh_label()
        self.emit(Instruction("CATCH_BEGIN", s.loc, handlers=tuple(entries)))
        self.lower_block(s.body)
        self.emit(Instruction("CATCH_END", s.loc))
        self.emit(Instruction("GOTO", s.loc, target=end_lbl))
        for i, (h, lbl) in enumerate(zip(s.handlers, handler_lbls)):
            self.place_label(lbl)
            marker = "..." if h.htype is None else type_tag(h.htype)[4:]
            self.emit(Instruction("SKIP", h.loc, comment=marker))
            if h.var:
                self.var_types[h.var] = h.htype
            self.lower_block(h.body)
            if i + 1 < len(s.handlers):
                self.emit(Instruction("GOTO", h.loc, target=end_lbl))
        self.place_label(end_lbl)
        self.emit(Instruction("SKIP", s.loc))

    def lower_throw(self, s: n.ThrowStmt) -> None:
        if s.value is None:
            self.emit(Instruction("THROW", s.loc, tags=(), value=None))
            return
        vty = (s.value.ty or VOID).strip_ref()
        tags = [type_tag(vty)]
        base = vty.strip_const()
        if base.kind == "class":
            for b in self.tp.base_chain(base.name):
                tags.append(type_tag(class_t(b)))
        if base.kind == "class":
            # the thrown value is copied into an exception temporary
            tmp = self.throw_temp(base, s.loc)
            ref = n.NameRef(tmp, loc=s.loc)
            ref.ty = base
            ref.is_lvalue = True
            if isinstance(s.value, n.Call) and s.value.call_kind == "ctor":
                # Derived(args) constructs straight into the temporary
                self.emit_ctor_call(s.value.call_target, self.addr_of(ref, s.loc),
                                    tuple(s.value.args), s.loc)
            else:
                src = self.lower_expr(s.value)
                self.copy_object(tmp, src, base.name, s.loc)
            val = n.NameRef(tmp, loc=s.loc)
            val.ty = base
            val.is_lvalue = True
            self.emit(Instruction("THROW", s.loc, tags=tuple(tags), value=val,
                                  value_type=vty))
            return
        value = self.lower_expr(s.value)
        self.emit(Instruction("THROW", s.loc, tags=tuple(tags), value=value,
                              value_type=vty))

    def lower_delete(self, s: n.DeleteStmt) -> None:
        target = self.lower_expr(s.target)
        pointee = (s.target.ty or VOID).strip_ref()
        if pointee.kind == "ptr" and pointee.to.strip_const().kind == "class":
            cls = pointee.to.strip_const().name
            dtor = self.tp.dtor(cls)
            if dtor is not None:
                self.emit(Instruction("FUNCTION_CALL", s.loc,
                                      callee=DirectCallee(dtor.internal_name, "~" + cls),
                                      args=(target,)))
        self.emit(Instruction("DELETE", s.loc, value=target, is_array=s.is_array))


class ProgramLowerer:
    def __init__(self, tp: TypedProgram, layouts: Layouts):
        self.tp = tp
        self.layouts = layouts
        self.functions: dict[str, GotoFunction] = {}
        self._method_index: dict[str, MethodInfo] = {}
        for ci in tp.classes.values():
            for m in ci.methods:
                self._method_index[m.internal_name] = m

    def method_by_internal(self, name: str) -> MethodInfo:
        return self._method_index[name]

    def param_types_of(self, e: n.Call) -> list[TypeRepr | None]:
        if e.call_kind in ("method", "virtual"):
            mi = self._method_index.get(e.call_target)
            return list(mi.signature.params) if mi else [None] * len(e.args)
        f = self.tp.functions.get(e.call_target)
        if f is not None:
            return [p.ty for p in f.params]
        return [None] * len(e.args)

    def ctor_is_trivial(self, cls: str) -> bool:
        """Implicit default ctor, empty body, no vptrs, trivial bases."""
        ci = self.tp.classes[cls]
        if self.layouts.models[cls].vptr_paths:
            return False
        default = None
        for m in ci.methods:
            if m.is_ctor and not m.signature.params:
                default = m
        if default is None or not default.implicit:
            return False
        if default.decl.body is not None and default.decl.body.stmts:
            return False
        return all(self.ctor_is_trivial(b) for b in ci.bases)

    def ctor_is_trivial_name(self, internal: str) -> bool:
        mi = self._method_index.get(internal)
        if mi is None or not mi.is_ctor:
            return False
        if mi.signature.params:
            return False
        return self.ctor_is_trivial(mi.defining_class)

    def default_ctor_name(self, cls: str) -> str:
        for m in self.tp.classes[cls].methods:
            if m.is_ctor and not m.signature.params:
                return m.internal_name
        raise TypeCheckError(f"no default constructor for {cls!r}")

    # --- function synthesis ------------------------------------------------------
    def lower(self) -> GotoProgram:
        for ci in self.tp.classes.values():
            for mi in ci.methods:
                if mi.decl.body is not None:
                    self.lower_method(ci.name, mi)
        for name, f in self.tp.functions.items():
            if f.body is not None:
                self.lower_free_function(name, f)
        for tn, ti in self.layouts.thunks.items():
            self.synthesize_thunk(tn, ti)
        self.synthesize_move()
        init = self.synthesize_global_init()
        prog = GotoProgram(self.functions, entry="main", init_function=init)
        return prog

    def _param_tuple(self, mi_params, with_this: str = "") -> tuple:
        out = []
        if with_this:
            out.append(("this", ptr(class_t(with_this))))
        for p in mi_params:
            ty = p.ty
            if ty.is_reference:
                ty = ptr(ty.to)
            elif ty.strip_const().kind == "class":
                ty = ptr(ty.strip_const())
            out.append((p.name or f"arg{len(out)}", ty))
        return tuple(out)

    def lower_method(self, cls: str, mi: MethodInfo) -> None:
        decl = mi.decl
        params = self._param_tuple(decl.params, with_this=cls)
        display = mi.name if not mi.is_dtor else "~" + cls
        fl = FunctionLowerer(self, mi.internal_name, display, params,
                             decl.ret or VOID, decl.throw_spec)
        fl.this_class = cls
        fl.var_types.update({p.name: p.ty for p in decl.params if p.name})
        fl.scan_addressable(decl.body)
        if decl.throw_spec is not None:
            fl.emit(Instruction("THROW_DECL", decl.loc, spec=decl.throw_spec))
        if mi.is_ctor:
            self.emit_ctor_prologue(fl, cls, mi)
        if mi.is_dtor:
            self.emit_vptr_inits(fl, cls, decl.loc)
        for s in decl.body.stmts:
            fl.lower_stmt(s)
        if mi.is_dtor:
            self.emit_dtor_epilogue(fl, cls, decl.loc)
        fl.emit(Instruction("END_FUNCTION", decl.loc))
        self.functions[mi.internal_name] = fl.fn

    def emit_ctor_prologue(self, fl: FunctionLowerer, cls: str, mi: MethodInfo) -> None:
        ci = self.tp.classes[cls]
        fieldwise = mi.implicit and len(mi.signature.params) == 1
        if not fieldwise:
            for b in ci.bases:
                ctor = self.default_ctor_name(b)
                if self.ctor_is_trivial_name(ctor):
                    continue
                this = n.This(loc=mi.decl.loc)
                this.ty = ptr(class_t(cls))
                cast = n.Cast(ptr(class_t(b)), this, loc=mi.decl.loc)
                cast.ty = ptr(class_t(b))
                fl.emit(Instruction("FUNCTION_CALL", mi.decl.loc,
                                    callee=DirectCallee(ctor, _simple_name(ctor)),
                                    args=(cast,)))
        self.emit_vptr_inits(fl, cls, mi.decl.loc)

    def emit_vptr_inits(self, fl: FunctionLowerer, cls: str, loc: SourceLocation) -> None:
        for p in self.layouts.models[cls].vptr_paths:
            this = n.This(loc=loc)
            this.ty = ptr(class_t(cls))
            lhs = n.Member(this, vptr_member(p), arrow=True, loc=loc)
            lhs.field_class = ""
            lhs.ty = int_t(self.tp.int_width)
            lhs.is_lvalue = True
            vid = self.layouts.vtable_id(cls, p)
            rhs = n.IntLit(vid, loc=loc)
            rhs.ty = int_t(self.tp.int_width)
            fl.emit(Instruction("ASSIGN", loc, lhs=lhs, rhs=rhs))

    def emit_dtor_epilogue(self, fl: FunctionLowerer, cls: str, loc: SourceLocation) -> None:
        for b in reversed(self.tp.classes[cls].bases):
            dtor = self.tp.dtor(b)
            if dtor is None:
                continue
            this = n.This(loc=loc)
            this.ty = ptr(class_t(cls))
            cast = n.Cast(ptr(class_t(b)), this, loc=loc)
            cast.ty = ptr(class_t(b))
            fl.emit(Instruction("FUNCTION_CALL", loc,
                                callee=DirectCallee(dtor.internal_name, "~" + b),
                                args=(cast,)))

    def lower_free_function(self, name: str, f: n.MethodDecl) -> None:
        params = self._param_tuple(f.params)
        fl = FunctionLowerer(self, name, name, params, f.ret or VOID, f.throw_spec)
        fl.var_types.update({p.name: p.ty for p in f.params if p.name})
        fl.scan_addressable(f.body)
        if f.throw_spec is not None:
            fl.emit(Instruction("THROW_DECL", f.loc, spec=f.throw_spec))
        for s in f.body.stmts:
            fl.lower_stmt(s)
        if name == "main" and not (f.body.stmts and isinstance(f.body.stmts[-1], n.ReturnStmt)):
            zero = n.IntLit(0, loc=f.loc)
            zero.ty = int_t(self.tp.int_width)
            fl.emit(Instruction("RETURN", f.loc, value=zero))
        fl.emit(Instruction("END_FUNCTION", f.loc))
        self.functions[name] = fl.fn

    def synthesize_thunk(self, name: str, ti) -> None:
        target = ti.method
        root_ptr = ptr(class_t(ti.path_root))
        params = self._param_tuple(target.decl.params, with_this=ti.path_root)
        fl = FunctionLowerer(self, name, name, params, target.signature.ret)
        loc = target.decl.loc
        this = n.NameRef("this", loc=loc)
        this.ty = root_ptr
        cast = n.Cast(ptr(class_t(ti.override_class)), this, loc=loc)
        cast.ty = ptr(class_t(ti.override_class))
        args = [cast]
        for pname, pty in params[1:]:
            a = n.NameRef(pname, loc=loc)
            a.ty = pty
            args.append(a)
        display = f"{ti.override_class}::{target.name}"
        callee = DirectCallee(target.internal_name, display)
        if target.signature.ret.is_void:
            fl.emit(Instruction("FUNCTION_CALL", loc, callee=callee, args=tuple(args)))
            fl.emit(Instruction("RETURN", loc))
        else:
            rv = fl.temp(target.signature.ret, loc)
            fl.emit(Instruction("FUNCTION_CALL", loc, callee=callee, args=tuple(args),
                                lhs_var=rv))
            out = n.NameRef(rv, loc=loc)
            out.ty = target.signature.ret
            fl.emit(Instruction("RETURN", loc, value=out))
        fl.emit(Instruction("END_FUNCTION", loc))
        self.functions[name] = fl.fn

    def synthesize_move(self) -> None:
        params = (("ptr", ptr(VOID)),)
        fl = FunctionLowerer(self, "move", "move", params, ptr(VOID))
        out = n.NameRef("ptr", loc=NO_LOC)
        out.ty = ptr(VOID)
        fl.emit(Instruction("RETURN", NO_LOC, value=out))
        fl.emit(Instruction("END_FUNCTION", NO_LOC))
        self.functions["move"] = fl.fn

    def synthesize_global_init(self) -> str:
        if not self.tp.globals:
            return ""
        fl = FunctionLowerer(self, INIT_FUNCTION, INIT_FUNCTION, (), VOID)
        for g in self.tp.globals:
            base = g.ty.strip_const()
            loc = g.loc
            ref = n.NameRef(g.name, loc=loc)
            ref.ty = base
            ref.decl_ty = g.ty
            ref.is_lvalue = True
            ref.binding = "global"
            if base.kind == "class":
                ctor = None
                if g.init is None:
                    ctor = self.default_ctor_name(base.name)
                    fl.emit_ctor_call(ctor, fl.addr_of(ref, loc), (), loc)
                else:
                    raise TypeCheckError("class globals cannot have initializers", loc)
            elif base.kind == "array":
                continue  # zero length-bounded storage starts zeroed at symex
            else:
                if g.init is not None:
                    rhs = fl.lower_expr(g.init)
                else:
                    rhs = n.IntLit(0, loc=loc)
                    rhs.ty = int_t(self.tp.int_width)
                fl.emit(Instruction("ASSIGN", loc, lhs=ref, rhs=rhs))
        fl.emit(Instruction("END_FUNCTION", NO_LOC))
        self.functions[INIT_FUNCTION] = fl.fn
        return INIT_FUNCTION


def lower(tp: TypedProgram, layouts: Layouts) -> GotoProgram:
    """Lower a typed, template-free, layout-annotated program."""
    return ProgramLowerer(tp, layouts).lower()
