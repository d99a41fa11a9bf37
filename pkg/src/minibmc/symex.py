"""Bounded symbolic execution of the GOTO program.

Single-pass guarded execution: assignments are SSA renamings guarded by
the path condition, branch targets accumulate incoming guards and merge
by disjunction, loops are syntactically unrolled up to the bound k (the
continue path beyond k is cut with ASSUME(false), or flagged when
unwinding assertions are enabled), and calls are inlined with per-frame
renaming.  Dynamic objects carry a size term and an SSA validity flag
toggled by NEW/DELETE; dereferences emit the null/validity/bounds claims.

Pointers are guarded sets of (object, member path, element offset); a
member path names a field slot inside the object ("Foo::value", composed
with '.' for nested aggregates), the empty path the object's elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from minibmc import nodes as n
from minibmc.cxxtypes import TypeRepr, VOID, int_t, type_tag, types_equal
from minibmc.errors import InternalError, NO_LOC, SourceLocation
from minibmc.gotoprog import (
    DirectCallee, GotoFunction, GotoProgram, Instruction, VirtualCallee,
)
from minibmc.layout import Layouts
from minibmc.solver import terms as T
from minibmc.typecheck import TypedProgram
from minibmc.util import NO_DEADLINE, Deadline

NULL_ID = 0


@dataclass
class Equation:
    lhs: str            # SSA name base!frame!version
    rhs: T.Term
    guard: T.Term
    loc: SourceLocation
    display: str        # base symbol for reports
    hidden: bool = False


@dataclass
class Claim:
    guard: T.Term
    cond: T.Term
    property_class: str
    comment: str
    loc: SourceLocation
    display: str


@dataclass
class VcBundle:
    equations: list[Equation]
    claims: list[Claim]


# --- machine values ----------------------------------------------------------

@dataclass
class PtrElem:
    guard: T.Term
    obj: int            # 0 = null
    member: str         # "" = whole-object elements
    offset: T.Term


class PtrVal:
    """Guarded points-to set; the machine value of every pointer."""

    def __init__(self, elems: list[PtrElem]):
        self.elems = [e for e in elems if e.guard is not T.FALSE]

    @staticmethod
    def null(width: int) -> "PtrVal":
        return PtrVal([PtrElem(T.TRUE, NULL_ID, "", T.bv_const(width, 0))])

    def under(self, guard: T.Term) -> list[PtrElem]:
        out = []
        for e in self.elems:
            g = T.and_(guard, e.guard)
            if g is not T.FALSE:
                out.append(PtrElem(g, e.obj, e.member, e.offset))
        return out


def merge_ptr(cond: T.Term, new: PtrVal, old: PtrVal) -> PtrVal:
    if cond is T.TRUE:
        return PtrVal(list(new.elems))
    out = new.under(cond) + old.under(T.not_(cond))
    merged: dict = {}
    order: list = []
    for e in out:
        key = (e.obj, e.member, id(e.offset))
        if key in merged:
            merged[key].guard = T.or_(merged[key].guard, e.guard)
        else:
            merged[key] = e
            order.append(e)
    return PtrVal(order)


class ScalarCell:
    __slots__ = ("base", "frame", "width", "term", "engine")

    def __init__(self, engine: "SymexEngine", base: str, frame: int, width):
        self.engine = engine
        self.base = base
        self.frame = frame
        self.width = width  # None = bool
        ver = engine.fresh_version(base, frame)  # re-declarations stay distinct
        name = f"{base}!{frame}!{ver}"
        self.term = T.bool_var(name) if width is None else T.bv_var(name, width)


class PtrCell:
    __slots__ = ("value",)

    def __init__(self, value: PtrVal):
        self.value = value


class ObjCell:
    __slots__ = ("obj",)

    def __init__(self, obj: int):
        self.obj = obj


@dataclass
class FuncVal:
    """A function designator; throwable for handler matching, never called."""

    name: str


@dataclass
class WriteRec:
    offset: T.Term
    value: object       # T.Term or PtrVal
    guard: T.Term


@dataclass
class ObjRecord:
    obj_id: int
    name: str
    kind: str                 # "scalar" | "array" (heap); "stack" | "global"
    heap: bool
    elem_type: TypeRepr
    size: T.Term
    valid: ScalarCell | None = None
    writes: dict = field(default_factory=dict)      # member -> [WriteRec]
    init_memo: dict = field(default_factory=dict)   # (member, key) -> value
    zero_init: bool = False


@dataclass
class Place:
    """Guarded store targets: (guard, obj, member path, element offset)."""

    elems: list
    value_type: TypeRepr
    derefed: bool               # reached through an explicit pointer deref
    loc: SourceLocation
    has_null: bool = False


@dataclass
class CatchFrameRec:
    handlers: tuple             # HandlerEntry
    owner: "Frame"
    bound_objects: dict = field(default_factory=dict)  # handler idx -> obj id


@dataclass
class Frame:
    fid: int
    func: GotoFunction
    display: str
    locals: dict = field(default_factory=dict)
    catch_stack: list = field(default_factory=list)
    pending: dict = field(default_factory=dict)     # label -> [guards]
    exit_guards: list = field(default_factory=list)
    throw_spec: object = None
    ret_value: object = None                        # Term | PtrVal
    ret_assigned: bool = False


@dataclass
class SymexOptions:
    unwind: int = 10
    unwinding_assertions: bool = False
    memory_leak_check: bool = False
    int_width: int = 32
    max_steps: int = 2_000_000


class SymexEngine:
    def __init__(self, prog: GotoProgram, tp: TypedProgram, layouts: Layouts,
                 opts: SymexOptions, deadline: Deadline = NO_DEADLINE):
        self.prog = prog
        self.tp = tp
        self.layouts = layouts
        self.opts = opts
        self.deadline = deadline
        self.width = opts.int_width
        self.equations: list[Equation] = []
        self.claims: list[Claim] = []
        self.heap: dict[int, ObjRecord] = {}
        self.next_obj = 1
        self.next_frame = 1
        self.ssa_versions: dict = {}
        self.frames: list[Frame] = []
        self.call_depth: dict[str, int] = {}
        self.globals: dict[str, ObjCell] = {}
        self.active_exceptions: list = []   # (guard, tags, type, value)
        self.steps = 0

    # --- SSA ---------------------------------------------------------------
    def fresh_version(self, base: str, frame: int) -> int:
        key = (base, frame)
        v = self.ssa_versions.get(key, 0) + 1
        self.ssa_versions[key] = v
        return v

    def assign_cell(self, cell: ScalarCell, rhs: T.Term, guard: T.Term,
                    loc: SourceLocation, hidden: bool = False) -> None:
        if guard is T.FALSE:
            return
        full = rhs if guard is T.TRUE else T.ite(guard, rhs, cell.term)
        ver = self.fresh_version(cell.base, cell.frame)
        name = f"{cell.base}!{cell.frame}!{ver}"
        var = T.bool_var(name) if cell.width is None else T.bv_var(name, cell.width)
        self.equations.append(Equation(name, full, guard, loc, cell.base, hidden))
        cell.term = full if T.is_const(full) else var

    def claim(self, guard: T.Term, cond: T.Term, pclass: str, comment: str,
              loc: SourceLocation, display: str = "") -> None:
        if guard is T.FALSE:
            return
        if not loc.function and self.frames:
            loc = loc.with_function(self.frames[-1].display)
        self.claims.append(Claim(guard, cond, pclass, comment, loc,
                                 display or comment))

    # --- objects ------------------------------------------------------------
    def new_object(self, name: str, kind: str, heap: bool, elem_type: TypeRepr,
                   size: T.Term, zero_init: bool = False) -> ObjRecord:
        obj = ObjRecord(self.next_obj, name, kind, heap, elem_type, size,
                        zero_init=zero_init)
        self.next_obj += 1
        if heap:
            obj.valid = ScalarCell(self, f"valid${obj.obj_id}", 0, None)
            obj.valid.term = T.FALSE  # not yet allocated on any path
        self.heap[obj.obj_id] = obj
        return obj

    def stack_object(self, name: str, ty: TypeRepr, frame: int) -> ObjRecord:
        base = ty.strip_const()
        if base.kind == "array":
            length = base.length if base.length is not None else 0
            return self.new_object(f"{name}@{frame}", "stack", False, base.to,
                                   T.bv_const(self.width, length))
        return self.new_object(f"{name}@{frame}", "stack", False, base,
                               T.bv_const(self.width, 1))

    def slot_type(self, obj: ObjRecord, member: str) -> TypeRepr:
        """Static type of one slot; array fields store their element type."""
        if not member:
            ty = obj.elem_type
        else:
            last = member.split(".")[-1]
            if last.startswith("vptr$"):
                return int_t(self.width)
            cls_name, fname = last.split("::", 1)
            hit = self.tp.find_field(cls_name, fname)
            if hit is None:
                raise InternalError(f"unknown member {member}")
            ty = hit[1]
        ty = ty.strip_const()
        if ty.kind == "array":
            return ty.to
        return ty

    def slot_bound(self, obj: ObjRecord, member: str) -> T.Term:
        """Number of elements addressable at this member path."""
        if not member:
            return obj.size
        last = member.split(".")[-1]
        if last.startswith("vptr$"):
            return T.bv_const(self.width, 1)
        cls_name, fname = last.split("::", 1)
        hit = self.tp.find_field(cls_name, fname)
        if hit is not None and hit[1].strip_const().kind == "array":
            length = hit[1].strip_const().length or 0
            return T.bv_const(self.width, length)
        return T.bv_const(self.width, 1)

    def initial_value(self, obj: ObjRecord, member: str, offset: T.Term):
        key = (member, offset.value if T.is_const(offset) else id(offset))
        hit = obj.init_memo.get(key)
        if hit is not None:
            return hit
        ty = self.slot_type(obj, member).strip_const().strip_ref()
        if ty.kind in ("ptr",):
            value = PtrVal.null(self.width)
        elif obj.zero_init:
            value = T.FALSE if ty.kind == "bool" else T.bv_const(self._width_of(ty), 0)
        else:
            suffix = key[1] if T.is_const(offset) else f"sym{len(obj.init_memo)}"
            name = f"{obj.name}.{member or 'elem'}[{suffix}]!init"
            value = (T.bool_var(name) if ty.kind == "bool"
                     else T.bv_var(name, self._width_of(ty)))
        obj.init_memo[key] = value
        return value

    def _width_of(self, ty: TypeRepr) -> int:
        base = ty.strip_const().strip_ref()
        if base.kind == "char":
            return 8
        if base.kind == "int":
            return base.width or self.width
        return self.width

    def read_slot(self, obj: ObjRecord, member: str, offset: T.Term):
        acc = self.initial_value(obj, member, offset)
        for w in obj.writes.get(member, ()):
            if T.is_const(offset) and T.is_const(w.offset):
                if offset.value != w.offset.value:
                    continue
                cond = w.guard
            else:
                cond = T.and_(w.guard, T.eq(offset, w.offset))
            if cond is T.FALSE:
                continue
            if isinstance(w.value, PtrVal):
                if not isinstance(acc, PtrVal):
                    acc = PtrVal.null(self.width)
                acc = merge_ptr(cond, w.value, acc)
            else:
                if isinstance(acc, PtrVal):
                    raise InternalError(f"mixed scalar/pointer slot {member}")
                acc = T.ite(cond, w.value, acc)
        return acc

    def write_slot(self, obj: ObjRecord, member: str, offset: T.Term, value,
                   guard: T.Term) -> None:
        if guard is T.FALSE:
            return
        obj.writes.setdefault(member, []).append(WriteRec(offset, value, guard))

    # --- deref claims -------------------------------------------------------------
    def deref_claims(self, place: Place, guard: T.Term) -> None:
        if not place.derefed:
            bounds = self._bounds_cond(place)
            if bounds is not T.TRUE:
                self.claim(guard, bounds, "dereference failure: array bounds violated",
                           "dereference failure: array bounds violated", place.loc)
            return
        if place.has_null:
            null_guards = T.disj(g for g, o, _, _ in place.elems if o == NULL_ID)
            self.claim(guard, T.not_(null_guards),
                       "dereference failure: NULL pointer",
                       "dereference failure: NULL pointer", place.loc)
        valid_parts = []
        for g, o, _, _ in place.elems:
            rec = self.heap.get(o)
            if rec is not None and rec.heap:
                valid_parts.append(T.implies(g, rec.valid.term))
        if valid_parts:
            self.claim(guard, T.conj(valid_parts),
                       "dereference failure: invalidated dynamic object",
                       "dereference failure: invalidated dynamic object", place.loc)
        self.claim(guard, self._bounds_cond(place),
                   "dereference failure: array bounds violated",
                   "dereference failure: array bounds violated", place.loc)

    def _bounds_cond(self, place: Place) -> T.Term:
        parts = []
        zero = T.bv_const(self.width, 0)
        for g, o, m, off in place.elems:
            if o == NULL_ID:
                continue
            bound = self.slot_bound(self.heap[o], m)
            inside = T.and_(T.sle(zero, off), T.slt(off, bound))
            parts.append(T.implies(g, inside))
        return T.conj(parts)

    def load_place(self, place: Place, guard: T.Term, claims: bool = True):
        if claims:
            self.deref_claims(place, guard)
        ty = place.value_type.strip_const().strip_ref()
        is_ptr = ty.kind in ("ptr",)
        acc = None
        for g, o, m, off in place.elems:
            if o == NULL_ID:
                continue
            v = self.read_slot(self.heap[o], m, off)
            if acc is None:
                acc = v
            elif isinstance(acc, PtrVal) or isinstance(v, PtrVal):
                acc = merge_ptr(g, v, acc)
            else:
                acc = T.ite(g, v, acc)
        if acc is None:
            acc = PtrVal.null(self.width) if is_ptr else self._nondet(ty)
        return acc

    def _nondet(self, ty: TypeRepr):
        name = f"nondet${len(self.equations)}${len(self.claims)}"
        if ty.kind == "bool":
            return T.bool_var(name)
        return T.bv_var(name, self._width_of(ty))

    def store_place(self, place: Place, value, guard: T.Term) -> None:
        self.deref_claims(place, guard)
        for g, o, m, off in place.elems:
            if o == NULL_ID:
                continue
            self.write_slot(self.heap[o], m, off, value, T.and_(guard, g))

    # --- engine entry --------------------------------------------------------------
    def run(self) -> VcBundle:
        for g in self.tp.globals:
            obj = self.stack_object(g.name, g.ty, 0)
            obj.kind = "global"
            obj.zero_init = True
            self.globals[g.name] = ObjCell(obj.obj_id)
        if self.prog.init_function:
            self.call_function(self.prog.init_function, [], T.TRUE, NO_LOC)
        self.call_function(self.prog.entry, [], T.TRUE, NO_LOC)
        if self.opts.memory_leak_check:
            parts = [T.not_(rec.valid.term) for rec in self.heap.values() if rec.heap]
            if parts:
                entry = self.prog.functions[self.prog.entry]
                loc = entry.instrs[-1].loc if entry.instrs else NO_LOC
                self.claim(T.TRUE, T.conj(parts), "memory leak",
                           "dynamically allocated memory never freed", loc,
                           display="memory leak")
        return VcBundle(self.equations, self.claims)

    # --- calls ------------------------------------------------------------------------
    def call_function(self, name: str, args: list, guard: T.Term,
                      loc: SourceLocation):
        if guard is T.FALSE:
            return T.FALSE, None
        fn = self.prog.functions.get(name)
        if fn is None:
            raise InternalError(f"call to unknown function {name!r}")
        depth = self.call_depth.get(name, 0)
        if depth >= self.opts.unwind + 1:
            if self.opts.unwinding_assertions:
                self.claim(guard, T.FALSE, "unwinding assertion",
                           "recursion unwinding", loc)
            return T.FALSE, None
        self.call_depth[name] = depth + 1
        fid = self.next_frame
        self.next_frame += 1
        frame = Frame(fid, fn, fn.display)
        for (pname, pty), arg in zip(fn.params, args):
            frame.locals[pname] = self._bind_param(pname, pty, arg, fid, guard, loc)
        self.frames.append(frame)
        try:
            exit_guard = self._walk(frame, guard)
        finally:
            self.frames.pop()
            self.call_depth[name] = depth
        return exit_guard, frame.ret_value

    def _bind_param(self, pname: str, pty: TypeRepr, arg, fid: int, guard: T.Term,
                    loc: SourceLocation):
        base = pty.strip_const()
        if base.kind in ("ptr", "lref", "rref"):
            if isinstance(arg, PtrVal):
                return PtrCell(PtrVal(arg.under(T.TRUE)))
            if isinstance(arg, Place):
                return PtrCell(self.as_ptr(arg))
            raise InternalError(f"pointer parameter {pname} bound to {type(arg)}")
        cell = ScalarCell(self, pname, fid, self._cell_width(base))
        value = self.coerce(arg, base, loc)
        self.assign_cell(cell, value, guard, loc)
        return cell

    def _cell_width(self, ty: TypeRepr):
        base = ty.strip_const()
        if base.kind == "bool":
            return None
        if base.kind == "char":
            return 8
        return self.width

    # --- unrolling -----------------------------------------------------------------------
    def unroll(self, instrs: list) -> list:
        out = list(instrs)
        next_label = 1 + max((max(i.labels) for i in out if i.labels), default=0)

        def relabel(seg: list) -> list:
            nonlocal next_label
            defined = {lbl for ins in seg for lbl in ins.labels}
            mapping = {}
            for lbl in sorted(defined):
                mapping[lbl] = next_label
                next_label += 1
            copy = []
            for ins in seg:
                clone = replace(ins)
                clone.labels = tuple(mapping[l] for l in ins.labels)
                if clone.kind == "GOTO" and clone.target in mapping:
                    clone.target = mapping[clone.target]
                if clone.kind == "CATCH_BEGIN":
                    clone.handlers = tuple(
                        replace(h, label=mapping.get(h.label, h.label))
                        for h in clone.handlers)
                copy.append(clone)
            return copy

        while True:
            label_at = {lbl: i for i, ins in enumerate(out) for lbl in ins.labels}
            back = None
            for i, ins in enumerate(out):
                if ins.kind == "GOTO" and label_at.get(ins.target, 1 << 30) <= i:
                    back = (i, label_at[ins.target])
                    break
            if back is None:
                return out
            i, h = back
            seg = out[h:i]
            expansion: list = []
            for _ in range(self.opts.unwind):
                expansion.extend(relabel(seg))
            # the continue path beyond the bound is cut
            head = seg[0]
            cut: list = []
            if head.kind == "GOTO" and head.cond is not None:
                check = replace(head)
                check.labels = ()
                cut.append(check)
                if self.opts.unwinding_assertions:
                    ua = Instruction("ASSERT", head.loc,
                                     cond=head.cond, property_class="unwinding assertion",
                                     comment="unwinding assertion")
                    cut.append(ua)
            elif self.opts.unwinding_assertions:
                false_lit = n.BoolLit(False, loc=head.loc)
                cut.append(Instruction("ASSERT", head.loc, cond=false_lit,
                                       property_class="unwinding assertion",
                                       comment="unwinding assertion"))
            false_lit = n.BoolLit(False, loc=out[i].loc)
            cut.append(Instruction("ASSUME", out[i].loc, cond=false_lit))
            if expansion:
                first = expansion[0]
                first.labels = tuple(sorted(set(first.labels) | set(seg[0].labels)))
            out = out[:h] + expansion + cut + out[i + 1:]

    # --- the instruction walk ------------------------------------------------------------
    def _walk(self, frame: Frame, entry_guard: T.Term) -> T.Term:
        instrs = self.unroll(frame.func.instrs)
        guard = entry_guard
        pc = 0
        while pc < len(instrs):
            self.steps += 1
            if self.steps % 1024 == 0:
                self.deadline.check()
            if self.steps > self.opts.max_steps:
                raise InternalError("symbolic execution step limit exceeded")
            ins = instrs[pc]
            for lbl in ins.labels:
                for g in frame.pending.pop(lbl, ()):
                    guard = T.or_(guard, g)
            guard = self.exec_instruction(frame, ins, guard)
            pc += 1
        for g in frame.exit_guards:
            guard = T.or_(guard, g)
        return guard

    def exec_instruction(self, frame: Frame, ins: Instruction, guard: T.Term) -> T.Term:
        k = ins.kind
        if k == "DECL":
            self.exec_decl(frame, ins)
            return guard
        if k == "DEAD" or k == "SKIP":
            return guard
        if k == "ASSIGN":
            if guard is not T.FALSE:
                self.exec_assign(frame, ins, guard)
            return guard
        if k == "ASSERT":
            if guard is not T.FALSE:
                cond = self.to_bool(self.eval(frame, ins.cond, guard))
                self.claim(guard, cond, ins.property_class, ins.comment, ins.loc,
                           display=n.expr_text(ins.cond, tight=True))
            return guard
        if k == "ASSUME":
            if guard is not T.FALSE:
                cond = self.to_bool(self.eval(frame, ins.cond, guard))
                guard = T.and_(guard, cond)
            return guard
        if k == "GOTO":
            if guard is T.FALSE:
                return guard
            if ins.cond is None:
                frame.pending.setdefault(ins.target, []).append(guard)
                return T.FALSE
            cond = self.to_bool(self.eval(frame, ins.cond, guard))
            taken = T.and_(guard, cond)
            if taken is not T.FALSE:
                frame.pending.setdefault(ins.target, []).append(taken)
            return T.and_(guard, T.not_(cond))
        if k == "FUNCTION_CALL":
            if guard is not T.FALSE:
                return self.exec_call(frame, ins, guard)
            return guard
        if k == "RETURN":
            if guard is not T.FALSE:
                self.exec_return(frame, ins, guard)
            return T.FALSE
        if k == "CATCH_BEGIN":
            frame.catch_stack.append(CatchFrameRec(ins.handlers, frame))
            return guard
        if k == "CATCH_END":
            frame.catch_stack.pop()
            return guard
        if k == "THROW":
            if guard is not T.FALSE:
                self.exec_throw(frame, ins, guard)
            return T.FALSE
        if k == "THROW_DECL":
            frame.throw_spec = ins.spec
            return guard
        if k == "NEW":
            if guard is not T.FALSE:
                self.exec_new(frame, ins, guard)
            return guard
        if k == "DELETE":
            if guard is not T.FALSE:
                self.exec_delete(frame, ins, guard)
            return guard
        if k == "END_FUNCTION":
            return guard
        raise InternalError(f"unknown instruction {k}")

    # --- declarations and assignment --------------------------------------------------
    def exec_decl(self, frame: Frame, ins: Instruction) -> None:
        ty = ins.var_type
        base = ty.strip_const()
        if ins.addressable or base.kind == "array":
            obj = self.stack_object(ins.var, ty, frame.fid)
            frame.locals[ins.var] = ObjCell(obj.obj_id)
        elif base.kind in ("ptr", "lref", "rref"):
            frame.locals[ins.var] = PtrCell(PtrVal.null(self.width))
        else:
            frame.locals[ins.var] = ScalarCell(self, ins.var, frame.fid,
                                               self._cell_width(base))

    def lookup(self, frame: Frame, name: str):
        cell = frame.locals.get(name)
        if cell is None:
            cell = self.globals.get(name)
        if cell is None:
            raise InternalError(f"unbound variable {name!r}")
        return cell

    def exec_assign(self, frame: Frame, ins: Instruction, guard: T.Term) -> None:
        lhs = ins.lhs
        if isinstance(ins.rhs, n.StructLit):
            place = self.eval_place(frame, lhs, guard)
            for member, e in ins.rhs.inits:
                value = self.eval(frame, e, guard)
                elems = [(g, o, _compose(m, member), off)
                         for g, o, m, off in place.elems]
                fty = self.slot_type(self.heap[place.elems[0][1]],
                                     _compose(place.elems[0][2], member))
                sub = Place(elems, fty, place.derefed, ins.loc, place.has_null)
                self.store_place(sub, self.coerce_value(value, fty), guard)
            return
        value = self.eval(frame, ins.rhs, guard)
        self.assign_to(frame, lhs, value, guard, ins.loc)

    def assign_to(self, frame: Frame, lhs: n.Expr, value, guard: T.Term,
                  loc: SourceLocation) -> None:
        if isinstance(lhs, n.NameRef):
            cell = self.lookup(frame, lhs.name)
            if isinstance(cell, ScalarCell):
                ty = (lhs.ty or VOID).strip_const()
                self.assign_cell(cell, self.coerce(value, ty, loc), guard, loc)
                return
            if isinstance(cell, PtrCell):
                cell.value = merge_ptr(guard, self.as_ptr(value), cell.value)
                return
            place = self.place_of_object(cell.obj, lhs, loc)
            ty = self.slot_type(self.heap[cell.obj], "")
            self.store_place(place, self.coerce_value(value, ty), guard)
            return
        place = self.eval_place(frame, lhs, guard)
        self.store_place(place, self.coerce_value(value, place.value_type), guard)

    def place_of_object(self, obj_id: int, e: n.Expr, loc: SourceLocation) -> Place:
        ty = (e.ty or VOID).strip_const()
        return Place([(T.TRUE, obj_id, "", T.bv_const(self.width, 0))], ty, False, loc)

    # --- evaluation --------------------------------------------------------------------
    def eval(self, frame: Frame, e: n.Expr, guard: T.Term):
        if isinstance(e, n.IntLit):
            ty = e.ty
            width = self._width_of(ty) if ty is not None else self.width
            return T.bv_const(width, e.value)
        if isinstance(e, n.BoolLit):
            return T.bool_const(e.value)
        if isinstance(e, n.CharLit):
            return T.bv_const(8, ord(e.value))
        if isinstance(e, n.NullLit):
            return PtrVal.null(self.width)
        if isinstance(e, n.This):
            return self.lookup(frame, "this").value
        if isinstance(e, n.NameRef):
            if e.binding == "func" and e.name in self.prog.functions:
                return FuncVal(e.name)
            cell = self.lookup(frame, e.name)
            if isinstance(cell, ScalarCell):
                return cell.term
            if isinstance(cell, PtrCell):
                return PtrVal(list(cell.value.elems))
            rec = self.heap[cell.obj]
            base = (e.ty or rec.elem_type).strip_const()
            if base.kind == "array":
                # arrays decay to a pointer to their first element
                return PtrVal([PtrElem(T.TRUE, cell.obj, "",
                                       T.bv_const(self.width, 0))])
            place = self.place_of_object(cell.obj, e, e.loc)
            if base.kind == "class":
                return place
            return self.load_place(place, guard, claims=False)
        if isinstance(e, n.Member):
            place = self.member_place(frame, e, guard)
            base = (e.ty or VOID).strip_const()
            if base.kind == "class":
                return place
            if base.kind == "array":
                return PtrVal([PtrElem(g, o, m, off)
                               for g, o, m, off in place.elems])
            return self.load_place(place, guard)
        if isinstance(e, n.Index):
            place = self.index_place(frame, e, guard)
            if (e.ty or VOID).strip_const().kind == "class":
                return place
            return self.load_place(place, guard)
        if isinstance(e, n.Unary):
            return self.eval_unary(frame, e, guard)
        if isinstance(e, n.Binary):
            return self.eval_binary(frame, e, guard)
        if isinstance(e, n.Cast):
            return self.eval(frame, e.arg, guard)
        if isinstance(e, n.StructLit):
            raise InternalError("struct literal outside assignment")
        raise InternalError(f"cannot evaluate {type(e).__name__}")

    def eval_unary(self, frame: Frame, e: n.Unary, guard: T.Term):
        if e.op == "*":
            place = self.deref_place(frame, e, guard)
            if (e.ty or VOID).strip_const().kind == "class":
                return place
            return self.load_place(place, guard)
        if e.op == "&":
            place = self.eval_place(frame, e.operand, guard)
            return PtrVal([PtrElem(g, o, m, off) for g, o, m, off in place.elems])
        if e.op == "!":
            return T.not_(self.to_bool(self.eval(frame, e.operand, guard)))
        if e.op == "-":
            v = self.promote(self.eval(frame, e.operand, guard))
            return T.neg(v)
        raise InternalError(f"unary {e.op}")

    def eval_binary(self, frame: Frame, e: n.Binary, guard: T.Term):
        op = e.op
        if op in ("&&", "||"):
            a = self.to_bool(self.eval(frame, e.lhs, guard))
            b = self.to_bool(self.eval(frame, e.rhs, guard))
            return T.and_(a, b) if op == "&&" else T.or_(a, b)
        lty = (e.lhs.ty or VOID).strip_const().strip_ref()
        rty = (e.rhs.ty or VOID).strip_const().strip_ref()
        ptr_kinds = ("ptr", "array")
        if op in ("==", "!=") and (lty.kind in ptr_kinds or rty.kind in ptr_kinds
                                   or isinstance(e.lhs, n.NullLit)
                                   or isinstance(e.rhs, n.NullLit)):
            a = self.as_ptr(self.eval(frame, e.lhs, guard))
            b = self.as_ptr(self.eval(frame, e.rhs, guard))
            same = self.ptr_equal(a, b)
            return same if op == "==" else T.not_(same)
        if op in ("+", "-") and lty.kind in ptr_kinds:
            a = self.as_ptr(self.eval(frame, e.lhs, guard))
            delta = self.promote(self.eval(frame, e.rhs, guard))
            if op == "-":
                delta = T.neg(delta)
            return PtrVal([PtrElem(x.guard, x.obj, x.member, T.add(x.offset, delta))
                           for x in a.elems])
        a = self.promote(self.eval(frame, e.lhs, guard))
        b = self.promote(self.eval(frame, e.rhs, guard))
        if op == "+":
            return T.add(a, b)
        if op == "-":
            return T.sub(a, b)
        if op == "*":
            return T.mul(a, b)
        if op == "==":
            return T.eq(a, b)
        if op == "!=":
            return T.ne(a, b)
        if op == "<":
            return T.slt(a, b)
        if op == "<=":
            return T.sle(a, b)
        if op == ">":
            return T.slt(b, a)
        if op == ">=":
            return T.sle(b, a)
        raise InternalError(f"binary {op}")

    def ptr_equal(self, a: PtrVal, b: PtrVal) -> T.Term:
        parts = []
        for x in a.elems:
            for y in b.elems:
                if x.obj != y.obj or x.member != y.member:
                    continue
                both = T.and_(x.guard, y.guard)
                parts.append(T.and_(both, T.eq(x.offset, y.offset)))
        return T.disj(parts)

    def as_ptr(self, value) -> PtrVal:
        if isinstance(value, PtrVal):
            return value
        if isinstance(value, Place):
            return PtrVal([PtrElem(g, o, m, off) for g, o, m, off in value.elems])
        raise InternalError(f"expected a pointer, got {type(value).__name__}")

    # --- places -----------------------------------------------------------------------
    def eval_place(self, frame: Frame, e: n.Expr, guard: T.Term) -> Place:
        if isinstance(e, n.NameRef):
            cell = self.lookup(frame, e.name)
            if isinstance(cell, ObjCell):
                return self.place_of_object(cell.obj, e, e.loc)
            raise InternalError(f"variable {e.name!r} has no storage to address")
        if isinstance(e, n.Member):
            return self.member_place(frame, e, guard)
        if isinstance(e, n.Index):
            return self.index_place(frame, e, guard)
        if isinstance(e, n.Unary) and e.op == "*":
            return self.deref_place(frame, e, guard)
        if isinstance(e, n.This):
            ptr = self.lookup(frame, "this").value
            return Place([(x.guard, x.obj, x.member, x.offset) for x in ptr.elems],
                         (e.ty or VOID).strip_const().to, True, e.loc,
                         has_null=any(x.obj == NULL_ID for x in ptr.elems))
        if isinstance(e, n.Cast):
            inner = self.eval_place(frame, e.arg, guard)
            return replace(inner, value_type=e.target.strip_const())
        raise InternalError(f"not an addressable expression: {type(e).__name__}")

    def member_place(self, frame: Frame, e: n.Member, guard: T.Term) -> Place:
        member = f"{e.field_class}::{e.name}" if e.field_class else e.name
        ty = e.ty or VOID
        if e.arrow:
            ptr = self.as_ptr(self.eval(frame, e.obj, guard))
            elems = [(x.guard, x.obj, _compose(x.member, member), x.offset)
                     for x in ptr.elems]
            return Place(elems, ty, True, e.loc,
                         has_null=any(x.obj == NULL_ID for x in ptr.elems))
        base = self.eval_place(frame, e.obj, guard)
        elems = [(g, o, _compose(m, member), off) for g, o, m, off in base.elems]
        return Place(elems, ty, base.derefed, e.loc, base.has_null)

    def index_place(self, frame: Frame, e: n.Index, guard: T.Term) -> Place:
        idx = self.promote(self.eval(frame, e.index, guard))
        oty = (e.obj.ty or VOID).strip_const().strip_ref()
        ty = e.ty or VOID
        if oty.kind in ("ptr", "array"):
            ptr = self.as_ptr(self.eval(frame, e.obj, guard))
            elems = [(x.guard, x.obj, x.member, T.add(x.offset, idx))
                     for x in ptr.elems]
            derefed = oty.kind == "ptr"
            return Place(elems, ty, derefed, e.loc,
                         has_null=any(x.obj == NULL_ID for x in ptr.elems))
        base = self.eval_place(frame, e.obj, guard)
        elems = [(g, o, m, T.add(off, idx)) for g, o, m, off in base.elems]
        return Place(elems, ty, base.derefed, e.loc, base.has_null)

    def deref_place(self, frame: Frame, e: n.Unary, guard: T.Term) -> Place:
        ptr = self.as_ptr(self.eval(frame, e.operand, guard))
        ty = e.ty or VOID
        elems = [(x.guard, x.obj, x.member, x.offset) for x in ptr.elems]
        return Place(elems, ty, True, e.loc,
                     has_null=any(x.obj == NULL_ID for x in ptr.elems))

    # --- conversions ---------------------------------------------------------------------
    def promote(self, value) -> T.Term:
        """Integer promotion of an operand to the full int width."""
        if isinstance(value, (PtrVal, Place, FuncVal)):
            raise InternalError("pointer in arithmetic context")
        if value.width is None:
            return T.bool_to_bv(value, self.width)
        if value.width < self.width:
            return T.sext(value, self.width)
        return value

    def to_bool(self, value) -> T.Term:
        if isinstance(value, PtrVal):
            return T.disj(x.guard for x in value.elems if x.obj != NULL_ID)
        if isinstance(value, (Place, FuncVal)):
            raise InternalError("class value in boolean context")
        if value.width is None:
            return value
        return T.ne(value, T.bv_const(value.width, 0))

    def coerce(self, value, to_ty: TypeRepr, loc: SourceLocation) -> T.Term:
        base = to_ty.strip_const().strip_ref()
        if isinstance(value, (PtrVal, Place, FuncVal)):
            if base.kind == "bool":
                return self.to_bool(value)
            raise InternalError("pointer where a scalar is expected")
        if base.kind == "bool":
            return self.to_bool(value)
        want = self._width_of(base)
        if value.width is None:
            return T.bool_to_bv(value, want)
        if value.width < want:
            return T.sext(value, want)
        if value.width > want:
            return T.extract(value, want - 1, 0)
        return value

    def coerce_value(self, value, to_ty: TypeRepr):
        base = to_ty.strip_const().strip_ref()
        if base.kind == "ptr":
            return self.as_ptr(value)
        if isinstance(value, (PtrVal, Place)):
            if base.kind == "class":
                return value
            return self.as_ptr(value)
        return self.coerce(value, to_ty, NO_LOC)

    # --- calls, news, deletes ---------------------------------------------------------------
    def exec_call(self, frame: Frame, ins: Instruction, guard: T.Term) -> T.Term:
        args = [self.eval(frame, a, guard) for a in ins.args]
        if isinstance(ins.callee, VirtualCallee):
            return self.exec_virtual_call(frame, ins, args, guard)
        exit_guard, ret = self.call_function(ins.callee.name, args, guard, ins.loc)
        if ins.lhs_var and ret is not None:
            self.bind_call_result(frame, ins.lhs_var, ret, exit_guard, ins.loc)
        return exit_guard

    def bind_call_result(self, frame: Frame, var: str, ret, guard: T.Term,
                         loc: SourceLocation) -> None:
        if guard is T.FALSE:
            return
        cell = self.lookup(frame, var)
        if isinstance(cell, PtrCell):
            cell.value = merge_ptr(guard, self.as_ptr(ret), cell.value)
        elif isinstance(cell, ScalarCell):
            value = ret
            if isinstance(value, (PtrVal, Place)):
                raise InternalError("pointer returned into scalar")
            width = cell.width
            if value.width != width:
                if width is None:
                    value = self.to_bool(value)
                elif value.width is None:
                    value = T.bool_to_bv(value, width)
                elif value.width < width:
                    value = T.sext(value, width)
                else:
                    value = T.extract(value, width - 1, 0)
            self.assign_cell(cell, value, guard, loc)
        else:
            # a class-valued result: copy member-wise into the temporary
            rec = self.heap[cell.obj]
            cls = rec.elem_type.strip_const().name
            src_ptr = self.as_ptr(ret)
            zero = T.bv_const(self.width, 0)
            for decl_cls, fname, fty in self.layouts.models[cls].fields:
                member = f"{decl_cls}::{fname}"
                elems = [(e.guard, e.obj, _compose(e.member, member), e.offset)
                         for e in src_ptr.elems]
                v = self.load_place(Place(elems, fty, False, loc), guard,
                                    claims=False)
                self.write_slot(rec, member, zero, v, guard)

    def exec_virtual_call(self, frame: Frame, ins: Instruction, args: list,
                          guard: T.Term) -> T.Term:
        callee: VirtualCallee = ins.callee
        recv = self.as_ptr(args[0])
        vmember = f"vptr${callee.path_root}"
        elems = [(x.guard, x.obj, _compose(x.member, vmember), x.offset)
                 for x in recv.elems]
        place = Place(elems, int_t(self.width), True, ins.loc,
                      has_null=any(x.obj == NULL_ID for x in recv.elems))
        self.deref_claims(place, guard)
        exit_parts: list[T.Term] = []
        by_id = dict(callee.candidates)
        for x in recv.elems:
            if x.obj == NULL_ID:
                continue
            sub_guard = T.and_(guard, x.guard)
            if sub_guard is T.FALSE:
                continue
            vptr = self.read_slot(self.heap[x.obj], _compose(x.member, vmember),
                                  x.offset)
            recv_arg = PtrVal([PtrElem(T.TRUE, x.obj, x.member, x.offset)])
            call_args = [recv_arg] + args[1:]
            if T.is_const(vptr):
                target = by_id.get(vptr.value)
                if target is None:
                    # untouched vptr on this path: fall back to the last table
                    target = callee.candidates[-1][1]
                eg, ret = self.call_function(target, call_args, sub_guard, ins.loc)
                if ins.lhs_var and ret is not None:
                    self.bind_call_result(frame, ins.lhs_var, ret, eg, ins.loc)
                exit_parts.append(eg)
                continue
            remaining = sub_guard
            for i, (vid, target) in enumerate(callee.candidates):
                if i + 1 == len(callee.candidates):
                    gi = remaining
                else:
                    hit = T.eq(vptr, T.bv_const(self.width, vid))
                    gi = T.and_(remaining, hit)
                    remaining = T.and_(remaining, T.not_(hit))
                eg, ret = self.call_function(target, call_args, gi, ins.loc)
                if ins.lhs_var and ret is not None:
                    self.bind_call_result(frame, ins.lhs_var, ret, eg, ins.loc)
                exit_parts.append(eg)
        return T.disj(exit_parts) if exit_parts else T.FALSE

    def exec_return(self, frame: Frame, ins: Instruction, guard: T.Term) -> None:
        if ins.value is not None:
            value = self.eval(frame, ins.value, guard)
            rty = frame.func.ret_type
            if rty.strip_const().kind in ("ptr", "lref", "rref") \
                    or isinstance(value, (PtrVal, Place)):
                value = self.as_ptr(value)
                prev = frame.ret_value if isinstance(frame.ret_value, PtrVal) \
                    else PtrVal.null(self.width)
                frame.ret_value = merge_ptr(guard, value, prev)
            else:
                value = self.coerce(value, rty, ins.loc)
                if not frame.ret_assigned:
                    frame.ret_value = value
                else:
                    frame.ret_value = T.ite(guard, value, frame.ret_value)
            frame.ret_assigned = True
        frame.exit_guards.append(guard)

    def exec_new(self, frame: Frame, ins: Instruction, guard: T.Term) -> None:
        if ins.is_array:
            count = self.promote(self.eval(frame, ins.count, guard))
            obj = self.new_object(f"dynamic_array${self.next_obj}", "array", True,
                                  ins.elem_type, count)
            self.claim(guard, T.sle(T.bv_const(self.width, 0), count),
                       "bad allocation", "array size is negative", ins.loc)
        else:
            obj = self.new_object(f"dynamic_object${self.next_obj}", "scalar", True,
                                  ins.elem_type, T.bv_const(self.width, 1))
        self.assign_cell(obj.valid, T.TRUE, guard, ins.loc, hidden=True)
        cell = self.lookup(frame, ins.lhs_var)
        fresh = PtrVal([PtrElem(T.TRUE, obj.obj_id, "", T.bv_const(self.width, 0))])
        cell.value = merge_ptr(guard, fresh, cell.value)

    def exec_delete(self, frame: Frame, ins: Instruction, guard: T.Term) -> None:
        ptr = self.as_ptr(self.eval(frame, ins.value, guard))
        for x in ptr.elems:
            if x.obj == NULL_ID:
                continue  # deleting null is a no-op
            g = T.and_(guard, x.guard)
            if g is T.FALSE:
                continue
            rec = self.heap[x.obj]
            if not rec.heap or x.member:
                self.claim(g, T.FALSE, "invalid object in delete",
                           "invalid object in delete", ins.loc)
                continue
            self.claim(g, rec.valid.term, "invalid object in delete",
                       "invalid object in delete", ins.loc)
            matches = (rec.kind == "array") == ins.is_array
            self.claim(g, T.bool_const(matches), "operator mismatch",
                       "operator mismatch", ins.loc)
            self.assign_cell(rec.valid, T.FALSE, g, ins.loc, hidden=True)

    # --- exceptions ------------------------------------------------------------------------
    def exec_throw(self, frame: Frame, ins: Instruction, guard: T.Term) -> None:
        if not ins.tags:  # re-throw
            remaining = guard
            for g_act, tags, ttype, value in reversed(self.active_exceptions):
                g = T.and_(remaining, g_act)
                if g is not T.FALSE:
                    self.dispatch_throw(g, tags, ttype, value, ins.loc, record=False)
                remaining = T.and_(remaining, T.not_(g_act))
            if remaining is not T.FALSE:
                self.claim(remaining, T.FALSE, "uncaught exception",
                           "re-throw with no active exception", ins.loc)
            return
        value = self.eval(frame, ins.value, guard) if ins.value is not None else None
        self.dispatch_throw(guard, ins.tags, ins.value_type, value, ins.loc)

    def dispatch_throw(self, guard: T.Term, tags: tuple, ttype: TypeRepr, value,
                       loc: SourceLocation, record: bool = True) -> None:
        if record:
            self.active_exceptions.append((guard, tags, ttype, value))
        for frame in reversed(self.frames):
            for cf in reversed(frame.catch_stack):
                idx = match_exception(tags, ttype, [h.htype for h in cf.handlers],
                                      self.tp.is_base_of)
                if idx is not None:
                    self.bind_handler(cf, idx, ttype, value, guard, loc)
                    frame.pending.setdefault(cf.handlers[idx].label, []).append(guard)
                    return
            spec = frame.throw_spec
            if spec is not None and not self.spec_allows(spec, tags, ttype):
                self.claim(guard, T.FALSE, "throw specification violation",
                           "throw specification violation", loc)
                return
        self.claim(guard, T.FALSE, "uncaught exception", "uncaught exception", loc)

    def spec_allows(self, spec, tags: tuple, ttype: TypeRepr) -> bool:
        if spec.kind == "noexcept":
            return False
        return match_exception(tags, ttype, list(spec.types), self.tp.is_base_of) \
            is not None

    def bind_handler(self, cf: CatchFrameRec, idx: int, ttype: TypeRepr, value,
                     guard: T.Term, loc: SourceLocation) -> None:
        handler = cf.handlers[idx]
        if handler.htype is None or not handler.var:
            return
        hty = handler.htype
        target = cf.owner
        base = hty.strip_const()
        if base.kind in ("lref", "rref"):
            inner = base.to.strip_const()
            if inner.kind == "class" and isinstance(value, Place):
                cell = target.locals.get(handler.var)
                if not isinstance(cell, PtrCell):
                    cell = PtrCell(PtrVal.null(self.width))
                    target.locals[handler.var] = cell
                cell.value = merge_ptr(guard, self.as_ptr(value), cell.value)
                return
            base = inner  # scalar catch-by-reference binds a copy
        if base.kind == "ptr":
            if isinstance(value, FuncVal):
                return  # function pointers cannot be called in MiniCxx
            cell = target.locals.get(handler.var)
            if not isinstance(cell, PtrCell):
                cell = PtrCell(PtrVal.null(self.width))
                target.locals[handler.var] = cell
            cell.value = merge_ptr(guard, self.as_ptr(value), cell.value)
            return
        if base.kind == "class":
            obj_id = cf.bound_objects.get(idx)
            if obj_id is None:
                rec = self.stack_object(f"catch${handler.var}", base, target.fid)
                obj_id = rec.obj_id
                cf.bound_objects[idx] = obj_id
                target.locals[handler.var] = ObjCell(obj_id)
            if isinstance(value, Place):
                for decl_cls, fname, fty in self.layouts.models[base.name].fields:
                    member = f"{decl_cls}::{fname}"
                    src_elems = [(g, o, _compose(m, member), off)
                                 for g, o, m, off in value.elems]
                    src = Place(src_elems, fty, False, loc)
                    v = self.load_place(src, guard, claims=False)
                    self.write_slot(self.heap[obj_id], member,
                                    T.bv_const(self.width, 0), v, guard)
            return
        if base.kind == "float":
            return  # float values cannot be produced, nothing to bind
        cell = target.locals.get(handler.var)
        if not isinstance(cell, ScalarCell):
            cell = ScalarCell(self, handler.var, target.fid, self._cell_width(base))
            target.locals[handler.var] = cell
        if value is not None and not isinstance(value, (PtrVal, Place, FuncVal)):
            self.assign_cell(cell, self.coerce(value, base, loc), guard, loc)


def _compose(parent: str, member: str) -> str:
    return f"{parent}.{member}" if parent else member


def match_exception(tags: tuple, thrown_type: TypeRepr | None, handlers: list,
                    is_base) -> int | None:
    """First handler (source order) the thrown exception matches, else None.

    Matching follows ISO handler rules: exact type ignoring top-level cv,
    base classes of the thrown type, array-to-pointer and function-to-
    pointer forms, pointer qualification widening with derived-to-base
    conversion, void pointers, and ellipsis.
    """
    for i, h in enumerate(handlers):
        if h is None:
            return i  # ellipsis catches anything
        ht = h.strip_ref()
        if type_tag(ht) in tags:
            return i
        base = ht.strip_const()
        if base.kind != "ptr" or thrown_type is None:
            continue
        tt = thrown_type.strip_ref().strip_const()
        if tt.kind == "array":
            if types_equal(base.to, tt.to, ignore_cv=True) \
                    and _qual_ok(tt.to, base.to):
                return i
        if tt.kind == "func" and base.to.strip_const().kind == "func":
            if types_equal(base.to.strip_const(), tt, ignore_cv=True):
                return i
        if tt.kind == "ptr":
            if base.to.strip_const().is_void and _qual_ok(tt.to, base.to):
                return i
            if _ptr_convertible(tt, base, is_base):
                return i
    return None


def _qual_ok(src: TypeRepr, dst: TypeRepr) -> bool:
    """Qualification may be added, never dropped."""
    return dst.is_const or not src.is_const


def _ptr_convertible(src: TypeRepr, dst: TypeRepr, is_base) -> bool:
    sp, dp = src.to, dst.to
    if not _qual_ok(sp, dp):
        return False
    if types_equal(sp, dp, ignore_cv=True):
        return True
    s, d = sp.strip_const(), dp.strip_const()
    if s.kind == "class" and d.kind == "class":
        return is_base(d.name, s.name)
    return False


def symex(prog: GotoProgram, tp: TypedProgram, layouts: Layouts,
          opts: SymexOptions | None = None,
          deadline: Deadline = NO_DEADLINE) -> VcBundle:
    """Unroll to the bound and produce SSA equations plus claims."""
    return SymexEngine(prog, tp, layouts, opts or SymexOptions(), deadline).run()


def ssa_text(bundle: VcBundle) -> str:
    """Stable rendering of equations and claims for --show-ssa."""
    lines = []
    for eq in bundle.equations:
        g = "" if eq.guard is T.TRUE else f" [guard {T.to_text(eq.guard)}]"
        lines.append(f"{eq.lhs} == {T.to_text(eq.rhs)}{g}")
    for i, c in enumerate(bundle.claims):
        g = "" if c.guard is T.TRUE else f" [guard {T.to_text(c.guard)}]"
        lines.append(f"claim {i + 1}: {T.to_text(c.cond)}{g} // {c.property_class}: "
                     f"{c.comment}")
    return "\n".join(lines) + ("\n" if lines else "")
