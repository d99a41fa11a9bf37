"""The GOTO program: the verification IR with explicit exception and
memory instructions.

Structured control flow is lowered to guarded jumps; try/catch becomes
CATCH_BEGIN/CATCH_END brackets plus labelled handler blocks; throws carry
the tag list of the thrown type and all its bases, most-derived first.
Instruction operands are pure typed expressions (calls and allocations
are hoisted into dedicated instructions during lowering).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from minibmc import nodes as n
from minibmc.cxxtypes import ThrowSpec, TypeRepr, ctype_text, type_tag
from minibmc.errors import NO_LOC, SourceLocation

KINDS = (
    "DECL", "DEAD", "ASSIGN", "ASSERT", "ASSUME", "GOTO", "FUNCTION_CALL",
    "RETURN", "CATCH_BEGIN", "CATCH_END", "THROW", "THROW_DECL", "NEW",
    "DELETE", "SKIP", "END_FUNCTION",
)


@dataclass
class DirectCallee:
    name: str      # internal function name, e.g. "Foo::Inc"
    display: str   # rendering name, e.g. "Inc"


@dataclass
class VirtualCallee:
    path_root: str
    slot_index: int
    method_name: str
    receiver_class: str
    candidates: tuple  # ((vtable id, internal function name), ...)


@dataclass
class HandlerEntry:
    tag: str                     # "tag-Base" or "..." for ellipsis
    htype: TypeRepr | None       # None for ellipsis
    label: int
    var: str = ""


@dataclass
class Instruction:
    kind: str
    loc: SourceLocation = NO_LOC
    labels: tuple = ()
    # DECL / DEAD
    var: str = ""
    var_type: TypeRepr | None = None
    addressable: bool = False
    # ASSIGN
    lhs: n.Expr | None = None
    rhs: n.Expr | None = None
    # ASSERT / ASSUME / conditional GOTO
    cond: n.Expr | None = None
    property_class: str = ""
    comment: str = ""
    # GOTO
    target: int = -1
    # FUNCTION_CALL (lhs_var receives the return value when non-empty)
    callee: DirectCallee | VirtualCallee | None = None
    args: tuple = ()
    lhs_var: str = ""
    # RETURN / THROW value
    value: n.Expr | None = None
    # CATCH_BEGIN
    handlers: tuple = ()
    # THROW
    tags: tuple = ()
    value_type: TypeRepr | None = None
    # THROW_DECL
    spec: ThrowSpec | None = None
    # NEW
    elem_type: TypeRepr | None = None
    count: n.Expr | None = None
    is_array: bool = False


@dataclass
class GotoFunction:
    name: str                 # unique internal name
    display: str              # source-level name used in reports
    params: tuple             # ((name, TypeRepr), ...) as lowered (refs -> ptr)
    ret_type: TypeRepr
    instrs: list = field(default_factory=list)
    throw_spec: ThrowSpec | None = None

    def label_index(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for i, ins in enumerate(self.instrs):
            for lbl in ins.labels:
                out[lbl] = i
        return out


@dataclass
class GotoProgram:
    functions: dict[str, GotoFunction]
    entry: str = "main"
    init_function: str = ""   # runs before the entry when non-empty


# --- rendering ---------------------------------------------------------------

def _expr(e: n.Expr | None) -> str:
    return "" if e is None else n.expr_text(e)


def render_instruction(ins: Instruction) -> str:
    k = ins.kind
    if k == "DECL":
        return f"DECL: {ctype_text(ins.var_type)} {ins.var}"
    if k == "DEAD":
        return f"DEAD: {ins.var}"
    if k == "ASSIGN":
        return f"ASSIGN: {_expr(ins.lhs)} = {_expr(ins.rhs)}"
    if k == "ASSERT":
        note = f" // {ins.comment}" if ins.comment else ""
        return f"ASSERT: {_expr(ins.cond)}{note}"
    if k == "ASSUME":
        return f"ASSUME: {_expr(ins.cond)}"
    if k == "GOTO":
        if ins.cond is None:
            return f"GOTO {ins.target}"
        return f"IF {_expr(ins.cond)} GOTO {ins.target}"
    if k == "FUNCTION_CALL":
        args = ", ".join(_expr(a) for a in ins.args)
        if isinstance(ins.callee, VirtualCallee):
            recv = _expr(ins.args[0]) if ins.args else "?"
            call = f"*{recv}->{ins.callee.path_root}@vptr.{ins.callee.method_name}({args})"
        else:
            call = f"{ins.callee.display}({args})"
        if ins.lhs_var:
            return f"FUNCTION_CALL: {ins.lhs_var} = {call}"
        return f"FUNCTION_CALL: {call}"
    if k == "RETURN":
        return f"RETURN: {_expr(ins.value)}" if ins.value is not None else "RETURN:"
    if k == "CATCH_BEGIN":
        entries = ", ".join(f"{h.tag}->{h.label}" for h in ins.handlers)
        return f"CATCH_BEGIN: {entries}"
    if k == "CATCH_END":
        return "CATCH_END"
    if k == "THROW":
        tags = ", ".join(ins.tags)
        if ins.value is None:
            return f"THROW: {tags}".rstrip().rstrip(":") if not tags else f"THROW: {tags}"
        return f"THROW: {tags}: {_expr(ins.value)}"
    if k == "THROW_DECL":
        if ins.spec.kind == "noexcept":
            return "THROW_DECL: noexcept"
        tags = ", ".join(type_tag(t) for t in ins.spec.types)
        return f"THROW_DECL: {tags}"
    if k == "NEW":
        if ins.is_array:
            return f"NEW: {ins.lhs_var} = new {ctype_text(ins.elem_type)}[{_expr(ins.count)}]"
        return f"NEW: {ins.lhs_var} = new {ctype_text(ins.elem_type)}"
    if k == "DELETE":
        kw = "DELETE[]" if ins.is_array else "DELETE"
        return f"{kw}: {_expr(ins.value)}"
    if k == "SKIP":
        return f"SKIP // {ins.comment}" if ins.comment else "SKIP"
    if k == "END_FUNCTION":
        return "END_FUNCTION"
    raise ValueError(f"unknown instruction kind {k}")


def emit_goto_text(prog: GotoProgram) -> str:
    """Stable, diffable rendering: numeric labels, one instruction per line."""
    lines: list[str] = []
    for name, fn in prog.functions.items():
        lines.append(f"{name}:")
        for ins in fn.instrs:
            prefix = "".join(f"{lbl}: " for lbl in ins.labels)
            lines.append(f"        {prefix}{render_instruction(ins)}")
        lines.append("")
    return "\n".join(lines)
