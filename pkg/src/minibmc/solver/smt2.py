"""SMT-LIB2 text emission for QF_BV, byte-stable across runs."""

from __future__ import annotations

from minibmc.solver import terms as T
from minibmc.solver.core import Formula

_OPS = {
    "add": "bvadd", "sub": "bvsub", "mul": "bvmul", "neg": "bvneg",
    "ult": "bvult", "slt": "bvslt", "ule": "bvule", "sle": "bvsle",
    "and": "and", "or": "or", "not": "not", "implies": "=>",
    "eq": "=", "ite": "ite",
}


def _sym(name: str) -> str:
    return f"|{name}|"


def _render(t: T.Term, memo: dict) -> str:
    hit = memo.get(id(t))
    if hit is not None:
        return hit
    op = t.op
    if op == "bvconst":
        out = f"(_ bv{t.value} {t.width})"
    elif op == "boolconst":
        out = "true" if t.value else "false"
    elif op in ("bvvar", "boolvar"):
        out = _sym(t.name)
    elif op == "sext":
        inner = _render(t.args[0], memo)
        out = f"((_ sign_extend {t.width - t.args[0].width}) {inner})"
    elif op == "zext":
        inner = _render(t.args[0], memo)
        out = f"((_ zero_extend {t.width - t.args[0].width}) {inner})"
    elif op == "extract":
        inner = _render(t.args[0], memo)
        out = f"((_ extract {t.hi} {t.lo}) {inner})"
    else:
        parts = " ".join(_render(a, memo) for a in t.args)
        out = f"({_OPS[op]} {parts})"
    memo[id(t)] = out
    return out


def emit_smt2(formula: Formula) -> str:
    """One assert for the constraints, one for the goal, then (check-sat)."""
    lines = ["(set-logic QF_BV)"]
    for name, var in formula.variables().items():
        sort = "Bool" if var.is_bool else f"(_ BitVec {var.width})"
        lines.append(f"(declare-fun {_sym(name)} () {sort})")
    memo: dict = {}
    if formula.constraints:
        if len(formula.constraints) == 1:
            body = _render(formula.constraints[0], memo)
        else:
            body = "(and " + " ".join(_render(c, memo) for c in formula.constraints) + ")"
    else:
        body = "true"
    lines.append(f"(assert {body})")
    lines.append(f"(assert {_render(formula.goal, memo)})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"
