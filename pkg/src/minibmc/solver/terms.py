"""Fixed-width bit-vector and boolean terms.

Terms are immutable and compared by identity; the smart constructors fold
constants aggressively so that straight-line concrete programs reduce to
constant claims without touching the SAT solver.  Integer constants are
stored masked to their width (two's complement wrap-around).
"""

from __future__ import annotations

BV_OPS = ("add", "sub", "mul", "neg", "ite", "sext", "zext", "extract")
BOOL_OPS = ("eq", "ult", "slt", "ule", "sle", "and", "or", "not", "implies", "ite")


class Term:
    __slots__ = ("op", "args", "width", "value", "name", "hi", "lo")

    def __init__(self, op, args=(), width=None, value=None, name="", hi=0, lo=0):
        self.op = op
        self.args = args
        self.width = width   # None = bool sort
        self.value = value
        self.name = name
        self.hi = hi
        self.lo = lo

    @property
    def is_bool(self):
        return self.width is None

    def __repr__(self):
        return f"<{to_text(self)}>"


TRUE = Term("boolconst", value=True)
FALSE = Term("boolconst", value=False)

_bv_vars: dict[tuple[str, int], Term] = {}
_bool_vars: dict[str, Term] = {}


def mask(value: int, width: int) -> int:
    return value & ((1 << width) - 1)


def to_signed(value: int, width: int) -> int:
    value = mask(value, width)
    if value >= 1 << (width - 1):
        value -= 1 << width
    return value


def bv_const(width: int, value: int) -> Term:
    return Term("bvconst", width=width, value=mask(value, width))


def bool_const(b: bool) -> Term:
    return TRUE if b else FALSE


def bv_var(name: str, width: int) -> Term:
    key = (name, width)
    t = _bv_vars.get(key)
    if t is None:
        t = Term("bvvar", width=width, name=name)
        _bv_vars[key] = t
    return t


def bool_var(name: str) -> Term:
    t = _bool_vars.get(name)
    if t is None:
        t = Term("boolvar", name=name)
        _bool_vars[name] = t
    return t


def is_const(t: Term) -> bool:
    return t.op in ("bvconst", "boolconst")


def add(a: Term, b: Term) -> Term:
    if is_const(a) and is_const(b):
        return bv_const(a.width, a.value + b.value)
    if is_const(a) and a.value == 0:
        return b
    if is_const(b) and b.value == 0:
        return a
    return Term("add", (a, b), width=a.width)


def sub(a: Term, b: Term) -> Term:
    if is_const(a) and is_const(b):
        return bv_const(a.width, a.value - b.value)
    if is_const(b) and b.value == 0:
        return a
    if a is b:
        return bv_const(a.width, 0)
    return Term("sub", (a, b), width=a.width)


def mul(a: Term, b: Term) -> Term:
    if is_const(a) and is_const(b):
        return bv_const(a.width, a.value * b.value)
    for x, y in ((a, b), (b, a)):
        if is_const(x):
            if x.value == 0:
                return bv_const(a.width, 0)
            if x.value == 1:
                return y
    return Term("mul", (a, b), width=a.width)


def neg(a: Term) -> Term:
    if is_const(a):
        return bv_const(a.width, -a.value)
    return Term("neg", (a,), width=a.width)


def eq(a: Term, b: Term) -> Term:
    if a is b:
        return TRUE
    if is_const(a) and is_const(b):
        return bool_const(a.value == b.value)
    return Term("eq", (a, b))


def ne(a: Term, b: Term) -> Term:
    return not_(eq(a, b))


def _cmp(op: str, a: Term, b: Term, py) -> Term:
    if is_const(a) and is_const(b):
        return bool_const(py(a, b))
    if a is b:
        return bool_const(op in ("ule", "sle"))
    return Term(op, (a, b))


def ult(a, b):
    return _cmp("ult", a, b, lambda x, y: x.value < y.value)


def ule(a, b):
    return _cmp("ule", a, b, lambda x, y: x.value <= y.value)


def slt(a, b):
    return _cmp("slt", a, b,
                lambda x, y: to_signed(x.value, x.width) < to_signed(y.value, y.width))


def sle(a, b):
    return _cmp("sle", a, b,
                lambda x, y: to_signed(x.value, x.width) <= to_signed(y.value, y.width))


def and_(a: Term, b: Term) -> Term:
    if a is TRUE:
        return b
    if b is TRUE:
        return a
    if a is FALSE or b is FALSE:
        return FALSE
    if a is b:
        return a
    return Term("and", (a, b))


def or_(a: Term, b: Term) -> Term:
    if a is FALSE:
        return b
    if b is FALSE:
        return a
    if a is TRUE or b is TRUE:
        return TRUE
    if a is b:
        return a
    # (g && c) || (g && !c) -> g: the shape every branch merge produces
    if a.op == "and" and b.op == "and" and a.args[0] is b.args[0]:
        x, y = a.args[1], b.args[1]
        if (y.op == "not" and y.args[0] is x) or (x.op == "not" and x.args[0] is y):
            return a.args[0]
    return Term("or", (a, b))


_not_memo: dict[int, Term] = {}


def not_(a: Term) -> Term:
    if a is TRUE:
        return FALSE
    if a is FALSE:
        return TRUE
    if a.op == "not":
        return a.args[0]
    hit = _not_memo.get(id(a))
    if hit is None:
        hit = Term("not", (a,))
        _not_memo[id(a)] = hit
    return hit


def implies(a: Term, b: Term) -> Term:
    return or_(not_(a), b)


def conj(items) -> Term:
    out = TRUE
    for t in items:
        out = and_(out, t)
    return out


def disj(items) -> Term:
    out = FALSE
    for t in items:
        out = or_(out, t)
    return out


def ite(c: Term, a: Term, b: Term) -> Term:
    if c is TRUE:
        return a
    if c is FALSE:
        return b
    if a is b:
        return a
    if a.width is None:  # boolean ite
        if a is TRUE and b is FALSE:
            return c
        if a is FALSE and b is TRUE:
            return not_(c)
        return Term("ite", (c, a, b))
    return Term("ite", (c, a, b), width=a.width)


def sext(a: Term, new_width: int) -> Term:
    if new_width == a.width:
        return a
    if is_const(a):
        return bv_const(new_width, to_signed(a.value, a.width))
    return Term("sext", (a,), width=new_width)


def zext(a: Term, new_width: int) -> Term:
    if new_width == a.width:
        return a
    if is_const(a):
        return bv_const(new_width, a.value)
    return Term("zext", (a,), width=new_width)


def extract(a: Term, hi: int, lo: int) -> Term:
    width = hi - lo + 1
    if width == a.width:
        return a
    if is_const(a):
        return bv_const(width, a.value >> lo)
    return Term("extract", (a,), width=width, hi=hi, lo=lo)


def bool_to_bv(b: Term, width: int) -> Term:
    return ite(b, bv_const(width, 1), bv_const(width, 0))


def bv_to_bool(a: Term) -> Term:
    return ne(a, bv_const(a.width, 0))


# --- evaluation ------------------------------------------------------------

def eval_term(t: Term, env: dict, memo: dict | None = None):
    """Evaluate under an assignment name -> int/bool; missing vars read 0."""
    if memo is None:
        memo = {}
    key = id(t)
    if key in memo:
        return memo[key]
    op = t.op
    if op == "bvconst":
        v = t.value
    elif op == "boolconst":
        v = t.value
    elif op == "bvvar":
        v = mask(int(env.get(t.name, 0)), t.width)
    elif op == "boolvar":
        v = bool(env.get(t.name, False))
    else:
        a = [eval_term(x, env, memo) for x in t.args]
        if op == "add":
            v = mask(a[0] + a[1], t.width)
        elif op == "sub":
            v = mask(a[0] - a[1], t.width)
        elif op == "mul":
            v = mask(a[0] * a[1], t.width)
        elif op == "neg":
            v = mask(-a[0], t.width)
        elif op == "eq":
            v = a[0] == a[1]
        elif op == "ult":
            v = a[0] < a[1]
        elif op == "ule":
            v = a[0] <= a[1]
        elif op == "slt":
            w = t.args[0].width
            v = to_signed(a[0], w) < to_signed(a[1], w)
        elif op == "sle":
            w = t.args[0].width
            v = to_signed(a[0], w) <= to_signed(a[1], w)
        elif op == "and":
            v = a[0] and a[1]
        elif op == "or":
            v = a[0] or a[1]
        elif op == "not":
            v = not a[0]
        elif op == "ite":
            v = a[1] if a[0] else a[2]
        elif op == "sext":
            v = mask(to_signed(a[0], t.args[0].width), t.width)
        elif op == "zext":
            v = a[0]
        elif op == "extract":
            v = mask(a[0] >> t.lo, t.width)
        else:
            raise ValueError(f"cannot evaluate {op}")
    memo[key] = v
    return v


def free_vars(t: Term, out: dict | None = None, seen: set | None = None) -> dict:
    """name -> Term for every variable, in first-occurrence order."""
    if out is None:
        out = {}
    if seen is None:
        seen = set()
    if id(t) in seen:
        return out
    seen.add(id(t))
    if t.op in ("bvvar", "boolvar"):
        out.setdefault(t.name, t)
    for a in t.args:
        free_vars(a, out, seen)
    return out


# --- rendering ------------------------------------------------------------

_INFIX = {"add": "+", "sub": "-", "mul": "*", "and": "&&", "or": "||",
          "eq": "==", "ult": "<u", "slt": "<", "ule": "<=u", "sle": "<="}


def to_text(t: Term, short_names: bool = False) -> str:
    op = t.op
    if op == "bvconst":
        return str(to_signed(t.value, t.width))
    if op == "boolconst":
        return "TRUE" if t.value else "FALSE"
    if op in ("bvvar", "boolvar"):
        return t.name.split("!")[0] if short_names else t.name
    if op == "not":
        inner = t.args[0]
        if inner.op == "eq":
            return (f"{to_text(inner.args[0], short_names)}!="
                    f"{to_text(inner.args[1], short_names)}")
        return f"!({to_text(inner, short_names)})"
    if op in _INFIX:
        a, b = t.args
        return (f"{_paren(a, short_names)} {_INFIX[op]} {_paren(b, short_names)}"
                if not short_names else
                f"{_paren(a, short_names)}{_INFIX[op]}{_paren(b, short_names)}")
    if op == "neg":
        return f"-{_paren(t.args[0], short_names)}"
    if op == "ite":
        c, a, b = (to_text(x, short_names) for x in t.args)
        return f"({c} ? {a} : {b})"
    if op == "sext" or op == "zext":
        return f"{op}{t.width}({to_text(t.args[0], short_names)})"
    if op == "extract":
        return f"extract[{t.hi}:{t.lo}]({to_text(t.args[0], short_names)})"
    raise ValueError(op)


def _paren(t: Term, short: bool) -> str:
    if t.op in _INFIX or t.op == "ite":
        return f"({to_text(t, short)})"
    return to_text(t, short)
