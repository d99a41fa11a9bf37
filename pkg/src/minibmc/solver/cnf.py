"""Tseitin conversion and bit-blasting of terms into CNF.

Bit-vectors blast to LSB-first literal vectors: ripple-carry addition,
shift-add multiplication, borrow-chain comparisons.  Variable numbering
follows first occurrence, which fixes the solver's static decision order.
"""

from __future__ import annotations

from minibmc.solver.terms import Term


class CnfBuilder:
    def __init__(self):
        self.nvars = 1          # var 1 is the constant TRUE
        self.clauses: list[list[int]] = [[1]]
        self.true_lit = 1
        self.false_lit = -1
        self._gate_memo: dict = {}
        self._term_memo: dict = {}
        self.var_bits: dict[str, list[int]] = {}   # bv var name -> bit vars
        self.bool_vars: dict[str, int] = {}

    def fresh(self) -> int:
        self.nvars += 1
        return self.nvars

    def clause(self, *lits: int) -> None:
        self.clauses.append(list(lits))

    # --- gates (memoized) ---------------------------------------------------
    def and_gate(self, a: int, b: int) -> int:
        if a == self.false_lit or b == self.false_lit:
            return self.false_lit
        if a == self.true_lit:
            return b
        if b == self.true_lit:
            return a
        if a == b:
            return a
        if a == -b:
            return self.false_lit
        key = ("and", *sorted((a, b)))
        hit = self._gate_memo.get(key)
        if hit is not None:
            return hit
        o = self.fresh()
        self.clause(-a, -b, o)
        self.clause(a, -o)
        self.clause(b, -o)
        self._gate_memo[key] = o
        return o

    def or_gate(self, a: int, b: int) -> int:
        return -self.and_gate(-a, -b)

    def xor_gate(self, a: int, b: int) -> int:
        if a == self.true_lit:
            return -b
        if b == self.true_lit:
            return -a
        if a == self.false_lit:
            return b
        if b == self.false_lit:
            return a
        if a == b:
            return self.false_lit
        if a == -b:
            return self.true_lit
        key = ("xor", *sorted((a, b)))
        hit = self._gate_memo.get(key)
        if hit is not None:
            return hit
        o = self.fresh()
        self.clause(-a, -b, -o)
        self.clause(a, b, -o)
        self.clause(-a, b, o)
        self.clause(a, -b, o)
        self._gate_memo[key] = o
        return o

    def iff_gate(self, a: int, b: int) -> int:
        return -self.xor_gate(a, b)

    def ite_gate(self, c: int, t: int, e: int) -> int:
        if c == self.true_lit:
            return t
        if c == self.false_lit:
            return e
        if t == e:
            return t
        return self.or_gate(self.and_gate(c, t), self.and_gate(-c, e))

    # --- bit-vector circuits -------------------------------------------------
    def full_adder(self, a: int, b: int, cin: int) -> tuple[int, int]:
        s = self.xor_gate(self.xor_gate(a, b), cin)
        cout = self.or_gate(self.and_gate(a, b),
                            self.and_gate(cin, self.xor_gate(a, b)))
        return s, cout

    def adder(self, xs: list[int], ys: list[int], cin: int) -> tuple[list[int], int]:
        out = []
        c = cin
        for a, b in zip(xs, ys):
            s, c = self.full_adder(a, b, c)
            out.append(s)
        return out, c

    def blast_bool(self, t: Term) -> int:
        lit = self._term_memo.get(id(t))
        if lit is not None:
            return lit
        op = t.op
        if op == "boolconst":
            lit = self.true_lit if t.value else self.false_lit
        elif op == "boolvar":
            lit = self.bool_vars.get(t.name)
            if lit is None:
                lit = self.fresh()
                self.bool_vars[t.name] = lit
        elif op == "not":
            lit = -self.blast_bool(t.args[0])
        elif op == "and":
            lit = self.and_gate(self.blast_bool(t.args[0]), self.blast_bool(t.args[1]))
        elif op == "or":
            lit = self.or_gate(self.blast_bool(t.args[0]), self.blast_bool(t.args[1]))
        elif op == "implies":
            lit = self.or_gate(-self.blast_bool(t.args[0]), self.blast_bool(t.args[1]))
        elif op == "ite":
            lit = self.ite_gate(self.blast_bool(t.args[0]),
                                self.blast_bool(t.args[1]),
                                self.blast_bool(t.args[2]))
        elif op == "eq":
            a, b = t.args
            if a.is_bool:
                lit = self.iff_gate(self.blast_bool(a), self.blast_bool(b))
            else:
                xs, ys = self.blast_bv(a), self.blast_bv(b)
                lit = self.true_lit
                for x, y in zip(xs, ys):
                    lit = self.and_gate(lit, self.iff_gate(x, y))
        elif op in ("ult", "ule", "slt", "sle"):
            lit = self._compare(op, t.args[0], t.args[1])
        else:
            raise ValueError(f"not a boolean term: {op}")
        self._term_memo[id(t)] = lit
        return lit

    def _unsigned_less(self, xs: list[int], ys: list[int], or_equal: bool) -> int:
        # MSB-down borrow chain
        lit = self.true_lit if or_equal else self.false_lit
        for x, y in zip(xs, ys):  # LSB first; fold from LSB up is fine
            lt = self.and_gate(-x, y)
            eq = self.iff_gate(x, y)
            lit = self.or_gate(lt, self.and_gate(eq, lit))
        return lit

    def _compare(self, op: str, a: Term, b: Term) -> int:
        xs, ys = self.blast_bv(a), self.blast_bv(b)
        if op in ("slt", "sle"):
            # flip sign bits to reduce to the unsigned order
            xs = xs[:-1] + [-xs[-1]]
            ys = ys[:-1] + [-ys[-1]]
        return self._unsigned_less(xs, ys, op in ("ule", "sle"))

    def blast_bv(self, t: Term) -> list[int]:
        bits = self._term_memo.get(id(t))
        if bits is not None:
            return bits
        op = t.op
        w = t.width
        if op == "bvconst":
            bits = [self.true_lit if (t.value >> i) & 1 else self.false_lit
                    for i in range(w)]
        elif op == "bvvar":
            bits = self.var_bits.get(t.name)
            if bits is None:
                bits = [self.fresh() for _ in range(w)]
                self.var_bits[t.name] = bits
        elif op == "add":
            xs, ys = self.blast_bv(t.args[0]), self.blast_bv(t.args[1])
            bits, _ = self.adder(xs, ys, self.false_lit)
        elif op == "sub":
            xs, ys = self.blast_bv(t.args[0]), self.blast_bv(t.args[1])
            bits, _ = self.adder(xs, [-y for y in ys], self.true_lit)
        elif op == "neg":
            xs = self.blast_bv(t.args[0])
            zero = [self.false_lit] * w
            bits, _ = self.adder(zero, [-x for x in xs], self.true_lit)
        elif op == "mul":
            xs, ys = self.blast_bv(t.args[0]), self.blast_bv(t.args[1])
            acc = [self.false_lit] * w
            for i in range(w):
                row = [self.false_lit] * i
                row += [self.and_gate(xs[i], ys[j]) for j in range(w - i)]
                acc, _ = self.adder(acc, row, self.false_lit)
            bits = acc
        elif op == "ite":
            c = self.blast_bool(t.args[0])
            xs, ys = self.blast_bv(t.args[1]), self.blast_bv(t.args[2])
            bits = [self.ite_gate(c, x, y) for x, y in zip(xs, ys)]
        elif op == "sext":
            xs = self.blast_bv(t.args[0])
            bits = xs + [xs[-1]] * (w - len(xs))
        elif op == "zext":
            xs = self.blast_bv(t.args[0])
            bits = xs + [self.false_lit] * (w - len(xs))
        elif op == "extract":
            xs = self.blast_bv(t.args[0])
            bits = xs[t.lo:t.hi + 1]
        else:
            raise ValueError(f"not a bit-vector term: {op}")
        self._term_memo[id(t)] = bits
        return bits

    def assert_true(self, t: Term) -> None:
        self.clause(self.blast_bool(t))
