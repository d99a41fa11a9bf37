"""Differential testing: random branching/looping integer programs are
executed concretely in Python (32-bit wrap-around) and the checker's
verdict must agree with the concrete run."""

import random

import pytest

from minibmc.driver import RunOptions, verify_source

MASK = (1 << 32) - 1


def wrap(v: int) -> int:
    v &= MASK
    return v - (1 << 32) if v >= 1 << 31 else v


class ProgramBuilder:
    """Grows a program and its concrete state side by side.

    `env` maps every variable in scope to its value on the executed path;
    declarations inside branches stay local to them.
    """

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.lines: list[str] = []
        self.env: dict[str, int] = {}
        self.counter = 0
        self.indent = 1

    def emit(self, text: str) -> None:
        self.lines.append("  " * self.indent + text)

    def fresh_name(self) -> str:
        self.counter += 1
        return f"v{self.counter}"

    @staticmethod
    def lit(v: int) -> str:
        return str(v) if v >= 0 else f"(0 - {-v})"

    def expr(self, depth: int) -> tuple[str, int]:
        r = self.rng.random()
        if depth == 0 or r < 0.35:
            if self.env and r < 0.6:
                name = self.rng.choice(sorted(self.env))
                return name, self.env[name]
            c = self.rng.randint(-50, 50)
            return self.lit(c), c
        op = self.rng.choice(["+", "-", "*"])
        lhs, lv = self.expr(depth - 1)
        rhs, rv = self.expr(depth - 1)
        value = {"+": lv + rv, "-": lv - rv, "*": lv * rv}[op]
        return f"({lhs} {op} {rhs})", wrap(value)

    def comparison(self) -> tuple[str, bool]:
        lhs, lv = self.expr(1)
        rhs, rv = self.expr(1)
        op = self.rng.choice(["<", "<=", "==", "!=", ">", ">="])
        truth = {"<": lv < rv, "<=": lv <= rv, "==": lv == rv,
                 "!=": lv != rv, ">": lv > rv, ">=": lv >= rv}[op]
        return f"{lhs} {op} {rhs}", truth

    def assignment(self) -> None:
        text, value = self.expr(2)
        if self.env and self.rng.random() < 0.5:
            name = self.rng.choice(sorted(self.env))
            self.emit(f"{name} = {text};")
        else:
            name = self.fresh_name()
            self.emit(f"int {name} = {text};")
        self.env[name] = value

    def if_else(self, budget: int) -> None:
        cond, taken = self.comparison()
        outer = set(self.env)
        self.emit(f"if ({cond}) {{")
        self.indent += 1
        before_then = dict(self.env)
        self.block(budget - 1)
        after_then = dict(self.env)
        self.env = before_then
        self.indent -= 1
        self.emit("} else {")
        self.indent += 1
        self.block(budget - 1)
        after_else = dict(self.env)
        self.indent -= 1
        self.emit("}")
        survived = after_then if taken else after_else
        self.env = {name: survived[name] for name in outer}

    def loop(self) -> None:
        trips = self.rng.randint(0, 4)
        counter = self.fresh_name()
        self.emit(f"int {counter} = 0;")
        self.env[counter] = 0
        targets = sorted(self.env)
        acc = self.rng.choice(targets)
        step = self.rng.randint(1, 3)
        self.emit(f"while ({counter} < {trips}) {{")
        self.indent += 1
        if acc != counter:
            self.emit(f"{acc} = {acc} + {step};")
        self.emit(f"{counter} = {counter} + 1;")
        self.indent -= 1
        self.emit("}")
        if acc != counter:
            self.env[acc] = wrap(self.env[acc] + step * trips)
        self.env[counter] = trips

    def statement(self, budget: int) -> None:
        r = self.rng.random()
        if r < 0.5 or not self.env:
            self.assignment()
        elif r < 0.8 and budget > 0:
            self.if_else(budget)
        else:
            self.loop()

    def block(self, budget: int) -> None:
        for _ in range(self.rng.randint(1, 2)):
            self.statement(budget)

    def build(self, make_failing: bool) -> str:
        for _ in range(self.rng.randint(3, 7)):
            self.statement(2)
        name = self.rng.choice(sorted(self.env))
        value = self.env[name]
        target = wrap(value + 1) if make_failing else value
        self.emit(f"assert({name} == {self.lit(target)});")
        self.emit("return 0;")
        return "int main() {\n" + "\n".join(self.lines) + "\n}\n"


@pytest.mark.parametrize("seed", range(60))
def test_verdict_matches_concrete_execution(seed):
    rng = random.Random(1000 + seed)
    make_failing = seed % 2 == 1
    source = ProgramBuilder(rng).build(make_failing)
    verdict = verify_source(source, f"gen{seed}.cpp", RunOptions(unwind=6))
    expected = "FAILED" if make_failing else "SUCCESSFUL"
    assert verdict.status == expected, f"seed {seed}:\n{source}\n{verdict.message}"
    if make_failing:
        assert verdict.violated.property_class == "assertion"


class HeapProgramBuilder:
    """Random allocate/free/store/load sequences with an exact oracle.

    The oracle runs the same sequence concretely, tracking object validity,
    and predicts the first violated property (or a leak when the check is
    on and something survives).
    """

    def __init__(self, rng: random.Random, leak_check: bool):
        self.rng = rng
        self.leak_check = leak_check
        self.lines: list[str] = []
        self.pointers: dict[str, str] = {}   # name -> object key or "null"
        self.objects: dict[str, dict] = {}   # key -> {valid, value}
        self.counter = 0
        self.failure: str | None = None      # first violated property class

    def emit(self, text: str) -> None:
        self.lines.append("  " + text)

    def note_failure(self, prop: str) -> None:
        if self.failure is None:
            self.failure = prop

    def allocate(self) -> None:
        self.counter += 1
        name, key = f"p{self.counter}", f"o{self.counter}"
        value = self.rng.randint(-9, 9)
        self.emit(f"int *{name} = new int({self.lit(value)});")
        self.pointers[name] = key
        self.objects[key] = {"valid": True, "value": value}

    def realias(self) -> None:
        src = self.rng.choice(sorted(self.pointers))
        self.counter += 1
        name = f"p{self.counter}"
        self.emit(f"int *{name} = {src};")
        self.pointers[name] = self.pointers[src]

    def make_null(self) -> None:
        self.counter += 1
        name = f"p{self.counter}"
        self.emit(f"int *{name} = nullptr;")
        self.pointers[name] = "null"

    def free(self) -> None:
        name = self.rng.choice(sorted(self.pointers))
        self.emit(f"delete {name};")
        key = self.pointers[name]
        if key == "null":
            return  # deleting null is a no-op
        obj = self.objects[key]
        if not obj["valid"]:
            self.note_failure("invalid object in delete")
        obj["valid"] = False

    def store(self) -> None:
        name = self.rng.choice(sorted(self.pointers))
        value = self.rng.randint(-9, 9)
        self.emit(f"*{name} = {self.lit(value)};")
        key = self.pointers[name]
        if key == "null":
            self.note_failure("dereference failure: NULL pointer")
            return
        obj = self.objects[key]
        if not obj["valid"]:
            self.note_failure("dereference failure: invalidated dynamic object")
        obj["value"] = value

    def load_assert(self) -> None:
        name = self.rng.choice(sorted(self.pointers))
        key = self.pointers[name]
        if key == "null":
            self.emit(f"int x{self.counter} = *{name};")
            self.counter += 1
            self.note_failure("dereference failure: NULL pointer")
            return
        obj = self.objects[key]
        if not obj["valid"]:
            self.emit(f"int x{self.counter} = *{name};")
            self.counter += 1
            self.note_failure("dereference failure: invalidated dynamic object")
            return
        self.emit(f"assert(*{name} == {self.lit(obj['value'])});")

    @staticmethod
    def lit(v: int) -> str:
        return str(v) if v >= 0 else f"(0 - {-v})"

    def build(self) -> tuple[str, str, str]:
        self.allocate()
        steps = [self.allocate, self.realias, self.make_null, self.free,
                 self.store, self.load_assert]
        weights = [2, 2, 1, 3, 3, 3]
        for _ in range(self.rng.randint(4, 14)):
            self.rng.choices(steps, weights)[0]()
        self.emit("return 0;")
        source = "int main() {\n" + "\n".join(self.lines) + "\n}\n"
        if self.failure is not None:
            return source, "FAILED", self.failure
        if self.leak_check and any(o["valid"] for o in self.objects.values()):
            return source, "FAILED", "memory leak"
        return source, "SUCCESSFUL", ""


@pytest.mark.parametrize("seed", range(60))
def test_heap_verdict_matches_oracle(seed):
    rng = random.Random(7000 + seed)
    leak_check = seed % 3 == 0
    source, status, prop = HeapProgramBuilder(rng, leak_check).build()
    verdict = verify_source(source, f"heap{seed}.cpp",
                            RunOptions(memory_leak_check=leak_check))
    assert verdict.status == status, f"seed {seed}:\n{source}\n{verdict.message}"
    if prop:
        got = verdict.violated.property_class
        assert got == prop, f"seed {seed}: expected {prop!r}, got {got!r}\n{source}"
