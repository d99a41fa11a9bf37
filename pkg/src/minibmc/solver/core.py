"""Formula representation and the decision procedure entry point."""

from __future__ import annotations

from dataclasses import dataclass

from minibmc.solver import terms as T
from minibmc.solver.cnf import CnfBuilder
from minibmc.solver.sat import SatSolver
from minibmc.util import NO_DEADLINE, Deadline


@dataclass
class Formula:
    """Constraint conjunction plus a goal disjunction (the negated claims)."""

    constraints: list[T.Term]
    goal: T.Term  # FALSE when there is nothing to refute

    def variables(self) -> dict[str, T.Term]:
        out: dict[str, T.Term] = {}
        seen: set = set()
        for c in self.constraints:
            T.free_vars(c, out, seen)
        T.free_vars(self.goal, out, seen)
        return out


@dataclass
class Model:
    """Total assignment of every formula variable to a constant."""

    values: dict[str, int | bool]

    def eval(self, t: T.Term):
        return T.eval_term(t, self.values)


def _forward_model(formula: Formula) -> Model:
    """Evaluate SSA-style definitions in order; free inputs read as zero.

    Valid whenever the goal is already constant-true: the constraints are
    functional definitions, so forward evaluation satisfies them all.
    """
    env: dict[str, int | bool] = {}
    for c in formula.constraints:
        if c.op == "eq" and c.args[0].op in ("bvvar", "boolvar"):
            lhs, rhs = c.args
            env[lhs.name] = T.eval_term(rhs, env)
    for name, var in formula.variables().items():
        env.setdefault(name, False if var.is_bool else 0)
    return Model(env)


def solve(formula: Formula, vsids: bool = False,
          deadline: Deadline = NO_DEADLINE) -> Model | None:
    """SAT gives a total Model; UNSAT gives None."""
    goal = formula.goal
    if goal is T.FALSE:
        return None
    if goal is T.TRUE:
        return _forward_model(formula)
    builder = CnfBuilder()
    for c in formula.constraints:
        builder.assert_true(c)
    builder.assert_true(goal)
    sat = SatSolver(builder.nvars, builder.clauses, vsids=vsids, deadline=deadline)
    raw = sat.solve()
    if raw is None:
        return None
    values: dict[str, int | bool] = {}
    for name, bits in builder.var_bits.items():
        v = 0
        for i, lit in enumerate(bits):
            bit = raw[abs(lit)] if lit > 0 else not raw[abs(lit)]
            if bit:
                v |= 1 << i
        values[name] = v
    for name, lit in builder.bool_vars.items():
        values[name] = raw[abs(lit)] if lit > 0 else not raw[abs(lit)]
    # variables eliminated by constant folding still need values
    for name, var in formula.variables().items():
        values.setdefault(name, False if var.is_bool else 0)
    return Model(values)
