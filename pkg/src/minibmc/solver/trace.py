"""Counterexample reconstruction: replay the equations under a model."""

from __future__ import annotations

from dataclasses import dataclass

from minibmc.errors import InternalError, SourceLocation
from minibmc.solver import terms as T
from minibmc.solver.core import Model
from minibmc.symex import Claim, VcBundle


@dataclass
class TraceStep:
    loc: SourceLocation
    symbol: str
    value: str
    kind: str = "assignment"   # or "violation"
    hidden: bool = False


def _render(value, term: T.Term) -> str:
    if term.is_bool:
        return "true" if value else "false"
    return str(T.to_signed(value, term.width))


def extract_trace(model: Model, bundle: VcBundle, claim: Claim) -> list[TraceStep]:
    """Steps whose guard holds under the model, ending at the violation.

    Aborts loudly when the model fails to replay: every equation must
    evaluate consistently with the model's assignment for its left side.
    """
    steps: list[TraceStep] = []
    memo: dict = {}
    for eq in bundle.equations:
        rhs_val = T.eval_term(eq.rhs, model.values, memo)
        lhs_val = model.values.get(eq.lhs)
        if lhs_val is None:
            lhs_val = rhs_val
        elif T.eval_term(T.eq(_var_of(eq), eq.rhs), model.values, memo) is not True:
            raise InternalError(
                f"model does not replay: {eq.lhs} is {lhs_val}, expected {rhs_val}")
        if T.eval_term(eq.guard, model.values, memo) is not True:
            continue
        steps.append(TraceStep(eq.loc, eq.display, _render(rhs_val, eq.rhs),
                               hidden=eq.hidden))
    steps.append(TraceStep(claim.loc, claim.display, "", kind="violation"))
    return steps


def _var_of(eq) -> T.Term:
    if eq.rhs.is_bool:
        return T.bool_var(eq.lhs)
    return T.bv_var(eq.lhs, eq.rhs.width)
