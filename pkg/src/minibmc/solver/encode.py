"""Encoding of SSA equations and claims into a bit-vector formula.

Each equation contributes lhs = rhs (the guard is already folded into the
right-hand side); each claim contributes guard AND NOT condition to the
goal disjunction, so the formula is satisfiable exactly when some claim
is violated within the bound.
"""

from __future__ import annotations

from minibmc.solver import terms as T
from minibmc.solver.core import Formula
from minibmc.symex import VcBundle


def _lhs_var(eq) -> T.Term:
    if eq.rhs.is_bool:
        return T.bool_var(eq.lhs)
    return T.bv_var(eq.lhs, eq.rhs.width)


def encode(bundle: VcBundle, claim_index: int | None = None) -> Formula:
    """Encode all claims, or a single claim when claim_index is given."""
    constraints = [T.eq(_lhs_var(eq), eq.rhs) for eq in bundle.equations]
    if claim_index is None:
        selected = bundle.claims
    else:
        selected = [bundle.claims[claim_index]]
    goal = T.disj(T.and_(c.guard, T.not_(c.cond)) for c in selected)
    return Formula(constraints, goal)
