"""Bit-vector terms, bit-blasting CDCL solver, and SMT-LIB2 emission."""

from minibmc.solver.terms import Term  # noqa: F401
from minibmc.solver import terms  # noqa: F401
from minibmc.solver.core import Formula, Model, solve  # noqa: F401
from minibmc.solver.smt2 import emit_smt2  # noqa: F401
