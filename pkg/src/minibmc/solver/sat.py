"""CDCL SAT solver with two-literal watching and first-UIP learning.

The decision heuristic defaults to static variable order (ascending index,
false first) for reproducibility; VSIDS scoring is available behind a
flag.  The solver is deterministic either way.
"""

from __future__ import annotations

UNASSIGNED = -1


class SatSolver:
    def __init__(self, nvars: int, clauses: list[list[int]], vsids: bool = False,
                 deadline=None):
        self.nvars = nvars
        self.vsids = vsids
        self.deadline = deadline
        self.value: list[int] = [UNASSIGNED] * (nvars + 1)   # var -> 0/1
        self.level: list[int] = [0] * (nvars + 1)
        self.reason: list[list[int] | None] = [None] * (nvars + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: dict[int, list[list[int]]] = {}
        self.clauses: list[list[int]] = []
        self.scores: list[float] = [0.0] * (nvars + 1)
        self.score_inc = 1.0
        self.ok = True
        for c in clauses:
            if not self.add_clause(sorted(set(c), key=abs)):
                self.ok = False
                return

    # --- clause management --------------------------------------------------
    def add_clause(self, lits: list[int]) -> bool:
        if any(-l in lits for l in lits):
            return True  # tautology
        if not lits:
            return False
        if len(lits) == 1:
            return self.enqueue(lits[0], None)
        self.clauses.append(lits)
        self.watch(lits[0], lits)
        self.watch(lits[1], lits)
        return True

    def watch(self, lit: int, clause: list[int]) -> None:
        self.watches.setdefault(lit, []).append(clause)

    def lit_value(self, lit: int) -> int:
        v = self.value[abs(lit)]
        if v == UNASSIGNED:
            return UNASSIGNED
        return v if lit > 0 else 1 - v

    def enqueue(self, lit: int, reason: list[int] | None) -> bool:
        val = self.lit_value(lit)
        if val == 1:
            return True
        if val == 0:
            return False
        var = abs(lit)
        self.value[var] = 1 if lit > 0 else 0
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)
        return True

    # --- propagation ------------------------------------------------------------
    def propagate(self) -> list[int] | None:
        """Returns a conflicting clause, or None."""
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            neg = -lit
            watching = self.watches.get(neg, [])
            i = 0
            while i < len(watching):
                clause = watching[i]
                # ensure neg is at position 1
                if clause[0] == neg:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                if self.lit_value(first) == 1:
                    i += 1
                    continue
                moved = False
                for k in range(2, len(clause)):
                    if self.lit_value(clause[k]) != 0:
                        clause[1], clause[k] = clause[k], clause[1]
                        watching[i] = watching[-1]
                        watching.pop()
                        self.watch(clause[1], clause)
                        moved = True
                        break
                if moved:
                    continue
                if self.lit_value(first) == 0:
                    return clause  # conflict
                self.enqueue(first, clause)
                i += 1
        return None

    # --- conflict analysis ---------------------------------------------------------
    def analyze(self, conflict: list[int]) -> tuple[list[int], int]:
        """First-UIP clause learning; returns (learned clause, backjump level)."""
        current_level = len(self.trail_lim)
        learned: list[int] = []
        seen = [False] * (self.nvars + 1)
        counter = 0
        p = 0  # 0 = conflict round: take every literal of the reason
        reason = conflict
        idx = len(self.trail) - 1
        while True:
            for q in reason:
                if p != 0 and q == p:
                    continue
                var = abs(q)
                if not seen[var] and self.level[var] > 0:
                    seen[var] = True
                    self.bump(var)
                    if self.level[var] >= current_level:
                        counter += 1
                    else:
                        learned.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            seen[abs(p)] = False
            counter -= 1
            if counter == 0:
                break
            reason = self.reason[abs(p)] or []
        learned.insert(0, -p)
        if len(learned) == 1:
            return learned, 0
        back = max(self.level[abs(q)] for q in learned[1:])
        for i in range(1, len(learned)):
            if self.level[abs(learned[i])] == back:
                learned[1], learned[i] = learned[i], learned[1]
                break
        return learned, back

    def bump(self, var: int) -> None:
        if not self.vsids:
            return
        self.scores[var] += self.score_inc
        if self.scores[var] > 1e100:
            for i in range(1, self.nvars + 1):
                self.scores[i] *= 1e-100
            self.score_inc *= 1e-100

    def backjump(self, level: int) -> None:
        while len(self.trail_lim) > level:
            limit = self.trail_lim.pop()
            while len(self.trail) > limit:
                lit = self.trail.pop()
                var = abs(lit)
                self.value[var] = UNASSIGNED
                self.reason[var] = None
        self.qhead = min(self.qhead, len(self.trail))

    # --- decisions ----------------------------------------------------------------------
    def decide(self) -> int:
        if self.vsids:
            best, best_score = 0, -1.0
            for v in range(1, self.nvars + 1):
                if self.value[v] == UNASSIGNED and self.scores[v] > best_score:
                    best, best_score = v, self.scores[v]
            return -best if best else 0
        for v in range(1, self.nvars + 1):
            if self.value[v] == UNASSIGNED:
                return -v  # static order, false first
        return 0

    def solve(self) -> dict[int, bool] | None:
        """Model as var -> bool, or None when unsatisfiable."""
        if not self.ok:
            return None
        steps = 0
        while True:
            conflict = self.propagate()
            if conflict is not None:
                if not self.trail_lim:
                    return None
                learned, back = self.analyze(conflict)
                self.backjump(back)
                if len(learned) == 1:
                    if not self.enqueue(learned[0], None):
                        return None
                else:
                    self.clauses.append(learned)
                    self.watch(learned[0], learned)
                    self.watch(learned[1], learned)
                    self.enqueue(learned[0], learned)
                if self.vsids:
                    self.score_inc /= 0.95
                continue
            steps += 1
            if self.deadline is not None and steps % 512 == 0:
                self.deadline.check()
            lit = self.decide()
            if lit == 0:
                return {v: bool(self.value[v]) for v in range(1, self.nvars + 1)}
            self.trail_lim.append(len(self.trail))
            self.enqueue(lit, None)
