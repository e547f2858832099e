"""Unit propagation look-ahead over single variables and variable pairs.

Both sweeps probe the clause view ``phi + working`` and commit what they
learn into ``phi`` in place: forced literals become unit clauses (with the
rest of ``phi`` simplified by them) and pair conflicts become binary
clauses.  The returned :class:`UplaEffect` lists what was added.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .cnf import ClauseView, Formula, lit_key, make_clause, satisfies

UNSATISFIABLE = "UNSATISFIABLE"
SATISFIABLE = "SATISFIABLE"

# probe order for a pair (v1, v2): 00, 01, 10, 11
COMBOS = ((False, False), (False, True), (True, False), (True, True))


class EmptyIntersectionSet(ValueError):
    pass


@dataclass
class ProbeOutcome:
    assumptions: tuple
    assignment: dict
    conflicted: bool


@dataclass
class UplaEffect:
    verdict: Optional[str] = None
    new_units: list = field(default_factory=list)
    new_binaries: list = field(default_factory=list)
    model: Optional[dict] = None
    # (v1, v2, branch) per probed pair; branch is one of
    # "0", "1", "2", "2-shared", "3", "4"
    branches: list = field(default_factory=list)
    pairs_probed: int = 0

    @property
    def changed(self) -> bool:
        return bool(self.new_units or self.new_binaries)


def probe(clauses, assumptions: Sequence[int]) -> ProbeOutcome:
    """Assert ``assumptions`` hypothetically and propagate to fixpoint."""
    view = clauses if isinstance(clauses, ClauseView) else ClauseView(clauses)
    assignment, conflicted = view.propagate(assumptions)
    return ProbeOutcome(tuple(assumptions), assignment, conflicted)


def intersect_implications(outcomes: Sequence[ProbeOutcome]) -> list:
    """Literals assigned identically by every outcome, minus the probed vars."""
    if not outcomes:
        raise EmptyIntersectionSet("no non-conflicting outcomes to intersect")
    probed = {abs(l) for o in outcomes for l in o.assumptions}
    first, rest = outcomes[0].assignment, [o.assignment for o in outcomes[1:]]
    common = []
    for v, val in first.items():
        if v in probed:
            continue
        if all(a.get(v) == val for a in rest):
            common.append(v if val else -v)
    return sorted(common, key=lit_key)


def fixed_literals(phi: Formula) -> set:
    return {c[0] for c in phi.clauses if len(c) == 1}


def simplify_formula(phi: Formula, lits: Iterable[int]) -> None:
    """Rewrite ``phi`` under the permanently true literals ``lits``.

    Satisfied clauses are dropped, falsified literals deleted, and each
    literal in ``lits`` is kept as a unit clause.
    """
    lits = set(lits)
    if not lits:
        return
    out = []
    kept_units = set()
    for c in phi.clauses:
        if any(l in lits for l in c):
            if len(c) == 1 and c[0] not in kept_units:
                out.append(c)
                kept_units.add(c[0])
            continue
        if any(-l in lits for l in c):
            c = tuple(l for l in c if -l not in lits)
        out.append(c)
    for l in sorted(lits - kept_units, key=lit_key):
        out.append((l,))
    phi.clauses = out


class _Sweep:
    """Shared bookkeeping for one look-ahead sweep."""

    def __init__(self, phi: Formula, working: Sequence):
        self.phi = phi
        self.working = list(working)
        self.effect = UplaEffect()
        self.refresh()

    def refresh(self):
        self.view = ClauseView(self.phi.clauses + self.working)
        self.fixed = fixed_literals(self.phi)
        self.fixed_vars = {abs(l) for l in self.fixed}
        self.phi_vars = {abs(l) for c in self.phi.clauses for l in c}

    def probe(self, assumptions) -> ProbeOutcome:
        return probe(self.view, assumptions)

    def solution(self, outcome: ProbeOutcome) -> bool:
        if outcome.conflicted:
            return False
        a = outcome.assignment
        if any(v not in a for v in self.phi_vars):
            return False
        model = {v: a.get(v, False) for v in range(1, self.phi.num_vars + 1)}
        if not satisfies(model, self.phi.clauses):
            return False
        self.effect.verdict = SATISFIABLE
        self.effect.model = model
        return True

    def unsat(self):
        self.effect.verdict = UNSATISFIABLE

    def commit(self, units=(), binaries=()) -> bool:
        """Add clauses to phi; False means propagation hit a contradiction."""
        known = set(self.phi.clauses)
        for b in binaries:
            b = make_clause(b)
            if b not in known:
                self.phi.clauses.append(b)
                known.add(b)
                self.effect.new_binaries.append(b)
        units = [l for l in units if l not in self.fixed]
        if units:
            view = ClauseView(self.phi.clauses + self.working)
            a, conflicted = view.propagate(units)
            if conflicted:
                self.unsat()
                return False
            lits = {v if val else -v for v, val in a.items()}
            fresh = sorted(lits - self.fixed, key=lit_key)
            simplify_formula(self.phi, lits)
            self.effect.new_units.extend(fresh)
        if units or binaries:
            self.refresh()
        return True


def upla_single(phi: Formula, working: Sequence = ()) -> UplaEffect:
    """Probe every unfixed variable both ways.

    A variable failing both ways proves unsatisfiability; failing one way
    fixes the other value; otherwise the literals both probes agree on are
    fixed.
    """
    sweep = _Sweep(phi, working)
    for v in range(1, phi.num_vars + 1):
        if v in sweep.fixed_vars:
            continue
        pos = sweep.probe([v])
        neg = sweep.probe([-v])
        if sweep.solution(pos) or sweep.solution(neg):
            return sweep.effect
        if pos.conflicted and neg.conflicted:
            sweep.unsat()
            return sweep.effect
        if pos.conflicted:
            units = [-v]
        elif neg.conflicted:
            units = [v]
        else:
            units = intersect_implications([pos, neg])
        if units and not sweep.commit(units=units):
            return sweep.effect
    return sweep.effect


def upla_pair(phi: Formula, working: Sequence = (), budget: Optional[int] = None) -> UplaEffect:
    """Probe all four value combinations of variable pairs in index order.

    At most ``budget`` pairs are probed (all pairs when ``None``).  Pairs
    touching an already fixed variable are skipped without using budget.
    """
    sweep = _Sweep(phi, working)
    effect = sweep.effect
    n = phi.num_vars
    if budget is None:
        budget = n * (n - 1) // 2
    for v1 in range(1, n + 1):
        for v2 in range(v1 + 1, n + 1):
            if effect.pairs_probed >= budget:
                return effect
            if v1 in sweep.fixed_vars or v2 in sweep.fixed_vars:
                continue
            effect.pairs_probed += 1
            outcomes = [
                sweep.probe([v1 if b1 else -v1, v2 if b2 else -v2]) for b1, b2 in COMBOS
            ]
            if any(sweep.solution(o) for o in outcomes):
                return effect
            bad = [o for o in outcomes if o.conflicted]
            good = [o for o in outcomes if not o.conflicted]
            units, binaries = [], []
            if len(bad) == 4:
                effect.branches.append((v1, v2, "4"))
                sweep.unsat()
                return effect
            if len(bad) == 3:
                branch = "3"
                units = list(good[0].assumptions)
            else:
                branch = str(len(bad))
                units = intersect_implications(good)
                if len(bad) == 1:
                    binaries = [tuple(-l for l in bad[0].assumptions)]
                elif len(bad) == 2:
                    shared = set(bad[0].assumptions) & set(bad[1].assumptions)
                    if shared:
                        branch = "2-shared"
                        units.append(-shared.pop())
                    else:
                        binaries = [tuple(-l for l in o.assumptions) for o in bad]
            effect.branches.append((v1, v2, branch))
            if not sweep.commit(units=units, binaries=binaries):
                return effect
    return effect
