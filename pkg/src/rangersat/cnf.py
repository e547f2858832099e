"""Propositional CNF primitives.

Literals are nonzero signed ints in DIMACS convention (``3`` is x3, ``-3``
is its negation).  A clause is a tuple of literals, duplicate-free, sorted
by variable and then polarity.  An assignment is a ``dict`` mapping
variable index to ``bool``; absent variables are unassigned.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

Clause = tuple
Assignment = dict

SATISFIED = "satisfied"
UNSATISFIED = "unsatisfied"
UNIT = "unit"
UNRESOLVED = "unresolved"


class NoPivotError(ValueError):
    pass


def negate(lit: int) -> int:
    return -lit


def lit_key(lit: int):
    return (abs(lit), lit)


def make_clause(lits: Iterable[int]) -> Clause:
    """Build a clause from any iterable of literals, collapsing duplicates."""
    lits = set(lits)
    if 0 in lits:
        raise ValueError("0 is not a literal")
    return tuple(sorted(lits, key=lit_key))


@dataclass
class Formula:
    clauses: list = field(default_factory=list)
    num_vars: int = 0

    def __post_init__(self):
        self.clauses = [make_clause(c) for c in self.clauses]
        top = max((abs(l) for c in self.clauses for l in c), default=0)
        if top > self.num_vars:
            self.num_vars = top

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def copy(self) -> "Formula":
        f = Formula.__new__(Formula)
        f.clauses = list(self.clauses)
        f.num_vars = self.num_vars
        return f


def is_tautology(clause: Sequence[int]) -> bool:
    seen = set(clause)
    return any(-l in seen for l in clause)


def subsumes(c: Sequence[int], c2: Sequence[int]) -> bool:
    """True iff every literal of ``c`` also occurs in ``c2``."""
    return set(c) <= set(c2)


def complementary_vars(c: Sequence[int], c2: Sequence[int]) -> list:
    other = set(c2)
    return sorted(abs(l) for l in c if -l in other)


def pick_pivot(c: Sequence[int], c2: Sequence[int], rng: random.Random) -> Optional[int]:
    candidates = complementary_vars(c, c2)
    if not candidates:
        return None
    if len(candidates) == 1:
        return candidates[0]
    return candidates[rng.randrange(len(candidates))]


def resolve(c: Sequence[int], c2: Sequence[int], pivot: int) -> Optional[Clause]:
    """Resolve ``c`` and ``c2`` on variable ``pivot``.

    Returns the resolvent, or ``None`` when it is a tautology.  Raises
    :class:`NoPivotError` unless the pivot occurs with opposite signs in the
    two parents.
    """
    v = abs(pivot)
    if v in c and -v in c2:
        drop1, drop2 = v, -v
    elif -v in c and v in c2:
        drop1, drop2 = -v, v
    else:
        raise NoPivotError(f"variable {v} is not a pivot of {c} and {c2}")
    lits = set(l for l in c if l != drop1)
    lits.update(l for l in c2 if l != drop2)
    for l in lits:
        if -l in lits:
            return None
    return tuple(sorted(lits, key=lit_key))


def pure_literals(clauses: Iterable[Sequence[int]]) -> set:
    if isinstance(clauses, Formula):
        clauses = clauses.clauses
    occurring = set()
    for c in clauses:
        occurring.update(c)
    return {l for l in occurring if -l not in occurring}


def lit_value(lit: int, a: Assignment) -> Optional[bool]:
    val = a.get(abs(lit))
    if val is None:
        return None
    return val if lit > 0 else not val


def clause_status(c: Sequence[int], a: Assignment):
    """Classify a clause under a partial assignment.

    Returns ``(tag, lit)``; ``lit`` is the open literal for ``UNIT`` and
    ``None`` otherwise.
    """
    free = []
    for l in c:
        val = lit_value(l, a)
        if val is True:
            return SATISFIED, None
        if val is None:
            free.append(l)
    if not free:
        return UNSATISFIED, None
    if len(free) == 1:
        return UNIT, free[0]
    return UNRESOLVED, None


def unit_propagate(clauses: Iterable[Sequence[int]], a: Optional[Assignment] = None):
    """Extend ``a`` to its unit-propagation fixpoint over ``clauses``.

    Returns ``(assignment, conflict)``.  ``conflict`` is ``None`` when the
    fixpoint is stable, otherwise the first clause (in list order) found
    unsatisfied; the assignment is then the partial state at detection.
    The input assignment is not mutated.
    """
    clauses = list(clauses)
    a = dict(a or {})
    changed = True
    while changed:
        changed = False
        for c in clauses:
            tag, lit = clause_status(c, a)
            if tag == UNSATISFIED:
                return a, c
            if tag == UNIT:
                a[abs(lit)] = lit > 0
                changed = True
    return a, None


def satisfies(a: Assignment, clauses: Iterable[Sequence[int]]) -> bool:
    return all(any(lit_value(l, a) is True for l in c) for c in clauses)


def literal_counts(clauses: Iterable[Sequence[int]]) -> Counter:
    counts = Counter()
    for c in clauses:
        counts.update(c)
    return counts


class ClauseView:
    """Occurrence-indexed clause set for repeated propagation.

    Gives the same fixpoints as :func:`unit_propagate` but only revisits
    clauses containing a freshly falsified literal.
    """

    def __init__(self, clauses: Iterable[Sequence[int]]):
        self.clauses = list(clauses)
        self.occurs = {}
        self.units = []
        self.has_empty = False
        for i, c in enumerate(self.clauses):
            if not c:
                self.has_empty = True
            elif len(c) == 1:
                self.units.append(c[0])
            for l in c:
                self.occurs.setdefault(l, []).append(i)

    def propagate(self, assumptions: Sequence[int] = ()):
        """Assert ``assumptions`` plus all unit clauses, then propagate.

        Returns ``(assignment, conflicted)``.
        """
        a = {}
        if self.has_empty:
            return a, True
        queue = []
        for l in list(assumptions) + self.units:
            val = a.get(abs(l))
            if val is None:
                a[abs(l)] = l > 0
                queue.append(l)
            elif val != (l > 0):
                return a, True
        clauses = self.clauses
        occurs = self.occurs
        head = 0
        while head < len(queue):
            lit = queue[head]
            head += 1
            for i in occurs.get(-lit, ()):
                free = None
                nfree = 0
                for l in clauses[i]:
                    val = a.get(abs(l))
                    if val is None:
                        nfree += 1
                        if nfree > 1:
                            break
                        free = l
                    elif val == (l > 0):
                        nfree = -1
                        break
                if nfree == 0:
                    return a, True
                if nfree == 1:
                    a[abs(free)] = free > 0
                    queue.append(free)
        return a, False
