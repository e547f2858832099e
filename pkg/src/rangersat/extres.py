"""Pair scoring and extended resolution.

Pair weights use ``2**-n / (n * (n - 1))`` for a clause of ``n`` literals.
Scores are accumulated as exact fractions and exposed as floats, so equal
scores compare equal and orderings never depend on summation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional

from .cnf import Formula, is_tautology, lit_key, make_clause, resolve


class ClauseTooShort(ValueError):
    pass


class DegeneratePair(ValueError):
    pass


def pair_key(l1: int, l2: int) -> tuple:
    return (l1, l2) if lit_key(l1) <= lit_key(l2) else (l2, l1)


def exact_pair_weight(clause_len: int) -> Fraction:
    if clause_len < 2:
        raise ClauseTooShort(f"clause of length {clause_len} has no literal pairs")
    return Fraction(1, 2**clause_len * clause_len * (clause_len - 1))


def pair_weight(clause_len: int) -> float:
    return float(exact_pair_weight(clause_len))


@dataclass
class ScoreTable:
    exact: dict = field(default_factory=dict)
    built_at_iteration: int = 0

    def __getitem__(self, pair) -> float:
        return float(self.exact.get(pair_key(*pair), 0))

    def __len__(self):
        return len(self.exact)

    def get_exact(self, pair) -> Fraction:
        return self.exact.get(pair_key(*pair), Fraction(0))

    def ranked_pairs(self) -> list:
        """Pairs by descending score, ties in lexicographic literal order."""
        return sorted(
            self.exact,
            key=lambda p: (-self.exact[p], lit_key(p[0]), lit_key(p[1])),
        )


def compute_pair_scores(clauses: Iterable, iteration: int = 0) -> ScoreTable:
    if isinstance(clauses, Formula):
        clauses = clauses.clauses
    exact = {}
    for c in clauses:
        if len(c) < 2:
            continue
        w = exact_pair_weight(len(c))
        for l1, l2 in combinations(c, 2):
            key = pair_key(l1, l2)
            exact[key] = exact.get(key, 0) + w
    return ScoreTable(exact, iteration)


def clause_score(c, table: ScoreTable) -> float:
    return float(exact_clause_score(c, table))


def exact_clause_score(c, table: ScoreTable) -> Fraction:
    if len(c) < 2:
        raise ClauseTooShort(f"clause {c} has no literal pairs")
    return sum((table.get_exact(p) for p in combinations(c, 2)), Fraction(0))


def _check_quadruplet(pair_a, pair_b):
    vs = {abs(l) for l in pair_a} | {abs(l) for l in pair_b}
    if len(vs) != 4:
        raise DegeneratePair(f"{pair_a} and {pair_b} do not span four variables")


def quadruplet_score(pair_a, pair_b, table: ScoreTable) -> float:
    _check_quadruplet(pair_a, pair_b)
    return float(table.get_exact(pair_a) ** 2 + table.get_exact(pair_b) ** 2)


def ranked_quadruplets(table: ScoreTable, top_pairs: int = 32) -> list:
    """Disjoint pairs of the ``top_pairs`` best pairs, best quadruplet first.

    Each entry is ``(pair_a, pair_b)`` with ``pair_a`` the better pair.
    """
    ranked = [p for p in table.ranked_pairs() if abs(p[0]) != abs(p[1])][:top_pairs]
    quads = []
    for i, j in combinations(range(len(ranked)), 2):
        a, b = ranked[i], ranked[j]
        if {abs(a[0]), abs(a[1])} & {abs(b[0]), abs(b[1])}:
            continue
        score = table.exact[a] ** 2 + table.exact[b] ** 2
        quads.append((-score, i, j))
    quads.sort()
    return [(ranked[i], ranked[j]) for _, i, j in quads]


def try_improve_pair(phi: Formula, working, l1: int, l2: int, table: ScoreTable,
                     counters: dict) -> Optional[tuple]:
    """Try to derive a fresh clause containing both ``l1`` and ``l2``.

    Uses the lowest-scoring clause holding ``l1`` and the lowest-scoring
    clause holding ``l2`` plus the complement of one of the first clause's
    literals.  On success the resolvent is appended to ``phi``, the pair's
    failure counter is reset, and the resolvent returned; otherwise the
    counter is incremented and ``None`` returned.
    """
    key = pair_key(l1, l2)
    pool = list(phi.clauses) + list(working)
    resolvent = _improving_resolvent(pool, l1, l2, table)
    if resolvent is None:
        counters[key] = counters.get(key, 0) + 1
        return None
    phi.clauses.append(resolvent)
    counters[key] = 0
    return resolvent


def _lowest(candidates, table):
    best = None
    for idx, c in candidates:
        score = exact_clause_score(c, table)
        if best is None or score < best[0]:
            best = (score, idx, c)
    return best


def _improving_resolvent(pool, l1, l2, table):
    first = _lowest(((i, c) for i, c in enumerate(pool) if len(c) >= 2 and l1 in c), table)
    if first is None:
        return None
    c1 = first[2]
    pivots = {-p for p in c1 if p not in (l1, l2, -l2)}
    second = _lowest(
        ((i, c) for i, c in enumerate(pool)
         if i != first[1] and len(c) >= 2 and l2 in c and pivots.intersection(c)),
        table,
    )
    if second is None:
        return None
    c2 = second[2]
    pivot = min((p for p in pivots if p in c2), key=lit_key)
    r = resolve(c1, c2, abs(pivot))
    if r is None or is_tautology(r) or l1 not in r or l2 not in r:
        return None
    rs = set(r)
    if any(set(c) <= rs for c in pool):
        return None
    return r


def apply_extension(phi: Formula, l1: int, l2: int, counters: Optional[dict] = None) -> int:
    """Introduce ``e <-> (l1 or l2)`` over a fresh variable ``e``."""
    if abs(l1) == abs(l2):
        raise DegeneratePair(f"extension needs two variables, got {l1}, {l2}")
    e = phi.num_vars + 1
    phi.num_vars = e
    phi.clauses.extend([make_clause((-e, l1, l2)), make_clause((e, -l1)), make_clause((e, -l2))])
    if counters is not None:
        counters[pair_key(l1, l2)] = 0
    return e


@dataclass
class ErOutcome:
    resolvent: Optional[tuple] = None
    improved_pair: Optional[tuple] = None
    attempts: int = 0
    extensions: list = field(default_factory=list)

    @property
    def changed(self) -> bool:
        return self.resolvent is not None or bool(self.extensions)


def ext_res_phase(phi: Formula, working, counters: dict, threshold: int = 20,
                  top_pairs: int = 32, iteration: int = 0) -> ErOutcome:
    """One extended-resolution phase.

    Walks quadruplets best-first, and the pairs of each best-first, until a
    pair's score is improved.  A pair is attempted at most once per phase.
    Pairs whose failure counter reached ``threshold`` are then extended.
    """
    out = ErOutcome()
    table = compute_pair_scores(list(phi.clauses) + list(working), iteration)
    tried = set()
    for quad in ranked_quadruplets(table, top_pairs):
        for pair in quad:
            if pair in tried:
                continue
            tried.add(pair)
            out.attempts += 1
            r = try_improve_pair(phi, working, pair[0], pair[1], table, counters)
            if r is not None:
                out.resolvent, out.improved_pair = r, pair
                break
        if out.resolvent is not None:
            break
    for pair in sorted(counters, key=lambda p: (lit_key(p[0]), lit_key(p[1]))):
        if counters[pair] >= threshold:
            e = apply_extension(phi, pair[0], pair[1], counters)
            out.extensions.append((pair, e))
    return out
