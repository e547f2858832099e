"""Randomized general resolution over a bounded working multiset.

The solver keeps the base formula ``phi`` and a working multiset of exactly
``k`` clauses.  Each step either imports a clause of ``phi`` into the
working set or resolves two working clauses, then (with probability
``p_t``) runs the satisfiability-preserving transformations: subsumption,
pure literals, unit propagation look-ahead and extended resolution.
"""

from __future__ import annotations

import enum
import logging
import random
import time
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import Optional

from . import extres, upla
from .cnf import Formula, pick_pivot, resolve

log = logging.getLogger(__name__)

VARIANTS = ("original", "upla", "upla-er")


class Verdict(str, enum.Enum):
    UNSATISFIABLE = "UNSATISFIABLE"
    SATISFIABLE = "SATISFIABLE"
    UNKNOWN = "UNKNOWN"


class DecidedBy(str, enum.Enum):
    EMPTY_CLAUSE = "EmptyClause"
    UPLA_CONFLICT = "UplaConflictExhaustion"
    UPLA_SOLUTION = "UplaSolution"
    TIMEOUT = "Timeout"
    STEP_LIMIT = "StepLimit"


@dataclass
class SolverParams:
    p_i: float = 0.2
    p_t: float = 0.9
    p_g: float = 0.9
    p_er: float = 0.05
    w: Optional[int] = None  # None -> number of variables
    k: Optional[int] = None  # None -> number of variables + 1
    max_tries: int = 1
    max_steps: int = 100_000_000
    seed: int = 1
    timeout: float = 1000.0
    upla: bool = False
    er: bool = False
    pair_budget: Optional[int] = None  # None -> all pairs
    er_threshold: int = 20
    er_top_pairs: int = 32

    def __post_init__(self):
        for name in ("p_i", "p_t", "p_g", "p_er"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name}={val} is not a probability")
        if self.w is not None and self.w < 1:
            raise ValueError("w must be at least 1")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be at least 1")

    def for_variant(self, variant: str) -> "SolverParams":
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        return replace(self, upla=variant != "original", er=variant == "upla-er")

    @property
    def variant(self) -> str:
        if not self.upla:
            return "original"
        return "upla-er" if self.er else "upla"

    def resolved(self, n: int) -> "SolverParams":
        """Fill in the width and working-set size from ``n`` variables."""
        return replace(
            self,
            w=self.w if self.w is not None else max(n, 1),
            k=self.k if self.k is not None else n + 1,
        )


@dataclass
class RunStats:
    imports: int = 0
    resolutions: int = 0
    resolvents_kept: int = 0
    phases: int = 0
    subsumed: int = 0
    pure_replaced: int = 0
    upla_units: int = 0
    upla_binaries: int = 0
    er_phases: int = 0
    er_resolvents: int = 0
    extensions: int = 0


@dataclass
class RunResult:
    verdict: Verdict
    iterations: int
    elapsed: float
    decided_by: DecidedBy
    tries: int = 1
    model: Optional[dict] = None
    stats: RunStats = field(default_factory=RunStats)


def check_convergence_params(p: SolverParams, n: int) -> list:
    """Warnings for each violated refutation-completeness condition."""
    p = p.resolved(n)
    warnings = []
    if p.p_i <= 0:
        warnings.append("p_i must exceed 0 for convergence")
    for name in ("p_i", "p_t", "p_g"):
        if getattr(p, name) >= 1:
            warnings.append(f"{name} must be below 1 for convergence")
    if p.w < n:
        warnings.append(f"w={p.w} is below n={n}; convergence needs w = n")
    if p.k < n + 1:
        warnings.append(f"k={p.k} is below n+1={n + 1}; convergence needs k >= n+1")
    return warnings


def init_working(clauses, k: int, rng: random.Random) -> list:
    if isinstance(clauses, Formula):
        clauses = clauses.clauses
    if not clauses:
        raise ValueError("cannot draw a working set from an empty formula")
    if k <= len(clauses):
        return rng.sample(clauses, k)
    return [clauses[rng.randrange(len(clauses))] for _ in range(k)]


class SolverState:
    """Mutable search state for one run.

    Slot updates go through :meth:`set_slot` so the literal counts and
    occurrence lists used by the transformation phase stay current.
    """

    def __init__(self, formula: Formula, params: SolverParams):
        self.phi = formula.copy()
        self.params = params.resolved(formula.num_vars)
        self.rng = random.Random(params.seed)
        self.working = []
        self.iteration = 0
        self.tries = 0
        self.fail_counters = {}
        self.pair_probe_done = False
        self.stats = RunStats()
        self.verdict = None
        self.decided_by = None
        self.model = None
        self._empty_slots = 0
        self._work_count = Counter()
        self._work_occ = defaultdict(set)
        self._dirty_sub = set()
        self._dirty_pure = set()
        self._pure_rescan = True
        self.phi_changed()

    # --- bookkeeping -------------------------------------------------

    def phi_changed(self):
        self._phi_count = Counter()
        self._phi_occ = defaultdict(list)
        self._phi_has_empty = False
        for i, c in enumerate(self.phi.clauses):
            if not c:
                self._phi_has_empty = True
            self._phi_count.update(c)
            for l in c:
                self._phi_occ[l].append(i)
        self._dirty_sub = set(range(len(self.working)))
        self._pure_rescan = True

    def load_working(self, clauses):
        self.working = [None] * len(clauses)
        self._empty_slots = 0
        self._work_count = Counter()
        self._work_occ = defaultdict(set)
        for i, c in enumerate(clauses):
            self.set_slot(i, c)
        self._pure_rescan = True

    def set_slot(self, i: int, clause):
        old = self.working[i]
        if old is not None:
            if not old:
                self._empty_slots -= 1
            for l in old:
                self._work_count[l] -= 1
                self._work_occ[l].discard(i)
                if self._work_count[l] == 0 and self._phi_count[l] == 0:
                    self._pure_rescan = True
        self.working[i] = clause
        if not clause:
            self._empty_slots += 1
        for l in clause:
            self._work_count[l] += 1
            self._work_occ[l].add(i)
        self._dirty_sub.add(i)
        self._dirty_pure.add(i)

    def random_phi_clause(self):
        return self.phi.clauses[self.rng.randrange(len(self.phi.clauses))]

    def has_empty(self) -> bool:
        return self._empty_slots > 0

    def literal_total(self) -> int:
        return sum(len(c) for c in self.working)

    # --- transformation helpers --------------------------------------

    def _strictly_subsumed_by_phi(self, c) -> bool:
        if self._phi_has_empty:
            return len(c) > 0
        hits = Counter()
        for l in c:
            for j in self._phi_occ.get(l, ()):
                hits[j] += 1
        clauses = self.phi.clauses
        return any(n == len(clauses[j]) < len(c) for j, n in hits.items())

    def _strictly_subsumed_by_working(self, slot, c) -> bool:
        hits = Counter()
        for l in c:
            for t in self._work_occ.get(l, ()):
                if t != slot:
                    hits[t] += 1
        work = self.working
        return any(n == len(work[t]) < len(c) for t, n in hits.items())

    def _strict_supersets_in_working(self, slot, c) -> set:
        if not c:
            return {t for t in range(len(self.working)) if t != slot and self.working[t]}
        occ = sorted((self._work_occ.get(l, set()) for l in c), key=len)
        common = set(occ[0])
        for s in occ[1:]:
            common &= s
        common.discard(slot)
        return {t for t in common if len(self.working[t]) > len(c)}

    def subsumption_victims(self) -> list:
        """Working slots strictly subsumed by a phi or another working clause."""
        victims = set()
        for s in self._dirty_sub:
            c = self.working[s]
            if self._strictly_subsumed_by_phi(c) or self._strictly_subsumed_by_working(s, c):
                victims.add(s)
            victims |= self._strict_supersets_in_working(s, c)
        self._dirty_sub = set()
        return sorted(victims)

    def pure_victims(self) -> list:
        """Working slots holding a literal whose negation occurs nowhere."""
        slots = range(len(self.working)) if self._pure_rescan else sorted(self._dirty_pure)
        self._pure_rescan = False
        self._dirty_pure = set()
        pc, wc = self._phi_count, self._work_count
        return [s for s in slots
                if any(pc[-l] + wc[-l] == 0 for l in self.working[s])]

    def simplify_working(self):
        fixed = upla.fixed_literals(self.phi)
        if not fixed:
            return
        for i, c in enumerate(self.working):
            if any(-l in fixed for l in c) and not any(l in fixed for l in c):
                self.set_slot(i, tuple(l for l in c if -l not in fixed))

    def inject(self, clauses):
        """Place derived clauses into random slots, sparing the empty clause."""
        k = len(self.working)
        for c in clauses:
            if len(c) > self.params.w:
                continue
            slots = [i for i in range(k) if self.working[i]]
            if not slots:
                return
            self.set_slot(slots[self.rng.randrange(len(slots))], c)


def _resolve_move(s: SolverState):
    p = s.params
    rng = s.rng
    k = len(s.working)
    if k < 2:
        return
    i = rng.randrange(k)
    j = rng.randrange(k - 1)
    if j >= i:
        j += 1
    c, c2 = s.working[i], s.working[j]
    pivot = pick_pivot(c, c2, rng)
    if pivot is None:
        return
    s.stats.resolutions += 1
    r = resolve(c, c2, pivot)
    if r is None or len(r) > p.w:
        return
    if rng.random() < p.p_g:
        if len(r) > max(len(c), len(c2)):
            return
        if len(c) > len(c2):
            slot = i
        elif len(c2) > len(c):
            slot = j
        else:
            slot = i if rng.random() < 0.5 else j
    else:
        slot = rng.randrange(k)
    s.set_slot(slot, r)
    s.stats.resolvents_kept += 1


def _apply_lookahead(s: SolverState, effect: upla.UplaEffect):
    if effect.verdict == upla.UNSATISFIABLE:
        s.verdict, s.decided_by = Verdict.UNSATISFIABLE, DecidedBy.UPLA_CONFLICT
        return
    if effect.verdict == upla.SATISFIABLE:
        s.verdict, s.decided_by = Verdict.SATISFIABLE, DecidedBy.UPLA_SOLUTION
        s.model = effect.model
        return
    if effect.changed:
        s.stats.upla_units += len(effect.new_units)
        s.stats.upla_binaries += len(effect.new_binaries)
        s.phi_changed()
        s.simplify_working()
        s.inject([(l,) for l in effect.new_units] + effect.new_binaries)


def apply_transformations(s: SolverState):
    """Run one satisfiability-preserving transformation phase."""
    p = s.params
    s.stats.phases += 1
    for slot in s.subsumption_victims():
        s.set_slot(slot, s.random_phi_clause())
        s.stats.subsumed += 1
    for slot in s.pure_victims():
        s.set_slot(slot, s.random_phi_clause())
        s.stats.pure_replaced += 1
    if p.upla:
        _apply_lookahead(s, upla.upla_single(s.phi, s.working))
        if s.verdict is not None or s.has_empty():
            return
        if not s.pair_probe_done:
            s.pair_probe_done = True
            _apply_lookahead(s, upla.upla_pair(s.phi, s.working, p.pair_budget))
            if s.verdict is not None or s.has_empty():
                return
    if p.er and s.rng.random() < p.p_er:
        s.stats.er_phases += 1
        out = extres.ext_res_phase(
            s.phi, s.working, s.fail_counters, p.er_threshold, p.er_top_pairs, s.iteration
        )
        if out.resolvent is not None:
            s.stats.er_resolvents += 1
        if out.extensions:
            s.stats.extensions += len(out.extensions)
            for warning in check_convergence_params(s.params, s.phi.num_vars):
                log.debug("after extension: %s", warning)
        if out.changed:
            s.phi_changed()


def step(s: SolverState):
    """One iteration: import or resolve, then maybe transform."""
    p = s.params
    rng = s.rng
    if rng.random() < p.p_i:
        s.set_slot(rng.randrange(len(s.working)), s.random_phi_clause())
        s.stats.imports += 1
    else:
        _resolve_move(s)
    if not s.has_empty() and rng.random() < p.p_t:
        apply_transformations(s)
    s.iteration += 1


def restart(s: SolverState):
    s.tries += 1
    s.load_working(init_working(s.phi.clauses, s.params.k, s.rng))


def run(f: Formula, params: SolverParams, on_step=None) -> RunResult:
    """Search for a refutation of ``f``.

    ``on_step`` is called with the state after every step; tests use it to
    check invariants along the way.
    """
    if not f.clauses:
        raise ValueError("formula has no clauses")
    start = time.perf_counter()
    s = SolverState(f, params)
    for warning in check_convergence_params(s.params, f.num_vars):
        log.debug(warning)
    p = s.params

    def finish(verdict, decided_by):
        return RunResult(verdict, s.iteration, time.perf_counter() - start, decided_by,
                         s.tries, s.model, s.stats)

    for _ in range(p.max_tries):
        restart(s)
        for _ in range(p.max_steps):
            if s.has_empty():
                return finish(Verdict.UNSATISFIABLE, DecidedBy.EMPTY_CLAUSE)
            if time.perf_counter() - start > p.timeout:
                return finish(Verdict.UNKNOWN, DecidedBy.TIMEOUT)
            step(s)
            if on_step is not None:
                on_step(s)
            if s.verdict is not None:
                return finish(s.verdict, s.decided_by)
        if s.has_empty():
            return finish(Verdict.UNSATISFIABLE, DecidedBy.EMPTY_CLAUSE)
    return finish(Verdict.UNKNOWN, DecidedBy.STEP_LIMIT)
