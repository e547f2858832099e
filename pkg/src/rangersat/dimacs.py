"""Reading and writing DIMACS CNF, plus a uniform random 3-SAT generator."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Union

from .cnf import Formula, make_clause

log = logging.getLogger(__name__)


class DimacsError(ValueError):
    pass


class MalformedHeader(DimacsError):
    pass


class LiteralOutOfRange(DimacsError):
    pass


class UnterminatedClause(DimacsError):
    pass


class InvalidSize(ValueError):
    pass


@dataclass
class InstanceMeta:
    name: str
    declared_vars: int
    declared_clauses: int


def parse_dimacs(text: Union[str, bytes], name: str = "", strict: bool = True):
    """Parse DIMACS CNF text into ``(Formula, InstanceMeta)``.

    In lenient mode header mismatches are logged instead of raised, and the
    variable count grows to cover every literal seen.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    header = None
    clauses = []
    current = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise MalformedHeader(f"line {lineno}: duplicate header")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise MalformedHeader(f"line {lineno}: {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise MalformedHeader(f"line {lineno}: {line!r}") from None
            if header[0] < 0 or header[1] < 0:
                raise MalformedHeader(f"line {lineno}: negative counts")
            continue
        if line.startswith("%"):
            # SATLIB uniform instances end with "%\n0\n"
            break
        if header is None:
            raise MalformedHeader(f"line {lineno}: clause before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad token {tok!r}") from None
            if lit == 0:
                clauses.append(make_clause(current))
                current = []
                continue
            if abs(lit) > header[0]:
                msg = f"line {lineno}: literal {lit} exceeds {header[0]} variables"
                if strict:
                    raise LiteralOutOfRange(msg)
                log.warning(msg)
            current.append(lit)
    if header is None:
        raise MalformedHeader("missing 'p cnf' header")
    if current:
        raise UnterminatedClause(f"clause {current} lacks a terminating 0")
    nvars, nclauses = header
    if len(clauses) != nclauses:
        msg = f"header declares {nclauses} clauses, found {len(clauses)}"
        if strict:
            raise MalformedHeader(msg)
        log.warning(msg)
    formula = Formula(clauses, nvars)
    return formula, InstanceMeta(name, nvars, nclauses)


def read_dimacs(path, strict: bool = True):
    with open(path, "rb") as fh:
        data = fh.read()
    return parse_dimacs(data, name=str(path), strict=strict)


def write_dimacs(f: Formula) -> bytes:
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    for c in f.clauses:
        lines.append(" ".join(str(l) for l in c) + " 0")
    return ("\n".join(lines) + "\n").encode("ascii")


def generate_uniform_3sat(n: int, m: int, rng: random.Random) -> Formula:
    """Uniform random 3-SAT: each literal drawn from the 2n with equal odds.

    Clauses with a repeated literal or a complementary pair are discarded
    and redrawn, so every emitted clause is uniform over valid 3-clauses.
    """
    if n < 3:
        raise InvalidSize(f"need at least 3 variables, got {n}")
    if m < 0:
        raise InvalidSize(f"negative clause count {m}")
    clauses = []
    while len(clauses) < m:
        lits = [rng.randint(1, n) * rng.choice((1, -1)) for _ in range(3)]
        if len({abs(l) for l in lits}) < 3:
            continue
        clauses.append(make_clause(lits))
    return Formula(clauses, n)
