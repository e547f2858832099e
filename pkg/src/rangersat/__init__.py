"""Local-search refutation of propositional CNF by randomized resolution."""

from .cnf import Formula, make_clause, resolve, unit_propagate
from .dimacs import generate_uniform_3sat, parse_dimacs, read_dimacs, write_dimacs
from .engine import DecidedBy, RunResult, SolverParams, Verdict, run

__all__ = [
    "DecidedBy", "Formula", "RunResult", "SolverParams", "Verdict", "generate_uniform_3sat",
    "make_clause", "parse_dimacs", "read_dimacs", "resolve", "run", "unit_propagate",
    "write_dimacs",
]
__version__ = "0.1.0"
