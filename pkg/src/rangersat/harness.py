"""Benchmark orchestration, run statistics and the brute-force oracle."""

from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .cnf import Formula
from .dimacs import DimacsError, read_dimacs
from .engine import VARIANTS, SolverParams, Verdict, run

log = logging.getLogger(__name__)

CSV_HEADER = ["instance", "variant", "seed", "verdict", "seconds", "iterations"]
BRUTE_FORCE_LIMIT = 25
_CHUNK_BITS = 20


class TooLarge(ValueError):
    pass


class EmptySet(ValueError):
    pass


def brute_force_sat(f: Formula):
    """Exhaustive satisfiability check.

    Returns ``(True, model)`` for the first model in binary counting order,
    or ``(False, None)``.
    """
    n = f.num_vars
    if n > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"{n} variables exceeds the brute-force limit of {BRUTE_FORCE_LIMIT}")
    if any(len(c) == 0 for c in f.clauses):
        return False, None
    chunk_bits = min(n, _CHUNK_BITS)
    low = np.arange(1 << chunk_bits, dtype=np.int64)
    for hi in range(1 << (n - chunk_bits)):
        idx = low + (hi << chunk_bits)
        ok = np.ones(idx.shape, dtype=bool)
        for c in f.clauses:
            sat = np.zeros(idx.shape, dtype=bool)
            for l in c:
                bit = ((idx >> (abs(l) - 1)) & 1).astype(bool)
                sat |= bit if l > 0 else ~bit
            ok &= sat
            if not ok.any():
                break
        hits = np.flatnonzero(ok)
        if hits.size:
            x = int(idx[hits[0]])
            return True, {v: bool((x >> (v - 1)) & 1) for v in range(1, n + 1)}
    return False, None


@dataclass
class RunRecord:
    instance: str
    variant: str
    seed: int
    verdict: str
    seconds: float
    iterations: int

    @property
    def solved(self) -> bool:
        return self.verdict != Verdict.UNKNOWN.value


@dataclass
class SetSummary:
    set_name: str
    variant: str
    pct_solved: float
    mean_time: Optional[float]
    median_iterations: Optional[int]


def solve_one(path, variant: str, seed: int, params: SolverParams) -> Optional[RunRecord]:
    try:
        formula, meta = read_dimacs(path, strict=False)
    except (OSError, DimacsError) as exc:
        log.error("skipping %s: %s", path, exc)
        return None
    p = params.for_variant(variant)
    p.seed = seed
    result = run(formula, p)
    return RunRecord(Path(path).name, variant, seed, result.verdict.value,
                     result.elapsed, result.iterations)


def instance_paths(instances) -> list:
    if isinstance(instances, (str, os.PathLike)):
        root = Path(instances)
        if root.is_dir():
            return sorted(p for p in root.iterdir()
                          if p.is_file() and p.suffix in (".cnf", ".dimacs"))
        return [root]
    return [Path(p) for p in instances]


def run_benchmark(instances, variants: Sequence[str], seeds: Sequence[int],
                  params: SolverParams, jobs: int = 1) -> list:
    """Run every instance x variant x seed combination.

    Records come back in that nested order whatever ``jobs`` is.  Files that
    fail to parse are logged and skipped.
    """
    for v in variants:
        if v not in VARIANTS:
            raise ValueError(f"unknown variant {v!r}")
    tasks = [(str(path), v, seed) for path in instance_paths(instances)
             for v in variants for seed in seeds]
    if jobs <= 1:
        results = [solve_one(path, v, seed, params) for path, v, seed in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(solve_one, path, v, seed, params) for path, v, seed in tasks]
            results = [f.result() for f in futures]
    return [r for r in results if r is not None]


def format_record(r: RunRecord) -> list:
    return [r.instance, r.variant, str(r.seed), r.verdict, repr(float(r.seconds)), str(r.iterations)]


def write_csv(records: Iterable[RunRecord], fh=None) -> str:
    buf = fh if fh is not None else io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(format_record(r))
    return buf.getvalue() if fh is None else ""


def read_csv(text: str) -> list:
    rows = csv.DictReader(io.StringIO(text))
    if rows.fieldnames != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {rows.fieldnames}")
    return [RunRecord(row["instance"], row["variant"], int(row["seed"]), row["verdict"],
                      float(row["seconds"]), int(row["iterations"])) for row in rows]


def aggregate_time(records: Iterable[RunRecord]) -> float:
    """Mean over instances of each instance's mean successful-run time.

    Instances with no successful run are left out of the outer mean.
    """
    per_instance = {}
    for r in records:
        if r.solved:
            per_instance.setdefault(r.instance, []).append(r.seconds)
    if not per_instance:
        raise EmptySet("no successful runs")
    means = [sum(ts) / len(ts) for _, ts in sorted(per_instance.items())]
    return sum(means) / len(means)


def aggregate_iterations(records: Iterable[RunRecord]) -> int:
    """Lower median of iteration counts over all successful runs."""
    its = sorted(r.iterations for r in records if r.solved)
    if not its:
        raise EmptySet("no successful runs")
    return its[(len(its) - 1) // 2]


def summarize(set_name: str, records: Sequence[RunRecord]) -> list:
    """One :class:`SetSummary` per variant, percentages over all runs."""
    out = []
    variants = [v for v in VARIANTS if any(r.variant == v for r in records)]
    for v in variants:
        rs = [r for r in records if r.variant == v]
        solved = sum(r.solved for r in rs)
        try:
            t, its = aggregate_time(rs), aggregate_iterations(rs)
        except EmptySet:
            t, its = None, None
        out.append(SetSummary(set_name, v, 100.0 * solved / len(rs), t, its))
    return out
