"""Scan the (r, q) grid for primes of the form (q^r - 1)/(q - 1).

r runs over primes, q over prime powers, both ascending.  The first prime
value in a row is that row's canonical witness.  Output depends only on
the grid, never on scheduling.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import numtheory as nt
from .errors import BudgetExhausted, NotApplicable, UsageError

SCHEMA_VERSION = 1
CSV_COLUMNS = ("r", "q_p", "q_k", "repunit_decimal_length", "verdict", "method")
_FACTOR_LIMIT = 2**64


@dataclass(frozen=True)
class PrimePower:
    p: int
    k: int

    @property
    def value(self) -> int:
        return self.p**self.k


@dataclass(frozen=True)
class Cell:
    """One evaluated grid point."""

    r: int
    q: PrimePower
    repunit: int
    verdict: nt.PrimalityVerdict
    factor: Optional[int] = None  # a nontrivial divisor for composites below 2**64

    def to_json(self) -> dict:
        out = {
            "q": self.q.value,
            "p": self.q.p,
            "k": self.q.k,
            "repunit_decimal_length": len(str(self.repunit)),
            "verdict": "prime" if self.verdict.is_prime else "composite",
            "method": self.verdict.method,
        }
        if self.verdict.is_prime:
            out["repunit"] = str(self.repunit)
        if self.factor is not None:
            out["factor"] = str(self.factor)
        return out


@dataclass(frozen=True)
class StarWitness:
    r: int
    q: PrimePower
    repunit: int
    verdict: nt.PrimalityVerdict

    def __post_init__(self):
        if not nt.is_prime(self.r):
            raise UsageError(f"r = {self.r} is not prime")
        if not nt.is_prime(self.q.p) or self.q.k < 1:
            raise UsageError(f"{self.q} is not a prime power")
        if self.repunit != nt.repunit_value(self.q.value, self.r):
            raise UsageError("repunit does not match (q^r - 1)/(q - 1)")
        if not self.verdict.is_prime:
            raise UsageError("a witness needs a prime repunit")


@dataclass
class StarRow:
    r: int
    cells: List[Cell] = field(default_factory=list)
    complete: bool = False

    @property
    def witnesses(self) -> List[StarWitness]:
        return [StarWitness(c.r, c.q, c.repunit, c.verdict) for c in self.cells if c.verdict.is_prime]

    @property
    def smallest(self) -> Optional[StarWitness]:
        ws = self.witnesses
        return ws[0] if ws else None

    @property
    def composites_checked(self) -> int:
        return sum(1 for c in self.cells if not c.verdict.is_prime)

    def to_json(self) -> dict:
        w = self.smallest
        return {
            "schema_version": SCHEMA_VERSION,
            "r": self.r,
            "smallest_q": None if w is None else {"q": w.q.value, "p": w.q.p, "k": w.q.k},
            "witness_count": len(self.witnesses),
            "composites_checked": self.composites_checked,
            "complete": self.complete,
            "cells": [c.to_json() for c in self.cells],
        }


@dataclass
class StarReport:
    r_max: int
    q_max: int
    rows: List[StarRow]
    high_water: Optional[Tuple[int, int]] = None  # last completed (r, q)
    wall_time: float = 0.0  # informational; never serialized into byte-compared output

    @property
    def complete(self) -> bool:
        return all(row.complete for row in self.rows)

    def jsonl_lines(self) -> List[str]:
        return [json.dumps(row.to_json(), sort_keys=True) for row in self.rows]

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "r_max": self.r_max,
            "q_max": self.q_max,
            "complete": self.complete,
            "high_water": list(self.high_water) if self.high_water else None,
            "rows": [row.to_json() for row in self.rows],
        }

    def write_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.rows:
            for c in row.cells:
                w.writerow(
                    [
                        c.r,
                        c.q.p,
                        c.q.k,
                        len(str(c.repunit)),
                        "prime" if c.verdict.is_prime else "composite",
                        c.verdict.method,
                    ]
                )


def _evaluate(cell: Tuple[int, int, int]) -> Cell:
    r, p, k = cell
    q = p**k
    value = nt.repunit_value(q, r)
    verdict = nt.is_prime(value)
    factor = None
    if not verdict.is_prime and value < _FACTOR_LIMIT and value > 1:
        factor = nt.factorize(value).primes[0]
    return Cell(r, PrimePower(p, k), value, verdict, factor)


def grid(r_max: int, q_max: int) -> List[Tuple[int, List[Tuple[int, int, int]]]]:
    qs = list(nt.prime_powers(2, q_max))
    return [(r, [(r, p, k) for _, p, k in qs]) for r in nt.primes_up_to(r_max)]


def _cell_from_json(r: int, doc: dict) -> Cell:
    q = PrimePower(doc["p"], doc["k"])
    value = nt.repunit_value(q.value, r)
    is_p = doc["verdict"] == "prime"
    method = doc["method"]
    rounds = nt.DEFAULT_ROUNDS if method == "probabilistic" else 0
    factor = int(doc["factor"]) if "factor" in doc else None
    return Cell(r, q, value, nt.PrimalityVerdict(is_p, method, rounds), factor)


def _load_checkpoint(path: str, r_max: int, q_max: int) -> Dict[Tuple[int, int, int], Cell]:
    if not path or not os.path.exists(path):
        return {}
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("r_max") != r_max or doc.get("q_max") != q_max:
        raise UsageError("checkpoint belongs to a different grid")
    done = {}
    for row in doc["rows"]:
        for c in row["cells"]:
            done[(row["r"], c["p"], c["k"])] = _cell_from_json(row["r"], c)
    return done


def _save_checkpoint(path: str, report: StarReport):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(report.to_json(), fh, sort_keys=True)
    os.replace(tmp, path)


def scan_star(
    r_max: int,
    q_max: int,
    budget: Optional[float] = None,
    workers: int = 1,
    checkpoint: Optional[str] = None,
) -> StarReport:
    """Evaluate every (prime r <= r_max, prime power q <= q_max) cell.

    ``budget`` is a wall-time limit in seconds.  When it runs out a
    BudgetExhausted carries the partial report: every row is present,
    unfinished ones flagged incomplete.  A checkpoint file, when given, is
    rewritten after each row; cells already in it are not recomputed.
    """
    if r_max < 2 or q_max < 2:
        raise UsageError("need r_max >= 2 and q_max >= 2")
    if workers < 1:
        raise UsageError("workers must be >= 1")
    start = time.monotonic()
    plan = grid(r_max, q_max)
    report = StarReport(r_max, q_max, [StarRow(r) for r, _ in plan])
    resumed = _load_checkpoint(checkpoint, r_max, q_max) if checkpoint else {}

    def out_of_time() -> bool:
        return budget is not None and time.monotonic() - start >= budget

    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for row, (r, cells) in zip(report.rows, plan):
            todo = [c for c in cells if c not in resumed]
            if todo and out_of_time():
                break
            if pool is not None and todo:
                fresh = pool.map(_evaluate, todo, chunksize=max(1, len(todo) // (4 * workers)))
            else:
                fresh = map(_evaluate, todo)
            fresh = iter(fresh)
            for key in cells:
                if key in resumed:
                    result = resumed[key]
                else:
                    if out_of_time():
                        break
                    result = next(fresh)
                row.cells.append(result)
                report.high_water = (r, result.q.value)
            else:
                row.complete = True
            if not row.complete:
                break
            if checkpoint:
                _save_checkpoint(checkpoint, report)
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    report.wall_time = time.monotonic() - start
    if not report.complete:
        if checkpoint:
            _save_checkpoint(checkpoint, report)
        raise BudgetExhausted(f"wall-time budget of {budget}s exhausted at {report.high_water}", partial=report)
    return report


def reverify(report: StarReport, seed: int = 1) -> List[str]:
    """Independent recheck of every reported cell; returns a list of problems."""
    problems = []
    for row in report.rows:
        for c in row.cells:
            if c.repunit != nt.repunit_value(c.q.value, c.r):
                problems.append(f"r={c.r} q={c.q.value}: repunit mismatch")
            fresh = nt.is_prime(c.repunit, seed=seed)
            if fresh.is_prime != c.verdict.is_prime:
                problems.append(f"r={c.r} q={c.q.value}: verdict changed on recheck")
            if not c.verdict.is_prime and c.repunit < _FACTOR_LIMIT:
                f = c.factor
                if f is None or not 1 < f < c.repunit or c.repunit % f:
                    problems.append(f"r={c.r} q={c.q.value}: missing or bad factor")
    return problems


def mersenne_exponents(k_max: int) -> List[int]:
    """Primes k <= k_max with 2^k - 1 prime, by the Lucas-Lehmer test."""
    if k_max < 2:
        raise UsageError("k_max must be >= 2")
    return [k for k in nt.primes_up_to(k_max) if nt.lucas_lehmer(k)]


@dataclass(frozen=True)
class GroupInstanceSpec:
    p: int
    k: int
    ell: int
    s: int
    e: int
    family: str = "L2"

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "ell": self.ell, "s": str(self.s), "e": str(self.e), "family": self.family}


def witness_to_group_instance(w: StarWitness) -> GroupInstanceSpec:
    """The L2(p^(l r)) instance whose Borel has a maximal U.e of index s = repunit."""
    p, ell = w.q.p, w.q.k
    k = ell * w.r
    qk = p**k
    d = math.gcd(2, qk - 1)
    if (qk - 1) % (d * w.repunit):
        raise NotApplicable(f"{w.repunit} does not divide ({qk} - 1)/{d}")
    return GroupInstanceSpec(p, k, ell, w.repunit, (qk - 1) // (d * w.repunit))
