"""Command-line entry point.

Exit status: 0 on success, 1 on usage or resource errors, 2 when a
computation refutes a mathematical claim the toolkit checks.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import secrets
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from . import families as fam
from . import modlat
from . import starsearch
from .errors import BudgetExhausted, RefutedClaim, ResourceError, SecondMaxError, UsageError
from .permgroup import generation as gen
from .permgroup import maximality as mx
from .permgroup.group import PermGroup, alternating_group, cyclic_group, elementary_abelian, symmetric_group

SCHEMA_VERSION = 1
DEFAULT_SEED = gen.DEFAULT_SEED
SEED_ENV = "SECONDMAX_SEED"
FORMATS = ("json", "jsonl", "csv", "text")


@dataclass
class RunConfig:
    command: str
    params: Dict[str, object] = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    workers: int = 1
    fmt: str = "json"
    output: Optional[str] = None  # None means standard output

    def __post_init__(self):
        if self.workers < 1:
            raise UsageError("worker count must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.fmt not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}")
        if self.seed == 0:
            self.seed = secrets.randbits(63) | 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _natural(text: str) -> int:
    text = text.strip()
    if not text.isdigit():
        raise argparse.ArgumentTypeError(f"expected a nonnegative decimal integer, got {text!r}")
    return int(text)


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env is None:
        return DEFAULT_SEED
    try:
        return _natural(env)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"{SEED_ENV}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_natural, default=None, help="master seed (0 draws one from entropy)")
    common.add_argument("--workers", type=_natural, default=1)
    common.add_argument("--format", dest="fmt", choices=FORMATS, default=None)
    common.add_argument("--output", "-o", default=None, help="output path (default: standard output)")

    ap = _Parser(prog="secondmax", description="Checks and searches around second maximal subgroups.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("star-scan", parents=[common], help="scan (q^r-1)/(q-1) for primes")
    p.add_argument("--r-max", type=_natural, required=True)
    p.add_argument("--q-max", type=_natural, required=True)
    p.add_argument("--budget", type=float, default=None, help="wall-time limit in seconds")
    p.add_argument("--checkpoint", default=None)

    p = sub.add_parser("mersenne", parents=[common], help="Mersenne prime exponents up to k-max")
    p.add_argument("--k-max", type=_natural, required=True)

    p = sub.add_parser("dm-agl", parents=[common], help="bounds on d(F_q.E) in AGL1(q)")
    p.add_argument("--p", type=_natural, required=True)
    p.add_argument("--k", type=_natural, required=True)
    p.add_argument("--e", type=_natural, required=True)
    p.add_argument("--oracle", action="store_true", help="also compute d exactly")

    p = sub.add_parser("dm-borel", parents=[common], help="bounds on d(U.e) in a rank-1 Borel")
    p.add_argument("--family", choices=fam.FAMILIES, required=True)
    p.add_argument("--p", type=_natural, required=True)
    p.add_argument("--k", type=_natural, required=True)
    p.add_argument("--s", type=_natural, required=True)
    p.add_argument("--oracle", action="store_true")

    p = sub.add_parser("trichotomy-scan", parents=[common], help="check the Borel trichotomy on a grid")
    p.add_argument("--q-max", type=_natural, default=4096)

    p = sub.add_parser("verify-mersenne-chain", parents=[common], help="(Z2)^k < B < L2(2^k)")
    p.add_argument("--k", type=_natural, required=True)

    p = sub.add_parser("verify-chain", parents=[common], help="label each link of a subgroup chain")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--file", help="JSON list of groups {degree, generators, order}, bottom first")
    src.add_argument("--schreier-p", type=_natural, help="built-in chain inside S_(2p+2)")
    p.add_argument("--assume", action="append", default=[], metavar="INDEX=CITATION")

    p = sub.add_parser("submodule-bound", parents=[common], help="maximal submodules vs |M/JM| - 1")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--trivial", nargs=2, type=_natural, metavar=("P", "DIM"))
    src.add_argument("--module", help="JSON module {p, dim, actors}")
    src.add_argument("--random", type=_natural, metavar="COUNT", help="seeded random modules")
    p.add_argument("--max-dim", type=_natural, default=4)

    p = sub.add_parser("fdp-cyclic", parents=[common], help="fully deleted module cyclic under maximal subgroups")
    p.add_argument("--n", type=_natural, required=True)
    p.add_argument("--p", type=_natural, required=True)

    p = sub.add_parser("nu-estimate", parents=[common], help="Monte-Carlo P(G,k) table and nu")
    p.add_argument("--group", required=True, help="L2:q, Sz:q, AGL1:q, S:n, A:n, Z:n, E:p:k, or a JSON file")
    p.add_argument("--trials", type=_natural, default=2000)
    p.add_argument("--k-cap", type=_natural, default=gen.NU_K_CAP)

    p = sub.add_parser("schreier-check", parents=[common], help="d(B)-1 <= |M:B| (d(M)-1)")
    p.add_argument("--d-sub", type=_natural, required=True)
    p.add_argument("--index", type=_natural, required=True)
    p.add_argument("--d-sup", type=_natural, required=True)
    return ap


_DEFAULT_FORMAT = {"star-scan": "jsonl", "trichotomy-scan": "json"}


def parse_args(argv: Optional[List[str]] = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    params = {
        k: v
        for k, v in vars(ns).items()
        if k not in ("command", "seed", "workers", "fmt", "output")
    }
    seed = ns.seed if ns.seed is not None else _default_seed()
    fmt = ns.fmt or _DEFAULT_FORMAT.get(ns.command, "json")
    return RunConfig(ns.command, params, seed, ns.workers, fmt, ns.output)


# --- group specs ----------------------------------------------------------------------


def parse_group(text: str) -> PermGroup:
    if os.path.exists(text):
        with open(text) as fh:
            return PermGroup.from_json(json.load(fh))
    parts = text.split(":")
    name, args = parts[0], [int(a) for a in parts[1:]]
    try:
        if name == "L2":
            return fam.psl2(*args)
        if name == "Sz":
            return fam.suzuki(*args).ambient
        if name == "AGL1":
            return fam.agl1(*args).B
        if name == "S":
            return symmetric_group(*args)
        if name == "A":
            return alternating_group(*args)
        if name == "Z":
            return cyclic_group(*args)
        if name == "E":
            return elementary_abelian(*args)
    except TypeError:
        pass
    raise UsageError(f"cannot parse group spec {text!r}")


# --- commands -------------------------------------------------------------------------


class _Result:
    """A command's output: a JSON document plus optional row views."""

    def __init__(self, doc, rows=None, csv_header=None, csv_rows=None, text=None, refuted=None):
        self.doc = doc
        self.rows = rows
        self.csv_header = csv_header
        self.csv_rows = csv_rows
        self.text = text
        self.refuted = refuted


def _cmd_star_scan(cfg: RunConfig) -> _Result:
    P = cfg.params
    try:
        rep = starsearch.scan_star(P["r_max"], P["q_max"], P["budget"], cfg.workers, P["checkpoint"])
        partial = None
    except BudgetExhausted as exc:
        rep, partial = exc.partial, exc
    buf = io.StringIO()
    rep.write_csv(buf)
    lines = buf.getvalue().splitlines()
    result = _Result(
        rep.to_json(),
        rows=[row.to_json() for row in rep.rows],
        csv_header=None,
        csv_rows=lines,
        text="\n".join(
            f"r={row.r} smallest_q={row.smallest.q.value if row.smallest else '-'} "
            f"witnesses={len(row.witnesses)} composites={row.composites_checked}"
            + ("" if row.complete else " (incomplete)")
            for row in rep.rows
        ),
    )
    if partial is not None:
        result.error = partial
    return result


def _cmd_mersenne(cfg: RunConfig) -> _Result:
    ks = starsearch.mersenne_exponents(cfg.params["k_max"])
    return _Result(
        {"k_max": cfg.params["k_max"], "exponents": ks},
        rows=[{"k": k} for k in ks],
        csv_header=["k"],
        csv_rows=[[k] for k in ks],
        text="\n".join(map(str, ks)),
    )


def _bound_result(rep: fam.BoundReport) -> _Result:
    return _Result(
        rep.to_json(),
        rows=[rep.to_json()],
        csv_header=list(fam.CSV_COLUMNS),
        csv_rows=[rep.csv_row()],
        text=f"{rep.family} p={rep.p} k={rep.k} e={rep.e} l={rep.ell}: "
        f"{rep.lower} <= d(M) <= {rep.upper}"
        + (f", exact {rep.oracle_exact}" if rep.oracle_exact is not None else ""),
    )


def _cmd_dm_agl(cfg):
    P = cfg.params
    return _bound_result(fam.dm_formula_agl(P["p"], P["k"], P["e"], oracle=P["oracle"], seed=cfg.seed))


def _cmd_dm_borel(cfg):
    P = cfg.params
    return _bound_result(
        fam.dm_formula_borel(P["family"], P["p"], P["k"], P["s"], oracle=P["oracle"], seed=cfg.seed)
    )


def _cmd_trichotomy_scan(cfg):
    rows = []
    counts: Dict[str, int] = {}
    for p, k, s, d in fam.trichotomy_grid(cfg.params["q_max"]):
        case = fam.arb_trichotomy(p, k, s, d)
        counts[case.case] = counts.get(case.case, 0) + 1
        rows.append({"p": p, "k": k, "s": s, "d": d, "e": case.e, "ell": case.ell, "case": case.case})
    header = ["p", "k", "s", "d", "e", "ell", "case"]
    return _Result(
        {"q_max": cfg.params["q_max"], "cells": len(rows), "violations": 0, "cases": counts, "rows": rows},
        rows=rows,
        csv_header=header,
        csv_rows=[[r[h] for h in header] for r in rows],
        text=f"{len(rows)} cells, no violations: " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())),
    )


def _chain_result(rep: mx.ChainReport) -> _Result:
    doc = rep.to_json()
    lines = []
    for lv in rep.links:
        lines.append(f"|H| = {lv.order}, index {lv.index}: {lv.status}")
    lines.append(f"depth {rep.depth_claimed} confirmed: {rep.depth_confirmed}")
    rows = [lv.to_json() for lv in rep.levels]
    return _Result(doc, rows=rows, text="\n".join(lines), refuted=rep.refuted)


def _cmd_verify_mersenne_chain(cfg):
    return _chain_result(fam.mersenne_second_maximal(cfg.params["k"], seed=cfg.seed))


def _parse_assumptions(items) -> Dict[int, str]:
    out = {}
    for item in items:
        idx, sep, cite = item.partition("=")
        if not sep or not idx.strip().isdigit():
            raise UsageError(f"--assume expects INDEX=CITATION, got {item!r}")
        out[int(idx)] = cite
    return out


def _cmd_verify_chain(cfg):
    P = cfg.params
    assumptions = _parse_assumptions(P["assume"])
    extras = {}
    if P["schreier_p"] is not None:
        chain, base = fam.schreier_chain(P["schreier_p"])
        assumptions.setdefault(len(chain) - 2, fam.SCHREIER_TOP_CITATION)
        rep = mx.verify_chain(chain, assumptions)
        d_bottom, _ = gen.d_exact(chain[0], seed=cfg.seed)
        d_base, _ = gen.d_exact(base, seed=cfg.seed)
        holds, slack = fam.schreier_check(d_base, chain[0].order // base.order, d_bottom)
        extras = {
            "d_bottom": d_bottom,
            "d_base": d_base,
            "schreier": {"holds": holds, "slack": slack},
        }
        if not holds:
            raise RefutedClaim("Schreier index inequality fails on the built-in chain")
    else:
        with open(P["file"]) as fh:
            docs = json.load(fh)
        chain = [PermGroup.from_json(d) for d in docs]
        rep = mx.verify_chain(chain, assumptions)
    rep.extras.update(extras)
    return _chain_result(rep)


def _cmd_submodule_bound(cfg):
    P = cfg.params
    mods = []
    if P["trivial"]:
        mods = [modlat.trivial_module(*P["trivial"])]
    elif P["module"]:
        with open(P["module"]) as fh:
            mods = [modlat.FpModule.from_json(json.load(fh))]
    else:
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 7]))
        for _ in range(P["random"]):
            p = int(rng.choice([2, 3]))
            dim = int(rng.integers(1, P["max_dim"] + 1))
            mods.append(modlat.random_module(rng, p, dim, int(rng.integers(1, 4))))
    reports = [modlat.check_maximal_count_bound(M) for M in mods]
    rows = [r.to_json() for r in reports]
    header = ["p", "dim", "num_maximal", "radical_dim", "quotient_size", "bound", "satisfied"]
    return _Result(
        {"modules": len(rows), "all_satisfied": all(r.satisfied for r in reports), "reports": rows},
        rows=rows,
        csv_header=header,
        csv_rows=[[r[h] for h in header] for r in rows],
        text="\n".join(
            f"p={r.p} dim={r.dim}: {r.num_maximal} maximal <= {r.bound}" for r in reports
        ),
    )


def _cmd_fdp_cyclic(cfg):
    n, p = cfg.params["n"], cfg.params["p"]
    V = modlat.fully_deleted_module(n, p)
    rows = []
    failed = []
    for name, gens in modlat.sn_maximal_catalogue(n):
        acts = [modlat.fully_deleted_matrix(n, p, g) for g in gens]
        v = modlat.is_cyclic_module(V, acts)
        rows.append({"subgroup": name, "generator": None if v is None else list(v)})
        if v is None:
            failed.append(name)
    if failed:
        raise RefutedClaim(f"fully deleted module not cyclic for {failed}")
    return _Result(
        {"n": n, "p": p, "dim": V.dim, "subgroups": rows},
        rows=rows,
        csv_header=["subgroup", "generator"],
        csv_rows=[[r["subgroup"], " ".join(map(str, r["generator"]))] for r in rows],
        text="\n".join(f"{r['subgroup']}: {r['generator']}" for r in rows),
    )


def _cmd_nu_estimate(cfg):
    P = cfg.params
    G = parse_group(P["group"])
    est = gen.estimate_nu(G, P["trials"], seed=cfg.seed, k_cap=P["k_cap"], workers=cfg.workers)
    doc = est.to_json()
    rows = [r.to_json() for r in est.rows]
    header = ["k", "trials", "successes", "estimate", "stderr"]
    return _Result(
        doc,
        rows=rows,
        csv_header=header,
        csv_rows=[[r[h] for h in header] for r in rows],
        text="\n".join(f"k={r['k']}: {r['estimate']:.4f} +- {r['stderr']:.4f}" for r in rows)
        + f"\nnu_hat = {est.nu_hat}",
    )


def _cmd_schreier_check(cfg):
    P = cfg.params
    holds, slack = fam.schreier_check(P["d_sub"], P["index"], P["d_sup"])
    doc = {"d_sub": P["d_sub"], "index": P["index"], "d_sup": P["d_sup"], "holds": holds, "slack": slack}
    return _Result(
        doc,
        rows=[doc],
        csv_header=list(doc),
        csv_rows=[list(doc.values())],
        text=f"holds={holds} slack={slack}",
    )


COMMANDS = {
    "star-scan": _cmd_star_scan,
    "mersenne": _cmd_mersenne,
    "dm-agl": _cmd_dm_agl,
    "dm-borel": _cmd_dm_borel,
    "trichotomy-scan": _cmd_trichotomy_scan,
    "verify-mersenne-chain": _cmd_verify_mersenne_chain,
    "verify-chain": _cmd_verify_chain,
    "submodule-bound": _cmd_submodule_bound,
    "fdp-cyclic": _cmd_fdp_cyclic,
    "nu-estimate": _cmd_nu_estimate,
    "schreier-check": _cmd_schreier_check,
}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def _render(cfg: RunConfig, res: _Result) -> str:
    if cfg.fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": cfg.command,
            "params": _jsonable(cfg.params),
            "seed": cfg.seed,
            "result": _jsonable(res.doc),
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if cfg.fmt == "jsonl":
        rows = res.rows if res.rows is not None else [res.doc]
        return "".join(json.dumps(_jsonable(r), sort_keys=True) + "\n" for r in rows)
    if cfg.fmt == "csv":
        if res.csv_rows is None:
            raise UsageError(f"{cfg.command} has no CSV view")
        buf = io.StringIO()
        if res.csv_header is None:
            buf.write("\n".join(res.csv_rows) + "\n")
        else:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(res.csv_header)
            w.writerows(res.csv_rows)
        return buf.getvalue()
    return (res.text if res.text is not None else json.dumps(_jsonable(res.doc), indent=2)) + "\n"


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute one command; returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    # provenance that must not enter the byte-compared output goes to stderr
    print(
        f"# secondmax {__version__} {cfg.command} seed={cfg.seed} workers={cfg.workers} "
        f"schema_version={SCHEMA_VERSION}",
        file=stderr,
    )
    try:
        res = COMMANDS[cfg.command](cfg)
        text = _render(cfg, res)
    except RefutedClaim as exc:
        print(f"refuted: {type(exc).__name__}: {exc}", file=stderr)
        return 2
    except (UsageError, ResourceError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    err = getattr(res, "error", None)
    if err is not None:
        print(f"error: {type(err).__name__}: {err}", file=stderr)
        return 1
    if res.refuted:
        print("refuted: a chain link is not maximal", file=stderr)
        return 2
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
