"""End-to-end acceptance criteria, one test each, with PASS/FAIL lines in the summary."""

import contextlib
import io
import json
import math
import time

import gmpy2
import numpy as np

from secondmax import cli
from secondmax import families as fam
from secondmax import modlat as ml
from secondmax import numtheory as nt
from secondmax import starsearch as ss
from secondmax.permgroup import (
    cyclic_group,
    d_exact,
    elementary_abelian,
    generation as gen,
    symmetric_group,
    alternating_group,
    verify_chain,
)

from conftest import ACCEPTANCE_LINES


@contextlib.contextmanager
def criterion(number, title):
    start = time.monotonic()
    try:
        yield
    except BaseException:
        line = f"FAIL  {number:>2}. {title} ({time.monotonic() - start:.1f}s)"
        ACCEPTANCE_LINES.append(line)
        print(line)
        raise
    line = f"PASS  {number:>2}. {title} ({time.monotonic() - start:.1f}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)


def run_cli(argv):
    cfg = cli.parse_args(argv)
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(cfg, out, err)
    return code, out.getvalue()


def test_01_mersenne_scan():
    with criterion(1, "Mersenne exponents up to 130"):
        start = time.monotonic()
        code, out = run_cli(["mersenne", "--k-max", "130"])
        elapsed = time.monotonic() - start
        got = json.loads(out)["result"]["exponents"]
        assert code == 0
        assert got == [2, 3, 5, 7, 13, 17, 19, 31, 61, 89, 107, 127]
        # independent strong-probable-prime check; 5 never divides 2^k - 1 for prime k
        assert got == [k for k in range(2, 131) if gmpy2.is_prime(k) and gmpy2.is_strong_prp(2**k - 1, 5)]
        assert elapsed < 5


def test_02_mersenne_chains():
    with criterion(2, "(Z2)^k < B < L2(2^k) for k in 2, 3, 5, 7"):
        start = time.monotonic()
        for k in (2, 3, 5, 7):
            code, out = run_cli(["verify-mersenne-chain", "--k", str(k)])
            doc = json.loads(out)["result"]
            assert code == 0
            assert [lv["maximal"]["status"] for lv in doc["levels"][:-1]] == ["verified", "verified"]
            assert doc["d_M"] == k
            q = 2**k
            assert [int(lv["order"]) for lv in doc["levels"]] == [q, q * (q - 1), q * (q * q - 1)]
        assert time.monotonic() - start < 120


def test_03_agl_bracket():
    with criterion(3, "k/l <= d(F_q.E) <= k/l + 1 for all q <= 256, e | q - 1"):
        start = time.monotonic()
        violations, cells = [], 0
        for p, k, e in fam.agl_grid(256):
            rep = fam.dm_formula_agl(p, k, e, oracle=True)
            cells += 1
            if rep.exact_status != "exact" or not rep.in_bracket:
                violations.append((p, k, e, rep.oracle_exact))
        assert cells == 544 and violations == []
        assert time.monotonic() - start < 600


def test_04_borel_bracket():
    with criterion(4, "d(U.e) in {k/l, k/l + 1} for L2(q), q <= 256, and Sz(8)"):
        violations, cells = [], 0
        for p, k, s in fam.borel_grid("L2", 256):
            rep = fam.dm_formula_borel("L2", p, k, s, oracle=True)
            cells += 1
            if rep.exact_status != "exact" or not rep.in_bracket:
                violations.append((p, k, s, rep.oracle_exact))
        assert cells > 100 and violations == []
        sz = fam.dm_formula_borel("Sz", 2, 3, 7, oracle=True)
        assert sz.oracle_exact in (3, 4)


def test_05_trichotomy():
    with criterion(5, "Borel trichotomy for all q <= 4096"):
        counts = {}
        for p, k, s, d in fam.trichotomy_grid(4096):
            case = fam.arb_trichotomy(p, k, s, d)
            flags = [k == case.ell, k == 2 * case.ell, case.case == "prime_case"]
            assert case.case in ("k_eq_ell", "k_eq_2ell", "prime_case")
            if case.case == "prime_case":
                ratio = (p**k - 1) // (p**case.ell - 1)
                assert (p**k - 1) % (p**case.ell - 1) == 0 and ratio == s
                assert gmpy2.is_prime(ratio)
                assert not flags[0] and not flags[1]
            counts[case.case] = counts.get(case.case, 0) + 1
        assert sum(counts.values()) > 3000


def test_06_submodule_bound():
    with criterion(6, "maximal submodules <= |M/JM| - 1"):
        start = time.monotonic()
        for d in (1, 2, 3, 4):
            rep = ml.check_maximal_count_bound(ml.trivial_module(2, d))
            assert rep.num_maximal == 2**d - 1 == rep.bound
        rng = np.random.default_rng(np.random.SeedSequence([gen.DEFAULT_SEED, 6]))
        for _ in range(200):
            p = int(rng.choice([2, 3]))
            M = ml.random_module(rng, p, int(rng.integers(1, 5)), int(rng.integers(1, 4)))
            assert ml.check_maximal_count_bound(M).satisfied
        assert time.monotonic() - start < 60


def test_07_fully_deleted_cyclic():
    with criterion(7, "fully deleted module cyclic under every maximal subgroup of S_n, n in 5, 6, 7"):
        failures = []
        for n in (5, 6, 7):
            for p in (2, 3, 5):
                V = ml.fully_deleted_module(n, p)
                assert V.dim == (n - 2 if n % p == 0 else n - 1)
                for name, gens in ml.sn_maximal_catalogue(n):
                    acts = [ml.fully_deleted_matrix(n, p, g) for g in gens]
                    if ml.is_cyclic_module(V, acts) is None:
                        failures.append((n, p, name))
        assert failures == []


def test_08_schreier_chain():
    with criterion(8, "(S2)^6.S4 < S2 wr PGL2(5) < S2 wr S6 < S12"):
        start = time.monotonic()
        chain, base = fam.schreier_chain(5)
        assert [G.order for G in chain[:3]] == [1536, 7680, 46080]
        rep = verify_chain(chain, {2: fam.SCHREIER_TOP_CITATION})
        statuses = [lv.status for lv in rep.links]
        assert statuses == ["verified", "verified", "assumed"]
        assert [lv.maximal.method for lv in rep.links[:2]] == ["sweep", "sweep"]
        assert rep.links[2].maximal.citation == fam.SCHREIER_TOP_CITATION
        d_base, _ = d_exact(base)
        d_bottom, _ = d_exact(chain[0])
        assert d_base == 6
        holds, slack = fam.schreier_check(d_base, chain[0].order // base.order, d_bottom)
        assert holds and slack == 24 * (d_bottom - 1) - 5
        assert time.monotonic() - start < 300


def test_09_random_generation():
    with criterion(9, "Monte-Carlo P(G, k) and nu estimates"):
        L28 = fam.psl2(8)
        exact = gen.exact_generation_probability(L28, 2)
        est = gen.estimate_generation_probability(L28, 2, 10**4, seed=gen.DEFAULT_SEED)
        sigma = math.sqrt(exact * (1 - exact) / est.trials)
        assert 0 < est.estimate < 1
        assert abs(est.estimate - exact) <= 3 * sigma
        battery = [
            cyclic_group(2),
            cyclic_group(6),
            elementary_abelian(2, 3),
            symmetric_group(4),
            alternating_group(5),
            fam.psl2(7),
            L28,
            fam.agl1(16).B,
            fam.suzuki(8).U,
        ]
        for G in battery:
            nu = gen.estimate_nu(G, 1500, seed=gen.DEFAULT_SEED)
            d, _ = d_exact(G)
            assert nu.nu_hat >= d
            for a, b in zip(nu.rows, nu.rows[1:]):
                assert b.estimate >= a.estimate - 3 * math.hypot(a.stderr, b.stderr)


def test_10_scan_consistency():
    with criterion(10, "star-scan deterministic across workers, witnesses and factors re-verified"):
        argv = ["star-scan", "--r-max", "13", "--q-max", "100"]
        code1, one = run_cli(argv + ["--workers", "1"])
        code8, eight = run_cli(argv + ["--workers", "8"])
        assert code1 == code8 == 0
        assert one.encode() == eight.encode()
        report = ss.scan_star(13, 100)
        assert "\n".join(report.jsonl_lines()) + "\n" == one
        assert ss.reverify(report, seed=20240101) == []
        for row in report.rows:
            for w in row.witnesses:
                assert gmpy2.is_prime(w.repunit, 40) and w.repunit == nt.repunit_value(w.q.value, w.r)
            for c in row.cells:
                if not c.verdict.is_prime and c.repunit < 2**64:
                    assert c.factor is not None and 1 < c.factor < c.repunit and c.repunit % c.factor == 0
