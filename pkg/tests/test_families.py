import io
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from secondmax import families as fam
from secondmax import numtheory as nt
from secondmax import starsearch as ss
from secondmax.errors import (
    FamilyConstraintViolated,
    NotADivisor,
    NotMersenne,
    NotPrimeIndex,
    RefutedClaim,
    ScaleExceeded,
    Unsupported,
)
from secondmax.permgroup import d_exact, d_lower_bound, is_maximal, perm as P


def classical_psl2_order(q):
    return q * (q * q - 1) // math.gcd(2, q - 1)


@pytest.mark.parametrize("q, order, degree", [(7, 168, 8), (4, 60, 5), (32, 32736, 33)])
def test_psl2_examples(q, order, degree):
    G = fam.psl2(q)
    assert (G.order, G.degree) == (order, degree)


@pytest.mark.parametrize("q", [4, 5, 7, 8, 9, 11, 16, 25, 27, 49, 64, 81, 125, 128, 243, 256, 512])
def test_psl2_order_formula_and_double_transitivity(q):
    G = fam.psl2(q)
    assert G.order == classical_psl2_order(q)
    assert G.is_transitive() and G.stabilizer(0).is_transitive() is False
    assert len(G.stabilizer(0).orbit(1)) == q


@pytest.mark.parametrize("q", [2, 3, 6, 1024])
def test_psl2_unsupported(q):
    with pytest.raises(Unsupported):
        fam.psl2(q)


@pytest.mark.parametrize("q, b, u, t", [(5, 20, 5, 4), (16, 240, 16, 15), (3, 6, 3, 2)])
def test_agl1_examples(q, b, u, t):
    mb = fam.agl1(q)
    assert (mb.B.order, mb.U.order, mb.T.order) == (b, u, t)


def test_agl1_of_3_is_s3():
    mb = fam.agl1(3)
    assert mb.B.order == 6 and not mb.B.is_abelian()


def test_suzuki_8():
    mb = fam.suzuki(8)
    assert (mb.ambient.order, mb.ambient.degree, mb.B.order) == (29120, 65, 448)
    assert mb.U.order == 64 and d_lower_bound(mb.U) == 3
    assert not mb.U.is_abelian()
    with pytest.raises(Unsupported):
        fam.suzuki(2)
    with pytest.raises(Unsupported):
        fam.suzuki(128)


def test_suzuki_32():
    mb = fam.suzuki(32)
    assert (mb.ambient.order, mb.ambient.degree) == (32537600, 1025)
    assert mb.B.order == 1024 * 31 and mb.U.order == 1024


@pytest.mark.parametrize(
    "builder",
    [lambda: fam.psl2_borel(9), lambda: fam.psl2_borel(16), lambda: fam.agl1(27), lambda: fam.suzuki(8)],
)
def test_marked_borel_invariants(builder):
    mb = builder()
    assert mb.B.order == mb.U.order * mb.T.order
    assert mb.T.order == (mb.q - 1) // mb.d
    for b in mb.B.gens:
        for u in mb.U.gens:
            assert mb.U.contains(P.mul(P.mul(P.inverse(b), u), b))
    # T meets U trivially: the torus generator's nontrivial powers avoid U
    t = mb.torus_gen
    assert all(not mb.U.contains(P.power(t, i)) for i in range(1, mb.T.order))
    assert mb.U.order == (mb.q**2 if mb.family == "Sz" else mb.q)


def test_borel_maximal_examples():
    M = fam.borel_maximal(fam.psl2_borel(32), 31, verify=True)
    assert M.order == 32 and M.is_abelian()
    M = fam.borel_maximal(fam.agl1(16), 5, verify=True)
    assert M.order == 48
    M = fam.borel_maximal(fam.suzuki(8), 7, verify=True)
    assert M.order == 64
    with pytest.raises(NotPrimeIndex):
        fam.borel_maximal(fam.agl1(16), 15)
    with pytest.raises(NotPrimeIndex):
        fam.borel_maximal(fam.agl1(16), 7)


def test_borel_is_maximal_in_psl2_by_primitivity():
    for q in (8, 9, 25, 64):
        mb = fam.psl2_borel(q)
        v = is_maximal(mb.B, mb.ambient, "auto")
        assert (v.status, v.method) == ("verified", "primitivity")


@pytest.mark.parametrize(
    "p, k, e, ell, lo, hi, exact",
    [(2, 5, 1, 1, 5, 6, 5), (2, 4, 3, 2, 2, 3, 3), (2, 4, 15, 4, 1, 2, 2)],
)
def test_dm_formula_agl_examples(p, k, e, ell, lo, hi, exact):
    rep = fam.dm_formula_agl(p, k, e, oracle=True)
    assert (rep.ell, rep.lower, rep.upper) == (ell, lo, hi)
    assert rep.oracle_exact == exact and rep.exact_status == "exact" and rep.in_bracket


def test_dm_formula_agl_not_a_divisor():
    with pytest.raises(NotADivisor):
        fam.dm_formula_agl(2, 4, 7)


def test_dm_formula_borel_examples():
    r = fam.dm_formula_borel("L2", 2, 5, 31)
    assert (r.e, r.ell, r.lower, r.upper, r.trichotomy_case) == (1, 1, 5, 6, "prime_case")
    r = fam.dm_formula_borel("L2", 5, 3, 31)
    assert (r.e, r.ell, r.lower, r.upper, r.trichotomy_case) == (2, 1, 3, 4, "prime_case")
    r = fam.dm_formula_borel("Sz", 2, 3, 7, oracle=True)
    assert (r.e, r.ell, r.lower, r.upper, r.oracle_exact) == (1, 1, 3, 4, 3)


def test_dm_formula_borel_ree_is_formula_only():
    r = fam.dm_formula_borel("Ree", 3, 3, 13, oracle=True)
    assert r.exact_status == "undetermined" and r.oracle_exact is None
    assert (r.e, r.ell) == (2, 1)
    with pytest.raises(FamilyConstraintViolated):
        fam.dm_formula_borel("Ree", 3, 1, 2)


@pytest.mark.parametrize(
    "args",
    [("Sz", 2, 4, 3), ("Sz", 3, 3, 13), ("Ree", 2, 3, 7), ("U3", 2, 3, 7), ("L2", 4, 1, 3)],
)
def test_dm_formula_borel_family_constraints(args):
    with pytest.raises(FamilyConstraintViolated):
        fam.dm_formula_borel(*args)


def test_dm_formula_borel_not_a_divisor():
    with pytest.raises(NotADivisor):
        fam.dm_formula_borel("L2", 2, 5, 7)
    with pytest.raises(NotPrimeIndex):
        fam.dm_formula_borel("L2", 2, 4, 15)


def test_bound_report_rejects_out_of_bracket():
    with pytest.raises(RefutedClaim):
        fam.BoundReport("AGL1", 2, 4, 3, 2, 2, 3, oracle_exact=4)


def test_bound_csv():
    buf = io.StringIO()
    fam.write_bound_csv([fam.dm_formula_borel("L2", 2, 5, 31)], buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(fam.CSV_COLUMNS)
    assert lines[1] == "L2,2,5,1,31,1,5,6,,prime_case"


@pytest.mark.parametrize(
    "p, k, s, d, case, e, ell",
    [(2, 4, 3, 1, "k_eq_ell", 5, 4), (3, 2, 2, 2, "k_eq_2ell", 2, 1), (2, 5, 31, 1, "prime_case", 1, 1)],
)
def test_arb_trichotomy_examples(p, k, s, d, case, e, ell):
    got = fam.arb_trichotomy(p, k, s, d)
    assert (got.case, got.e, got.ell) == (case, e, ell)


def test_trichotomy_grid_small():
    for p, k, s, d in fam.trichotomy_grid(512):
        c = fam.arb_trichotomy(p, k, s, d)
        if c.case == "prime_case":
            val = (p**k - 1) // (p**c.ell - 1)
            assert val == s and nt.is_prime(val)
        else:
            assert k in (c.ell, 2 * c.ell)


@pytest.mark.parametrize(
    "args, holds, slack",
    [((6, 24, 2), True, 19), ((1, 1, 1), True, 0), ((74207282, 1, 74207281), False, -1), ((74207281, 1, 74207281), True, 0)],
)
def test_schreier_check(args, holds, slack):
    assert fam.schreier_check(*args) == (holds, slack)


@given(st.integers(0, 50), st.integers(1, 50), st.integers(0, 50))
def test_schreier_check_definition(a, m, b):
    holds, slack = fam.schreier_check(a, m, b)
    assert slack == m * (b - 1) - (a - 1)
    assert holds == (a - 1 <= m * (b - 1))


@pytest.mark.parametrize("q_max", [64])
def test_agl_bracket_small(q_max):
    for p, k, e in fam.agl_grid(q_max):
        rep = fam.dm_formula_agl(p, k, e, oracle=True)
        assert rep.exact_status == "exact" and rep.in_bracket
        if e == 1:
            assert rep.ell == 1 and rep.lower == k == rep.oracle_exact


def test_l2_bracket_small():
    for p, k, s in fam.borel_grid("L2", 64):
        rep = fam.dm_formula_borel("L2", p, k, s, oracle=True)
        assert rep.exact_status == "exact" and rep.in_bracket
        if rep.e == 1:
            assert rep.lower == k == rep.oracle_exact


def test_witness_round_trip_lower_bound_equals_r():
    report = ss.scan_star(13, 64)
    checked = 0
    for row in report.rows:
        for w in row.witnesses:
            inst = ss.witness_to_group_instance(w)
            rep = fam.dm_formula_borel("L2", inst.p, inst.k, inst.s)
            assert rep.lower == w.r
            checked += 1
    assert checked >= 10


def test_mersenne_second_maximal():
    rep = fam.mersenne_second_maximal(5)
    assert [lv.order for lv in rep.levels] == [32, 992, 32736]
    assert rep.all_verified and rep.extras["d_M"] == 5
    assert [lv.maximal.method for lv in rep.links] == ["sweep", "primitivity"]
    rep = fam.mersenne_second_maximal(2)
    assert rep.levels[-1].order == 60 and rep.extras["d_M"] == 2
    with pytest.raises(NotMersenne):
        fam.mersenne_second_maximal(11)
    with pytest.raises(ScaleExceeded):
        fam.mersenne_second_maximal(13)


def test_schreier_chain_orders():
    chain, base = fam.schreier_chain(5)
    assert [G.order for G in chain[:3]] == [1536, 7680, 46080]
    assert chain[3].order == math.factorial(12)
    assert base.order == 64 and base.is_subgroup_of(chain[0])
    for lo, hi in zip(chain, chain[1:]):
        assert lo.is_subgroup_of(hi)
