import math
import random

import gmpy2
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from secondmax import numtheory as nt
from secondmax.errors import BudgetExhausted, NotCoprime


def trial_division_is_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


@pytest.mark.parametrize(
    "n, expected",
    [(0, False), (1, False), (2, True), (2147483647, True), (2047, False), (561, False), (97, True)],
)
def test_is_prime_examples(n, expected):
    v = nt.is_prime(n)
    assert v.is_prime is expected
    assert v.method == "deterministic"


def test_mersenne_31_matches_trial_division_oracle():
    n = 2**31 - 1
    assert all(n % d for d in range(2, 46342))
    assert nt.is_prime(n)


def test_is_prime_agrees_with_sieve_below_2_20():
    limit = 2**20
    sieve = set(nt.primes_up_to(limit - 1))
    # independent sieve, written differently from primes_up_to
    mark = [True] * limit
    mark[0] = mark[1] = False
    p = 2
    while p * p < limit:
        if mark[p]:
            for m in range(p * p, limit, p):
                mark[m] = False
        p += 1
    assert sieve == {i for i, v in enumerate(mark) if v}
    assert all(nt.is_prime(n).is_prime == mark[n] for n in range(limit))


@pytest.mark.parametrize(
    "n",
    [
        3215031751,  # strong pseudoprime to bases 2, 3, 5, 7
        3825123056546413051,  # strong pseudoprime to the first nine prime bases
        318665857834031151167461,  # strong pseudoprime to the first twelve prime bases
        2**64 - 59,  # largest prime below 2**64
        2**64 + 13,
        2**89 - 1,
        2**127 - 1,
        (2**127 - 1) * (2**61 - 1),
        10**30 + 57,
    ],
)
def test_is_prime_against_gmpy2(n):
    assert nt.is_prime(n).is_prime == bool(gmpy2.is_prime(n, 50))


def test_method_switches_at_2_64():
    assert nt.is_prime(2**64 - 59).method == "deterministic"
    big = nt.is_prime(2**89 - 1)
    assert big.method == "probabilistic" and big.rounds == nt.DEFAULT_ROUNDS


@given(st.integers(min_value=2**64, max_value=2**200))
def test_large_primality_matches_gmpy2(n):
    assert nt.is_prime(n).is_prime == bool(gmpy2.is_prime(n, 50))


def test_seeded_rounds_are_reproducible():
    n = 2**127 - 1
    assert nt.is_prime(n, seed=5) == nt.is_prime(n, seed=5)


@pytest.mark.parametrize(
    "n, factors",
    [(2, [(2, 1)]), (2047, [(23, 1), (89, 1)]), (992, [(2, 5), (31, 1)]), (2**10, [(2, 10)])],
)
def test_factorize_examples(n, factors):
    assert list(nt.factorize(n)) == factors


@given(st.integers(min_value=2, max_value=10**18))
def test_factorize_roundtrip(n):
    f = nt.factorize(n)
    assert f.value == n
    assert all(nt.is_prime(p) for p in f.primes)
    assert list(f.primes) == sorted(f.primes)
    assert dict(f.factors) == sympy.factorint(n)


def test_factorize_semiprime_past_trial_division():
    p, q = 1000000007, 998244353
    assert list(nt.factorize(p * q)) == [(q, 1), (p, 1)]


def test_factorize_budget_exhausted_reports_partial():
    n = (10**12 + 39) * (10**12 + 61)
    assert sympy.isprime(10**12 + 39) and sympy.isprime(10**12 + 61)
    with pytest.raises(BudgetExhausted) as info:
        nt.factorize(8 * n, effort_cap=10)
    found, rest = info.value.partial
    assert found.value * math.prod(rest) == 8 * n
    assert (2, 3) in found.factors


def test_factorize_rejects_small():
    with pytest.raises(ValueError):
        nt.factorize(1)


@pytest.mark.parametrize("p, e, ell", [(2, 7, 3), (2, 3, 2), (5, 1, 1), (3, 1, 1), (10, 9999991, None)])
def test_multiplicative_order_examples(p, e, ell):
    if ell is None:
        ell = sympy.n_order(p, e)
    assert nt.multiplicative_order(p, e) == ell


def test_multiplicative_order_not_coprime():
    with pytest.raises(NotCoprime):
        nt.multiplicative_order(2, 6)


@given(st.integers(2, 500), st.integers(2, 5000))
def test_multiplicative_order_properties(p, e):
    if math.gcd(p, e) != 1:
        return
    ell = nt.multiplicative_order(p, e)
    assert pow(p, ell, e) == 1 % e
    assert all(pow(p, m, e) != 1 for m in nt.divisors(ell) if m < ell)
    assert nt.euler_phi(e) % ell == 0
    assert ell == sympy.n_order(p, e)


@given(st.integers(2, 60), st.integers(1, 12), st.data())
def test_order_divides_k_when_e_divides_field_units(p, k, data):
    if not nt.is_prime(p):
        return
    e = data.draw(st.sampled_from(nt.divisors(p**k - 1)))
    assert k % nt.multiplicative_order(p, e) == 0


@pytest.mark.parametrize("q, r, v", [(7, 1, 1), (2, 5, 31), (3, 3, 13)])
def test_repunit_examples(q, r, v):
    assert nt.repunit_value(q, r) == v


@given(st.integers(2, 10**6), st.integers(1, 60))
def test_repunit_identity(q, r):
    assert nt.repunit_value(q, r) * (q - 1) + 1 == q**r


@pytest.mark.parametrize("n, pk", [(32, (2, 5)), (12, None), (125, (5, 3)), (2, (2, 1)), (2**61 - 1, (2**61 - 1, 1))])
def test_is_prime_power_examples(n, pk):
    assert nt.is_prime_power(n) == pk


@given(st.integers(2, 10**7))
def test_is_prime_power_against_sympy(n):
    got = nt.is_prime_power(n)
    f = sympy.factorint(n)
    expected = next(iter(f.items())) if len(f) == 1 else None
    assert got == expected


def test_lucas_lehmer_matches_primality():
    for k in nt.primes_up_to(200):
        assert nt.lucas_lehmer(k) == bool(gmpy2.is_prime(2**k - 1, 50))


def test_prime_powers_lists_each_once():
    got = [q for q, _, _ in nt.prime_powers(2, 64)]
    assert got == [n for n in range(2, 65) if len(sympy.factorint(n)) == 1]


def test_integer_root_exact():
    rng = random.Random(3)
    for _ in range(200):
        x, k = rng.randrange(1, 10**12), rng.randrange(2, 9)
        assert nt.integer_root(x**k, k) == x
        assert nt.integer_root(x**k - 1, k) == x - 1
