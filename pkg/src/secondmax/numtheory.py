"""Exact integer primitives: primality, factorization, orders, repunits.

Integers are plain Python ``int`` throughout; they are arbitrary precision
and immutable, which is all the "Natural" carrier needs.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

from .errors import BudgetExhausted, NotCoprime, UsageError

# Jaeschke / Sorenson-Webster: the first 12 primes are strong-pseudoprime
# witnesses for every n < 3.3e24, which covers 2**64 with room to spare.
DETERMINISTIC_LIMIT = 2**64
_DETERMINISTIC_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
DEFAULT_ROUNDS = 64
TRIAL_DIVISION_LIMIT = 10**6
DEFAULT_RHO_BUDGET = 10**8

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


@dataclass(frozen=True)
class PrimalityVerdict:
    is_prime: bool
    method: str  # "deterministic" or "probabilistic"
    rounds: int = 0

    def __bool__(self) -> bool:
        return self.is_prime


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as ascending ``(prime, exponent)`` pairs."""

    factors: Tuple[Tuple[int, int], ...]

    @property
    def value(self) -> int:
        out = 1
        for p, a in self.factors:
            out *= p**a
        return out

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def __iter__(self):
        return iter(self.factors)


def _strong_probable_prime(n: int, a: int, d: int, s: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas_probable_prime(n: int) -> bool:
    """Strong Lucas test with Selfridge's parameter choice (method A)."""
    if math.isqrt(n) ** 2 == n:
        return False
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4
    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    inv2 = (n + 1) // 2

    # binary ladder for U_d, V_d, Q^d
    U, V, Qk = 1, P, Q % n
    for bit in bin(d)[3:]:
        U = U * V % n
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = (P * U + V) * inv2 % n, (D * U + P * V) * inv2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if V == 0:
            return True
    return False


def is_prime(n: int, rounds: int = DEFAULT_ROUNDS, seed: Optional[int] = None) -> PrimalityVerdict:
    """Primality with a fixed witness set below 2**64, Miller-Rabin plus a
    strong Lucas round above it.

    The random bases are drawn from ``seed``; when ``seed`` is None they are
    derived from ``n`` so repeated calls are reproducible.
    """
    if n < 2:
        return PrimalityVerdict(False, "deterministic")
    for p in _SMALL_PRIMES:
        if n == p:
            return PrimalityVerdict(True, "deterministic")
        if n % p == 0:
            return PrimalityVerdict(False, "deterministic")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < DETERMINISTIC_LIMIT:
        ok = all(_strong_probable_prime(n, a, d, s) for a in _DETERMINISTIC_WITNESSES)
        return PrimalityVerdict(ok, "deterministic")
    rng = random.Random(n if seed is None else f"{seed}:{n}")
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        if not _strong_probable_prime(n, a, d, s):
            return PrimalityVerdict(False, "probabilistic", rounds)
    if not _strong_lucas_probable_prime(n):
        return PrimalityVerdict(False, "probabilistic", rounds)
    return PrimalityVerdict(True, "probabilistic", rounds)


def primes_up_to(n: int) -> list:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, v in enumerate(sieve) if v]


def lucas_lehmer(k: int) -> bool:
    """Whether 2**k - 1 is prime, for prime ``k``."""
    if k == 2:
        return True
    m = (1 << k) - 1
    x = 4
    for _ in range(k - 2):
        x = (x * x - 2) % m
    return x == 0


def _pollard_brent(n: int, budget: int, rng: random.Random) -> Tuple[Optional[int], int]:
    """One Brent-rho run; returns (factor or None, steps spent)."""
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
    g = r = q = 1
    steps = 0
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        steps += r
        r *= 2
        if steps > budget:
            return None, steps
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return (g if g != n else None), steps


def factorize(n: int, effort_cap: int = DEFAULT_RHO_BUDGET) -> Factorization:
    """Trial division to 10**6, then Brent's rho under a step budget.

    Raises BudgetExhausted carrying the factors found so far (and the
    unfactored cofactors) when the budget runs out.
    """
    if n < 2:
        raise UsageError(f"factorize needs n >= 2, got {n}")
    found: dict = {}
    m = n
    for p in (2, 3, 5):
        while m % p == 0:
            found[p] = found.get(p, 0) + 1
            m //= p
    # 6k +- 1 wheel up to the trial limit
    f, step = 7, 4
    limit = min(TRIAL_DIVISION_LIMIT, math.isqrt(m) if m > 1 else 0)
    while f <= limit:
        if m % f == 0:
            while m % f == 0:
                found[f] = found.get(f, 0) + 1
                m //= f
            limit = min(TRIAL_DIVISION_LIMIT, math.isqrt(m))
        f += step
        step = 6 - step
    stack = [m] if m > 1 else []
    spent = 0
    rng = random.Random(n)
    while stack:
        c = stack.pop()
        if is_prime(c):
            found[c] = found.get(c, 0) + 1
            continue
        r = math.isqrt(c)
        if r * r == c:
            stack.extend((r, r))
            continue
        g = None
        while g is None:
            remaining = effort_cap - spent
            if remaining <= 0:
                partial = Factorization(tuple(sorted(found.items())))
                raise BudgetExhausted(
                    f"rho budget of {effort_cap} steps exhausted on cofactor {c}",
                    partial=(partial, tuple(stack) + (c,)),
                )
            g, used = _pollard_brent(c, remaining, rng)
            spent += used
        stack.extend((g, c // g))
    return Factorization(tuple(sorted(found.items())))


def divisors(n: int) -> list:
    divs = [1]
    for p, a in factorize(n) if n > 1 else ():
        divs = [d * p**i for d in divs for i in range(a + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    if n == 1:
        return 1
    out = n
    for p, _ in factorize(n):
        out = out // p * (p - 1)
    return out


def multiplicative_order(p: int, e: int) -> int:
    """Least l >= 1 with p**l = 1 (mod e); the trivial modulus has order 1."""
    if e < 1:
        raise UsageError(f"modulus must be >= 1, got {e}")
    if e == 1:
        return 1
    if math.gcd(p, e) != 1:
        raise NotCoprime(f"gcd({p}, {e}) > 1")
    order = euler_phi(e)
    for r, _ in factorize(order) if order > 1 else ():
        while order % r == 0 and pow(p, order // r, e) == 1:
            order //= r
    return order


def repunit_value(q: int, r: int) -> int:
    """(q**r - 1) / (q - 1), computed exactly."""
    if q < 2 or r < 1:
        raise UsageError(f"repunit needs q >= 2 and r >= 1, got q={q}, r={r}")
    return (q**r - 1) // (q - 1)


def integer_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 2 or k == 1:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def is_prime_power(n: int) -> Optional[Tuple[int, int]]:
    """(p, k) with n = p**k and p prime, or None."""
    if n < 2:
        raise UsageError(f"is_prime_power needs n >= 2, got {n}")
    for k in range(n.bit_length(), 0, -1):
        root = integer_root(n, k)
        if root >= 2 and root**k == n and is_prime(root):
            return root, k
    return None


def prime_powers(lo: int, hi: int) -> Iterator[Tuple[int, int, int]]:
    """Ascending ``(q, p, k)`` for prime powers lo <= q <= hi."""
    for q in range(max(lo, 2), hi + 1):
        pk = is_prime_power(q)
        if pk is not None:
            yield q, pk[0], pk[1]


def prime_divisors(n: int) -> Sequence[int]:
    if n < 2:
        return ()
    return factorize(n).primes
