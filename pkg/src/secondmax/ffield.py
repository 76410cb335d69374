"""Finite fields F_{p^k} with a canonical modulus.

An element is stored as the integer ``sum(c_i * p**i)`` of its coefficient
vector (low degree first).  That integer doubles as the fixed total order on
field elements used for point numbering in the group constructions.  The
canonical modulus is the monic irreducible polynomial of degree k whose
coefficient vector has the smallest such integer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Sequence, Tuple

from . import numtheory as nt
from .errors import CapExceeded, FieldMismatch, NotADivisor, NotPrime, UsageError

FIELD_SIZE_CAP = 2**20


class DivisionByZero(UsageError, ZeroDivisionError):
    pass


# --- polynomials over F_p as coefficient lists, low degree first -----------


def _trim(a: List[int]) -> List[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> List[int]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p) if p > 2 else 1
    while len(_trim(a)) - 1 >= dm:
        shift = len(a) - 1 - dm
        c = a[-1] * inv_lead % p
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
    return a


def _poly_mulmod(a: Sequence[int], b: Sequence[int], m: Sequence[int], p: int) -> List[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_mod(out, m, p)


def _poly_powmod(a: Sequence[int], e: int, m: Sequence[int], p: int) -> List[int]:
    result: List[int] = [1]
    base = _poly_mod(a, m, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, m, p)
        base = _poly_mulmod(base, base, m, p)
        e >>= 1
    return result


def _poly_gcd(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_mod(a, b, p)
        b = _trim(b)
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial (coefficients low degree first)."""
    k = len(poly) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    if k <= 3:
        # no root in F_p suffices in degree 2 and 3
        return all(sum(c * pow(x, i, p) for i, c in enumerate(poly)) % p for x in range(p))
    x = [0, 1]
    if _trim(_poly_powmod(x, p**k, poly, p)) != x:
        return False
    for r in nt.prime_divisors(k):
        h = _poly_powmod(x, p ** (k // r), poly, p)
        h = h + [0] * (2 - len(h)) if len(h) < 2 else h
        h[1] = (h[1] - 1) % p
        if len(_poly_gcd(poly, h, p)) > 1:
            return False
    return True


def _digits(value: int, p: int, k: int) -> List[int]:
    out = []
    for _ in range(k):
        value, c = divmod(value, p)
        out.append(c)
    return out


@dataclass(frozen=True, eq=False)
class Field:
    p: int
    k: int
    modulus: Tuple[int, ...]  # monic, low degree first, length k + 1

    @property
    def order(self) -> int:
        return self.p**self.k

    def __eq__(self, other):
        return isinstance(other, Field) and (self.p, self.k, self.modulus) == (
            other.p,
            other.k,
            other.modulus,
        )

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __repr__(self):
        return f"Field(p={self.p}, k={self.k}, modulus={self.modulus})"

    # --- integer-coded arithmetic: the fast path used by group builders ---

    def coeffs(self, a: int) -> List[int]:
        return _digits(a, self.p, self.k)

    def encode(self, coeffs: Sequence[int]) -> int:
        out = 0
        for c in reversed(list(coeffs)[: self.k]):
            out = out * self.p + (c % self.p)
        return out

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        return self.encode([x + y for x, y in zip(self.coeffs(a), self.coeffs(b))])

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        return self.encode([-x for x in self.coeffs(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    @cached_property
    def _log_tables(self):
        q = self.order
        g = _find_primitive(self)
        exp = [0] * (q - 1)
        log = [0] * q
        x = 1
        gc = self.coeffs(g)
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self.encode(_poly_mulmod(self.coeffs(x), gc, self.modulus, self.p))
        return exp, log

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        exp, log = self._log_tables
        return exp[(log[a] + log[b]) % (self.order - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        exp, log = self._log_tables
        return exp[-log[a] % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if a == 0:
            return 1 if e == 0 else 0
        exp, log = self._log_tables
        return exp[log[a] * e % (self.order - 1)]

    def frobenius(self, a: int, times: int = 1) -> int:
        return self.pow(a, self.p**times)

    def mul_order(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("zero has no multiplicative order")
        _, log = self._log_tables
        n = self.order - 1
        return n // _gcd(n, log[a])

    def elements(self) -> range:
        return range(self.order)

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            self._check(value)
            return value
        if isinstance(value, int):
            if not 0 <= value < self.order:
                # integers outside the code range are read as prime-field scalars
                value = value % self.p
            return FieldElement(self, value)
        return FieldElement(self, self.encode(value))

    def _check(self, x: "FieldElement"):
        if x.field != self:
            raise FieldMismatch(f"{x.field} vs {self}")

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @property
    def gen(self) -> "FieldElement":
        """The class of x (equal to the prime-field element 0 when k = 1)."""
        return FieldElement(self, self.p % self.order if self.k > 1 else 0)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _find_primitive(F: Field) -> int:
    q = F.order
    n = q - 1
    if n == 1:
        return 1
    rs = nt.prime_divisors(n)
    for cand in range(1, q):
        c = F.coeffs(cand)
        if all(_trim(_poly_powmod(c, n // r, F.modulus, F.p)) != [1] for r in rs):
            return cand
    raise AssertionError("no primitive element found; modulus not irreducible?")


def make_field(p: int, k: int) -> Field:
    """F_{p^k} with the canonical (smallest-coded) irreducible modulus."""
    if not nt.is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if k < 1:
        raise UsageError(f"degree must be >= 1, got {k}")
    if p**k > FIELD_SIZE_CAP:
        raise CapExceeded(f"p^k = {p**k} exceeds the construction cap {FIELD_SIZE_CAP}")
    for code in range(p**k):
        poly = _digits(code, p, k) + [1]
        if (k == 1 or poly[0] != 0) and is_irreducible(poly, p):
            return Field(p, k, tuple(poly))
    raise AssertionError("unreachable: irreducible polynomials exist in every degree")


@dataclass(frozen=True, order=False)
class FieldElement:
    field: Field
    value: int

    @property
    def coeffs(self) -> Tuple[int, ...]:
        return tuple(self.field.coeffs(self.value))

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            self.field._check(other)
            return other.value
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._other(other), self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.value, self._other(other)))

    def __rtruediv__(self, other):
        return FieldElement(self.field, self.field.div(self._other(other), self.value))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == other % self.field.p and self.value < self.field.p
        return (
            isinstance(other, FieldElement)
            and self.field == other.field
            and self.value == other.value
        )

    def __hash__(self):
        return hash((self.field, self.value))

    def __lt__(self, other: "FieldElement"):
        self.field._check(other)
        return self.value < other.value

    def __bool__(self):
        return self.value != 0

    def order(self) -> int:
        return self.field.mul_order(self.value)

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
                terms.append(mono if c == 1 and i else f"{c}" + ("" if i == 0 else "*" + mono))
        return " + ".join(reversed(terms)) or "0"


def arithmetic(a: FieldElement, b, op: str) -> FieldElement:
    """Dispatch one of add, sub, mul, div, pow (``b`` an int for pow)."""
    if op == "pow":
        return a**b
    a.field._check(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if not b:
            raise DivisionByZero("division by zero")
        return a / b
    raise UsageError(f"unknown field operation {op!r}")


def primitive_element(F: Field) -> FieldElement:
    """Smallest-coded element of multiplicative order p^k - 1.

    Certified by g^((q-1)/r) != 1 for every prime r dividing q - 1.
    """
    if F.order < 3:
        raise UsageError(f"F_{F.order} has no nontrivial unit group")
    g = _find_primitive(F)
    n = F.order - 1
    for r in nt.prime_divisors(n):
        assert _trim(_poly_powmod(F.coeffs(g), n // r, F.modulus, F.p)) != [1]
    return FieldElement(F, g)


def unit_subgroup_generator(F: Field, e: int) -> FieldElement:
    """Generator of the unique subgroup of order e in the unit group."""
    n = F.order - 1
    if e < 1 or n % e:
        raise NotADivisor(f"{e} does not divide {n}")
    if e == 1:
        return F.one
    return primitive_element(F) ** (n // e)
