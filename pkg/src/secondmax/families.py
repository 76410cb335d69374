"""Rank-1 families, their Borel subgroups, and the generator-count formulas.

Explicit models:

* L2(q) acts on the projective line, point 0 is infinity and point 1 + c is
  the field element with code c.
* AGL1(q) acts on the field itself, point c is the element with code c.
* Sz(q), q = 2^(2m+1), acts on the Tits ovoid
  {(0,0,0,1)} u {(1, x, y, xy + x^(s+2) + y^s)} in PG(3, q) with
  s: x -> x^(2^(m+1)).  Point 0 is (0,0,0,1), point 1 + x*q + y is (x, y).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple

from . import numtheory as nt
from .errors import (
    FamilyConstraintViolated,
    NotADivisor,
    NotMersenne,
    NotPrimeIndex,
    RefutedClaim,
    ScaleExceeded,
    TrichotomyViolated,
    Unsupported,
    UsageError,
)
from .ffield import Field, make_field
from .permgroup import perm as P
from .permgroup.group import PermGroup

PSL2_MAX_Q = 2**9
AGL1_MAX_Q = 2**12
SUZUKI_Q = (8, 32)


@dataclass(eq=False)
class MarkedBorel:
    ambient: PermGroup
    B: PermGroup
    U: PermGroup
    T: PermGroup
    family: str  # "L2", "Sz" or "AGL1"
    p: int
    k: int
    d: int
    torus_gen: object = field(repr=False, default=None)

    @property
    def q(self) -> int:
        return self.p**self.k


def _split_prime_power(q: int) -> Tuple[int, int]:
    pk = nt.is_prime_power(q) if q >= 2 else None
    if pk is None:
        raise Unsupported(f"{q} is not a prime power")
    return pk


def _additive_basis(F: Field):
    return [F.p**i for i in range(F.k)]


# --- L2(q) ------------------------------------------------------------------


def _psl2_generators(F: Field):
    q = F.order
    n = q + 1
    lam = _primitive_code(F)
    lam2 = F.mul(lam, lam)
    minus_one = F.neg(1)

    def pt(c):
        return 1 + c

    def translation(a):
        return P.perm([0] + [pt(F.add(c, a)) for c in range(q)])

    torus = P.perm([0] + [pt(F.mul(lam2, c)) for c in range(q)])
    inv_img = [pt(0)] + [0 if c == 0 else pt(F.div(minus_one, c)) for c in range(q)]
    inversion = P.perm(inv_img)
    return n, translation, torus, inversion


def _primitive_code(F: Field) -> int:
    from .ffield import primitive_element

    return primitive_element(F).value


def psl2(q: int) -> PermGroup:
    """L2(q) on the q + 1 points of the projective line."""
    p, k = _split_prime_power(q)
    if q < 4 or q > PSL2_MAX_Q:
        raise Unsupported(f"L2({q}) not supported (need 4 <= q <= {PSL2_MAX_Q})")
    F = make_field(p, k)
    n, translation, torus, inversion = _psl2_generators(F)
    G = PermGroup(n, [translation(1), torus, inversion], name=f"L2({q})")
    expected = q * (q * q - 1) // math.gcd(2, q - 1)
    if G.order != expected:
        raise RefutedClaim(f"chain order {G.order} of L2({q}) differs from {expected}")
    return G


def psl2_borel(q: int, ambient: Optional[PermGroup] = None) -> MarkedBorel:
    """Stabilizer of infinity in L2(q), marked as U.T."""
    p, k = _split_prime_power(q)
    if q < 4 or q > PSL2_MAX_Q:
        raise Unsupported(f"L2({q}) not supported (need 4 <= q <= {PSL2_MAX_Q})")
    F = make_field(p, k)
    n, translation, torus, _ = _psl2_generators(F)
    G = ambient if ambient is not None else psl2(q)
    d = math.gcd(2, q - 1)
    U = PermGroup(n, [translation(a) for a in _additive_basis(F)], name=f"U(L2({q}))")
    T = PermGroup(n, [torus], name=f"T(L2({q}))")
    B = PermGroup(n, list(U.gens) + [torus], name=f"B(L2({q}))")
    mb = MarkedBorel(G, B, U, T, "L2", p, k, d, torus_gen=torus)
    _check_marked(mb, q, (q - 1) // d)
    return mb


# --- AGL1(q) ------------------------------------------------------------------


def _affine_parts(F: Field):
    q = F.order
    lam = _primitive_code(F) if q > 2 else 1
    trans = [P.perm([F.add(c, a) for c in range(q)]) for a in _additive_basis(F)]
    scale = P.perm([F.mul(lam, c) for c in range(q)])
    return trans, scale, lam


def agl1(q: int) -> MarkedBorel:
    """AGL1(q) on the field points: U = translations, T = all scalings."""
    p, k = _split_prime_power(q)
    if q < 3 or q > AGL1_MAX_Q:
        raise Unsupported(f"AGL1({q}) not supported (need 3 <= q <= {AGL1_MAX_Q})")
    F = make_field(p, k)
    trans, scale, _ = _affine_parts(F)
    U = PermGroup(q, trans, name=f"U(AGL1({q}))")
    T = PermGroup(q, [scale], name=f"T(AGL1({q}))")
    B = PermGroup(q, trans + [scale], name=f"AGL1({q})")
    mb = MarkedBorel(B, B, U, T, "AGL1", p, k, 1, torus_gen=scale)
    _check_marked(mb, q, q - 1)
    return mb


def affine_subgroup(q: int, e: int) -> PermGroup:
    """M = F_q.E inside AGL1(q), E the unit subgroup of order e."""
    p, k = _split_prime_power(q)
    if q > AGL1_MAX_Q:
        raise Unsupported(f"AGL1({q}) not supported")
    if e < 1 or (q - 1) % e:
        raise NotADivisor(f"{e} does not divide {q - 1}")
    F = make_field(p, k)
    trans, scale, _ = _affine_parts(F)
    gens = list(trans)
    if e > 1:
        gens.append(P.power(scale, (q - 1) // e))
    M = PermGroup(q, gens, name=f"{q}:{e}")
    if M.order != q * e:
        raise RefutedClaim(f"|F_{q}.{e}| came out {M.order}")
    return M


# --- Sz(q) ------------------------------------------------------------------


class _Ovoid:
    def __init__(self, q: int):
        p, k = _split_prime_power(q)
        if p != 2 or k % 2 == 0 or k < 3:
            raise Unsupported(f"Sz({q}) needs q = 2^(2m+1) >= 8")
        self.F = F = make_field(2, k)
        self.q = q
        m = (k - 1) // 2
        self.sig_exp = 2 ** (m + 1)

    def sig(self, a: int) -> int:
        return self.F.pow(a, self.sig_exp)

    def z(self, x: int, y: int) -> int:
        F = self.F
        return F.mul(x, y) ^ F.mul(self.sig(x), F.mul(x, x)) ^ self.sig(y)

    def pt(self, x: int, y: int) -> int:
        return 1 + x * self.q + y

    def translation(self, a: int, b: int):
        F, q = self.F, self.q
        sa = self.sig(a)
        img = [0] * (q * q + 1)
        for x in range(q):
            for y in range(q):
                img[self.pt(x, y)] = self.pt(x ^ a, y ^ b ^ F.mul(sa, x))
        return P.perm(img)

    def scaling(self, kappa: int):
        F, q = self.F, self.q
        ky = F.mul(self.sig(kappa), kappa)
        img = [0] * (q * q + 1)
        for x in range(q):
            for y in range(q):
                img[self.pt(x, y)] = self.pt(F.mul(kappa, x), F.mul(ky, y))
        return P.perm(img)

    def involution(self):
        """The antidiagonal map (X0:X1:X2:X3) -> (X3:X2:X1:X0)."""
        F, q = self.F, self.q
        img = [0] * (q * q + 1)
        img[0] = self.pt(0, 0)
        for x in range(q):
            for y in range(q):
                zz = self.z(x, y)
                if zz == 0:
                    if (x, y) != (0, 0):
                        raise RefutedClaim("ovoid point mapped off the ovoid")
                    img[self.pt(0, 0)] = 0
                    continue
                iz = F.inv(zz)
                nx, ny = F.mul(y, iz), F.mul(x, iz)
                if self.z(nx, ny) != iz:
                    raise RefutedClaim("antidiagonal map does not preserve the ovoid")
                img[self.pt(x, y)] = self.pt(nx, ny)
        return P.perm(img)


def suzuki(q: int) -> MarkedBorel:
    """Sz(q) on the q^2 + 1 ovoid points with its Borel B = U.T (stabilizer of point 0)."""
    if q not in SUZUKI_Q:
        raise Unsupported(f"Sz({q}) not supported; choose q in {SUZUKI_Q}")
    ov = _Ovoid(q)
    F = ov.F
    n = q * q + 1
    basis = _additive_basis(F)
    u_gens = [ov.translation(a, 0) for a in basis] + [ov.translation(0, b) for b in basis]
    lam = _primitive_code(F)
    torus = ov.scaling(lam)
    w = ov.involution()
    U = PermGroup(n, u_gens, name=f"U(Sz({q}))")
    T = PermGroup(n, [torus], name=f"T(Sz({q}))")
    B = PermGroup(n, u_gens + [torus], name=f"B(Sz({q}))")
    G = PermGroup(n, u_gens + [torus, w], name=f"Sz({q})")
    expected = q * q * (q * q + 1) * (q - 1)
    if G.order != expected:
        raise RefutedClaim(f"chain order {G.order} of Sz({q}) differs from {expected}")
    mb = MarkedBorel(G, B, U, T, "Sz", 2, F.k, 1, torus_gen=torus)
    _check_marked(mb, q * q, q - 1)
    return mb


def _check_marked(mb: MarkedBorel, u_order: int, t_order: int):
    if mb.U.order != u_order or mb.T.order != t_order:
        raise RefutedClaim(f"|U| = {mb.U.order}, |T| = {mb.T.order}; expected {u_order}, {t_order}")
    if mb.B.order != mb.U.order * mb.T.order:
        raise RefutedClaim("|B| != |U||T|")
    for u in mb.U.gens:
        for b in mb.B.gens:
            if not mb.U.contains(P.conjugate(u, b)):
                raise RefutedClaim("U is not normal in B")
    if not mb.B.is_subgroup_of(mb.ambient):
        raise RefutedClaim("B is not inside the ambient group")


def borel_maximal(mb: MarkedBorel, s: int, verify: bool = False) -> PermGroup:
    """M = <U, t^s> of index s in B, t generating the torus."""
    if not nt.is_prime(s) or mb.T.order % s:
        raise NotPrimeIndex(f"{s} is not a prime dividing |T| = {mb.T.order}")
    t_s = P.power(mb.torus_gen, s)
    gens = list(mb.U.gens)
    if not P.is_identity(t_s):
        gens.append(t_s)
    e = mb.T.order // s
    M = PermGroup(mb.B.degree, gens, name=f"{mb.family}({mb.q}) M[s={s}]")
    if M.order != mb.U.order * e:
        raise RefutedClaim(f"|M| = {M.order}, expected {mb.U.order * e}")
    if verify:
        from .permgroup.maximality import is_maximal

        verdict = is_maximal(M, mb.B, "sweep")
        if verdict.status != "verified":
            raise RefutedClaim(f"M is not maximal in B: {verdict}")
    return M


# --- generator-count formulas -------------------------------------------------------


FAMILIES = ("L2", "Sz", "Ree")
CSV_COLUMNS = ("family", "p", "k", "e", "s", "ell", "lower", "upper", "exact", "case")


@dataclass
class BoundReport:
    family: str
    p: int
    k: int
    e: int
    ell: int
    lower: int
    upper: int
    s: Optional[int] = None
    oracle_exact: Optional[int] = None
    exact_status: str = "not_requested"  # exact, undetermined, not_requested
    witness_size: Optional[int] = None
    lower_method: Optional[str] = None
    trichotomy_case: Optional[str] = None

    def __post_init__(self):
        if self.oracle_exact is not None and not self.lower <= self.oracle_exact <= self.upper:
            raise RefutedClaim(
                f"d(M) = {self.oracle_exact} outside [{self.lower}, {self.upper}] for "
                f"{self.family} p={self.p} k={self.k} e={self.e}"
            )

    @property
    def in_bracket(self) -> Optional[bool]:
        if self.oracle_exact is None:
            return None
        return self.lower <= self.oracle_exact <= self.upper

    def to_json(self) -> dict:
        return asdict(self)

    def csv_row(self) -> list:
        def cell(x):
            return "" if x is None else str(x)

        return [
            self.family,
            self.p,
            self.k,
            self.e,
            cell(self.s),
            self.ell,
            self.lower,
            self.upper,
            cell(self.oracle_exact),
            cell(self.trichotomy_case),
        ]


def _ell_and_bounds(p: int, k: int, e: int) -> Tuple[int, int, int]:
    ell = nt.multiplicative_order(p, e)
    if k % ell:
        raise RefutedClaim(f"ord_{e}({p}) = {ell} does not divide k = {k}")
    return ell, k // ell, k // ell + 1


def _attach_oracle(rep: BoundReport, build, seed: int):
    from .permgroup.generation import d_exact

    try:
        M = build()
        d, cert = d_exact(M, seed=seed)
    except (ScaleExceeded, Unsupported):
        rep.exact_status = "undetermined"
        return
    rep.witness_size = len(cert.witness)
    rep.lower_method = cert.lower_method
    rep.oracle_exact = d
    rep.exact_status = "exact"
    rep.__post_init__()


def dm_formula_agl(p: int, k: int, e: int, oracle: bool = False, seed: int = 20160907) -> BoundReport:
    """Bounds k/l <= d(F_q.E) <= k/l + 1 for q = p^k and l the order of p mod e."""
    if not nt.is_prime(p):
        raise UsageError(f"{p} is not prime")
    q = p**k
    if e < 1 or (q - 1) % e:
        raise NotADivisor(f"{e} does not divide {q - 1}")
    ell, lo, hi = _ell_and_bounds(p, k, e)
    rep = BoundReport("AGL1", p, k, e, ell, lo, hi)
    if oracle:
        _attach_oracle(rep, lambda: affine_subgroup(q, e), seed)
    return rep


def torus_divisor(family: str, p: int, k: int) -> int:
    if family == "L2":
        return math.gcd(2, p**k - 1)
    return 1


def _check_family(family: str, p: int, k: int):
    if family not in FAMILIES:
        raise FamilyConstraintViolated(f"unknown family {family!r}")
    if not nt.is_prime(p) or k < 1:
        raise FamilyConstraintViolated(f"need p prime and k >= 1, got p={p}, k={k}")
    if family == "Sz" and (p != 2 or k % 2 == 0 or k < 3):
        raise FamilyConstraintViolated("Sz needs p = 2 and k odd >= 3")
    if family == "Ree" and (p != 3 or k % 2 == 0 or k < 3):
        raise FamilyConstraintViolated("Ree needs p = 3 and k odd >= 3")


@dataclass(frozen=True)
class TrichotomyCase:
    case: str  # k_eq_ell, k_eq_2ell, prime_case
    e: int
    ell: int

    def __str__(self):
        return self.case


def arb_trichotomy(p: int, k: int, s: int, d: int) -> TrichotomyCase:
    """Which branch holds: k = l, k = 2l, or (p^k - 1)/(p^l - 1) = s is prime."""
    q = p**k
    if d < 1 or (q - 1) % d or ((q - 1) // d) % s:
        raise NotADivisor(f"{s} does not divide ({q} - 1)/{d}")
    e = (q - 1) // (d * s)
    ell = nt.multiplicative_order(p, e)
    if k == ell:
        return TrichotomyCase("k_eq_ell", e, ell)
    if k == 2 * ell:
        return TrichotomyCase("k_eq_2ell", e, ell)
    ratio = (q - 1) // (p**ell - 1) if (q - 1) % (p**ell - 1) == 0 else None
    if ratio == s and nt.is_prime(ratio):
        return TrichotomyCase("prime_case", e, ell)
    raise TrichotomyViolated(f"p={p} k={k} s={s} d={d}: e={e}, l={ell}, ratio {ratio} vs s")


def _borel_for(family: str, q: int) -> MarkedBorel:
    if family == "L2":
        return psl2_borel(q)
    if family == "Sz":
        return suzuki(q)
    raise Unsupported(f"{family} is formula-only")


def dm_formula_borel(
    family: str, p: int, k: int, s: int, oracle: bool = False, seed: int = 20160907
) -> BoundReport:
    """Bounds for M = U.e of prime index s in the Borel of L2(q), Sz(q) or Ree(q)."""
    _check_family(family, p, k)
    if not nt.is_prime(s):
        raise NotPrimeIndex(f"{s} is not prime")
    q = p**k
    d = torus_divisor(family, p, k)
    if ((q - 1) // d) % s:
        raise NotADivisor(f"{s} does not divide |T| = {(q - 1) // d}")
    e = (q - 1) // (d * s)
    ell, lo, hi = _ell_and_bounds(p, k, e)
    case = arb_trichotomy(p, k, s, d)
    rep = BoundReport(family, p, k, e, ell, lo, hi, s=s, trichotomy_case=case.case)
    if oracle:
        _attach_oracle(rep, lambda: borel_maximal(_borel_for(family, q), s), seed)
    return rep


def schreier_check(d_sub: int, index: int, d_sup: int) -> Tuple[bool, int]:
    """d(B) - 1 <= |M:B| (d(M) - 1) for B of the given index in M; returns (holds, slack)."""
    if index < 1:
        raise UsageError("index must be >= 1")
    slack = index * (d_sup - 1) - (d_sub - 1)
    return slack >= 0, slack


# --- batch grids ----------------------------------------------------------------------


def agl_grid(q_max: int):
    """Every (p, k, e) with p^k <= q_max and e | p^k - 1."""
    for q, p, k in nt.prime_powers(2, q_max):
        for e in nt.divisors(q - 1):
            yield p, k, e


def borel_grid(family: str, q_max: int):
    """Every (p, k, s) for the family with q <= q_max and s prime dividing |T|."""
    for q, p, k in nt.prime_powers(2, q_max):
        try:
            _check_family(family, p, k)
        except FamilyConstraintViolated:
            continue
        if family == "L2" and q < 4:
            continue
        t = (q - 1) // torus_divisor(family, p, k)
        for s in nt.prime_divisors(t) if t > 1 else []:
            yield p, k, s


def trichotomy_grid(q_max: int):
    """(p, k, s, d) for d in {1, (2, q-1)} and every prime s | (q-1)/d."""
    for q, p, k in nt.prime_powers(2, q_max):
        for d in sorted({1, math.gcd(2, q - 1)}):
            t = (q - 1) // d
            for s in nt.prime_divisors(t) if t > 1 else []:
                yield p, k, s, d


def write_bound_csv(reports, fh):
    import csv

    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow(r.csv_row())


# --- chains -----------------------------------------------------------------------------


def mersenne_second_maximal(k: int, seed: int = 20160907):
    """(Z2)^k = U < B < L2(2^k) for a Mersenne prime 2^k - 1, links verified."""
    from .permgroup.generation import d_exact
    from .permgroup.maximality import verify_chain

    if k < 2 or not nt.is_prime(2**k - 1):
        raise NotMersenne(f"2^{k} - 1 is not prime")
    if k > 7:
        raise ScaleExceeded(f"k = {k} is beyond the supported L2(128) scale")
    mb = psl2_borel(2**k)
    report = verify_chain([mb.U, mb.B, mb.ambient])
    d, cert = d_exact(mb.U, seed=seed)
    report.extras["k"] = k
    report.extras["d_M"] = d
    report.extras["d_M_lower_method"] = cert.lower_method
    if d != k:
        raise RefutedClaim(f"d(U) = {d}, expected {k}")
    return report


def _block_lift(pi, width: int = 2):
    """Permutation of blocks {w*i, ..., w*i + w - 1} lifted to points."""
    return P.perm([width * int(pi[i // width]) + i % width for i in range(width * len(pi))])


def _pgl2_prime(p: int):
    """Generators of PGL2(p) on the p + 1 points of the projective line (0 is infinity)."""
    F = make_field(p, 1)
    lam = _primitive_code(F)

    def pt(c):
        return 1 + c

    trans = P.perm([0] + [pt((c + 1) % p) for c in range(p)])
    scale = P.perm([0] + [pt(lam * c % p) for c in range(p)])
    inv = P.perm([pt(0)] + [0 if c == 0 else pt((-pow(c, p - 2, p)) % p) for c in range(p)])
    return [trans, scale, inv]


def _find_subgroup(G: PermGroup, order: int, orders: Tuple[int, int]):
    """First pair (a, b) in element order with |a|, |b| = orders generating a subgroup of ``order``."""
    from .permgroup.table import table_for

    T = table_for(G)
    first = [x for x in range(T.N) if T.elem_order(x) == orders[0]]
    second = [x for x in range(T.N) if T.elem_order(x) == orders[1]]
    for a in first:
        for b in second:
            if T.subgroup_order([a, b]) == order:
                return [T.element(a), T.element(b)]
    return None


def schreier_chain(p: int = 5):
    """(S2)^(p+1).S4 < S2 wr PGL2(p) < S2 wr S(p+1) < S(2p+2), bottom first, plus the base (S2)^(p+1).

    Points 2i, 2i+1 form block i; block 0 is infinity.
    """
    from .permgroup.group import PermGroup as PG, symmetric_group

    if not nt.is_prime(p) or p < 5:
        raise Unsupported("the chain needs a prime p >= 5")
    m = p + 1
    n = 2 * m
    swap = P.from_cycles(n, (0, 1))
    base = PG(n, [P.from_cycles(n, (2 * i, 2 * i + 1)) for i in range(m)], name=f"(S2)^{m}")
    sym_blocks = [P.from_cycles(m, (0, 1)), P.from_cycles(m, tuple(range(m)))]
    wr_sym = PG(n, [swap] + [_block_lift(g) for g in sym_blocks], name=f"S2 wr S{m}")
    pgl = _pgl2_prime(p)
    wr_pgl = PG(n, [swap] + [_block_lift(g) for g in pgl], name=f"S2 wr PGL2({p})")
    s4 = _find_subgroup(PermGroup(m, pgl), 24, (4, 3))
    if s4 is None:
        raise Unsupported(f"PGL2({p}) has no S4 found by the search")
    bottom = PG(n, list(base.gens) + [_block_lift(g) for g in s4], name=f"(S2)^{m}.S4")
    top = symmetric_group(n)
    expected = (2**m * 24, 2**m * p * (p * p - 1), 2**m * math.factorial(m))
    got = (bottom.order, wr_pgl.order, wr_sym.order)
    if got != expected:
        raise RefutedClaim(f"chain orders {got}, expected {expected}")
    return [bottom, wr_pgl, wr_sym, top], base


SCHREIER_TOP_CITATION = "the imprimitive subgroup S2 wr S(p+1) is maximal in S(2p+2)"
