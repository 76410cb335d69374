"""Submodule lattices of small F_p-modules given by acting matrices.

Vectors are columns: an actor A sends v to A v.  Everything here is brute
force over at most 2^16 vectors, which is the point: the enumeration is the
oracle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import numtheory as nt
from .errors import BoundViolated, CapExceeded, NotPrime, UsageError
from .permgroup import perm as P

VECTOR_CAP = 2**16


def _rref(rows, p: int) -> Tuple[Tuple[int, ...], ...]:
    """Canonical reduced row echelon basis of the row span."""
    M = [list(int(x) % p for x in r) for r in rows]
    if not M:
        return ()
    ncols = len(M[0])
    out = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], p - 2, p)
        M[r] = [x * inv % p for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
        r += 1
        if r == len(M):
            break
    return tuple(tuple(row) for row in M[:r] if any(row))


@dataclass(frozen=True)
class Submodule:
    p: int
    dim_ambient: int
    basis: Tuple[Tuple[int, ...], ...]  # reduced row echelon form

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __lt__(self, other: "Submodule"):
        return (self.dim, self.basis) < (other.dim, other.basis)

    def contains_vector(self, v) -> bool:
        return _rref(list(self.basis) + [tuple(v)], self.p) == self.basis

    def __le__(self, other: "Submodule"):
        return _rref(list(other.basis) + list(self.basis), self.p) == other.basis

    def join(self, other: "Submodule") -> "Submodule":
        return Submodule(self.p, self.dim_ambient, _rref(list(self.basis) + list(other.basis), self.p))

    def codes(self) -> np.ndarray:
        """Every vector of the subspace, encoded as sum(v_i p^i), sorted."""
        n, p = self.dim_ambient, self.p
        weights = p ** np.arange(n, dtype=np.int64)
        if not self.basis:
            return np.zeros(1, dtype=np.int64)
        B = np.array(self.basis, dtype=np.int64)
        coeffs = np.array(list(product(range(p), repeat=len(self.basis))), dtype=np.int64)
        vecs = coeffs @ B % p
        return np.sort(vecs @ weights)

    def to_json(self) -> dict:
        return {"dim": self.dim, "basis": [list(r) for r in self.basis]}


@dataclass(frozen=True)
class FpModule:
    p: int
    dim: int
    actors: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if not nt.is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")
        if self.dim < 0:
            raise UsageError("dimension must be >= 0")
        fixed = []
        for A in self.actors:
            A = np.asarray(A, dtype=np.int64) % self.p
            if A.shape != (self.dim, self.dim):
                raise UsageError(f"actor of shape {A.shape} on a module of dimension {self.dim}")
            A.flags.writeable = False
            fixed.append(A)
        object.__setattr__(self, "actors", tuple(fixed))

    def _check_cap(self):
        if self.p**self.dim > VECTOR_CAP:
            raise CapExceeded(f"p^dim = {self.p**self.dim} exceeds {VECTOR_CAP}")

    def zero(self) -> Submodule:
        return Submodule(self.p, self.dim, ())

    def full(self) -> Submodule:
        return Submodule(self.p, self.dim, _rref(np.eye(self.dim, dtype=np.int64), self.p))

    def span(self, vectors) -> Submodule:
        return Submodule(self.p, self.dim, _rref(vectors, self.p))

    def generated(self, vectors, actors: Optional[Sequence[np.ndarray]] = None) -> Submodule:
        """Smallest subspace containing ``vectors`` and stable under ``actors``."""
        acts = self.actors if actors is None else [np.asarray(A, dtype=np.int64) % self.p for A in actors]
        basis = _rref(vectors, self.p)
        queue = list(basis)
        while queue:
            v = np.array(queue.pop(), dtype=np.int64)
            for A in acts:
                w = tuple(int(x) for x in A @ v % self.p)
                nb = _rref(list(basis) + [w], self.p)
                if len(nb) > len(basis):
                    basis = nb
                    queue.append(w)
                    if len(basis) == self.dim:
                        return Submodule(self.p, self.dim, basis)
        return Submodule(self.p, self.dim, basis)

    def is_submodule(self, S: Submodule) -> bool:
        return all(S.contains_vector(tuple(A @ np.array(b) % self.p)) for b in S.basis for A in self.actors)

    def vectors(self):
        """Every vector in the fixed total order: code sum(v_i p^i) ascending."""
        for code in range(self.p**self.dim):
            v = []
            for _ in range(self.dim):
                code, c = divmod(code, self.p)
                v.append(c)
            yield tuple(v)

    def to_json(self) -> dict:
        return {"p": self.p, "dim": self.dim, "actors": [A.tolist() for A in self.actors]}

    @classmethod
    def from_json(cls, doc) -> "FpModule":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(doc["p"], doc["dim"], tuple(np.array(A, dtype=np.int64) for A in doc["actors"]))


def _normalized(v) -> bool:
    """First nonzero coordinate equals 1 (one representative per line)."""
    for x in v:
        if x:
            return x == 1
    return False


def all_submodules(Mod: FpModule) -> List[Submodule]:
    """Every actor-invariant subspace, sorted by (dimension, echelon basis)."""
    Mod._check_cap()
    cyclic = {}
    for v in Mod.vectors():
        if _normalized(v):
            S = Mod.generated([v])
            cyclic[S.basis] = S
    found = {(): Mod.zero()}
    found.update(cyclic)
    frontier = list(found.values())
    cyc = list(cyclic.values())
    while frontier:
        nxt = []
        for A in frontier:
            for C in cyc:
                J = A.join(C)
                if J.basis not in found:
                    found[J.basis] = J
                    nxt.append(J)
        frontier = nxt
    return sorted(found.values())


def maximal_submodules(Mod: FpModule) -> List[Submodule]:
    """Maximal proper submodules."""
    subs = all_submodules(Mod)
    proper = [S for S in subs if S.dim < Mod.dim]
    out = []
    for S in proper:
        if not any(T.dim > S.dim and S <= T for T in proper):
            out.append(S)
    return out


def _intersection(mods: Sequence[Submodule], p: int, dim: int) -> Submodule:
    codes = mods[0].codes()
    for S in mods[1:]:
        codes = np.intersect1d(codes, S.codes(), assume_unique=True)
    vecs = []
    for c in codes.tolist():
        v = []
        for _ in range(dim):
            c, x = divmod(c, p)
            v.append(x)
        vecs.append(v)
    return Submodule(p, dim, _rref(vecs, p))


def radical(Mod: FpModule) -> Submodule:
    """Intersection of the maximal submodules; the whole module if there are none."""
    maxes = maximal_submodules(Mod)
    if not maxes:
        return Mod.full()
    return _intersection(maxes, Mod.p, Mod.dim)


@dataclass(frozen=True)
class SubmoduleCountReport:
    p: int
    dim: int
    num_maximal: int
    radical_dim: int
    quotient_size: int
    bound: int

    @property
    def satisfied(self) -> bool:
        return self.num_maximal <= self.bound

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "dim": self.dim,
            "num_maximal": self.num_maximal,
            "radical_dim": self.radical_dim,
            "quotient_size": str(self.quotient_size),
            "bound": str(self.bound),
            "satisfied": self.satisfied,
        }


def check_maximal_count_bound(Mod: FpModule, strict: bool = True) -> SubmoduleCountReport:
    """Count maximal submodules against |M/JM| - 1."""
    maxes = maximal_submodules(Mod)
    rad = _intersection(maxes, Mod.p, Mod.dim) if maxes else Mod.full()
    qsize = Mod.p ** (Mod.dim - rad.dim)
    rep = SubmoduleCountReport(Mod.p, Mod.dim, len(maxes), rad.dim, qsize, qsize - 1)
    if strict and not rep.satisfied:
        raise BoundViolated(f"{rep.num_maximal} maximal submodules exceed |M/JM| - 1 = {rep.bound}")
    for S in maxes:
        if strict and not rad <= S:
            raise BoundViolated("a maximal submodule misses the radical")
    return rep


def random_module(rng: np.random.Generator, p: int, dim: int, n_actors: int) -> FpModule:
    return FpModule(p, dim, tuple(rng.integers(0, p, size=(dim, dim)) for _ in range(n_actors)))


def trivial_module(p: int, dim: int) -> FpModule:
    return FpModule(p, dim, (np.eye(dim, dtype=np.int64),))


# --- fully deleted permutation module -------------------------------------------------


def fully_deleted_dim(n: int, p: int) -> int:
    return n - 2 if n % p == 0 else n - 1


def fully_deleted_matrix(n: int, p: int, g) -> np.ndarray:
    """Matrix of the permutation g on U/(U n W).

    U has basis b_i = e_i - e_(n-1), i < n - 1.  When p | n the constants
    lie in U as the sum of all b_i, and the last coordinate is eliminated.
    """
    g = np.asarray(g)
    m = n - 1
    cols = []
    for j in range(m):
        x = np.zeros(n, dtype=np.int64)
        x[g[j]] += 1
        x[g[n - 1]] -= 1
        c = x[:m] % p  # coordinates in the b basis (x is zero-sum)
        cols.append(c)
    A = np.array(cols, dtype=np.int64).T % p
    if n % p:
        return A
    # quotient by the all-ones coordinate vector: c -> c - c_last * (1, ..., 1)
    d = m - 1
    red = np.zeros((d, m), dtype=np.int64)
    red[:, :d] = np.eye(d, dtype=np.int64)
    red[:, d] = -1
    lift = np.zeros((m, d), dtype=np.int64)
    lift[:d, :d] = np.eye(d, dtype=np.int64)
    return red @ A @ lift % p


def fully_deleted_module(n: int, p: int, gens: Optional[Sequence] = None) -> FpModule:
    """The fully deleted permutation module of S_n over F_p.

    Actors are the images of (0 1) and the n-cycle unless ``gens`` is given.
    """
    if n < 3:
        raise UsageError("n must be >= 3")
    if not nt.is_prime(p):
        raise NotPrime(f"{p} is not prime")
    dim = fully_deleted_dim(n, p)
    if p**dim > VECTOR_CAP:
        raise CapExceeded(f"p^dim = {p**dim} exceeds {VECTOR_CAP}")
    if gens is None:
        gens = [P.from_cycles(n, (0, 1)), P.from_cycles(n, tuple(range(n)))]
    return FpModule(p, dim, tuple(fully_deleted_matrix(n, p, g) for g in gens))


def is_cyclic_module(Mod: FpModule, actors_subset: Sequence[np.ndarray]):
    """Lowest vector (in code order) generating Mod under ``actors_subset``, or None."""
    Mod._check_cap()
    if Mod.dim == 0:
        return ()
    for v in Mod.vectors():
        if not _normalized(v):
            # a scalar multiple generates the same submodule as its normalized line
            continue
        if Mod.generated([v], actors_subset).dim == Mod.dim:
            return v
    return None


# --- maximal subgroups of small symmetric groups ---------------------------------------


def _c(n, *cycles):
    return P.from_cycles(n, *cycles)


def _affine_prime(p: int):
    lam = next(g for g in range(2, p) if nt.multiplicative_order(g, p) == p - 1)
    return [_c(p, tuple(range(p))), P.perm([lam * x % p for x in range(p)])]


def _catalogue_data(n: int):
    from .families import _pgl2_prime

    alt = [_c(n, (i, i + 1, i + 2)) for i in range(n - 2)]
    if n == 5:
        return [
            ("A5", alt),
            ("S4", [_c(5, (0, 1)), _c(5, (0, 1, 2, 3))]),
            ("S3xS2", [_c(5, (0, 1)), _c(5, (0, 1, 2)), _c(5, (3, 4))]),
            ("AGL1(5)", _affine_prime(5)),
        ]
    if n == 6:
        return [
            ("A6", alt),
            ("S5", [_c(6, (0, 1)), _c(6, (0, 1, 2, 3, 4))]),
            ("PGL2(5)", _pgl2_prime(5)),
            ("S4xS2", [_c(6, (0, 1)), _c(6, (0, 1, 2, 3)), _c(6, (4, 5))]),
            ("S3wrS2", [_c(6, (0, 1)), _c(6, (0, 1, 2)), _c(6, (0, 3), (1, 4), (2, 5))]),
            ("S2wrS3", [_c(6, (0, 1)), _c(6, (0, 2), (1, 3)), _c(6, (0, 2, 4), (1, 3, 5))]),
        ]
    if n == 7:
        return [
            ("A7", alt),
            ("S6", [_c(7, (0, 1)), _c(7, (0, 1, 2, 3, 4, 5))]),
            ("S5xS2", [_c(7, (0, 1)), _c(7, (0, 1, 2, 3, 4)), _c(7, (5, 6))]),
            ("S4xS3", [_c(7, (0, 1)), _c(7, (0, 1, 2, 3)), _c(7, (4, 5)), _c(7, (4, 5, 6))]),
            ("AGL1(7)", _affine_prime(7)),
        ]
    if n == 8:
        return [
            ("A8", alt),
            ("S7", [_c(8, (0, 1)), _c(8, (0, 1, 2, 3, 4, 5, 6))]),
            ("S6xS2", [_c(8, (0, 1)), _c(8, (0, 1, 2, 3, 4, 5)), _c(8, (6, 7))]),
            ("S5xS3", [_c(8, (0, 1)), _c(8, (0, 1, 2, 3, 4)), _c(8, (5, 6)), _c(8, (5, 6, 7))]),
            ("S4wrS2", [_c(8, (0, 1)), _c(8, (0, 1, 2, 3)), _c(8, (0, 4), (1, 5), (2, 6), (3, 7))]),
            ("S2wrS4", [_c(8, (0, 1)), _c(8, (0, 2), (1, 3)), _c(8, (0, 2, 4, 6), (1, 3, 5, 7))]),
            ("PGL2(7)", _pgl2_prime(7)),
        ]
    raise UsageError("the catalogue covers n in 5..8")


_EXPECTED_ORDERS = {
    5: (60, 24, 12, 20),
    6: (360, 120, 120, 48, 72, 48),
    7: (2520, 720, 240, 144, 42),
    8: (20160, 5040, 1440, 720, 1152, 384, 336),
}


@lru_cache(maxsize=None)
def sn_maximal_catalogue(n: int):
    """One representative per conjugacy class of maximal subgroups of S_n, n in 5..8.

    Each entry is checked maximal by a coset sweep before it is returned.
    """
    from .permgroup.group import PermGroup, symmetric_group
    from .permgroup.maximality import is_maximal

    if n not in _EXPECTED_ORDERS:
        raise UsageError("the catalogue covers n in 5..8")
    S = symmetric_group(n)
    out = []
    for (name, gens), order in zip(_catalogue_data(n), _EXPECTED_ORDERS[n]):
        H = PermGroup(n, gens, name=name)
        if H.order != order:
            raise AssertionError(f"catalogue entry {name} has order {H.order}, expected {order}")
        verdict = is_maximal(H, S, "sweep")
        if verdict.status != "verified":
            raise AssertionError(f"catalogue entry {name} is not maximal in S{n}")
        out.append((name, tuple(H.gens)))
    return tuple(out)
