"""Permutation groups via a deterministic Schreier-Sims stabilizer chain."""

from __future__ import annotations

import json
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DegreeMismatch, NotAPermutation, UsageError
from . import perm as P

MAX_DEGREE = 10**5


class _Level:
    """One stabilizer-chain level: base point, strong generators, transversal."""

    __slots__ = ("point", "gens", "orbit", "pos", "trans", "trans_inv")

    def __init__(self, point: int, n: int):
        self.point = point
        self.gens: List[np.ndarray] = []
        self.orbit = [point]
        self.pos = np.full(n, -1, dtype=np.int64)
        self.pos[point] = 0
        self.trans = [P.identity(n)]
        self.trans_inv = [P.identity(n)]

    def rebuild(self):
        """Recompute orbit and transversal from scratch (deterministic BFS)."""
        n = self.pos.size
        self.pos[:] = -1
        self.pos[self.point] = 0
        self.orbit = [self.point]
        ident = P.identity(n)
        self.trans = [ident]
        i = 0
        while i < len(self.orbit):
            b = self.orbit[i]
            u = self.trans[i]
            for s in self.gens:
                c = int(s[b])
                if self.pos[c] < 0:
                    self.pos[c] = len(self.orbit)
                    self.orbit.append(c)
                    self.trans.append(s[u])
            i += 1
        self.trans_inv = [P.inverse(u) for u in self.trans]


class PermGroup:
    """A permutation group of degree n with base and strong generating set.

    Construction is deterministic for a fixed generator sequence.  Groups are
    treated as immutable once built.
    """

    def __init__(self, degree: int, gens: Iterable = (), base: Sequence[int] = (), name: str = ""):
        if degree < 0 or degree > MAX_DEGREE:
            raise UsageError(f"degree must be in 0..{MAX_DEGREE}, got {degree}")
        self.degree = degree
        self.name = name
        gl = []
        for g in gens:
            g = P.perm(g)
            if g.size != degree:
                raise NotAPermutation(f"generator of degree {g.size} in a group of degree {degree}")
            gl.append(g)
        self.gens: Tuple[np.ndarray, ...] = tuple(gl)
        self._levels: List[_Level] = []
        self._schreier_sims(list(base))

    # --- construction ---------------------------------------------------

    def _sift(self, g: np.ndarray, start: int = 0):
        for j in range(start, len(self._levels)):
            lv = self._levels[j]
            i = lv.pos[g[lv.point]]
            if i < 0:
                return g, j
            g = lv.trans_inv[i][g]
        return g, len(self._levels)

    def _first_moved(self, g: np.ndarray) -> int:
        moved = np.flatnonzero(g != np.arange(self.degree))
        return int(moved[0])

    def _schreier_sims(self, base: List[int]):
        n = self.degree
        gens = [g for g in self.gens if not P.is_identity(g)]
        for b in base:
            self._levels.append(_Level(b, n))
        for g in gens:
            if all(g[lv.point] == lv.point for lv in self._levels):
                self._levels.append(_Level(self._first_moved(g), n))
        if not self._levels:
            return
        for g in gens:
            for lv in self._levels:
                lv.gens.append(g)
                if g[lv.point] != lv.point:
                    break
        for lv in self._levels:
            lv.rebuild()

        i = len(self._levels) - 1
        while i >= 0:
            lv = self._levels[i]
            restart = None
            for bi in range(len(lv.orbit)):
                u = lv.trans[bi]
                b = lv.orbit[bi]
                for s in lv.gens:
                    c = int(s[b])
                    # Schreier generator u * s * u_c^-1 fixes the base point
                    h = lv.trans_inv[lv.pos[c]][s[u]]
                    res, drop = self._sift(h, i + 1)
                    if drop < len(self._levels) or not P.is_identity(res):
                        if drop == len(self._levels):
                            self._levels.append(_Level(self._first_moved(res), n))
                        res.flags.writeable = False
                        for j in range(i + 1, drop + 1):
                            self._levels[j].gens.append(res)
                            self._levels[j].rebuild()
                        restart = drop
                        break
                if restart is not None:
                    break
            if restart is not None:
                i = restart
            else:
                i -= 1

    # --- queries ----------------------------------------------------------

    @property
    def base(self) -> Tuple[int, ...]:
        return tuple(lv.point for lv in self._levels)

    @property
    def strong_gens(self) -> Tuple[np.ndarray, ...]:
        if not self._levels:
            return ()
        return tuple(self._levels[0].gens)

    @property
    def orbit_lengths(self) -> Tuple[int, ...]:
        return tuple(len(lv.orbit) for lv in self._levels)

    @cached_property
    def order(self) -> int:
        out = 1
        for m in self.orbit_lengths:
            out *= m
        return out

    def __len__(self):
        return self.order

    def identity(self) -> np.ndarray:
        return P.identity(self.degree)

    def contains(self, g) -> bool:
        g = np.asarray(g, dtype=P.DTYPE)
        if g.size != self.degree:
            raise DegreeMismatch(f"degree {g.size} element vs degree {self.degree} group")
        res, drop = self._sift(g)
        return drop == len(self._levels) and P.is_identity(res)

    __contains__ = contains

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        if other.degree != self.degree:
            raise DegreeMismatch(f"degrees {self.degree} and {other.degree}")
        return all(other.contains(g) for g in self.gens)

    def generates(self, S: Sequence) -> bool:
        """True iff the closure of S (drawn from this group) is the whole group."""
        for s in S:
            if np.asarray(s).size != self.degree:
                raise DegreeMismatch("generator degree does not match the group")
        return PermGroup(self.degree, S).order == self.order

    def is_abelian(self) -> bool:
        gs = self.gens
        return all(
            np.array_equal(a[b], b[a]) for i, a in enumerate(gs) for b in gs[i + 1 :]
        )

    def orbit(self, point: int) -> List[int]:
        seen = {point}
        out = [point]
        i = 0
        while i < len(out):
            x = out[i]
            for g in self.gens:
                y = int(g[x])
                if y not in seen:
                    seen.add(y)
                    out.append(y)
            i += 1
        return out

    def orbits(self) -> List[List[int]]:
        seen = np.zeros(self.degree, dtype=bool)
        out = []
        for x in range(self.degree):
            if not seen[x]:
                o = self.orbit(x)
                seen[o] = True
                out.append(o)
        return out

    def is_transitive(self) -> bool:
        return self.degree <= 1 or len(self.orbit(0)) == self.degree

    def stabilizer(self, point: int) -> "PermGroup":
        """Point stabilizer, read off a chain whose base starts at ``point``."""
        G = PermGroup(self.degree, self.gens, base=[point])
        if len(G._levels) < 2:
            return PermGroup(self.degree, [])
        return PermGroup(self.degree, G._levels[1].gens)

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        """Uniform element: a product of uniformly chosen transversal entries."""
        g = P.identity(self.degree)
        for lv in reversed(self._levels):
            g = lv.trans[int(rng.integers(len(lv.trans)))][g]
        return g

    def chain_index_element(self, digits: Sequence[int]) -> np.ndarray:
        """Element u_{last}...u_0 for transversal indices given level 0 first."""
        g = P.identity(self.degree)
        for lv, d in zip(reversed(self._levels), reversed(list(digits))):
            g = lv.trans[d][g]
        return g

    def transversals(self) -> List[np.ndarray]:
        return [np.stack(lv.trans) for lv in self._levels]

    def verify_chain(self) -> bool:
        """Order is the product of orbit lengths and every generator sifts."""
        return all(self.contains(g) for g in self.gens)

    # --- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "generators": [P.format_images(g) for g in self.gens],
            "order": str(self.order),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PermGroup":
        G = cls(doc["degree"], [P.parse_images(s) for s in doc["generators"]])
        if "order" in doc and int(doc["order"]) != G.order:
            raise UsageError(f"declared order {doc['order']} but chain gives {G.order}")
        return G

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self):
        label = f"{self.name} " if self.name else ""
        return f"<PermGroup {label}degree={self.degree} order={self.order}>"


def from_generators(n: int, gens: Sequence) -> PermGroup:
    return PermGroup(n, gens)


def symmetric_group(n: int) -> PermGroup:
    if n < 2:
        return PermGroup(n, [], name=f"S{n}")
    gens = [P.from_cycles(n, (0, 1))]
    if n > 2:
        gens.append(P.from_cycles(n, tuple(range(n))))
    return PermGroup(n, gens, name=f"S{n}")


def alternating_group(n: int) -> PermGroup:
    if n < 3:
        return PermGroup(n, [], name=f"A{n}")
    gens = [P.from_cycles(n, (i, i + 1, i + 2)) for i in range(n - 2)]
    return PermGroup(n, gens, name=f"A{n}")


def cyclic_group(m: int) -> PermGroup:
    return PermGroup(m, [P.from_cycles(m, tuple(range(m)))] if m > 1 else [], name=f"Z{m}")


def elementary_abelian(p: int, k: int) -> PermGroup:
    """(Z_p)^k as a regular-on-blocks direct product of degree p*k."""
    n = p * k
    gens = [P.from_cycles(n, tuple(range(i * p, (i + 1) * p))) for i in range(k)] if p > 1 else []
    return PermGroup(n, gens, name=f"({p})^{k}")
