"""Enumerated groups: every element as a row, indexed by its base image.

Small-group algorithms (closures as boolean masks, conjugacy classes,
sweeps, exhaustive generation searches) work on element indices.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

import numpy as np

from ..errors import ScaleExceeded
from . import perm as P
from .group import PermGroup

ENUMERATION_CAP = 2 * 10**5
_CELL_CAP = 6 * 10**7  # order * degree entries held in memory
_CAYLEY_CAP = 3 * 10**8  # order**2 * degree work to build a full product table


class ElementTable:
    def __init__(self, G: PermGroup, cap: int = ENUMERATION_CAP):
        if G.order > cap or G.order * max(G.degree, 1) > _CELL_CAP:
            raise ScaleExceeded(f"|G| = {G.order} at degree {G.degree} is too large to enumerate")
        self.group = G
        n = G.degree
        self.n = n
        self.base = np.asarray(G.base, dtype=np.int64)
        dtype = np.int16 if n < 2**15 else np.int32
        E = np.arange(n, dtype=dtype)[None, :]
        for U in reversed(G.transversals()):
            U = U.astype(dtype)
            E = U[:, E].reshape(-1, n)
        # E is in chain order: row index = mixed radix of transversal digits
        self._radix = n ** len(self.base) < 2**62 if len(self.base) else True
        keys = self._keys(E)
        if self._radix:
            order = np.argsort(keys, kind="stable")
            self.keys = keys[order]
            self._dict = None
        else:
            order = np.array(sorted(range(len(keys)), key=lambda i: keys[i]))
            self.keys = None
            self._dict = {keys[i]: r for r, i in enumerate(order)}
        self.elems = np.ascontiguousarray(E[order])
        self.elems.flags.writeable = False
        self.chain_to_index = np.empty(len(order), dtype=np.int64)
        self.chain_to_index[order] = np.arange(len(order))
        self.N = len(order)
        self.identity = int(self.index_of(np.arange(n)[None, :])[0])
        self.gen_index = [int(i) for i in self.index_of(np.stack(G.gens))] if G.gens else []
        self.inv = self.index_of(self._inverses())
        self._cayley = None
        if self.N <= 4096 and self.N * self.N * max(n, 1) <= _CAYLEY_CAP:
            self._cayley = self._build_cayley()

    # --- indexing -------------------------------------------------------

    def _keys(self, rows: np.ndarray):
        if len(self.base) == 0:
            return np.zeros(len(rows), dtype=np.int64)
        imgs = rows[:, self.base].astype(np.int64)
        if self._radix:
            weights = self.n ** np.arange(len(self.base), dtype=np.int64)
            return imgs @ weights
        return [r.tobytes() for r in imgs]

    def index_of(self, rows: np.ndarray) -> np.ndarray:
        rows = np.atleast_2d(rows)
        k = self._keys(rows)
        if self._radix:
            idx = np.searchsorted(self.keys, k)
            return idx
        return np.array([self._dict[x] for x in k], dtype=np.int64)

    def _inverses(self) -> np.ndarray:
        inv = np.empty_like(self.elems)
        rows = np.arange(self.N)[:, None]
        inv[rows, self.elems] = np.arange(self.n, dtype=self.elems.dtype)[None, :]
        return inv

    def _build_cayley(self) -> np.ndarray:
        T = np.empty((self.N, self.N), dtype=np.int32)
        for j in range(self.N):
            T[:, j] = self.index_of(self.elems[j][self.elems])
        return T

    # --- arithmetic on indices -------------------------------------------

    def mul(self, a, b: int) -> np.ndarray:
        """Indices of a*b for an index array a and a single index b."""
        a = np.asarray(a)
        if self._cayley is not None:
            return self._cayley[a, b]
        return self.index_of(self.elems[b][self.elems[a]])

    def lmul(self, h: int, xs) -> np.ndarray:
        """Indices of h*x for each x in xs."""
        xs = np.asarray(xs)
        if self._cayley is not None:
            return self._cayley[h, xs]
        return self.index_of(self.elems[xs][:, self.elems[h]])

    def conj(self, xs, g: int) -> np.ndarray:
        """Indices of g^-1 x g."""
        xs = np.asarray(xs)
        if self._cayley is not None:
            return self._cayley[self._cayley[self.inv[g], xs], g]
        X = self.elems[xs]
        ginv = self.elems[self.inv[g]]
        return self.index_of(self.elems[g][X[:, ginv]])

    def power(self, x: int, e: int) -> int:
        g = P.power(self.elems[x].astype(np.int64), e)
        return int(self.index_of(g[None, :])[0])

    def element(self, i: int) -> np.ndarray:
        return P.perm(self.elems[i])

    def elem_order(self, x: int) -> int:
        return P.order(self.elems[x])

    # --- subgroup machinery -------------------------------------------------

    def closure(self, gens: Sequence[int], stop_above: Optional[int] = None):
        """Mask of the subgroup generated by ``gens``.

        With ``stop_above`` set, returns None as soon as more than that many
        elements are found (used with N // 2: a larger subgroup is everything).
        """
        seen = np.zeros(self.N, dtype=bool)
        seen[self.identity] = True
        count = 1
        frontier = np.array([self.identity], dtype=np.int64)
        gens = [int(g) for g in gens if g != self.identity]
        while frontier.size:
            found = []
            for g in gens:
                nxt = self.mul(frontier, g)
                nxt = nxt[~seen[nxt]]
                if nxt.size:
                    nxt = np.unique(nxt)
                    seen[nxt] = True
                    count += nxt.size
                    found.append(nxt)
            if stop_above is not None and count > stop_above:
                return None
            frontier = np.concatenate(found) if found else np.empty(0, dtype=np.int64)
        return seen

    def generates(self, gens: Sequence[int]) -> bool:
        if self.N == 1:
            return True
        return self.closure(gens, stop_above=self.N // 2) is None

    def subgroup_order(self, gens: Sequence[int]) -> int:
        return int(self.closure(gens).sum())

    def normal_closure(self, gens: Sequence[int]) -> tuple:
        """(mask, generator list) of the normal closure of ``gens``."""
        ng = [int(g) for g in gens]
        mask = self.closure(ng)
        changed = True
        while changed:
            changed = False
            for k in list(ng):
                for g in self.gen_index:
                    c = int(self.conj([k], g)[0])
                    if not mask[c]:
                        ng.append(c)
                        mask = self.closure(ng)
                        changed = True
        return mask, ng

    def conjugacy_classes(self) -> List[np.ndarray]:
        """Classes in order of their smallest element index."""
        if hasattr(self, "_classes"):
            return self._classes
        label = np.full(self.N, -1, dtype=np.int64)
        classes = []
        for x in range(self.N):
            if label[x] >= 0:
                continue
            cid = len(classes)
            label[x] = cid
            members = [np.array([x])]
            frontier = np.array([x])
            while frontier.size:
                found = []
                for g in self.gen_index:
                    y = self.conj(frontier, g)
                    y = np.unique(y[label[y] < 0])
                    if y.size:
                        label[y] = cid
                        found.append(y)
                frontier = np.concatenate(found) if found else np.empty(0, dtype=np.int64)
                members.extend(found)
            classes.append(np.sort(np.concatenate(members)))
        self._classes = classes
        self._class_label = label
        return classes

    def class_label(self) -> np.ndarray:
        self.conjugacy_classes()
        return self._class_label

    def is_abelian(self) -> bool:
        gs = self.gen_index
        return all(
            int(self.mul([a], b)[0]) == int(self.mul([b], a)[0]) for a in gs for b in gs
        )

    def double_coset(self, H_gens: Sequence[int], g: int) -> np.ndarray:
        """Mask of H g H."""
        seen = np.zeros(self.N, dtype=bool)
        seen[g] = True
        frontier = np.array([g])
        while frontier.size:
            found = []
            for h in H_gens:
                for nxt in (self.mul(frontier, h), self.lmul(h, frontier)):
                    nxt = nxt[~seen[nxt]]
                    if nxt.size:
                        nxt = np.unique(nxt)
                        seen[nxt] = True
                        found.append(nxt)
            frontier = np.concatenate(found) if found else np.empty(0, dtype=np.int64)
        return seen

    def indices_of_perms(self, perms: Sequence) -> List[int]:
        if not len(perms):
            return []
        return [int(i) for i in self.index_of(np.stack([np.asarray(p) for p in perms]))]


_CACHE: dict = {}


def table_for(G: PermGroup) -> ElementTable:
    """Memoized ElementTable keyed on the group object."""
    key = id(G)
    hit = _CACHE.get(key)
    if hit is not None and hit.group is G:
        return hit
    T = ElementTable(G)
    if len(_CACHE) > 16:
        _CACHE.clear()
    _CACHE[key] = T
    return T
