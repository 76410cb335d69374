"""Maximality of subgroups: coset sweeps, block systems, and subgroup chains."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .. import numtheory as nt
from ..errors import NotApplicable, NotASubgroup, ScaleExceeded, SecondMaxError, UsageError
from .group import PermGroup
from .table import table_for

SWEEP_CAP = 10**5
MAX_CHAIN_LEVELS = 4


# --- block systems -------------------------------------------------------------


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> Optional[int]:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return None
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return rb


def minimal_block(G: PermGroup, alpha: int, beta: int, domain: Optional[Sequence[int]] = None) -> List[int]:
    """Smallest block of G containing alpha and beta.

    Atkinson's merge: once two points share a class, their images under
    every generator must share one too.
    """
    n = G.degree
    uf = _UnionFind(n)
    gens = [np.asarray(g) for g in G.gens]
    queue = []
    r = uf.union(alpha, beta)
    if r is not None:
        queue.append((alpha, beta))
    while queue:
        a, b = queue.pop()
        for g in gens:
            x, y = int(g[a]), int(g[b])
            if uf.union(x, y) is not None:
                queue.append((x, y))
    root = uf.find(alpha)
    pts = domain if domain is not None else range(n)
    return [x for x in pts if uf.find(x) == root]


def block_system(G: PermGroup, block: Sequence[int]) -> List[List[int]]:
    """All images of a block, sorted."""
    seen = {tuple(sorted(block))}
    queue = [tuple(sorted(block))]
    while queue:
        b = queue.pop()
        for g in G.gens:
            img = tuple(sorted(int(g[x]) for x in b))
            if img not in seen:
                seen.add(img)
                queue.append(img)
    return sorted(list(b) for b in seen)


def nontrivial_block(G: PermGroup, point: int = 0) -> Optional[List[int]]:
    """A nontrivial block on the orbit of ``point`` or None when the action there is primitive."""
    orbit = sorted(G.orbit(point))
    if len(orbit) <= 2:
        return None
    stab = G.stabilizer(point)
    on_orbit = set(orbit)
    reps = []
    for o in stab.orbits():
        if o[0] != point and o[0] in on_orbit:
            reps.append(min(o))
    for beta in sorted(reps):
        blk = minimal_block(G, point, beta, orbit)
        if len(blk) < len(orbit):
            return blk
    return None


def is_primitive(G: PermGroup) -> bool:
    return G.degree >= 1 and G.is_transitive() and nontrivial_block(G, 0) is None


# --- maximality ------------------------------------------------------------------


@dataclass(frozen=True)
class MaximalityVerdict:
    status: str  # verified, refuted, assumed
    method: str  # sweep, primitivity, index, citation, none
    citation: Optional[str] = None
    detail: str = ""

    def to_json(self) -> dict:
        out = {"status": self.status, "method": self.method}
        if self.citation:
            out["citation"] = self.citation
        if self.detail:
            out["detail"] = self.detail
        return out


def _stabilized_point(H: PermGroup, G: PermGroup) -> Optional[int]:
    """A point alpha with H equal to the stabilizer of alpha in G, if any."""
    index = G.order // H.order
    fixed = [x for x in range(G.degree) if all(int(g[x]) == x for g in H.gens)]
    for x in fixed:
        if len(G.orbit(x)) == index:
            return x
    return None


def _sweep(H: PermGroup, G: PermGroup) -> MaximalityVerdict:
    if G.order > SWEEP_CAP:
        raise ScaleExceeded(f"sweep needs |G| <= {SWEEP_CAP}, got {G.order}")
    T = table_for(G)
    hg = T.indices_of_perms(H.gens)
    Hmask = T.closure(hg)
    covered = Hmask.copy()
    half = T.N // 2
    reps = 0
    for g in np.flatnonzero(~Hmask):
        if covered[g]:
            continue
        reps += 1
        if T.closure(hg + [int(g)], stop_above=half) is not None:
            return MaximalityVerdict("refuted", "sweep", detail=f"<H, element {int(g)}> is proper")
        # every element of HgH together with H generates G as well
        covered |= T.double_coset(hg, int(g))
    return MaximalityVerdict("verified", "sweep", detail=f"{reps} double cosets")


def _primitivity(H: PermGroup, G: PermGroup, alpha: int) -> MaximalityVerdict:
    blk = nontrivial_block(G, alpha)
    if blk is None:
        return MaximalityVerdict("verified", "primitivity", detail=f"stabilizer of point {alpha}")
    return MaximalityVerdict("refuted", "primitivity", detail=f"block of size {len(blk)}")


def is_maximal(H: PermGroup, G: PermGroup, method: str = "auto") -> MaximalityVerdict:
    """Whether H is a maximal subgroup of G.

    ``sweep`` tries H with an element from each double coset HgH; ``primitivity``
    needs H to be a full point stabilizer and tests the action for blocks;
    ``auto`` prefers primitivity, falls back to the sweep, then to a prime
    index, and otherwise returns ``assumed``.
    """
    if method not in ("sweep", "primitivity", "auto"):
        raise UsageError(f"unknown method {method!r}")
    if not H.is_subgroup_of(G):
        raise NotASubgroup("H is not contained in G")
    if H.order == G.order:
        return MaximalityVerdict("refuted", "index", detail="H = G")
    if method == "primitivity" or method == "auto":
        alpha = _stabilized_point(H, G)
        if alpha is not None:
            return _primitivity(H, G, alpha)
        if method == "primitivity":
            raise NotApplicable("H is not a point stabilizer of G")
    if method == "sweep" or G.order <= SWEEP_CAP:
        return _sweep(H, G)
    index = G.order // H.order
    if nt.is_prime(index):
        # Lagrange: no group fits strictly between
        return MaximalityVerdict("verified", "index", detail=f"prime index {index}")
    return MaximalityVerdict("assumed", "none", detail=f"|G| = {G.order} beyond the sweep cap")


# --- chains ----------------------------------------------------------------------


@dataclass
class ChainLevel:
    order: int
    index: Optional[int] = None  # index in the next group up
    maximal: Optional[MaximalityVerdict] = None
    error: str = ""
    label: str = ""

    @property
    def status(self) -> Optional[str]:
        if self.error:
            return "undetermined"
        return self.maximal.status if self.maximal is not None else None

    def to_json(self) -> dict:
        out = {"order": str(self.order)}
        if self.label:
            out["group"] = self.label
        if self.index is not None:
            out["index"] = str(self.index)
            out["maximal"] = self.maximal.to_json() if self.maximal is not None else {"status": "undetermined"}
        if self.error:
            out["error"] = self.error
        return out


@dataclass
class ChainReport:
    levels: List[ChainLevel]
    depth_claimed: int
    extras: Dict[str, object] = field(default_factory=dict)

    @property
    def links(self) -> List[ChainLevel]:
        return self.levels[:-1]

    @property
    def depth_confirmed(self) -> bool:
        return all(lv.status in ("verified", "assumed") for lv in self.links)

    @property
    def all_verified(self) -> bool:
        return all(lv.status == "verified" for lv in self.links)

    @property
    def refuted(self) -> bool:
        return any(lv.status == "refuted" for lv in self.links)

    def to_json(self) -> dict:
        out = {
            "levels": [lv.to_json() for lv in self.levels],
            "depth_claimed": self.depth_claimed,
            "depth_confirmed": self.depth_confirmed,
        }
        out.update(self.extras)
        return out


def verify_chain(chain: Sequence[PermGroup], assumptions: Optional[Dict[int, str]] = None) -> ChainReport:
    """Label each link chain[i] < chain[i+1], bottom group first.

    ``assumptions`` maps a link index to a citation string used when the
    link cannot be checked at this scale.
    """
    if len(chain) < 2 or len(chain) > MAX_CHAIN_LEVELS:
        raise UsageError(f"a chain has 2..{MAX_CHAIN_LEVELS} groups")
    assumptions = dict(assumptions or {})
    levels = []
    for i, H in enumerate(chain[:-1]):
        G = chain[i + 1]
        lv = ChainLevel(H.order, label=H.name)
        try:
            if G.order % H.order:
                raise NotASubgroup(f"|H| = {H.order} does not divide |G| = {G.order}")
            lv.index = G.order // H.order
            verdict = is_maximal(H, G, "auto")
            if verdict.status == "assumed":
                cite = assumptions.get(i)
                if cite is None:
                    raise ScaleExceeded(f"link {i} is beyond every verification cap and has no citation")
                verdict = MaximalityVerdict("assumed", "citation", citation=cite, detail=verdict.detail)
            lv.maximal = verdict
        except SecondMaxError as exc:
            lv.error = f"{type(exc).__name__}: {exc}"
        levels.append(lv)
    top = chain[-1]
    levels.append(ChainLevel(top.order, label=top.name))
    return ChainReport(levels, depth_claimed=len(chain) - 1)
