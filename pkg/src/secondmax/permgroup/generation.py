"""Generator counts and random generation.

``d_exact`` brackets d(G) from three sides:

* lower bounds that are cheap and exact arithmetic: the rank of the largest
  elementary abelian quotient G/G'G^p, and for an elementary abelian normal
  subgroup A the derivation bound d(G) >= dim Z^1(G, A) / dim A (a derivation
  is pinned down by its values on a generating set);
* an upper bound from randomly found generating tuples;
* if a gap remains, a pruned exhaustive search over subgroups generated by
  few elements.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .. import numtheory as nt
from ..errors import CapExceeded, ScaleExceeded, UsageError
from . import perm as P
from .group import PermGroup
from .table import ENUMERATION_CAP, ElementTable, table_for

LOWER_BOUND_CAP = 10**6
D_CAP_MAX = 8
NU_K_CAP = 16
DEFAULT_SEED = 20160907
_RANDOM_TRIALS = 64


# --- lower bounds --------------------------------------------------------------


def normal_closure(G: PermGroup, gens: Sequence) -> PermGroup:
    """Smallest normal subgroup of G containing ``gens``."""
    ng = [P.perm(g) for g in gens if not P.is_identity(g)]
    N = PermGroup(G.degree, ng)
    queue = list(ng)
    while queue:
        x = queue.pop()
        for g in G.gens:
            c = P.conjugate(x, g)
            if not N.contains(c):
                ng.append(c)
                queue.append(c)
                N = PermGroup(G.degree, ng)
    return N


def derived_subgroup(G: PermGroup) -> PermGroup:
    gs = G.gens
    comms = [P.commutator(a, b) for i, a in enumerate(gs) for b in gs[i + 1 :]]
    return normal_closure(G, comms)


def d_lower_bound(G: PermGroup) -> int:
    """Largest p-rank of G/G'G^p over primes p dividing |G/G'|."""
    if G.order > LOWER_BOUND_CAP:
        raise ScaleExceeded(f"|G| = {G.order} exceeds {LOWER_BOUND_CAP}")
    if G.order == 1:
        return 0
    D = derived_subgroup(G)
    ab = G.order // D.order
    best = 0
    for p in nt.prime_divisors(ab) if ab > 1 else []:
        N = PermGroup(G.degree, list(D.gens) + [P.power(g, p) for g in G.gens])
        best = max(best, round(math.log(G.order // N.order, p)))
    return best


def _rank_mod_p(rows: np.ndarray, p: int, ncols: int) -> int:
    """Rank over F_p, eliminating in chunks against a running echelon basis."""
    basis = np.zeros((0, ncols), dtype=np.int64)
    step = 4096
    for start in range(0, rows.shape[0], step):
        chunk = rows[start : start + step] % p
        chunk = chunk[chunk.any(axis=1)]
        if not chunk.size:
            continue
        M = np.concatenate([basis, chunk])
        basis = _echelon(M, p)
        if basis.shape[0] == ncols:
            break
    return basis.shape[0]


def _echelon(M: np.ndarray, p: int) -> np.ndarray:
    M = M.copy() % p
    r = 0
    for c in range(M.shape[1]):
        if r == M.shape[0]:
            break
        nz = np.flatnonzero(M[r:, c])
        if not nz.size:
            continue
        piv = r + nz[0]
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        M[r] = M[r] * pow(int(M[r, c]), p - 2, p) % p
        col = M[:, c].copy()
        col[r] = 0
        M = (M - np.outer(col, M[r])) % p
        r += 1
    M = M[:r]
    return M


def _elementary_abelian_normals(T: ElementTable, limit: int = 8):
    """Distinct normal closures of prime-order class representatives that are
    elementary abelian, smallest first."""
    found = {}
    for cls in T.conjugacy_classes():
        x = int(cls[0])
        o = T.elem_order(x)
        if o < 2 or not nt.is_prime(o):
            continue
        mask, ng = T.normal_closure([x])
        key = mask.tobytes()
        if key in found:
            continue
        size = int(mask.sum())
        if nt.is_prime_power(size) is None or nt.is_prime_power(size)[0] != o:
            continue
        members = np.flatnonzero(mask)
        # elementary abelian: every element has order o and generators commute
        if any(T.elem_order(int(m)) != o for m in members if m != T.identity):
            continue
        if not all(int(T.mul([a], b)[0]) == int(T.mul([b], a)[0]) for a in ng for b in ng):
            continue
        found[key] = (size, o, members)
    return [v for v in sorted(found.values(), key=lambda t: t[0])][:limit]


def derivation_dimension(T: ElementTable, gens: Sequence[int], A_members, p: int) -> Tuple[int, int]:
    """(dim Z^1(G, A), dim A) for A elementary abelian normal, G acting by conjugation.

    ``gens`` must generate the group of ``T``.
    """
    gens = [int(g) for g in gens]
    A_members = [int(a) for a in A_members]
    # coordinates on A from a greedy basis
    basis: List[int] = []
    span = {T.identity: ()}
    for a in A_members:
        if a in span:
            continue
        basis.append(a)
        new = {}
        for x, v in span.items():
            y = x
            for c in range(1, p):
                y = int(T.mul([y], a)[0])
                new[y] = v + (c,)
        span = {x: v + (0,) for x, v in span.items()}
        span.update(new)
    m = len(basis)
    if m == 0:
        return 0, 0
    coords = {x: np.array(v + (0,) * (m - len(v)), dtype=np.int64) for x, v in span.items()}
    u = len(gens)
    C = u * m
    # right action a -> s^-1 a s as an m x m matrix on row vectors
    R = []
    for s in gens:
        rows = [coords[int(T.conj([b], s)[0])] for b in basis]
        R.append(np.array(rows, dtype=np.int64))
    N = T.N
    D = np.zeros((N, C, m), dtype=np.int64)
    seen = np.zeros(N, dtype=bool)
    seen[T.identity] = True
    frontier = np.array([T.identity], dtype=np.int64)
    E = []
    for j in range(u):
        Ej = np.zeros((C, m), dtype=np.int64)
        Ej[j * m : (j + 1) * m] = np.eye(m, dtype=np.int64)
        E.append(Ej)
    while frontier.size:
        found = []
        for j, s in enumerate(gens):
            nxt = T.mul(frontier, s)
            fresh = ~seen[nxt]
            if not fresh.any():
                continue
            # keep the first discovery of each new element
            idx, first = np.unique(nxt[fresh], return_index=True)
            src = frontier[fresh][first]
            D[idx] = (D[src] @ R[j] + E[j]) % p
            seen[idx] = True
            found.append(idx)
        frontier = np.concatenate(found) if found else np.empty(0, dtype=np.int64)
    if not seen.all():
        raise UsageError("derivation space needs a generating set")
    constraints = []
    allx = np.arange(N)
    for j, s in enumerate(gens):
        xs = T.mul(allx, s)
        K = (D @ R[j] + E[j] - D[xs]) % p  # shape N x C x m
        constraints.append(K.transpose(0, 2, 1).reshape(-1, C))
    rank = _rank_mod_p(np.concatenate(constraints), p, C)
    return C - rank, m


def derivation_bound(T: ElementTable, gens: Sequence[int]) -> int:
    best = 0
    for size, p, members in _elementary_abelian_normals(T):
        z, m = derivation_dimension(T, gens, members, p)
        if m:
            best = max(best, -(-z // m))
    return best


# --- exact value ------------------------------------------------------------


@dataclass
class GenerationCertificate:
    d: int
    witness: Tuple[np.ndarray, ...]
    lower_bound: int
    lower_method: str  # abelianization, nonabelian, derivations, exhaustive, trivial

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "witness": [P.format_images(g) for g in self.witness],
            "lower_bound": self.lower_bound,
            "lower_method": self.lower_method,
        }


def _random_witness(T: ElementTable, size: int, rng: np.random.Generator, trials: int):
    for _ in range(trials):
        tup = [int(x) for x in rng.integers(T.N, size=size)]
        if T.generates(tup):
            return tup
    return None


def _greedy_generators(T: ElementTable, rng: np.random.Generator) -> List[int]:
    gens: List[int] = []
    mask = T.closure([])
    while not mask.all():
        outside = np.flatnonzero(~mask)
        gens.append(int(outside[rng.integers(outside.size)]))
        mask = T.closure(gens)
    return gens


def _no_tuple_generates(T: ElementTable, t: int) -> bool:
    """True iff no t elements generate the group, by pruned subgroup search.

    Level j holds the inclusion-maximal subgroups generated by j elements;
    extending a smaller subgroup can never beat extending a larger one.
    """
    if t <= 0:
        return T.N > 1
    half = T.N // 2
    reps = [int(c[0]) for c in T.conjugacy_classes()]
    level = []
    for x in reps:
        mask = T.closure([x], stop_above=half)
        if mask is None:
            return False
        level.append(mask)
    level = _maximal_masks(level)
    for _ in range(t - 1):
        nxt = []
        for H in level:
            covered = H.copy()
            for g in np.flatnonzero(~H):
                if covered[g]:
                    continue
                gens_H = _mask_generators(T, H)
                K = T.closure(gens_H + [int(g)], stop_above=half)
                if K is None:
                    return False
                covered |= K
                nxt.append(K)
        level = _maximal_masks(nxt)
    return True


def _mask_generators(T: ElementTable, mask: np.ndarray) -> List[int]:
    gens: List[int] = []
    cur = T.closure([])
    for x in np.flatnonzero(mask):
        if not cur[x]:
            gens.append(int(x))
            cur = T.closure(gens)
            if cur.sum() == mask.sum():
                break
    return gens


def _maximal_masks(masks: List[np.ndarray]) -> List[np.ndarray]:
    uniq = {}
    for m in masks:
        uniq.setdefault(m.tobytes(), m)
    ms = sorted(uniq.values(), key=lambda m: -int(m.sum()))
    out: List[np.ndarray] = []
    for m in ms:
        if not any(not (m & ~o).any() for o in out):
            out.append(m)
    return out


def d_exact(G: PermGroup, d_cap: int = D_CAP_MAX, seed: int = DEFAULT_SEED) -> Tuple[int, GenerationCertificate]:
    """Minimal number of generators with a witness tuple and a lower-bound certificate."""
    if d_cap < 1 or d_cap > D_CAP_MAX:
        raise UsageError(f"d_cap must be in 1..{D_CAP_MAX}")
    if G.order == 1:
        return 0, GenerationCertificate(0, (), 0, "trivial")
    if G.order > ENUMERATION_CAP:
        raise ScaleExceeded(f"|G| = {G.order} exceeds {ENUMERATION_CAP}")
    T = table_for(G)
    rng = np.random.default_rng(np.random.SeedSequence([seed, G.order]))
    lower, method = d_lower_bound(G), "abelianization"
    if lower < 2 and not T.is_abelian():
        lower, method = 2, "nonabelian"
    greedy = _greedy_generators(T, rng)
    upper_tuple = greedy
    for size in range(lower, len(greedy)):
        w = _random_witness(T, size, rng, _RANDOM_TRIALS)
        if w is not None:
            upper_tuple = w
            break
    upper = len(upper_tuple)
    if lower < upper:
        db = derivation_bound(T, upper_tuple)
        if db > lower:
            lower, method = db, "derivations"
    while lower < upper:
        if _no_tuple_generates(T, upper - 1):
            lower, method = upper, "exhaustive"
        else:
            # exhaustive search saw a smaller generating tuple; find it
            w = _random_witness(T, upper - 1, rng, 100 * _RANDOM_TRIALS)
            if w is None:
                raise CapExceeded("a smaller generating tuple exists but was not recovered")
            upper_tuple, upper = w, upper - 1
    if upper > d_cap:
        raise CapExceeded(f"d(G) = {upper} exceeds d_cap = {d_cap}")
    witness = tuple(T.element(i) for i in upper_tuple)
    if not G.generates(witness):
        raise AssertionError("witness tuple failed the chain check")
    return upper, GenerationCertificate(upper, witness, lower, method)


# --- random generation ------------------------------------------------------------


def _trial_rng(seed: int, k: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, k, trial]))


def _generates(G: PermGroup, T: Optional[ElementTable], elems: List[np.ndarray]) -> bool:
    if T is not None:
        return T.generates(T.indices_of_perms(elems))
    return PermGroup(G.degree, elems).order == G.order


def _count_successes(G: PermGroup, k: int, seed: int, start: int, stop: int) -> int:
    try:
        T = table_for(G)
    except ScaleExceeded:
        T = None
    hits = 0
    for trial in range(start, stop):
        rng = _trial_rng(seed, k, trial)
        elems = [G.random_element(rng) for _ in range(k)]
        hits += _generates(G, T, elems)
    return hits


def _worker(args):
    G, k, seed, start, stop = args
    return _count_successes(G, k, seed, start, stop)


@dataclass(frozen=True)
class GenerationEstimate:
    k: int
    trials: int
    successes: int

    @property
    def estimate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def stderr(self) -> float:
        if not self.trials:
            return 0.0
        p = self.estimate
        return math.sqrt(p * (1 - p) / self.trials)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "trials": self.trials,
            "successes": self.successes,
            "estimate": self.estimate,
            "stderr": self.stderr,
        }


def estimate_generation_probability(
    G: PermGroup, k: int, trials: int, seed: int = DEFAULT_SEED, workers: int = 1
) -> GenerationEstimate:
    """Monte-Carlo P(G, k): the chance that k uniform elements generate G."""
    if trials < 1:
        raise UsageError("trials must be >= 1")
    if k < 0:
        raise UsageError("k must be >= 0")
    if G.order == 1:
        return GenerationEstimate(k, trials, trials)
    if k == 0:
        return GenerationEstimate(0, trials, 0)
    if workers <= 1:
        hits = _count_successes(G, k, seed, 0, trials)
    else:
        bounds = np.linspace(0, trials, workers + 1).astype(int)
        jobs = [(G, k, seed, int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            hits = sum(ex.map(_worker, jobs))
    return GenerationEstimate(k, trials, hits)


def exact_generation_probability(G: PermGroup, k: int) -> float:
    """P(G, k) by enumeration of all k-tuples (small groups, k <= 2)."""
    T = table_for(G)
    if k == 0:
        return 1.0 if T.N == 1 else 0.0
    if k == 1:
        return sum(T.generates([x]) for x in range(T.N)) / T.N
    if k != 2:
        raise UsageError("exact enumeration supports k <= 2")
    # ordered pairs: count per conjugacy class of the first entry
    hits = 0
    for cls in T.conjugacy_classes():
        x = int(cls[0])
        hits += len(cls) * sum(T.generates([x, y]) for y in range(T.N))
    return hits / T.N**2


@dataclass
class NuEstimate:
    group: str
    rows: List[GenerationEstimate] = field(default_factory=list)
    nu_hat: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "threshold": 1 / math.e,
            "nu_hat": self.nu_hat,
            "rows": [r.to_json() for r in self.rows],
        }


def estimate_nu(
    G: PermGroup,
    trials: int,
    seed: int = DEFAULT_SEED,
    k_cap: int = NU_K_CAP,
    workers: int = 1,
    extra_rows: int = 1,
) -> NuEstimate:
    """Smallest k whose estimated P(G, k) reaches 1/e, with the per-k table.

    The table runs ``extra_rows`` past the crossing so boundary noise is visible.
    """
    if k_cap < 1 or k_cap > NU_K_CAP:
        raise UsageError(f"k_cap must be in 1..{NU_K_CAP}")
    out = NuEstimate(G.name or f"degree-{G.degree} order-{G.order}")
    k = 1
    while k <= k_cap:
        est = estimate_generation_probability(G, k, trials, seed, workers)
        out.rows.append(est)
        if out.nu_hat is None and est.estimate >= 1 / math.e:
            out.nu_hat = k
        if out.nu_hat is not None and k >= out.nu_hat + extra_rows:
            break
        k += 1
    if out.nu_hat is None:
        raise CapExceeded(f"no k <= {k_cap} reached 1/e")
    return out
