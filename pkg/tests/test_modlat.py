import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from secondmax import modlat as ml
from secondmax.errors import CapExceeded
from secondmax.permgroup import PermGroup, symmetric_group
from secondmax.permgroup import perm as P


def brute_invariant_subspaces(Mod):
    """Every subspace as a frozenset of vectors, by spanning all small vector sets."""
    p, n = Mod.p, Mod.dim
    vecs = list(itertools.product(range(p), repeat=n))

    def span(gens):
        out = set()
        for coeffs in itertools.product(range(p), repeat=len(gens)):
            out.add(tuple(sum(c * g[i] for c, g in zip(coeffs, gens)) % p for i in range(n)))
        return frozenset(out)

    spaces = set()
    for r in range(n + 1):
        for gens in itertools.combinations(vecs, r):
            spaces.add(span(gens))
    invariant = []
    for S in spaces:
        if all(tuple(int(x) for x in A @ np.array(v) % p) in S for v in S for A in Mod.actors):
            invariant.append(S)
    return invariant


def as_set(sub):
    return frozenset(tuple(int(x) for x in v) for v in _vectors(sub))


def _vectors(sub):
    p, basis = sub.p, [np.array(b) for b in sub.basis]
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        v = np.zeros(sub.dim_ambient, dtype=np.int64)
        for c, b in zip(coeffs, basis):
            v = v + c * b
        yield v % p


SWAP = np.array([[0, 1], [1, 0]])


def test_all_submodules_examples():
    assert len(ml.all_submodules(ml.trivial_module(2, 2))) == 5
    swap = ml.FpModule(2, 2, (SWAP,))
    subs = ml.all_submodules(swap)
    # 0, the diagonal line and the full space; the coordinate lines are swapped
    assert [s.dim for s in subs] == [0, 1, 2]
    assert subs[1].basis == ((1, 1),)
    with pytest.raises(CapExceeded):
        ml.all_submodules(ml.trivial_module(2, 17))


@given(st.sampled_from([2, 3]), st.integers(1, 3), st.integers(0, 2), st.integers(0, 2**32 - 1))
def test_all_submodules_match_brute_force(p, dim, n_actors, seed):
    if p == 3 and dim == 3:
        dim = 2
    Mod = ml.random_module(np.random.default_rng(seed), p, dim, n_actors)
    got = {as_set(s) for s in ml.all_submodules(Mod)}
    assert got == set(brute_invariant_subspaces(Mod))


def test_maximal_submodules_examples():
    assert len(ml.maximal_submodules(ml.trivial_module(2, 3))) == 7
    assert ml.maximal_submodules(ml.FpModule(2, 0, ())) == []
    # the 3-cycle on the zero-sum plane of F_2^3 acts irreducibly
    simple = ml.fully_deleted_module(3, 2)
    assert simple.dim == 2
    maxes = ml.maximal_submodules(simple)
    assert len(maxes) == 1 and maxes[0].dim == 0


def test_radical_examples():
    assert ml.radical(ml.trivial_module(2, 3)).dim == 0
    u = ml.FpModule(2, 2, (np.array([[1, 1], [0, 1]]),))
    rad = ml.radical(u)
    # N = u - I has image spanned by e_0
    assert rad.dim == 1 and rad.basis == ((1, 0),)
    assert ml.radical(ml.fully_deleted_module(3, 2)).dim == 0
    assert ml.radical(ml.FpModule(3, 0, ())).dim == 0


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_trivial_modules(p, d):
    rep = ml.check_maximal_count_bound(ml.trivial_module(p, d))
    assert rep.radical_dim == 0 and rep.bound == p**d - 1
    # hyperplanes of F_p^d
    assert rep.num_maximal == (p**d - 1) // (p - 1)
    if p == 2:
        assert rep.num_maximal == rep.bound


def test_simple_and_sum_of_simples():
    rep = ml.check_maximal_count_bound(ml.fully_deleted_module(3, 2))
    assert rep.num_maximal == 1 and rep.bound == 3
    # F_2 (trivial) + F_2^2 (irreducible 3-cycle) as modules for C3
    c3 = ml.fully_deleted_matrix(3, 2, P.from_cycles(3, (0, 1, 2)))
    A = np.zeros((3, 3), dtype=np.int64)
    A[0, 0] = 1
    A[1:, 1:] = c3
    rep = ml.check_maximal_count_bound(ml.FpModule(2, 3, (A,)))
    assert rep.num_maximal == 2 and rep.bound == 2 * 4 - 1


def test_random_modules_satisfy_bound_and_radical_containment():
    rng = np.random.default_rng(2016)
    for _ in range(100):
        p = int(rng.choice([2, 3]))
        Mod = ml.random_module(rng, p, int(rng.integers(1, 5)), int(rng.integers(1, 4)))
        rep = ml.check_maximal_count_bound(Mod)
        rad = ml.radical(Mod)
        assert all(rad <= S for S in ml.maximal_submodules(Mod))
        assert rep.satisfied and rep.radical_dim == rad.dim


def test_submodule_json_roundtrip():
    Mod = ml.random_module(np.random.default_rng(1), 3, 3, 2)
    back = ml.FpModule.from_json(Mod.to_json())
    assert all(np.array_equal(a, b) for a, b in zip(back.actors, Mod.actors))
    assert ml.all_submodules(back) == ml.all_submodules(Mod)


@pytest.mark.parametrize("n, p, dim", [(6, 2, 4), (5, 3, 4), (5, 5, 3), (7, 7, 5), (4, 2, 2)])
def test_fully_deleted_dims(n, p, dim):
    assert ml.fully_deleted_module(n, p).dim == dim


def quotient_oracle_matrix(n, p, g):
    """Action on U/(U n W) computed from scratch in the standard basis of F_p^n."""
    basis = [np.eye(n, dtype=np.int64)[i] - np.eye(n, dtype=np.int64)[n - 1] for i in range(n - 1)]
    if n % p == 0:
        basis = basis[:-1]
    ones = np.ones(n, dtype=np.int64)
    span = basis + ([ones] if n % p == 0 else [])
    M = np.array(span).T % p

    def coords(v):
        # solve M c = v over F_p by brute force (tiny)
        for c in itertools.product(range(p), repeat=len(span)):
            if np.array_equal(M @ np.array(c) % p, v % p):
                return list(c[: len(basis)])
        raise AssertionError("vector outside U")

    cols = [coords(b[np.argsort(g)]) for b in basis]
    return np.array(cols, dtype=np.int64).T % p


@pytest.mark.parametrize("n, p", [(4, 2), (5, 2), (5, 3), (5, 5), (6, 3), (4, 3)])
def test_fully_deleted_matrix_against_oracle(n, p):
    gens = [P.from_cycles(n, (0, 1)), P.from_cycles(n, tuple(range(n))), P.from_cycles(n, (0, 2, 1))]
    for g in gens:
        assert np.array_equal(ml.fully_deleted_matrix(n, p, g), quotient_oracle_matrix(n, p, g))


def test_fully_deleted_is_a_representation():
    n, p = 6, 3
    g, h = P.from_cycles(n, (0, 1, 4)), P.from_cycles(n, (1, 2, 3, 5))
    A, B = ml.fully_deleted_matrix(n, p, g), ml.fully_deleted_matrix(n, p, h)
    AB = ml.fully_deleted_matrix(n, p, P.mul(g, h))
    # g acts first, so its matrix is applied first
    assert np.array_equal(AB, B @ A % p)


def test_is_cyclic_examples():
    simple = ml.fully_deleted_module(3, 2)
    assert ml.is_cyclic_module(simple, simple.actors) == (1, 0)
    assert ml.is_cyclic_module(ml.trivial_module(3, 2), ml.trivial_module(3, 2).actors) is None
    V = ml.fully_deleted_module(5, 2)
    S4 = [P.from_cycles(5, (0, 1)), P.from_cycles(5, (0, 1, 2, 3))]
    v = ml.is_cyclic_module(V, [ml.fully_deleted_matrix(5, 2, g) for g in S4])
    assert v is not None and V.generated([v], [ml.fully_deleted_matrix(5, 2, g) for g in S4]).dim == V.dim


def test_is_cyclic_is_exhaustive_and_lowest():
    V = ml.fully_deleted_module(5, 3)
    acts = [ml.fully_deleted_matrix(5, 3, P.from_cycles(5, (0, 1)))]
    v = ml.is_cyclic_module(V, acts)
    generating = [w for w in V.vectors() if any(w) and V.generated([w], acts).dim == V.dim]
    assert (v is None) == (not generating)
    if v is not None:
        assert v == generating[0]


@pytest.mark.parametrize(
    "n, names",
    [
        (5, ["A5", "S4", "S3xS2", "AGL1(5)"]),
        (6, ["A6", "S5", "PGL2(5)", "S4xS2", "S3wrS2", "S2wrS3"]),
        (7, ["A7", "S6", "S5xS2", "S4xS3", "AGL1(7)"]),
    ],
)
def test_catalogue(n, names):
    cat = ml.sn_maximal_catalogue(n)
    assert [name for name, _ in cat] == names
    S = symmetric_group(n)
    for _, gens in cat:
        assert PermGroup(n, gens).is_subgroup_of(S)


def test_catalogue_s6_has_two_s5_classes():
    cat = dict(ml.sn_maximal_catalogue(6))
    natural, exotic = PermGroup(6, cat["S5"]), PermGroup(6, cat["PGL2(5)"])
    assert natural.order == exotic.order == 120
    assert not natural.is_transitive() and exotic.is_transitive()


def test_catalogue_s8_loads():
    assert len(ml.sn_maximal_catalogue(8)) == 7


def test_fully_deleted_modules_satisfy_bound():
    for n in (3, 4, 5, 6, 7):
        for p in (2, 3, 5):
            if p ** ml.fully_deleted_dim(n, p) > ml.VECTOR_CAP:
                continue
            assert ml.check_maximal_count_bound(ml.fully_deleted_module(n, p)).satisfied
