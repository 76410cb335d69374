"""Permutations as numpy image arrays.

``g[i]`` is the image of point i.  Products compose left to right:
``mul(g, h)`` applies g first, then h, i.e. ``h[g]``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from ..errors import DegreeMismatch, NotAPermutation

DTYPE = np.int32


def perm(images: Iterable[int]) -> np.ndarray:
    """Validated read-only permutation from an image sequence."""
    g = np.asarray(list(images) if not isinstance(images, np.ndarray) else images, dtype=DTYPE)
    if g.ndim != 1:
        raise NotAPermutation("a permutation is a one-dimensional image sequence")
    n = g.size
    seen = np.zeros(n, dtype=bool)
    if n and (g.min() < 0 or g.max() >= n):
        raise NotAPermutation(f"images out of range 0..{n - 1}")
    seen[g] = True
    if not seen.all():
        raise NotAPermutation("images are not a bijection")
    g = g.copy()
    g.flags.writeable = False
    return g


def identity(n: int) -> np.ndarray:
    g = np.arange(n, dtype=DTYPE)
    g.flags.writeable = False
    return g


def mul(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    if g.size != h.size:
        raise DegreeMismatch(f"degrees {g.size} and {h.size}")
    return h[g]


def inverse(g: np.ndarray) -> np.ndarray:
    out = np.empty_like(g)
    out[g] = np.arange(g.size, dtype=g.dtype)
    return out


def power(g: np.ndarray, e: int) -> np.ndarray:
    if e < 0:
        g, e = inverse(g), -e
    result = np.arange(g.size, dtype=g.dtype)
    base = g
    while e:
        if e & 1:
            result = base[result]
        base = base[base]
        e >>= 1
    return result


def conjugate(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    """h^-1 g h."""
    return h[g[inverse(h)]]


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a^-1 b^-1 a b."""
    ai, bi = inverse(a), inverse(b)
    return b[a[bi[ai]]]


def is_identity(g: np.ndarray) -> bool:
    return bool(np.array_equal(g, np.arange(g.size)))


def cycles(g: np.ndarray) -> list:
    seen = np.zeros(g.size, dtype=bool)
    out = []
    for i in range(g.size):
        if seen[i] or g[i] == i:
            continue
        c = [i]
        seen[i] = True
        j = int(g[i])
        while j != i:
            c.append(j)
            seen[j] = True
            j = int(g[j])
        out.append(tuple(c))
    return out


def order(g: np.ndarray) -> int:
    out = 1
    for c in cycles(g):
        out = np.lcm(out, len(c))
    return int(out)


def from_cycles(n: int, *cycs: Sequence[int]) -> np.ndarray:
    g = list(range(n))
    for c in cycs:
        for a, b in zip(c, tuple(c[1:]) + (c[0],)):
            g[a] = b
    return perm(g)


def format_images(g: np.ndarray) -> str:
    """One-line serialization: 0-based images, comma separated."""
    return ",".join(str(int(x)) for x in g)


def parse_images(text: str) -> np.ndarray:
    text = text.strip()
    if not text:
        return perm([])
    return perm(int(t) for t in text.split(","))


def format_cycles(g: np.ndarray) -> str:
    cs = cycles(g)
    return "".join("(" + " ".join(map(str, c)) + ")" for c in cs) or "()"
