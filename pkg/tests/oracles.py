"""Brute-force reference implementations used only by the tests.

Nothing here imports the engine's algorithms: groups are handled as raw
multiplication tables and characters are computed in floating point.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def classes_brute(mul: np.ndarray) -> list[frozenset[int]]:
    n = mul.shape[0]
    inv = [next(y for y in range(n) if mul[x, y] == 0) for x in range(n)]
    seen: set[int] = set()
    out = []
    for x in range(n):
        if x in seen:
            continue
        orbit = frozenset(int(mul[mul[g, x], inv[g]]) for g in range(n))
        seen |= orbit
        out.append(orbit)
    return out


def center_brute(mul: np.ndarray) -> set[int]:
    n = mul.shape[0]
    return {x for x in range(n) if all(mul[x, y] == mul[y, x] for y in range(n))}


def commutator_subgroup_brute(mul: np.ndarray) -> set[int]:
    n = mul.shape[0]
    inv = [next(y for y in range(n) if mul[x, y] == 0) for x in range(n)]
    gens = {int(mul[mul[x, y], mul[inv[x], inv[y]]]) for x in range(n) for y in range(n)}
    sub = {0} | gens
    while True:
        new = {int(mul[a, b]) for a in sub for b in sub} | sub
        if new == sub:
            return sub
        sub = new


def exponent_brute(mul: np.ndarray) -> int:
    n = mul.shape[0]
    e = 1
    for x in range(n):
        y, o = x, 1
        while y != 0:
            y = int(mul[y, x])
            o += 1
        e = math.lcm(e, o)
    return e


def is_associative(mul: np.ndarray) -> bool:
    n = mul.shape[0]
    idx = np.arange(n)
    for a in range(n):
        # (a b) c == a (b c) for all b, c
        if not np.array_equal(mul[mul[a]][:, idx], mul[a][mul]):
            return False
    return True


def numeric_table(mul: np.ndarray, seed: int = 1) -> tuple[list[int], list[int], np.ndarray]:
    """(class sizes, degrees, values) in complex floating point.

    Burnside's method with real arithmetic: the central characters are the
    eigenvectors of a random combination of the class matrices.
    """
    cls = classes_brute(mul)
    k = len(cls)
    n = mul.shape[0]
    of = np.empty(n, dtype=int)
    for i, c in enumerate(cls):
        for x in c:
            of[x] = i
    reps = [min(c) for c in cls]
    a = np.zeros((k, k, k))
    for t, z in enumerate(reps):
        for x in range(n):
            for y in range(n):
                if mul[x, y] == z:
                    a[of[x], of[y], t] += 1
    rng = np.random.default_rng(seed)
    m = np.tensordot(rng.normal(size=k), a, axes=1)
    _, vecs = np.linalg.eig(m)
    sizes = np.array([len(c) for c in cls], dtype=float)
    rows = []
    degs = []
    for j in range(k):
        v = vecs[:, j] / vecs[0, j]
        d2 = n / np.sum(np.abs(v) ** 2 / sizes)
        d = math.sqrt(d2.real)
        degs.append(round(d))
        rows.append(d * v / sizes)
    return [len(c) for c in cls], degs, np.array(rows)


def amza_float(sizes, degs, values) -> float:
    n = sum(sizes)
    w = np.array(sizes, dtype=float) ** 2
    s = (values * w) @ values.conj().T
    d = np.array(degs, dtype=float)
    return float(np.sum(np.outer(d, d) * np.abs(s)) / n**2)


def amzl_float(sizes, degs, values) -> float:
    n = sum(sizes)
    d2 = np.array(degs, dtype=float) ** 2
    t = (values.T * d2) @ values.conj()
    c = np.array(sizes, dtype=float)
    return float(np.sum(np.outer(c, c) * np.abs(t)) / n**2)


def ass_float(sizes, degs, values) -> float:
    n = sum(sizes)
    w = np.array(sizes, dtype=float) ** 2
    d2 = np.array(degs, dtype=float) ** 2
    return float(np.sum(d2[:, None] * w[None, :] * np.abs(values) ** 2) / n**2)


def perm_group_brute(gens: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """All elements of the permutation group generated by gens."""
    ident = tuple(range(len(gens[0])))
    elems = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(g[i] for i in x)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(elems)


def sl2_order_brute(p: int) -> int:
    return sum(1 for a, b, c, d in itertools.product(range(p), repeat=4) if (a * d - b * c) % p == 1)
