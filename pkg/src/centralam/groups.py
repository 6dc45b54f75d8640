"""Finite groups as explicit multiplication tables.

Elements are the integers 0..order-1 with 0 the identity.  Every
constructor goes through :func:`closure`, which enumerates the group
breadth-first from its generators (right multiplication, generators in
listed order), so numbering is deterministic for a given generator list.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Callable, Hashable, Sequence

import numpy as np

DEFAULT_MAX_ORDER = 2000


class GroupSpecError(ValueError):
    """A group-spec string or group file could not be understood."""


class OrderTooLarge(GroupSpecError):
    pass


class NotNormalError(ValueError):
    """A subgroup handed to :func:`quotient` is not normal."""


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    mul: np.ndarray
    label: str = ""
    generators: tuple[int, ...] = ()

    @property
    def order(self) -> int:
        return self.mul.shape[0]

    identity_index = 0

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.empty(self.order, dtype=np.int64)
        rows, cols = np.nonzero(self.mul == 0)
        inv[rows] = cols
        return inv

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        cur = np.arange(n)
        k = 1
        while (orders == 0).any():
            hit = (cur == 0) & (orders == 0)
            orders[hit] = k
            cur = self.mul[cur, np.arange(n)]
            k += 1
        return orders

    @cached_property
    def is_abelian(self) -> bool:
        return bool((self.mul == self.mul.T).all())

    def power(self, x: int, j: int) -> int:
        j %= int(self.element_orders[x])
        out, base = 0, x
        while j:
            if j & 1:
                out = int(self.mul[out, base])
            base = int(self.mul[base, base])
            j >>= 1
        return out

    def check(self) -> None:
        """Verify the group axioms exhaustively; raises GroupSpecError."""
        n = self.order
        m = self.mul
        if m.shape != (n, n):
            raise GroupSpecError("multiplication table is not square")
        ar = np.arange(n)
        if not (m[0] == ar).all() or not (m[:, 0] == ar).all():
            raise GroupSpecError("element 0 is not the identity")
        for row in m:
            if len(set(row.tolist())) != n:
                raise GroupSpecError("table is not a Latin square")
        # associativity: (xy)z == x(yz) for all triples, row block at a time
        for x in range(n):
            if not (m[m[x]] == m[x][m]).all():
                raise GroupSpecError("multiplication is not associative")
        inv = self.inverse
        if not (inv[inv] == ar).all() or not (m[ar, inv] == 0).all():
            raise GroupSpecError("inverse map is inconsistent")


# ---------------------------------------------------------------------------
# closure
# ---------------------------------------------------------------------------


def closure(
    gens: Sequence[Hashable],
    multiply: Callable[[Hashable, Hashable], Hashable],
    identity: Hashable,
    label: str = "",
    max_order: int = DEFAULT_MAX_ORDER,
) -> FiniteGroup:
    """Enumerate the group generated by ``gens`` and tabulate it."""
    elems = [identity]
    index = {identity: 0}
    # parent[j] = (i, s): elems[j] = elems[i] * gens[s]
    parent: list[tuple[int, int]] = [(-1, -1)]
    right = [[0] * 0 for _ in gens]
    i = 0
    while i < len(elems):
        x = elems[i]
        for s, g in enumerate(gens):
            y = multiply(x, g)
            j = index.get(y)
            if j is None:
                j = len(elems)
                if j >= max_order:
                    raise OrderTooLarge(f"group order exceeds the maximum {max_order}")
                index[y] = j
                elems.append(y)
                parent.append((i, s))
            right[s].append(j)
        i += 1
    n = len(elems)
    right_tab = np.array(right, dtype=np.int64).reshape(len(gens), n) if gens else np.zeros((0, 1), dtype=np.int64)
    mul = np.empty((n, n), dtype=np.int64)
    mul[:, 0] = np.arange(n)
    for j in range(1, n):
        pi, s = parent[j]
        # x * (y g) = (x y) g
        mul[:, j] = right_tab[s][mul[:, pi]]
    gen_idx = tuple(index[g] for g in gens)
    return FiniteGroup(mul=mul, label=label, generators=gen_idx)


def _perm_mul(p: tuple, q: tuple) -> tuple:
    # apply p first, then q
    return tuple(q[i] for i in p)


def perm_group(gens: Sequence[Sequence[int]], label: str = "", max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    if not gens:
        return closure([], _perm_mul, (0,), label, max_order)
    degree = len(gens[0])
    ps = []
    for g in gens:
        t = tuple(int(v) for v in g)
        if len(t) != degree or sorted(t) != list(range(degree)):
            raise GroupSpecError(f"generator {list(g)} is not a permutation of 0..{degree - 1}")
        ps.append(t)
    return closure(ps, _perm_mul, tuple(range(degree)), label, max_order)


def from_table(table: Sequence[Sequence[int]], label: str = "") -> FiniteGroup:
    """Wrap a Cayley table, relabelling so that the identity is element 0."""
    m = np.array(table, dtype=np.int64)
    n = m.shape[0]
    if m.ndim != 2 or m.shape != (n, n) or n == 0:
        raise GroupSpecError("Cayley table must be a non-empty square array")
    if m.min() < 0 or m.max() >= n:
        raise GroupSpecError("Cayley table entries out of range")
    ar = np.arange(n)
    ids = [e for e in range(n) if (m[e] == ar).all() and (m[:, e] == ar).all()]
    if len(ids) != 1:
        raise GroupSpecError("Cayley table has no two-sided identity")
    e = ids[0]
    if e != 0:
        perm = ar.copy()
        perm[[0, e]] = perm[[e, 0]]
        # perm is an involution: relabel entries and positions
        m = perm[m[np.ix_(perm, perm)]]
    g = FiniteGroup(mul=m, label=label, generators=tuple(range(1, n)) if n > 1 else ())
    g.check()
    return g


# ---------------------------------------------------------------------------
# named families
# ---------------------------------------------------------------------------


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def cyclic(n: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    if n < 1:
        raise GroupSpecError("cyclic order must be positive")
    return closure([1 % n], lambda a, b: (a + b) % n, 0, f"cyclic:{n}", max_order)


def dihedral(n: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Dihedral group of ORDER n (n even); pairs (rotation, flip)."""
    if n < 2 or n % 2:
        raise GroupSpecError("dihedral:N needs an even order N >= 2")
    m = n // 2

    def mul(x, y):
        (a, s), (b, t) = x, y
        return ((a + (-b if s else b)) % m, s ^ t)

    return closure([(1 % m, 0), (0, 1)], mul, (0, 0), f"dihedral:{n}", max_order)


def quaternion(n: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Dicyclic (generalised quaternion when n is a power of 2) group of order n."""
    if n < 8 or n % 4:
        raise GroupSpecError("quaternion:N needs N divisible by 4 and N >= 8")
    m = n // 4
    two_m = 2 * m

    def mul(x, y):
        (a, s), (b, t) = x, y
        if not s:
            return ((a + b) % two_m, t)
        if not t:
            return ((a - b) % two_m, 1)
        return ((a - b + m) % two_m, 0)

    return closure([(1, 0), (0, 1)], mul, (0, 0), f"quaternion:{n}", max_order)


def symmetric(n: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    if n < 1:
        raise GroupSpecError("sym:N needs N >= 1")
    if n == 1:
        return closure([], _perm_mul, (0,), "sym:1", max_order)
    transposition = (1, 0) + tuple(range(2, n))
    cycle = tuple(range(1, n)) + (0,)
    return perm_group([cycle, transposition] if n > 2 else [transposition], f"sym:{n}", max_order)


def alternating(n: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    if n < 1:
        raise GroupSpecError("alt:N needs N >= 1")
    if n < 3:
        return closure([], _perm_mul, (0,), f"alt:{n}", max_order)
    gens = []
    for i in range(2, n):
        p = list(range(n))
        p[0], p[1], p[i] = 1, i, 0
        gens.append(tuple(p))
    return perm_group(gens, f"alt:{n}", max_order)


def heisenberg(p: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Upper unitriangular 3x3 matrices over F_p, p an odd prime."""
    if not _is_prime(p) or p == 2:
        raise GroupSpecError(f"heisenberg:P needs an odd prime, got {p}")

    def mul(x, y):
        a, b, c = x
        d, e, f = y
        return ((a + d) % p, (b + e) % p, (c + f + a * e) % p)

    return closure([(1, 0, 0), (0, 1, 0)], mul, (0, 0, 0), f"heisenberg:{p}", max_order)


def affine(p: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Aff(F_p): maps x -> a x + b, composed left to right."""
    if not _is_prime(p):
        raise GroupSpecError(f"aff:P needs a prime, got {p}")
    prim = next(g for g in range(1, p) if p == 2 or all(pow(g, (p - 1) // q, p) != 1 for q in _prime_factors(p - 1)))

    def mul(x, y):
        (a, b), (c, d) = x, y
        return (a * c % p, (c * b + d) % p)

    return closure([(1, 1), (prim, 0)], mul, (1, 0), f"aff:{p}", max_order)


def sl2(p: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """SL(2, F_p) acting on the nonzero vectors of F_p^2."""
    if not _is_prime(p):
        raise GroupSpecError(f"sl2:P needs a prime, got {p}")
    if p * (p * p - 1) > max_order:
        raise OrderTooLarge(f"group order exceeds the maximum {max_order}")
    vectors = [(x, y) for x in range(p) for y in range(p) if (x, y) != (0, 0)]
    pos = {v: i for i, v in enumerate(vectors)}

    def action(a, b, c, d):
        return tuple(pos[((a * x + b * y) % p, (c * x + d * y) % p)] for x, y in vectors)

    gens = [action(1, 1, 0, 1), action(0, p - 1, 1, 0)]
    return perm_group(gens, f"sl2:{p}", max_order)


def direct_product(a: FiniteGroup, b: FiniteGroup, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    if a.order * b.order > max_order:
        raise OrderTooLarge(f"group order exceeds the maximum {max_order}")

    def mul(x, y):
        return (int(a.mul[x[0], y[0]]), int(b.mul[x[1], y[1]]))

    gens = [(g, 0) for g in a.generators] + [(0, h) for h in b.generators]
    return closure(gens, mul, (0, 0), f"direct({a.label},{b.label})", max_order)


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


_FAMILIES: dict[str, Callable[..., FiniteGroup]] = {
    "cyclic": cyclic,
    "dihedral": dihedral,
    "sym": symmetric,
    "alt": alternating,
    "quaternion": quaternion,
    "heisenberg": heisenberg,
    "aff": affine,
    "sl2": sl2,
}


def _split_args(body: str) -> list[str]:
    depth, start, parts = 0, 0, []
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise GroupSpecError(f"unbalanced parentheses in {body!r}")
        elif ch == "," and depth == 0:
            parts.append(body[start:i].strip())
            start = i + 1
    if depth:
        raise GroupSpecError(f"unbalanced parentheses in {body!r}")
    parts.append(body[start:].strip())
    return parts


def make_group(spec: str, max_order: int = DEFAULT_MAX_ORDER, search_paths: Sequence[str] = ()) -> FiniteGroup:
    """Build a group from a spec such as ``dihedral:16`` or ``direct(cyclic:2,sym:3)``."""
    spec = spec.strip()
    if spec.startswith("direct(") and spec.endswith(")"):
        parts = _split_args(spec[len("direct("):-1])
        if len(parts) != 2:
            raise GroupSpecError(f"direct(...) takes two arguments: {spec!r}")
        a = make_group(parts[0], max_order, search_paths)
        b = make_group(parts[1], max_order, search_paths)
        return direct_product(a, b, max_order)
    m = re.fullmatch(r"([a-z0-9]+):(.+)", spec)
    if not m:
        raise GroupSpecError(f"malformed group spec {spec!r}")
    kind, arg = m.groups()
    if kind in ("perm", "cayley"):
        from . import catalog_io

        path = catalog_io.resolve_fixture(arg, search_paths)
        if kind == "perm":
            return catalog_io.load_perm_group(path, max_order=max_order)
        return catalog_io.load_cayley(path)
    if kind == "ctbl":
        raise GroupSpecError("ctbl:PATH names a character table, not a group")
    if kind not in _FAMILIES:
        raise GroupSpecError(f"unknown group family {kind!r}")
    if not re.fullmatch(r"\d+", arg):
        raise GroupSpecError(f"parameter of {kind} must be a positive integer, got {arg!r}")
    return _FAMILIES[kind](int(arg), max_order=max_order)


# ---------------------------------------------------------------------------
# structure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConjugacyData:
    class_count: int
    class_of: np.ndarray
    representatives: tuple[int, ...]
    sizes: tuple[int, ...]
    members: tuple[tuple[int, ...], ...]
    rep_orders: tuple[int, ...]
    # power_map[c][j] = class of rep_c ** j, for 0 <= j < exponent
    power_map: tuple[tuple[int, ...], ...]
    inverse_class: tuple[int, ...]

    def power(self, c: int, j: int) -> int:
        row = self.power_map[c]
        return row[j % len(row)]


def exponent(g: FiniteGroup) -> int:
    return reduce(math.lcm, (int(o) for o in g.element_orders), 1)


def conjugacy_classes(g: FiniteGroup) -> ConjugacyData:
    n = g.order
    m = g.mul
    inv = g.inverse
    seen = np.full(n, -1, dtype=np.int64)
    orbits = []
    for x in range(n):
        if seen[x] >= 0:
            continue
        orbit = np.unique(m[m[:, x], inv])
        seen[orbit] = len(orbits)
        orbits.append(orbit)
    # canonical order: size, then smallest member
    orbits.sort(key=lambda o: (len(o), int(o[0])))
    class_of = np.empty(n, dtype=np.int64)
    for c, o in enumerate(orbits):
        class_of[o] = c
    reps = tuple(int(o[0]) for o in orbits)
    e = exponent(g)
    power_map = []
    for r in reps:
        row, cur = [], 0
        for _ in range(e):
            row.append(int(class_of[cur]))
            cur = int(m[cur, r])
        power_map.append(tuple(row))
    return ConjugacyData(
        class_count=len(orbits),
        class_of=class_of,
        representatives=reps,
        sizes=tuple(len(o) for o in orbits),
        members=tuple(tuple(int(v) for v in o) for o in orbits),
        rep_orders=tuple(int(g.element_orders[r]) for r in reps),
        power_map=tuple(power_map),
        inverse_class=tuple(int(class_of[inv[r]]) for r in reps),
    )


def center(g: FiniteGroup) -> frozenset[int]:
    m = g.mul
    return frozenset(int(x) for x in np.nonzero((m == m.T).all(axis=1))[0])


@dataclass(frozen=True, eq=False)
class NormalSubgroup:
    parent: FiniteGroup
    elements: tuple[int, ...]
    generators: tuple[int, ...] = ()

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_normal(self) -> bool:
        g = self.parent
        s = np.array(self.elements)
        mask = np.zeros(g.order, dtype=bool)
        mask[s] = True
        if not mask[0] or not mask[g.inverse[s]].all() or not mask[g.mul[np.ix_(s, s)]].all():
            return False
        conj = g.mul[g.mul[:, s], g.inverse[:, None]]
        return bool(mask[conj].all())


def _subgroup_closure(g: FiniteGroup, seeds: Sequence[int]) -> np.ndarray:
    mask = np.zeros(g.order, dtype=bool)
    mask[0] = True
    mask[list(seeds)] = True
    frontier = np.nonzero(mask)[0]
    gens = frontier.copy()
    while len(frontier):
        new = np.unique(g.mul[np.ix_(frontier, gens)])
        new = new[~mask[new]]
        mask[new] = True
        frontier = new
    return mask


def normal_closure(g: FiniteGroup, gens: Sequence[int]) -> NormalSubgroup:
    gens = [int(x) for x in gens]
    if not gens:
        raise ValueError("normal_closure needs at least one generator")
    if min(gens) < 0 or max(gens) >= g.order:
        raise ValueError("generator index out of range")
    # conjugates of the generators generate the normal closure
    seeds = np.unique(g.mul[g.mul[:, gens], g.inverse[:, None]])
    mask = _subgroup_closure(g, seeds.tolist())
    return NormalSubgroup(parent=g, elements=tuple(int(x) for x in np.nonzero(mask)[0]), generators=tuple(gens))


def derived_subgroup(g: FiniteGroup) -> NormalSubgroup:
    m = g.mul
    inv = g.inverse
    # [x, y] = x^-1 y^-1 x y
    comm = m[m[inv[:, None], inv[None, :]], m]
    seeds = np.unique(comm)
    mask = _subgroup_closure(g, seeds.tolist())
    return NormalSubgroup(parent=g, elements=tuple(int(x) for x in np.nonzero(mask)[0]), generators=())


def quotient(g: FiniteGroup, n: NormalSubgroup) -> FiniteGroup:
    if n.parent is not g and n.parent.order != g.order:
        raise NotNormalError("subgroup belongs to a different group")
    if not n.is_normal():
        raise NotNormalError("subgroup is not normal")
    members = np.array(n.elements)
    coset_of = np.full(g.order, -1, dtype=np.int64)
    reps = []
    for x in range(g.order):
        if coset_of[x] < 0:
            # cosets numbered by smallest member
            coset_of[g.mul[x, members]] = len(reps)
            reps.append(x)
    reps_a = np.array(reps)
    mul = coset_of[g.mul[np.ix_(reps_a, reps_a)]]
    gens = tuple(sorted({int(coset_of[x]) for x in g.generators} - {0}))
    return FiniteGroup(mul=mul, label=f"{g.label}/N{n.order}", generators=gens or tuple(range(1, len(reps))))


def normal_subgroups(g: FiniteGroup) -> list[NormalSubgroup]:
    """All normal subgroups, found as products of normal closures of single elements."""
    cd = conjugacy_classes(g)
    found: dict[bytes, NormalSubgroup] = {}
    base = []
    for r in cd.representatives:
        ns = normal_closure(g, [r])
        key = np.array(ns.elements, dtype=np.int64).tobytes()
        if key not in found:
            found[key] = ns
            base.append(ns)
    frontier = list(found.values())
    while frontier:
        nxt = []
        for a in frontier:
            for b in base:
                mask = _subgroup_closure(g, list(a.elements) + list(b.elements))
                elems = tuple(int(x) for x in np.nonzero(mask)[0])
                key = np.array(elems, dtype=np.int64).tobytes()
                if key not in found:
                    ns = NormalSubgroup(parent=g, elements=elems, generators=())
                    found[key] = ns
                    nxt.append(ns)
        frontier = nxt
    return sorted(found.values(), key=lambda s: (s.order, s.elements))


def is_isomorphic_copy(a: FiniteGroup, b: FiniteGroup) -> bool:
    return a.order == b.order and bool((a.mul == b.mul).all())
