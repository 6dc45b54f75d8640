"""Character tables by the Burnside-Dixon class-matrix method.

The central characters of the class algebra are the common eigenvectors of
the class multiplication matrices.  We split eigenspaces over a prime field
F_p with p = 1 (mod exponent) and p > 2 sqrt(|G|), recover each degree from
the orthogonality relation, and lift every value to an exact sum of roots
of unity by a discrete Fourier sum over the power maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Optional, Sequence

import numpy as np
from mpmath.ctx_mp import MPContext

from .cyclotomic import Cyclotomic, euler_phi, reduction_table
from .groups import ConjugacyData, FiniteGroup, conjugacy_classes, exponent
from .modular import (
    GramResult,
    charpoly_mod,
    coordinate_tensor,
    gram_from_tensor,
    eigenvectors_distinct,
    gram_raw,
    inv_mod,
    matmul_mod,
    nullspace_mod,
    primes_congruent_one,
    primitive_root_of_unity,
    roots_mod,
    solve_mod,
)


class TableValidationError(ValueError):
    """A character table violates one of the defining identities."""


class SplittingError(RuntimeError):
    """The modular eigenspace splitting did not reach one-dimensional spaces."""


@dataclass(frozen=True, eq=False)
class CharacterTable:
    order: int
    class_sizes: tuple[int, ...]
    class_orders: tuple[int, ...]
    degrees: tuple[int, ...]
    values: tuple[tuple[Cyclotomic, ...], ...]
    label: str = ""
    # power_maps[c][j] = class of g_c ** j for 0 <= j < exponent, when known
    power_maps: Optional[tuple[tuple[int, ...], ...]] = None
    group: Optional[FiniteGroup] = None
    classes: Optional[ConjugacyData] = None
    prime: Optional[int] = None

    @property
    def class_count(self) -> int:
        return len(self.class_sizes)

    @property
    def linear_count(self) -> int:
        return sum(1 for d in self.degrees if d == 1)

    @cached_property
    def center_classes(self) -> tuple[int, ...]:
        return tuple(c for c, s in enumerate(self.class_sizes) if s == 1)

    @property
    def center_order(self) -> int:
        return len(self.center_classes)

    @property
    def derived_order(self) -> int:
        return self.order // self.linear_count

    @property
    def is_abelian(self) -> bool:
        return self.class_count == self.order

    @cached_property
    def conductor(self) -> int:
        return math.lcm(*(z.conductor for row in self.values for z in row))

    @property
    def cd_set(self) -> frozenset[int]:
        return frozenset(self.degrees)

    @property
    def cc_set(self) -> frozenset[int]:
        return frozenset(self.class_sizes)

    def column(self, c: int) -> tuple[Cyclotomic, ...]:
        return tuple(row[c] for row in self.values)

    @cached_property
    def value_tensor(self) -> tuple[np.ndarray, int]:
        """values[a][c] == T[a, c, :] / D as power-basis numerators over the conductor."""
        return coordinate_tensor(self.values, self.conductor)

    @cached_property
    def galois_action(self) -> Optional["GaloisAction"]:
        """How Gal(Q(zeta_n)/Q) permutes characters and classes, or None if it does not."""
        return galois_action(self)


@dataclass(frozen=True)
class GaloisAction:
    """u -> permutation, for every unit u mod the conductor.

    galois_u(values[a][c]) == values[characters[u][a]][c]
                          == values[a][classes[u][c]]
    """

    conductor: int
    characters: dict[int, tuple[int, ...]]
    classes: dict[int, tuple[int, ...]]


def _unit_generators(n: int) -> list[int]:
    units = {a for a in range(1, n + 1) if math.gcd(a, n) == 1} if n > 1 else {1}
    reached = {1 % n if n > 1 else 1}
    gens: list[int] = []
    for a in sorted(units):
        if a in reached:
            continue
        gens.append(a)
        frontier = list(reached)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = x * g % n
                    if y not in reached:
                        reached.add(y)
                        nxt.append(y)
            frontier = nxt
    return gens


def galois_action(t: CharacterTable) -> Optional[GaloisAction]:
    """Permutations for each unit, or None when the values are not Galois-stable.

    Each generator is applied to the power-basis tensor exactly (scatter
    the exponents, reduce mod Phi_n) and the result is matched row by row
    and column by column, so the returned action is checked, not assumed.
    """
    n = t.conductor
    k = t.class_count
    tensor, _ = t.value_tensor
    if tensor.dtype != np.int64:
        return None
    phi = tensor.shape[2]
    red = _reduction_matrix(n)
    if int(np.abs(tensor).max(initial=0)) * phi * int(np.abs(red).max(initial=1)) >= 2**52:
        return None
    row_index = {tensor[a].tobytes(): a for a in range(k)}
    cols = np.ascontiguousarray(tensor.transpose(1, 0, 2))
    col_index = {cols[c].tobytes(): c for c in range(k)}
    if len(row_index) != k or len(col_index) != k:
        return None
    flat = tensor.reshape(k * k, phi).astype(np.float64)
    gen_rows: dict[int, tuple[int, ...]] = {}
    gen_cols: dict[int, tuple[int, ...]] = {}
    for g in _unit_generators(n):
        # zeta^i -> zeta^(i g), then back to the power basis
        conj = np.rint(flat @ red[[(i * g) % n for i in range(phi)]]).astype(np.int64).reshape(k, k, phi)
        rp = [row_index.get(conj[a].tobytes()) for a in range(k)]
        ct = np.ascontiguousarray(conj.transpose(1, 0, 2))
        cp = [col_index.get(ct[c].tobytes()) for c in range(k)]
        if None in rp or None in cp:
            return None
        gen_rows[g] = tuple(rp)
        gen_cols[g] = tuple(cp)
    one = 1 % n if n > 1 else 1
    ident = tuple(range(k))
    chars = {one: ident}
    cls = {one: ident}
    frontier = [one]
    # galois_{ug} = galois_g o galois_u
    while frontier:
        nxt = []
        for u in frontier:
            for g in gen_rows:
                v = u * g % n
                if v not in chars:
                    chars[v] = tuple(gen_rows[g][i] for i in chars[u])
                    cls[v] = tuple(gen_cols[g][cls[u][c]] for c in range(k))
                    nxt.append(v)
        frontier = nxt
    # units are reported in 1..n to match the evaluation nodes
    return GaloisAction(n, {(u or n): p for u, p in chars.items()}, {(u or n): p for u, p in cls.items()})


# ---------------------------------------------------------------------------
# class algebra
# ---------------------------------------------------------------------------


def class_constants(g: FiniteGroup, cd: Optional[ConjugacyData] = None) -> np.ndarray:
    """a[i, j, k] = #{(x, y) in C_i x C_j : x y = z} for the representative z of C_k."""
    cd = cd or conjugacy_classes(g)
    k = cd.class_count
    cls = cd.class_of
    inv = g.inverse
    a = np.zeros((k, k, k), dtype=np.int64)
    xs = np.arange(g.order)
    for kk, z in enumerate(cd.representatives):
        ys = g.mul[inv[xs], z]  # y = x^-1 z
        np.add.at(a[:, :, kk], (cls[xs], cls[ys]), 1)
    return a


def dixon_prime(order: int, exp: int) -> int:
    """Smallest prime p = 1 (mod exp) with p > 2 sqrt(order)."""
    return primes_congruent_one(exp, 2 * math.isqrt(order) + 1 if order > 1 else 1)[0]


def _split_common_eigenspaces(mats: Sequence[np.ndarray], k: int, p: int) -> list[np.ndarray]:
    spaces = [np.eye(k, dtype=np.int64)]
    for m in mats:
        if all(s.shape[1] == 1 for s in spaces):
            break
        nxt = []
        for b in spaces:
            dim = b.shape[1]
            if dim == 1:
                nxt.append(b)
                continue
            mb = matmul_mod(m, b, p)
            r = solve_mod(b, mb, p)  # m b = b r
            poly = charpoly_mod(r, p)
            lams = roots_mod(poly, p)
            vecs = eigenvectors_distinct(r, poly, lams, p)
            if vecs is not None:
                pieces = [matmul_mod(b, vecs[:, i:i + 1], p) for i in range(dim)]
            else:
                pieces = []
                for lam in lams:
                    ns = nullspace_mod((r - lam * np.eye(dim, dtype=np.int64)) % p, p)
                    pieces.append(matmul_mod(b, ns, p))
            if sum(x.shape[1] for x in pieces) != dim:
                raise SplittingError("class matrix is not diagonalisable over the chosen prime field")
            nxt.extend(pieces)
        spaces = nxt
    if any(s.shape[1] != 1 for s in spaces):
        raise SplittingError("common eigenspaces of the class matrices are not one-dimensional")
    return spaces


_EMBED_CTX = MPContext()
_EMBED_CTX.dps = 50


def _embedding_key(z: Cyclotomic, cache: dict) -> tuple[int, int]:
    rep = (z.conductor, z.numerators, z.denominator)
    key = cache.get(rep)
    if key is None:
        ctx = _EMBED_CTX
        n = z.conductor
        re = im = ctx.mpf(0)
        for j, c in z.coeffs.items():
            t = 2 * ctx.pi * j / n
            re += ctx.mpf(c.numerator) / c.denominator * ctx.cos(t)
            im += ctx.mpf(c.numerator) / c.denominator * ctx.sin(t)
        scale = ctx.mpf(10) ** 40
        key = (-int(ctx.nint(re * scale)), -int(ctx.nint(im * scale)))
        cache[rep] = key
    return key


@lru_cache(maxsize=64)
def _reduction_matrix(n: int) -> np.ndarray:
    """R[j, i] = i-th power-basis coordinate of zeta_n^j."""
    r = np.zeros((n, euler_phi(n)), dtype=np.float64)
    for j, row in enumerate(reduction_table(n)):
        for i, c in row:
            r[j, i] = c
    return r


@lru_cache(maxsize=256)
def _fourier_matrix(w: int, o: int, p: int) -> np.ndarray:
    """F[l, i] = w^(-i l) for w of order o in F_p."""
    powers = [1] * o
    winv = pow(w, -1, p)
    for i in range(1, o):
        powers[i] = powers[i - 1] * winv % p
    idx = np.outer(np.arange(o), np.arange(o)) % o
    return np.array(powers, dtype=np.int64)[idx]


def character_table(g: FiniteGroup, cd: Optional[ConjugacyData] = None, verify: bool = True) -> CharacterTable:
    cd = cd or conjugacy_classes(g)
    n = g.order
    k = cd.class_count
    e = exponent(g)
    p = dixon_prime(n, e)
    a = class_constants(g, cd)
    sizes = cd.sizes

    mats = [a[r] for r in range(1, k)]
    spaces = _split_common_eigenspaces(mats, k, p)

    inv_sizes = [inv_mod(s, p) for s in sizes]
    rows_modp = []
    degrees = []
    for s in spaces:
        v = s[:, 0] % p
        v = v * inv_mod(v[0], p) % p
        # sum_t |C_t| chi_t conj(chi_t) = |G| with chi_t = d v_t / |C_t|
        acc = 0
        for t in range(k):
            acc = (acc + int(v[t]) * int(v[cd.inverse_class[t]]) * inv_sizes[t]) % p
        d2 = n * inv_mod(acc, p) % p
        d = next((x for x in range(1, math.isqrt(n) + 1) if x * x % p == d2), None)
        if d is None:
            raise SplittingError("no integer degree matches the modular norm")
        degrees.append(d)
        rows_modp.append([d * int(v[t]) * inv_sizes[t] % p for t in range(k)])
    x_modp = np.array(rows_modp, dtype=np.int64)

    w = primitive_root_of_unity(e, p)
    mult = np.zeros((k, k, e), dtype=np.int64)
    for t in range(k):
        o = cd.rep_orders[t]
        step = e // o
        wo = pow(w, step, p)
        cols = [cd.power_map[t][l] for l in range(o)]
        y = x_modp[:, cols]
        four = _fourier_matrix(wo, o, p)
        m = matmul_mod(y, four, p) * inv_mod(o, p) % p
        for chi in range(k):
            if m[chi].max() > degrees[chi]:
                raise SplittingError("root-of-unity multiplicities out of range")
        mult[:, t, ::step] = m

    # sum_j mult[j] zeta^j in the power basis, all entries at once (exact in float64)
    red = _reduction_matrix(e)
    coords = np.rint(mult.reshape(k * k, e).astype(np.float64) @ red).astype(np.int64).reshape(k, k, -1)
    rows = coords.tolist()
    values = [tuple(Cyclotomic(e, rows[chi][t]) for t in range(k)) for chi in range(k)]
    order = sort_characters(degrees, values)
    table = CharacterTable(
        order=n,
        class_sizes=tuple(sizes),
        class_orders=tuple(cd.rep_orders),
        degrees=tuple(degrees[i] for i in order),
        values=tuple(values[i] for i in order),
        label=g.label,
        power_maps=cd.power_map,
        group=g,
        classes=cd,
        prime=p,
    )
    # every value was built over conductor e, so the coordinates are already at hand
    table.__dict__["value_tensor"] = (np.ascontiguousarray(coords[order]), 1)
    if verify:
        verify_table(table)
    return table


def sort_characters(degrees: Sequence[int], values: Sequence[Sequence[Cyclotomic]]) -> list[int]:
    """Canonical character order: degree, then the embedding key of the value row."""
    cache: dict = {}
    return sorted(
        range(len(degrees)),
        key=lambda i: (degrees[i], tuple(_embedding_key(z, cache) for z in values[i])),
    )


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def verify_table(t: CharacterTable) -> None:
    """Check every defining identity exactly; raise naming the first failure."""
    k = t.class_count
    if len(t.values) != k or any(len(r) != k for r in t.values) or len(t.degrees) != k:
        raise TableValidationError("table is not square in the class count")
    if sum(t.class_sizes) != t.order:
        raise TableValidationError("class sizes do not sum to the group order")
    if t.class_sizes[0] != 1:
        raise TableValidationError("class 0 is not the identity class")
    if sum(d * d for d in t.degrees) != t.order:
        raise TableValidationError("sum of squared degrees differs from the group order")
    for i, (d, row) in enumerate(zip(t.degrees, t.values)):
        if row[0] != d:
            raise TableValidationError(f"character {i}: value at the identity differs from its degree")
    if any(z != 1 for z in t.values[0]):
        raise TableValidationError("character 0 is not the trivial character")
    tensor, den = t.value_tensor
    n = t.conductor
    # the Galois action is verified exactly when it is built, so it is safe to use here
    act = t.galois_action
    rows = gram_from_tensor(tensor, den, t.class_sizes, n, act and act.characters)
    want = np.diag([t.order * rows.scale] * k).astype(object)
    bad = _gram_mismatch(rows, want)
    if bad is not None:
        raise TableValidationError(f"row orthogonality fails for characters {bad}")
    cols = gram_from_tensor(tensor.transpose(1, 0, 2), den, [1] * k, n, act and act.classes)
    want = np.zeros((k, k), dtype=object)
    for i, size in enumerate(t.class_sizes):
        q = Fraction(t.order * cols.scale, size)
        # a non-integral target can never match an integer numerator
        want[i, i] = q.numerator if q.denominator == 1 else None
    bad = _gram_mismatch(cols, want)
    if bad is not None:
        raise TableValidationError(f"column orthogonality fails for classes {bad}")


def _gram_mismatch(g: GramResult, want: np.ndarray) -> Optional[tuple[int, int]]:
    """First (i, j) whose Gram sum differs from want[i, j] / scale, if any."""
    ok = g.rational_mask() & (g.rational_numerators().astype(object) == want)
    if ok.all():
        return None
    i, j = np.argwhere(~ok)[0]
    return (int(i), int(j))


# ---------------------------------------------------------------------------
# restriction to the centre
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CenterDecomposition:
    blocks: tuple[tuple[int, ...], ...]
    block_of: tuple[int, ...]
    center_classes: tuple[int, ...]
    # restrictions[i][z] = phi_i at the z-th central class
    restrictions: tuple[tuple[Cyclotomic, ...], ...]


def center_decomposition(t: CharacterTable) -> CenterDecomposition:
    zc = t.center_classes
    keys: list[tuple[Cyclotomic, ...]] = []
    members: list[list[int]] = []
    block_of = []
    for chi, (d, row) in enumerate(zip(t.degrees, t.values)):
        key = tuple(row[c] / d for c in zc)
        for b, kk in enumerate(keys):
            if kk == key:
                break
        else:
            b = len(keys)
            keys.append(key)
            members.append([])
        members[b].append(chi)
        block_of.append(b)
    # block 0 is the trivial character's block, which is found first
    return CenterDecomposition(
        blocks=tuple(tuple(m) for m in members),
        block_of=tuple(block_of),
        center_classes=zc,
        restrictions=tuple(keys),
    )
