"""Amenability constants of ZA(G), ZL^1(G) and of finite commutative hypergroups.

All inner sums are evaluated exactly in the cyclotomic field.  The ZA(G)
inner sums are rational integers divisible by |Z(G)|, and that is asserted
before any absolute value is taken.  Inner sums that are not rational have
their absolute values enclosed, and a total is reported as exact only when
every term was.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .chartab import CharacterTable, center_decomposition
from .cyclotomic import DEFAULT_TOLERANCE_EXPONENT, Cyclotomic, MagnitudeResult, magnitude
from .modular import GramResult, gram_from_tensor, gram_raw, matmul_mod, primes_congruent_one, primitive_root_of_unity


class IntegralityError(ArithmeticError):
    """An inner sum that must be an integer was not; the table is defective."""


class HypergroupError(ValueError):
    pass


def _squarefree_part(n: int) -> int:
    out, d = 1, 2
    while d * d <= n:
        while n % (d * d) == 0:
            n //= d * d
        if n % d == 0:
            out *= d
            n //= d
        d += 1
    return out * n


@dataclass(frozen=True)
class ExactOrEnclosed:
    lo: Fraction
    hi: Fraction
    exact: Optional[Fraction] = None
    # set when every |term|^2 was rational and some |term| was not: the
    # total is then a positive combination of square roots of distinct
    # squarefree integers with an irrational part, hence irrational
    certified_irrational: bool = False
    reconstructed: Optional[Fraction] = None

    @classmethod
    def of(cls, q: Fraction | int) -> "ExactOrEnclosed":
        q = Fraction(q)
        return cls(q, q, q)

    @property
    def enclosure(self) -> tuple[Fraction, Fraction]:
        return (self.lo, self.hi)

    @property
    def midpoint(self) -> Fraction:
        return self.exact if self.exact is not None else (self.lo + self.hi) / 2

    def contains(self, q: Fraction | int) -> bool:
        return self.lo <= q <= self.hi

    def equals(self, q: Fraction | int) -> Optional[bool]:
        """True/False when decidable, None when the enclosure cannot tell."""
        if self.exact is not None:
            return self.exact == q
        if not self.contains(q) or self.certified_irrational:
            return False
        return None

    def __float__(self) -> float:
        return float(self.midpoint)


def _weighted_magnitudes(
    sums: GramResult | Sequence[Sequence[Cyclotomic]],
    weights: Sequence[Fraction | int],
    norm: Fraction,
    tolerance_exponent: int,
    denominator_hint: Optional[int] = None,
) -> ExactOrEnclosed:
    """norm * sum_{x,y} w_x w_y |sums[x][y]|, exact where possible."""
    exact_total = Fraction(0)
    if isinstance(sums, GramResult):
        k = sums.size
        rational = sums.rational_mask()
        # rational entries in one pass: |num| / scale
        wden = math.lcm(*(Fraction(w).denominator for w in weights))
        wint = np.array([int(Fraction(w) * wden) for w in weights], dtype=object)
        mags = np.where(rational, np.abs(sums.rational_numerators()), 0).astype(object)
        exact_total = Fraction(int(wint @ mags @ wint), wden * wden * sums.scale)
        pending = list(zip(*np.nonzero(np.triu(~rational))))
        entry = sums.entry
    else:
        k = len(sums)
        pending = [(x, y) for x in range(k) for y in range(x, k)]
        entry = lambda x, y: sums[x][y]  # noqa: E731
    # keyed by representation: the Galois-invariant hash of Cyclotomic collides often here
    cache: dict[tuple, MagnitudeResult] = {}
    lo = exact_total
    hi = exact_total
    all_exact = True
    all_norms_rational = True
    irrational_part = False
    for x, y in pending:
        x, y = int(x), int(y)
        z = entry(x, y)
        rep = (z.conductor, z.numerators, z.denominator)
        mag = cache.get(rep)
        if mag is None:
            mag = magnitude(z, tolerance_exponent)
            cache[rep] = mag
        w = Fraction(weights[x]) * Fraction(weights[y]) * (1 if x == y else 2)
        # |S(x, y)| = |S(y, x)| since the two are complex conjugates
        if mag.exact is not None:
            exact_total += w * mag.exact
        else:
            all_exact = False
            q = (z * z.conj()).as_rational()
            if q is None:
                all_norms_rational = False
            elif _squarefree_part(q.numerator * q.denominator) > 1:
                irrational_part = True
        lo += w * mag.lo
        hi += w * mag.hi
    if all_exact:
        return ExactOrEnclosed.of(exact_total * norm)
    lo, hi = lo * norm, hi * norm
    res = ExactOrEnclosed(lo, hi, None, all_norms_rational and irrational_part)
    if denominator_hint and not res.certified_irrational:
        # nearest rational with the hinted denominator; accepted as a candidate
        # only when the enclosure is narrower than the gap to its neighbours
        mid = (lo + hi) / 2
        cand = Fraction(round(mid * denominator_hint), denominator_hint)
        if lo <= cand <= hi and hi - lo < Fraction(1, denominator_hint):
            res = ExactOrEnclosed(lo, hi, None, False, cand)
    return res


# ---------------------------------------------------------------------------
# ZA(G) and ZL^1(G)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AmenabilityReport:
    label: str
    group_order: int
    center_order: int
    amza: ExactOrEnclosed
    ass: Fraction
    amza_off: ExactOrEnclosed
    inner_sums_za: tuple[tuple[int, ...], ...]
    divisibility_ok: bool
    amzl: Optional[ExactOrEnclosed] = None
    # open question: are the ZL inner sums always rational integers?
    amzl_inner_sums_integral: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def equal_flag(self) -> Optional[bool]:
        """amza == amzl, or None when the enclosure cannot decide."""
        if self.amzl is None:
            return None
        return self.amzl.equals(self.amza.exact)


def _table_gram(t: CharacterTable, weights: list, by: str, columns: Optional[Sequence[int]] = None) -> GramResult:
    """Gram sums over the rows of the table (by="characters") or over its columns (by="classes")."""
    tensor, den = t.value_tensor
    if by == "classes":
        tensor = tensor.transpose(1, 0, 2)
    if columns is not None:
        tensor = tensor[:, list(columns), :]
    act = t.galois_action
    perms = None if act is None else (act.characters if by == "characters" else act.classes)
    return gram_from_tensor(tensor, den, weights, t.conductor, perms)


def za_inner_sums(t: CharacterTable) -> list[list[int]]:
    """S(chi, chi') = sum_C |C|^2 chi(C) conj(chi'(C)), asserted to be integers divisible by |Z(G)|."""
    g = _table_gram(t, [s * s for s in t.class_sizes], "characters")
    num = g.rational_numerators()
    bad = ~g.rational_mask() | (num % g.scale != 0)
    if bad.any():
        i, j = (int(x) for x in np.argwhere(bad)[0])
        raise IntegralityError(f"inner sum for characters ({i}, {j}) is not a rational integer: {g.entry(i, j)!r}")
    ints = (num // g.scale).tolist()
    z = t.center_order
    for i, row in enumerate(ints):
        for j, v in enumerate(row):
            if v % z:
                raise IntegralityError(f"inner sum {v} for characters ({i}, {j}) is not divisible by |Z(G)| = {z}")
    return [[int(v) for v in row] for row in ints]


def zl_gram(t: CharacterTable) -> GramResult:
    return _table_gram(t, [d * d for d in t.degrees], "classes")


def zl_inner_sums(t: CharacterTable) -> list[list[Cyclotomic]]:
    """T(C, C') = sum_chi d_chi^2 chi(C) conj(chi(C'))."""
    return zl_gram(t).matrix()


def ass(t: CharacterTable) -> Fraction:
    """The diagonal part shared by both constants."""
    sq = [s * s for s in t.class_sizes]
    total = Fraction(0)
    for d, row in zip(t.degrees, t.values):
        acc = Cyclotomic.rational(0)
        for w, z in zip(sq, row):
            acc = acc + z * z.conj() * w
        q = acc.as_rational()
        if q is None:
            raise IntegralityError("sum of |chi(C)|^2 weights is not rational")
        total += d * d * q
    return total / (t.order * t.order)


def amza(t: CharacterTable) -> AmenabilityReport:
    s = za_inner_sums(t)
    n2 = t.order * t.order
    deg = t.degrees
    k = t.class_count
    z = t.center_order
    total = sum(deg[i] * deg[j] * abs(s[i][j]) for i in range(k) for j in range(k))
    diag = sum(deg[i] * deg[i] * s[i][i] for i in range(k))
    za = Fraction(total, n2)
    a = Fraction(diag, n2)
    return AmenabilityReport(
        label=t.label,
        group_order=t.order,
        center_order=t.center_order,
        amza=ExactOrEnclosed.of(za),
        ass=a,
        amza_off=ExactOrEnclosed.of(za - a),
        inner_sums_za=tuple(tuple(r) for r in s),
        divisibility_ok=all(v % z == 0 for r in s for v in r),
    )


def amzl(t: CharacterTable, tolerance_exponent: int = DEFAULT_TOLERANCE_EXPONENT) -> ExactOrEnclosed:
    sums = zl_gram(t)
    return _weighted_magnitudes(
        sums, t.class_sizes, Fraction(1, t.order * t.order), tolerance_exponent, t.order * t.order
    )


def report(t: CharacterTable, tolerance_exponent: int = DEFAULT_TOLERANCE_EXPONENT) -> AmenabilityReport:
    """Everything at once: AMZA, AMZL, ass and the off-diagonal part."""
    base = amza(t)
    zl_sums = zl_gram(t)
    zl = _weighted_magnitudes(
        zl_sums, t.class_sizes, Fraction(1, t.order * t.order), tolerance_exponent, t.order * t.order
    )
    integral = bool(zl_sums.rational_mask().all() and (zl_sums.rational_numerators() % zl_sums.scale == 0).all())
    a = base.ass
    return AmenabilityReport(
        label=base.label,
        group_order=base.group_order,
        center_order=base.center_order,
        amza=base.amza,
        amzl=zl,
        ass=a,
        amza_off=base.amza_off,
        inner_sums_za=base.inner_sums_za,
        divisibility_ok=base.divisibility_ok,
        amzl_inner_sums_integral=integral,
    )


def center_sum_check(t: CharacterTable) -> Fraction:
    """(1/|G|^2) sum d d' |sum_{x in Z} chi(x) conj(chi'(x))|; always 1."""
    zc = t.center_classes
    sums = _table_gram(t, [1] * len(zc), "characters", zc)
    total = _weighted_magnitudes(sums, t.degrees, Fraction(1, t.order * t.order), DEFAULT_TOLERANCE_EXPONENT)
    if total.exact is None:
        raise IntegralityError("central sum has irrational magnitude")
    return total.exact


@dataclass(frozen=True)
class QuotientCenterComparison:
    amza: Fraction
    amza_quotient: Fraction
    center_order: int
    holds: bool  # amza >= amza_quotient / |Z|
    proof_line_holds: bool  # amza >= |Z| * amza_quotient, recorded only


def quotient_center_inequality(t: CharacterTable, tq: CharacterTable) -> QuotientCenterComparison:
    z = t.center_order
    if tq.order * z != t.order:
        raise ValueError("second table is not of G/Z(G)")
    a = amza(t).amza.exact
    aq = amza(tq).amza.exact
    return QuotientCenterComparison(a, aq, z, a >= aq / z, a >= z * aq)


def lemma_blocks_ok(t: CharacterTable) -> bool:
    """Each centre block has squared-degree sum |G : Z(G)|."""
    dec = center_decomposition(t)
    idx = t.order // t.center_order
    if len(dec.blocks) != t.center_order:
        return False
    return all(sum(t.degrees[c] ** 2 for c in b) == idx for b in dec.blocks)


# ---------------------------------------------------------------------------
# hypergroups
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Hypergroup:
    """Finite commutative hypergroup.

    Structure constants are c[x][y][z] = numerators[x, y, z] / denominators[x, y].
    ``characters[i][x]`` is the i-th character at point x.
    """

    numerators: np.ndarray
    denominators: np.ndarray
    haar: tuple[Fraction, ...]
    characters: tuple[tuple[Cyclotomic, ...], ...]
    hyperdimensions: tuple[Fraction, ...]
    label: str = ""

    @property
    def size(self) -> int:
        return len(self.haar)

    @property
    def total_weight(self) -> Fraction:
        return sum(self.haar, Fraction(0))

    def structure_constant(self, x: int, y: int, z: int) -> Fraction:
        return Fraction(int(self.numerators[x, y, z]), int(self.denominators[x, y]))

    def check(self, exact: bool = False) -> None:
        num, den = self.numerators, self.denominators
        k = self.size
        if num.shape != (k, k, k) or den.shape != (k, k):
            raise HypergroupError("structure constant array has the wrong shape")
        if (num < 0).any():
            raise HypergroupError("negative structure constant")
        if not (num.sum(axis=2) == den).all():
            raise HypergroupError("structure constants do not sum to 1")
        if not (num * den.T[:, :, None] == num.transpose(1, 0, 2) * den[:, :, None]).all():
            raise HypergroupError("convolution is not commutative")
        if not (num[0] == np.eye(k, dtype=num.dtype) * den[0][:, None]).all():
            raise HypergroupError("point 0 is not the identity")
        if len(self.characters) != len(self.hyperdimensions):
            raise HypergroupError("one hyperdimension per character is required")
        c = num / den[:, :, None]
        for i, chi in enumerate(self.characters):
            v = np.array([complex(z) for z in chi])
            if not np.allclose(np.outer(v, v), c @ v, atol=1e-8):
                raise HypergroupError(f"character {i} is not multiplicative for the structure constants")
            if exact:
                for x in range(k):
                    for y in range(k):
                        rhs = Cyclotomic.rational(0)
                        for z in range(k):
                            if num[x, y, z]:
                                rhs = rhs + chi[z] * self.structure_constant(x, y, z)
                        if chi[x] * chi[y] != rhs:
                            raise HypergroupError(f"character {i} fails at ({x}, {y})")


def hypergroup_am(h: Hypergroup, tolerance_exponent: int = DEFAULT_TOLERANCE_EXPONENT) -> ExactOrEnclosed:
    """Amenability constant of l^1(H, lambda) from its characters and hyperdimensions."""
    h.check()
    k = h.size
    columns = [[chi[x] for chi in h.characters] for x in range(k)]
    sums = gram_raw(columns, [kk * kk for kk in h.hyperdimensions])
    lam = h.total_weight
    return _weighted_magnitudes(sums, h.haar, 1 / (lam * lam), tolerance_exponent)


def trivial_hypergroup() -> Hypergroup:
    return Hypergroup(
        numerators=np.ones((1, 1, 1), dtype=np.int64),
        denominators=np.ones((1, 1), dtype=np.int64),
        haar=(Fraction(1),),
        characters=((Cyclotomic.rational(1),),),
        hyperdimensions=(Fraction(1),),
        label="trivial",
    )


def _table_mod_p(t: CharacterTable, p: int, inverse: bool = False) -> np.ndarray:
    """Image of the table under zeta_n -> w (or w^-1) in F_p; values must be algebraic integers."""
    n = t.conductor
    w = primitive_root_of_unity(n, p)
    if inverse:
        w = pow(w, -1, p)
    out = np.zeros((t.class_count, t.class_count), dtype=np.int64)
    for i, row in enumerate(t.values):
        for j, z in enumerate(row):
            zz = z.lift(n)
            if zz.denominator != 1:
                raise HypergroupError("character value is not an algebraic integer")
            acc = 0
            for e, c in enumerate(zz.numerators):
                if c:
                    acc += c * pow(w, e, p)
            out[i, j] = acc % p
    return out


def _integer_triple_sums(t: CharacterTable, mode: str) -> np.ndarray:
    """Exact integer arrays from triple products of table entries, via a ring map to F_p.

    mode "tensor": N[a, b, c] = (1/|G|) sum_C |C| chi_a chi_b conj(chi_c)   (tensor multiplicities)
    mode "class":  a[i, j, k] = |C_i||C_j|/|G| sum_chi chi(g_i) chi(g_j) conj(chi(g_k)) / d_chi
    Both are nonnegative integers bounded by |G|^2, so one prime above that suffices.
    """
    n = t.order
    k = t.class_count
    p = primes_congruent_one(t.conductor, max(n * n, 2 * k))[0]
    x = _table_mod_p(t, p)
    xb = _table_mod_p(t, p, inverse=True)
    ginv = pow(n, -1, p)
    sizes = np.array(t.class_sizes, dtype=np.int64) % p
    out = np.zeros((k, k, k), dtype=np.int64)
    if mode == "tensor":
        for a in range(k):
            left = x * x[a] % p * sizes % p
            out[a] = matmul_mod(left, xb.T, p) * ginv % p
    else:
        dinv = np.array([pow(d, -1, p) for d in t.degrees], dtype=np.int64)
        for i in range(k):
            left = x.T * x[:, i] % p * dinv % p  # [j, chi] = chi(g_j) chi(g_i) / d_chi
            block = matmul_mod(left, xb, p)  # [j, k]
            scale = sizes[i] * sizes % p * ginv % p
            out[i] = block * scale[:, None] % p
    return out


def conj_hypergroup(t: CharacterTable) -> Hypergroup:
    """Conjugacy-class hypergroup: points are classes with Haar weight |C|.

    Characters are chi/d_chi; the hyperdimension of chi is d_chi^2, the value
    for which the Plancherel weights make the generic formula reproduce AMZL.
    """
    if t.group is not None:
        from .chartab import class_constants

        a = class_constants(t.group, t.classes)
    else:
        a = _integer_triple_sums(t, "class")
    sizes = np.array(t.class_sizes, dtype=np.int64)
    num = a * sizes[None, None, :]
    den = sizes[:, None] * sizes[None, :]
    chars = tuple(tuple(z / d for z in row) for d, row in zip(t.degrees, t.values))
    return Hypergroup(
        numerators=num,
        denominators=den,
        haar=tuple(Fraction(s) for s in t.class_sizes),
        characters=chars,
        hyperdimensions=tuple(Fraction(d * d) for d in t.degrees),
        label=f"Conj({t.label})",
    )


def dual_hypergroup(t: CharacterTable) -> Hypergroup:
    """Dual hypergroup on Irr(G): Haar weight d^2, convolution from tensor products."""
    mult = _integer_triple_sums(t, "tensor")
    deg = np.array(t.degrees, dtype=np.int64)
    num = mult * deg[None, None, :]
    den = deg[:, None] * deg[None, :]
    k = t.class_count
    chars = tuple(tuple(t.values[i][c] / t.degrees[i] for i in range(k)) for c in range(k))
    return Hypergroup(
        numerators=num,
        denominators=den,
        haar=tuple(Fraction(d * d) for d in t.degrees),
        characters=chars,
        hyperdimensions=tuple(Fraction(s) for s in t.class_sizes),
        label=f"Irr({t.label})",
    )
