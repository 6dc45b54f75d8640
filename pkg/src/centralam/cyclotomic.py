"""Exact arithmetic in cyclotomic fields.

An element of Q(zeta_n) is stored in the power basis 1, z, ..., z^(phi(n)-1)
of z = exp(2*pi*i/n), i.e. as its remainder modulo the n-th cyclotomic
polynomial.  The power basis is a basis of Q(zeta_n), so the remainder is
unique and zero-testing is a test for an empty coefficient vector.  Values
with different conductors are compared after lifting both to the lcm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence, Union

from mpmath.ctx_iv import MPIntervalContext

Number = Union[int, Fraction]

DEFAULT_TOLERANCE_EXPONENT = 30


# ---------------------------------------------------------------------------
# cyclotomic polynomials and the reduction table x^j mod Phi_n
# ---------------------------------------------------------------------------


def _poly_divexact(num: list[int], den: Sequence[int]) -> list[int]:
    num = list(num)
    dlen = len(den)
    out = [0] * (len(num) - dlen + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        q, r = divmod(num[i + dlen - 1], lead)
        if r:
            raise ArithmeticError("inexact polynomial division")
        out[i] = q
        if q:
            for j, dj in enumerate(den):
                num[i + j] -= q * dj
    if any(num[: dlen - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError(f"conductor must be positive, got {n}")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


@lru_cache(maxsize=None)
def reduction_table(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Row j holds x^j mod Phi_n as sparse (basis index, integer) pairs, 0 <= j < n."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(n):
        rows.append(tuple((i, c) for i, c in enumerate(cur) if c))
        # multiply by x and reduce (Phi_n is monic)
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(deg):
                cur[i] -= top * phi[i]
    return tuple(rows)


def _reduce(n: int, vec: Sequence[int]) -> list[int]:
    """Reduce an integer exponent vector of length n to the power basis."""
    table = reduction_table(n)
    out = [0] * euler_phi(n)
    for j, c in enumerate(vec):
        if c:
            for i, r in table[j]:
                out[i] += c * r
    return out


@lru_cache(maxsize=None)
def _mobius(n: int) -> int:
    res, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            res = -res
        p += 1
    if m > 1:
        res = -res
    return res


# ---------------------------------------------------------------------------
# field elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MagnitudeResult:
    """|z| as an exact rational when possible, always with a rational enclosure."""

    exact: Optional[Fraction]
    lo: Fraction
    hi: Fraction

    @property
    def enclosure(self) -> tuple[Fraction, Fraction]:
        return (self.lo, self.hi)


class Cyclotomic:
    """An element of Q(zeta_n) in the power basis modulo Phi_n.

    Coefficients are kept as integer numerators over one positive common
    denominator, so ``Cyclotomic`` values are hashable and immutable.
    """

    __slots__ = ("conductor", "_num", "_den")

    def __init__(self, conductor: int, num: Sequence[int], den: int = 1) -> None:
        # num must already be a power-basis vector of length phi(conductor)
        if len(num) != euler_phi(conductor):
            raise ValueError("coefficient vector length must equal phi(conductor)")
        if den <= 0:
            raise ValueError("denominator must be positive")
        self.conductor = conductor
        g = math.gcd(den, *num) if den != 1 else 1
        if g == 0 or not any(num):
            g = den
        if g == 1:
            self._num = tuple(map(int, num))
            self._den = den
        else:
            self._num = tuple(c // g for c in num)
            self._den = den // g

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_exponents(cls, conductor: int, terms: Mapping[int, Number] | Iterable[tuple[int, Number]]) -> "Cyclotomic":
        """Build sum_j c_j zeta_n^j from arbitrary exponents (reduced mod n)."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        items = [(j % conductor, Fraction(c)) for j, c in items]
        den = 1
        for _, c in items:
            den = den * c.denominator // math.gcd(den, c.denominator)
        vec = [0] * conductor
        for j, c in items:
            vec[j] += c.numerator * (den // c.denominator)
        return cls(conductor, _reduce(conductor, vec), den)

    @classmethod
    def rational(cls, value: Number) -> "Cyclotomic":
        q = Fraction(value)
        return cls(1, (q.numerator,), q.denominator)

    @classmethod
    def zeta(cls, n: int, power: int = 1) -> "Cyclotomic":
        return cls.from_exponents(n, {power: 1})

    @classmethod
    def from_root_multiplicities(cls, conductor: int, mult: Sequence[int]) -> "Cyclotomic":
        """sum_j mult[j] * zeta_n^j for an integer vector of length n."""
        return cls(conductor, _reduce(conductor, [int(x) for x in mult]), 1)

    # -- accessors ----------------------------------------------------------

    @property
    def coeffs(self) -> dict[int, Fraction]:
        """Nonzero power-basis coefficients keyed by exponent."""
        return {j: Fraction(c, self._den) for j, c in enumerate(self._num) if c}

    @property
    def numerators(self) -> tuple[int, ...]:
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    def is_zero(self) -> bool:
        return not any(self._num)

    def as_rational(self) -> Optional[Fraction]:
        if any(self._num[1:]):
            return None
        return Fraction(self._num[0], self._den)

    def is_algebraic_integer(self) -> bool:
        # the power basis is an integral basis of Z[zeta_n]
        return self._den == 1

    # -- field operations -----------------------------------------------------

    def lift(self, m: int) -> "Cyclotomic":
        """The same value expressed with conductor m (a multiple of the current one)."""
        n = self.conductor
        if m == n:
            return self
        if m % n:
            raise ValueError(f"cannot lift conductor {n} to {m}")
        step = m // n
        vec = [0] * m
        for j, c in enumerate(self._num):
            if c:
                vec[j * step] = c
        return Cyclotomic(m, _reduce(m, vec), self._den)

    def _common(self, other: "Cyclotomic") -> tuple["Cyclotomic", "Cyclotomic"]:
        if self.conductor == other.conductor:
            return self, other
        m = math.lcm(self.conductor, other.conductor)
        return self.lift(m), other.lift(m)

    @staticmethod
    def _coerce(value: object) -> Optional["Cyclotomic"]:
        if isinstance(value, Cyclotomic):
            return value
        if isinstance(value, (int, Fraction)):
            return Cyclotomic.rational(value)
        return None

    def __add__(self, other: object) -> "Cyclotomic":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._common(o)
        den = a._den * b._den // math.gcd(a._den, b._den)
        fa, fb = den // a._den, den // b._den
        return Cyclotomic(a.conductor, [x * fa + y * fb for x, y in zip(a._num, b._num)], den)

    __radd__ = __add__

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(self.conductor, [-x for x in self._num], self._den)

    def __sub__(self, other: object) -> "Cyclotomic":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> "Cyclotomic":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other: object) -> "Cyclotomic":
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return Cyclotomic(self.conductor, [x * q.numerator for x in self._num], self._den * q.denominator)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = self._common(other)
        n = a.conductor
        vec = [0] * n
        bnz = [(j, y) for j, y in enumerate(b._num) if y]
        for i, x in enumerate(a._num):
            if x:
                for j, y in bnz:
                    vec[(i + j) % n] += x * y
        return Cyclotomic(n, _reduce(n, vec), a._den * b._den)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        """Multiplicative inverse via the product of the other Galois conjugates."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n = self.conductor
        prod = Cyclotomic.rational(1)
        for a in range(2, n):
            if math.gcd(a, n) == 1:
                prod = prod * self.galois(a)
        norm = (prod * self).as_rational()
        assert norm is not None and norm != 0
        return prod * (1 / norm)

    def __truediv__(self, other: object) -> "Cyclotomic":
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, Cyclotomic):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other: object) -> "Cyclotomic":
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, e: int) -> "Cyclotomic":
        if not isinstance(e, int):
            return NotImplemented
        base = self if e >= 0 else self.inverse()
        out = Cyclotomic(self.conductor, [1] + [0] * (len(self._num) - 1))
        e = abs(e)
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def galois(self, a: int) -> "Cyclotomic":
        """Apply the automorphism zeta_n -> zeta_n^a (a coprime to n)."""
        n = self.conductor
        if math.gcd(a, n) != 1:
            raise ValueError(f"{a} is not coprime to the conductor {n}")
        vec = [0] * n
        for j, c in enumerate(self._num):
            if c:
                vec[(j * a) % n] += c
        return Cyclotomic(n, _reduce(n, vec), self._den)

    def conj(self) -> "Cyclotomic":
        return self.galois(-1 % self.conductor) if self.conductor > 2 else self

    # -- comparisons --------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            if any(self._num[1:]):
                return False
            return Fraction(self._num[0], self._den) == other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.conductor == o.conductor:
            return self._den == o._den and self._num == o._num
        a, b = self._common(o)
        return a._den == b._den and a._num == b._num

    def normalized_trace(self) -> Fraction:
        """Tr(z) / [Q(z_n):Q]; independent of the conductor used to represent z."""
        n = self.conductor
        total = Fraction(0)
        for j, c in enumerate(self._num):
            if c:
                m = n // math.gcd(j, n)
                total += Fraction(c * _mobius(m), euler_phi(m))
        return total / self._den

    def __hash__(self) -> int:
        return hash(self.normalized_trace())

    # -- numerics -----------------------------------------------------------

    def __complex__(self) -> complex:
        n = self.conductor
        re = im = 0.0
        for j, c in enumerate(self._num):
            if c:
                t = 2 * math.pi * j / n
                re += c * math.cos(t)
                im += c * math.sin(t)
        return complex(re / self._den, im / self._den)

    def interval(self, prec: int) -> tuple:
        """(re, im) as mpmath intervals at the given binary precision."""
        n = self.conductor
        iv = _interval_context(prec)
        re = iv.mpf(0)
        im = iv.mpf(0)
        for j, c in enumerate(self._num):
            if c:
                t = 2 * iv.pi * j / n
                re += c * iv.cos(t)
                im += c * iv.sin(t)
        return re / self._den, im / self._den

    def magnitude(self, tolerance_exponent: int = DEFAULT_TOLERANCE_EXPONENT) -> MagnitudeResult:
        return magnitude(self, tolerance_exponent)

    def __repr__(self) -> str:
        q = self.as_rational()
        if q is not None:
            return f"Cyclotomic({q})"
        terms = " + ".join(f"({c})*E({self.conductor})^{j}" for j, c in self.coeffs.items())
        return f"Cyclotomic({terms})"

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "conductor": self.conductor,
            "terms": [[j, c, self._den] for j, c in enumerate(self._num) if c],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Cyclotomic":
        n = int(data["conductor"])
        num = [Fraction(0)] * euler_phi(n)
        for j, a, b in data["terms"]:
            if not 0 <= j < len(num):
                raise ValueError(f"exponent {j} outside the power basis of conductor {n}")
            num[j] += Fraction(a, b)
        den = 1
        for c in num:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return cls(n, [int(c * den) for c in num], den)


def _interval_context(prec: int) -> MPIntervalContext:
    # a private context per call keeps the precision setting thread-local
    ctx = MPIntervalContext()
    ctx.prec = prec
    return ctx


def _isqrt_exact(n: int) -> Optional[int]:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _mpf_to_fraction(raw: tuple) -> Fraction:
    sign, man, exp, _ = raw
    if man == 0:
        return Fraction(0)
    val = Fraction(int(man)) * (Fraction(2) ** exp)
    return -val if sign else val


def _interval_endpoints(x) -> tuple[Fraction, Fraction]:
    a, b = x._mpi_
    return _mpf_to_fraction(a), _mpf_to_fraction(b)


def sqrt_enclosure(q: Fraction, tolerance_exponent: int = DEFAULT_TOLERANCE_EXPONENT) -> tuple[Fraction, Fraction]:
    """Rational enclosure of sqrt(q) for a nonnegative rational q."""
    if q < 0:
        raise ValueError("square root of a negative rational")
    if q == 0:
        return Fraction(0), Fraction(0)
    prec = 64 + 4 * tolerance_exponent
    tol = Fraction(1, 10**tolerance_exponent)
    while True:
        iv = _interval_context(prec)
        r = iv.sqrt(iv.mpf(q.numerator) / q.denominator)
        lo, hi = _interval_endpoints(r)
        lo = max(lo, Fraction(0))
        if hi - lo <= tol * hi:
            return lo, hi
        prec *= 2


def magnitude(z: Cyclotomic, tolerance_exponent: int = DEFAULT_TOLERANCE_EXPONENT) -> MagnitudeResult:
    """|z|, exact when z * conj(z) is the square of a rational, else enclosed."""
    if z.is_zero():
        return MagnitudeResult(Fraction(0), Fraction(0), Fraction(0))
    w = z * z.conj()
    q = w.as_rational()
    if q is not None:
        rn, rd = _isqrt_exact(q.numerator), _isqrt_exact(q.denominator)
        if rn is not None and rd is not None:
            exact = Fraction(rn, rd)
            return MagnitudeResult(exact, exact, exact)
        lo, hi = sqrt_enclosure(q, tolerance_exponent)
        return MagnitudeResult(None, lo, hi)
    tol = Fraction(1, 10**tolerance_exponent)
    prec = 64 + 4 * tolerance_exponent
    while True:
        re, _ = w.interval(prec)
        iv = _interval_context(prec)
        if re.a < 0:
            # w is real and positive; clip the lower end at zero
            re = iv.mpf([0, re.b])
        r = iv.sqrt(re)
        lo, hi = _interval_endpoints(r)
        if hi - lo <= tol * hi:
            return MagnitudeResult(None, max(lo, Fraction(0)), hi)
        prec *= 2


def as_rational(z: Cyclotomic) -> Optional[Fraction]:
    return z.as_rational()


def conj(z: Cyclotomic) -> Cyclotomic:
    return z.conj()


def E(n: int) -> Cyclotomic:
    """The primitive n-th root of unity exp(2*pi*i/n)."""
    return Cyclotomic.zeta(n)
