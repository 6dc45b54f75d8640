"""Linear algebra over prime fields and exact cyclotomic Gram sums.

Matrix products are done in float64 with every intermediate an integer of
absolute value below 2**53, so they are exact; callers keep primes small
enough for that to hold (see ``_check_exact``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Optional, Sequence

import numpy as np

from .cyclotomic import Cyclotomic, euler_phi, reduction_table

_EXACT = 2**53


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
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


def primes_congruent_one(modulus: int, above: int, count: int = 1) -> list[int]:
    """The ``count`` smallest primes p > above with p = 1 (mod modulus)."""
    out = []
    p = (above // modulus + 1) * modulus + 1
    while len(out) < count:
        if is_prime(p):
            out.append(p)
        p += modulus
    return out


def primitive_root_of_unity(n: int, p: int) -> int:
    """An element of multiplicative order exactly n in F_p (n divides p-1)."""
    if (p - 1) % n:
        raise ValueError(f"{n} does not divide {p}-1")
    fac = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in fac):
            return pow(g, (p - 1) // n, p)
    return 1  # p == 2


def _check_exact(inner: int, p: int) -> None:
    if inner * (p - 1) ** 2 >= _EXACT:
        raise OverflowError(f"float64 product not exact for inner dimension {inner}, p={p}")


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    _check_exact(a.shape[-1], p)
    out = np.ascontiguousarray(a, dtype=np.float64) @ np.ascontiguousarray(b, dtype=np.float64)
    return np.fmod(out, p).astype(np.int64)


def inv_mod(a: int, p: int) -> int:
    return pow(int(a) % p, -1, p)


def rref_mod(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p and the pivot columns."""
    a = np.array(m, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if not len(nz):
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] * inv_mod(a[r, c], p) % p
        col = a[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if len(nzr):
            a[nzr] = (a[nzr] - np.outer(col[nzr], a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def nullspace_mod(m: np.ndarray, p: int) -> np.ndarray:
    """Basis of {v : m v = 0} over F_p, as the columns of the returned matrix."""
    rows, cols = m.shape
    red, pivots = rref_mod(m, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, pc in enumerate(pivots):
            basis[pc, k] = (-red[i, f]) % p
    return basis


def solve_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Solve a x = b for a full-column-rank a (consistent system assumed)."""
    n = a.shape[1]
    aug = np.concatenate([a % p, b % p], axis=1)
    red, pivots = rref_mod(aug, p)
    if pivots[:n] != list(range(n)):
        raise ArithmeticError("coefficient matrix is not of full column rank")
    return red[:n, n:]


def charpoly_mod(m: np.ndarray, p: int) -> list[int]:
    """Characteristic polynomial of a square matrix over F_p, lowest degree first.

    Reduction to upper Hessenberg form followed by the standard recurrence.
    """
    if p >= 2**31:
        raise OverflowError("charpoly_mod needs p < 2^31 for exact int64 products")
    h = np.array(m, dtype=np.int64) % p
    n = h.shape[0]
    for c in range(n - 2):
        nz = np.nonzero(h[c + 1:, c])[0]
        if not len(nz):
            continue
        piv = c + 1 + int(nz[0])
        if piv != c + 1:
            h[[c + 1, piv]] = h[[piv, c + 1]]
            h[:, [c + 1, piv]] = h[:, [piv, c + 1]]
        inv = inv_mod(h[c + 1, c], p)
        for r in range(c + 2, n):
            f = h[r, c] * inv % p
            if f:
                h[r] = (h[r] - f * h[c + 1]) % p
                h[:, c + 1] = (h[:, c + 1] + f * h[:, r]) % p
    # p_k(x) = det(x I - H[:k, :k]); row k of ``polys`` holds p_k, lowest degree first
    polys = np.zeros((n + 1, n + 1), dtype=np.int64)
    polys[0, 0] = 1
    for k in range(1, n + 1):
        hk = int(h[k - 1, k - 1])
        cur = np.zeros(n + 1, dtype=np.int64)
        cur[1:k + 1] = polys[k - 1, :k]
        cur = (cur - hk * polys[k - 1]) % p
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = prod * int(h[i, i - 1]) % p
            if not prod:
                break
            t = prod * int(h[i - 1, k - 1]) % p
            if t:
                cur = (cur - t * polys[i - 1]) % p
        polys[k] = cur
    return [int(c) for c in polys[n]]


def eigenvectors_distinct(
    m: np.ndarray, poly: Sequence[int], roots: Sequence[int], p: int, seed: int = 0
) -> Optional[np.ndarray]:
    """Eigenvectors of m (columns, one per root) when its eigenvalues are distinct.

    For a vector w with a component along every eigenvector,
    (charpoly(x) / (x - lam))(m) w is an eigenvector for lam.  Returns None
    if no suitable w turns up after a few tries.
    """
    n = m.shape[0]
    if len(roots) != n:
        return None
    # quotient polynomials by synthetic division, one column per root
    coef = np.zeros((n, n), dtype=np.int64)
    for i, lam in enumerate(roots):
        acc = 0
        q = [0] * n
        for d in range(n, 0, -1):
            acc = (acc * lam + poly[d]) % p
            q[d - 1] = acc
        coef[:, i] = q
    rng = np.random.default_rng(seed)
    _check_exact(n, p)
    mf = np.asarray(m % p, dtype=np.float64)
    for _ in range(4):
        w = rng.integers(1, p, size=n, dtype=np.int64)
        krylov = np.empty((n, n), dtype=np.int64)
        for j in range(n):
            krylov[:, j] = w
            w = np.fmod(mf @ w.astype(np.float64), p).astype(np.int64)
        vecs = matmul_mod(krylov, coef, p)
        if np.all(vecs.any(axis=0)):
            return vecs
    return None


def roots_mod(poly: Sequence[int], p: int) -> list[int]:
    """All roots in F_p of a polynomial (coefficients lowest degree first)."""
    xs = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(poly):
        acc = (acc * xs + int(c)) % p
    return [int(x) for x in np.nonzero(acc == 0)[0]]


# ---------------------------------------------------------------------------
# exact sums of products of cyclotomic numbers
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _evaluation_data(n: int, p: int) -> tuple[np.ndarray, np.ndarray, tuple[int, ...]]:
    """Vandermonde matrices for evaluating at the primitive n-th roots of unity mod p.

    Returns (V, W, units): V[j, t] = w^(j*units[t]) evaluates an exponent
    vector of length n; W inverts evaluation on power-basis coordinates.
    """
    w = primitive_root_of_unity(n, p)
    units = tuple(a for a in range(1, n + 1) if math.gcd(a, n) == 1) if n > 1 else (1,)
    phi = euler_phi(n)
    assert len(units) == phi
    nodes = [pow(w, a, p) for a in units]
    v = np.array([[pow(x, j, p) for x in nodes] for j in range(n)], dtype=np.int64)
    vand = v[:phi].T.copy()  # vand[t, i] = node_t ** i
    inv = solve_mod(vand, np.eye(phi, dtype=np.int64), p)
    return v, inv, units


def _reduction_bound(n: int) -> int:
    return max((abs(c) for row in reduction_table(n) for _, c in row), default=1)


def coordinate_tensor(values: Sequence[Sequence[Cyclotomic]], n: int) -> tuple[np.ndarray, int]:
    """Tensor T[a, c, :] of power-basis numerators over conductor n, and the common denominator D.

    values[a][c] == T[a, c, :] / D, with phi(n) coordinates per entry.
    int64 unless an entry needs more than 53 bits.
    """
    rows = len(values)
    cols = len(values[0]) if rows else 0
    phi = euler_phi(n)
    den = 1
    for row in values:
        for z in row:
            den = den * z.denominator // math.gcd(den, z.denominator)
    ents = []
    for row in values:
        for z in row:
            zz = z.lift(n) if z.conductor != n else z
            f = den // zz.denominator
            ents.append([x * f for x in zz.numerators] if f != 1 else zz.numerators)
    try:
        t = np.array(ents, dtype=np.int64)
        if t.size and int(np.abs(t).max()) >= _EXACT:
            raise OverflowError
    except OverflowError:
        t = np.array(ents, dtype=object)
    return t.reshape(rows, cols, phi), den


@dataclass(frozen=True)
class GramResult:
    """Exact Gram sums as power-basis numerators: S[a][b] = coeffs[a, b, :] / scale."""

    coeffs: np.ndarray  # (rows, rows, phi(conductor)), int64 or object
    scale: int
    conductor: int

    @property
    def size(self) -> int:
        return self.coeffs.shape[0]

    def rational_mask(self) -> np.ndarray:
        """True where S[a][b] is rational (no irrational power-basis part)."""
        if self.coeffs.shape[2] == 1:
            return np.ones(self.coeffs.shape[:2], dtype=bool)
        return ~self.coeffs[:, :, 1:].any(axis=2)

    def rational_numerators(self) -> np.ndarray:
        """Numerators over ``scale`` of the rational part (coefficient of 1)."""
        return self.coeffs[:, :, 0]

    def entry(self, a: int, b: int) -> Cyclotomic:
        return Cyclotomic(self.conductor, [int(x) for x in self.coeffs[a, b]], self.scale)

    def matrix(self) -> list[list[Cyclotomic]]:
        vals = self.coeffs.tolist()
        n, sc = self.conductor, self.scale
        return [[Cyclotomic(n, v, sc) for v in row] for row in vals]


def _interpolate(s: np.ndarray, winv: np.ndarray, p: int) -> np.ndarray:
    """Power-basis coordinates from node values; entries constant over the nodes are rational."""
    rows = s.shape[0]
    phi = s.shape[2]
    out = np.zeros_like(s)
    out[:, :, 0] = s[:, :, 0]
    if phi == 1:
        return out
    varying = ~(s == s[:, :, :1]).all(axis=2)
    if varying.any():
        out[varying] = matmul_mod(s[varying], winv.T, p)
    return out


def gram_sums(
    values: Sequence[Sequence[Cyclotomic]],
    weights: Sequence[Fraction | int],
    conductor: int | None = None,
) -> list[list[Cyclotomic]]:
    """S[a][b] = sum_c weights[c] * values[a][c] * conj(values[b][c]), exactly."""
    if not values:
        return []
    return gram_raw(values, weights, conductor).matrix()


def gram_raw(
    values: Sequence[Sequence[Cyclotomic]],
    weights: Sequence[Fraction | int],
    conductor: int | None = None,
    galois: Optional[Mapping[int, Sequence[int]]] = None,
) -> GramResult:
    """Gram sums as a coefficient array (see ``gram_sums``).

    Uses evaluation at the primitive roots of unity modulo several primes
    and Chinese remaindering of the power-basis coefficients.

    ``galois`` optionally maps each unit u mod the conductor to a row
    permutation with galois_u(values[a][c]) == values[perm[a]][c] for all
    a, c.  The rows are then evaluated at a single root and the other
    nodes are read off by permuting, which is exact.
    """
    if not values:
        raise ValueError("no rows")
    n = conductor or math.lcm(*(z.conductor for row in values for z in row))
    tensor, den = coordinate_tensor(values, n)
    return gram_from_tensor(tensor, den, weights, n, galois)


def gram_from_tensor(
    tensor: np.ndarray,
    den: int,
    weights: Sequence[Fraction | int],
    n: int,
    galois: Optional[Mapping[int, Sequence[int]]] = None,
) -> GramResult:
    """``gram_raw`` on values given as power-basis coordinates tensor[a, c, :] / den."""
    rows, cols = tensor.shape[0], tensor.shape[1]
    if len(weights) != cols:
        raise ValueError("one weight per column is needed")
    wden = math.lcm(*(Fraction(w).denominator for w in weights)) if weights else 1
    wint = [int(Fraction(w) * wden) for w in weights]
    # coefficient bound for the exponent-vector product, then through reduction
    mx = int(np.abs(tensor).sum(axis=2).max()) if tensor.size else 0
    bound = mx * mx * sum(abs(w) for w in wint) * _reduction_bound(n) + 1
    phi = euler_phi(n)
    inner = max(n, len(weights), phi, 1)
    # largest p with inner * p^2 < 2^53
    pmax = math.isqrt(_EXACT // inner) - 1
    start = max(pmax // 2, n + 1)
    primes: list[int] = []
    modulus = 1
    cand = start
    while modulus <= 2 * bound:
        p = primes_congruent_one(n, cand)[0]
        if p > pmax:
            raise OverflowError("no prime small enough for exact float products")
        primes.append(p)
        modulus *= p
        cand = p
    residues = []
    cols = len(weights)
    for p in primes:
        v, winv, units = _evaluation_data(n, p)
        tm = np.asarray((tensor % p).reshape(rows * cols, phi), dtype=np.int64)
        v = v[:phi]
        wm = np.array([w % p for w in wint], dtype=np.int64)
        if galois is not None:
            base = units.index(1)
            ev0 = matmul_mod(tm, v[:, base : base + 1], p).reshape(rows, cols)
            perms = np.array([galois[u] for u in units], dtype=np.int64)  # (phi, rows)
            # conj is galois_{-1}
            neg_row = perms[units.index((n - 1) % n if n > 2 else 1)]
            s0 = matmul_mod(ev0 * wm[None, :] % p, ev0[neg_row].T, p)
            s = np.moveaxis(s0[perms[:, :, None], perms[:, None, :]], 0, 2)
        else:
            ev = matmul_mod(tm, v, p).reshape(rows, cols, phi)  # ev[a, c, t]
            # conj(z) at node t is z at node -t
            neg = [units.index((-u) % n if n > 1 else 1) for u in units]
            # one batched product over the evaluation nodes: s[t] = (ev_t * w) @ ev_{-t}^T
            left = np.moveaxis(ev, 2, 0) * wm[None, None, :] % p
            right = np.moveaxis(ev[:, :, neg], 2, 0).transpose(0, 2, 1)
            s = np.moveaxis(matmul_mod(left, right, p), 0, 2)
        residues.append(_interpolate(s, winv, p))
    # Chinese remainder, then symmetric residues; int64 while the modulus allows
    result = residues[0]
    m_acc = primes[0]
    for p, r in zip(primes[1:], residues[1:]):
        inv = pow(m_acc % p, -1, p)
        if m_acc * p < 2**62:
            diff = (r - result % p) % p
            result = result + m_acc * (diff * inv % p)
        else:
            result = result.astype(object)
            diff = (r.astype(object) - result) % p
            result = result + m_acc * ((diff * inv) % p)
        m_acc *= p
    half = m_acc // 2
    scale = den * den * wden
    arr = np.where(result > half, result - m_acc, result)
    return GramResult(arr, scale, n)
