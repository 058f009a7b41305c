"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Conventions used throughout:

- The level N >= 1 names the field Q(zeta_N), zeta_N an abstract primitive
  N-th root of unity.  No complex embedding is ever chosen and no floating
  point appears anywhere; equality is decided on coefficient vectors.
- An element is stored in the power basis {1, zeta, ..., zeta^(phi(N)-1)}
  reduced modulo the N-th cyclotomic polynomial, as a vector of integer
  numerators plus one positive common denominator with overall content 1.
  Equal values therefore have identical representations, so `==` and
  `hash` are structural.
- Values are immutable.  Arithmetic requires both operands at the same
  level; combine levels explicitly with `lift` (allowed exactly when the
  source level divides the target level).
- Complex conjugation is deliberately absent: callers that need inverse
  root values invert on the group side (s -> s^-1) instead.  The one
  place a multiplicative inverse is required (linear solving) uses the
  product of the nontrivial Galois conjugates, which stays inside pure
  power-basis arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence, Union

Rational = Union[int, Fraction]


class LevelMismatchError(ValueError):
    """Two values at different cyclotomic levels were combined."""


def _factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division; fine for the sizes used here."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("euler_phi needs n >= 1")
    out = 1
    for p, e in _factorize(n).items():
        out *= (p - 1) * p ** (e - 1)
    return out


def divisors(n: int) -> list[int]:
    out = [1]
    for p, e in _factorize(n).items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


def _poly_divexact(num: list[int], den: Sequence[int]) -> list[int]:
    # long division of integer polynomials, divisor monic; remainder must vanish
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            out[i - dn] = c
            for j in range(dn + 1):
                num[i - dn + j] -= c * den[j]
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(N: int) -> tuple[int, ...]:
    """Coefficients of the N-th cyclotomic polynomial, low degree first.

    Monic of degree phi(N); computed by dividing x^N - 1 by Phi_d over all
    proper divisors d of N.
    """
    if N < 1:
        raise ValueError("level must be >= 1")
    if N == 1:
        return (-1, 1)
    cur = [-1] + [0] * (N - 1) + [1]
    for d in divisors(N)[:-1]:
        cur = _poly_divexact(cur, cyclotomic_poly(d))
    return tuple(cur)


class _Context:
    """Per-level tables: reduction rows for zeta^e and polynomial products."""

    __slots__ = ("N", "phi", "red")

    def __init__(self, N: int):
        self.N = N
        poly = cyclotomic_poly(N)
        phi = len(poly) - 1
        self.phi = phi
        # red[e] = power-basis integer vector of zeta^e; e runs far enough to
        # fold any schoolbook product (degree 2*phi-2) and any exponent mod N
        top = tuple(-c for c in poly[:phi])  # x^phi = sum top[i] x^i
        count = max(N, 2 * phi - 1)
        rows: list[tuple[int, ...]] = []
        cur = [0] * phi
        cur[0] = 1
        rows.append(tuple(cur))
        for _ in range(1, count):
            lead = cur[phi - 1]
            cur = [0] + cur[: phi - 1]
            if lead:
                for i in range(phi):
                    t = top[i]
                    if t:
                        cur[i] += lead * t
            rows.append(tuple(cur))
        self.red = tuple(rows)

    def mul_vec(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        """Product of two integer power-basis vectors, reduced mod Phi_N."""
        phi = self.phi
        if phi == 1:
            return [a[0] * b[0]]
        nza = sum(1 for v in a if v)
        nzb = sum(1 for v in b if v)
        if nza == 0 or nzb == 0:
            return [0] * phi
        if nza * nzb <= 64:
            prod = self._conv_school(a, b)
        else:
            prod = self._conv_packed(a, b)
        out = list(prod[:phi])
        red = self.red
        for e in range(phi, 2 * phi - 1):
            c = prod[e]
            if c:
                row = red[e]
                for i in range(phi):
                    ri = row[i]
                    if ri:
                        out[i] += c * ri
        return out

    def _conv_school(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        phi = self.phi
        prod = [0] * (2 * phi - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        return prod

    def _conv_packed(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        # Kronecker substitution: pack signed coefficients into one big int,
        # multiply once, unpack balanced digits with borrow propagation.
        phi = self.phi
        amax = max(max(a), -min(a))
        bmax = max(max(b), -min(b))
        B = (phi * amax * bmax).bit_length() + 2
        xa = 0
        shift = 0
        for c in a:
            if c:
                xa += c << shift
            shift += B
        xb = 0
        shift = 0
        for c in b:
            if c:
                xb += c << shift
            shift += B
        x = xa * xb
        full = 1 << B
        half = full >> 1
        mask = full - 1
        out = []
        for _ in range(2 * phi - 1):
            d = x & mask
            if d >= half:
                d -= full
            x = (x - d) >> B
            out.append(d)
        if x:
            raise AssertionError("packed convolution leaked digits")
        return out


@lru_cache(maxsize=None)
def _context(N: int) -> _Context:
    return _Context(N)


def _normalize(nums: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        den = -den
        nums = [-v for v in nums]
    g = den
    for v in nums:
        if v:
            g = math.gcd(g, v)
            if g == 1:
                break
    if g > 1:
        nums = [v // g for v in nums]
        den //= g
    if den != 1 and not any(nums):
        den = 1
    return tuple(nums), den


class CycNum:
    """An element of Q(zeta_N) in reduced power-basis form."""

    __slots__ = ("level", "num", "den")

    def __init__(self, level: int, coeffs: Iterable[Rational] = (), den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        ctx = _context(level)
        vec: list[Rational] = list(coeffs)
        if len(vec) > ctx.phi:
            raise ValueError("coefficient vector longer than phi(N)")
        vec += [0] * (ctx.phi - len(vec))
        if all(isinstance(v, int) for v in vec):
            num, d = _normalize(list(vec), den)
        else:
            cs = [Fraction(v) / den for v in vec]
            common = 1
            for c in cs:
                common = math.lcm(common, c.denominator)
            num, d = _normalize([int(c * common) for c in cs], common)
        self.level = level
        self.num = num
        self.den = d

    # -- raw construction for internal hot paths (inputs already reduced) --
    @classmethod
    def _raw(cls, level: int, num: tuple[int, ...], den: int) -> "CycNum":
        self = object.__new__(cls)
        self.level = level
        self.num = num
        self.den = den
        return self

    @classmethod
    def zero(cls, level: int) -> "CycNum":
        return cls._raw(level, (0,) * _context(level).phi, 1)

    @classmethod
    def one(cls, level: int) -> "CycNum":
        return cls.from_rational(level, 1)

    @classmethod
    def from_rational(cls, level: int, r: Rational) -> "CycNum":
        r = Fraction(r)
        vec = [0] * _context(level).phi
        vec[0] = r.numerator
        return cls._raw(level, *_normalize(vec, r.denominator))

    @classmethod
    def from_terms(cls, level: int,
                   terms: Mapping[int, Rational] | Iterable[tuple[int, Rational]]
                   ) -> "CycNum":
        """Value sum c_e * zeta^e from (exponent, coefficient) terms."""
        ctx = _context(level)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, Rational] = {}
        for e, c in items:
            e %= level
            acc[e] = acc.get(e, 0) + c
        den = 1
        for c in acc.values():
            if isinstance(c, Fraction):
                den = math.lcm(den, c.denominator)
        vec = [0] * ctx.phi
        for e, c in acc.items():
            n = int(c * den)
            if n:
                row = ctx.red[e]
                for i in range(ctx.phi):
                    ri = row[i]
                    if ri:
                        vec[i] += n * ri
        return cls._raw(level, *_normalize(vec, den))

    # -- predicates and conversions --

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.num[0], self.den)

    def as_int(self) -> int:
        r = self.as_rational()
        if r.denominator != 1:
            raise ValueError(f"{self} is not a rational integer")
        return r.numerator

    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(n, self.den) for n in self.num)

    # -- arithmetic --

    def _check(self, other: "CycNum") -> None:
        if self.level != other.level:
            raise LevelMismatchError(
                f"levels differ: {self.level} vs {other.level}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycNum.from_rational(self.level, other)
        if not isinstance(other, CycNum):
            return NotImplemented
        self._check(other)
        ad, bd = self.den, other.den
        if ad == 1 and bd == 1:
            vec = [x + y for x, y in zip(self.num, other.num)]
            return CycNum._raw(self.level, tuple(vec), 1)
        vec = [x * bd + y * ad for x, y in zip(self.num, other.num)]
        return CycNum._raw(self.level, *_normalize(vec, ad * bd))

    __radd__ = __add__

    def __neg__(self):
        return CycNum._raw(self.level, tuple(-v for v in self.num), self.den)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycNum.from_rational(self.level, other)
        if not isinstance(other, CycNum):
            return NotImplemented
        return self.__add__(other.__neg__())

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 1:
                return self
            vec = [v * other for v in self.num]
            return CycNum._raw(self.level, *_normalize(vec, self.den))
        if isinstance(other, Fraction):
            vec = [v * other.numerator for v in self.num]
            return CycNum._raw(self.level,
                               *_normalize(vec, self.den * other.denominator))
        if not isinstance(other, CycNum):
            return NotImplemented
        self._check(other)
        ctx = _context(self.level)
        vec = ctx.mul_vec(self.num, other.num)
        d = self.den * other.den
        if d == 1:
            return CycNum._raw(self.level, tuple(vec), 1)
        return CycNum._raw(self.level, *_normalize(vec, d))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * Fraction(other.denominator, other.numerator)
        if not isinstance(other, CycNum):
            return NotImplemented
        return self * other.inverse()

    def inverse(self) -> "CycNum":
        """Multiplicative inverse via the product of Galois conjugates.

        b^-1 = (prod_{k != 1} sigma_k(b)) / Norm(b); the norm is rational so
        only one rational division is ever performed.
        """
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        N = self.level
        prod = CycNum.one(N)
        for k in range(2, N + 1):
            if math.gcd(k, N) == 1:
                prod = prod * self.galois(k)
        norm = self * prod
        r = norm.as_rational()  # norm of a nonzero element is a nonzero rational
        return prod * Fraction(r.denominator, r.numerator)

    def galois(self, k: int) -> "CycNum":
        """Image under sigma_k: zeta -> zeta^k, gcd(k, N) = 1."""
        N = self.level
        if math.gcd(k, N) != 1:
            raise ValueError(f"galois exponent {k} not invertible mod {N}")
        ctx = _context(N)
        vec = [0] * ctx.phi
        for i, c in enumerate(self.num):
            if c:
                row = ctx.red[(i * k) % N]
                for j in range(ctx.phi):
                    rj = row[j]
                    if rj:
                        vec[j] += c * rj
        return CycNum._raw(N, tuple(vec), self.den)

    def lift(self, M: int) -> "CycNum":
        """Reinterpret at level M; requires level | M."""
        if M % self.level:
            raise LevelMismatchError(f"{self.level} does not divide {M}")
        if M == self.level:
            return self
        k = M // self.level
        ctx = _context(M)
        vec = [0] * ctx.phi
        for i, c in enumerate(self.num):
            if c:
                row = ctx.red[i * k]
                for j in range(ctx.phi):
                    rj = row[j]
                    if rj:
                        vec[j] += c * rj
        return CycNum._raw(M, *_normalize(vec, self.den))

    # -- structure --

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycNum.from_rational(self.level, other)
        if not isinstance(other, CycNum):
            return NotImplemented
        self._check(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.level, self.num, self.den))

    def __bool__(self):
        return not self.is_zero()

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i, n in enumerate(self.num):
            if not n:
                continue
            c = Fraction(n, self.den)
            mag = -c if c < 0 else c
            if i == 0:
                body = str(mag)
            elif mag == 1:
                body = f"z{self.level}" if i == 1 else f"z{self.level}^{i}"
            else:
                body = (f"{mag}*z{self.level}" if i == 1
                        else f"{mag}*z{self.level}^{i}")
            parts.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(parts)
        return "-" + s[2:] if s.startswith("- ") else s[2:]

    def __repr__(self):
        return f"CycNum({self.level}, {self})"

    # -- serialization: list of [numerator, denominator, power] triples --

    def to_triples(self) -> list[list[int]]:
        out = []
        for i, n in enumerate(self.num):
            if n:
                f = Fraction(n, self.den)
                out.append([f.numerator, f.denominator, i])
        return out

    @classmethod
    def from_triples(cls, level: int, triples: Iterable[Sequence[int]]) -> "CycNum":
        terms = []
        for t in triples:
            n, d, p = t
            if d <= 0:
                raise ValueError("denominator must be positive")
            if not 0 <= p < _context(level).phi:
                raise ValueError(f"power {p} outside basis range at level {level}")
            terms.append((p, Fraction(n, d)))
        return cls.from_terms(level, terms)


def root(N: int, a: int) -> CycNum:
    """zeta_N^a as an element of Q(zeta_N)."""
    ctx = _context(N)
    return CycNum._raw(N, ctx.red[a % N], 1)


def lift(x: CycNum, M: int) -> CycNum:
    return x.lift(M)


class CycMatrix:
    """Immutable matrix over one cyclotomic field."""

    __slots__ = ("level", "nrows", "ncols", "entries")

    def __init__(self, level: int, rows: Iterable[Iterable[CycNum]]):
        ent = tuple(tuple(r) for r in rows)
        for r in ent:
            for x in r:
                if x.level != level:
                    raise LevelMismatchError("matrix entry at wrong level")
            if len(r) != len(ent[0]):
                raise ValueError("ragged rows")
        self.level = level
        self.nrows = len(ent)
        self.ncols = len(ent[0]) if ent else 0
        self.entries = ent

    def __getitem__(self, ij: tuple[int, int]) -> CycNum:
        return self.entries[ij[0]][ij[1]]

    def det(self) -> CycNum:
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        n = self.nrows
        if n == 0:
            return CycNum.one(self.level)
        if n <= 4:
            return self._det_laplace()
        return self._det_bareiss()

    def _det_laplace(self) -> CycNum:
        # division-free expansion, memoized on the remaining column set;
        # row i = nrows - len(cols) is always the one expanded
        n = self.nrows
        ent = self.entries
        memo: dict[tuple[int, ...], CycNum] = {}

        def rec(cols: tuple[int, ...]) -> CycNum:
            i = n - len(cols)
            if len(cols) == 1:
                return ent[i][cols[0]]
            got = memo.get(cols)
            if got is not None:
                return got
            acc = CycNum.zero(self.level)
            for t, c in enumerate(cols):
                x = ent[i][c]
                if x.is_zero():
                    continue
                sub = rec(cols[:t] + cols[t + 1:])
                term = x * sub
                acc = acc + term if t % 2 == 0 else acc - term
            memo[cols] = acc
            return acc

        return rec(tuple(range(n)))

    def _det_bareiss(self) -> CycNum:
        # fraction-free elimination; every division is exact in Z[zeta]
        ctx = _context(self.level)
        n = self.nrows
        scale = 1  # product of row denominators cleared upfront
        mat: list[list[tuple[int, ...]]] = []
        for row in self.entries:
            d = math.lcm(*[x.den for x in row])
            scale *= d
            mat.append([tuple(v * (d // x.den) for v in x.num) for x in row])
        sign = 1
        prev: tuple[int, ...] | None = None
        zero = (0,) * ctx.phi
        for k in range(n - 1):
            if not any(mat[k][k]):
                for r in range(k + 1, n):
                    if any(mat[r][k]):
                        mat[k], mat[r] = mat[r], mat[k]
                        sign = -sign
                        break
                else:
                    return CycNum.zero(self.level)
            pivot = mat[k][k]
            inv_num, inv_den = (None, 1)
            if prev is not None:
                inv_num, inv_den = _int_vec_inverse(ctx, prev)
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    num = [x - y for x, y in zip(ctx.mul_vec(pivot, mat[i][j]),
                                                 ctx.mul_vec(mat[i][k], mat[k][j]))]
                    if prev is not None:
                        num = ctx.mul_vec(num, inv_num)
                        q, bad = [], False
                        for v in num:
                            if v % inv_den:
                                bad = True
                                break
                            q.append(v // inv_den)
                        if bad:
                            raise ArithmeticError("inexact Bareiss division")
                        num = q
                    mat[i][j] = tuple(num)
                mat[i][k] = zero
            prev = pivot
        vec = mat[n - 1][n - 1]
        if sign < 0:
            vec = tuple(-v for v in vec)
        return CycNum._raw(self.level, *_normalize(list(vec), scale))


def _int_vec_inverse(ctx: _Context, vec: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """(numerator vector, positive denominator) of the inverse of an integer vector."""
    N = ctx.N
    prod = [0] * ctx.phi
    prod[0] = 1
    prod_t = tuple(prod)
    for k in range(2, N + 1):
        if math.gcd(k, N) == 1:
            conj = [0] * ctx.phi
            for i, c in enumerate(vec):
                if c:
                    row = ctx.red[(i * k) % N]
                    for j in range(ctx.phi):
                        rj = row[j]
                        if rj:
                            conj[j] += c * rj
            prod_t = tuple(ctx.mul_vec(prod_t, conj))
    nrm = ctx.mul_vec(prod_t, vec)
    if any(nrm[1:]):
        raise ArithmeticError("norm not rational")
    r = nrm[0]
    if r == 0:
        raise ZeroDivisionError("inverse of zero vector")
    if r < 0:
        return tuple(-v for v in prod_t), -r
    return prod_t, r


def solve_exact(A: CycMatrix, b: Sequence[CycNum]) -> list[CycNum] | None:
    """Exact solution of A x = b when consistent, None when inconsistent.

    A may be overdetermined but must have full column rank (ValueError
    otherwise).  Plain Gaussian elimination over the field; never
    approximates.
    """
    if len(b) != A.nrows:
        raise ValueError("right-hand side length mismatch")
    for x in b:
        if x.level != A.level:
            raise LevelMismatchError("rhs entry at wrong level")
    rows = [list(r) + [b[i]] for i, r in enumerate(A.entries)]
    m, n = A.nrows, A.ncols
    rank = 0
    for col in range(n):
        piv = next((r for r in range(rank, m)
                    if not rows[r][col].is_zero()), None)
        if piv is None:
            raise ValueError("coefficient matrix is column rank deficient")
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(m):
            if r != rank and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    for r in range(rank, m):
        if not rows[r][n].is_zero():
            return None
    return [rows[i][n] for i in range(n)]
