"""Maximal tori of GL_n over F_q in discrete-log coordinates.

A torus type is a partition of n (the cycle type of the twisting Weyl
element); its F-rational points T^F form prod_i Z/(q^{d_i}-1), one dlog
coordinate per block, and T^{F^m} for twist | m is (Z/(q^m-1))^n with d_i
consecutive coordinates per block.  All finite-field multiplicative groups
are modelled through a norm-compatible tower of generators g_d of
F_{q^d}^*, so that:

    embedding F_{q^d}^* -> F_{q^m}^*   is dlog scaling by (q^m-1)/(q^d-1),
    Frobenius x -> x^q                 is dlog multiplication by q,
    norms                              are exponent sums.

No field addition is ever required; everything below is integer
arithmetic on exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence, Union

from .abelian import (
    DEFAULT_BUDGET,
    AbChar,
    AbHom,
    EnumerationBudgetError,
    FinAbGroup,
    GrpElt,
    orbit,
    pullback,
)

ElementLike = Union[GrpElt, Sequence[int]]


def is_prime_power(q: int) -> bool:
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            while q % d == 0:
                q //= d
            return q == 1
        d += 1
    return True


@dataclass(frozen=True)
class GroupSpec:
    """GL_n over F_q."""

    n: int
    q: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("rank must be >= 1")
        if not is_prime_power(self.q):
            raise ValueError(f"q = {self.q} is not a prime power")

    @property
    def weyl_order(self) -> int:
        return math.factorial(self.n)

    @property
    def group_order(self) -> int:
        """|GL_n(F_q)| = prod (q^n - q^i)."""
        return math.prod(self.q**self.n - self.q**i for i in range(self.n))


@dataclass(frozen=True)
class TorusType:
    spec: GroupSpec
    blocks: tuple[int, ...]

    def __post_init__(self):
        b = tuple(sorted((int(d) for d in self.blocks), reverse=True))
        if sum(b) != self.spec.n or any(d < 1 for d in b):
            raise ValueError(f"{self.blocks} is not a partition of {self.spec.n}")
        object.__setattr__(self, "blocks", b)

    @property
    def twist_order(self) -> int:
        return math.lcm(*self.blocks)

    @property
    def label(self) -> str:
        return "+".join(str(d) for d in self.blocks)

    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for d in self.blocks:
            out.append(acc)
            acc += d
        return tuple(out)


def torus_from_label(spec: GroupSpec, label: str) -> TorusType:
    try:
        blocks = tuple(int(p) for p in label.split("+"))
    except ValueError:
        raise ValueError(f"bad torus label {label!r}") from None
    return TorusType(spec, blocks)


def enumerate_tori(spec: GroupSpec) -> list[TorusType]:
    """All torus types of GL_n, ascending lexicographic on the partition."""

    def parts(n: int, cap: int):
        if n == 0:
            yield ()
            return
        for d in range(min(n, cap), 0, -1):
            for rest in parts(n - d, d):
                yield (d,) + rest

    return [TorusType(spec, p) for p in sorted(parts(spec.n, spec.n))]


@dataclass(frozen=True)
class TorusPoints:
    type: TorusType
    level: int
    group: FinAbGroup


@lru_cache(maxsize=None)
def points(ttype: TorusType, m: int = 1) -> TorusPoints:
    q = ttype.spec.q
    if m == 1:
        moduli = tuple(q**d - 1 for d in ttype.blocks)
    elif m >= 1 and m % ttype.twist_order == 0:
        moduli = (q**m - 1,) * ttype.spec.n
    else:
        raise ValueError(
            f"level {m} invalid for twist order {ttype.twist_order}")
    return TorusPoints(ttype, m, FinAbGroup(moduli))


def _exps(ttype: TorusType, t: ElementLike, m: int = 1) -> tuple[int, ...]:
    if isinstance(t, GrpElt):
        if t.group != points(ttype, m).group:
            raise ValueError("element does not lie in this torus at this level")
        return t.exps
    pts = points(ttype, m)
    return GrpElt(pts.group, tuple(t)).exps


def frobenius(ttype: TorusType, m: int, t: ElementLike) -> GrpElt:
    """F acting on T^{F^m}: blockwise coordinate shift composed with q-power."""
    exps = _exps(ttype, t, m)
    pts = points(ttype, m)
    out = list(exps)
    for off, d in zip(ttype.offsets(), ttype.blocks):
        for r in range(d):
            out[off + r] = exps[off + (r - 1) % d] * ttype.spec.q
    return GrpElt(pts.group, tuple(out))


def embed(ttype: TorusType, m: int, t: ElementLike) -> GrpElt:
    """Embedding T^F into T^{F^m} along the generator tower."""
    exps = _exps(ttype, t, 1)
    q = ttype.spec.q
    Q = q**m - 1
    out = []
    for a, d in zip(exps, ttype.blocks):
        scale = Q // (q**d - 1)
        out.extend(a * scale * q**r for r in range(d))
    return GrpElt(points(ttype, m).group, tuple(out))


def norm_value(ttype: TorusType, m: int, t: ElementLike) -> GrpElt:
    """Norm T^{F^m} -> T^F: blockwise t * F(t) * ... * F^{m-1}(t) in dlogs.

    Block of size d with level-m coordinates (b_0, ..., b_{d-1}) maps to
    [sum_j b_{(-j mod d)} q^j mod (q^m-1)] / [(q^m-1)/(q^d-1)], reduced mod
    q^d-1; the sum is always divisible by the scale.
    """
    exps = _exps(ttype, t, m)
    q = ttype.spec.q
    Q = q**m - 1
    out = []
    for off, d in zip(ttype.offsets(), ttype.blocks):
        s = sum(exps[off + (-j) % d] * q**j for j in range(m)) % Q
        scale = Q // (q**d - 1)
        if s % scale:
            raise AssertionError("norm sum not divisible by embedding scale")
        out.append((s // scale) % (q**d - 1))
    return GrpElt(points(ttype, 1).group, tuple(out))


@lru_cache(maxsize=None)
def norm_hom(ttype: TorusType, m: int) -> AbHom:
    """The norm as a homomorphism of point groups, built on generators."""
    src = points(ttype, m).group
    tgt = points(ttype, 1).group
    images = []
    for i in range(src.rank):
        gen = [0] * src.rank
        gen[i] = 1
        images.append(norm_value(ttype, m, gen).exps)
    return AbHom(src, tgt, tuple(images))


def eigenvalues(ttype: TorusType, t: ElementLike, L: int) -> tuple[int, ...]:
    """Multiset of n eigenvalue dlogs at level L (sorted tuple).

    Block i with dlog a_i contributes a_i q^j (q^L-1)/(q^{d_i}-1) for
    j < d_i; requires d_i | L for every block.
    """
    exps = _exps(ttype, t, 1)
    q = ttype.spec.q
    QL = q**L - 1
    out = []
    for a, d in zip(exps, ttype.blocks):
        if L % d:
            raise ValueError(f"block size {d} does not divide level {L}")
        scale = QL // (q**d - 1)
        out.extend(a * q**j * scale % QL for j in range(d))
    return tuple(sorted(out))


def is_regular(ttype: TorusType, t: ElementLike) -> bool:
    ev = eigenvalues(ttype, t, ttype.twist_order)
    return len(set(ev)) == ttype.spec.n


@lru_cache(maxsize=None)
def regular_elements(ttype: TorusType) -> tuple[tuple[int, ...], ...]:
    """All regular dlog tuples of T^F, lexicographic order."""
    grp = points(ttype, 1).group
    if grp.order > DEFAULT_BUDGET:
        raise EnumerationBudgetError(
            f"torus of order {grp.order} exceeds budget {DEFAULT_BUDGET}")
    return tuple(exps for exps in product(*(range(m) for m in grp.moduli))
                 if is_regular(ttype, exps))


@lru_cache(maxsize=None)
def rs_ratio(ttype: TorusType) -> Fraction:
    """|T^F - T^F_rs| / |T^F|, exactly, by full enumeration."""
    order = points(ttype, 1).group.order
    return Fraction(order - len(regular_elements(ttype)), order)


@dataclass(frozen=True)
class QConditionReport:
    spec: GroupSpec
    threshold: Fraction
    ratios: tuple[tuple[TorusType, Fraction], ...]

    @property
    def ok(self) -> bool:
        return all(r < self.threshold for _, r in self.ratios)

    def __bool__(self) -> bool:
        return self.ok


@lru_cache(maxsize=None)
def check_q_condition(spec: GroupSpec) -> QConditionReport:
    """Strict bound |T^F - T^F_rs| / |T^F| < 2^(1 - 2|W|) for every torus."""
    threshold = Fraction(1, 2 ** (2 * spec.weyl_order - 1))
    ratios = tuple((tt, rs_ratio(tt)) for tt in enumerate_tori(spec))
    return QConditionReport(spec, threshold, ratios)


Pair = tuple[TorusType, AbChar]


def _check_pair(pair: Pair) -> None:
    ttype, chi = pair
    if chi.group != points(ttype, 1).group:
        raise ValueError("character is not on the rational points of the torus")


def geometric_conjugate(pair_a: Pair, pair_b: Pair) -> bool:
    """Whether two (torus, character) pairs are geometrically conjugate.

    Both characters are pulled back along the norms to the common level
    m = lcm of the twist orders, where both point groups are coordinatewise
    (Z/(q^m-1))^n, and compared up to the S_n coordinate action.
    """
    ta, chi_a = pair_a
    tb, chi_b = pair_b
    _check_pair(pair_a)
    _check_pair(pair_b)
    if ta.spec != tb.spec:
        raise ValueError("pairs over different groups")
    m = math.lcm(ta.twist_order, tb.twist_order)
    up_a = pullback(chi_a, norm_hom(ta, m))
    up_b = pullback(chi_b, norm_hom(tb, m))
    n = ta.spec.n
    if n == 1:
        return up_a == up_b
    swaps = [tuple(range(i)) + (i + 1, i) + tuple(range(i + 2, n))
             for i in range(n - 1)]
    return up_b in orbit(up_a, swaps)


def weyl_orbit(ttype: TorusType, t: ElementLike) -> tuple[tuple[int, ...], ...]:
    """Orbit of a T^F element under N(T)^F/T^F, as sorted dlog tuples.

    The quotient is generated by the blockwise Frobenii (dlog multiplication
    by q on one block) and the swaps of equal-size blocks; two regular
    elements are G^F-conjugate iff they share an orbit.
    """
    exps = _exps(ttype, t, 1)
    q = ttype.spec.q
    moduli = points(ttype, 1).group.moduli
    k = len(ttype.blocks)
    swaps = [(i, j) for i in range(k) for j in range(i + 1, k)
             if ttype.blocks[i] == ttype.blocks[j]]
    seen = {exps}
    frontier = [exps]
    while frontier:
        nxt = []
        for e in frontier:
            images = []
            for i in range(k):
                im = list(e)
                im[i] = im[i] * q % moduli[i]
                images.append(tuple(im))
            for i, j in swaps:
                im = list(e)
                im[i], im[j] = im[j], im[i]
                images.append(tuple(im))
            for im in images:
                if im not in seen:
                    seen.add(im)
                    nxt.append(im)
        frontier = nxt
    return tuple(sorted(seen))


@dataclass(frozen=True, order=True)
class GeomClassId:
    """Canonical label of a geometric conjugacy class of pairs."""

    level: int
    residues: tuple[int, ...]


def geom_class_id(pair: Pair) -> GeomClassId:
    """Normal form at reference level L = lcm(1..n): the sorted multiset of
    lifted Frobenius-orbit members of the character exponents, blockwise."""
    ttype, chi = pair
    _check_pair(pair)
    n, q = ttype.spec.n, ttype.spec.q
    L = math.lcm(*range(1, n + 1))
    QL = q**L - 1
    out = []
    for c, d in zip(chi.cexps, ttype.blocks):
        scale = QL // (q**d - 1)
        out.extend(c * q**j * scale % QL for j in range(d))
    return GeomClassId(L, tuple(sorted(out)))
