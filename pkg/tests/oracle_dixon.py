"""Independent character table of GL_2(F_3) by the Burnside-Dixon method.

Everything here is built from the 48 explicit matrices over F_3, with no
input from the library's value formulas: conjugacy classes by brute force,
class-algebra constants, simultaneous eigenvector refinement mod a prime
p = 73 (p = 1 mod 24, the group exponent, and p > 2 sqrt(48) so integer
character values lift uniquely), then an exact discrete-Fourier lift of
each value into Q(zeta_8) on the classes that matter downstream.

The only shared convention with the library is the generator tower used to
name torus elements: 2 generates F_3^*, and u = 1 + x generates
F_9^* = F_3[x]/(x^2+1) acting on the basis (1, x) as [[1, -1], [1, 1]].
Any other generator choice permutes whole rows, which is why consumers
compare row multisets, never row order.
"""

import math
from functools import lru_cache
from itertools import product

from glchar.cyclotomic import CycNum

P3 = 3
MOD = 48  # |GL_2(F_3)| = (9-1)(9-3)

Mat = tuple[int, int, int, int]  # row-major (a, b, c, d) over F_3


def mmul(x: Mat, y: Mat) -> Mat:
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % P3, (a * f + b * h) % P3,
            (c * e + d * g) % P3, (c * f + d * h) % P3)


def mdet(x: Mat) -> int:
    return (x[0] * x[3] - x[1] * x[2]) % P3


def minv(x: Mat) -> Mat:
    a, b, c, d = x
    di = pow(mdet(x), -1, P3)
    return (d * di % P3, -b * di % P3, -c * di % P3, a * di % P3)


IDENT: Mat = (1, 0, 0, 1)


def group_elements() -> list[Mat]:
    return [m for m in product(range(P3), repeat=4) if mdet(m) != 0]


def element_order(x: Mat) -> int:
    k, y = 1, x
    while y != IDENT:
        y = mmul(y, x)
        k += 1
    return k


@lru_cache(maxsize=None)
def _classes() -> tuple[list[frozenset], dict[Mat, int]]:
    elems = group_elements()
    assert len(elems) == MOD
    left: set[Mat] = set(elems)
    classes: list[frozenset] = []
    while left:
        x = min(left)
        orb = frozenset(mmul(mmul(g, x), minv(g)) for g in elems)
        classes.append(orb)
        left -= orb
    classes.sort(key=lambda c: (len(c), min(c)))
    class_of = {m: i for i, c in enumerate(classes) for m in c}
    return classes, class_of


# ------------------------------------------------------- F_p linear algebra

def _rref(rows: list[list[int]], p: int) -> list[list[int]]:
    rows = [r[:] for r in rows]
    pivots = []
    rank = 0
    for col in range(len(rows[0]) if rows else 0):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [v * inv % p for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] % p:
                f = rows[r][col]
                rows[r] = [(v - f * w) % p for v, w in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    return [r for r in rows[:rank]]


def _pivot_cols(rref_rows: list[list[int]]) -> list[int]:
    return [next(i for i, v in enumerate(r) if v) for r in rref_rows]


def _nullspace(mat: list[list[int]], p: int) -> list[list[int]]:
    n = len(mat[0])
    rr = _rref(mat, p)
    piv = _pivot_cols(rr)
    free = [c for c in range(n) if c not in piv]
    out = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for r, pc in zip(rr, piv):
            v[pc] = (-r[fc]) % p
        out.append(v)
    return out


# --------------------------------------------------------- the Dixon table

@lru_cache(maxsize=None)
def dixon_table():
    """Characters of GL_2(F_3) as mod-p rows plus exact dims.

    Returns (classes, class_of, reps, dims, chi_p, p) where chi_p[r][k] is
    the value of row r on class k in F_p.
    """
    classes, class_of = _classes()
    nc = len(classes)
    reps = [min(c) for c in classes]
    sizes = [len(c) for c in classes]
    ident_k = class_of[IDENT]
    inv_class = [class_of[minv(reps[k])] for k in range(nc)]

    # class-algebra constants: counting pairs with product in a fixed class
    counts = [[[0] * nc for _ in range(nc)] for _ in range(nc)]
    elems = group_elements()
    for x in elems:
        i = class_of[x]
        for y in elems:
            counts[i][class_of[y]][class_of[mmul(x, y)]] += 1
    a = [[[counts[i][j][k] // sizes[k] for k in range(nc)]
          for j in range(nc)] for i in range(nc)]

    exponent = 1
    for r in reps:
        exponent = math.lcm(exponent, element_order(r))
    p = 73
    assert (p - 1) % exponent == 0 and p * p > 4 * MOD

    # simultaneous eigenvectors of the class matrices: A_i x = omega_i x.
    # Keep whole eigenspaces together; later class matrices split them.
    spaces = [[[1 if i == j else 0 for j in range(nc)] for i in range(nc)]]
    for i in range(nc):
        Ai = [[a[i][j][k] for k in range(nc)] for j in range(nc)]
        nxt = []
        for basis in spaces:
            if len(basis) == 1:
                nxt.append(basis)
                continue
            rr = _rref(basis, p)
            piv = _pivot_cols(rr)
            k = len(rr)
            imgs = [[sum(Ai[j][c] * v[c] for c in range(nc)) % p
                     for j in range(nc)] for v in rr]
            # coords in the rref basis are read off at the pivot columns
            R = [[imgs[t][piv[s]] for t in range(k)] for s in range(k)]
            remaining = k
            for lam in range(p):
                M = [[(R[s][t] - (lam if s == t else 0)) % p
                      for t in range(k)] for s in range(k)]
                ns = _nullspace(M, p)
                if ns:
                    sub = [[sum(u[t] * rr[t][c] for t in range(k)) % p
                            for c in range(nc)] for u in ns]
                    nxt.append(_rref(sub, p))
                    remaining -= len(ns)
                    if remaining == 0:
                        break
            assert remaining == 0, "class matrix not diagonalizable mod p"
        spaces = nxt
    assert all(len(b) == 1 for b in spaces), "refinement incomplete"
    assert len(spaces) == nc

    rows = []
    for (v,) in spaces:
        scale = pow(v[ident_k], -1, p)
        omega = [x * scale % p for x in v]
        s = sum(omega[k] * omega[inv_class[k]] * pow(sizes[k], -1, p)
                for k in range(nc)) % p
        d2 = MOD * pow(s, -1, p) % p
        dim = next(d for d in range(1, 14) if d * d % p == d2)
        chi = [dim * omega[k] * pow(sizes[k], -1, p) % p for k in range(nc)]
        rows.append((dim, chi))
    rows.sort()
    dims = [d for d, _ in rows]
    chi_p = [c for _, c in rows]
    assert sorted(dims) == [1, 1, 2, 2, 2, 3, 3, 4]
    assert sum(d * d for d in dims) == MOD
    return classes, class_of, reps, dims, chi_p, p


def _primitive_root(p: int) -> int:
    for g in range(2, p):
        seen = set()
        x = 1
        for _ in range(p - 1):
            x = x * g % p
            seen.add(x)
        if len(seen) == p - 1:
            return g
    raise AssertionError


def lift_value(chi_row: list[int], g: Mat, p: int, level: int = 8) -> CycNum:
    """Exact value of the character at g, as a CycNum at the given level.

    chi(g) = sum_j m_j zeta_e^j with e = order(g); the multiplicities are
    recovered by a discrete Fourier transform over F_p and must come out as
    small nonnegative integers.
    """
    _, class_of = _classes()
    e = element_order(g)
    if level % e:
        raise ValueError(f"element order {e} does not divide level {level}")
    exponent = 24
    w24 = pow(_primitive_root(p), (p - 1) // exponent, p)
    we = pow(w24, exponent // e, p)
    einv = pow(e, -1, p)
    terms = {}
    y = IDENT
    vals = []
    for _ in range(e):
        vals.append(chi_row[class_of[y]])
        y = mmul(y, g)
    for j in range(e):
        m = einv * sum(vals[l] * pow(we, -j * l, p) for l in range(e)) % p
        if m:
            assert m <= 6, "lifted multiplicity out of range"
            terms[j * (level // e)] = m
    return CycNum.from_terms(level, terms)


# generator conventions shared with the library's dlog model
GEN_SPLIT = 2                      # generates F_3^*
GEN_ELLIPTIC: Mat = (1, 2, 1, 1)   # multiplication by 1 + x on F_9, basis (1, x)


def split_matrix(i: int, j: int) -> Mat:
    return (pow(GEN_SPLIT, i, P3), 0, 0, pow(GEN_SPLIT, j, P3))


def elliptic_matrix(a: int) -> Mat:
    m = IDENT
    for _ in range(a % 8):
        m = mmul(m, GEN_ELLIPTIC)
    return m


@lru_cache(maxsize=None)
def gl2_f3_restricted_rows():
    """Oracle rows restricted to the regular torus elements.

    Returns a list (one entry per irreducible) of (dim, values) where
    values maps ('1+1', (i, j)) and ('2', (a,)) keys to CycNum at level 8.
    """
    classes, class_of, reps, dims, chi_p, p = dixon_table()
    assert element_order(GEN_ELLIPTIC) == 8
    split_regs = [(0, 1), (1, 0)]
    ell_regs = [1, 2, 3, 5, 6, 7]  # dlogs off the multiples of q+1=4
    out = []
    for dim, chi in zip(dims, chi_p):
        values = {}
        for i, j in split_regs:
            values[("1+1", (i, j))] = lift_value(chi, split_matrix(i, j), p)
        for a in ell_regs:
            values[("2", (a,))] = lift_value(chi, elliptic_matrix(a), p)
        out.append((dim, values))
    return out
