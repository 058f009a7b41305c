"""Recovery of the parameter map from character values on regular elements.

The central operation is sparse_decompose: given the restriction of a class
function to the regular locus of one torus, find the unique expansion as an
integer combination of at most |W| distinct torus characters.  The search
is exhaustive over character subsets, so uniqueness is established by scan,
never assumed.  recover_E assembles the per-torus expansions of one sheet
row into the geometric class label and the unipotence flag;
gram_independence and verify_dl_consistency are the audit operations for
the independence step and the known GL_2 decomposition pattern.

Every recovery entry point refuses to run when the regular-locus density
gate fails (QConditionViolated): outside the gate the uniqueness guarantee
is void and no output would be trustworthy.

Performance note: the subset scan dominates.  Subsets of size <= 2 are
screened with pure integer arithmetic on cached shifted value vectors (the
first sample equation is divided by the first character, which turns the
2x2 solve into one pivot division); every surviving candidate is still
verified against every regular element, so the screen affects speed only,
never which expansions are accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

from .abelian import AbChar
from .cyclotomic import CycNum, CycMatrix, _context, root
from .sheets import (
    CharacterSheet,
    IrrLabel,
    SheetValidationError,
    validate_sheet,
)
from .tori import (
    GeomClassId,
    GroupSpec,
    TorusType,
    check_q_condition,
    geom_class_id,
    points,
    regular_elements,
)

__all__ = [
    "QConditionViolated",
    "NoExpansionError",
    "NonUniqueError",
    "RecoveryInconsistencyError",
    "Expansion",
    "RecoveryReport",
    "GramReport",
    "ConsistencyReport",
    "sparse_decompose",
    "recover_E",
    "is_unipotent",
    "gram_independence",
    "verify_dl_consistency",
]


class QConditionViolated(RuntimeError):
    """Recovery was attempted for a group failing the density gate."""

    def __init__(self, report):
        self.report = report
        worst_t, worst_r = max(report.ratios, key=lambda p: p[1])
        super().__init__(
            f"density gate fails for GL_{report.spec.n}(F_{report.spec.q}): "
            f"torus {worst_t.label} has non-regular ratio {worst_r}, "
            f"not < {report.threshold}")


class NoExpansionError(ValueError):
    """No short integer character combination matches the input function."""


class NonUniqueError(RuntimeError):
    """Two distinct valid expansions match the same input function."""

    def __init__(self, msg: str, expansions: tuple["Expansion", ...]):
        self.expansions = expansions
        super().__init__(msg)


class RecoveryInconsistencyError(RuntimeError):
    """Recovered data violates a structural guarantee."""


def _require_gate(spec: GroupSpec):
    report = check_q_condition(spec)
    if not report.ok:
        raise QConditionViolated(report)
    return report


@dataclass(frozen=True)
class Expansion:
    """An exact expansion f = sum of c_i * theta_i on the regular locus.

    Characters are pairwise distinct and listed in lexicographic exponent
    order; every coefficient is a nonzero integer.  m = 0 encodes the zero
    function.
    """

    torus: TorusType
    terms: tuple[tuple[AbChar, int], ...]

    def __post_init__(self):
        grp = points(self.torus, 1).group
        seen = set()
        for th, c in self.terms:
            if th.group != grp:
                raise ValueError("character is not on the torus points")
            if not isinstance(c, int) or c == 0:
                raise ValueError(f"coefficient {c!r} is not a nonzero integer")
            if th.cexps in seen:
                raise ValueError(f"repeated character {th.cexps}")
            seen.add(th.cexps)
        object.__setattr__(
            self, "terms", tuple(sorted(self.terms, key=lambda p: p[0].cexps)))

    @property
    def m(self) -> int:
        return len(self.terms)

    def support(self) -> tuple[AbChar, ...]:
        return tuple(th for th, _ in self.terms)

    def coefficient(self, theta: AbChar) -> int:
        for th, c in self.terms:
            if th == theta:
                return c
        return 0

    def evaluate(self, exps: Sequence[int], level: int | None = None) -> CycNum:
        """Value of the expansion at a point, as one cyclotomic number."""
        grp = points(self.torus, 1).group
        L = grp.exponent
        N = L if level is None else level
        if N % L:
            raise ValueError(f"exponent {L} does not divide level {N}")
        lift = N // L
        g = grp.element(exps)
        acc = CycNum.zero(N)
        for th, c in self.terms:
            acc = acc + root(N, lift * th.value_exponent(g.exps)) * c
        return acc

    def describe(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*theta{th.cexps}" for th, c in self.terms)


@dataclass(frozen=True)
class RecoveryReport:
    """Per-torus expansions of one irreducible plus the derived labels."""

    label: str
    expansions: tuple[Expansion, ...]
    epsilon: GeomClassId
    unipotent: bool

    def expansion(self, ttype: TorusType) -> Expansion:
        for e in self.expansions:
            if e.torus == ttype:
                return e
        raise KeyError(f"no expansion for torus {ttype.label}")

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "expansions": [
                {"torus": e.torus.label,
                 "terms": [{"character": list(th.cexps), "coefficient": c}
                           for th, c in e.terms]}
                for e in self.expansions],
            "epsilon": {"level": self.epsilon.level,
                        "residues": list(self.epsilon.residues)},
            "unipotent": self.unipotent,
        }


# -- solver tables ----------------------------------------------------------

class _TorusSolver:
    """Immutable per-(torus, level) tables shared by every decomposition.

    table[i][s] is the exponent of zeta_level taken by character i at the
    s-th regular element; exponents are linear in the character index, so
    the column of pairwise differences of two characters is the table row
    of their difference character.  probes and pair pivots are cached here
    because they do not depend on the input function.
    """

    def __init__(self, ttype: TorusType, level: int):
        grp = points(ttype, 1).group
        L = grp.exponent
        if level % L:
            raise ValueError(
                f"torus exponent {L} does not divide zeta level {level}")
        self.ttype = ttype
        self.level = level
        self.group = grp
        self.regs = regular_elements(ttype)
        ctx = _context(level)
        self.red = ctx.red
        self.phi = ctx.phi
        lift = level // L
        cexps = list(product(*(range(m) for m in grp.moduli)))
        self.chars = tuple(AbChar(grp, ce) for ce in cexps)
        self.table = [
            [lift * ch.value_exponent(e) % level for e in self.regs]
            for ch in self.chars
        ]
        # mixed-radix index of the difference character, per ordered pair
        strides = []
        acc = 1
        for m in reversed(grp.moduli):
            strides.append(acc)
            acc *= m
        strides.reverse()
        moduli = grp.moduli
        self.delta_idx = [
            [sum((b - a) % m * st for a, b, m, st
                 in zip(ca, cb, moduli, strides))
             for cb in cexps]
            for ca in cexps
        ]
        # probe[d]: first sample where the difference character d moves off
        # its value at sample 0; -1 = constant on the locus, -2 = unset
        self._probe = [-2] * len(cexps)
        self._pivot: dict[tuple[int, int], tuple[int, int, tuple[int, ...]]] = {}

    def probe(self, di: int) -> int:
        s1 = self._probe[di]
        if s1 != -2:
            return s1
        rowd = self.table[di]
        d0 = rowd[0]
        s1 = -1
        for s in range(1, len(rowd)):
            if rowd[s] != d0:
                s1 = s
                break
        self._probe[di] = s1
        return s1

    def pivot(self, d0: int, d1: int) -> tuple[int, int, tuple[int, ...]]:
        """First nonzero coordinate of zeta^d1 - zeta^d0, with the full row."""
        out = self._pivot.get((d0, d1))
        if out is None:
            w = tuple(b - a for a, b in zip(self.red[d0], self.red[d1]))
            i0 = next(i for i, v in enumerate(w) if v)
            out = (i0, w[i0], w)
            self._pivot[(d0, d1)] = out
        return out


@lru_cache(maxsize=None)
def _solver(ttype: TorusType, level: int) -> _TorusSolver:
    return _TorusSolver(ttype, level)


def _mul_root(vec: Sequence[int], e: int, red, N: int) -> tuple[int, ...]:
    """Integer power-basis vector times zeta^e, reduced."""
    out = None
    for i, v in enumerate(vec):
        if v:
            row = red[(i + e) % N]
            if out is None:
                out = [v * r for r in row]
            else:
                out = [o + v * r for o, r in zip(out, row)]
    if out is None:
        return (0,) * len(red[0])
    return tuple(out)


def _verify(solver: _TorusSolver, fvec, idxs, coeffs) -> bool:
    """Exact check of sum c_i theta_i = f on every regular element."""
    red, table, phi = solver.red, solver.table, solver.phi
    rows = [table[i] for i in idxs]
    for s in range(len(solver.regs)):
        acc = [0] * phi
        for trow, c in zip(rows, coeffs):
            acc = [a + c * r for a, r in zip(acc, red[trow[s]])]
        if tuple(acc) != fvec[s]:
            return False
    return True


def _scan_singles(solver: _TorusSolver, fvec, cap: int) -> list[tuple[int, int]]:
    """All valid one-term expansions (index, coefficient), index order."""
    red, table, N = solver.red, solver.table, solver.level
    hits: list[tuple[int, int]] = []
    for ia in range(len(solver.chars)):
        g0 = _mul_root(fvec[0], (N - table[ia][0]) % N, red, N)
        c = g0[0]
        if c == 0 or any(g0[1:]):
            continue
        if _verify(solver, fvec, (ia,), (c,)):
            hits.append((ia, c))
            if len(hits) >= cap:
                break
    return hits


def _scan_pairs(solver: _TorusSolver, fvec, stripe: int, step: int,
                cap: int | None = None) -> list[tuple[int, int, int, int]]:
    """All valid two-term expansions (ia, ib, ca, cb) with ia in one stripe.

    Candidates are cut down before any vector work: the two sample equations
    c_a + c_b zeta^{d} = f(s) zeta^{-u} give c_b by one pivot division, and
    non-integers or zeros reject immediately.
    """
    N, red, phi = solver.level, solver.red, solver.phi
    table, didx, probes = solver.table, solver.delta_idx, solver._probe
    K = len(solver.chars)
    pivot = solver.pivot
    probe = solver.probe
    shift_cache: dict[tuple[int, int], tuple[int, ...]] = {}

    def shift(s: int, e: int) -> tuple[int, ...]:
        key = (s, e)
        v = shift_cache.get(key)
        if v is None:
            v = _mul_root(fvec[s], (N - e) % N, red, N)
            shift_cache[key] = v
        return v

    hits: list[tuple[int, int, int, int]] = []
    for ia in range(stripe, K, step):
        ta = table[ia]
        g0 = shift(0, ta[0])
        drow = didx[ia]
        for ib in range(ia + 1, K):
            di = drow[ib]
            s1 = probes[di]
            if s1 == -2:
                s1 = probe(di)
            if s1 < 0:
                # difference character constant on the locus: the pair is
                # dependent there, which the density gate rules out
                continue
            dcol = table[di]
            d0 = dcol[0]
            d1 = dcol[s1]
            i0, w0, w = pivot(d0, d1)
            g1 = shift(s1, ta[s1])
            cb, rem = divmod(g1[i0] - g0[i0], w0)
            if rem or cb == 0:
                continue
            ok = True
            for t in range(phi):
                if cb * w[t] != g1[t] - g0[t]:
                    ok = False
                    break
            if not ok:
                continue
            row0 = red[d0]
            ca = g0[0] - cb * row0[0]
            if ca == 0:
                continue
            for t in range(1, phi):
                if g0[t] != cb * row0[t]:
                    ok = False
                    break
            if not ok:
                continue
            if _verify(solver, fvec, (ia, ib), (ca, cb)):
                hits.append((ia, ib, ca, cb))
                if cap is not None and len(hits) >= cap:
                    return hits
    return hits


def _pair_worker(args):
    n, q, blocks, level, fvec, stripe, step = args
    solver = _solver(TorusType(GroupSpec(n, q), blocks), level)
    return _scan_pairs(solver, fvec, stripe, step)


def _solve_subset_reference(solver: _TorusSolver, fvec,
                            idxs: Sequence[int]) -> tuple[int, ...] | None:
    """Reference solve: rational Gauss-Jordan on the power-basis expansion.

    Every sample element contributes phi scalar equations, all of which are
    processed, so consistency of the eliminated rows is already a full
    verification.  Returns the coefficients when the system has a unique
    exact solution made of nonzero integers, else None (no solution, a
    non-integer or zero coefficient, or a rank-deficient subset).
    """
    m = len(idxs)
    if m == 0:
        raise ValueError("empty subset has no system to solve")
    red, table, phi = solver.red, solver.table, solver.phi
    rows: list[tuple[int, list[Fraction], Fraction]] = []
    for s in range(len(solver.regs)):
        fs = fvec[s]
        srows = [red[table[i][s]] for i in idxs]
        for t in range(phi):
            co = [Fraction(r[t]) for r in srows]
            rhs = Fraction(fs[t])
            for piv, prow, prhs in rows:
                fac = co[piv]
                if fac:
                    co = [c - fac * pc for c, pc in zip(co, prow)]
                    rhs = rhs - fac * prhs
            lead = next((j for j, c in enumerate(co) if c), None)
            if lead is None:
                if rhs:
                    return None
                continue
            inv = 1 / co[lead]
            co = [c * inv for c in co]
            rhs = rhs * inv
            for k, (piv, prow, prhs) in enumerate(rows):
                fac = prow[lead]
                if fac:
                    rows[k] = (piv,
                               [c - fac * nc for c, nc in zip(prow, co)],
                               prhs - fac * rhs)
            rows.append((lead, co, rhs))
    if len(rows) < m:
        return None
    sol: list[Fraction] = [Fraction(0)] * m
    for piv, _, rhs in rows:
        sol[piv] = rhs
    if any(c.denominator != 1 or c == 0 for c in sol):
        return None
    return tuple(int(c) for c in sol)


# -- the subset search ------------------------------------------------------

def sparse_decompose(f: Mapping[tuple[int, ...], CycNum], T: TorusType,
                     bound: int | None = None, *, exhaustive: bool = True,
                     jobs: int = 1) -> Expansion:
    """The unique expansion of f as <= bound nonzero integer character terms.

    f must be total on the regular locus of T (dlog tuples to cyclotomic
    values).  The search runs over all character subsets of size 0..bound
    in lexicographic order; a subset is accepted when the square system cut
    from the first independent sample rows has a nonzero-integer solution
    that matches f on every regular element.  With exhaustive=True (the
    default) the whole space is scanned and a second valid expansion raises
    NonUniqueError; exhaustive=False returns the first valid expansion.

    jobs > 1 splits the two-term scan over worker processes; results are
    merged in subset order, so the outcome does not depend on scheduling.
    """
    spec = T.spec
    _require_gate(spec)
    if bound is None:
        bound = spec.weyl_order
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    regs = regular_elements(T)
    grp = points(T, 1).group
    keyed: dict[tuple[int, ...], CycNum] = {}
    for k, v in f.items():
        keyed[tuple(a % m for a, m in zip(tuple(k), grp.moduli))] = v
    regset = set(regs)
    missing = [e for e in regs if e not in keyed]
    extra = sorted(set(keyed) - regset)
    if missing or extra:
        raise ValueError(
            f"function domain does not match the regular locus of "
            f"{T.label}: missing {missing[:3]}, extra {extra[:3]}")
    L = grp.exponent
    level = math.lcm(L, *(v.level for v in keyed.values()))
    vals = [keyed[e].lift(level) for e in regs]
    for e, v in zip(regs, vals):
        if v.den != 1:
            # integer combinations of roots of unity always have unit
            # denominator in the canonical form, so nothing can match
            raise NoExpansionError(
                f"value at {e} has denominator {v.den}; no integer "
                f"character combination matches on torus {T.label}")
    fvec = [v.num for v in vals]
    solver = _solver(T, level)
    K = len(solver.chars)
    bound = min(bound, K)

    found: list[tuple[tuple[int, ...], tuple[int, ...]]] = []

    def push(idxs, coeffs) -> bool:
        found.append((tuple(idxs), tuple(coeffs)))
        if not exhaustive:
            return True
        return len(found) >= 2

    done = False
    if all(not any(v) for v in fvec):
        done = push((), ())
    if not done and bound >= 1:
        cap = 1 if not exhaustive else 2 - len(found)
        for ia, c in _scan_singles(solver, fvec, cap):
            done = push((ia,), (c,))
            if done:
                break
    if not done and bound >= 2:
        if jobs > 1:
            from concurrent.futures import ProcessPoolExecutor
            args = [(spec.n, spec.q, T.blocks, level, fvec, w, jobs)
                    for w in range(jobs)]
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                parts = list(pool.map(_pair_worker, args))
            pair_hits = sorted(h for part in parts for h in part)
        else:
            cap = 1 if not exhaustive else 2 - len(found)
            pair_hits = _scan_pairs(solver, fvec, 0, 1, cap)
        for ia, ib, ca, cb in pair_hits:
            done = push((ia, ib), (ca, cb))
            if done:
                break
    if not done:
        for size in range(3, bound + 1):
            for idxs in combinations(range(K), size):
                coeffs = _solve_subset_reference(solver, fvec, idxs)
                if coeffs is not None:
                    done = push(idxs, coeffs)
                    if done:
                        break
            if done:
                break

    if not found:
        raise NoExpansionError(
            f"no expansion with at most {bound} nonzero integer terms "
            f"matches the function on torus {T.label} at q = {spec.q}")
    expansions = tuple(
        Expansion(T, tuple((solver.chars[i], c)
                           for i, c in zip(idxs, coeffs)))
        for idxs, coeffs in found)
    if len(found) >= 2:
        a, b = expansions[0], expansions[1]
        raise NonUniqueError(
            f"two valid expansions on torus {T.label}: "
            f"[{a.describe()}] and [{b.describe()}]", (a, b))
    return expansions[0]


# -- assembled operations ---------------------------------------------------

def recover_E(sheet: CharacterSheet, label: str, *, validate: bool = True,
              exhaustive: bool = True, jobs: int = 1) -> RecoveryReport:
    """Per-torus expansions of one row, with the shared geometric class.

    Checks, and reports as hard errors: at least one torus has nonempty
    support; every support has at most |W| terms; all nonempty supports
    land in one geometric conjugacy class.  The unipotence flag records
    whether the trivial character appears in some support.
    """
    spec = sheet.spec
    _require_gate(spec)
    if validate:
        report = validate_sheet(sheet)
        if not report.ok:
            raise SheetValidationError(report)
    row = sheet.row(label)
    expansions = tuple(
        sparse_decompose(row.values[tt.blocks], tt, spec.weyl_order,
                         exhaustive=exhaustive, jobs=jobs)
        for tt in sheet.tori)
    if all(e.m == 0 for e in expansions):
        raise RecoveryInconsistencyError(
            f"{label}: empty support on every torus")
    for e in expansions:
        if e.m > spec.weyl_order:
            raise RecoveryInconsistencyError(
                f"{label} on {e.torus.label}: {e.m} terms exceed "
                f"the bound {spec.weyl_order}")
    tagged: list[tuple[str, tuple[int, ...], GeomClassId]] = []
    for e in expansions:
        for th, _ in e.terms:
            tagged.append((e.torus.label, th.cexps, geom_class_id((e.torus, th))))
    ids = {gid for _, _, gid in tagged}
    if len(ids) != 1:
        items = ", ".join(f"{t}:{ce} -> {gid.residues}" for t, ce, gid in tagged)
        raise RecoveryInconsistencyError(
            f"{label}: supports span {len(ids)} geometric classes ({items})")
    unipotent = any(th.is_trivial() for e in expansions for th, _ in e.terms)
    return RecoveryReport(label, expansions, tagged[0][2], unipotent)


def is_unipotent(sheet: CharacterSheet, label: str, *, validate: bool = True,
                 exhaustive: bool = False, jobs: int = 1) -> bool:
    """Whether the row is constant on every regular locus.

    The constancy answer is cross-checked against the recovered supports
    (trivial character present somewhere); disagreement is a hard error,
    since both routes must describe the same representation.
    """
    spec = sheet.spec
    _require_gate(spec)
    if validate:
        report = validate_sheet(sheet)
        if not report.ok:
            raise SheetValidationError(report)
    row = sheet.row(label)
    constant = True
    for tt in sheet.tori:
        vals = row.values[tt.blocks]
        first = vals[regular_elements(tt)[0]]
        if any(v != first for v in vals.values()):
            constant = False
            break
    rep = recover_E(sheet, label, validate=False, exhaustive=exhaustive,
                    jobs=jobs)
    if constant != rep.unipotent:
        raise RecoveryInconsistencyError(
            f"{label}: constancy test says {constant} but the trivial "
            f"character is {'present' if rep.unipotent else 'absent'} "
            f"in the recovered supports")
    return constant


@dataclass(frozen=True)
class GramReport:
    torus: TorusType
    size: int
    det: CycNum

    @property
    def nonzero(self) -> bool:
        return not self.det.is_zero()

    def __bool__(self) -> bool:
        return self.nonzero


def gram_independence(T: TorusType, chars: Sequence[AbChar], *,
                      elements: Iterable[tuple[int, ...]] | None = None
                      ) -> GramReport:
    """Exact Gram determinant of characters paired over the regular locus.

    G[i][j] = sum over regular s of theta_i(s) * theta_j(s^-1); a nonzero
    determinant certifies linear independence of the restrictions.  The
    elements argument overrides the summation domain (used to exercise the
    full-orthogonality case in tests).
    """
    spec = T.spec
    _require_gate(spec)
    grp = points(T, 1).group
    k = len(chars)
    if not 1 <= k <= 2 * spec.weyl_order:
        raise ValueError(
            f"need between 1 and {2 * spec.weyl_order} characters, got {k}")
    if len({ch.cexps for ch in chars}) != k:
        raise ValueError("characters must be pairwise distinct")
    for ch in chars:
        if ch.group != grp:
            raise ValueError("character is not on the torus points")
    domain = tuple(elements) if elements is not None else regular_elements(T)
    L = grp.exponent
    cols = [[ch.value_exponent(e) for e in domain] for ch in chars]
    cache: dict[tuple[int, int], CycNum] = {}

    def entry(i: int, j: int) -> CycNum:
        # symmetric: s -> s^-1 swaps the roles of i and j
        key = (min(i, j), max(i, j))
        g = cache.get(key)
        if g is None:
            counts: dict[int, int] = {}
            for a, b in zip(cols[key[0]], cols[key[1]]):
                e = (a - b) % L
                counts[e] = counts.get(e, 0) + 1
            g = CycNum.from_terms(L, counts)
            cache[key] = g
        return g

    mat = CycMatrix(L, [[entry(i, j) for j in range(k)] for i in range(k)])
    return GramReport(T, k, mat.det())


@dataclass(frozen=True)
class ConsistencyReport:
    q: int
    checked: int
    mismatches: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def __bool__(self) -> bool:
        return self.ok


def verify_dl_consistency(sheet: CharacterSheet, *, exhaustive: bool = False,
                          jobs: int = 1) -> ConsistencyReport:
    """Check every recovered expansion against the known GL_2 pattern.

    onedim k:    split {(k,k): +1},          elliptic {k(q+1): +1}
    steinberg k: split {(k,k): +1},          elliptic {k(q+1): -1}
    principal:   split {(k,l): +1, (l,k): +1}, elliptic empty
    cuspidal c:  split empty,                elliptic {c: -1, cq: -1}
    """
    spec = sheet.spec
    if spec.n != 2:
        raise ValueError("the decomposition pattern is defined for GL_2 only")
    _require_gate(spec)
    report = validate_sheet(sheet)
    if not report.ok:
        raise SheetValidationError(report)
    q = spec.q
    M = q * q - 1
    split = (1, 1)
    ell = (2,)
    mismatches: list[str] = []
    for row in sheet.rows:
        lab = IrrLabel.parse(spec, row.label)
        if lab.family == "onedim":
            k = lab.params[0]
            want = {split: {(k, k): 1}, ell: {(k * (q + 1) % M,): 1}}
        elif lab.family == "steinberg":
            k = lab.params[0]
            want = {split: {(k, k): 1}, ell: {(k * (q + 1) % M,): -1}}
        elif lab.family == "principal":
            k, l = lab.params
            want = {split: {(k, l): 1, (l, k): 1}, ell: {}}
        else:
            c = lab.params[0]
            want = {split: {}, ell: {(c,): -1, (c * q % M,): -1}}
        rep = recover_E(sheet, row.label, validate=False,
                        exhaustive=exhaustive, jobs=jobs)
        for e in rep.expansions:
            got = {th.cexps: co for th, co in e.terms}
            expect = want[e.torus.blocks]
            if got != expect:
                mismatches.append(
                    f"{row.label} on {e.torus.label}: got {got}, "
                    f"expected {expect}")
    return ConsistencyReport(q, len(sheet.rows), tuple(mismatches))
