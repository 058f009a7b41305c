"""Character sheets: values of irreducibles on regular torus elements.

A sheet holds, for one GL_n(F_q), the value of every irreducible character
on every regular element of every torus type, as exact cyclotomic numbers
at one common zeta level (the lcm of the torus exponents).  Values are
stored per dlog tuple rather than per conjugacy class, so the
class-function property is a checkable invariant rather than an input
assumption.

Built-in generators cover GL_1 (any prime power q) and GL_2 (odd q, the
classical value formulas); larger n can only arrive through load_sheet.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable

from .cyclotomic import CycNum, root
from .tori import (
    GroupSpec,
    TorusType,
    enumerate_tori,
    points,
    regular_elements,
    torus_from_label,
    weyl_orbit,
)

FAMILIES = ("onedim", "steinberg", "principal", "cuspidal")


class SheetFormatError(ValueError):
    """A sheet file fails the structural schema."""


class SheetValidationError(ValueError):
    """A structurally sound sheet fails semantic validation."""

    def __init__(self, report: "SheetValidationReport"):
        self.report = report
        super().__init__("; ".join(report.violations))


@dataclass(frozen=True)
class IrrLabel:
    """Canonical label of a GL_1/GL_2 irreducible.

    onedim k and steinberg k carry k mod q-1; principal (k, l) is unordered
    with k != l; cuspidal c has c mod q^2-1 off the (q+1)-multiples and is
    identified with cq.
    """

    family: str
    params: tuple[int, ...]

    @classmethod
    def make(cls, spec: GroupSpec, family: str, params: Iterable[int]) -> "IrrLabel":
        params = tuple(int(p) for p in params)
        q = spec.q
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}")
        if spec.n == 1:
            if family != "onedim" or len(params) != 1:
                raise ValueError("rank 1 has only onedim labels with one parameter")
            return cls("onedim", (params[0] % (q - 1),))
        if spec.n != 2:
            raise ValueError("labels are only defined for n <= 2")
        if family in ("onedim", "steinberg"):
            if len(params) != 1:
                raise ValueError(f"{family} takes one parameter")
            return cls(family, (params[0] % (q - 1),))
        if family == "principal":
            if len(params) != 2:
                raise ValueError("principal takes two parameters")
            k, l = params[0] % (q - 1), params[1] % (q - 1)
            if k == l:
                raise ValueError("principal parameters must differ mod q-1")
            return cls(family, (min(k, l), max(k, l)))
        c = params[0] % (q * q - 1)
        if len(params) != 1:
            raise ValueError("cuspidal takes one parameter")
        if c % (q + 1) == 0:
            raise ValueError(
                f"cuspidal parameter {c} is a multiple of q+1 = {q + 1}")
        return cls(family, (min(c, c * q % (q * q - 1)),))

    @classmethod
    def parse(cls, spec: GroupSpec, text: str) -> "IrrLabel":
        fam, _, rest = text.partition(":")
        try:
            params = tuple(int(p) for p in rest.split(",")) if rest else ()
        except ValueError:
            raise ValueError(f"bad label {text!r}") from None
        return cls.make(spec, fam, params)

    def format(self) -> str:
        return f"{self.family}:{','.join(str(p) for p in self.params)}"

    def sort_key(self) -> tuple:
        return (FAMILIES.index(self.family), self.params)

    def dim(self, spec: GroupSpec) -> int:
        q = spec.q
        if spec.n == 1:
            return 1
        return {"onedim": 1, "steinberg": q,
                "principal": q + 1, "cuspidal": q - 1}[self.family]


ValueMap = dict[tuple[int, ...], CycNum]


@dataclass
class SheetRow:
    label: str
    dim: int
    values: dict[tuple[int, ...], ValueMap]  # keyed by torus blocks

    def value(self, ttype: TorusType, exps: tuple[int, ...]) -> CycNum:
        return self.values[ttype.blocks][tuple(exps)]


@dataclass
class CharacterSheet:
    spec: GroupSpec
    zeta_level: int
    tori: tuple[TorusType, ...]
    rows: list[SheetRow]

    def row(self, label: str) -> SheetRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(f"no row labeled {label!r}")

    def labels(self) -> list[str]:
        return [r.label for r in self.rows]


def zeta_level_for(spec: GroupSpec) -> int:
    return math.lcm(*(points(t, 1).group.exponent
                      for t in enumerate_tori(spec)))


def build_gl1_sheet(q: int) -> CharacterSheet:
    """GL_1: every irreducible is a character of the unique torus."""
    spec = GroupSpec(1, q)
    (tt,) = enumerate_tori(spec)
    N = q - 1
    regs = regular_elements(tt)
    rows = []
    for k in range(q - 1):
        label = IrrLabel.make(spec, "onedim", (k,))
        vals = {(a,): root(N, k * a) for (a,) in regs}
        rows.append(SheetRow(label.format(), 1, {tt.blocks: vals}))
    return CharacterSheet(spec, N, (tt,), rows)


def build_gl2_sheet(q: int) -> CharacterSheet:
    """GL_2 at odd q >= 3, from the classical value formulas.

    Split values at regular dlogs (i, j), elliptic values at regular dlog a,
    all at level N = q^2 - 1:

        onedim k     dim 1    z^{k(i+j)(q+1)}         z^{k a (q+1)}
        steinberg k  dim q    z^{k(i+j)(q+1)}        -z^{k a (q+1)}
        principal    dim q+1  z^{(ki+lj)(q+1)}        0
          (k, l)              + z^{(kj+li)(q+1)}
        cuspidal c   dim q-1  0                      -z^{c a} - z^{c q a}

    The formulas are only trusted because the q=3 instance is checked
    against an independently computed character table of the 48-element
    matrix group (see the test suite); any mismatch there is a hard stop.
    """
    spec = GroupSpec(2, q)
    if q % 2 == 0:
        raise ValueError("built-in GL_2 sheet requires odd q")
    N = q * q - 1
    sp, el = enumerate_tori(spec)
    regs_sp = regular_elements(sp)
    regs_el = regular_elements(el)
    zero = CycNum.zero(N)

    labels: list[IrrLabel] = []
    labels += [IrrLabel.make(spec, "onedim", (k,)) for k in range(q - 1)]
    labels += [IrrLabel.make(spec, "steinberg", (k,)) for k in range(q - 1)]
    labels += [IrrLabel.make(spec, "principal", (k, l))
               for k in range(q - 1) for l in range(k + 1, q - 1)]
    labels += sorted({IrrLabel.make(spec, "cuspidal", (c,))
                      for c in range(1, N) if c % (q + 1)},
                     key=IrrLabel.sort_key)

    rows = []
    for lab in sorted(labels, key=IrrLabel.sort_key):
        fam, par = lab.family, lab.params
        if fam == "onedim" or fam == "steinberg":
            k = par[0]
            sign = 1 if fam == "onedim" else -1
            vsp = {(i, j): root(N, k * (i + j) * (q + 1))
                   for (i, j) in regs_sp}
            vel = {(a,): sign * root(N, k * a * (q + 1)) for (a,) in regs_el}
        elif fam == "principal":
            k, l = par
            vsp = {(i, j): root(N, (k * i + l * j) * (q + 1))
                   + root(N, (k * j + l * i) * (q + 1))
                   for (i, j) in regs_sp}
            vel = {(a,): zero for (a,) in regs_el}
        else:
            c = par[0]
            vsp = {(i, j): zero for (i, j) in regs_sp}
            vel = {(a,): -(root(N, c * a) + root(N, c * q * a))
                   for (a,) in regs_el}
        rows.append(SheetRow(lab.format(), lab.dim(spec),
                             {sp.blocks: vsp, el.blocks: vel}))
    return CharacterSheet(spec, N, (sp, el), rows)


def build_sheet(n: int, q: int) -> CharacterSheet:
    if n == 1:
        return build_gl1_sheet(q)
    if n == 2:
        return build_gl2_sheet(q)
    raise ValueError(f"no built-in sheet generator for n = {n}")


# ------------------------------------------------------------- validation

@dataclass(frozen=True)
class SheetValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_sheet(sheet: CharacterSheet) -> SheetValidationReport:
    """Structural and semantic checks; every violation itemized."""
    bad: list[str] = []
    spec = sheet.spec
    expected_tori = enumerate_tori(spec)
    if sorted(t.blocks for t in sheet.tori) != [t.blocks for t in expected_tori]:
        bad.append(f"tori {[t.label for t in sheet.tori]} do not cover the "
                   f"{len(expected_tori)} torus types exactly once")
    level = zeta_level_for(spec)
    if sheet.zeta_level != level:
        bad.append(f"zeta_level {sheet.zeta_level} != lcm of torus "
                   f"exponents {level}")

    labels = sheet.labels()
    if len(set(labels)) != len(labels):
        dupes = sorted({x for x in labels if labels.count(x) > 1})
        bad.append(f"duplicate labels: {dupes}")
    if spec.n <= 2:
        canon: dict[str, str] = {}
        for lab in labels:
            try:
                c = IrrLabel.parse(spec, lab).format()
            except ValueError as e:
                bad.append(f"label {lab!r}: {e}")
                continue
            if c != lab:
                bad.append(f"label {lab!r} is not in canonical form ({c!r})")
            if c in canon and canon[c] != lab:
                bad.append(f"labels {canon[c]!r} and {lab!r} name the same "
                           f"irreducible {c!r}")
            canon.setdefault(c, lab)
        expected_rows = spec.q - 1 if spec.n == 1 else spec.q**2 - 1
        if len(sheet.rows) != expected_rows:
            bad.append(f"row count {len(sheet.rows)} != {expected_rows}")

    mass = sum(r.dim * r.dim for r in sheet.rows)
    if any(r.dim < 1 for r in sheet.rows):
        bad.append("nonpositive dimension present")
    if mass != spec.group_order:
        bad.append(f"sum of dim^2 is {mass}, group order is "
                   f"{spec.group_order}")

    orbit_cache: dict[tuple[int, ...], list[tuple[tuple[int, ...], ...]]] = {}
    for tt in sheet.tori:
        regs = regular_elements(tt)
        seen: set[tuple[int, ...]] = set()
        orbits = []
        for e in regs:
            if e not in seen:
                orb = weyl_orbit(tt, e)
                seen.update(orb)
                orbits.append(orb)
        orbit_cache[tt.blocks] = orbits

    for r in sheet.rows:
        if set(r.values) != {tt.blocks for tt in sheet.tori}:
            bad.append(f"row {r.label}: value maps keyed by "
                       f"{sorted(r.values)} instead of the torus list")
            continue
        for tt in sheet.tori:
            vals = r.values[tt.blocks]
            regs = regular_elements(tt)
            missing = [e for e in regs if e not in vals]
            extra = [e for e in vals if e not in set(regs)]
            if missing:
                bad.append(f"row {r.label}, torus {tt.label}: missing "
                           f"regular elements, e.g. {missing[0]}")
            if extra:
                bad.append(f"row {r.label}, torus {tt.label}: value on "
                           f"non-regular element {extra[0]}")
            if missing or extra:
                continue
            for v in vals.values():
                if v.level != sheet.zeta_level:
                    bad.append(f"row {r.label}, torus {tt.label}: value at "
                               f"level {v.level} != {sheet.zeta_level}")
                    break
            for orb in orbit_cache[tt.blocks]:
                v0 = vals[orb[0]]
                for e in orb[1:]:
                    if vals[e] != v0:
                        bad.append(f"row {r.label}, torus {tt.label}: not "
                                   f"constant on the class of {orb[0]} "
                                   f"(differs at {e})")
                        break
    return SheetValidationReport(tuple(bad))


# ------------------------------------------------------ JSON serialization

def sheet_to_dict(sheet: CharacterSheet) -> dict:
    irr = []
    for r in sheet.rows:
        values = {}
        for tt in sheet.tori:
            vals = r.values[tt.blocks]
            values[tt.label] = [
                {"element": list(e), "value": vals[e].to_triples()}
                for e in sorted(vals)]
        irr.append({"label": r.label, "dim": r.dim, "values": values})
    return {
        "group": "GL",
        "n": sheet.spec.n,
        "q": sheet.spec.q,
        "zeta_level": sheet.zeta_level,
        "tori": [t.label for t in sheet.tori],
        "irreducibles": irr,
    }


def sheet_from_dict(data) -> CharacterSheet:
    def need(d, key, types):
        if not isinstance(d, dict) or key not in d:
            raise SheetFormatError(f"missing key {key!r}")
        v = d[key]
        if not isinstance(v, types):
            raise SheetFormatError(f"key {key!r} has wrong type")
        return v

    if need(data, "group", str) != "GL":
        raise SheetFormatError("group must be 'GL'")
    n = need(data, "n", int)
    q = need(data, "q", int)
    try:
        spec = GroupSpec(n, q)
    except ValueError as e:
        raise SheetFormatError(str(e)) from None
    zeta_level = need(data, "zeta_level", int)
    if zeta_level < 1:
        raise SheetFormatError("zeta_level must be positive")
    tori = []
    for lab in need(data, "tori", list):
        if not isinstance(lab, str):
            raise SheetFormatError("torus labels must be strings")
        try:
            tori.append(torus_from_label(spec, lab))
        except ValueError as e:
            raise SheetFormatError(str(e)) from None
    rows = []
    for item in need(data, "irreducibles", list):
        label = need(item, "label", str)
        dim = need(item, "dim", int)
        values_in = need(item, "values", dict)
        values: dict[tuple[int, ...], ValueMap] = {}
        for tt in tori:
            if tt.label not in values_in:
                raise SheetFormatError(
                    f"row {label!r}: no values for torus {tt.label}")
            vals: ValueMap = {}
            entries = values_in[tt.label]
            if not isinstance(entries, list):
                raise SheetFormatError(f"row {label!r}: values must be a list")
            rank = len(points(tt, 1).group.moduli)
            for ent in entries:
                e = need(ent, "element", list)
                if len(e) != rank or not all(isinstance(x, int) for x in e):
                    raise SheetFormatError(
                        f"row {label!r}, torus {tt.label}: bad element {e}")
                triples = need(ent, "value", list)
                try:
                    v = CycNum.from_triples(zeta_level, triples)
                except (ValueError, TypeError) as err:
                    raise SheetFormatError(
                        f"row {label!r}: bad value triples: {err}") from None
                key = tuple(e)
                if key in vals:
                    raise SheetFormatError(
                        f"row {label!r}, torus {tt.label}: duplicate "
                        f"element {key}")
                vals[key] = v
            values[tt.blocks] = vals
        if set(values_in) - {tt.label for tt in tori}:
            raise SheetFormatError(f"row {label!r}: values for unknown tori")
        rows.append(SheetRow(label, dim, values))
    sheet = CharacterSheet(spec, zeta_level, tuple(tori), rows)
    report = validate_sheet(sheet)
    if not report.ok:
        raise SheetValidationError(report)
    return sheet


def sheet_to_json_text(sheet: CharacterSheet) -> str:
    """Deterministic JSON rendering; files are byte-comparable."""
    return json.dumps(sheet_to_dict(sheet), indent=1) + "\n"


def save_sheet(sheet: CharacterSheet, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(sheet_to_json_text(sheet))


def load_sheet(path: str) -> CharacterSheet:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise SheetFormatError(f"not valid JSON: {e}") from None
    return sheet_from_dict(data)
