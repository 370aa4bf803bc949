"""Line-oriented structure files: parsing with total error reporting, and a
canonical serializer with bit-exact round trips.

Format sketch (sections in this order; indentation is cosmetic):

    field rational
    space A
      basis u -1
      basis e 1
    space Z
      basis zu -2
      basis ze 0
    unit u
    omega degree 0
      u e 1/1
    l degree 1
    l component 1
      zu : ze 1/1
    q degree 1
    q component 0 2
      ; u u : u 1/1
    tower D degree 0 support finite
    tower D component 0 1
      ; e : e 1/1

Entry lines read  <z labels> ; <a labels> : <out label> <scalar>  (the ";" is
omitted for l-entries, which have no A-part).  Wedge keys must be sorted;
scalars must be in canonical form ("p/q" reduced with q > 0, or a bare
integer; prime fields use decimal residues).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable

from .core import (
    Element,
    FieldError,
    GradedSpace,
    PrimeField,
    QQ,
    RationalField,
    basis_element,
    field_from_name,
)
from .cochains import CeTower, CochainTower
from .cyclic import SymplecticForm
from .ocha import OchaStructure


class ParseError(ValueError):
    """Malformed structure file; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str, column: int | None = None):
        self.lineno = lineno
        self.column = column
        where = f"line {lineno}" + (f", column {column}" if column else "")
        super().__init__(f"{where}: {message}")


@dataclass
class StructureFile:
    field: object
    space_a: GradedSpace
    space_z: GradedSpace
    unit_label: str | None
    omega: SymplecticForm | None
    l: CeTower
    q: CochainTower
    towers: dict

    def unit_element(self) -> Element | None:
        if self.unit_label is None:
            return None
        return basis_element(self.space_a, self.space_a.index(self.unit_label))

    def structure(self) -> OchaStructure:
        return OchaStructure(self.l, self.q, self.unit_element(), self.omega)


def _parse_scalar(field, text: str, lineno: int):
    try:
        return field.parse(text)
    except (FieldError, ValueError) as exc:
        raise ParseError(lineno, f"bad scalar {text!r}: {exc}") from None


def _split_entry(line: str, lineno: int, with_a_part: bool):
    if ":" not in line:
        raise ParseError(lineno, "entry line needs '<inputs> : <output> <scalar>'")
    left, right = line.split(":", 1)
    rtokens = right.split()
    if len(rtokens) != 2:
        raise ParseError(lineno, "output side must be '<label> <scalar>'")
    if with_a_part:
        if ";" not in left:
            raise ParseError(lineno, "entry needs a ';' between z-part and a-part")
        zpart, apart = left.split(";", 1)
        return zpart.split(), apart.split(), rtokens[0], rtokens[1]
    if ";" in left:
        raise ParseError(lineno, "closed-sector entries have no a-part")
    return left.split(), None, rtokens[0], rtokens[1]


class _Parser:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.field = None
        self.spaces: dict = {}
        self.space_order: list = []
        self.unit_label = None
        self.omega_degree = None
        self.omega_entries: list = []
        self.l_degree = None
        self.l_components: dict = {}
        self.q_degree = None
        self.q_components: dict = {}
        self.towers_meta: dict = {}
        self.tower_components: dict = {}
        self._pending_space = None
        self._pending_basis: list = []
        self._section = None
        self._section_key = None

    def fail(self, lineno, msg, column=None):
        raise ParseError(lineno, msg, column)

    def parse(self) -> StructureFile:
        for idx, raw in enumerate(self.lines, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head = line.split()[0]
            if head in ("field", "space", "unit", "omega", "l", "q", "tower"):
                self._close_space(idx)
                getattr(self, "_head_" + head)(idx, line)
            else:
                self._body(idx, line)
        self._close_space(len(self.lines) + 1)
        return self._finish()

    # -- section heads -------------------------------------------------------

    def _head_field(self, lineno, line):
        if self.field is not None:
            self.fail(lineno, "duplicate field declaration")
        try:
            self.field = field_from_name(line[len("field"):].strip())
        except FieldError as exc:
            self.fail(lineno, str(exc))
        self._section = None

    def _head_space(self, lineno, line):
        parts = line.split()
        if len(parts) != 2:
            self.fail(lineno, "space header is 'space <name>'")
        name = parts[1]
        if name in self.spaces or self._pending_space == name:
            self.fail(lineno, f"duplicate space {name!r}")
        self._pending_space = name
        self._pending_basis = []
        self._section = "space"

    def _head_unit(self, lineno, line):
        parts = line.split()
        if len(parts) != 2:
            self.fail(lineno, "unit line is 'unit <label>'")
        self.unit_label = parts[1]
        self._section = None

    def _head_omega(self, lineno, line):
        parts = line.split()
        if len(parts) != 3 or parts[1] != "degree":
            self.fail(lineno, "omega header is 'omega degree <int>'")
        try:
            self.omega_degree = int(parts[2])
        except ValueError:
            self.fail(lineno, f"bad omega degree {parts[2]!r}")
        self._section = "omega"

    def _head_l(self, lineno, line):
        parts = line.split()
        if len(parts) == 3 and parts[1] == "degree":
            self.l_degree = int(parts[2])
            self._section = None
            return
        if len(parts) == 3 and parts[1] == "component":
            try:
                arity = int(parts[2])
            except ValueError:
                self.fail(lineno, f"bad arity {parts[2]!r}")
            if arity < 1:
                self.fail(lineno, "closed-sector components need arity >= 1")
            self._section = "l"
            self._section_key = arity
            self.l_components.setdefault(arity, [])
            return
        self.fail(lineno, "l header is 'l degree <d>' or 'l component <arity>'")

    def _head_q(self, lineno, line):
        parts = line.split()
        if len(parts) == 3 and parts[1] == "degree":
            self.q_degree = int(parts[2])
            self._section = None
            return
        if len(parts) == 4 and parts[1] == "component":
            try:
                l, k = int(parts[2]), int(parts[3])
            except ValueError:
                self.fail(lineno, "bad component bidegree")
            if l < 0 or k < 0 or (l, k) == (0, 0):
                self.fail(lineno, f"illegal bidegree ({l},{k})")
            self._section = "q"
            self._section_key = (l, k)
            self.q_components.setdefault((l, k), [])
            return
        self.fail(lineno, "q header is 'q degree <d>' or 'q component <l> <k>'")

    def _head_tower(self, lineno, line):
        parts = line.split()
        if len(parts) >= 4 and parts[2] == "degree" and "component" not in parts:
            name = parts[1]
            try:
                degree = int(parts[3])
            except ValueError:
                self.fail(lineno, "bad tower degree")
            window = None
            rest = parts[4:]
            if rest[:1] == ["support"]:
                if rest[1:] == ["finite"]:
                    window = None
                elif len(rest) == 3 and rest[1] == "window":
                    try:
                        window = int(rest[2])
                    except ValueError:
                        self.fail(lineno, "bad window")
                    if window < 0:
                        self.fail(lineno, "window must be >= 0")
                else:
                    self.fail(lineno, "support is 'finite' or 'window <N>'")
            elif rest:
                self.fail(lineno, f"unexpected tokens {rest}")
            if name in self.towers_meta:
                self.fail(lineno, f"duplicate tower {name!r}")
            self.towers_meta[name] = (degree, window)
            self.tower_components[name] = {}
            self._section = None
            return
        if len(parts) == 5 and parts[2] == "component":
            name = parts[1]
            if name not in self.towers_meta:
                self.fail(lineno, f"tower {name!r} has no degree declaration")
            try:
                l, k = int(parts[3]), int(parts[4])
            except ValueError:
                self.fail(lineno, "bad component bidegree")
            if l < 0 or k < 0 or (l, k) == (0, 0):
                self.fail(lineno, f"illegal bidegree ({l},{k})")
            self._section = "tower"
            self._section_key = (name, (l, k))
            self.tower_components[name].setdefault((l, k), [])
            return
        self.fail(lineno, "tower header is 'tower <name> degree <d> [support ...]'"
                          " or 'tower <name> component <l> <k>'")

    # -- section bodies ------------------------------------------------------

    def _body(self, lineno, line):
        if self._section == "space":
            parts = line.split()
            if len(parts) != 3 or parts[0] != "basis":
                self.fail(lineno, "basis line is 'basis <label> <degree>'")
            try:
                deg = int(parts[2])
            except ValueError:
                self.fail(lineno, f"bad degree {parts[2]!r}")
            self._pending_basis.append((lineno, parts[1], deg))
            return
        if self._section == "omega":
            parts = line.split()
            if len(parts) != 3:
                self.fail(lineno, "omega entry is '<label> <label> <scalar>'")
            self.omega_entries.append((lineno, parts[0], parts[1], parts[2]))
            return
        if self._section == "l":
            self.l_components[self._section_key].append((lineno, line))
            return
        if self._section == "q":
            self.q_components[self._section_key].append((lineno, line))
            return
        if self._section == "tower":
            name, lk = self._section_key
            self.tower_components[name][lk].append((lineno, line))
            return
        self.fail(lineno, f"unexpected line outside any section: {line!r}")

    def _close_space(self, lineno):
        if self._pending_space is None:
            return
        labels = [lab for _ln, lab, _d in self._pending_basis]
        degrees = [d for _ln, _lab, d in self._pending_basis]
        if not labels:
            self.fail(lineno - 1, f"space {self._pending_space!r} has empty basis")
        if len(set(labels)) != len(labels):
            self.fail(lineno - 1, f"duplicate basis label in {self._pending_space!r}")
        self.spaces[self._pending_space] = GradedSpace(
            tuple(labels), tuple(degrees), self._pending_space
        )
        self.space_order.append(self._pending_space)
        self._pending_space = None
        self._pending_basis = []

    # -- assembly ------------------------------------------------------------

    def _require(self, cond, lineno, msg):
        if not cond:
            self.fail(lineno, msg)

    def _label_index(self, space, label, lineno):
        try:
            return space.index(label)
        except KeyError:
            self.fail(lineno, f"unknown basis label {label!r} in space {space.name}")

    def _check_sorted_wedge(self, space, zw, lineno):
        if list(zw) != sorted(zw):
            self.fail(lineno, f"wedge key not sorted: "
                              f"{[space.labels[i] for i in zw]}")

    def _entries_to_table(self, space_z, space_a, rows, with_a, out_space,
                          declared_degree):
        table: dict = {}
        for lineno, line in rows:
            zlabels, alabels, out_label, scal = _split_entry(line, lineno, with_a)
            zw = tuple(self._label_index(space_z, lab, lineno) for lab in zlabels)
            self._check_sorted_wedge(space_z, zw, lineno)
            degs = [space_z.degrees[i] for i in zw]
            for t in range(len(zw) - 1):
                if zw[t] == zw[t + 1] and degs[t] % 2:
                    self.fail(lineno, "wedge key repeats an odd-degree letter")
            aw = (tuple(self._label_index(space_a, lab, lineno) for lab in alabels)
                  if with_a else ())
            out = self._label_index(out_space, out_label, lineno)
            want = (declared_degree + space_z.degree_of_word(zw)
                    + (space_a.degree_of_word(aw) if with_a else 0))
            if out_space.degrees[out] != want:
                self.fail(lineno, "degree inconsistency: output "
                                  f"{out_label!r} has degree {out_space.degrees[out]}, "
                                  f"homogeneity needs {want}")
            value = _parse_scalar(self.field, scal, lineno)
            key = (zw, aw)
            vec = list(table.get(key, (self.field.zero,) * out_space.dim))
            if vec[out]:
                self.fail(lineno, "duplicate entry for the same key and output")
            vec[out] = value
            table[key] = tuple(vec)
        return table

    def _finish(self) -> StructureFile:
        if self.field is None:
            self.field = QQ
        for need in ("A", "Z"):
            self._require(need in self.spaces, 1, f"missing 'space {need}' block")
        space_a = self.spaces["A"]
        space_z = self.spaces["Z"]
        if self.unit_label is not None:
            self._label_index(space_a, self.unit_label, 1)

        omega = None
        if self.omega_degree is not None:
            matrix = [[self.field.zero] * space_a.dim for _ in range(space_a.dim)]
            for lineno, lab1, lab2, scal in self.omega_entries:
                i = self._label_index(space_a, lab1, lineno)
                j = self._label_index(space_a, lab2, lineno)
                if matrix[i][j]:
                    self.fail(lineno, "duplicate omega entry")
                matrix[i][j] = _parse_scalar(self.field, scal, lineno)
            omega = SymplecticForm(space_a, self.omega_degree, matrix, self.field)

        l_deg = self.l_degree if self.l_degree is not None else 1
        l_comps = {}
        for arity, rows in self.l_components.items():
            table = self._entries_to_table(space_z, space_a, rows, False,
                                           space_z, l_deg)
            l_comps[arity] = {zw: vec for (zw, _aw), vec in table.items()}
        l_tower = CeTower(space_z, l_deg, l_comps)

        q_deg = self.q_degree if self.q_degree is not None else 1
        q_comps = {}
        for lk, rows in self.q_components.items():
            q_comps[lk] = self._entries_to_table(space_z, space_a, rows, True,
                                                 space_a, q_deg)
        q_tower = CochainTower(space_z, space_a, q_deg, q_comps)

        towers = {}
        for name, (degree, window) in self.towers_meta.items():
            comps = {}
            for lk, rows in self.tower_components[name].items():
                comps[lk] = self._entries_to_table(space_z, space_a, rows, True,
                                                   space_a, degree)
            towers[name] = CochainTower(space_z, space_a, degree, comps, window)
        return StructureFile(self.field, space_a, space_z, self.unit_label,
                             omega, l_tower, q_tower, towers)


def parse_structure(text: str) -> StructureFile:
    """Parse and validate a structure file; raises ParseError on any defect."""
    try:
        return _Parser(text).parse()
    except ParseError:
        raise
    except (ValueError, KeyError) as exc:
        raise ParseError(0, str(exc)) from exc


def _fmt(field, x) -> str:
    return field.format(x)


def serialize(bundle: StructureFile) -> str:
    """Canonical deterministic text; parse(serialize(x)) == x bit-exactly."""
    field = bundle.field
    out = []
    out.append(f"field {field.name}")
    for space in (bundle.space_a, bundle.space_z):
        out.append(f"space {space.name}")
        for lab, deg in zip(space.labels, space.degrees):
            out.append(f"  basis {lab} {deg}")
    if bundle.unit_label is not None:
        out.append(f"unit {bundle.unit_label}")
    if bundle.omega is not None:
        w = bundle.omega
        out.append(f"omega degree {w.degree}")
        for i in range(w.space.dim):
            for j in range(w.space.dim):
                if w.matrix[i][j]:
                    out.append(f"  {w.space.labels[i]} {w.space.labels[j]} "
                               f"{_fmt(field, w.matrix[i][j])}")
    out.append(f"l degree {bundle.l.degree}")
    for arity in sorted(bundle.l.components):
        out.append(f"l component {arity}")
        table = bundle.l.components[arity]
        for zw in sorted(table):
            for t, c in enumerate(table[zw]):
                if c:
                    zs = " ".join(bundle.space_z.labels[i] for i in zw)
                    out.append(f"  {zs} : {bundle.space_z.labels[t]} {_fmt(field, c)}")
    out.append(f"q degree {bundle.q.degree}")
    _serialize_tower_components(out, bundle.q, bundle.space_z, bundle.space_a,
                                field, "q component")
    for name in sorted(bundle.towers):
        tower = bundle.towers[name]
        support = ("finite" if tower.window is None
                   else f"window {tower.window}")
        out.append(f"tower {name} degree {tower.degree} support {support}")
        _serialize_tower_components(out, tower, bundle.space_z, bundle.space_a,
                                    field, f"tower {name} component")
    return "\n".join(out) + "\n"


def _serialize_tower_components(out, tower, space_z, space_a, field, header):
    for (l, k) in sorted(tower.components):
        out.append(f"{header} {l} {k}")
        table = tower.components[(l, k)]
        for (zw, aw) in sorted(table):
            vec = table[(zw, aw)]
            zs = " ".join(space_z.labels[i] for i in zw)
            as_ = " ".join(space_a.labels[i] for i in aw)
            for t, c in enumerate(vec):
                if c:
                    out.append(f"  {zs} ; {as_} : {space_a.labels[t]} "
                               f"{_fmt(field, c)}")


def bundle_from_structure(s: OchaStructure, field=QQ, towers=None,
                          unit_label: str | None = None) -> StructureFile:
    """Wrap an in-memory structure (plus optional named towers) for writing."""
    if unit_label is None and s.unit is not None:
        idx = [i for i, c in enumerate(s.unit.coeffs) if c][0]
        unit_label = s.space_a.labels[idx]
    return StructureFile(field, s.space_a, s.space_z, unit_label, s.omega,
                         s.l, s.q, dict(towers or {}))
