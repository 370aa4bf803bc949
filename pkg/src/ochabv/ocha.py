"""OCHA structures: axiom checks, the Hochschild differential, the normalized
subcomplex, exact cohomology, and the BV-structure verification suite."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from . import _linalg
from .core import Element, GradedSpace, QQ, assignment_split_sign, basis_element
from .cochains import (
    CeTower,
    CochainTower,
    degree_audit,
    is_normalized,
    linear_combine,
    tower_sub,
    zero_tower,
    _unit_index,
)
from .braces import CornerInsertion, brace, closed_action, cup, gbracket
from .cyclic import (
    SymplecticForm,
    bv_delta,
    bv_delta_corner,
    cyclic_brace1,
    cyclic_brace2,
    is_cyclic,
    omega_audit,
)


# ---------------------------------------------------------------------------
# structure container


class OchaStructure:
    """Pair (l, q) of a closed-sector tower and an open-closed tower, both of
    degree 1 and finitely supported, with optional unit and pairing."""

    def __init__(self, l: CeTower, q: CochainTower,
                 unit: Element | None = None,
                 omega: SymplecticForm | None = None):
        if l.degree != 1 or q.degree != 1:
            raise ValueError("structure towers must have degree 1")
        if not (l.is_finite() and q.is_finite()):
            raise ValueError("structure towers must be finitely supported")
        if l.space != q.space_z:
            raise ValueError("closed-sector space mismatch")
        if unit is not None:
            if unit.degree != -1:
                raise ValueError("unit must have degree -1")
            _unit_index(q.space_a, unit)
        self.l = l
        self.q = q
        self.unit = unit
        self.omega = omega
        self._cache: dict = {}

    @property
    def space_z(self) -> GradedSpace:
        return self.q.space_z

    @property
    def space_a(self) -> GradedSpace:
        return self.q.space_a

    def axiom_report(self) -> list:
        if "axiom" not in self._cache:
            self._cache["axiom"] = check_ocha(self)
        return self._cache["axiom"]

    def is_ocha(self) -> bool:
        return not self.axiom_report()

    def is_unital(self) -> bool:
        if "unital" not in self._cache:
            self._cache["unital"] = check_unital(self)
        return self._cache["unital"]

    def is_cyclic_structure(self) -> bool:
        if "cyclic" not in self._cache:
            if self.omega is None:
                self._cache["cyclic"] = False
            else:
                self._cache["cyclic"] = is_cyclic(self.q, self.omega)
        return self._cache["cyclic"]


# ---------------------------------------------------------------------------
# axiom checks


def check_l_infinity(l: CeTower) -> list:
    """Witnesses of failures of the strong homotopy Jacobi relation."""
    if l.degree != 1:
        return [f"closed tower degree is {l.degree}, expected 1"]
    out = []
    space = l.space
    top = l.max_arity()
    if top == 0:
        return out
    for total in range(1, 2 * top):
        for zw in space.wedge_words(total):
            zdegs = [space.degrees[i] for i in zw]
            acc = [0] * space.dim
            for assign in itertools.product(range(2), repeat=total):
                j1 = [zw[p] for p, b in enumerate(assign) if b == 0]
                j2 = tuple(zw[p] for p, b in enumerate(assign) if b == 1)
                if not j1 or len(j1) > top or len(j2) + 1 > top:
                    continue
                sign = -1 if assignment_split_sign(assign, zdegs) else 1
                u = l.value(tuple(j1))
                for b, c in ((i, c) for i, c in enumerate(u) if c):
                    vec = l.value((b,) + j2)
                    for t in range(space.dim):
                        if vec[t]:
                            acc[t] = acc[t] + sign * c * vec[t]
            if any(acc):
                labels = tuple(space.labels[i] for i in zw)
                out.append(f"relation fails at arity {total} on {labels}: {acc}")
    return out


def check_ocha(s: OchaStructure) -> list:
    """Witnesses of q{q} != l^(q); empty report iff the axiom holds."""
    out = list(check_l_infinity(s.l))
    residual = tower_sub(brace(s.q, [s.q]), closed_action(s.l, s.q))
    for (l, k) in residual.bidegrees():
        for (zw, aw), vec in sorted(residual.components[(l, k)].items()):
            zl = tuple(s.space_z.labels[i] for i in zw)
            al = tuple(s.space_a.labels[i] for i in aw)
            out.append(f"axiom residual at ({l},{k}) on {zl};{al}: {vec}")
    return out


def check_unital(s: OchaStructure) -> bool:
    """Unit conditions: q_{0,2}(1,a) = (-1)^{|a|-1} q_{0,2}(a,1) = a and every
    other component kills the unit."""
    if s.unit is None:
        raise ValueError("structure has no unit")
    sa = s.space_a
    u = _unit_index(sa, s.unit)
    for a in range(sa.dim):
        target = basis_element(sa, a).coeffs
        left = s.q.value((), (u, a))
        if tuple(left) != tuple(target):
            return False
        right = s.q.value((), (a, u))
        sign = -1 if (sa.degrees[a] - 1) % 2 else 1
        if tuple(sign * c for c in right) != tuple(target):
            return False
    for (l, k), table in s.q.components.items():
        if (l, k) == (0, 2):
            continue
        for (zw, aw), vec in table.items():
            if u in aw and any(vec):
                return False
    return True


# ---------------------------------------------------------------------------
# differential and normalized subcomplex


def hochschild_delta(s: OchaStructure, D: CochainTower) -> CochainTower:
    """delta(D) = q{D} - (-1)^{|D|} D{q} + (-1)^{|D|} l^(D); degree |D| + 1.

    Each term reads inputs at total arity <= the output component's arity, so
    the validity window of D is preserved (total-arity filtration).
    """
    sgn = -1 if D.degree % 2 else 1
    t1 = brace(s.q, [D], force_window=D.window)
    t2 = brace(D, [s.q], force_window=D.window)
    t3 = closed_action(s.l, D)
    return linear_combine([1, -sgn, sgn], [t1, t2, t3])


def normalized_project(D: CochainTower, unit: Element) -> CochainTower:
    """Kill every entry whose A-word contains the unit direction.

    Precomposes each A-slot with the projection away from the unit's span; the
    unit must be a basis direction (apply any basis change beforehand).
    """
    u = _unit_index(D.space_a, unit)
    comps = {}
    for lk, table in D.components.items():
        kept = {key: vec for key, vec in table.items() if u not in key[1]}
        if kept:
            comps[lk] = kept
    return CochainTower(D.space_z, D.space_a, D.degree, comps, D.window)


# ---------------------------------------------------------------------------
# cohomology of the capped (normalized) complex


@dataclass
class DegreeSlot:
    dimension: int
    kernel: int
    image: int
    cohomology: int
    representatives: list


@dataclass
class CohomologyReport:
    cap: int
    normalized: bool
    degrees: dict  # degree -> DegreeSlot
    square_is_zero: bool


def _capped_basis(s: OchaStructure, cap: int, degree: int, normalized: bool):
    """Deterministically ordered basis keys (l,k,zw,aw,out) of the capped space."""
    sz, sa = s.space_z, s.space_a
    u = _unit_index(sa, s.unit) if normalized else None
    keys = []
    for total in range(1, cap + 1):
        for l in range(total + 1):
            k = total - l
            for zw in sz.wedge_words(l):
                zdeg = sz.degree_of_word(zw)
                for aw in sa.tensor_words(k):
                    if u is not None and u in aw:
                        continue
                    want = degree + zdeg + sa.degree_of_word(aw)
                    for out in range(sa.dim):
                        if sa.degrees[out] == want:
                            keys.append((l, k, zw, aw, out))
    keys.sort()
    return keys


def _tower_from_key(s: OchaStructure, degree: int, key) -> CochainTower:
    l, k, zw, aw, out = key
    vec = [0] * s.space_a.dim
    vec[out] = 1
    return CochainTower(s.space_z, s.space_a, degree,
                        {(l, k): {(zw, aw): tuple(vec)}})


def _coords(tower: CochainTower, keys, index) -> list:
    vec = [0] * len(keys)
    for (l, k), table in tower.components.items():
        for (zw, aw), values in table.items():
            for out, c in enumerate(values):
                if c:
                    pos = index.get((l, k, zw, aw, out))
                    if pos is not None:
                        vec[pos] = c
    return vec


def _delta_matrix(s: OchaStructure, cap: int, degree: int, normalized: bool,
                  field, src_keys, dst_keys):
    """Matrix of the capped differential from degree to degree+1 (columns = source)."""
    dst_index = {key: i for i, key in enumerate(dst_keys)}
    cols = []
    for key in src_keys:
        image = hochschild_delta(s, _tower_from_key(s, degree, key))
        cols.append(_coords(image, dst_keys, dst_index))
    return [[cols[c][r] for c in range(len(src_keys))] for r in range(len(dst_keys))]


def cohomology(s: OchaStructure, cap: int, degrees, normalized: bool = False,
               field=QQ) -> CohomologyReport:
    """Kernel/image/cohomology dimensions of the capped complex per degree,
    with representative towers chosen by deterministic pivoting."""
    if cap < 1:
        raise ValueError("arity cap must be >= 1")
    if not s.is_ocha():
        raise ValueError("structure fails the axiom check; cohomology undefined")
    if normalized:
        if s.unit is None or not s.is_unital():
            raise ValueError("normalized complex needs a unital structure")
    degrees = list(degrees)
    lo, hi = min(degrees), max(degrees)
    keys = {d: _capped_basis(s, cap, d, normalized) for d in range(lo - 1, hi + 2)}
    mats = {}
    for d in range(lo - 1, hi + 1):
        mats[d] = _delta_matrix(s, cap, d, normalized, field, keys[d], keys[d + 1])
    square_zero = True
    for d in range(lo - 1, hi):
        if keys[d] and keys[d + 2]:
            prod = _linalg.mat_mul(mats[d + 1], mats[d], field)
            if not _linalg.is_zero_matrix(prod):
                square_zero = False
    slots = {}
    for d in degrees:
        n_src = len(keys[d])
        rank_d = _linalg.rank(mats[d], field) if n_src else 0
        kernel_dim = n_src - rank_d
        image_dim = _linalg.rank(mats[d - 1], field) if keys[d - 1] else 0
        ker_vectors = (_linalg.kernel_basis(mats[d], field, n_src)
                       if n_src else [])
        image_cols = []
        if keys[d - 1]:
            for c in range(len(keys[d - 1])):
                col = [mats[d - 1][r][c] for r in range(n_src)]
                if any(col):
                    image_cols.append(col)
        reps = []
        span = list(image_cols)
        span_rank = _linalg.rank(span, field) if span else 0
        for vec in ker_vectors:
            cand = span + [vec]
            r = _linalg.rank(cand, field)
            if r > span_rank:
                span = cand
                span_rank = r
                reps.append(vec)
        rep_towers = []
        for vec in reps:
            comps: dict = {}
            for pos, c in enumerate(vec):
                if not c:
                    continue
                l, k, zw, aw, out = keys[d][pos]
                table = comps.setdefault((l, k), {})
                row = list(table.get((zw, aw), (0,) * s.space_a.dim))
                row[out] = c
                table[(zw, aw)] = tuple(row)
            rep_towers.append(CochainTower(s.space_z, s.space_a, d, comps))
        slots[d] = DegreeSlot(
            dimension=n_src,
            kernel=kernel_dim,
            image=image_dim,
            cohomology=kernel_dim - image_dim,
            representatives=rep_towers,
        )
    return CohomologyReport(cap=cap, normalized=normalized, degrees=slots,
                            square_is_zero=square_zero)


# ---------------------------------------------------------------------------
# BV verification


def _require_cyclic_unital(s: OchaStructure):
    if s.omega is None or s.unit is None:
        raise ValueError("BV layer needs both a pairing and a unit")
    if not s.is_unital():
        raise ValueError("structure is not unital")
    if not s.is_cyclic_structure():
        raise ValueError("structure is not cyclic")


@dataclass
class BvReport:
    lemma_D_E: CochainTower          # brace-vs-boundary decomposition residual
    lemma_delta_cup: CochainTower    # BV operator on the cup product residual
    theorem_full: CochainTower       # full cochain identity residual
    closed_inputs: bool
    bv_primitive: CochainTower | None
    bv_relation: CochainTower | None

    def all_zero(self) -> bool:
        ok = (self.lemma_D_E.is_zero() and self.lemma_delta_cup.is_zero()
              and self.theorem_full.is_zero())
        if self.closed_inputs and self.bv_relation is not None:
            ok = ok and self.bv_relation.is_zero()
        return ok


def _brace_q_delta(q: CochainTower, X: CochainTower, other: CochainTower,
                   w, unit) -> CochainTower:
    """q{Delta X, other} including the dropped (0,0)-corner of Delta X."""
    out = brace(q, [bv_delta(X, w, unit), other])
    corner = CornerInsertion(bv_delta_corner(X, w, unit))
    if not corner.is_zero():
        out = linear_combine([1, 1], [out, brace(q, [corner, other])])
    return out


def bv_verify(s: OchaStructure, D: CochainTower, E: CochainTower) -> BvReport:
    """Residuals of the cochain-level BV identities on normalized inputs."""
    _require_cyclic_unital(s)
    w, unit = s.omega, s.unit
    for t, name in ((D, "D"), (E, "E")):
        if not is_normalized(t, unit):
            raise ValueError(f"{name} is not normalized")
    q = s.q
    de = (D.degree * E.degree) % 2
    sD = -1 if D.degree % 2 else 1
    sE = -1 if E.degree % 2 else 1
    sDE = -1 if de else 1

    dD = hochschild_delta(s, D)
    dE = hochschild_delta(s, E)

    # D{E} = q{dD,E} + q{D{<>},E} + delta(D{E,p}) + (dD){E,p} + (-1)^{|D|} D{dE,p}
    lhs1 = brace(D, [E])
    rhs1 = linear_combine(
        [1, 1, 1, 1, sD],
        [
            _brace_q_delta(q, D, E, w, unit),
            cyclic_brace2(q, [D, E], [], (1, 0), w, unit),
            hochschild_delta(s, cyclic_brace1(D, [E], 1, w, unit)),
            cyclic_brace1(dD, [E], 1, w, unit),
            cyclic_brace1(D, [dE], 1, w, unit),
        ],
    )
    res1 = tower_sub(lhs1, rhs1)

    # Delta(q{D,E}) = q{D{<>},E} - (-1)^{|D||E|} q{E{<>},D}
    lhs2 = bv_delta(brace(q, [D, E]), w, unit)
    rhs2 = linear_combine(
        [1, -sDE],
        [
            cyclic_brace2(q, [D, E], [], (1, 0), w, unit),
            cyclic_brace2(q, [E, D], [], (1, 0), w, unit),
        ],
    )
    res2 = tower_sub(lhs2, rhs2)

    # full identity: [D,E] = Delta(q{D,E}) + q{dD,E} - +-q{dE,D}
    #                + delta(D{E,p}) - +-delta(E{D,p}) + (dD){E,p} - +-(dE){D,p}
    #                + (-1)^{|D|}(D{dE,p} - +-E{dD,p})
    # full identity, assembled from the two brace-decomposition lemmas; the
    # last coefficient is (-1)^{|E|}, forced by the swapped decomposition
    lhs3 = gbracket(D, E)
    rhs3 = linear_combine(
        [1, 1, -sDE, 1, -sDE, 1, -sDE, sD, -sE * sDE],
        [
            bv_delta(brace(q, [D, E]), w, unit),
            _brace_q_delta(q, D, E, w, unit),
            _brace_q_delta(q, E, D, w, unit),
            hochschild_delta(s, cyclic_brace1(D, [E], 1, w, unit)),
            hochschild_delta(s, cyclic_brace1(E, [D], 1, w, unit)),
            cyclic_brace1(dD, [E], 1, w, unit),
            cyclic_brace1(dE, [D], 1, w, unit),
            cyclic_brace1(D, [dE], 1, w, unit),
            cyclic_brace1(E, [dD], 1, w, unit),
        ],
    )
    res3 = tower_sub(lhs3, rhs3)

    closed = dD.is_zero() and dE.is_zero()
    primitive = None
    bv_res = None
    if closed:
        primitive = linear_combine(
            [1, -sDE],
            [cyclic_brace1(D, [E], 1, w, unit), cyclic_brace1(E, [D], 1, w, unit)],
        )
        lhs_bv = linear_combine(
            [1, -1, -1, sDE],
            [
                gbracket(D, E),
                bv_delta(cup(q, D, E), w, unit),
                _brace_q_delta(q, D, E, w, unit),
                _brace_q_delta(q, E, D, w, unit),
            ],
        )
        bv_res = tower_sub(lhs_bv, hochschild_delta(s, primitive))
    return BvReport(res1, res2, res3, closed, primitive, bv_res)


def q_lemma_suite(s: OchaStructure, towers: Sequence[CochainTower]) -> list:
    """Unit-pairing identities of the structure tower plus the BV-operator
    square and commutation, on the supplied normalized test towers.

    Returns (name, residual_is_zero) pairs.
    """
    _require_cyclic_unital(s)
    w, unit = s.omega, s.unit
    q = s.q
    out = []
    out.append(("delta(q) = 0", bv_delta(q, w, unit).is_zero()))
    for idx, D in enumerate(towers):
        Dn = normalized_project(D, unit)
        name = f"tower{idx}"
        got = cyclic_brace1(q, [Dn], 1, w, unit)
        out.append((f"q{{D,p}} = D [{name}]", tower_sub(got, Dn).is_zero()))
        got = cyclic_brace1(q, [Dn], 0, w, unit)
        out.append((f"q{{p,D}} = -D [{name}]",
                    linear_combine([1, 1], [got, Dn]).is_zero()))
        out.append((f"q{{D{{<>}}}} = 0 [{name}]",
                    cyclic_brace2(q, [Dn], [], (1, 0), w, unit).is_zero()))
        dd = bv_delta(bv_delta(Dn, w, unit), w, unit)
        out.append((f"Delta^2 = 0 [{name}]", dd.is_zero()))
        delta_of_bv = hochschild_delta(s, bv_delta(Dn, w, unit))
        corner = CornerInsertion(bv_delta_corner(Dn, w, unit))
        if not corner.is_zero():
            delta_of_bv = linear_combine([1, 1],
                                         [delta_of_bv, brace(q, [corner])])
        comm = tower_sub(delta_of_bv, bv_delta(hochschild_delta(s, Dn), w, unit))
        out.append((f"delta Delta = Delta delta [{name}]", comm.is_zero()))
    for i, j in itertools.combinations(range(len(towers)), 2):
        Dn = normalized_project(towers[i], unit)
        En = normalized_project(towers[j], unit)
        pair_name = f"towers{i},{j}"
        for anchor in range(3):
            got = cyclic_brace1(q, [Dn, En], anchor, w, unit)
            out.append((f"q{{..,p,..}} = 0 anchor {anchor} [{pair_name}]",
                        got.is_zero()))
        out.append((f"q{{D{{E,<>}}}} = 0 [{pair_name}]",
                    cyclic_brace2(q, [Dn], [En], (1, 1), w, unit).is_zero()))
        sde = -1 if (Dn.degree * En.degree) % 2 else 1
        lhs = cyclic_brace2(q, [Dn, En], [], (1, 0), w, unit)
        rhs = cyclic_brace2(q, [En, Dn], [], (2, 0), w, unit)
        out.append((f"q{{D{{<>}},E}} = -(-1)^de q{{E,D{{<>}}}} [{pair_name}]",
                    linear_combine([1, sde], [lhs, rhs]).is_zero()))
    return out


# ---------------------------------------------------------------------------
# dga -> OCHA builder


def shifted_space(space: GradedSpace, shift: int = -1, prefix: str = "z",
                  name: str | None = None) -> GradedSpace:
    """Relabeled copy with all degrees shifted; the closed-sector copy of an
    open-sector space sits one suspension lower."""
    return GradedSpace(
        tuple(prefix + lab for lab in space.labels),
        tuple(d + shift for d in space.degrees),
        name or (prefix + space.name),
    )


class CalibrationError(ValueError):
    """No sign choice makes the structure checks pass."""


def build_dga_ocha(a_space: GradedSpace, product, d_a, pairing, omega_degree: int,
                   unit_label: str, z_space: GradedSpace, d_z, f,
                   field=QQ) -> OchaStructure:
    """OCHA from a unital dga with pairing, a complex, and a chain map into it.

    product: (i, j) -> coefficient vector of e_i * e_j over the A-basis.
    d_a / d_z: basis index -> coefficient vector (omit for zero).
    f: Z basis index -> coefficient vector over A; must raise stored degree
    by one (a classically-degree-0 chain map, with Z stored one shift lower).
    pairing: matrix entries of the candidate form, up to overall sign.

    The sign of the product component and of the pairing are calibrated by
    searching {(-1)^{|a1|}, (-1)^{|a1|+1}} x {+1, -1}; the structure checks are
    the acceptance oracle and the first passing choice wins.
    """
    unit_idx = a_space.index(unit_label)
    if a_space.degrees[unit_idx] != -1:
        raise ValueError("unit must have degree -1")
    unit = basis_element(a_space, unit_idx)

    for zi, vec in (f or {}).items():
        for t, c in enumerate(vec):
            if c and a_space.degrees[t] != z_space.degrees[zi] + 1:
                raise ValueError(
                    "chain map must raise stored degree by one "
                    f"(z index {zi} -> a index {t})"
                )

    l_comp = {}
    if d_z:
        table = {(i,): tuple(vec) for i, vec in d_z.items() if any(vec)}
        if table:
            l_comp[1] = table
    l_tower = CeTower(z_space, 1, l_comp)

    failures = []
    for qsign in (1, 0):
        q_comps = {}
        if d_a:
            table = {((), (i,)): tuple(vec) for i, vec in d_a.items() if any(vec)}
            if table:
                q_comps[(0, 1)] = table
        if f:
            table = {((i,), ()): tuple(vec) for i, vec in f.items() if any(vec)}
            if table:
                q_comps[(1, 0)] = table
        m2 = {}
        for (i, j), vec in product.items():
            exp = (a_space.degrees[i] + qsign) % 2
            scaled = tuple(-c for c in vec) if exp else tuple(vec)
            if any(scaled):
                m2[((), (i, j))] = scaled
        if m2:
            q_comps[(0, 2)] = m2
        q_tower = CochainTower(z_space, a_space, 1, q_comps)
        for wsign in (1, -1):
            matrix = [[wsign * pairing[i][j] for j in range(a_space.dim)]
                      for i in range(a_space.dim)]
            omega = SymplecticForm(a_space, omega_degree, matrix, field)
            s = OchaStructure(l_tower, q_tower, unit, omega)
            problems = omega_audit(omega)
            if not problems:
                problems = s.axiom_report()
            if not problems and not s.is_unital():
                problems = ["unit conditions fail"]
            if not problems and not s.is_cyclic_structure():
                problems = ["pairing is not cyclic for the structure"]
            if not problems:
                return s
            failures.append(
                f"qsign=(-1)^(|a|+{qsign}), wsign={wsign}: {problems[0]}"
            )
    raise CalibrationError("no sign calibration passes the checks: "
                           + " | ".join(failures))
