"""Constant symplectic structures, the BV operator, and cyclic brace operations.

Every operation here is defined through a pairing sum: the value of the result
paired against a probe vector a_0 equals a signed sum of the base tower paired
against the distinguished unit, over all cyclic rotations of the A-inputs and
all insertions of the arguments.  The result tower is recovered through the
(cached) inverse of the pairing matrix.

Sign bookkeeping follows one rule everywhere: write the term as a reordering of
the symbol sequence (operators in listed order, z-letters in input order,
a_1..a_k, a_0) into the nested reading order, and take the Koszul sign of that
reordering.  This reproduces the printed signs of the brace operation, the BV
operator and the rightmost-anchor cyclic brace, and fixes the general-anchor
and diamond cases.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from . import _linalg
from .core import Element, GradedSpace, QQ, assignment_split_sign, compositions_sizes
from .cochains import (
    CeTower,
    CochainTower,
    WindowError,
    linear_combine,
    tower_sub,
)
from .braces import CornerInsertion, brace, closed_action


# ---------------------------------------------------------------------------
# symplectic form


class SymplecticForm:
    """Nondegenerate graded-skew pairing on A of homogeneous degree."""

    def __init__(self, space: GradedSpace, degree: int, matrix, field=QQ):
        self.space = space
        self.degree = degree
        self.field = field
        self.matrix = tuple(tuple(row) for row in matrix)
        if len(self.matrix) != space.dim or any(len(r) != space.dim for r in self.matrix):
            raise ValueError("pairing matrix has wrong shape")
        self._inverse = None

    @property
    def inverse(self):
        if self._inverse is None:
            self._inverse = _linalg.invert_matrix(
                [list(r) for r in self.matrix], self.field
            )
        return self._inverse

    def pair_basis(self, i: int, j: int):
        return self.matrix[i][j]

    def pair(self, x: Element, y: Element):
        acc = self.field.zero
        for i, xi in enumerate(x.coeffs):
            if not xi:
                continue
            row = self.matrix[i]
            for j, yj in enumerate(y.coeffs):
                if yj and row[j]:
                    acc = acc + xi * row[j] * yj
        return acc

    def pair_vec(self, vec, j: int):
        """omega(sum_i vec_i e_i, e_j)."""
        acc = self.field.zero
        for i, xi in enumerate(vec):
            if xi and self.matrix[i][j]:
                acc = acc + xi * self.matrix[i][j]
        return acc

    def unit_pairing_vector(self, unit: Element):
        """wu[i] = omega(e_i, unit); pairing any vector against the unit is a dot."""
        return tuple(
            sum((self.matrix[i][j] * uj for j, uj in enumerate(unit.coeffs) if uj),
                self.field.zero)
            for i in range(self.space.dim)
        )

    def solve_pairings(self, c):
        """The unique x with omega(x, e_j) = c_j for all j."""
        inv = self.inverse
        n = self.space.dim
        return tuple(
            sum((c[j] * inv[j][i] for j in range(n) if c[j]), self.field.zero)
            for i in range(n)
        )


def omega_audit(w: SymplecticForm) -> list:
    """Violations of graded skew-symmetry, degree support, or nondegeneracy."""
    out = []
    degs = w.space.degrees
    labels = w.space.labels
    for i in range(w.space.dim):
        for j in range(w.space.dim):
            sign = -1 if (degs[i] * degs[j] + 1) % 2 else 1
            if w.matrix[i][j] != sign * w.matrix[j][i]:
                out.append(
                    f"skew-symmetry fails on ({labels[i]},{labels[j]}): "
                    f"{w.matrix[i][j]} != {sign}*{w.matrix[j][i]}"
                )
            if w.matrix[i][j] and degs[i] + degs[j] + w.degree != 0:
                out.append(
                    f"degree support fails on ({labels[i]},{labels[j]}): "
                    f"{degs[i]}+{degs[j]}+{w.degree} != 0"
                )
    try:
        w.inverse
    except ValueError:
        out.append("pairing matrix is singular")
    return out


def _require_valid(w: SymplecticForm):
    problems = omega_audit(w)
    if problems:
        raise ValueError("invalid symplectic form: " + "; ".join(problems))


# ---------------------------------------------------------------------------
# cyclicity


def is_cyclic(D: CochainTower, w: SymplecticForm) -> bool:
    """omega(D(z;a_1..a_k), a_0) = (-1)^{|a_0| sum|a_i|} omega(D(z;a_0..a_{k-1}), a_k)
    on all basis fillings of all stored components with k >= 1."""
    _require_valid(w)
    sa = D.space_a
    for (l, k), table in D.components.items():
        if k == 0:
            continue
        for zw in D.space_z.wedge_words(l):
            for aw in sa.tensor_words(k):
                lhs_vec = D.value(zw, aw)
                for a0 in range(sa.dim):
                    p = sa.degrees[a0] * sa.degree_of_word(aw)
                    rot_vec = D.value(zw, (a0,) + aw[:-1])
                    lhs = w.pair_vec(lhs_vec, a0)
                    rhs = w.pair_vec(rot_vec, aw[-1])
                    if p % 2:
                        rhs = -rhs
                    if lhs != rhs:
                        return False
    return True


def _rotate_component(D: CochainTower, w: SymplecticForm, l: int, k: int) -> dict:
    """One cyclic rotation of the (l,k) component through the pairing."""
    sa = D.space_a
    out = {}
    for zw in D.space_z.wedge_words(l):
        for aw in sa.tensor_words(k):
            c = []
            for a0 in range(sa.dim):
                p = sa.degrees[a0] * sa.degree_of_word(aw)
                vec = D.value(zw, (a0,) + aw[:-1])
                val = w.pair_vec(vec, aw[-1])
                c.append(-val if p % 2 else val)
            x = w.solve_pairings(c)
            if any(x):
                out[(zw, aw)] = x
    return out


def cyclicize(D: CochainTower, w: SymplecticForm) -> CochainTower:
    """Average of the omega-conjugated cyclic rotations; output is cyclic.

    Divides by k+1 per component, so a prime field with p | k+1 is rejected.
    """
    _require_valid(w)
    field = w.field
    comps = {}
    for (l, k) in D.bidegrees():
        if field.char and (k + 1) % field.char == 0:
            raise ValueError(
                f"cannot average {k + 1} rotations in characteristic {field.char}"
            )
        inv_count = field.one / field(k + 1)
        acc = {key: list(vec) for key, vec in D.components[(l, k)].items()}
        current = CochainTower(D.space_z, D.space_a, D.degree,
                               {(l, k): D.components[(l, k)]})
        for _ in range(k):
            rotated = _rotate_component(current, w, l, k)
            current = CochainTower(D.space_z, D.space_a, D.degree, {(l, k): rotated})
            for key, vec in rotated.items():
                tgt = acc.setdefault(key, [0] * D.space_a.dim)
                for t, v in enumerate(vec):
                    tgt[t] = tgt[t] + v
        table = {}
        for key, vec in acc.items():
            scaled = tuple(inv_count * v for v in vec)
            if any(scaled):
                table[key] = scaled
        if table:
            comps[(l, k)] = table
    return CochainTower(D.space_z, D.space_a, D.degree, comps, D.window)


# ---------------------------------------------------------------------------
# anchors


@dataclass(frozen=True)
class AnchorSpec:
    """Anchor position: `after` = s for first-order braces (probe slot after the
    s-th argument); (`outer` = i, `inner` = j) for second-order braces (probe
    inside the i-th outer argument, after its j-th inner argument)."""

    after: int | None = None
    outer: int | None = None
    inner: int | None = None


def _anchor_after(anchor, n: int) -> int:
    s = anchor.after if isinstance(anchor, AnchorSpec) else int(anchor)
    if s is None or not 0 <= s <= n:
        raise ValueError(f"first-order anchor must satisfy 0 <= s <= {n}")
    return s


def _anchor_pair(anchor, m: int, n: int) -> tuple:
    if isinstance(anchor, AnchorSpec):
        i, j = anchor.outer, anchor.inner
    else:
        i, j = anchor
    if i is None or not 1 <= i <= m:
        raise ValueError(f"second-order outer index must satisfy 1 <= i <= {m}")
    if j is None or not 0 <= j <= n:
        raise ValueError(f"second-order inner index must satisfy 0 <= j <= {n}")
    return i, j


# ---------------------------------------------------------------------------
# first-order cyclic brace and the BV operator


def _cyclic_window(D: CochainTower, args, extra: int) -> int | None:
    windows = [t.window for t in (D, *args) if t.window is not None]
    if not windows:
        return None
    n_out = min(windows) - 1 - extra
    if n_out < 1:
        raise WindowError(
            f"cyclic brace window underflow: {min(windows)} - 1 - {extra} < 1"
        )
    return n_out


def _capped_targets(window: int):
    return {
        (l, n - l)
        for n in range(1, window + 1)
        for l in range(n + 1)
        if (l, n - l) != (0, 0)
    }


def _cyclic1_reachable(D: CochainTower, args):
    n = len(args)
    out = set()
    arg_comps = [sorted(e.components.keys()) for e in args]
    for (ld, kd) in D.components:
        if kd < n + 1:
            continue
        for combo in itertools.product(*arg_comps):
            l_out = ld + sum(l for l, _ in combo)
            k_out = (kd - n - 1) + sum(k for _, k in combo)
            if (l_out, k_out) != (0, 0):
                out.add((l_out, k_out))
    return out


def _pre_post_layout(n: int, s: int):
    """Bin token sequence for n arguments with the probe after argument s.

    Tokens: ("run", None) for a raw segment, ("chunk", p) for argument p's
    inputs, ("a0", None) for the probe slot.  2n + 2 raw bins in total.
    """
    layout = [("run", None)]
    for p in range(1, s + 1):
        layout.append(("chunk", p))
        layout.append(("run", None))
    layout.append(("a0", None))
    layout.append(("run", None))
    for p in range(s + 1, n + 1):
        layout.append(("chunk", p))
        layout.append(("run", None))
    return layout


def cyclic_brace1(D: CochainTower, args: Sequence[CochainTower], anchor,
                  w: SymplecticForm, unit: Element) -> CochainTower:
    """First-order cyclic brace D{E_1,..,E_s, probe, E_{s+1},..,E_n}.

    With no arguments and anchor 0 this is the BV operator.
    """
    _require_valid(w)
    args = list(args)
    n = len(args)
    s = _anchor_after(anchor, n)
    degree = D.degree + sum(e.degree for e in args) - 1
    window = _cyclic_window(D, args, n)
    targets = _cyclic1_reachable(D, args) if window is None else _capped_targets(window)

    sz, sa = D.space_z, D.space_a
    dim = sa.dim
    a_degs = sa.degrees
    arg_deg = [e.degree for e in args]
    layout = _pre_post_layout(n, s)
    nbins = 2 * n + 2
    a0_bin = layout.index(("a0", None))
    wu = w.unit_pairing_vector(unit)

    comps = {}
    for (l_out, k_out) in sorted(targets):
        table = {}
        bin_layouts = list(compositions_sizes(k_out, nbins))
        for zw in sz.wedge_words(l_out):
            zdegs = [sz.degrees[i] for i in zw]
            for assign in itertools.product(range(n + 1), repeat=l_out):
                eps = assignment_split_sign(assign, zdegs)
                zwords = [[] for _ in range(n + 1)]
                for pos, b in enumerate(assign):
                    zwords[b].append(zw[pos])
                zwords = [tuple(x) for x in zwords]
                zbdeg = [sum(sz.degrees[i] for i in x) for x in zwords]
                opz = 0
                for p in range(1, n + 1):
                    opz += arg_deg[p - 1] * sum(zbdeg[:p])
                for aw in sa.tensor_words(k_out):
                    apre = [0]
                    for i in aw:
                        apre.append(apre[-1] + a_degs[i])
                    key = (zw, aw)
                    for sizes_all in bin_layouts:
                        term = _cyclic1_term(
                            D, args, layout, sizes_all, a0_bin, aw, apre,
                            zwords, zbdeg, arg_deg, eps + opz, s, k_out, wu, w,
                        )
                        if term is None:
                            continue
                        cur = table.get(key)
                        if cur is None:
                            table[key] = term
                        else:
                            table[key] = [a + b for a, b in zip(cur, term)]
        cleaned = {}
        for key, c in table.items():
            x = w.solve_pairings(c)
            if any(x):
                cleaned[key] = x
        if cleaned:
            comps[(l_out, k_out)] = cleaned
    return CochainTower(sz, sa, degree, comps, window)


def _cyclic1_term(D, args, layout, sizes, a0_bin, aw, apre, zwords, zbdeg,
                  arg_deg, phi_base, s, k, wu, w):
    """Pairing contributions of one (rotation, composition) term, as a vector
    over the probe basis; None when the term dies early."""
    n = len(args)
    dim = D.space_a.dim
    # sizes cover the raw bins only; the probe token carries none
    full = list(sizes[:a0_bin]) + [0] + list(sizes[a0_bin:])
    r = sum(full[a0_bin + 1:])
    # positions: pre-anchor bins slice r..k-1, post-anchor bins slice 0..r-1
    pos = []
    cursor = r
    for b in range(a0_bin):
        pos.append(range(cursor, cursor + full[b]))
        cursor += full[b]
    pos.append(None)  # probe slot
    cursor = 0
    for b in range(a0_bin + 1, len(layout)):
        pos.append(range(cursor, cursor + full[b]))
        cursor += full[b]

    chunk_slices = {}
    template = []
    raw_prefix = 0
    prefix_per_op = {}
    for b, (tok, p) in enumerate(layout):
        if tok == "run":
            for t in pos[b]:
                template.append(("raw", aw[t]))
                raw_prefix += apre[t + 1] - apre[t]
        elif tok == "chunk":
            prefix_per_op[p] = raw_prefix
            chunk = tuple(aw[t] for t in pos[b])
            chunk_slices[p] = chunk
            template.append(("op", p))
            for t in pos[b]:
                raw_prefix += apre[t + 1] - apre[t]
        else:
            template.append(("a0", None))

    kd = len(template)
    ld = len(zwords[0])
    if D.window is None and (ld, kd) not in D.components:
        return None

    vals = []
    for p in range(1, n + 1):
        v = args[p - 1].value(zwords[p], chunk_slices[p])
        if not any(v):
            return None
        vals.append(v)

    phi0 = phi_base + apre[r] * (apre[k] - apre[r])
    phi1 = apre[r]
    for p in range(1, n + 1):
        weight = arg_deg[p - 1] + zbdeg[p]
        phi0 += prefix_per_op[p] * weight
        if p > s:
            phi1 += weight

    out = None
    choices = [[(i, c) for i, c in enumerate(v) if c] for v in vals]
    for pick in itertools.product(*choices):
        coef = 1
        for _, c in pick:
            coef = coef * c
        base_args = []
        for tok, v in template:
            if tok == "raw":
                base_args.append(v)
            elif tok == "op":
                base_args.append(pick[v - 1][0])
            else:
                base_args.append(None)
        slot = base_args.index(None)
        for j in range(dim):
            base_args[slot] = j
            vec = D.entry(ld, kd, zwords[0], tuple(base_args))
            if not any(vec):
                continue
            val = sum((vec[t] * wu[t] for t in range(dim) if vec[t] and wu[t]),
                      w.field.zero)
            if not val:
                continue
            exp = phi0 + D.space_a.degrees[j] * phi1
            if exp % 2:
                val = -val
            if out is None:
                out = [w.field.zero] * dim
            out[j] = out[j] + coef * val
        base_args[slot] = None
    return out


def bv_delta(D: CochainTower, w: SymplecticForm, unit: Element) -> CochainTower:
    """BV operator: probe-only cyclic brace; degree drops by one."""
    return cyclic_brace1(D, [], 0, w, unit)


def bv_delta_corner(D: CochainTower, w: SymplecticForm, unit: Element) -> Element:
    """The (0,0)-corner of the BV operator, sourced from D's (0,1)-component.

    The cochain space drops this A-element, but identities that insert a
    probe-operator output back into a brace need it (see CornerInsertion)."""
    _require_valid(w)
    sa = D.space_a
    wu = w.unit_pairing_vector(unit)
    c = []
    for j in range(sa.dim):
        vec = D.value((), (j,)) if (0, 1) in D.components else (0,) * sa.dim
        c.append(sum((vec[t] * wu[t] for t in range(sa.dim) if vec[t] and wu[t]),
                     w.field.zero))
    x = w.solve_pairings(c)
    return Element(sa, x, D.degree - 1)


# ---------------------------------------------------------------------------
# second-order cyclic brace


def _cyclic2_reachable(D, outer, inner, i):
    m, n = len(outer), len(inner)
    out = set()
    outer_comps = [sorted(e.components.keys()) for e in outer]
    inner_comps = [sorted(f.components.keys()) for f in inner]
    for (ld, kd) in D.components:
        if kd < m:
            continue
        for ocombo in itertools.product(*outer_comps):
            lq, kq = ocombo[i - 1]
            if kq < n + 1:
                continue
            for icombo in itertools.product(*inner_comps):
                l_out = ld + sum(l for l, _ in ocombo) + sum(l for l, _ in icombo)
                k_out = (kd - m) + (kq - n - 1) \
                    + sum(k for t, (_, k) in enumerate(ocombo, 1) if t != i) \
                    + sum(k for _, k in icombo)
                if (l_out, k_out) != (0, 0):
                    out.add((l_out, k_out))
    return out


def cyclic_brace2(D: CochainTower, outer_args: Sequence[CochainTower],
                  inner_args: Sequence[CochainTower], anchor,
                  w: SymplecticForm, unit: Element) -> CochainTower:
    """Second-order cyclic brace: the probe slot sits inside the i-th outer
    argument, after its j-th inserted inner argument.

    D{E_1,..,E_i{F_1,..,F_j, probe, F_{j+1},..,F_n},..,E_m}
    """
    _require_valid(w)
    outer = list(outer_args)
    inner = list(inner_args)
    m, n = len(outer), len(inner)
    i, j = _anchor_pair(anchor, m, n)
    degree = D.degree + sum(e.degree for e in outer) + sum(f.degree for f in inner) - 1
    window = _cyclic_window(D, outer + inner, m + n)
    targets = (_cyclic2_reachable(D, outer, inner, i) if window is None
               else _capped_targets(window))

    sz, sa = D.space_z, D.space_a
    dim = sa.dim
    a_degs = sa.degrees
    wu = w.unit_pairing_vector(unit)
    E_i = outer[i - 1]

    # z-block order: P (D), P_1..P_{i-1}, Q (E_i), Q_1..Q_n (F's), P_{i+1}..P_m
    nblocks = m + n + 1
    block_of_outer = {}
    for t in range(1, m + 1):
        if t < i:
            block_of_outer[t] = t
        elif t == i:
            block_of_outer[t] = i
        else:
            block_of_outer[t] = n + t
    block_of_inner = {u: i + u for u in range(1, n + 1)}

    # op reading order with their z-blocks and degrees
    ops = []  # (kind, idx, block)
    for t in range(1, i):
        ops.append(("outer", t, block_of_outer[t]))
    ops.append(("outer", i, block_of_outer[i]))
    for u in range(1, n + 1):
        ops.append(("inner", u, block_of_inner[u]))
    for t in range(i + 1, m + 1):
        ops.append(("outer", t, block_of_outer[t]))

    def op_degree(kind, idx):
        return outer[idx - 1].degree if kind == "outer" else inner[idx - 1].degree

    # bin layout in reading order; tokens refer to the flattened template
    layout = []
    for t in range(1, i):
        layout.append(("jrun", None))
        layout.append(("ochunk", t))
    layout.append(("jrun", None))        # J_{i-1}
    for u in range(1, j + 1):
        layout.append(("irun", None))
        layout.append(("ichunk", u))
    layout.append(("irun", None))        # segment before the probe
    layout.append(("a0", None))
    layout.append(("irun", None))        # segment after the probe
    for u in range(j + 1, n + 1):
        layout.append(("ichunk", u))
        layout.append(("irun", None))
    for t in range(i + 1, m + 1):
        layout.append(("jrun", None))
        layout.append(("ochunk", t))
    layout.append(("jrun", None))        # J_m
    nbins = len(layout) - 1              # all but the probe token carry sizes
    a0_bin = layout.index(("a0", None))

    comps = {}
    for (l_out, k_out) in sorted(targets):
        table = {}
        for zw in sz.wedge_words(l_out):
            zdegs = [sz.degrees[idx] for idx in zw]
            for assign in itertools.product(range(nblocks), repeat=l_out):
                eps = assignment_split_sign(assign, zdegs)
                zwords = [[] for _ in range(nblocks)]
                for pos, b in enumerate(assign):
                    zwords[b].append(zw[pos])
                zwords = [tuple(x) for x in zwords]
                zbdeg = [sum(sz.degrees[idx] for idx in x) for x in zwords]
                opz = 0
                for kind, idx, blk in ops:
                    opz += op_degree(kind, idx) * sum(zbdeg[:blk])
                for aw in sa.tensor_words(k_out):
                    apre = [0]
                    for idx in aw:
                        apre.append(apre[-1] + a_degs[idx])
                    key = (zw, aw)
                    for sizes in compositions_sizes(k_out, nbins):
                        term = _cyclic2_term(
                            D, outer, inner, i, j, layout, sizes, a0_bin,
                            aw, apre, zwords, zbdeg, block_of_outer,
                            block_of_inner, eps + opz, k_out, wu, w,
                        )
                        if term is None:
                            continue
                        cur = table.get(key)
                        if cur is None:
                            table[key] = term
                        else:
                            table[key] = [a + b for a, b in zip(cur, term)]
        cleaned = {}
        for key, c in table.items():
            x = w.solve_pairings(c)
            if any(x):
                cleaned[key] = x
        if cleaned:
            comps[(l_out, k_out)] = cleaned
    return CochainTower(sz, sa, degree, comps, window)


def _cyclic2_term(D, outer, inner, i, j, layout, sizes, a0_bin, aw, apre,
                  zwords, zbdeg, block_of_outer, block_of_inner, phi_base,
                  k, wu, w):
    m, n = len(outer), len(inner)
    sa = D.space_a
    dim = sa.dim
    E_i = outer[i - 1]

    # sizes indexes skip the probe token
    full_sizes = []
    si = 0
    for tok in layout:
        if tok[0] == "a0":
            full_sizes.append(0)
        else:
            full_sizes.append(sizes[si])
            si += 1
    r = sum(full_sizes[a0_bin + 1:])

    pos = []
    cursor = r
    for b in range(a0_bin):
        pos.append(range(cursor, cursor + full_sizes[b]))
        cursor += full_sizes[b]
    pos.append(None)
    cursor = 0
    for b in range(a0_bin + 1, len(layout)):
        pos.append(range(cursor, cursor + full_sizes[b]))
        cursor += full_sizes[b]

    outer_template = []   # D's argument tokens
    inner_template = []   # E_i's argument tokens
    ochunks = {}
    ichunks = {}
    raw_prefix = 0
    prefix_outer = {}
    prefix_inner = {}
    after_anchor_outer = set()
    after_anchor_inner = set()
    seen_anchor = False
    ei_opened = False
    for b, (tok, p) in enumerate(layout):
        if tok == "jrun":
            for t in pos[b]:
                outer_template.append(("raw", aw[t]))
                raw_prefix += apre[t + 1] - apre[t]
        elif tok == "ochunk":
            prefix_outer[p] = raw_prefix
            if seen_anchor:
                after_anchor_outer.add(p)
            ochunks[p] = tuple(aw[t] for t in pos[b])
            outer_template.append(("op", p))
            for t in pos[b]:
                raw_prefix += apre[t + 1] - apre[t]
        elif tok == "irun":
            if not ei_opened:
                prefix_outer[i] = raw_prefix
                outer_template.append(("op", i))
                ei_opened = True
            for t in pos[b]:
                inner_template.append(("raw", aw[t]))
                raw_prefix += apre[t + 1] - apre[t]
        elif tok == "ichunk":
            if not ei_opened:
                prefix_outer[i] = raw_prefix
                outer_template.append(("op", i))
                ei_opened = True
            prefix_inner[p] = raw_prefix
            if seen_anchor:
                after_anchor_inner.add(p)
            ichunks[p] = tuple(aw[t] for t in pos[b])
            inner_template.append(("op", p))
            for t in pos[b]:
                raw_prefix += apre[t + 1] - apre[t]
        else:  # a0
            if not ei_opened:
                prefix_outer[i] = raw_prefix
                outer_template.append(("op", i))
                ei_opened = True
            inner_template.append(("a0", None))
            seen_anchor = True

    kd = len(outer_template)
    ld = len(zwords[0])
    if D.window is None and (ld, kd) not in D.components:
        return None
    k_ei = len(inner_template)
    zq = zwords[block_of_outer[i]]
    if E_i.window is None and (len(zq), k_ei) not in E_i.components:
        return None

    outer_vals = {}
    for t in range(1, m + 1):
        if t == i:
            continue
        v = outer[t - 1].value(zwords[block_of_outer[t]], ochunks[t])
        if not any(v):
            return None
        outer_vals[t] = v
    inner_vals = []
    for u in range(1, n + 1):
        v = inner[u - 1].value(zwords[block_of_inner[u]], ichunks[u])
        if not any(v):
            return None
        inner_vals.append(v)

    phi0 = phi_base + apre[r] * (apre[k] - apre[r])
    phi1 = apre[r]
    zq_weight = E_i.degree + zbdeg[block_of_outer[i]]
    phi0 += prefix_outer[i] * zq_weight
    for t in range(1, m + 1):
        if t == i:
            continue
        weight = outer[t - 1].degree + zbdeg[block_of_outer[t]]
        phi0 += prefix_outer[t] * weight
        if t in after_anchor_outer:
            phi1 += weight
    for u in range(1, n + 1):
        weight = inner[u - 1].degree + zbdeg[block_of_inner[u]]
        phi0 += prefix_inner[u] * weight
        if u in after_anchor_inner:
            phi1 += weight

    out = None
    inner_choices = [[(idx, c) for idx, c in enumerate(v) if c] for v in inner_vals]
    outer_other = [t for t in range(1, m + 1) if t != i]
    outer_choices = [[(idx, c) for idx, c in enumerate(outer_vals[t]) if c]
                     for t in outer_other]
    for ipick in itertools.product(*inner_choices):
        icoef = 1
        for _, c in ipick:
            icoef = icoef * c
        ei_args = []
        for tok, v in inner_template:
            if tok == "raw":
                ei_args.append(v)
            elif tok == "op":
                ei_args.append(ipick[v - 1][0])
            else:
                ei_args.append(None)
        slot = ei_args.index(None)
        for a0 in range(dim):
            ei_args[slot] = a0
            v_i = E_i.value(zq, tuple(ei_args))
            if not any(v_i):
                continue
            exp_a0 = phi0 + sa.degrees[a0] * phi1
            for opick in itertools.product(*outer_choices):
                ocoef = icoef
                for _, c in opick:
                    ocoef = ocoef * c
                picks = dict(zip(outer_other, (idx for idx, _ in opick)))
                for bi, ci in ((idx, c) for idx, c in enumerate(v_i) if c):
                    d_args = []
                    for tok, v in outer_template:
                        if tok == "raw":
                            d_args.append(v)
                        elif v == i:
                            d_args.append(bi)
                        else:
                            d_args.append(picks[v])
                    vec = D.entry(ld, kd, zwords[0], tuple(d_args))
                    if not any(vec):
                        continue
                    val = sum((vec[t] * wu[t] for t in range(dim)
                               if vec[t] and wu[t]), w.field.zero)
                    if not val:
                        continue
                    if exp_a0 % 2:
                        val = -val
                    if out is None:
                        out = [w.field.zero] * dim
                    out[a0] = out[a0] + ocoef * ci * val
        ei_args[slot] = None
    return out


# ---------------------------------------------------------------------------
# cyclic brace relations and interchange identities


def _chunk_tuples(count: int, lo: int, hi: int):
    """Non-decreasing lo <= i_1 <= j_1 <= ... <= i_count <= j_count <= hi."""
    def rec(c, start):
        if c == 0:
            yield ()
            return
        for a in range(start, hi + 1):
            for b in range(a, hi + 1):
                for rest in rec(c - 1, b):
                    yield (a, b) + rest
    return rec(count, lo)


def cyclic_relation_residual_i(D: CochainTower, E_list, F_list,
                               w: SymplecticForm, unit: Element) -> CochainTower:
    """LHS - RHS of the expansion of D{E...}{F..., probe}; zero tower."""
    E_list, F_list = list(E_list), list(F_list)
    m, n = len(E_list), len(F_list)
    fpre = [0]
    for f in F_list:
        fpre.append(fpre[-1] + f.degree)
    lhs = cyclic_brace1(brace(D, E_list), F_list, n, w, unit)
    terms = []
    coeffs = []
    for s in range(m + 1):
        tail_t = sum(E_list[p].degree for p in range(s, m)) * fpre[n]
        for idx in _chunk_tuples(s, 0, n):
            t = tail_t
            args = []
            cursor = 0
            for p in range(s):
                i_p, j_p = idx[2 * p], idx[2 * p + 1]
                args.extend(F_list[cursor:i_p])
                args.append(brace(E_list[p], F_list[i_p:j_p]))
                cursor = j_p
                t += E_list[p].degree * fpre[i_p]
            args.extend(F_list[cursor:])
            anchor = len(args)
            args.extend(E_list[s:])
            terms.append(cyclic_brace1(D, args, anchor, w, unit))
            coeffs.append(-1 if t % 2 else 1)
    for s in range(1, m + 1):
        tail_t = sum(E_list[p].degree for p in range(s, m)) * fpre[n]
        for idx in _chunk_tuples(s - 1, 0, n):
            lo = idx[-1] if idx else 0
            for i_s in range(lo, n + 1):
                t = tail_t + E_list[s - 1].degree * fpre[i_s]
                args = []
                cursor = 0
                for p in range(s - 1):
                    i_p, j_p = idx[2 * p], idx[2 * p + 1]
                    args.extend(F_list[cursor:i_p])
                    args.append(brace(E_list[p], F_list[i_p:j_p]))
                    cursor = j_p
                    t += E_list[p].degree * fpre[i_p]
                args.extend(F_list[cursor:i_s])
                args.append(E_list[s - 1])
                outer_i = len(args)
                args.extend(E_list[s:])
                inner = F_list[i_s:]
                terms.append(
                    cyclic_brace2(D, args, inner, (outer_i, len(inner)), w, unit)
                )
                coeffs.append(-1 if t % 2 else 1)
    rhs = linear_combine(coeffs, terms)
    return tower_sub(lhs, rhs)


def cyclic_relation_residual_ii(D: CochainTower, E_list, F_list,
                                w: SymplecticForm, unit: Element) -> CochainTower:
    """LHS - RHS of the expansion of D{E..., probe}{F...}; zero tower."""
    E_list, F_list = list(E_list), list(F_list)
    m, n = len(E_list), len(F_list)
    fpre = [0]
    for f in F_list:
        fpre.append(fpre[-1] + f.degree)
    lhs = brace(cyclic_brace1(D, E_list, m, w, unit), F_list)
    terms = []
    coeffs = []
    for r in range(n + 1):
        wrap = (fpre[r]) * (fpre[n] - fpre[r])
        for idx in _chunk_tuples(m, r, n):
            tau = wrap
            args = []
            cursor = r
            for p in range(m):
                i_p, j_p = idx[2 * p], idx[2 * p + 1]
                args.extend(F_list[cursor:i_p])
                args.append(brace(E_list[p], F_list[i_p:j_p]))
                cursor = j_p
                tau += E_list[p].degree * (fpre[i_p] - fpre[r])
            args.extend(F_list[cursor:])
            anchor = len(args)
            args.extend(F_list[:r])
            terms.append(cyclic_brace1(D, args, anchor, w, unit))
            coeffs.append(-1 if tau % 2 else 1)
    rhs = linear_combine(coeffs, terms)
    return tower_sub(lhs, rhs)


def interchange_residual_first(F: CochainTower, D: CochainTower, E_list,
                               anchor: int, w: SymplecticForm,
                               unit: Element) -> CochainTower:
    """F{D{E_1..E_m, probe, E_{m+1}..E_n}} - (-1)^{e1} D{E_1.., F{probe}, ..E_n}.

    With no arguments the probed tower is the BV operator of D, whose dropped
    (0,0)-corner must still be inserted into F (CornerInsertion)."""
    E_list = list(E_list)
    m = _anchor_after(anchor, len(E_list))
    lhs = brace(F, [cyclic_brace1(D, E_list, m, w, unit)])
    if not E_list:
        corner = CornerInsertion(bv_delta_corner(D, w, unit))
        if not corner.is_zero():
            lhs = linear_combine([1, 1], [lhs, brace(F, [corner])])
    e1 = 1 + F.degree * (D.degree + sum(e.degree for e in E_list[:m]) - 1)
    outer = E_list[:m] + [F] + E_list[m:]
    rhs = cyclic_brace2(D, outer, [], (m + 1, 0), w, unit)
    return tower_sub(lhs, rhs.scale(-1 if e1 % 2 else 1))


def interchange_residual_second(F: CochainTower, D_list, s: int,
                                w: SymplecticForm, unit: Element) -> CochainTower:
    """F{D_1,..,D_s{probe},..,D_n} - (-1)^{e2} D_s{F{D_{s+1}..D_n, probe, D_1..D_{s-1}}}.

    The inserted probe-operator output carries its (0,0)-corner along."""
    D_list = list(D_list)
    n = len(D_list)
    if not 1 <= s <= n:
        raise ValueError("anchor index out of range")
    D_s = D_list[s - 1]
    pre = D_list[:s - 1]
    post = D_list[s:]
    lhs = brace(F, pre + [bv_delta(D_s, w, unit)] + post)
    corner = CornerInsertion(bv_delta_corner(D_s, w, unit))
    if not corner.is_zero():
        lhs = linear_combine([1, 1], [lhs, brace(F, pre + [corner] + post)])
    pre_deg = sum(d.degree for d in pre)
    post_deg = sum(d.degree for d in post)
    e2 = 1 + (D_s.degree - 1) * (F.degree + pre_deg) + pre_deg * post_deg
    inner = post + pre
    rhs = cyclic_brace2(D_s, [F], inner, (1, len(post)), w, unit)
    return tower_sub(lhs, rhs.scale(-1 if e2 % 2 else 1))


def interchange_residuals(F_cyclic: CochainTower, D: CochainTower, args,
                          anchor: int, w: SymplecticForm,
                          unit: Element) -> tuple:
    """Residual pair of both interchange identities for a cyclic tower F.

    The first residual treats D as the outer tower with `args` inserted and the
    probe after args[anchor-1]; the second places D as the probed argument of F
    at position anchor+1 among `args`.
    """
    if not is_cyclic(F_cyclic, w):
        raise ValueError("interchange identities need a cyclic first argument")
    args = list(args)
    res1 = interchange_residual_first(F_cyclic, D, args, anchor, w, unit)
    d_list = args[:anchor] + [D] + args[anchor:]
    res2 = interchange_residual_second(F_cyclic, d_list, anchor + 1, w, unit)
    return res1, res2


def delta_leibniz_residual(l: CeTower, D: CochainTower, E_list,
                           w: SymplecticForm, unit: Element,
                           anchor: int | None = None) -> CochainTower:
    """Leibniz rule of the closed action over the rightmost-probe cyclic brace.

    Only the rightmost anchor is supported; other anchors raise.
    """
    E_list = list(E_list)
    m = len(E_list)
    if anchor is not None and anchor != m:
        raise ValueError("only the rightmost anchor is supported")
    lhs = closed_action(l, cyclic_brace1(D, E_list, m, w, unit))
    total_e = sum(e.degree for e in E_list)
    terms = [cyclic_brace1(closed_action(l, D), E_list, m, w, unit)]
    coeffs = [-1 if (l.degree * total_e) % 2 else 1]
    for idx in range(m):
        tail = sum(e.degree for e in E_list[idx + 1:])
        new_args = E_list[:idx] + [closed_action(l, E_list[idx])] + E_list[idx + 1:]
        terms.append(cyclic_brace1(D, new_args, m, w, unit))
        coeffs.append(-1 if (l.degree * tail) % 2 else 1)
    rhs = linear_combine(coeffs, terms)
    return tower_sub(lhs, rhs)
