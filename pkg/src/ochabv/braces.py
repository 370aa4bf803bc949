"""Open-closed brace operation, closed string action, bracket and cup product.

The brace D{E_1,..,E_m} sums over all order-preserving insertions of the E_j
into D's A-slots and all distributions of the Z-inputs, with Koszul signs:
an inserted operator of weight |E_j| + |z-block of E_j| crosses the raw
A-inputs in front of it, the operator symbol |E_j| crosses the z-blocks in
front of its own, and the wedge split contributes its own sign.
"""

from __future__ import annotations

import itertools
from typing import Sequence

from .core import Element, assignment_split_sign, compositions_sizes
from .cochains import CeTower, CochainTower, WindowError, linear_combine, tower_sub


class CornerInsertion:
    """An A-element inserted as a 0-arity operator.

    The cochain space excludes the (0,0) corner, but the probe operators on a
    (0,1)-component land exactly there, and the identity suites must feed that
    value back into later insertions.  This wrapper lets `brace` accept it as
    an argument: it consumes no inputs and evaluates to a fixed element.
    """

    __slots__ = ("element", "degree", "window")

    def __init__(self, element: Element):
        if element.degree is None:
            raise ValueError("corner insertions must be homogeneous")
        self.element = element
        self.degree = element.degree
        self.window = None

    def is_finite(self) -> bool:
        return True

    def is_zero(self) -> bool:
        return all(not c for c in self.element.coeffs)

    @property
    def components(self):
        if self.is_zero():
            return {}
        return {(0, 0): {((), ()): self.element.coeffs}}

    def value(self, zw, aw):
        if len(zw) == 0 and len(aw) == 0:
            return self.element.coeffs
        return (0,) * len(self.element.coeffs)


def _prod_expand(vectors):
    """Iterate (index tuple, coefficient product) over nonzero picks of vectors."""
    choices = [[(i, c) for i, c in enumerate(v) if c] for v in vectors]
    if any(not ch for ch in choices):
        return
    for pick in itertools.product(*choices):
        coef = 1
        for _, c in pick:
            coef = coef * c
        yield tuple(i for i, _ in pick), coef


def _brace_window(D: CochainTower, args: Sequence[CochainTower]) -> int | None:
    """Conservative window: shrink by m when any argument has an A-arity-0 piece."""
    windows = [t.window for t in (D, *args) if t.window is not None]
    if not windows:
        return None
    n_in = min(windows)
    shrink = len(args) if any(
        any(k == 0 for (_l, k) in e.components) for e in args
    ) else 0
    n_out = n_in - shrink
    if n_out < 1:
        raise WindowError(f"brace window underflow: {n_in} - {shrink} < 1")
    return n_out


def _brace_reachable(D: CochainTower, args: Sequence[CochainTower]):
    """Output bidegrees hit by supported component combinations (finite case)."""
    m = len(args)
    out = set()
    arg_comps = [sorted(e.components.keys()) for e in args]
    for (ld, kd) in D.components:
        if kd < m:
            continue
        for combo in itertools.product(*arg_comps):
            l_out = ld + sum(l for l, _ in combo)
            k_out = kd - m + sum(k for _, k in combo)
            if (l_out, k_out) != (0, 0):
                out.add((l_out, k_out))
    return out


def _brace_component(D: CochainTower, args: Sequence[CochainTower],
                     l_out: int, k_out: int) -> dict:
    m = len(args)
    sz = D.space_z
    sa = D.space_a
    dim = sa.dim
    arg_degs = [e.degree for e in args]
    table = {}
    bin_layouts = list(compositions_sizes(k_out, 2 * m + 1))
    for zw in sz.wedge_words(l_out):
        zdegs = [sz.degrees[i] for i in zw]
        for assign in itertools.product(range(m + 1), repeat=l_out):
            # block 0 feeds D directly, block j feeds E_j
            eps = assignment_split_sign(assign, zdegs)
            zwords = [[] for _ in range(m + 1)]
            for pos, b in enumerate(assign):
                zwords[b].append(zw[pos])
            zwords = [tuple(w) for w in zwords]
            zblock_deg = [sum(sz.degrees[i] for i in w) for w in zwords]
            ld = len(zwords[0])
            # operator-symbol crossings over the z-blocks in front of its own
            opz = 0
            for j in range(1, m + 1):
                opz += arg_degs[j - 1] * sum(zblock_deg[:j])
            for aw in sa.tensor_words(k_out):
                apre = [0]
                for i in aw:
                    apre.append(apre[-1] + sa.degrees[i])
                acc = None
                for sizes in bin_layouts:
                    # bins: I_0, K_1, I_1, K_2, ..., K_m, I_m
                    kd = m + sum(sizes[2 * j] for j in range(m + 1))
                    if D.window is None and (ld, kd) not in D.components:
                        continue
                    bounds = [0]
                    for s in sizes:
                        bounds.append(bounds[-1] + s)
                    phi = eps + opz
                    vals = []
                    dead = False
                    for j in range(1, m + 1):
                        start, stop = bounds[2 * j - 1], bounds[2 * j]
                        phi += apre[start] * (arg_degs[j - 1] + zblock_deg[j])
                        v = args[j - 1].value(zwords[j], aw[start:stop])
                        if not any(v):
                            dead = True
                            break
                        vals.append(v)
                    if dead:
                        continue
                    sign = -1 if phi % 2 else 1
                    for picks, coef in _prod_expand(vals):
                        a_args = []
                        for j in range(m):
                            a_args.extend(aw[bounds[2 * j]:bounds[2 * j + 1]])
                            a_args.append(picks[j])
                        a_args.extend(aw[bounds[2 * m]:bounds[2 * m + 1]])
                        vec = D.entry(ld, kd, zwords[0], tuple(a_args))
                        if any(vec):
                            if acc is None:
                                acc = [0] * dim
                            sc = sign * coef
                            for t in range(dim):
                                if vec[t]:
                                    acc[t] = acc[t] + sc * vec[t]
                if acc is not None and any(acc):
                    key = (zw, aw)
                    cur = table.get(key)
                    if cur is None:
                        table[key] = tuple(acc)
                    else:
                        table[key] = tuple(a + b for a, b in zip(cur, acc))
    return table


def brace(D: CochainTower, args: Sequence[CochainTower],
          force_window: int | None = None) -> CochainTower:
    """D{E_1,...,E_m}; with no arguments returns a fresh handle on D's data.

    force_window bypasses the conservative shrink for callers (the Hochschild
    differential) that can prove the filtration keeps every read in range.
    """
    args = list(args)
    degree = D.degree + sum(e.degree for e in args)
    if not args:
        return CochainTower(D.space_z, D.space_a, D.degree,
                            D.components, D.window)
    if force_window is not None:
        window = force_window
    else:
        window = _brace_window(D, args)
    if window is None:
        targets = _brace_reachable(D, args)
    else:
        targets = {
            (l, k)
            for n in range(1, window + 1)
            for l in range(n + 1)
            for k in (n - l,)
        }
    comps = {}
    for (l, k) in sorted(targets):
        table = _brace_component(D, args, l, k)
        if table:
            comps[(l, k)] = table
    return CochainTower(D.space_z, D.space_a, degree, comps, window)


# ---------------------------------------------------------------------------
# closed string action


def closed_action(l: CeTower, D: CochainTower) -> CochainTower:
    """Insertion of an upstairs tower into the Z-slots: sum over [l]=J1|J2 of
    (-1)^eps D(l(z_J1) ^ z_J2; a).  Consumes only Z-arity, so the window of D
    is preserved (a capped l must cover the requested arities)."""
    sz, sa = D.space_z, D.space_a
    degree = l.degree + D.degree
    if D.window is None:
        targets = set()
        for (ld, k) in D.components:
            if ld < 1:
                continue
            for la in l.components:
                targets.add((ld - 1 + la, k))
        window = None
        if not l.is_finite():
            window = min(x for x in (l.window,) if x is not None)
            targets = {t for t in targets if t[0] + t[1] <= window}
    else:
        window = D.window if l.is_finite() else min(D.window, l.window)
        targets = {
            (lo, k)
            for n in range(1, window + 1)
            for lo in range(n + 1)
            for k in (n - lo,)
        }
    dim = sa.dim
    comps = {}
    for (l_out, k_out) in sorted(targets):
        if (l_out, k_out) == (0, 0) or l_out < 1:
            continue
        table = {}
        for zw in sz.wedge_words(l_out):
            zdegs = [sz.degrees[i] for i in zw]
            for aw in sa.tensor_words(k_out):
                acc = None
                for assign in itertools.product(range(2), repeat=l_out):
                    j1 = [zw[p] for p, b in enumerate(assign) if b == 0]
                    if not j1:
                        continue
                    j2 = tuple(zw[p] for p, b in enumerate(assign) if b == 1)
                    if l.components.get(len(j1)) is None and l.is_finite():
                        continue
                    eps = assignment_split_sign(assign, zdegs)
                    sign = -1 if eps else 1
                    u = l.value(tuple(j1))
                    for b, c in ((i, c) for i, c in enumerate(u) if c):
                        vec = D.value((b,) + j2, aw)
                        if any(vec):
                            if acc is None:
                                acc = [0] * dim
                            sc = sign * c
                            for t in range(dim):
                                if vec[t]:
                                    acc[t] = acc[t] + sc * vec[t]
                if acc is not None and any(acc):
                    table[(zw, aw)] = tuple(acc)
        if table:
            comps[(l_out, k_out)] = table
    return CochainTower(sz, sa, degree, comps, window)


# ---------------------------------------------------------------------------
# bracket, cup, residual identities


def gbracket(D: CochainTower, E: CochainTower) -> CochainTower:
    """Gerstenhaber-type bracket [D,E] = D{E} - (-1)^{|D||E|} E{D}."""
    s = -1 if (D.degree * E.degree) % 2 else 1
    return linear_combine([1, -s], [brace(D, [E]), brace(E, [D])])


def cup(q: CochainTower, D: CochainTower, E: CochainTower) -> CochainTower:
    """Cup product at cochain level: q{D, E}."""
    return brace(q, [D, E])


def _chunk_index_tuples(m: int, n: int):
    """Non-decreasing 0 <= i_1 <= j_1 <= ... <= i_m <= j_m <= n."""
    def rec(count, lo):
        if count == 0:
            yield ()
            return
        for i in range(lo, n + 1):
            for j in range(i, n + 1):
                for rest in rec(count - 1, j):
                    yield (i, j) + rest
    return rec(m, 0)


def brace_relation_residual(D: CochainTower, E_list: Sequence[CochainTower],
                            F_list: Sequence[CochainTower]) -> CochainTower:
    """LHS - RHS of the iterated-brace expansion D{E...}{F...}; zero tower."""
    E_list, F_list = list(E_list), list(F_list)
    m, n = len(E_list), len(F_list)
    lhs = brace(brace(D, E_list), F_list)
    fdeg = [f.degree for f in F_list]
    fpre = [0]
    for d in fdeg:
        fpre.append(fpre[-1] + d)
    terms = []
    coeffs = []
    for idx in _chunk_index_tuples(m, n):
        t = 0
        args = []
        cursor = 0
        for p in range(m):
            i_p, j_p = idx[2 * p], idx[2 * p + 1]
            args.extend(F_list[cursor:i_p])
            args.append(brace(E_list[p], F_list[i_p:j_p]))
            cursor = j_p
            t += E_list[p].degree * fpre[i_p]
        args.extend(F_list[cursor:])
        terms.append(brace(D, args))
        coeffs.append(-1 if t % 2 else 1)
    rhs = linear_combine(coeffs, terms)
    return tower_sub(lhs, rhs)


def closed_leibniz_residual(l: CeTower, D: CochainTower,
                            E_list: Sequence[CochainTower]) -> CochainTower:
    """Leibniz rule of the closed action over braces; zero tower.

    l^(D{E...}) = (-1)^{|l| sum|E|} l^(D){E...} + sum_i +- D{.., l^(E_i), ..}.
    """
    E_list = list(E_list)
    m = len(E_list)
    lhs = closed_action(l, brace(D, E_list))
    total_e = sum(e.degree for e in E_list)
    terms = [brace(closed_action(l, D), E_list)]
    coeffs = [-1 if (l.degree * total_e) % 2 else 1]
    for i in range(m):
        tail = sum(e.degree for e in E_list[i + 1:])
        new_args = E_list[:i] + [closed_action_on_tower(l, E_list[i])] + E_list[i + 1:]
        terms.append(brace(D, new_args))
        coeffs.append(-1 if (l.degree * tail) % 2 else 1)
    rhs = linear_combine(coeffs, terms)
    return tower_sub(lhs, rhs)


def closed_action_on_tower(l: CeTower, D: CochainTower) -> CochainTower:
    return closed_action(l, D)
