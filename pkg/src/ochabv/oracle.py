"""Brute-force oracle for every pairing-defined operation.

Evaluates the defining right-hand sides directly for given inputs and probe:
each term's sign is the Koszul sign of reordering an explicit symbol sequence
(operators, z-letters, A-inputs, probe) into the nested reading order, counted
pair by pair, and each term's value is computed through element-level tower
evaluation.  No table assembly, no pairing-matrix inversion, no incremental
sign formulas: an independent route against which the structured
implementations are checked entry by entry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .core import Element, compositions_sizes
from .cochains import CochainTower
from .cyclic import SymplecticForm


@dataclass(frozen=True)
class OBrace:
    """Plain brace head{args...}."""

    head: CochainTower
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class ODelta:
    """First-order cyclic brace head{args..., probe, args...}, probe after `anchor`."""

    head: CochainTower
    args: tuple
    anchor: int

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not 0 <= self.anchor <= len(self.args):
            raise ValueError("anchor out of range")


@dataclass(frozen=True)
class ODiamond:
    """Second-order cyclic brace: probe inside outer[outer_pos-1] after inner_pos
    of the inner insertions."""

    head: CochainTower
    outer: tuple
    inner: tuple
    outer_pos: int
    inner_pos: int

    def __post_init__(self):
        object.__setattr__(self, "outer", tuple(self.outer))
        object.__setattr__(self, "inner", tuple(self.inner))
        if not 1 <= self.outer_pos <= len(self.outer):
            raise ValueError("outer anchor out of range")
        if not 0 <= self.inner_pos <= len(self.inner):
            raise ValueError("inner anchor out of range")


def _reorder_sign(initial, final, degree):
    """(-1)^(sum of degree products over pairs that swap order)."""
    pos = {sym: i for i, sym in enumerate(initial)}
    exp = 0
    for u in range(len(final)):
        du = degree[final[u]]
        if du % 2 == 0:
            continue
        pu = pos[final[u]]
        for v in range(u + 1, len(final)):
            if pos[final[v]] < pu and degree[final[v]] % 2:
                exp += 1
    return -1 if exp % 2 else 1


def _block_positions(assign, nblocks):
    blocks = [[] for _ in range(nblocks)]
    for p, b in enumerate(assign):
        blocks[b].append(p)
    return blocks


def _segment_positions(sizes, split, k):
    """Positions of each bin when bins after `split` wrap to the front.

    Bins before the probe read a_{r+1}..a_k, bins after read a_1..a_r.
    """
    r = sum(sizes[split:])
    pos = []
    cur = r
    for s in sizes[:split]:
        pos.append(list(range(cur, cur + s)))
        cur += s
    cur = 0
    for s in sizes[split:]:
        pos.append(list(range(cur, cur + s)))
        cur += s
    return pos, r


def pairing_oracle(expr, w: SymplecticForm, unit: Element,
                   z_inputs: Sequence[Element], a_inputs: Sequence[Element],
                   a0: Element):
    """Value of omega(expr(z_inputs; a_inputs), a0) by direct enumeration."""
    if isinstance(expr, CochainTower):
        return w.pair(expr.eval(z_inputs, a_inputs), a0)
    if isinstance(expr, OBrace):
        return w.pair(_eval_brace(expr, z_inputs, a_inputs), a0)
    if isinstance(expr, ODelta):
        return _eval_delta(expr, w, unit, z_inputs, a_inputs, a0)
    if isinstance(expr, ODiamond):
        return _eval_diamond(expr, w, unit, z_inputs, a_inputs, a0)
    raise ValueError(f"malformed oracle expression: {expr!r}")


def _degrees_table(ops, z_inputs, a_inputs, a0):
    degree = {}
    for idx, t in enumerate(ops):
        degree[("op", idx)] = t.degree
    for p, e in enumerate(z_inputs):
        if e.degree is None:
            raise ValueError("oracle inputs must be homogeneous")
        degree[("z", p)] = e.degree
    for p, e in enumerate(a_inputs):
        if e.degree is None:
            raise ValueError("oracle inputs must be homogeneous")
        degree[("a", p)] = e.degree
    if a0 is not None:
        if a0.degree is None:
            raise ValueError("oracle probe must be homogeneous")
        degree[("a0",)] = a0.degree
    return degree


def _initial_symbols(nops, l, k, with_probe):
    syms = [("op", i) for i in range(nops)]
    syms += [("z", p) for p in range(l)]
    syms += [("a", p) for p in range(k)]
    if with_probe:
        syms.append(("a0",))
    return syms


def _eval_brace(expr: OBrace, z_inputs, a_inputs) -> Element:
    head, args = expr.head, list(expr.args)
    m = len(args)
    l, k = len(z_inputs), len(a_inputs)
    degree = _degrees_table(args, z_inputs, a_inputs, None)
    initial = _initial_symbols(m, l, k, with_probe=False)
    out = None
    for assign in itertools.product(range(m + 1), repeat=l):
        zblocks = _block_positions(assign, m + 1)
        for sizes in compositions_sizes(k, 2 * m + 1):
            bounds = [0]
            for s in sizes:
                bounds.append(bounds[-1] + s)
            final = [("z", p) for p in zblocks[0]]
            head_args = []
            for j in range(m):
                seg = range(bounds[2 * j], bounds[2 * j + 1])
                final.extend(("a", t) for t in seg)
                head_args.extend(a_inputs[t] for t in seg)
                final.append(("op", j))
                final.extend(("z", p) for p in zblocks[j + 1])
                chunk = range(bounds[2 * j + 1], bounds[2 * j + 2])
                final.extend(("a", t) for t in chunk)
                head_args.append(
                    args[j].eval([z_inputs[p] for p in zblocks[j + 1]],
                                 [a_inputs[t] for t in chunk])
                )
            tail = range(bounds[2 * m], bounds[2 * m + 1])
            final.extend(("a", t) for t in tail)
            head_args.extend(a_inputs[t] for t in tail)
            sign = _reorder_sign(initial, final, degree)
            val = head.eval([z_inputs[p] for p in zblocks[0]], head_args)
            term = val.scale(sign) if sign < 0 else val
            out = term if out is None else out + term
    if out is None:
        raise ValueError("empty brace expansion")
    return out


def _eval_delta(expr: ODelta, w, unit, z_inputs, a_inputs, a0):
    head, args, s = expr.head, list(expr.args), expr.anchor
    n = len(args)
    l, k = len(z_inputs), len(a_inputs)
    degree = _degrees_table(args, z_inputs, a_inputs, a0)
    initial = _initial_symbols(n, l, k, with_probe=True)
    acc = w.field.zero
    # bins: run, (chunk p, run) for p <= s, probe, run, (chunk p, run) for p > s
    layout = [("run", None)]
    for p in range(1, s + 1):
        layout += [("chunk", p), ("run", None)]
    split = len(layout)
    layout += [("run", None)]
    for p in range(s + 1, n + 1):
        layout += [("chunk", p), ("run", None)]
    for assign in itertools.product(range(n + 1), repeat=l):
        zblocks = _block_positions(assign, n + 1)
        for sizes in compositions_sizes(k, len(layout)):
            pos, _r = _segment_positions(sizes, split, k)
            final = [("z", p) for p in zblocks[0]]
            head_args = []
            for b, (tok, p) in enumerate(layout):
                if tok == "run":
                    final.extend(("a", t) for t in pos[b])
                    head_args.extend(a_inputs[t] for t in pos[b])
                else:
                    final.append(("op", p - 1))
                    final.extend(("z", q) for q in zblocks[p])
                    final.extend(("a", t) for t in pos[b])
                    head_args.append(
                        args[p - 1].eval([z_inputs[q] for q in zblocks[p]],
                                         [a_inputs[t] for t in pos[b]])
                    )
                if b == split - 1:
                    final.append(("a0",))
                    head_args.append(a0)
            sign = _reorder_sign(initial, final, degree)
            val = head.eval([z_inputs[q] for q in zblocks[0]], head_args)
            acc = acc + sign * w.pair(val, unit)
    return acc


def _eval_diamond(expr: ODiamond, w, unit, z_inputs, a_inputs, a0):
    head = expr.head
    outer, inner = list(expr.outer), list(expr.inner)
    i, j = expr.outer_pos, expr.inner_pos
    m, n = len(outer), len(inner)
    l, k = len(z_inputs), len(a_inputs)
    ops = outer[:i] + inner + outer[i:]  # reading order
    degree = _degrees_table(ops, z_inputs, a_inputs, a0)
    initial = _initial_symbols(m + n, l, k, with_probe=True)
    # op symbol ids in reading order: outer t -> before/after inner block
    sym_outer = {t: ("op", t - 1) for t in range(1, i + 1)}
    sym_inner = {u: ("op", i + u - 1) for u in range(1, n + 1)}
    for t in range(i + 1, m + 1):
        sym_outer[t] = ("op", n + t - 1)
    # z blocks in reading order: P, P_1..P_{i-1}, Q, Q_1..Q_n, P_{i+1}..P_m
    zb_outer = {}
    for t in range(1, m + 1):
        zb_outer[t] = t if t < i else (i if t == i else n + t)
    zb_inner = {u: i + u for u in range(1, n + 1)}
    nblocks = m + n + 1

    layout = []
    for t in range(1, i):
        layout += [("jrun", None), ("ochunk", t)]
    layout += [("jrun", None)]
    inner_layout = [("irun", None)]
    for u in range(1, j + 1):
        inner_layout += [("ichunk", u), ("irun", None)]
    probe_at = len(layout) + len(inner_layout)
    inner_layout += [("irun", None)]
    for u in range(j + 1, n + 1):
        inner_layout += [("ichunk", u), ("irun", None)]
    layout += inner_layout
    for t in range(i + 1, m + 1):
        layout += [("jrun", None), ("ochunk", t)]
    layout += [("jrun", None)]

    acc = w.field.zero
    for assign in itertools.product(range(nblocks), repeat=l):
        zblocks = _block_positions(assign, nblocks)
        for sizes in compositions_sizes(k, len(layout)):
            pos, _r = _segment_positions(sizes, probe_at, k)
            final = [("z", p) for p in zblocks[0]]
            head_args = []
            inner_args = []
            inner_open = False
            probe_seen = False
            for b, (tok, p) in enumerate(layout):
                if tok in ("irun", "ichunk") and not inner_open:
                    final.append(sym_outer[i])
                    final.extend(("z", q) for q in zblocks[zb_outer[i]])
                    inner_open = True
                if tok == "jrun":
                    if inner_open and not probe_seen:
                        raise AssertionError("layout walk out of order")
                    if inner_open and inner_args is not None:
                        head_args.append(
                            outer[i - 1].eval(
                                [z_inputs[q] for q in zblocks[zb_outer[i]]],
                                inner_args)
                        )
                        inner_args = None
                    final.extend(("a", t) for t in pos[b])
                    head_args.extend(a_inputs[t] for t in pos[b])
                elif tok == "ochunk":
                    final.append(sym_outer[p])
                    final.extend(("z", q) for q in zblocks[zb_outer[p]])
                    final.extend(("a", t) for t in pos[b])
                    head_args.append(
                        outer[p - 1].eval([z_inputs[q] for q in zblocks[zb_outer[p]]],
                                          [a_inputs[t] for t in pos[b]])
                    )
                elif tok == "irun":
                    final.extend(("a", t) for t in pos[b])
                    inner_args.extend(a_inputs[t] for t in pos[b])
                    if b == probe_at - 1:
                        final.append(("a0",))
                        inner_args.append(a0)
                        probe_seen = True
                else:  # ichunk
                    final.append(sym_inner[p])
                    final.extend(("z", q) for q in zblocks[zb_inner[p]])
                    final.extend(("a", t) for t in pos[b])
                    inner_args.append(
                        inner[p - 1].eval([z_inputs[q] for q in zblocks[zb_inner[p]]],
                                          [a_inputs[t] for t in pos[b]])
                    )
            if inner_args is not None:
                head_args.append(
                    outer[i - 1].eval([z_inputs[q] for q in zblocks[zb_outer[i]]],
                                      inner_args)
                )
            sign = _reorder_sign(initial, final, degree)
            val = head.eval([z_inputs[q] for q in zblocks[0]], head_args)
            acc = acc + sign * w.pair(val, unit)
    return acc
