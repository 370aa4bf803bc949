"""Seeded random generators for spaces, pairings, and homogeneous towers.

Used by the randomized identity suites (CLI) and the test suite.  Every
generator takes an explicit random.Random so runs are reproducible from a
printed seed.
"""

from __future__ import annotations

import random
from typing import Sequence

from .core import Element, GradedSpace, QQ, basis_element
from .cochains import CeTower, CochainTower
from .cyclic import SymplecticForm


def random_graded_space(rng: random.Random, dim: int, lo: int = -2, hi: int = 2,
                        prefix: str = "v", name: str = "V") -> GradedSpace:
    labels = tuple(f"{prefix}{i}" for i in range(dim))
    degrees = tuple(rng.randint(lo, hi) for _ in range(dim))
    return GradedSpace(labels, degrees, name)


def random_symplectic_space(rng: random.Random, dim: int,
                            field=QQ) -> tuple:
    """(space, form, unit element): a unit of degree -1 paired against a
    degree-(|w|-adjusted) partner; even pairing degree so the unit-pairing
    identities hold as printed.

    dim 2: unit/partner pair with |w| = 0.  dim 3: |w| = -2, the unit paired
    with a degree-3 partner plus one self-paired degree-1 generator.
    """
    if dim == 2:
        wdeg = 0
        labels = ("u", "a1")
        degrees = (-1, 1)
        pairs = [(0, 1)]
        selfs = []
    elif dim == 3:
        wdeg = -2
        labels = ("u", "a1", "a2")
        degrees = (-1, 3, 1)
        pairs = [(0, 1)]
        selfs = [2]
    elif dim % 2 == 0:
        wdeg = 0
        labels = ["u", "a1"]
        degrees = [-1, 1]
        pairs = [(0, 1)]
        selfs = []
        for t in range((dim - 2) // 2):
            d = rng.randint(-2, 2)
            labels += [f"b{t}", f"c{t}"]
            degrees += [d, -d]
            pairs.append((2 + 2 * t, 3 + 2 * t))
        labels, degrees = tuple(labels), tuple(degrees)
    else:
        raise ValueError("only dims 2, 3 and even dims are supported")
    space = GradedSpace(tuple(labels), tuple(degrees), "A")
    matrix = [[field.zero] * dim for _ in range(dim)]
    for i, j in pairs:
        c = field(rng.choice([1, 1, 2, -1]))
        matrix[i][j] = c
        sign = -1 if (degrees[i] * degrees[j] + 1) % 2 else 1
        matrix[j][i] = sign * c
    for i in selfs:
        matrix[i][i] = field(rng.choice([1, -1, 2]))
    form = SymplecticForm(space, wdeg, matrix, field)
    unit = basis_element(space, 0)
    return space, form, unit


def _component_table(rng, space_z, space_a, degree, l, k, density, coeffs):
    table = {}
    for zw in space_z.wedge_words(l):
        zdeg = space_z.degree_of_word(zw)
        for aw in space_a.tensor_words(k):
            want = degree + zdeg + space_a.degree_of_word(aw)
            vec = [0] * space_a.dim
            hit = False
            for out in range(space_a.dim):
                if space_a.degrees[out] == want and rng.random() < density:
                    c = rng.choice(coeffs)
                    if c:
                        vec[out] = c
                        hit = True
            if hit:
                table[(zw, aw)] = tuple(vec)
    return table


def random_tower(rng: random.Random, space_z: GradedSpace, space_a: GradedSpace,
                 degree: int | None = None, max_arity: int = 3,
                 bidegrees: Sequence | None = None, density: float = 0.7,
                 coeffs=(-2, -1, 1, 2), window: int | None = None,
                 avoid_index: int | None = None) -> CochainTower:
    """Random homogeneous tower; avoid_index keeps an A-direction out of the
    input words (normalized towers)."""
    if degree is None:
        degree = rng.randint(-2, 2)
    if bidegrees is None:
        bidegrees = [
            (l, k)
            for n in range(1, max_arity + 1)
            for l in range(n + 1)
            for k in (n - l,)
        ]
        rng.shuffle(bidegrees)
        bidegrees = bidegrees[: rng.randint(1, min(3, len(bidegrees)))]
    comps = {}
    for (l, k) in bidegrees:
        table = _component_table(rng, space_z, space_a, degree, l, k,
                                 density, coeffs)
        if avoid_index is not None:
            table = {key: vec for key, vec in table.items()
                     if avoid_index not in key[1]}
        if table:
            comps[(l, k)] = table
    return CochainTower(space_z, space_a, degree, comps, window)


def random_nonzero_tower(rng, space_z, space_a, tries: int = 12,
                         **kw) -> CochainTower:
    """Retry random_tower until it has entries (degree resampled each try)."""
    last = None
    for _ in range(tries):
        last = random_tower(rng, space_z, space_a, **kw)
        if not last.is_zero():
            return last
    return last


def random_ce_tower(rng: random.Random, space: GradedSpace,
                    degree: int | None = None, max_arity: int = 2,
                    density: float = 0.7, coeffs=(-2, -1, 1, 2)) -> CeTower:
    if degree is None:
        degree = rng.randint(-1, 2)
    comps = {}
    for l in range(1, max_arity + 1):
        table = {}
        for zw in space.wedge_words(l):
            want = degree + space.degree_of_word(zw)
            vec = [0] * space.dim
            hit = False
            for out in range(space.dim):
                if space.degrees[out] == want and rng.random() < density:
                    c = rng.choice(coeffs)
                    if c:
                        vec[out] = c
                        hit = True
            if hit:
                table[zw] = tuple(vec)
        if table:
            comps[l] = table
    return CeTower(space, degree, comps)
