"""Finitely supported towers of multilinear components and their evaluation.

A CochainTower models an element of the open-closed Hochschild-type space
prod_{(l,k) != (0,0)} Hom(Z^{wedge l} (x) A^{(x) k}, A): finitely many stored
bidegree components, each a table over canonical basis words.  A CeTower is
the one-space variant with components Z^{wedge l} -> Z, l >= 1.

Validity windows: a tower either is finitely supported (window None, exact
everywhere, unstored components are zero) or carries an integer window N and
its components of total arity l+k <= N are exact while anything above is
unknown (not zero).
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Sequence

from .core import Element, GradedSpace, element_from_coeffs, wedge_canonicalize


class WindowError(ValueError):
    """Read or operation outside a tower's validity window."""


def _canonical_entries(space_z: GradedSpace, space_a: GradedSpace | None,
                       l: int, k: int, table: Mapping) -> dict:
    """Validate and copy one component table, dropping zero vectors."""
    out = {}
    out_dim = (space_a or space_z).dim
    for key, vec in table.items():
        zw, aw = key
        zw, aw = tuple(zw), tuple(aw)
        if len(zw) != l or len(aw) != k:
            raise ValueError(f"entry key {key} does not match bidegree ({l},{k})")
        if list(zw) != sorted(zw):
            raise ValueError(f"wedge word not sorted: {zw}")
        degs = [space_z.degrees[i] for i in zw]
        for s in range(l - 1):
            if zw[s] == zw[s + 1] and degs[s] % 2:
                raise ValueError(f"wedge word repeats odd-degree letter: {zw}")
        vec = tuple(vec)
        if len(vec) != out_dim:
            raise ValueError("output vector has wrong dimension")
        if any(vec):
            out[(zw, aw)] = vec
    return out


class CochainTower:
    """Homogeneous tower of components Z^{wedge l} (x) A^{(x) k} -> A."""

    __slots__ = ("space_z", "space_a", "degree", "components", "window")

    def __init__(self, space_z: GradedSpace, space_a: GradedSpace, degree: int,
                 components: Mapping | None = None, window: int | None = None):
        self.space_z = space_z
        self.space_a = space_a
        self.degree = degree
        if window is not None and window < 0:
            raise WindowError("validity window must be >= 0")
        self.window = window
        comps = {}
        for (l, k), table in (components or {}).items():
            if l < 0 or k < 0 or (l, k) == (0, 0):
                raise ValueError(f"illegal bidegree ({l},{k})")
            entries = _canonical_entries(space_z, space_a, l, k, table)
            if entries:
                comps[(l, k)] = entries
        self.components = comps

    # -- queries ------------------------------------------------------------

    def is_finite(self) -> bool:
        return self.window is None

    def is_zero(self) -> bool:
        return not self.components

    def bidegrees(self):
        return sorted(self.components.keys())

    def max_arity(self) -> int:
        return max((l + k for l, k in self.components), default=0)

    def assert_readable(self, l: int, k: int):
        if self.window is not None and l + k > self.window:
            raise WindowError(
                f"component ({l},{k}) is above the validity window {self.window}"
            )

    def entry(self, l: int, k: int, zw: Sequence[int], aw: Sequence[int]) -> tuple:
        """Table value at a canonical key; zero vector if absent (within window)."""
        self.assert_readable(l, k)
        table = self.components.get((l, k))
        if table is None:
            return (0,) * self.space_a.dim
        return table.get((tuple(zw), tuple(aw)), (0,) * self.space_a.dim)

    def value(self, zw: Sequence[int], aw: Sequence[int]) -> tuple:
        """Value on basis words, canonicalizing the wedge word (with sign)."""
        l, k = len(zw), len(aw)
        if (l, k) == (0, 0):
            return (0,) * self.space_a.dim
        degs = [self.space_z.degrees[i] for i in zw]
        sorted_zw, sign, dead = wedge_canonicalize(zw, degs)
        if dead:
            return (0,) * self.space_a.dim
        vec = self.entry(l, k, sorted_zw, tuple(aw))
        if sign == 1:
            return vec
        return tuple(-c for c in vec)

    def eval(self, z_inputs: Sequence[Element], a_inputs: Sequence[Element]) -> Element:
        """Multilinear, graded-symmetric-in-Z evaluation on homogeneous elements."""
        l, k = len(z_inputs), len(a_inputs)
        self.assert_readable(l, k)
        for e in z_inputs:
            if e.degree is None:
                raise ValueError("z-inputs must be homogeneous")
        for e in a_inputs:
            if e.degree is None:
                raise ValueError("a-inputs must be homogeneous")
        dim = self.space_a.dim
        acc = [0] * dim
        z_choices = [
            [(i, c) for i, c in enumerate(e.coeffs) if c] for e in z_inputs
        ]
        a_choices = [
            [(i, c) for i, c in enumerate(e.coeffs) if c] for e in a_inputs
        ]
        for zpick in itertools.product(*z_choices):
            zw = tuple(i for i, _ in zpick)
            zc = 1
            for _, c in zpick:
                zc = zc * c
            for apick in itertools.product(*a_choices):
                aw = tuple(i for i, _ in apick)
                coef = zc
                for _, c in apick:
                    coef = coef * c
                vec = self.value(zw, aw)
                if any(vec):
                    for t in range(dim):
                        if vec[t]:
                            acc[t] = acc[t] + coef * vec[t]
        deg = self.degree + sum(e.degree for e in z_inputs) + sum(e.degree for e in a_inputs)
        degs = {self.space_a.degrees[i] for i, c in enumerate(acc) if c}
        if degs and degs != {deg}:
            return element_from_coeffs(self.space_a, acc)
        return Element(self.space_a, tuple(acc), deg)

    # -- structure ----------------------------------------------------------

    def scale(self, c) -> "CochainTower":
        comps = {
            lk: {key: tuple(c * x for x in vec) for key, vec in table.items()}
            for lk, table in self.components.items()
        }
        return CochainTower(self.space_z, self.space_a, self.degree, comps, self.window)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CochainTower):
            return NotImplemented
        return (
            self.space_z == other.space_z
            and self.space_a == other.space_a
            and self.components == other.components
            and (self.degree == other.degree or (self.is_zero() and other.is_zero()))
        )

    def __repr__(self) -> str:
        win = "finite" if self.window is None else f"N={self.window}"
        return (
            f"CochainTower(deg={self.degree}, comps={sorted(self.components)}, {win})"
        )


class CeTower:
    """Homogeneous tower of graded-symmetric components Z^{wedge l} -> Z, l >= 1."""

    __slots__ = ("space", "degree", "components", "window")

    def __init__(self, space: GradedSpace, degree: int,
                 components: Mapping | None = None, window: int | None = None):
        self.space = space
        self.degree = degree
        self.window = window
        comps = {}
        for l, table in (components or {}).items():
            if l < 1:
                raise ValueError("CeTower components need arity >= 1")
            entries = _canonical_entries(space, None, l, 0,
                                         {(zw, ()): v for zw, v in table.items()})
            entries = {zw: v for (zw, _aw), v in entries.items()}
            if entries:
                comps[l] = entries
        self.components = comps

    def is_finite(self) -> bool:
        return self.window is None

    def is_zero(self) -> bool:
        return not self.components

    def arities(self):
        return sorted(self.components.keys())

    def max_arity(self) -> int:
        return max(self.components.keys(), default=0)

    def value(self, zw: Sequence[int]) -> tuple:
        l = len(zw)
        if self.window is not None and l > self.window:
            raise WindowError(f"arity {l} above validity window {self.window}")
        degs = [self.space.degrees[i] for i in zw]
        sorted_zw, sign, dead = wedge_canonicalize(zw, degs)
        if dead:
            return (0,) * self.space.dim
        table = self.components.get(l)
        vec = (table or {}).get(sorted_zw, (0,) * self.space.dim)
        if sign == 1:
            return vec
        return tuple(-c for c in vec)

    def eval(self, z_inputs: Sequence[Element]) -> Element:
        choices = [[(i, c) for i, c in enumerate(e.coeffs) if c] for e in z_inputs]
        acc = [0] * self.space.dim
        for pick in itertools.product(*choices):
            zw = tuple(i for i, _ in pick)
            coef = 1
            for _, c in pick:
                coef = coef * c
            vec = self.value(zw)
            for t in range(self.space.dim):
                if vec[t]:
                    acc[t] = acc[t] + coef * vec[t]
        deg = self.degree + sum(e.degree for e in z_inputs)
        degs = {self.space.degrees[i] for i, c in enumerate(acc) if c}
        if degs and degs != {deg}:
            return element_from_coeffs(self.space, acc)
        return Element(self.space, tuple(acc), deg)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CeTower):
            return NotImplemented
        return (
            self.space == other.space
            and self.components == other.components
            and (self.degree == other.degree or (self.is_zero() and other.is_zero()))
        )

    def __repr__(self) -> str:
        win = "finite" if self.window is None else f"N={self.window}"
        return f"CeTower(deg={self.degree}, arities={sorted(self.components)}, {win})"


# ---------------------------------------------------------------------------
# linear structure


def zero_tower(space_z: GradedSpace, space_a: GradedSpace, degree: int,
               window: int | None = None) -> CochainTower:
    return CochainTower(space_z, space_a, degree, {}, window)


def linear_combine(coeffs: Sequence, towers: Sequence[CochainTower]) -> CochainTower:
    """Componentwise linear combination; window = min over capped inputs."""
    if not towers:
        raise ValueError("need at least one tower")
    degree = towers[0].degree
    for t in towers:
        if t.degree != degree:
            raise ValueError("towers must share the same homogeneous degree")
        if t.space_z != towers[0].space_z or t.space_a != towers[0].space_a:
            raise ValueError("towers must share spaces")
    windows = [t.window for t in towers if t.window is not None]
    window = min(windows) if windows else None
    dim = towers[0].space_a.dim
    acc: dict = {}
    for c, t in zip(coeffs, towers):
        if not c:
            continue
        for lk, table in t.components.items():
            if window is not None and lk[0] + lk[1] > window:
                continue
            dest = acc.setdefault(lk, {})
            for key, vec in table.items():
                cur = dest.get(key, (0,) * dim)
                dest[key] = tuple(a + c * b for a, b in zip(cur, vec))
    return CochainTower(towers[0].space_z, towers[0].space_a, degree, acc, window)


def tower_sub(a: CochainTower, b: CochainTower) -> CochainTower:
    return linear_combine([1, -1], [a, b])


def degree_audit(tower: CochainTower) -> bool:
    """True iff every stored entry is homogeneous: |out| = d + sum|z| + sum|a|."""
    for (l, k), table in tower.components.items():
        for (zw, aw), vec in table.items():
            want = (
                tower.degree
                + tower.space_z.degree_of_word(zw)
                + tower.space_a.degree_of_word(aw)
            )
            for i, c in enumerate(vec):
                if c and tower.space_a.degrees[i] != want:
                    return False
    return True


def ce_degree_audit(tower: CeTower) -> bool:
    for l, table in tower.components.items():
        for zw, vec in table.items():
            want = tower.degree + tower.space.degree_of_word(zw)
            for i, c in enumerate(vec):
                if c and tower.space.degrees[i] != want:
                    return False
    return True


def is_normalized(tower: CochainTower, unit: Element) -> bool:
    """True iff the tower kills every basis filling with the unit in an A-slot."""
    unit_idx = _unit_index(tower.space_a, unit)
    for (l, k), table in tower.components.items():
        for (zw, aw), vec in table.items():
            if unit_idx in aw and any(vec):
                return False
    return True


def _unit_index(space_a: GradedSpace, unit: Element) -> int:
    """The unit must be exactly one basis direction with coefficient 1."""
    nz = [(i, c) for i, c in enumerate(unit.coeffs) if c]
    if len(nz) != 1 or nz[0][1] != 1:
        raise ValueError("unit must be a single basis direction with coefficient 1")
    return nz[0][0]
