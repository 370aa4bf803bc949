"""Exact scalars, graded bases, Koszul signs, and partition/composition enumerators.

Degrees are the *shifted* ones throughout: every structure map has degree 1 and
the distinguished unit has degree -1.  All sign exponents are computed from
these stored integer degrees and reduced mod 2 at the very end.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence


class FieldError(ValueError):
    """Invalid field descriptor or scalar operation."""


# ---------------------------------------------------------------------------
# fields


class RationalField:
    """Exact rational scalars (characteristic 0)."""

    char = 0
    name = "rational"

    def __call__(self, num, den=1) -> Fraction:
        return Fraction(num, den)

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def parse(self, text: str) -> Fraction:
        text = text.strip()
        if "/" in text:
            num_s, den_s = text.split("/", 1)
            num, den = int(num_s), int(den_s)
            if den <= 0:
                raise FieldError(f"denominator must be positive: {text!r}")
            from math import gcd

            if gcd(abs(num), den) != 1:
                raise FieldError(f"scalar not in reduced form: {text!r}")
            return Fraction(num, den)
        return Fraction(int(text))

    def format(self, x: Fraction) -> str:
        x = Fraction(x)
        return f"{x.numerator}/{x.denominator}"

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("rational")

    def __repr__(self) -> str:
        return "RationalField()"


class FpElement:
    """Element of a prime field, normalized to 0 <= value < p."""

    __slots__ = ("val", "p")

    def __init__(self, val: int, p: int):
        self.val = val % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, FpElement):
            if other.p != self.p:
                raise FieldError("mixed prime fields")
            return other.val
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FpElement(self.val + v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FpElement(self.val - v, self.p)

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FpElement(v - self.val, self.p)

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FpElement(self.val * v, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        if v % self.p == 0:
            raise ZeroDivisionError("division by zero in prime field")
        return FpElement(self.val * pow(v, self.p - 2, self.p), self.p)

    def __rtruediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        if self.val == 0:
            raise ZeroDivisionError("division by zero in prime field")
        return FpElement(v * pow(self.val, self.p - 2, self.p), self.p)

    def __neg__(self):
        return FpElement(-self.val, self.p)

    def __bool__(self) -> bool:
        return self.val != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, FpElement):
            return self.p == other.p and self.val == other.val
        if isinstance(other, int):
            return self.val == other % self.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.val, self.p))

    def __repr__(self) -> str:
        return f"{self.val}"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class PrimeField:
    """Prime field F_p with p an odd prime (char 2 would kill the signs)."""

    def __init__(self, p: int):
        if not _is_prime(p) or p == 2:
            raise FieldError(f"characteristic must be an odd prime, got {p}")
        self.p = p
        self.char = p
        self.name = f"prime {p}"

    def __call__(self, num, den=1) -> FpElement:
        x = FpElement(num, self.p)
        if den != 1:
            x = x / den
        return x

    @property
    def zero(self) -> FpElement:
        return FpElement(0, self.p)

    @property
    def one(self) -> FpElement:
        return FpElement(1, self.p)

    def parse(self, text: str) -> FpElement:
        val = int(text.strip())
        if not 0 <= val < self.p:
            raise FieldError(f"residue out of range mod {self.p}: {text!r}")
        return FpElement(val, self.p)

    def format(self, x: FpElement) -> str:
        return str(x.val)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("prime", self.p))

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"


QQ = RationalField()


def field_from_name(name: str):
    """Parse a field descriptor: "rational" or "prime <p>"."""
    name = name.strip()
    if name == "rational":
        return QQ
    parts = name.split()
    if len(parts) == 2 and parts[0] == "prime":
        return PrimeField(int(parts[1]))
    raise FieldError(f"unknown field descriptor {name!r}")


# ---------------------------------------------------------------------------
# graded spaces and elements


@dataclass(frozen=True)
class GradedSpace:
    """Finite ordered basis with integer (shifted) degrees."""

    labels: tuple
    degrees: tuple
    name: str = "V"

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if len(self.labels) != len(self.degrees):
            raise ValueError("labels/degrees length mismatch")
        if len(self.labels) == 0:
            raise ValueError("dimension must be >= 1")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be unique")

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown basis label {label!r} in space {self.name}") from None

    def degree_of_word(self, word: Sequence[int]) -> int:
        return sum(self.degrees[i] for i in word)

    def wedge_words(self, length: int) -> Iterator[tuple]:
        """Canonical wedge words: non-decreasing index tuples, no repeated odd index."""
        if length == 0:
            yield ()
            return
        for word in itertools.combinations_with_replacement(range(self.dim), length):
            if any(
                word[i] == word[i + 1] and self.degrees[word[i]] % 2
                for i in range(length - 1)
            ):
                continue
            yield word

    def tensor_words(self, length: int) -> Iterator[tuple]:
        return itertools.product(range(self.dim), repeat=length)


@dataclass(frozen=True)
class Element:
    """Vector in a graded space; degree is set when the vector is homogeneous."""

    space: GradedSpace
    coeffs: tuple
    degree: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if len(self.coeffs) != self.space.dim:
            raise ValueError("coefficient vector has wrong length")
        if self.degree is not None:
            for i, c in enumerate(self.coeffs):
                if c and self.space.degrees[i] != self.degree:
                    raise ValueError(
                        f"element not homogeneous of degree {self.degree}: "
                        f"basis {self.space.labels[i]} has degree {self.space.degrees[i]}"
                    )

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def __add__(self, other: "Element") -> "Element":
        if other.space is not self.space and other.space != self.space:
            raise ValueError("elements live in different spaces")
        deg = self.degree if self.degree == other.degree else None
        return Element(self.space, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), deg)

    def __sub__(self, other: "Element") -> "Element":
        return self + other.scale(-1)

    def scale(self, c) -> "Element":
        return Element(self.space, tuple(c * x for x in self.coeffs), self.degree)


def basis_element(space: GradedSpace, i: int) -> Element:
    coeffs = [0] * space.dim
    coeffs[i] = 1
    return Element(space, tuple(coeffs), space.degrees[i])


def zero_element(space: GradedSpace, degree: int | None = None) -> Element:
    return Element(space, (0,) * space.dim, degree)


def element_from_coeffs(space: GradedSpace, coeffs: Sequence) -> Element:
    """Wrap a coefficient vector, inferring the degree when homogeneous."""
    degs = {space.degrees[i] for i, c in enumerate(coeffs) if c}
    deg = degs.pop() if len(degs) == 1 else None
    return Element(space, tuple(coeffs), deg)


# ---------------------------------------------------------------------------
# permutations and Koszul signs


@dataclass(frozen=True)
class Permutation:
    """Bijection of {0..n-1} stored as the image tuple: word[i] = old[images[i]]."""

    images: tuple

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a bijection: {self.images}")

    @property
    def size(self) -> int:
        return len(self.images)

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self*other)[i] = self[other[i]]."""
        return Permutation(tuple(self.images[j] for j in other.images))

    def apply_to(self, word: Sequence) -> tuple:
        return tuple(word[j] for j in self.images)


def koszul_sign(sigma: Permutation, degrees: Sequence[int]) -> int:
    """Sign with f(z_{s(1)},..,z_{s(n)}) = sign * f(z_1,..,z_n), degrees of the z_i.

    An inversion (i < j with s(i) > s(j)) contributes |z_{s(j)}| * |z_{s(i)}|.
    """
    imgs = sigma.images
    n = len(imgs)
    if len(degrees) != n:
        raise ValueError("degree list does not match permutation size")
    exp = 0
    for i in range(n):
        di = degrees[imgs[i]]
        for j in range(i + 1, n):
            if imgs[i] > imgs[j]:
                exp += di * degrees[imgs[j]]
    return -1 if exp % 2 else 1


def sort_word_sign(indices: Sequence[int], degrees: Sequence[int]) -> int:
    """Koszul exponent (mod 2) of stably sorting a word ascending.

    degrees[t] is the degree of the t-th letter of the word.
    """
    exp = 0
    n = len(indices)
    for s in range(n):
        for t in range(s + 1, n):
            if indices[s] > indices[t]:
                exp += degrees[s] * degrees[t]
    return exp % 2


def wedge_canonicalize(
    indices: Sequence[int], degrees: Sequence[int]
) -> tuple[tuple, int, bool]:
    """Stable-sort a wedge word; returns (sorted word, sign, is_zero).

    is_zero is set when the word repeats an odd-degree letter (w ^ w = 0).
    """
    if len(indices) != len(degrees):
        raise ValueError("indices/degrees length mismatch")
    order = sorted(range(len(indices)), key=lambda t: indices[t])
    sorted_word = tuple(indices[t] for t in order)
    for s in range(len(sorted_word) - 1):
        if sorted_word[s] == sorted_word[s + 1] and degrees[order[s]] % 2:
            return sorted_word, 1, True
    sign = -1 if sort_word_sign(indices, degrees) else 1
    return sorted_word, sign, False


# ---------------------------------------------------------------------------
# ordered set partitions


@dataclass(frozen=True)
class OrderedSetPartition:
    """Tuple of disjoint, internally sorted index blocks covering range(n)."""

    blocks: tuple
    contiguous: bool = False

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))
        seen = []
        for b in self.blocks:
            if list(b) != sorted(b):
                raise ValueError("blocks must be internally sorted")
            seen.extend(b)
        n = len(seen)
        if sorted(seen) != list(range(n)):
            raise ValueError("blocks must partition range(n)")
        if self.contiguous:
            flat = [x for b in self.blocks for x in b]
            if flat != sorted(flat):
                raise ValueError("contiguous partition has out-of-order blocks")

    @property
    def ground_size(self) -> int:
        return sum(len(b) for b in self.blocks)


def compositions_sizes(k: int, m: int) -> Iterator[tuple]:
    """Size tuples of contiguous partitions of [k] into m >= 1 possibly-empty
    blocks, in lexicographic order; C(k+m-1, m-1) of them."""
    if m == 1:
        yield (k,)
        return
    for first in range(k + 1):
        for rest in compositions_sizes(k - first, m - 1):
            yield (first,) + rest


def compositions(k: int, m: int) -> Iterator[OrderedSetPartition]:
    """Contiguous ordered partitions of range(k) into m possibly-empty blocks."""
    if k < 0 or m < 1:
        raise ValueError("need k >= 0 and m >= 1")
    for sizes in compositions_sizes(k, m):
        blocks = []
        start = 0
        for s in sizes:
            blocks.append(tuple(range(start, start + s)))
            start += s
        yield OrderedSetPartition(tuple(blocks), contiguous=True)


def subset_assignments(l: int, r: int) -> Iterator[tuple]:
    """All r^l block-label assignments for range(l), lexicographic."""
    return itertools.product(range(r), repeat=l)


def assignment_blocks(assignment: Sequence[int], r: int) -> tuple:
    blocks = [[] for _ in range(r)]
    for pos, b in enumerate(assignment):
        blocks[b].append(pos)
    return tuple(tuple(b) for b in blocks)


def subset_partitions(l: int, r: int) -> Iterator[OrderedSetPartition]:
    """All r^l ordered partitions of range(l) into r labeled subsets."""
    if l < 0 or r < 1:
        raise ValueError("need l >= 0 and r >= 1")
    for assignment in subset_assignments(l, r):
        yield OrderedSetPartition(assignment_blocks(assignment, r))


def subset_split_sign(partition: OrderedSetPartition | Sequence[Sequence[int]],
                      degrees: Sequence[int]) -> int:
    """Exponent ε with z_{[l]} = (-1)^ε z_{B_1} ^ z_{B_2} ^ ... for the given blocks.

    A pair of positions lands inverted exactly when the earlier position sits in
    a later block; each inverted pair contributes the product of its degrees.
    """
    blocks = partition.blocks if isinstance(partition, OrderedSetPartition) else partition
    block_of = {}
    for bi, b in enumerate(blocks):
        for pos in b:
            block_of[pos] = bi
    n = len(block_of)
    exp = 0
    for s in range(n):
        ds = degrees[s]
        if ds % 2 == 0:
            continue
        bs = block_of[s]
        for t in range(s + 1, n):
            if block_of[t] < bs and degrees[t] % 2:
                exp += 1
    return exp % 2


def assignment_split_sign(assignment: Sequence[int], degrees: Sequence[int]) -> int:
    """Same as subset_split_sign but straight from a block-label assignment."""
    n = len(assignment)
    exp = 0
    for s in range(n):
        if degrees[s] % 2 == 0:
            continue
        bs = assignment[s]
        for t in range(s + 1, n):
            if assignment[t] < bs and degrees[t] % 2:
                exp += 1
    return exp % 2
