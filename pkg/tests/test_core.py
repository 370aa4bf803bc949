import itertools
import random
from fractions import Fraction

import pytest

from ochabv.core import (
    FieldError,
    GradedSpace,
    OrderedSetPartition,
    Permutation,
    PrimeField,
    QQ,
    assignment_split_sign,
    compositions,
    compositions_sizes,
    field_from_name,
    koszul_sign,
    subset_partitions,
    subset_split_sign,
    wedge_canonicalize,
)


def brute_sort_sign(word, degrees):
    """Koszul sign of bubble-sorting a word, as an independent oracle."""
    word = list(word)
    degrees = list(degrees)
    exp = 0
    for i in range(len(word)):
        for j in range(len(word) - 1 - i):
            if word[j] > word[j + 1]:
                exp += degrees[j] * degrees[j + 1]
                word[j], word[j + 1] = word[j + 1], word[j]
                degrees[j], degrees[j + 1] = degrees[j + 1], degrees[j]
    return -1 if exp % 2 else 1


def test_koszul_identity():
    assert koszul_sign(Permutation((0, 1, 2)), [1, 1, 1]) == 1
    assert koszul_sign(Permutation(()), []) == 1


def test_koszul_swap():
    assert koszul_sign(Permutation((1, 0)), [1, 1]) == -1
    assert koszul_sign(Permutation((1, 0)), [1, 2]) == 1


def test_koszul_three_cycle():
    # sigma = (2,3,1) one-based; inversion pairs contribute twice on odd degrees
    assert koszul_sign(Permutation((1, 2, 0)), [1, 1, 1]) == 1


def test_koszul_size_mismatch():
    with pytest.raises(ValueError):
        koszul_sign(Permutation((1, 0)), [1])


def test_koszul_matches_bubble_sort_oracle():
    rng = random.Random(0)
    for _ in range(200):
        n = rng.randint(1, 6)
        images = list(range(n))
        rng.shuffle(images)
        degrees = [rng.randint(-2, 3) for _ in range(n)]
        # permuted word letters carry degrees[images[i]]
        got = koszul_sign(Permutation(tuple(images)), degrees)
        want = brute_sort_sign(images, [degrees[i] for i in images])
        assert got == want


def test_koszul_multiplicative():
    rng = random.Random(1)
    for _ in range(200):
        n = rng.randint(1, 6)
        a, b = list(range(n)), list(range(n))
        rng.shuffle(a)
        rng.shuffle(b)
        sigma, tau = Permutation(tuple(a)), Permutation(tuple(b))
        degrees = [rng.randint(-2, 3) for _ in range(n)]
        composed = sigma.compose(tau)
        perm_deg = [degrees[i] for i in sigma.images]
        assert koszul_sign(composed, degrees) == (
            koszul_sign(tau, perm_deg) * koszul_sign(sigma, degrees)
        )


def test_wedge_canonicalize_even_swap():
    assert wedge_canonicalize((3, 1), (2, 2)) == ((1, 3), 1, False)


def test_wedge_canonicalize_odd_swap():
    assert wedge_canonicalize((3, 1), (1, 1)) == ((1, 3), -1, False)


def test_wedge_canonicalize_odd_repeat_is_zero():
    word, _sign, dead = wedge_canonicalize((2, 2), (1, 1))
    assert word == (2, 2) and dead


def test_wedge_canonicalize_idempotent_and_composes():
    rng = random.Random(2)
    for _ in range(200):
        n = rng.randint(1, 5)
        word = [rng.randint(0, 3) for _ in range(n)]
        degrees = [rng.randint(-2, 3) for _ in range(n)]
        sorted_word, sign, dead = wedge_canonicalize(word, degrees)
        # re-canonicalizing a sorted word is the identity (degrees travel along)
        order = sorted(range(n), key=lambda t: word[t])
        moved_degrees = [degrees[t] for t in order]
        resorted, sign2, _dead2 = wedge_canonicalize(sorted_word, moved_degrees)
        assert resorted == sorted_word and sign2 == 1
        if not dead:
            assert sign == brute_sort_sign(word, degrees)


def test_compositions_examples():
    got = [p.blocks for p in compositions(2, 2)]
    assert got == [((), (0, 1)), ((0,), (1,)), ((0, 1), ())]
    assert len(list(compositions(0, 3))) == 1
    assert len(list(compositions(3, 2))) == 4


def test_compositions_count_and_contiguity():
    from math import comb

    for k in range(0, 5):
        for m in range(1, 4):
            parts = list(compositions(k, m))
            assert len(parts) == comb(k + m - 1, m - 1)
            for p in parts:
                assert p.contiguous
                flat = [x for b in p.blocks for x in b]
                assert flat == list(range(k))


def test_subset_partitions_counts():
    assert len(list(subset_partitions(2, 2))) == 4
    assert len(list(subset_partitions(3, 3))) == 27
    for p in subset_partitions(3, 2):
        flat = sorted(x for b in p.blocks for x in b)
        assert flat == [0, 1, 2]


def test_subset_split_sign_example():
    # splitting z1^z2 as z2 ^ z1 with both letters odd costs one transposition
    part = OrderedSetPartition(((1,), (0,)))
    assert subset_split_sign(part, (1, 1)) == 1
    assert assignment_split_sign((1, 0), (1, 1)) == 1
    assert subset_split_sign(OrderedSetPartition(((0,), (1,))), (1, 1)) == 0


def test_ordered_set_partition_validation():
    with pytest.raises(ValueError):
        OrderedSetPartition(((0, 2), (1,)), contiguous=True)
    with pytest.raises(ValueError):
        OrderedSetPartition(((1, 0),))


def test_graded_space_validation():
    with pytest.raises(ValueError):
        GradedSpace((), ())
    with pytest.raises(ValueError):
        GradedSpace(("a", "a"), (0, 1))
    space = GradedSpace(("a", "b"), (-1, 2))
    assert space.dim == 2 and space.index("b") == 1
    with pytest.raises(KeyError):
        space.index("c")


def test_wedge_words_skip_odd_repeats():
    space = GradedSpace(("a", "b"), (1, 2))
    words = list(space.wedge_words(2))
    assert (0, 0) not in words and (1, 1) in words and (0, 1) in words


def test_rational_field():
    assert QQ(1, 3) + QQ(1, 6) == Fraction(1, 2)
    with pytest.raises(ZeroDivisionError):
        QQ(1) / QQ(0)
    assert QQ.parse("-3/2") == Fraction(-3, 2)
    assert QQ.parse("4") == 4
    with pytest.raises(FieldError):
        QQ.parse("2/4")
    with pytest.raises(FieldError):
        QQ.parse("1/-2")
    assert QQ.format(Fraction(-3, 2)) == "-3/2"
    assert QQ.format(Fraction(5)) == "5/1"


def test_prime_field():
    f7 = PrimeField(7)
    x = f7(3)
    assert x + 5 == f7(1)
    assert x * x == f7(2)
    assert (f7(1) / x) * x == f7(1)
    with pytest.raises(ZeroDivisionError):
        f7(1) / f7(0)
    with pytest.raises(FieldError):
        PrimeField(2)
    with pytest.raises(FieldError):
        PrimeField(9)
    assert field_from_name("prime 5") == PrimeField(5)
    assert field_from_name("rational") == QQ
