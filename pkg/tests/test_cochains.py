import random

import pytest

from ochabv.core import GradedSpace, basis_element, element_from_coeffs, koszul_sign
from ochabv.core import Permutation
from ochabv.cochains import (
    CeTower,
    CochainTower,
    WindowError,
    degree_audit,
    is_normalized,
    linear_combine,
    tower_sub,
    zero_tower,
)
from ochabv.randgen import random_nonzero_tower, random_graded_space


SZ = GradedSpace(("x", "y"), (1, 1), "Z")
SA = GradedSpace(("u", "e"), (-1, 1), "A")


def rand_tower(seed, **kw):
    rng = random.Random(seed)
    return random_nonzero_tower(rng, SZ, SA, **kw)


def test_constructor_validation():
    with pytest.raises(ValueError):
        CochainTower(SZ, SA, 0, {(0, 0): {((), ()): (1, 0)}})
    with pytest.raises(ValueError):
        CochainTower(SZ, SA, 0, {(2, 0): {((1, 0), ()): (1, 0)}})  # unsorted
    with pytest.raises(ValueError):
        CochainTower(SZ, SA, 0, {(2, 0): {((0, 0), ()): (1, 0)}})  # odd repeat
    with pytest.raises(WindowError):
        CochainTower(SZ, SA, 0, {}, window=-1)


def test_table_lookup_at_basis_pair():
    T = CochainTower(SZ, SA, 1, {(0, 2): {((), (0, 1)): (0, 3)}})
    got = T.eval([], [basis_element(SA, 0), basis_element(SA, 1)])
    assert got.coeffs == (0, 3)


def test_eval_repeated_odd_z_is_zero():
    T = rand_tower(3, max_arity=2, bidegrees=[(2, 0)])
    x = basis_element(SZ, 0)
    assert T.eval([x, x], []).is_zero()


def test_eval_graded_symmetry_sign():
    T = rand_tower(4, bidegrees=[(2, 1)], density=1.0)
    z0, z1 = basis_element(SZ, 0), basis_element(SZ, 1)
    a = basis_element(SA, 1)
    fwd = T.eval([z0, z1], [a])
    rev = T.eval([z1, z0], [a])
    # both letters odd: swapping costs a sign
    assert rev.coeffs == tuple(-c for c in fwd.coeffs)


def test_eval_graded_symmetry_random_permutation():
    space_z = GradedSpace(("p", "q", "r"), (1, 2, -1), "Z")
    rng = random.Random(7)
    T = random_nonzero_tower(rng, space_z, SA, bidegrees=[(3, 0)], density=1.0)
    perm = Permutation((2, 0, 1))
    basis = [basis_element(space_z, i) for i in range(3)]
    word = [basis[i] for i in perm.images]
    sign = koszul_sign(perm, list(space_z.degrees))
    lhs = T.eval(word, [])
    rhs = T.eval(basis, [])
    assert lhs.coeffs == tuple(sign * c for c in rhs.coeffs)


def test_eval_multilinear():
    T = rand_tower(5, bidegrees=[(1, 1)], density=1.0)
    z = basis_element(SZ, 0)
    a0, a1 = basis_element(SA, 0), basis_element(SA, 1)
    # same-degree combination keeps homogeneity; coefficients distribute
    v = element_from_coeffs(SA, (3, 0))
    lhs = T.eval([z], [v])
    rhs = T.eval([z], [a0]).scale(3)
    assert lhs.coeffs == rhs.coeffs


def test_eval_outside_window_raises():
    T = CochainTower(SZ, SA, 0, {(1, 1): {((0,), (1,)): (0, 1)}}, window=2)
    z = basis_element(SZ, 0)
    a = basis_element(SA, 1)
    T.eval([z], [a])
    with pytest.raises(WindowError):
        T.eval([z, z], [a])


def test_linear_combine_cancel_and_scale():
    T = rand_tower(6)
    assert linear_combine([1, -1], [T, T]).is_zero()
    zero = linear_combine([0], [CochainTower(SZ, SA, T.degree, T.components, 4)])
    assert zero.is_zero() and zero.window == 4
    doubled = linear_combine([2], [T])
    lk = T.bidegrees()[0]
    key = next(iter(T.components[lk]))
    assert doubled.components[lk][key] == tuple(2 * c for c in T.components[lk][key])


def test_linear_combine_degree_mismatch():
    A = CochainTower(SZ, SA, 0, {(0, 1): {((), (1,)): (0, 1)}})
    B = CochainTower(SZ, SA, 1, {(0, 1): {((), (0,)): (0, 1)}})
    with pytest.raises(ValueError):
        linear_combine([1, 1], [A, B])


def test_linear_combine_eval_commutes():
    rng = random.Random(8)
    A = random_nonzero_tower(rng, SZ, SA, degree=1, bidegrees=[(1, 1)], density=1.0)
    B = random_nonzero_tower(rng, SZ, SA, degree=1, bidegrees=[(1, 1)], density=1.0)
    combo = linear_combine([2, -3], [A, B])
    z = basis_element(SZ, 1)
    a = basis_element(SA, 0)
    direct = combo.eval([z], [a])
    split = A.eval([z], [a]).scale(2) + B.eval([z], [a]).scale(-3)
    assert direct.coeffs == split.coeffs


def test_degree_audit():
    assert degree_audit(zero_tower(SZ, SA, 0))
    good = CochainTower(SZ, SA, 0, {(0, 1): {((), (1,)): (0, 2)}})
    assert degree_audit(good)
    bad = CochainTower(SZ, SA, 0, {(0, 1): {((), (1,)): (2, 0)}})
    assert not degree_audit(bad)


def test_is_normalized(s2):
    unit = s2.unit
    assert is_normalized(zero_tower(s2.space_z, s2.space_a, 0), unit)
    assert not is_normalized(s2.q, unit)
    from ochabv.ocha import normalized_project

    rng = random.Random(9)
    T = random_nonzero_tower(rng, s2.space_z, s2.space_a, max_arity=2)
    assert is_normalized(normalized_project(T, unit), unit)


def test_ce_tower_basics():
    space = GradedSpace(("p", "q"), (0, 1), "Z")
    l = CeTower(space, 1, {1: {(0,): (0, 2)}})
    assert l.value((0,)) == (0, 2)
    assert l.value((1,)) == (0, 0)
    z = basis_element(space, 0)
    got = l.eval([z])
    assert got.coeffs == (0, 2) and got.degree == 1
    with pytest.raises(ValueError):
        CeTower(space, 1, {0: {(): (1, 0)}})
