"""Ready-made desk-scale structures used by the tests and the CLI examples."""

from __future__ import annotations

from fractions import Fraction

from .core import GradedSpace, QQ, basis_element
from .cochains import CeTower, CochainTower
from .cyclic import SymplecticForm
from .ocha import OchaStructure, build_dga_ocha, shifted_space


def frobenius_sphere_algebra():
    """Two-dimensional unital Frobenius algebra: unit in degree -1, one
    generator e in degree 1 with e*e = 0, pairing <unit, e> = 1 of degree 0."""
    a_space = GradedSpace(("u", "e"), (-1, 1), "A")
    product = {
        (0, 0): (1, 0),
        (0, 1): (0, 1),
        (1, 0): (0, 1),
        (1, 1): (0, 0),
    }
    pairing = [[0, 1], [1, 0]]
    return a_space, product, pairing


def s2_model() -> OchaStructure:
    """Sphere model: the Frobenius algebra above with zero differentials, the
    closed sector a shifted copy of it, and the identity chain map."""
    a_space, product, pairing = frobenius_sphere_algebra()
    z_space = shifted_space(a_space, -1, "z", "Z")
    f = {0: (1, 0), 1: (0, 1)}
    return build_dga_ocha(a_space, product, {}, pairing, 0, "u",
                          z_space, {}, f)


def two_generator_model() -> OchaStructure:
    """Second fixture: nonzero closed differential and nonzero closed-to-open
    map.  Z = span(za: -2, zb: -1), d_Z(za) = zb, f(za) = unit, f(zb) = 0."""
    a_space, product, pairing = frobenius_sphere_algebra()
    z_space = GradedSpace(("za", "zb"), (-2, -1), "Z")
    d_z = {0: (0, 1)}
    f = {0: (1, 0)}
    return build_dga_ocha(a_space, product, {}, pairing, 0, "u",
                          z_space, d_z, f)


def pure_a_infinity_model() -> OchaStructure:
    """The sphere algebra viewed as an OCHA with trivial closed sector."""
    a_space, product, pairing = frobenius_sphere_algebra()
    z_space = shifted_space(a_space, -1, "z", "Z")
    return build_dga_ocha(a_space, product, {}, pairing, 0, "u",
                          z_space, {}, {})


def exterior_algebra_model() -> OchaStructure:
    """Exterior algebra on one odd generator (unit -1, generator x with
    x*x = 0 in classical degree 1, stored degree 0), paired with the unit.

    The stored degree of x is even, so the pairing of degree 1 must be
    antisymmetric on (u, x)."""
    a_space = GradedSpace(("u", "x"), (-1, 0), "A")
    product = {
        (0, 0): (1, 0),
        (0, 1): (0, 1),
        (1, 0): (0, 1),
        (1, 1): (0, 0),
    }
    pairing = [[0, 1], [-1, 0]]
    z_space = shifted_space(a_space, -1, "z", "Z")
    return build_dga_ocha(a_space, product, {}, pairing, 1, "u",
                          z_space, {}, {})
