import itertools
from fractions import Fraction

import pytest

from opmin.algebra import (CompatibilityError, check_connected, extend_morphism, identity_morphism,
                           is_quasi_iso, restrict, target_complex, validate_algebra, _basis_tuples)
from opmin.builtins import lie_to_ass
from opmin.complexes import betti
from opmin.free import FreeAlgebra, Generator
from opmin.samples import associative_algebra, monomial_algebra, projective_space, sphere
from algebras import ALL, endomorphisms


@pytest.mark.parametrize("make", [lambda c: sphere(c, 2, 8), lambda c: projective_space(c, 2, 8),
                                  lambda c: monomial_algebra(c, {"x": 2, "y": 3}, {}, 8)])
def test_commutative_examples_validate(com, make):
    assert validate_algebra(make(com)).ok


def test_sphere_cohomology(com):
    s2 = sphere(com, 2, 8)
    assert betti(target_complex(s2, -1, 8), range(0, 8)) == {0: 1, 1: 0, 2: 1, 3: 0, 4: 0, 5: 0, 6: 0, 7: 0}


def test_wrong_sign_is_caught(com):
    a = monomial_algebra(com, {"x": 3, "y": 3}, {}, 8)
    tab = a.tables[(2, 0, 0)]
    key = next(k for k in tab if k[0][0] == 3 and k[1][0] == 3)
    tab[key] = {i: -c for i, c in tab[key].items()}
    a._cache.clear()
    rep = validate_algebra(a)
    assert not rep.ok
    assert any(check == "equivariance" for check, _ in rep.failures)


@pytest.mark.parametrize("make", ALL)
def test_associative_examples_validate(ass, make):
    assert validate_algebra(make(ass)).ok


def test_non_derivation_is_caught(ass):
    mult = {("1", y): {y: 1} for y in ("1", "e", "a")}
    mult.update({("e", "1"): {"e": 1}, ("a", "1"): {"a": 1}, ("e", "e"): {"e": 1}, ("e", "a"): {"a": 1}})
    # d(1) = a breaks d(1 * 1) = d1 * 1 + 1 * d1
    bad = associative_algebra(ass, {0: ["1", "e"], 1: ["a"]}, mult, {"1": {"a": 1}}, unit="1", hi=3)
    rep = validate_algebra(bad)
    assert not rep.ok
    assert any(check == "derivation" for check, _ in rep.failures)


@pytest.mark.parametrize("make", ALL)
def test_restriction_composition_identity(lie, ass, make):
    b = make(ass)
    f = lie_to_ass(lie, ass)
    a = restrict(f, b)
    lo, hi = b.window
    for n in (2, 3):
        for x in lie.basis_elements(n):
            for t in _basis_tuples(b, n, lo - x[1], hi - x[1]):
                args = [(d, {i: Fraction(1)}) for d, i in t]
                assert a.theta_basis(x, t) == b.theta_vec(f((n, x[1], {x[2]: Fraction(1)})), args)
    assert validate_algebra(a).ok


@pytest.mark.parametrize("make", ALL)
def test_restriction_keeps_cohomology(lie, ass, make):
    b = make(ass)
    a = restrict(lie_to_ass(lie, ass), b)
    lo, hi = b.window
    degs = range(lo, hi)
    assert betti(target_complex(a, lo - 1, hi), degs) == betti(target_complex(b, lo - 1, hi), degs)


def test_commutator_bracket(lie, ass):
    b = endomorphisms(ass)
    a = restrict(lie_to_ass(lie, ass), b)
    bracket = (2, 0, {0: Fraction(1)})
    # [p, u] = pu - up = -u
    p, u = (0, {1: Fraction(1)}), (1, {0: Fraction(1)})
    assert a.theta_vec(bracket, [p, u]) == {0: -1}


def test_morphism_must_commute_with_d(com):
    M = FreeAlgebra(com, [Generator("x", 2)], {}, max_degree=8)
    x = M.generator_element("x")
    M = M.ks_extend([Generator("y", 3)], {"y": M.theta((2, 0, {0: 1}), [x, x])})
    s2 = monomial_algebra(com, {"x": 2}, {"x": 2}, 8)  # x^2 survives, so y cannot hit a preimage
    with pytest.raises(CompatibilityError):
        extend_morphism(M, s2, {"x": {0: 1}})


def test_identity_is_quasi_iso(com):
    M = FreeAlgebra(com, [Generator("x", 2), Generator("y", 3)], {}, max_degree=8)
    assert is_quasi_iso(identity_morphism(M), 6).ok


def test_zero_map_is_not_quasi_iso(com):
    s2 = sphere(com, 2, 8)
    M = FreeAlgebra(com, [Generator("x", 2)], {}, max_degree=8)
    cert = is_quasi_iso(extend_morphism(M, s2, {}), 6)
    assert not cert.ok and cert.first_failure == 1


def test_connectivity(com):
    s2 = sphere(com, 2, 8)
    assert check_connected(s2, 1).ok
    rep = check_connected(s2, 2)
    assert not rep.ok and "H^2" in rep.witness


def test_tables_through_composites(com):
    # arity 3 is not supplied; theta(m3) must equal the iterated product
    s2xs3 = monomial_algebra(com, {"x": 2, "y": 3}, {}, 8)
    m3 = (3, 0, {0: Fraction(1)})
    m2 = (2, 0, {0: Fraction(1)})
    x, y = (2, {0: Fraction(1)}), (3, {0: Fraction(1)})
    for args in itertools.permutations([x, x, y]):
        inner = (args[0][0] + args[1][0], s2xs3.theta_vec(m2, list(args[:2])))
        assert s2xs3.theta_vec(m3, list(args)) == s2xs3.theta_vec(m2, [inner, args[2]])
