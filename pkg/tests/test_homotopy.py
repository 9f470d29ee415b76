import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from opmin.algebra import extend_morphism, is_quasi_iso
from opmin.builtins import shared_builtin
from opmin.complexes import record_d2
from opmin.engine import EngineOptions, minimal_model
from opmin.free import FreeAlgebra, Generator
from opmin.homotopy import (Homotopy, LiftingError, MappingPath, PathAlgebra, TDegreeOverflow, compare_models,
                            constant_homotopy, lift_through_surjection, mapping_path, reverse,
                            section_of_quasi_iso, verify_homotopy)
from opmin.samples import (monomial_algebra, projection_from_pair, random_morphism, random_sullivan,
                           relabeled, sphere, with_contractible_pair)
from instances import LIFT_KINDS, lifting_case

MU2 = (2, 0, {0: Fraction(1)})


def check_square_zero(alg, lo, hi):
    delta = alg.convention.delta
    for k in range(lo, hi + 1):
        if lo <= k + delta <= hi and lo <= k + 2 * delta <= hi:
            record_d2(alg.d_matrix(k + delta) @ alg.d_matrix(k), f"in degree {k}")


@pytest.fixture(scope="module")
def s2(com):
    return sphere(com, 2, 10)


def test_path_algebra_squares_to_zero(s2):
    for T in (1, 2, 4):
        P = PathAlgebra(s2, T)
        check_square_zero(P, P.window[0], P.window[1])


def test_path_basis_sizes(s2):
    P = PathAlgebra(s2, 3)
    # degree 2: x t^0..t^3; degree 3: x t^j dt for j < 3
    assert P.dim(2) == 4 and P.dim(3) == 3


@pytest.mark.parametrize("conv", ["cochain", "chain"])
def test_evaluations_are_quasi_isos(conv):
    com = shared_builtin("Com", conv, 4)
    B = sphere(com, 2, 8)
    P = PathAlgebra(B, 2)
    for m in (P.ev0, P.ev1, P.iota):
        assert is_quasi_iso(m, 6).ok


def test_t_degree_overflow(s2):
    P = PathAlgebra(s2, 1)
    t = P.element(0, {(0, 1): {0: 1}})
    with pytest.raises(TDegreeOverflow):
        P.theta_vec(MU2, [(0, t), (0, t)])


@given(st.integers(0, 10**6))
def test_path_product_is_leibniz(seed):
    rng = random.Random(seed)
    com = shared_builtin("Com", "cochain", 4)
    B = random_sullivan(com, rng, stages=2, r=1, max_degree=8)
    P = PathAlgebra(B, 4)
    for _ in range(3):
        ka, kb = rng.randint(1, 3), rng.randint(1, 3)
        a = {i: Fraction(rng.randint(-2, 2)) for i in range(P.dim(ka)) if rng.random() < 0.5}
        b = {i: Fraction(rng.randint(-2, 2)) for i in range(P.dim(kb)) if rng.random() < 0.5}
        a = {i: c for i, c in a.items() if c}
        b = {i: c for i, c in b.items() if c}
        if not a or not b:
            continue
        try:
            lhs = P.d_matrix(ka + kb).apply(P.theta_vec(MU2, [(ka, a), (kb, b)]))
            t1 = P.theta_vec(MU2, [(ka + 1, P.d_matrix(ka).apply(a)), (kb, b)])
            t2 = P.theta_vec(MU2, [(ka, a), (kb + 1, P.d_matrix(kb).apply(b))])
        except TDegreeOverflow:
            continue
        rhs = dict(t1)
        for i, c in t2.items():
            rhs[i] = rhs.get(i, 0) + (-1 if ka % 2 else 1) * c
        assert lhs == {i: c for i, c in rhs.items() if c}


@given(st.integers(0, 10**6), st.sampled_from(LIFT_KINDS))
def test_lifting_commutes(seed, kind):
    case = lifting_case(random.Random(seed), kind)
    up = max(g.degree for g in case.c.generators)
    g = lift_through_surjection(case.c, case.f, case.w, up_to=up)
    for gen in case.c.generators:
        assert case.w.matrix(gen.degree).apply(g.images[gen.label]) == case.f.images[gen.label]


def test_lifting_needs_surjection(s2, com):
    M = FreeAlgebra(com, [Generator("x", 2)], {}, max_degree=8)
    f = extend_morphism(M, s2, {"x": {0: 1}})
    zero = extend_morphism(FreeAlgebra(com, [Generator("y", 2)], {}, max_degree=8), s2, {})
    with pytest.raises(LiftingError):
        lift_through_surjection(M, f, zero)


def test_section_of_pair_projection():
    com = shared_builtin("Com", "cochain", 4)
    small = FreeAlgebra(com, [Generator("x", 2)], {}, max_degree=8)
    big = with_contractible_pair(small, 3)
    pr = projection_from_pair(big, small)
    sec = section_of_quasi_iso(pr, up_to=6)
    for g in small.generators:
        assert pr.matrix(g.degree).apply(sec.images[g.label]) == small.to_vector(small.generator_element(g.label))


def test_mapping_path_factorization(s2):
    m = minimal_model(s2, 1, 6)
    mp, p, q, j = mapping_path(m.f, T=2, certify_up_to=5)
    check_square_zero(mp, mp.window[0] + 1, 7)
    for k in range(0, 6):
        assert (p.matrix(k) @ j.matrix(k)).to_dense() == [[int(a == b) for b in range(m.model.dim(k))]
                                                          for a in range(m.model.dim(k))]


def test_homotopy_endpoints_and_reverse(s2):
    m1 = minimal_model(s2, 1, 6, EngineOptions(section="random", seed=1))
    m2 = minimal_model(s2, 1, 6, EngineOptions(section="random", seed=2))
    res = compare_models(m1, m2)
    h = res.homotopy
    f2g = m2.f.compose_with(res.g)
    assert verify_homotopy(h, f2g, m1.f)
    assert verify_homotopy(reverse(h), m1.f, f2g)
    assert verify_homotopy(constant_homotopy(m1.f), m1.f, m1.f)


def test_compare_relabeled_models(com):
    a = monomial_algebra(com, {"x": 2, "y": 3}, {}, 9)
    m1 = minimal_model(a, 1, 7)
    M2, ren = relabeled(m1.model)
    f2 = extend_morphism(M2, a, {ren[k]: v for k, v in m1.f.images.items()})
    m2 = type(m1)(M2, f2, a, 1, 7)
    res = compare_models(m1, m2)
    assert res.invertible and res.certificate.ok
    # the comparison is the relabeling, up to the permutation within a stage
    for k, mat in res.generator_matrices.items():
        assert all(abs(x) == 1 for x in mat.entries.values()) and mat.nnz() == mat.rows


def test_compare_needs_same_target(com):
    m1 = minimal_model(sphere(com, 2, 10), 1, 6)
    m2 = minimal_model(sphere(com, 2, 10), 1, 6)
    with pytest.raises(ValueError):
        compare_models(m1, m2)


def test_compare_overflow_is_reported(s2):
    m1 = minimal_model(s2, 1, 6, EngineOptions(section="random", seed=5))
    m2 = minimal_model(s2, 1, 6, EngineOptions(section="random", seed=6))
    res = compare_models(m1, m2, T=1, ceiling=1)
    if res.g is None:
        assert res.overflow and "t-degree bound" in res.lines()[0]
    else:
        assert res.invertible
