import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from opmin.builtins import shared_builtin
from opmin.free import (CocycleError, FreeAlgebra, FreeElement, Generator, TruncationError,
                        UnboundedArityError)
from opmin.samples import random_sullivan
from instances import lemma_instance
from oracles import coinvariant_dim

MU2 = (2, 0, {0: Fraction(1)})


def product(M, *xs):
    out = xs[0]
    for x in xs[1:]:
        out = M.theta(MU2, [out, x])
    return out


def test_polynomial_on_even_generator(com):
    M = FreeAlgebra(com, [Generator("x", 2)], {}, max_degree=8)
    assert [M.dim(k) for k in (0, 3, 4)] == [1, 0, 1]
    x = M.generator_element("x")
    assert not product(M, x, x).is_zero()


def test_odd_generator_squares_to_zero(com):
    M = FreeAlgebra(com, [Generator("y", 3)], {}, max_degree=8)
    y = M.generator_element("y")
    assert product(M, y, y).is_zero()
    assert M.dim(6) == 0


def test_lie_on_one_odd_generator(lie):
    M = FreeAlgebra(lie, [Generator("x", 1)], {}, max_degree=5)
    assert [M.dim(k) for k in (1, 2, 3)] == [1, 1, 0]
    x = M.generator_element("x")
    xx = M.theta(MU2, [x, x])
    assert not xx.is_zero()
    assert M.theta(MU2, [x, xx]).is_zero()


def test_ks_extension_differential(com):
    M = FreeAlgebra(com, [Generator("x", 2)], {}, max_degree=8)
    x = M.generator_element("x")
    M = M.ks_extend([Generator("y", 3)], {"y": product(M, x, x)})
    x, y = M.generator_element("x"), M.generator_element("y")
    assert M.d(product(M, x, y)) == product(M, x, x, x)
    assert M.dim(5) == 1
    M.check_d_squared()


def test_ks_extension_rejects_non_cocycle(com):
    M = FreeAlgebra(com, [Generator("x", 2)], {}, max_degree=8)
    M = M.ks_extend([Generator("y", 3)], {"y": product(M, M.generator_element("x"), M.generator_element("x"))})
    with pytest.raises(CocycleError):
        M.ks_extend([Generator("z", 5)], {"z": product(M, M.generator_element("x"), M.generator_element("y"))})


def test_unbounded_arity_needs_cap(ger):
    M = FreeAlgebra(ger, [Generator("a", 1)], {}, max_degree=4)
    with pytest.raises(UnboundedArityError):
        M.dim(3)
    capped = FreeAlgebra(ger, [Generator("a", 1)], {}, max_degree=4, arity_cap=3)
    capped.dim(3)
    assert capped.modulo_arity_cap


def test_truncation(com):
    M = FreeAlgebra(com, [Generator("x", 2)], {}, max_degree=4)
    with pytest.raises(TruncationError):
        M.dim(5)
    x = M.generator_element("x")
    with pytest.raises(TruncationError):
        product(M, x, x, x)


def test_generators_need_positive_degree(com):
    with pytest.raises(ValueError):
        FreeAlgebra(com, [Generator("z", 0)], {})


def test_element_string(com):
    M = FreeAlgebra(com, [Generator("x", 2)], {}, max_degree=6)
    x = M.generator_element("x")
    s = M.element_string(product(M, x, x).scale(-1))
    assert s.startswith("-") and "x" in s


gens_strategy = st.lists(st.integers(1, 4), min_size=1, max_size=3)


@given(st.sampled_from(["Com", "Ass", "Lie", "Ger"]), st.sampled_from(["cochain", "chain"]), gens_strategy,
       st.integers(0, 8))
def test_dims_match_tensor_coinvariants(name, conv, degs, k):
    p = shared_builtin(name, conv, 4)
    degrees = {f"g{i}": d for i, d in enumerate(degs)}
    M = FreeAlgebra(p, [Generator(x, d) for x, d in degrees.items()], {}, max_degree=8, arity_cap=4)
    assert M.dim(k) == coinvariant_dim(p, degrees, k, 4)


@given(st.sampled_from(["Com", "Ass", "Lie"]), st.integers(0, 10**6))
def test_leibniz_rule(name, seed):
    rng = random.Random(seed)
    p = shared_builtin(name, "cochain", 4)
    M = random_sullivan(p, rng, stages=3, r=1, max_degree=8)
    lo, hi = 2, 3

    def rand_el(k):
        n = M.dim(k)
        return M.from_vector(k, {i: Fraction(rng.randint(-2, 2)) for i in range(n)})

    for _ in range(3):
        ka, kb = rng.randint(lo, hi), rng.randint(lo, hi)
        a, b = rand_el(ka), rand_el(kb)
        lhs = M.d(M.theta(MU2, [a, b]))
        da = M.d(a) if a.terms else FreeElement(ka + 1, {})
        db = M.d(b) if b.terms else FreeElement(kb + 1, {})
        rhs = M.theta(MU2, [da, b]) + M.theta(MU2, [a, db]).scale(-1 if ka % 2 else 1)
        assert lhs == rhs


@given(st.integers(0, 10**6), st.sampled_from(["cochain", "chain"]))
def test_random_towers_square_to_zero(seed, conv):
    rng = random.Random(seed)
    p = shared_builtin(rng.choice(["Com", "Ass", "Lie"]), conv, 4)
    M = random_sullivan(p, rng, stages=3, r=1, max_degree=8)
    assert M.check_d_squared()


@given(st.integers(0, 10**6))
def test_vanishing_below_connectivity(seed):
    inst = lemma_instance(random.Random(seed))
    _, M = inst.algebras()
    for k in range(M.lo, inst.r + 1):
        if k == 0:
            assert M.dim(0) == inst.operad.dim(0, 0)
        else:
            assert M.dim(k) == 0


@given(st.integers(0, 10**6))
def test_stability_when_adding_top_generators(seed):
    inst = lemma_instance(random.Random(seed))
    small, big = inst.algebras()
    for k in range(small.lo, inst.p):
        assert big.dim(k) == small.dim(k)
    assert big.dim(inst.p) == small.dim(inst.p) + len(inst.W)


@given(st.integers(0, 10**6))
def test_stability_one_degree_higher(seed):
    inst = lemma_instance(random.Random(seed), skip_first=True)
    small, big = inst.algebras()
    assert big.dim(inst.p + 1) == small.dim(inst.p + 1)
