import itertools

import pytest

from extcot import extension as ex
from extcot.algebra import QuiverPresentation, direct_product, dual_numbers, field_algebra, find_algebra_isomorphism, \
    from_quiver, validate
from extcot.functors import f_squared_zero, regular_bimodule, zero_bimodule
from extcot.modules import enumerate_modules, ext_dims, is_isomorphic, regular_module
from extcot.rings import (CommaSpec, MoritaContextSpec, RingShapeError, comma_bridge, lambda_category,
                          lambda_to_pair, morita_bimodule, morita_context_ring, pair_to_lambda, trivial_extension_ring)

K = field_algebra(2)
L0 = dual_numbers(2)
A2 = from_quiver(QuiverPresentation(2, [(1, 2, "a")]), 2)


def test_trivial_extension_of_k_by_k_is_dual_numbers():
    r = trivial_extension_ring(K, regular_bimodule(K))
    assert validate(r).ok and r.dim == 2
    assert find_algebra_isomorphism(r, L0) is not None


def test_trivial_extension_by_zero_is_the_base():
    r = trivial_extension_ring(A2, zero_bimodule(A2))
    assert r.dim == A2.dim and find_algebra_isomorphism(r, A2) is not None


def test_trivial_extension_rejects_wrong_sides():
    with pytest.raises(ValueError):
        trivial_extension_ring(A2, regular_bimodule(K))


def test_morita_with_one_arrow_is_a2():
    spec = MoritaContextSpec(K, K, regular_bimodule(K), zero_bimodule(K))
    lam = morita_context_ring(spec)
    assert validate(lam).ok and lam.dim == 3
    assert find_algebra_isomorphism(lam, A2) is not None
    _, mn = morita_bimodule(spec)
    assert f_squared_zero(mn)


def test_morita_with_zero_bimodules_is_the_product():
    # M must be a B-A bimodule
    with pytest.raises(ValueError):
        morita_context_ring(MoritaContextSpec(K, L0, zero_bimodule(L0), zero_bimodule(K)))
    lam = morita_context_ring(MoritaContextSpec(L0, L0, zero_bimodule(L0), zero_bimodule(L0)))
    assert find_algebra_isomorphism(lam, direct_product(L0, L0)) is not None


def test_t2_of_dual_numbers():
    lam = morita_context_ring(MoritaContextSpec(L0, L0, regular_bimodule(L0), zero_bimodule(L0)))
    assert lam.dim == 6 and validate(lam).ok
    assert lambda_category(lam).f2zero


def test_lambda_to_pair_examples():
    lam = morita_context_ring(MoritaContextSpec(K, K, regular_bimodule(K), zero_bimodule(K)))
    cat = lambda_category(lam)
    mods = enumerate_modules(lam, 2)
    for x in mods:
        e = lambda_to_pair(x)
        assert e.failures() == [] and e.dim == x.dim
        assert is_isomorphic(pair_to_lambda(e, lam), x)
    # the regular module corresponds to T of the regular base module
    reg = lambda_to_pair(regular_module(lam))
    assert ex.is_isomorphic_ext(reg, ex.functor_T(cat, regular_module(cat.base)))
    zero = lambda_to_pair(mods[0])
    assert zero.dim == 0


def test_bridge_preserves_ext():
    lam = morita_context_ring(MoritaContextSpec(K, K, regular_bimodule(K), zero_bimodule(K)))
    mods = enumerate_modules(lam, 2)
    for x, y in itertools.product(mods, repeat=2):
        assert ext_dims(x, y, 2) == ex.ext_dims_ext(lambda_to_pair(x), lambda_to_pair(y), 2)


def test_foreign_algebra_refused():
    with pytest.raises(RingShapeError):
        lambda_category(A2)
    lam = trivial_extension_ring(K, regular_bimodule(K))
    other = morita_context_ring(MoritaContextSpec(K, K, regular_bimodule(K), zero_bimodule(K)))
    e = lambda_to_pair(regular_module(lam))
    with pytest.raises(RingShapeError):
        pair_to_lambda(e, other)


def test_comma_with_zero_functor():
    br = comma_bridge(CommaSpec(K, K, zero_bimodule(K)))
    kmods = enumerate_modules(K, 1)
    objs = br.enumerate(kmods, kmods)
    # G = 0 leaves only the pairs (X, Y) with the zero map
    assert len(objs) == len(kmods) ** 2
    for o in objs:
        e = br.to_ext(o)
        assert e.f.is_zero()
        back = br.from_ext(e)
        assert back.x.dim == o.x.dim and back.y.dim == o.y.dim


def test_comma_rejects_wrong_sides():
    with pytest.raises(ValueError):
        comma_bridge(CommaSpec(K, L0, regular_bimodule(K)))


def test_simple_lambda_modules_are_z_of_simples():
    lam = morita_context_ring(MoritaContextSpec(K, K, regular_bimodule(K), zero_bimodule(K)))
    cat = lambda_category(lam)
    simples = [x for x in enumerate_modules(lam, 1) if x.dim == 1]
    assert len(simples) == 2
    for x in simples:
        e = lambda_to_pair(x)
        assert e.f.is_zero() and ex.is_isomorphic_ext(e, ex.functor_Z(cat, e.x))
