import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extcot.algebra import (Algebra, AlgebraError, QuiverPresentation, direct_product, dual_numbers, field_algebra,
                            find_algebra_isomorphism, from_quiver, opposite, validate)


def a2(p=2):
    return from_quiver(QuiverPresentation(2, [(1, 2, "a")]), p)


def test_field_and_dual_numbers_valid():
    assert validate(field_algebra(2)).ok
    d = dual_numbers(2)
    assert d.dim == 2 and validate(d).ok
    # x * x = 0 and 1 is the unit
    x = d.basis_vector(1)
    assert not d.product(x, x).any()


def test_dual_numbers_hand_expansion():
    # all 8 basis triples by hand: the only nonzero products are 1*1, 1*x, x*1
    d = dual_numbers(2)
    table = {(0, 0): [1, 0], (0, 1): [0, 1], (1, 0): [0, 1], (1, 1): [0, 0]}
    for (i, j), v in table.items():
        assert d.mul[i, j].tolist() == v


def test_swapped_table_names_triple():
    # basis 1, b, c with b*b = c, b*c = b: (b b) b = 0 but b (b b) = b
    mul = np.zeros((3, 3, 3), dtype=np.int64)
    for i in range(3):
        mul[0, i, i] = mul[i, 0, i] = 1
    mul[1, 1, 2] = 1
    mul[1, 2, 1] = 1
    rep = validate(Algebra(2, mul, [1, 0, 0], ["1", "b", "c"], ))
    assert not rep.ok
    kinds = {f[0] for f in rep.failures}
    assert kinds == {"associativity"}
    assert ("associativity", (1, 1, 1), "(b*b)*b != b*(b*b)") in rep.failures


def test_from_quiver_examples():
    k = from_quiver(QuiverPresentation(1, []), 2)
    assert k.dim == 1 and find_algebra_isomorphism(k, field_algebra(2)) is not None
    a = a2()
    assert a.dim == 3 and tuple(a.labels) == ("e1", "e2", "a")
    # a = e2 a e1
    e1, e2, al = (a.basis_vector(i) for i in range(3))
    assert (a.product(e2, a.product(al, e1)) == al).all()
    assert not a.product(e1, al).any()
    loop = from_quiver(QuiverPresentation(1, [(1, 1, "x")], [("x", "x")]), 2)
    assert find_algebra_isomorphism(loop, dual_numbers(2)) is not None


def test_non_admissible_rejected():
    with pytest.raises(AlgebraError, match="survives"):
        from_quiver(QuiverPresentation(1, [(1, 1, "x")], [], 1), 2)
    with pytest.raises(AlgebraError, match="unknown arrow"):
        from_quiver(QuiverPresentation(1, [(1, 1, "x")], [("y",)]), 2)


def test_opposite():
    d = dual_numbers(3)
    assert np.array_equal(opposite(d).mul, d.mul)
    a = a2()
    op = opposite(a)
    assert validate(op).ok
    assert opposite(op) is a
    # in the opposite algebra the arrow goes the other way: e1 a e2 = a
    e1, e2, al = (op.basis_vector(i) for i in range(3))
    assert (op.product(e1, op.product(al, e2)) == al).all()
    assert find_algebra_isomorphism(op, from_quiver(QuiverPresentation(2, [(2, 1, "b")]), 2)) is not None


def test_direct_product():
    kk = direct_product(field_algebra(2), field_algebra(2))
    assert kk.dim == 2 and validate(kk).ok and len(kk.factors) == 2
    ll = direct_product(dual_numbers(2), dual_numbers(2))
    assert ll.dim == 4 and validate(ll).ok
    assert ll.factor_offsets() == [0, 2]


def test_isomorphism_search_negative():
    kk = direct_product(field_algebra(2), field_algebra(2))
    assert find_algebra_isomorphism(kk, dual_numbers(2)) is None


@st.composite
def small_algebras(draw):
    # products and opposites of the basic examples
    p = draw(st.sampled_from([2, 3]))
    pool = [field_algebra(p), dual_numbers(p), a2(p)]
    picks = draw(st.lists(st.sampled_from(range(3)), min_size=1, max_size=2))
    algs = [pool[i] for i in picks]
    if draw(st.booleans()):
        algs = [opposite(b) for b in algs]
    return direct_product(*algs) if len(algs) > 1 else algs[0]


def _brute_assoc(a):
    d = a.dim
    for i in range(d):
        for j in range(d):
            for k in range(d):
                x, y, z = (a.basis_vector(t) for t in (i, j, k))
                if not np.array_equal(a.product(a.product(x, y), z), a.product(x, a.product(y, z))):
                    return False
    return True


@settings(max_examples=25, deadline=None)
@given(small_algebras())
def test_builders_stay_valid(a):
    assert validate(a).ok
    assert _brute_assoc(a)
    if a.dim <= 3:
        assert find_algebra_isomorphism(a, a) is not None


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=8, max_size=8))
def test_validate_agrees_with_brute_force(bits):
    # random 2-dimensional tables with e0 the unit, varying only b*b
    mul = np.zeros((2, 2, 2), dtype=np.int64)
    mul[0, 0, 0] = mul[0, 1, 1] = mul[1, 0, 1] = 1
    mul[1, 1] = bits[:2]
    # break the unit law sometimes
    if bits[2] and bits[3]:
        mul[1, 0] = bits[4:6]
    a = Algebra(2, mul, [1, 0])
    unit_ok = bits[2] == 0 or bits[3] == 0 or bits[4:6] == [0, 1]
    assert validate(a).ok == (_brute_assoc(a) and unit_ok)
