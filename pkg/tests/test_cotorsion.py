import numpy as np
import pytest

from conftest import bundled
from extcot import extension as ex
from extcot.algebra import QuiverPresentation, direct_product, dual_numbers, field_algebra, from_quiver
from extcot.cotorsion import (ApproxSequence, HypothesisError, UniverseIndex, category_projectives, check_hovey_triple,
                              check_pair, glue_left_approximations, gorenstein_window_report,
                              special_left_approx_base, special_left_approx_in_ext, special_right_approx_base,
                              transport_contravariant_finiteness, transport_hovey_triple, transport_pair)
from extcot.extension import ExtensionCategory
from extcot.families import AddClosure, All, Injectives, Intersection, Projectives, RightPerpOf, TImageOf, UInvOf
from extcot.functors import zero_bimodule
from extcot.modules import (Module, ModuleMap, enumerate_modules, is_injective, is_isomorphic, is_projective, kernel,
                            projective_cover, zero_module)

A2 = from_quiver(QuiverPresentation(2, [(1, 2, "a")]), 2)
L0 = dual_numbers(2)
A2_MODS = enumerate_modules(A2, 2)
L0_MODS = enumerate_modules(L0, 3)
S1 = Module(A2, [[[1]], [[0]], [[0]]])
S = Module(L0, [[[1]], [[0]]])


def test_projective_pair_is_hereditary_cotorsion():
    for mods in (A2_MODS, L0_MODS):
        rep = check_pair(Projectives(), All(), UniverseIndex(mods))
        assert rep.ok and rep.is_cotorsion and rep.hereditary
    rep = check_pair(All(), Injectives(), UniverseIndex(L0_MODS))
    assert rep.ok


def test_add_s1_is_not_cotorsion():
    idx = UniverseIndex(A2_MODS)
    rep = check_pair(AddClosure([S1]), All(), idx)
    assert not rep.is_cotorsion
    # Ext^1(S1, S2) != 0 breaks orthogonality, and projectives are missing from the left class
    assert rep.orthogonality and rep.maximality
    right = RightPerpOf(AddClosure([S1]), sample=A2_MODS)
    rep = check_pair(AddClosure([S1]), right, idx)
    assert not rep.orthogonality and not rep.is_cotorsion
    assert all(side == "left" for side, _ in rep.maximality)


def test_special_left_approx_base():
    for x in A2_MODS:
        s = special_left_approx_base(x, "all_inj")
        assert s.failures(middle=Injectives(), end=All()) == []
        if is_injective(x):
            assert s.c.dim == 0
    s = special_left_approx_base(S, "all_inj")
    # 0 -> S -> Lambda0 -> S -> 0
    assert s.b.dim == 2 and is_isomorphic(s.c, S)
    s = special_left_approx_base(S, "frobenius")
    assert s.failures(middle=Projectives()) == []
    with pytest.raises(HypothesisError, match="self-injective"):
        special_left_approx_base(S1, "frobenius")
    with pytest.raises(ValueError):
        special_left_approx_base(S1, "nope")


def test_special_right_approx_base():
    for x in A2_MODS:
        s = special_right_approx_base(x, "proj_all")
        assert s.failures(middle=Projectives(), end=All()) == []
        if is_projective(x):
            assert s.a.dim == 0 and s.b.dim == x.dim
    # the Frobenius pair is (All, Proj) so every module is its own approximation
    s = special_right_approx_base(S, "frobenius")
    assert s.a.dim == 0 and s.failures(middle=All(), end=Projectives()) == []


def test_broken_sequence_reports():
    s = special_left_approx_base(S, "all_inj")
    bad = ApproxSequence(s.a, s.b, s.c, np.zeros_like(s.i), s.q, "left")
    fails = bad.failures()
    assert "i is not mono" in fails
    wrong = ApproxSequence(s.a, s.b, s.c, s.i, s.q, "left")
    assert wrong.failures(end=Projectives()) == ["end term not in Proj"]


def _p1_sequence():
    cover = projective_cover(S1)
    k, inc = kernel(cover)
    return type("Seq", (), {"a": k, "b": cover.source, "c": S1, "i": inc, "q": cover})


def test_glue_p1_from_its_pieces():
    seq = _p1_sequence()
    for pair, mid in (("all_inj", Injectives()), ("proj_all", All())):
        glued = glue_left_approximations(seq, special_left_approx_base(seq.a, pair),
                                         special_left_approx_base(seq.c, pair))
        assert glued.failures(middle=mid) == []
        assert glued.a is seq.b


def test_glue_degenerate_ends():
    x = A2_MODS[3]
    ident = ModuleMap(x, x, np.eye(x.dim, dtype=np.int64))
    z = zero_module(A2)
    zin = ModuleMap(z, x, np.zeros((x.dim, 0), dtype=np.int64))
    zout = ModuleMap(x, z, np.zeros((0, x.dim), dtype=np.int64))
    ap = special_left_approx_base(x, "all_inj")
    seq_a0 = type("Seq", (), {"a": z, "b": x, "c": x, "i": zin, "q": ident})
    seq_c0 = type("Seq", (), {"a": x, "b": x, "c": z, "i": ident, "q": zout})
    for seq, kw in ((seq_a0, {"approx_a": special_left_approx_base(z, "all_inj"), "approx_c": ap}),
                    (seq_c0, {"approx_a": ap, "approx_c": special_left_approx_base(z, "all_inj")})):
        out = glue_left_approximations(seq, **kw)
        assert out.b is ap.b and out.failures() == []


def test_special_left_approx_in_ext():
    c = bundled("a2_transport")
    cat = c.category("C")
    for x in c.universe("base"):
        for e in (ex.functor_Z(cat, x), ex.functor_T(cat, x)):
            ap = special_left_approx_in_ext(e, "all_inj")
            assert ap.failures(middle=UInvOf(Injectives())) == []
            assert all(ap.beta_checks)


def test_hovey_triples():
    assert check_hovey_triple(All(), All(), Projectives(), UniverseIndex(L0_MODS)).ok
    assert not check_hovey_triple(All(), All(), All(), UniverseIndex(A2_MODS)).ok
    assert check_hovey_triple(All(), All(), All(), UniverseIndex([zero_module(A2)])).ok


def test_zero_bimodule_transport_is_the_base():
    cat = ExtensionCategory(zero_bimodule(A2))
    objs = ex.enumerate_ext_objects(cat, A2_MODS)
    assert len(objs) == len(A2_MODS)
    rep = transport_pair(cat, Projectives(), All(), objs, A2_MODS)
    assert rep.ok
    left = UniverseIndex(objs).members(rep.families["perp U^-1(Y)"])
    assert left == [is_projective(e.x) for e in objs]


def test_hovey_refusal_names_the_hypothesis():
    c = bundled("t2_lambda0")
    rep = transport_hovey_triple(c.category("C"), All(), All(), Projectives(), c.universe("ext"), c.universe("base"))
    assert not rep.ok and rep.refusal.startswith("hypothesis violated: F(X) not in")


def test_contravariant_finiteness():
    c = bundled("a2_transport")
    cat, objs = c.category("C"), c.universe("ext")
    gens = category_projectives(c.universe("base")[0])
    omega = Intersection([TImageOf(Projectives()), UInvOf(All())])
    wit, _ = transport_contravariant_finiteness(cat, gens, objs, omega)
    assert len(wit) == len(objs) and all(w.ok for w in wit)


def test_gorenstein_semisimple_and_a2():
    kk = direct_product(field_algebra(2), field_algebra(2))
    mods = enumerate_modules(kk, 2)
    rep = gorenstein_window_report(mods)
    assert rep.spli == 0 and rep.silp == 0 and rep.gp == list(range(len(mods)))
    rep = gorenstein_window_report(A2_MODS)
    assert rep.gp == rep.projectives
    rep = gorenstein_window_report(L0_MODS)
    assert rep.gp == list(range(len(L0_MODS)))
    with pytest.raises(ValueError):
        gorenstein_window_report(A2_MODS, window=1)


def test_frobenius_free_hovey_passes():
    c = bundled("frobenius_free")
    rep = transport_hovey_triple(c.category("C"), All(), All(), Projectives(), c.universe("ext"), c.universe("base"))
    assert rep.refusal == "" and rep.ok
    assert all(not v for v in rep.identities.values())
