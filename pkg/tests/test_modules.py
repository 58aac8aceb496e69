import pytest
from hypothesis import given, settings, strategies as st

from flatcone.groebner import Ideal
from flatcone.modules import (INFINITE, ModulePresentation, SubmoduleBasis, annihilator,
                              element_quotient, finite_dimension, hilbert_values,
                              kernel_of_map, syzygies)
from flatcone.polycore import RingContext, parse_poly
from strategies import nonzero_polynomials

R = RingContext(("x", "y", "z"))
R2 = RingContext(("x", "y"))


def P(s, ctx=R):
    return parse_poly(s, ctx)


def V(*ss, ctx=R):
    return tuple(P(s, ctx) for s in ss)


def test_submodule_membership():
    B = SubmoduleBasis(R, 2, [V("x", "y"), V("y", "0")])
    assert B.contains(V("x*z + y", "y*z"))
    assert not B.contains(V("1", "0"))
    r = B.reduce(V("x", "0"))
    assert not all(p.is_zero() for p in r)


def test_koszul_syzygies_of_variables():
    S = syzygies([P("x"), P("y"), P("z")])
    # the three Koszul relations generate the module of syzygies
    B = SubmoduleBasis(R, 3, S.generators)
    for v in (V("y", "-x", "0"), V("z", "0", "-x"), V("0", "z", "-y")):
        assert B.contains(v)
    for s in S.generators:
        assert (s[0] * P("x") + s[1] * P("y") + s[2] * P("z")).is_zero()


@given(st.lists(nonzero_polynomials(R2, max_degree=2), min_size=2, max_size=3))
@settings(max_examples=25, deadline=None)
def test_syzygies_are_relations(fs):
    for s in syzygies(fs).generators:
        assert sum((a * f for a, f in zip(s, fs)), R2.zero()).is_zero()


def test_cyclic_module_and_zero_test():
    M = ModulePresentation.cyclic(Ideal(R, [P("x"), P("1 - x")]))
    assert M.is_zero()
    assert not ModulePresentation.cyclic(Ideal(R, [P("x")])).is_zero()


@pytest.mark.parametrize("gens, dim", [
    (["x^2", "y^3", "z"], 6),
    (["x^2", "x*y", "y^2", "z"], 3),
    (["x", "y"], INFINITE),
    (["1"], 0),
])
def test_finite_dimension(gens, dim):
    M = ModulePresentation.cyclic(Ideal(R, [P(g) for g in gens]))
    assert finite_dimension(M) == dim


def test_annihilator_of_subquotient():
    # (x)/(x^2, x y) is killed by (x, y)
    M = ModulePresentation(R, 1, [V("x^2"), V("x*y")], [V("x")])
    assert annihilator(M) == Ideal(R, [P("x"), P("y")])
    assert element_quotient([V("x^2")], V("x"), 1, R) == Ideal(R, [P("x")])


def test_kernel_of_map():
    # multiplication by x on R/(x y) has kernel generated by y
    src = ModulePresentation.cyclic(Ideal(R, [P("x*y")]))
    K = kernel_of_map(src, src, [V("x")])
    gens = [g for g in K.gens()]
    assert any(Ideal(R, [P("x*y"), g[0]]) == Ideal(R, [P("y")]) for g in gens)


def test_hilbert_values_of_graded_module():
    M = ModulePresentation(R, 2, [V("x", "0"), V("y", "z")], degrees=(0, 0))
    # R^2 minus (x, 0) and (y, z) in degree 1: 6 - 2
    assert hilbert_values(M, [0, 1]) == (2, 4)
    with pytest.raises(ValueError):
        hilbert_values(ModulePresentation(R, 1, [V("x + 1")], degrees=(0,)), [0])


def test_rank_mismatch_is_rejected():
    with pytest.raises(ValueError):
        ModulePresentation(R, 2, [V("x")])
