import json

import pytest
from hypothesis import given, settings, strategies as st

from disjcalc.core import GradedComplex, Q, discrete, empty, point, pseudo_line, sierpinski
from disjcalc.hodisj import (CommAlgebra, HoMorphism, HoStructure, MalformedStructure, MultiMap,
                             ShriekAlgebra, WrongSpace, check_algebra, check_infinity_morphism,
                             check_shriek_algebra, dual_numbers, exterior_one, generator_degree,
                             identity_morphism, morphism_degree, nonassociative_sample,
                             specialize_finite, strict_structure, structure_from_json, unit_algebra)
from disjcalc.koszul_dual import all_families, decompose_inf, family

E = frozenset()
S1 = frozenset({1})
S12 = frozenset({1, 2})


def test_generator_degree_examples():
    assert generator_degree(family((E, S1))) == 0
    assert generator_degree(family((E,), (S1,))) == 0
    assert generator_degree(family((E, S1), (E,))) == -1
    assert morphism_degree(family((E,))) == 0


def test_generator_degree_additive():
    for F in all_families(pseudo_line(), 3):
        for t in decompose_inf(F):
            # the composite has one extra degree from the internal edge
            assert generator_degree(t.outer) + generator_degree(t.inner) == generator_degree(F) + 1


@pytest.mark.parametrize("alg", [unit_algebra, dual_numbers, exterior_one])
@pytest.mark.parametrize("sp", [empty(), point(), sierpinski(), pseudo_line()], ids=lambda s: s.name)
def test_strict_structures_pass(alg, sp):
    A = strict_structure(sp, alg())
    assert check_algebra(A, 3).passed


def test_nonassociative_fails_with_triple_witness():
    A = strict_structure(empty(), nonassociative_sample())
    rep = check_algebra(A, 3)
    assert not rep.passed
    fams = {v["family"] for v in rep.violations}
    assert "[({}), ({}), ({})]" in fams


def test_noncommutative_product_fails_shuffle_vanishing():
    alg = CommAlgebra([0, 0], {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 2}}, symmetric=False)
    A = strict_structure(empty(), alg)
    assert not check_algebra(A, 2).passed


def test_identity_morphism_passes():
    A = strict_structure(sierpinski(), dual_numbers())
    assert check_infinity_morphism(identity_morphism(A), 3).passed


def test_broken_morphism_fails():
    A = strict_structure(sierpinski(), dual_numbers())
    twice = MultiMap(fn=lambda idx: {idx[0]: Q(2)})
    f = HoMorphism(A, A, {U: twice for U in A.space.opens})
    # 2x is a chain map but does not respect the product
    assert not check_infinity_morphism(f, 2).passed


# ------------------------------------------------------------ specializations

def test_specialize_empty():
    A = strict_structure(empty(), dual_numbers())
    s = specialize_finite(A)
    assert s.kind == "empty" and s.report.passed
    assert s.data["m"][2]((1, 0)) == {1: 1}
    assert s.data["m"][3]((1, 1, 1)) == {}


def test_specialize_point():
    A = strict_structure(point(), dual_numbers())
    s = specialize_finite(A)
    assert s.kind == "point" and s.report.passed and s.report.checked == 8


def test_specialize_sierpinski():
    A = strict_structure(sierpinski(), exterior_one())
    s = specialize_finite(A)
    assert s.kind == "sierpinski" and s.report.passed
    assert set(s.data) == {"A", "M", "N", "eta_M", "eta_N", "f", "h"}


def test_specialize_sierpinski_nontrivial_homotopy():
    # A = M = Q, N = <s (deg -1), n (deg 0)>, d s = n; f = 0, eta_N(1) = n,
    # so h(1) = s witnesses eta_N ~ f eta_M
    sp = sierpinski()
    Q1 = GradedComplex([0], {}, ["1"])
    N = GradedComplex([-1, 0], {0: {1: Q(1)}}, ["s", "n"])
    one = MultiMap(fn=lambda idx: {0: Q(1)})
    to_n = MultiMap(fn=lambda idx: {1: Q(1)})
    zero = MultiMap(fn=lambda idx: {})
    planar = {
        family((E, S1)): one,
        family((S1, S12)): zero,
        family((E, S12)): to_n,
        family((E,), (E,)): one,
        family((E,), (S1,)): one,
        family((S1,), (E,)): one,
        family((E,), (S12,)): MultiMap(fn=lambda idx: {idx[1]: Q(1)}),
        family((S12,), (E,)): MultiMap(fn=lambda idx: {idx[0]: Q(1)}),
        # h = -mu with d h = eta_N - f eta_M = n
        family((E, S1, S12)): MultiMap(fn=lambda idx: {0: Q(-1)}),
    }
    A = HoStructure(sp, {E: Q1, S1: Q1, S12: N}, planar=planar)
    s = specialize_finite(A, 2)
    assert s.report.passed, s.report.violations
    assert s.data["h"]((0,)) == {0: 1}


def test_specialize_wrong_space():
    with pytest.raises(WrongSpace):
        specialize_finite(strict_structure(discrete(2), unit_algebra()))


# ---------------------------------------------------------------- shriek

def _carriers(sp):
    return {U: GradedComplex([0], {}, ["x"]) for U in sp.opens}


def test_shriek_all_zero():
    sp = sierpinski()
    assert check_shriek_algebra(ShriekAlgebra(sp, _carriers(sp))).passed


def test_shriek_lone_long_extension_passes():
    # with d = 0 a lone iota(empty, {1,2}) never enters the unary relation
    sp = sierpinski()
    one = MultiMap(fn=lambda idx: {0: Q(1)})
    S = ShriekAlgebra(sp, _carriers(sp), iota={(E, S12): one})
    assert check_shriek_algebra(S).passed


def test_shriek_uncompensated_composite_fails():
    sp = sierpinski()
    one = MultiMap(fn=lambda idx: {0: Q(1)})
    S = ShriekAlgebra(sp, _carriers(sp), iota={(E, S1): one, (S1, S12): one})
    rep = check_shriek_algebra(S)
    assert not rep.passed
    assert {v["check"] for v in rep.violations} == {"unary"}


def test_shriek_compensated_by_differential():
    sp = sierpinski()
    C = {E: GradedComplex([0], {}, ["x"]), S1: GradedComplex([1], {}, ["y"]),
         S12: GradedComplex([1, 2], {0: {1: Q(1)}}, ["a", "b"])}
    # d(iota_{E,12} x) = iota_{1,12} iota_{E,1} x: x -> a, d a = b, x -> y -> b
    S = ShriekAlgebra(sp, C, iota={(E, S1): MultiMap(fn=lambda idx: {0: Q(1)}),
                                   (S1, S12): MultiMap(fn=lambda idx: {1: Q(1)}),
                                   (E, S12): MultiMap(fn=lambda idx: {0: Q(1)})})
    assert check_shriek_algebra(S).passed


def test_shriek_bracket_antisymmetry_and_jacobi():
    sp = discrete(2)
    C = {U: GradedComplex([0], {}, ["x"]) for U in sp.opens}
    one = MultiMap(fn=lambda idx: {0: Q(1)})
    neg = MultiMap(fn=lambda idx: {0: Q(-1)})
    a, b = frozenset({1}), frozenset({2})
    good = ShriekAlgebra(sp, C, mu={(a, b): one, (b, a): neg})
    assert check_shriek_algebra(good).passed
    bad = ShriekAlgebra(sp, C, mu={(a, b): one, (b, a): one})
    assert not check_shriek_algebra(bad).passed


# -------------------------------------------------------------- JSON

def test_structure_json_roundtrip():
    A = strict_structure(sierpinski(), dual_numbers())
    obj = json.loads(json.dumps(A.to_json(2)))
    B = structure_from_json(obj)
    for F in all_families(A.space, 2):
        for idx in A.input_tuples(F):
            assert A.op(F)(idx) == B.op(F)(idx)
    assert check_algebra(B, 2).passed


def test_structure_json_errors_name_path():
    A = strict_structure(sierpinski(), unit_algebra())
    obj = A.to_json(1)
    obj["ops"][0]["entries"][0] = {"value": {}}
    with pytest.raises(MalformedStructure, match=r"\$\.ops\[0\]\.entries\[0\]"):
        structure_from_json(obj)
    obj = A.to_json(1)
    obj["carriers"]["{7}"] = obj["carriers"]["{}"]
    with pytest.raises(MalformedStructure, match=r"\$\.carriers"):
        structure_from_json(obj)


@settings(max_examples=25, deadline=None)
@given(st.integers(-3, 3))
def test_random_commutative_products(a):
    # 1, x, y (all degree 0) with x*x = a y, x*y = y*y = 0 is always associative
    alg = CommAlgebra([0, 0, 0], {(0, 0): {0: 1}, (0, 1): {1: 1}, (0, 2): {2: 1}, (1, 1): {2: a}})
    alg.validate()
    assert check_algebra(strict_structure(sierpinski(), alg), 2).passed
