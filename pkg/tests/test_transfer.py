import itertools

import pytest
from hypothesis import given, settings, strategies as st

from disjcalc.core import DisjCalcError, GradedComplex, Q, pseudo_line, sierpinski, discrete
from disjcalc.hodisj import (check_algebra, check_infinity_morphism, dual_numbers, strict_structure,
                             unit_algebra)
from disjcalc.koszul_dual import all_families
from disjcalc.transfer import (LIE_PRESETS, LieData, NotNilpotent, NotSquareZero, PseudoLineModel,
                               Retraction, SymAlgebra, TruncationExceeded, _clean, ce_demo,
                               heisenberg, identity_retraction, pbw_product, perturb,
                               random_iso_retraction, random_retraction_structure, transfer,
                               transfer_by_trees, validate_retraction)


def K_X(h_sign=-1):
    """K(X) = <a (0), w1 (1), w3 (1)>, d a = w1 - w3, onto <g (1)>."""
    big = GradedComplex([0, 1, 1], {0: {1: Q(1), 2: Q(-1)}}, ["a", "w1", "w3"])
    small = GradedComplex([1], {}, ["g"])
    return Retraction(big, small, {0: {1: Q(1)}}, {1: {0: Q(1)}, 2: {0: Q(1)}}, {2: {0: Q(h_sign)}})


# --------------------------------------------------------------- retractions

def test_identity_retraction_valid():
    C = GradedComplex([0, 1], {0: {1: Q(1)}})
    assert validate_retraction(identity_retraction(C)).passed


def test_pseudo_line_retraction_valid():
    assert validate_retraction(K_X()).passed


def test_flipped_homotopy_fails():
    rep = validate_retraction(K_X(+1))
    assert not rep.passed
    assert {v["identity"] for v in rep.violations} == {"d h + h d = id - i p"}


def test_model_retractions_valid():
    m = PseudoLineModel(heisenberg())
    for U, r in m.retraction.items():
        assert validate_retraction(r).passed, U


# ------------------------------------------------------------- perturbation

def _three_dim():
    # x (0), y (1), z (1); d x = y; retract onto <z>
    big = GradedComplex([0, 1, 1], {0: {1: Q(1)}}, ["x", "y", "z"])
    small = GradedComplex([1], {}, ["z"])
    return Retraction(big, small, {0: {2: Q(1)}}, {2: {0: Q(1)}}, {1: {0: Q(1)}})


def test_zero_perturbation_is_identity():
    r = _three_dim()
    P = perturb(r, {})
    assert P.iterations == 0 and not P.delta_small
    assert _clean(P.retraction.i) == _clean(r.i)
    assert _clean(P.retraction.p) == _clean(r.p)
    assert _clean(P.retraction.h) == _clean(r.h)


def test_rank_one_perturbation():
    r = _three_dim()
    assert validate_retraction(r).passed
    P = perturb(r, {0: {2: Q(1)}})  # x -> z
    assert P.iterations == 1
    assert validate_retraction(P.retraction).passed
    assert P.retraction.p[1] == {0: -1}  # p'(y) = -z
    assert not P.delta_small


def test_not_square_zero():
    big = GradedComplex([0, 1, 2], {0: {1: Q(1)}}, ["x", "y", "z"])
    r = Retraction(big, GradedComplex([2], {}, ["z"]), {0: {2: Q(1)}}, {2: {0: Q(1)}}, {1: {0: Q(1)}})
    with pytest.raises(NotSquareZero):
        perturb(r, {1: {2: Q(1)}})


def test_not_nilpotent():
    big = GradedComplex([0, 1], {0: {1: Q(1)}}, ["x", "y"])
    r = Retraction(big, GradedComplex([], {}, []), {}, {}, {1: {0: Q(1)}})
    assert validate_retraction(r).passed
    with pytest.raises(NotNilpotent):
        perturb(r, {0: {1: Q(1)}})


def test_ce_perturbation_keeps_inclusion():
    m = PseudoLineModel(heisenberg())
    for U in m.space.opens:
        P = perturb(m.retraction[U], m.delta[U])
        assert not P.delta_small
        assert _clean(P.retraction.i) == _clean(m.retraction[U].i)
        assert validate_retraction(P.retraction).passed


# ----------------------------------------------------------------- transfer

def _same_ops(A, B, bound):
    for F in all_families(A.space, bound):
        for idx in A.input_tuples(F):
            if A.op(F)(idx) != B.op(F)(idx):
                return F, idx
    return None


def test_identity_transfer_returns_A():
    A = strict_structure(sierpinski(), dual_numbers())
    rets = {U: identity_retraction(A.carriers[U]) for U in A.space.opens}
    B, iinf = transfer(A, rets, 3)
    assert _same_ops(A, B, 3) is None
    assert check_infinity_morphism(iinf, 3).passed


def test_h_zero_transfer_passes():
    A = strict_structure(pseudo_line(), dual_numbers())
    rets = {U: random_iso_retraction(A.carriers[U], seed=n) for n, U in enumerate(A.space.opens)}
    B, iinf = transfer(A, rets, 3)
    assert check_algebra(B, 3).passed
    assert check_infinity_morphism(iinf, 3).passed
    # with h = 0 every op of weight >= 2 is zero, as in A
    for F in all_families(A.space, 3):
        if F.weight >= 2:
            assert all(not B.op(F)(idx) for idx in B.input_tuples(F))


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_retraction_transfer(seed):
    A, rets = random_retraction_structure(sierpinski(), dual_numbers(), seed)
    for r in rets.values():
        assert validate_retraction(r).passed
    B, iinf = transfer(A, rets, 3)
    assert check_algebra(B, 3).passed
    assert check_infinity_morphism(iinf, 3).passed


def test_other_homotopy_sign_breaks_morphism():
    A, rets = random_retraction_structure(sierpinski(), dual_numbers(), 7)
    _, iinf = transfer(A, rets, 3, h_sign=+1)
    assert not check_infinity_morphism(iinf, 3).passed


@pytest.mark.parametrize("sp", [sierpinski(), discrete(2)], ids=lambda s: s.name)
def test_tree_route_agrees(sp):
    A, rets = random_retraction_structure(sp, dual_numbers(), 11)
    B, _ = transfer(A, rets, 3)
    total = 0
    for F in all_families(sp, 3):
        m, n = transfer_by_trees(A, rets, F)
        total += n
        for idx in B.input_tuples(F):
            assert m(idx) == B.direct(F)(idx), (F, idx)
    assert total > 0


# ---------------------------------------------------------------------- PBW

def test_pbw_examples():
    g = heisenberg()
    assert pbw_product(g, (1,), (0,)) == {(0, 1): 1, (2,): -1}
    assert pbw_product(g, (0,), (0,)) == {(0, 0): 1}
    ab = LIE_PRESETS["abelian2"]()
    assert pbw_product(ab, (1,), (0, 1)) == {(0, 1, 1): 1}


def _monos(n, maxlen):
    out = []
    for d in range(maxlen + 1):
        out.extend(itertools.combinations_with_replacement(range(n), d))
    return out


@pytest.mark.parametrize("name", sorted(LIE_PRESETS))
def test_pbw_associative(name):
    g = LIE_PRESETS[name]()
    from disjcalc.transfer import pbw_mul_vec
    ms = _monos(len(g), 3)
    for a, b, c in itertools.product(ms, repeat=3):
        left = pbw_mul_vec(g, pbw_product(g, a, b), {c: 1})
        right = pbw_mul_vec(g, {a: 1}, pbw_product(g, b, c))
        assert left == right, (a, b, c)


def test_lie_json_roundtrip_and_validation():
    g = heisenberg()
    h = LieData.from_json(g.to_json())
    assert h.brackets == g.brackets and h.validate()
    # [x,y] = x, [y,z] = y, [x,z] = z: the Jacobiator is x - y - z
    bad = LieData(["x", "y", "z"], {(0, 1): {0: 1}, (1, 2): {1: 1}, (0, 2): {2: 1}})
    with pytest.raises(DisjCalcError, match="Jacobi"):
        bad.validate()


def test_truncation():
    S = SymAlgebra(["x", "y"], [0, 0], maxdeg=2)
    assert S.mul_mon((0,), (1,)) == (1, (0, 1))
    with pytest.raises(TruncationExceeded):
        S.mul_mon((0, 1), (0,))


# ------------------------------------------------------------------ CE demo

@pytest.mark.parametrize("name", sorted(LIE_PRESETS))
def test_ce_demo_passes(name):
    report, B, iinf, model = ce_demo(LIE_PRESETS[name](), 3)
    failed = [k for k, v in report["checks"].items() if not v["passed"]]
    assert report["passed"], failed


def test_ce_demo_heisenberg_product():
    report, *_ = ce_demo(heisenberg(), 2, check=False)
    assert "x·y = sym(xy) + 1/2 z" in report["lines"]
    assert "y·x = sym(xy) - 1/2 z" in report["lines"]
    assert all(p["pbw_match"] for p in report["products"])


def test_ce_demo_abelian_commutative():
    report, *_ = ce_demo(LIE_PRESETS["abelian2"](), 2, check=False)
    assert "x·y = sym(xy)" in report["lines"] and "y·x = sym(xy)" in report["lines"]


def test_ce_demo_independent_of_representative():
    r1, *_ = ce_demo(heisenberg(), 2, rep="w1", check=False)
    r3, *_ = ce_demo(heisenberg(), 2, rep="w3", check=False)
    assert r1["products"] == r3["products"]


def test_ce_carrier_components():
    m = PseudoLineModel(heisenberg())
    T, sg = m.small[frozenset({1, 3})]
    # Sym(g) (x) Sym(g) truncated at total degree 2, g three-dimensional
    assert len({c for c, _ in sg}) == 2 and len(T) == 1 + 6 + 21
