import random
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from disjcalc.core import Q, discrete, empty, pseudo_line, sierpinski, vadd
from disjcalc.koszul_dual import (ChainFamily, InvalidFamily, MixedArity, all_families, canonical_family,
                                  codistribute, compare_cinfty, decompose_full, decompose_inf, family,
                                  kd_differential, kd_differential_planar, kd_reduce, koszul_homology,
                                  literal_signs, parse_family, reduced_dimension, shuffle_chain,
                                  verify_cooperad, _family_checks)

E = frozenset()
S1 = frozenset({1})
S12 = frozenset({1, 2})


def fs(*xs):
    return frozenset(xs)


# ------------------------------------------------------------------ chains

def test_shuffle_chain_example():
    U11, U12, U13 = fs(1), fs(1, 2), fs(1, 2, 5)
    U21, U22 = fs(3), fs(3, 4)
    got = shuffle_chain((1, 3, 2), [(U11, U12, U13), (U21, U22)])
    assert got == (U11 | U21, U12 | U21, U12 | U22, U13 | U22)


def test_shuffle_chain_identity_and_trivial():
    a = (fs(1), fs(1, 2))
    b = (fs(3), fs(3, 4))
    assert shuffle_chain((1, 2), [a, b]) == (fs(1, 3), fs(1, 2, 3), fs(1, 2, 3, 4))
    assert shuffle_chain((), [(fs(1),), (fs(2),)]) == (fs(1, 2),)


def test_family_validation():
    with pytest.raises(InvalidFamily):
        family((S1, S1))
    with pytest.raises(InvalidFamily):
        family((S1,), (S12,))
    F = family((E, S1, S12))
    assert F.weight == 2 and F.degree == -2 and F.output == S12


def test_parse_family_roundtrip():
    F = family((E, S1), (fs(3),))
    assert parse_family(repr(F)) == F
    assert parse_family('[[[], [1]], [[3]]]') == F


# ------------------------------------------------------------- reduction

def test_binary_symmetric_identification():
    a = family((E,), (S1,))
    b = family((S1,), (E,))
    # mu_{U,V} - mu_{V,U}.(12) is a relation
    assert kd_reduce({(a, (1, 2)): 1, (b, (2, 1)): -1}) == {}
    assert kd_reduce({(a, (1, 2)): 1}) != {}


def test_reduce_idempotent_and_linear():
    sp = sierpinski()
    rng = random.Random(3)
    fams = [F for F in all_families(sp, 3) if F.k == 3 and F.weight == 3]
    for _ in range(20):
        F = rng.choice(fams)
        perm = rng.sample(range(3), 3)
        G = ChainFamily([F[m] for m in perm])
        v = {(G, tuple(m + 1 for m in perm)): Q(rng.randint(-3, 3) or 1), (F, (1, 2, 3)): Q(2)}
        r = kd_reduce(v)
        assert kd_reduce(r) == r
        r2 = kd_reduce({k: 3 * c for k, c in v.items()})
        assert r2 == {k: 3 * c for k, c in r.items()}


def test_mixed_strata_rejected():
    with pytest.raises(MixedArity):
        kd_reduce({family((E,), (S1,)): 1, family((E, S1),): 1})


def test_reduced_dimension_sierpinski_binary():
    assert reduced_dimension(sierpinski(), 2, 1) == 3


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_reduced_dimension_is_lie(k):
    assert reduced_dimension(empty(), k, k - 1) == factorial(k - 1)


# ----------------------------------------------------------- differential

def test_differential_example():
    assert kd_differential(family((E, S1, S12))) == {(family((E, S12)), (1,)): 1}


def test_differential_short_chains_vanish():
    for F in all_families(sierpinski(), 3):
        if all(len(ch) <= 2 for ch in F):
            assert kd_differential(F) == {}


def test_differential_degree_and_weight():
    for F in all_families(pseudo_line(), 3):
        for (G, lab), c in kd_differential(F).items():
            assert G.weight == F.weight - 1 and G.degree == F.degree + 1


def test_d_squared_zero_discrete3():
    for F in all_families(discrete(3), 4):
        dd = {}
        for G, c in kd_differential_planar(F).items():
            vadd(dd, kd_differential_planar(G), c)
        assert not {k: v for k, v in dd.items() if v}, F


# ---------------------------------------------------------- codistribute

def test_codistribute_base_case():
    U1, U = fs(1), fs(1, 2)
    V = fs(3)
    out = codistribute(family((U1, U), (V,)))
    assert len(out) == 1
    ch, bottoms, c = out[0]
    assert ch == (U1 | V, U | V) and bottoms == family((U1,), (V,)) and c == -1


def test_codistribute_all_length_one():
    F = family((S1,), (fs(3),))
    assert codistribute(F) == [((fs(1, 3),), F, 1)]


def test_codistribute_three_two():
    F = family((E, S1, S12), (fs(3), fs(3, 4)))
    out = codistribute(F)
    assert [c for _, _, c in out] == [-1, 1, -1]


# --------------------------------------------------------- decompositions

def test_decompose_inf_weight_one_empty():
    assert decompose_inf(family((E, S1))) == ()
    assert list(decompose_inf(family((E,), (S1,)))) == []


def test_decompose_inf_length_three_chain():
    (t,) = decompose_inf(family((E, S1, S12)))
    assert t.outer == family((S1, S12)) and t.inner == family((E, S1)) and t.j == 1


def test_decompose_inf_m3():
    F = family((E,), (E,), (E,))
    shapes = {(t.outer.k, t.j, t.inner.k) for t in decompose_inf(F)}
    assert shapes == {(2, 1, 2), (2, 2, 2)}


def test_weight_additive_in_decompositions():
    for F in all_families(pseudo_line(), 3):
        for t in decompose_inf(F):
            assert t.outer.weight + t.inner.weight == F.weight
        for t in decompose_full(F):
            assert t.outer.weight + sum(x.weight for x in t.inners) == F.weight


def test_cinfty_comparison():
    for n in range(2, 6):
        assert compare_cinfty(n) == {}


# ----------------------------------------------------------- verification

def test_coassociativity_witness():
    F = family((E, S1), (E,))
    assert all(det is None for _, det in _family_checks(F))


@pytest.mark.parametrize("sp,w", [(sierpinski(), 4), (pseudo_line(), 3), (empty(), 4)])
def test_verify_cooperad(sp, w):
    rep = verify_cooperad(sp, w)
    assert rep.passed, rep.summary()


def test_memo_agrees_with_plain_run():
    sp = pseudo_line()
    a = verify_cooperad(sp, 3, memo=True)
    b = verify_cooperad(sp, 3, memo=False)
    assert a.passed and b.passed and a.checked == b.checked


def test_canonical_family_invariant_under_relabelling():
    sp = discrete(3)
    swap = {1: 2, 2: 1, 3: 3}
    for F in all_families(sp, 3):
        G = ChainFamily([[frozenset(swap[p] for p in U) for U in ch] for ch in F])
        assert canonical_family(F) == canonical_family(G)


# each sign correction is load-bearing: literal signs break a known family

def test_literal_d_sign_fails():
    with literal_signs(d=True, shuffle=False, full=False):
        rep = verify_cooperad(pseudo_line(), 3)
    assert not rep.passed
    assert verify_cooperad(pseudo_line(), 3).passed


def test_literal_shuffle_sign_fails():
    with literal_signs(d=False, shuffle=True, full=False):
        rep = verify_cooperad(pseudo_line(), 3)
    assert not rep.passed


def test_literal_full_sign_fails():
    with literal_signs(d=False, shuffle=False, full=True):
        rep = verify_cooperad(sierpinski(), 3)
    assert not rep.passed
    assert verify_cooperad(sierpinski(), 3).passed


# ------------------------------------------------------------- homology

def test_koszul_homology_examples():
    assert koszul_homology(sierpinski(), S12, (E, S1)) == {0: 1}
    assert koszul_homology(sierpinski(), S1, (S12,)) == {}
    assert koszul_homology(empty(), E, (E, E, E)) == {0: 1}


@settings(max_examples=15, deadline=None)
@given(st.data())
def test_koszul_homology_random_arity(data):
    sp = pseudo_line()
    opens = sorted(sp.opens, key=lambda U: (len(U), sorted(U)))
    k = data.draw(st.integers(1, 3))
    cols = tuple(data.draw(st.sampled_from(opens)) for _ in range(k))
    V = data.draw(st.sampled_from(opens))
    ranks = koszul_homology(sp, V, cols)
    from disjcalc.koszul_dual import is_admissible
    if is_admissible(V, cols):
        assert ranks == {0: 1}
    else:
        assert ranks == {}
