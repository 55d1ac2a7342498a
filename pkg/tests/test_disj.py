import itertools

import pytest
from hypothesis import given, settings, strategies as st

from disjcalc.core import (InadmissibleTree, bin_, discrete, empty, ext, graft, leaf, normalize_tree, pseudo_line,
                           relabel_tree, sierpinski, tree_inputs, tree_leaves, tree_output)
from disjcalc.disj import (R3_SHAPES, ColorMismatch, DisjBasisElement, arity_dimension, check_ql,
                           color_signatures, compose_partial, compose_strict, disj_admissible,
                           enumerate_trees, fine_tuned_system, identity_element, normal_form,
                           normal_form_tree, presentation_report, relation_basis, same_span,
                           strict_algebra_from_commutative)
from disjcalc.hodisj import check_algebra, dual_numbers, nonassociative_sample, unit_algebra

E = frozenset()


def fs(*xs):
    return frozenset(xs)


def m(V, *ins):
    return DisjBasisElement.make(V, ins)


# ------------------------------------------------------------- composition

def test_compose_unary_collapse():
    assert compose_partial(m(fs(1, 2), fs(1)), 1, m(fs(1), E)) == m(fs(1, 2), E)


def test_compose_through_union():
    U1, U2, V = fs(1), fs(2), fs(1, 2, 3)
    assert compose_partial(m(V, U1 | U2), 1, m(U1 | U2, U1, U2)) == m(V, U1, U2)


def test_compose_color_mismatch():
    with pytest.raises(ColorMismatch):
        compose_partial(m(fs(1, 2), fs(1)), 1, m(fs(2), E))
    with pytest.raises(ColorMismatch):
        compose_strict(m(fs(1, 2), fs(1)), [m(fs(1), E), m(fs(1), E)])


def test_compose_zero_is_not_an_error():
    # both empty inputs are "disjoint"; two copies of {1} are not
    outer = m(fs(1, 2), fs(1), fs(2))
    assert compose_strict(outer, [m(fs(1), fs(1)), m(fs(2), E)]) == m(fs(1, 2), fs(1), E)


def test_inadmissible_basis_element():
    with pytest.raises(InadmissibleTree):
        m(fs(1), fs(1), fs(1))


def test_action_matches_definition():
    e = m(fs(1, 2, 3), fs(1), fs(2), E)
    # sigma sends input i to slot sigma(i)
    assert e.act((2, 3, 1)).inputs == (E, fs(1), fs(2))
    for s1 in itertools.permutations((1, 2, 3)):
        for s2 in itertools.permutations((1, 2, 3)):
            comp = tuple(s1[s2[i] - 1] for i in range(3))
            assert e.act(s2).act(s1) == e.act(comp)


# ------------------------------------------------------------ normal forms

def test_rewriting_figure_tree():
    U, V, W, X = fs(1), fs(2), fs(3), fs(4)
    Z = fs(1, 2, 3, 4, 5)
    t = ext(U | V | W | X, Z, bin_(bin_(leaf(1, U), leaf(3, W)), bin_(leaf(2, V), leaf(4, X))))
    assert normal_form(t) == {m(Z, U, V, W, X): 1}


def test_ext_ladder():
    U, V, W = E, fs(1), fs(1, 2)
    assert normal_form(ext(V, W, ext(U, V, leaf(1, U)))) == {m(W, U): 1}


def test_single_leaf():
    assert normal_form(leaf(1, fs(1))) == {identity_element(fs(1)): 1}


def test_inadmissible_tree_rejected():
    with pytest.raises(InadmissibleTree):
        normal_form(ext(fs(2), fs(1, 2), leaf(1, fs(1))))


def _all_trees(space, max_k=3):
    out = []
    for k in range(1, max_k + 1):
        for V, ins in color_signatures(space, k, canonical=False):
            out.extend(enumerate_trees(space, V, ins, max_weight=4))
    return out


TREES = _all_trees(sierpinski())


def test_tree_pool_nonempty():
    assert len(TREES) > 100


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(TREES), st.integers(0, 10 ** 6))
def test_confluence(t, seed):
    assert normal_form_tree(t, "random", seed) == normal_form_tree(t)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(TREES), st.permutations([1, 2, 3]))
def test_equivariance(t, perm):
    k = len(tree_leaves(t))
    sigma = tuple(p for p in perm if p <= k)
    moved = normalize_tree(relabel_tree(t, {i + 1: sigma[i] for i in range(k)}))
    assert normal_form_tree(moved) == normal_form_tree(t).act(sigma)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(TREES), st.sampled_from(TREES), st.integers(1, 3))
def test_graft_functoriality(t1, t2, i):
    k = len(tree_leaves(t1))
    i = min(i, k)
    if tree_inputs(t1)[i - 1] != tree_output(t2):
        return
    g = graft(t1, i, t2)
    assert normal_form_tree(g) == compose_partial(normal_form_tree(t1), i, normal_form_tree(t2))


@pytest.mark.parametrize("sp", [empty(), sierpinski(), pseudo_line()], ids=lambda s: s.name)
def test_arity_dimension_matches_admissibility(sp):
    rep = presentation_report(sp, max_arity=3)
    assert rep.passed, rep.summary()


def test_rank_method_agrees_with_normal_forms():
    sp = sierpinski()
    for k in (1, 2, 3):
        for V, ins in color_signatures(sp, k, canonical=True):
            d = arity_dimension(sp, V, ins, "rank")
            assert d == arity_dimension(sp, V, ins) == int(disj_admissible(V, ins))


# --------------------------------------------------------------- relations

def test_r1_on_sierpinski_chain():
    rb = relation_basis(sierpinski(), (fs(1, 2), (E,)))
    assert len(rb.r1) == 1 and not rb.r2 and not rb.r3
    x = leaf(1, E)
    assert rb.r1[0] == {ext(fs(1), fs(1, 2), ext(E, fs(1), x)): 1, ext(E, fs(1, 2), x): -1}
    # quadratic projection drops the linear term
    assert rb.qr[0] == {ext(fs(1), fs(1, 2), ext(E, fs(1), x)): 1}


def test_r2_three_disjoint_opens():
    rb = relation_basis(discrete(3), (fs(1, 2, 3), (fs(1), fs(2), fs(3))))
    assert len(rb.r2) == 2


def test_r2_needs_disjointness():
    rb = relation_basis(sierpinski(), (fs(1), (fs(1), fs(1), E)))
    assert len(rb) == 0


@pytest.mark.parametrize("sp", [sierpinski(), pseudo_line(), empty()], ids=lambda s: s.name)
def test_check_ql(sp):
    rep = check_ql(sp, 3)
    assert rep.passed, rep.summary()


def test_check_ql_noncanonical_agrees():
    a = check_ql(sierpinski(), 3, canonical=True)
    b = check_ql(sierpinski(), 3, canonical=False)
    assert a.passed and b.passed and b.checked >= a.checked


# ------------------------------------------------------ fine-tuned system

def test_fine_tuned_equations():
    eqs, sols, residues = fine_tuned_system()
    want = {
        "E(E(B(-,-)))": {1: 1, 6: -1, 9: -1},
        "B(E(E(-)),-)": {2: 1, 5: 1},
        "B(-,E(E(-)))": {3: 1, 8: 1},
        "B(E(-),E(-))": {4: 1, 7: 1},
        "E(B(-,E(-)))": {4: -1, 8: -1, 9: 1},
        "E(B(E(-),-))": {5: -1, 6: 1, 7: -1},
    }
    assert eqs == want


def test_fine_tuned_solutions_and_residues():
    eqs, sols, residues = fine_tuned_system()
    ref = [(1, -1, 0, 0, 1, 1, 0, 0, 0), (0, 1, -1, -1, -1, 0, 1, 1, 0), (1, -1, 0, 1, 1, 0, -1, 0, 1)]
    ref = [{i + 1: c for i, c in enumerate(v) if c} for v in ref]
    assert len(sols) == 3 and same_span(sols, ref, 9)
    shapes = sorted({s for r in R3_SHAPES for s in r})
    for q in residues:
        assert set(q) <= set(shapes)
        # each residue is a combination of the R3 shapes
        from disjcalc.core import rank
        assert rank(list(R3_SHAPES) + [q]) == rank(R3_SHAPES)


# ------------------------------------------------------ strict algebras

def test_strict_algebra_unit_sierpinski():
    A = strict_algebra_from_commutative(sierpinski(), unit_algebra())
    assert check_algebra(A, 3).passed


def test_strict_algebra_dual_numbers_pseudo_line():
    A = strict_algebra_from_commutative(pseudo_line(), dual_numbers())
    assert check_algebra(A, 3).passed


def test_strict_algebra_nonassociative_fails():
    from disjcalc.disj import NotAssociative
    with pytest.raises(NotAssociative):
        strict_algebra_from_commutative(discrete(3), nonassociative_sample())
