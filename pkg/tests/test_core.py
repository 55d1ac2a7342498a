import itertools
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from disjcalc.core import (GradedComplex, Q, TopologyViolation, DifferentialNotSquareZero, all_topologies,
                           bin_, build_space, check_tree, complex_from_json, discrete, ext, fmt_open,
                           graft, homology_ranks, indiscrete, leaf, koszul_sign, parse_open, perm_sign,
                           pseudo_line, rank, nullspace, shuffles, sierpinski, split_opens, tree_from_json,
                           tree_to_json, tree_to_dot, InadmissibleTree, preset, empty, point)


def test_presets_are_topologies():
    for sp in [empty(), point(), sierpinski(), pseudo_line(), discrete(3), indiscrete(3)]:
        for a in sp.opens:
            for b in sp.opens:
                assert a | b in sp.opens and a & b in sp.opens


def test_pseudo_line_opens():
    sp = pseudo_line()
    assert sorted(map(sorted, sp.opens)) == [[], [1], [1, 2, 3], [1, 3], [3]]


def test_build_space_rejects_non_topology():
    with pytest.raises(TopologyViolation):
        build_space([1, 2, 3], [[], [1], [2], [1, 2, 3]])


def test_preset_names():
    assert len(preset("discrete3").opens) == 8
    assert len(preset("indiscrete2").opens) == 2
    with pytest.raises(KeyError):
        preset("klein_bottle")


def test_topology_counts():
    # homeomorphism classes / labelled topologies on 0..3 points
    assert [len(all_topologies(n)) for n in range(4)] == [1, 1, 3, 9]
    assert [len(all_topologies(n, False)) for n in range(4)] == [1, 1, 4, 29]


def test_parse_open():
    assert parse_open("∅") == frozenset()
    assert parse_open("{1,2}") == frozenset({1, 2})
    assert split_opens("∅,{1},{2,3}") == [frozenset(), frozenset({1}), frozenset({2, 3})]
    assert fmt_open(parse_open("{3,1}")) == "{1,3}"


@given(st.lists(st.integers(0, 2), min_size=1, max_size=4))
def test_shuffle_count_is_multinomial(ls):
    n = sum(ls)
    want = factorial(n)
    for l in ls:
        want //= factorial(l)
    sh = list(shuffles(*ls))
    assert len(sh) == want
    assert len({s for s, _ in sh}) == want
    for s, sg in sh:
        assert sg == perm_sign(s)


def test_perm_sign_and_koszul():
    assert perm_sign((2, 1)) == -1
    assert perm_sign((2, 3, 1)) == 1
    assert koszul_sign((2, 1), [1, 1]) == -1
    assert koszul_sign((2, 1), [1, 0]) == 1


def test_homology_examples():
    assert homology_ranks(GradedComplex([0])) == {0: 1}
    # K(X) = <a; w1, w3>, d a = w1 - w3
    K = GradedComplex([0, 1, 1], {0: {1: Q(1), 2: Q(-1)}}, ["a", "w1", "w3"])
    assert homology_ranks(K) == {1: 1}


def test_square_zero_enforced():
    with pytest.raises(DifferentialNotSquareZero):
        GradedComplex([0, 1, 2], {0: {1: Q(1)}, 1: {2: Q(1)}})


@st.composite
def complexes(draw):
    """Direct sums of cells and acyclic pairs, conjugated by a random
    degreewise change of basis."""
    from disjcalc.transfer import _invert
    pieces = draw(st.lists(st.tuples(st.booleans(), st.integers(-1, 1)), min_size=1, max_size=5))
    degs, diff = [], {}
    for pair, d in pieces:
        if pair:
            diff[len(degs)] = {len(degs) + 1: Q(1)}
            degs += [d, d + 1]
        else:
            degs.append(d)
    n = len(degs)
    T = {}
    for j in range(n):
        T[j] = {j: Q(1)}
        for k in range(j):
            if degs[k] == degs[j]:
                c = draw(st.integers(-2, 2))
                if c:
                    T[j][k] = Q(c)
    Ti = _invert(T, n)
    # d' = T d T^-1
    def app(M, v):
        out = {}
        for a, c in v.items():
            for b, x in M.get(a, {}).items():
                out[b] = out.get(b, 0) + c * x
        return {b: x for b, x in out.items() if x}
    new = {j: app(T, app(diff, Ti[j])) for j in range(n)}
    return GradedComplex(degs, {j: v for j, v in new.items() if v})


@given(complexes())
@settings(max_examples=60)
def test_euler_characteristic(C):
    chi = sum((-1) ** d for d in C.degrees)
    hom = homology_ranks(C)
    assert chi == sum((-1) ** d * r for d, r in hom.items())


def test_rank_and_nullspace():
    vecs = [{0: 1, 1: 1}, {1: 1, 2: 1}, {0: 1, 2: -1}]
    assert rank(vecs) == 2
    ker = nullspace(vecs)
    assert len(ker) == 1


def test_complex_json_roundtrip():
    K = GradedComplex([0, 1, 1], {0: {1: Q(1), 2: Q(-1)}}, ["a", "w1", "w3"], levels=[0, 1, 1])
    K2 = complex_from_json(K.to_json())
    assert K2.degrees == K.degrees and K2.diff == K.diff and K2.levels == K.levels


# ---------------------------------------------------------------- trees

def _sample_tree():
    return ext({1, 2}, {1, 2, 3}, bin_(leaf(1, {1}), leaf(2, {2})))


def test_tree_json_roundtrip_and_dot():
    t = _sample_tree()
    assert tree_from_json(tree_to_json(t)) == t
    assert "digraph" in tree_to_dot(t)


def test_tree_json_errors_name_path():
    with pytest.raises(InadmissibleTree, match=r"\$\.children\[0\]"):
        tree_from_json({"ext": [[1], [1, 2]], "children": [{"bogus": 1}]})


def test_check_tree_rejects_color_mismatch():
    with pytest.raises(InadmissibleTree):
        check_tree(ext({1}, {1, 2}, leaf(1, {2})))
    with pytest.raises(InadmissibleTree):
        check_tree(ext({1}, {1}, leaf(1, {1})))


@given(st.integers(1, 3), st.booleans())
def test_graft_stays_admissible(i, with_ext):
    from disjcalc.core import tree_leaves, tree_inputs
    t1 = bin_(bin_(leaf(1, {1}), leaf(2, {2})), leaf(3, {3}))
    color = frozenset({i})
    t2 = bin_(leaf(1, frozenset()), leaf(2, color))
    if with_ext:
        t2 = ext(frozenset(), color, leaf(1, frozenset()))
    g = graft(t1, i, t2)
    check_tree(g)
    k = 3 + len(tree_leaves(t2)) - 1
    assert sorted(l.label for l in tree_leaves(g)) == list(range(1, k + 1))
    ins = list(tree_inputs(t1))
    assert tree_inputs(g) == tuple(ins[:i - 1] + list(tree_inputs(t2)) + ins[i:])
